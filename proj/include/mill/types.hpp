#pragma once

#include <compare>
#include <cstddef>
#include <cstdint>
#include <memory>
#include <optional>
#include <ostream>
#include <set>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace mill {

enum class Notation { infix, polish };

// Immutable type value; copies share structure.
class Type {
 public:
  enum class Kind : std::uint8_t { atom, arrow, star, diamond };

  static Type atom(std::string name);
  // An empty label is the unlabeled implication.
  static Type arrow(Type argument, std::string label, Type result);
  static Type star(Type inner);
  static Type diamond(std::string label, Type inner);

  Kind kind() const noexcept;
  bool is_atom() const noexcept { return kind() == Kind::atom; }
  bool is_arrow() const noexcept { return kind() == Kind::arrow; }
  bool is_star() const noexcept { return kind() == Kind::star; }
  bool is_diamond() const noexcept { return kind() == Kind::diamond; }

  // Atom name.
  const std::string& name() const;
  // Arrow or diamond label; empty for an unlabeled arrow.
  const std::string& label() const;
  const Type& argument() const;
  const Type& result() const;
  const Type& inner() const;

  std::size_t hash() const noexcept;

  friend bool operator==(const Type& a, const Type& b) noexcept;
  friend std::strong_ordering operator<=>(const Type& a, const Type& b) noexcept;

 private:
  struct Node;
  explicit Type(std::shared_ptr<const Node> node) : node_(std::move(node)) {}
  std::shared_ptr<const Node> node_;
};

std::ostream& operator<<(std::ostream& os, const Type& t);

struct Vocabulary {
  std::set<std::string, std::less<>> atoms;
  std::set<std::string, std::less<>> labels;

  bool has_atom(std::string_view a) const { return atoms.find(a) != atoms.end(); }
  bool has_label(std::string_view l) const { return labels.find(l) != labels.end(); }

  static const Vocabulary& standard();
};

class ObliquenessPoset {
 public:
  // Ranks from outermost argument to closest-to-result.
  explicit ObliquenessPoset(std::vector<std::vector<std::string>> ranks);

  std::optional<std::size_t> rank(std::string_view label) const;
  const std::vector<std::vector<std::string>>& ranks() const { return ranks_; }

  static const ObliquenessPoset& standard();

 private:
  std::vector<std::vector<std::string>> ranks_;
};

// Priority groups of result atoms used to settle coordinator ties.
struct CoordinatorBias {
  std::vector<std::set<std::string, std::less<>>> groups;
  static const CoordinatorBias& standard();
};

struct Argument {
  Type type;
  std::string label;
  friend bool operator==(const Argument&, const Argument&) = default;
};

Type parse_type(std::string_view text, Notation notation,
                const Vocabulary& vocab = Vocabulary::standard());
std::string print_type(const Type& t, Notation notation);

// Polish token helpers shared with the type language.
std::vector<std::string> polish_tokens(const Type& t);
int token_arity(std::string_view token);

int order(const Type& t);
const Type& final_result(const Type& t);

// True when every star sits directly in a cnj argument and is not nested.
bool well_formed(const Type& t);

Type make_complex(std::vector<Argument> args, Type result,
                  const ObliquenessPoset& poset = ObliquenessPoset::standard());
// Peels arrows off the spine down to the first non-arrow result.
std::pair<std::vector<Argument>, Type> decompose(const Type& t);

Type instantiate_coordinator(const std::vector<Type>& conjuncts,
                             const CoordinatorBias& bias = CoordinatorBias::standard());

inline constexpr std::string_view kArrow = "→";
inline constexpr std::string_view kStar = "★";
inline constexpr std::string_view kDiamond = "◇";
inline constexpr std::string_view kConjunctLabel = "cnj";

}  // namespace mill

template <>
struct std::hash<mill::Type> {
  std::size_t operator()(const mill::Type& t) const noexcept { return t.hash(); }
};
