#pragma once

#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "mill/types.hpp"

namespace mill {

// Antecedent structure. Multisets are flattened and unordered for comparison.
class Structure {
 public:
  enum class Kind { leaf, multiset, bracket };

  static Structure leaf(std::string id, Type type);
  static Structure multiset(std::vector<Structure> items);
  static Structure bracket(std::string label, Structure inner);

  Kind kind() const { return kind_; }
  const std::string& id() const { return text_; }
  const std::string& label() const { return text_; }
  const Type& type() const { return *type_; }
  const std::vector<Structure>& items() const { return items_; }
  const Structure& inner() const { return items_.front(); }

  // Nested multisets inlined, singleton multisets unwrapped.
  Structure normalized() const;
  // Order-insensitive rendering; equal keys mean equal structures.
  std::string key() const;
  // Top-level items of the normalized structure.
  std::vector<Structure> top_level() const;

  // Agrees with comparing keys.
  friend bool operator==(const Structure& a, const Structure& b);

 private:
  Structure(Kind kind, std::string text, std::optional<Type> type, std::vector<Structure> items)
      : kind_(kind), text_(std::move(text)), type_(std::move(type)), items_(std::move(items)) {}

  Kind kind_;
  std::string text_;
  std::optional<Type> type_;
  std::vector<Structure> items_;
};

Structure union_of(const Structure& a, const Structure& b);

struct Judgement {
  Structure antecedent;
  Type succedent;
};

enum class Rule { ax, lex, elim, intro, diamond_intro, diamond_elim };

const char* rule_name(Rule r);

struct Proof {
  Rule rule;
  Judgement conclusion;
  // elim: functor then argument. diamond_elim: the diamond proof then the bracketed one.
  std::vector<Proof> premises;
  // Hypothesis discharged by intro, or the bracketed hypothesis of diamond_elim.
  std::optional<std::string> binder;
  // Modality of diamond rules; slot label of an ax hypothesis.
  std::string label;
  // Constant of a lex leaf; defaults to the leaf id.
  std::optional<std::string> word;

  static Proof ax(std::string id, Type type, std::string label = {});
  static Proof lex(std::string id, Type type, std::optional<std::string> word = {});
  static Proof elim(Proof functor, Proof argument);
  // `conclusion` is the arrow being introduced.
  static Proof intro(std::string binder, Type conclusion, Proof body);
  static Proof diamond_intro(std::string label, Proof body);
  static Proof diamond_elim(std::string binder, Proof diamond, Proof body);
};

enum class CheckFailure {
  malformed,
  type_mismatch,
  label_mismatch,
  bracket_mismatch,
  antecedent_mismatch,
  unused_hypothesis,
  duplicated_hypothesis,
};

const char* to_string(CheckFailure f);

struct CheckReport {
  CheckFailure failure;
  std::vector<std::size_t> path;  // child indices from the root
  std::string message;

  std::string path_string() const;
  std::string describe() const;
};

// nullopt when the proof is valid. Free hypotheses stay visible in the root antecedent.
std::optional<CheckReport> check(const Proof& p);

class Term {
 public:
  enum class Kind { var, constant, app, abs, modal_intro, modal_elim };
  using Ptr = std::shared_ptr<const Term>;

  static Ptr var(std::string name);
  static Ptr constant(std::string word);
  static Ptr app(Ptr function, Ptr argument);
  static Ptr abs(std::string name, Ptr body);
  static Ptr modal_intro(std::string label, Ptr body);
  // Unpacks `source` into `name` within `body`.
  static Ptr modal_elim(std::string label, std::string name, Ptr source, Ptr body);

  Kind kind() const { return kind_; }
  const std::string& name() const { return name_; }
  const std::string& label() const { return label_; }
  const Ptr& first() const { return first_; }
  const Ptr& second() const { return second_; }

 private:
  Term(Kind kind, std::string name, std::string label, Ptr first, Ptr second)
      : kind_(kind), name_(std::move(name)), label_(std::move(label)),
        first_(std::move(first)), second_(std::move(second)) {}

  Kind kind_;
  std::string name_;
  std::string label_;
  Ptr first_;
  Ptr second_;
};

Term::Ptr term_of(const Proof& p);
// Application is juxtaposition; compound arguments and functors are parenthesized.
std::string print_term(const Term::Ptr& t);

// Rewrites every labeled arrow A →d B as ◇d A → B.
Type embed_modal(const Type& t);

// Indented s-expression format, one node per line:
//   (rule [:binder x] [:label d] [:word w] (|- (items...) "succedent") children...)
// with items (: id "type") or (<> label items...).
std::string write_proof(const Proof& p);
Proof read_proof(std::string_view text, const Vocabulary& vocab = Vocabulary::standard());
std::vector<Proof> read_proofs(std::string_view text, const Vocabulary& vocab = Vocabulary::standard());

std::string print_structure(const Structure& s);

}  // namespace mill
