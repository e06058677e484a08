#pragma once

#include <functional>
#include <map>
#include <memory>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "mill/error.hpp"
#include "mill/proofs.hpp"
#include "mill/types.hpp"

namespace mill {

enum class Origin { lexical, hypothetical };

struct Premise {
  std::optional<std::string> word;
  Type type;
  Origin origin = Origin::lexical;
  std::string id;     // leaf id in the produced proof
  std::string label;  // slot label a hypothesis was introduced with
};

// Lexical premises with ids unique within the sentence.
std::vector<Premise> lexical_premises(const std::vector<std::string>& words, const std::vector<Type>& types);

// Preference among equally small argument sides.
enum class TieBreak { leftmost, rightmost };

struct ParserConfig {
  std::set<std::string, std::less<>> mod_labels{"mod", "app", "predm"};
  std::size_t max_order = 2;
  TieBreak tie_break = TieBreak::rightmost;
};

// Atom name to signed occurrence count; zero entries are dropped.
using CountVector = std::map<std::string, int>;

CountVector count_vector(const Type& t);
CountVector count_vector(const std::vector<Premise>& premises);

// Throws `unsupported` for stars, diamonds and types above the configured order.
void require_supported(const std::vector<Premise>& premises, const ParserConfig& c = {});

struct Prior {
  Type goal;
  Type eliminated;
};

// Without a prior: the single positive atom of the summed counts, refusing modifier-typed premises.
// With a prior: the arrow from the eliminated argument to the prior goal found on a premise spine.
Type infer_goal(const std::vector<Premise>& premises, const std::optional<Prior>& prior = std::nullopt,
                const ParserConfig& c = {});
// Root inference tolerates modifiers, which never conclude a full parse.
Type infer_root_goal(const std::vector<Premise>& premises, const ParserConfig& c = {});

struct ParseState {
  std::vector<Premise> premises;
  Type goal;
  std::optional<Type> last_eliminated;
};

bool can_introduce(const ParseState& s, const ParserConfig& c = {});
ParseState apply_intro(ParseState s, std::string hypothesis_id);

struct Slot {
  Type argument;
  std::string label;
  friend bool operator==(const Slot&, const Slot&) = default;
};

// Arguments the functor side can consume to reach `goal`, in premise and spine order.
std::vector<Slot> elim_slots(const std::vector<Premise>& argument_side, const std::vector<Premise>& functor_side,
                             const Type& goal);

struct ElimChoice {
  std::vector<std::size_t> argument;  // indices into the state's premises
  std::optional<Slot> slot;           // first compatible slot when absent
};

using EliminationOracle = std::function<std::optional<ElimChoice>(const ParseState&)>;

struct ElimResult {
  ParseState argument;
  ParseState functor;
  Slot slot;
};

ElimResult apply_elim(const ParseState& s, const EliminationOracle& oracle);

// Exhaustive split search with memoized derivability. Copies share the memo; use one per thread.
class BruteForceOracle {
 public:
  explicit BruteForceOracle(ParserConfig c = {});

  // Smallest argument side first, then the side closest to the configured sentence edge.
  std::optional<ElimChoice> operator()(const ParseState& s) const;
  bool derivable(const ParseState& s) const;

 private:
  struct Memo;
  ParserConfig config_;
  std::shared_ptr<Memo> memo_;
};

struct ParseOutcome {
  std::optional<Proof> proof;
  ErrorCode code = ErrorCode::underivable;  // meaningful when `proof` is empty
  std::string message;
};

// Non-throwing form of `parse`.
ParseOutcome try_parse(const std::vector<Premise>& premises, const EliminationOracle& oracle,
                       const std::optional<Type>& goal = std::nullopt, const ParserConfig& c = {});

// Throws `unsupported` outside the fragment, `ambiguous` when no goal can be inferred and
// `underivable` when no split works.
Proof parse(const std::vector<Premise>& premises, const EliminationOracle& oracle,
            const std::optional<Type>& goal = std::nullopt, const ParserConfig& c = {});

}  // namespace mill
