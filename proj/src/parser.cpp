#include "mill/parser.hpp"

#include <algorithm>
#include <unordered_map>
#include <unordered_set>

#include <boost/container/small_vector.hpp>

#include "mill/error.hpp"

namespace mill {

namespace {

std::string infix(const Type& t) { return print_type(t, Notation::infix); }

void add_counts(const Type& t, int sign, CountVector& out) {
  switch (t.kind()) {
    case Type::Kind::atom:
      out[t.name()] += sign;
      return;
    case Type::Kind::arrow:
      add_counts(t.result(), sign, out);
      add_counts(t.argument(), -sign, out);
      return;
    default:
      throw Error(ErrorCode::unsupported, "count invariance is undefined for " + infix(t));
  }
}

void drop_zeros(CountVector& v) { std::erase_if(v, [](const auto& kv) { return kv.second == 0; }); }

std::optional<std::string> single_atom(const CountVector& v) {
  if (v.size() == 1 && v.begin()->second == 1) return v.begin()->first;
  return std::nullopt;
}

std::string describe(const CountVector& v) {
  std::string out = "{";
  for (const auto& [atom, n] : v) out += (out.size() > 1 ? ", " : "") + atom + ":" + std::to_string(n);
  return out + "}";
}

bool implicational(const Type& t) {
  if (t.is_atom()) return true;
  return t.is_arrow() && implicational(t.argument()) && implicational(t.result());
}

bool is_modifier(const Type& t, const ParserConfig& c) { return t.is_arrow() && c.mod_labels.count(t.label()); }

// Subsets of {0..n-1} with both sides non-empty: by size, then lexicographically.
template <typename Visit>
bool for_each_split(std::size_t n, Visit&& visit) {
  std::vector<std::size_t> pick;
  for (std::size_t k = 1; k < n; ++k) {
    pick.resize(k);
    for (std::size_t i = 0; i < k; ++i) pick[i] = i;
    while (true) {
      if (visit(pick)) return true;
      std::size_t i = k;
      while (i > 0 && pick[i - 1] == n - k + i - 1) --i;
      if (i == 0) break;
      ++pick[i - 1];
      for (std::size_t j = i; j < k; ++j) pick[j] = pick[j - 1] + 1;
    }
  }
  return false;
}

std::pair<std::vector<Premise>, std::vector<Premise>> partition(const std::vector<Premise>& premises,
                                                                const std::vector<std::size_t>& argument) {
  std::vector<bool> in(premises.size(), false);
  for (auto i : argument) {
    if (i >= premises.size()) throw Error(ErrorCode::invalid_argument, "split index out of range");
    if (in[i]) throw Error(ErrorCode::invalid_argument, "split index repeated");
    in[i] = true;
  }
  std::pair<std::vector<Premise>, std::vector<Premise>> out;
  for (std::size_t i = 0; i < premises.size(); ++i) (in[i] ? out.first : out.second).push_back(premises[i]);
  return out;
}

}  // namespace

std::vector<Premise> lexical_premises(const std::vector<std::string>& words, const std::vector<Type>& types) {
  if (words.size() != types.size())
    throw Error(ErrorCode::invalid_argument, "word and type counts differ");
  std::map<std::string, int> seen;
  for (const auto& w : words) ++seen[w];
  std::vector<Premise> out;
  for (std::size_t i = 0; i < words.size(); ++i) {
    std::string id = seen[words[i]] == 1 ? words[i] : words[i] + "~" + std::to_string(i);
    out.push_back(Premise{words[i], types[i], Origin::lexical, std::move(id), {}});
  }
  return out;
}

CountVector count_vector(const Type& t) {
  CountVector v;
  add_counts(t, 1, v);
  drop_zeros(v);
  return v;
}

CountVector count_vector(const std::vector<Premise>& premises) {
  CountVector v;
  for (const auto& p : premises) add_counts(p.type, 1, v);
  drop_zeros(v);
  return v;
}

void require_supported(const std::vector<Premise>& premises, const ParserConfig& c) {
  for (const auto& p : premises) {
    if (!implicational(p.type)) throw Error(ErrorCode::unsupported, "unsupported connective in " + infix(p.type));
    if (static_cast<std::size_t>(order(p.type)) > c.max_order)
      throw Error(ErrorCode::unsupported, "type of order " + std::to_string(order(p.type)) + ": " + infix(p.type));
  }
}

Type infer_goal(const std::vector<Premise>& premises, const std::optional<Prior>& prior, const ParserConfig& c) {
  if (prior) {
    for (const auto& p : premises)
      for (const Type* t = &p.type; t->is_arrow(); t = &t->result())
        if (t->result() == prior->goal && t->argument() == prior->eliminated) return *t;
    throw Error(ErrorCode::ambiguous, "no premise consumes " + infix(prior->eliminated) + " towards " +
                                          infix(prior->goal));
  }
  CountVector v = count_vector(premises);
  for (const auto& p : premises)
    if (is_modifier(p.type, c))
      throw Error(ErrorCode::ambiguous, "modifier " + infix(p.type) + " is invisible to count invariance");
  if (auto atom = single_atom(v)) return Type::atom(*atom);
  throw Error(ErrorCode::ambiguous, "counts " + describe(v) + " do not name a single atom");
}

Type infer_root_goal(const std::vector<Premise>& premises, const ParserConfig& c) {
  require_supported(premises, c);
  CountVector v = count_vector(premises);
  if (auto atom = single_atom(v)) return Type::atom(*atom);
  throw Error(ErrorCode::ambiguous, "counts " + describe(v) + " do not name a single atom");
}

bool can_introduce(const ParseState& s, const ParserConfig& c) {
  if (!s.goal.is_arrow() || c.mod_labels.count(s.goal.label())) return false;
  return !(s.last_eliminated && *s.last_eliminated == s.goal.argument());
}

ParseState apply_intro(ParseState s, std::string hypothesis_id) {
  if (!s.goal.is_arrow()) throw Error(ErrorCode::invalid_argument, "cannot introduce into " + infix(s.goal));
  Type goal = s.goal;
  s.premises.push_back(Premise{std::nullopt, goal.argument(), Origin::hypothetical, std::move(hypothesis_id), goal.label()});
  s.goal = goal.result();
  s.last_eliminated.reset();
  return s;
}

std::vector<Slot> elim_slots(const std::vector<Premise>& argument_side, const std::vector<Premise>& functor_side,
                             const Type& goal) {
  CountVector target = count_vector(argument_side);
  const Premise* lone_hypothesis =
      argument_side.size() == 1 && argument_side[0].origin == Origin::hypothetical ? &argument_side[0] : nullptr;
  std::vector<Slot> out;
  for (const auto& p : functor_side)
    for (const Type* t = &p.type; t->is_arrow(); t = &t->result()) {
      if (!(t->result() == goal) || count_vector(t->argument()) != target) continue;
      if (lone_hypothesis && lone_hypothesis->label != t->label()) continue;
      Slot slot{t->argument(), t->label()};
      if (std::find(out.begin(), out.end(), slot) == out.end()) out.push_back(std::move(slot));
    }
  return out;
}

namespace {

struct Failure {
  ErrorCode code;
  std::string message;
};

// Elimination step reporting expected failures without throwing.
std::optional<ElimResult> elim_step(const ParseState& s, const EliminationOracle& oracle, Failure& failure) {
  if (s.premises.size() < 2) throw Error(ErrorCode::invalid_argument, "elimination needs two premises");
  auto choice = oracle(s);
  if (!choice) {
    failure = {ErrorCode::underivable, "no elimination reaches " + infix(s.goal)};
    return std::nullopt;
  }
  if (choice->argument.empty() || choice->argument.size() >= s.premises.size())
    throw Error(ErrorCode::invalid_argument, "oracle returned an empty side");
  auto [argument, functor] = partition(s.premises, choice->argument);
  std::optional<Slot> slot = choice->slot;
  if (!slot) {
    auto slots = elim_slots(argument, functor, s.goal);
    if (slots.empty()) {
      failure = {ErrorCode::ambiguous, "no functor goal for the chosen split"};
      return std::nullopt;
    }
    slot = slots.front();
  }
  Type functor_goal = Type::arrow(slot->argument, slot->label, s.goal);
  return ElimResult{ParseState{std::move(argument), slot->argument, slot->argument},
                    ParseState{std::move(functor), functor_goal, slot->argument}, *slot};
}

}  // namespace

ElimResult apply_elim(const ParseState& s, const EliminationOracle& oracle) {
  Failure failure{};
  auto r = elim_step(s, oracle, failure);
  if (!r) throw Error(failure.code, failure.message);
  return std::move(*r);
}

// ---------------------------------------------------------------------------
// Brute-force oracle

struct BruteForceOracle::Memo {
  struct Item {
    int type;
    int label;  // -1 for lexical premises
  };
  struct SpineStep {
    int result;
    int argument;
    int label;
  };
  using Items = boost::container::small_vector<Item, 8>;
  using Counts = boost::container::small_vector<std::pair<int, int>, 4>;
  using Key = boost::container::small_vector<std::int64_t, 10>;

  struct KeyHash {
    std::size_t operator()(const Key& k) const noexcept {
      std::size_t h = k.size();
      for (auto x : k) h ^= std::hash<std::int64_t>{}(x) + 0x9e3779b97f4a7c15ULL + (h << 6) + (h >> 2);
      return h;
    }
  };

  std::unordered_map<Type, int> type_ids;
  std::vector<Type> types;
  std::vector<Counts> counts;
  std::vector<std::vector<SpineStep>> spines;
  std::unordered_map<std::string, int> atom_ids;
  std::unordered_map<std::string, int> label_ids;
  std::vector<std::string> labels;
  std::vector<char> modifier_labels;
  std::unordered_map<std::int64_t, int> arrows;
  std::unordered_map<Key, bool, KeyHash> results;
  const ParserConfig* config = nullptr;

  int label_id(const std::string& l) {
    auto [it, fresh] = label_ids.emplace(l, static_cast<int>(labels.size()));
    if (fresh) {
      labels.push_back(l);
      modifier_labels.push_back(config->mod_labels.count(l) > 0);
    }
    return it->second;
  }

  void count(const Type& t, int sign, std::map<int, int>& out) {
    if (t.is_atom()) {
      auto [it, fresh] = atom_ids.emplace(t.name(), static_cast<int>(atom_ids.size()));
      out[it->second] += sign;
    } else if (t.is_arrow()) {
      count(t.result(), sign, out);
      count(t.argument(), -sign, out);
    } else {
      throw Error(ErrorCode::unsupported, "count invariance is undefined for " + infix(t));
    }
  }

  int intern(const Type& t) {
    auto it = type_ids.find(t);
    if (it != type_ids.end()) return it->second;
    int id = static_cast<int>(types.size());
    type_ids.emplace(t, id);
    types.push_back(t);
    std::map<int, int> c;
    count(t, 1, c);
    Counts flat;
    for (auto [a, n] : c)
      if (n) flat.emplace_back(a, n);
    counts.push_back(std::move(flat));
    spines.emplace_back();
    std::vector<SpineStep> spine;
    for (const Type* s = &t; s->is_arrow(); s = &s->result())
      spine.push_back({intern(s->result()), intern(s->argument()), label_id(s->label())});
    spines[id] = std::move(spine);
    return id;
  }

  int arrow(int argument, int label, int result) {
    std::int64_t key = (static_cast<std::int64_t>(argument) << 40) | (static_cast<std::int64_t>(label) << 24) | result;
    auto it = arrows.find(key);
    if (it != arrows.end()) return it->second;
    int id = intern(Type::arrow(types[argument], labels[label], types[result]));
    arrows.emplace(key, id);
    return id;
  }

  template <typename Range>
  Counts sum(const Range& items) const {
    boost::container::small_vector<int, 8> acc(atom_ids.size(), 0);
    for (const auto& it : items)
      for (auto [a, n] : counts[it.type]) acc[a] += n;
    Counts out;
    for (std::size_t a = 0; a < acc.size(); ++a)
      if (acc[a]) out.emplace_back(static_cast<int>(a), acc[a]);
    return out;
  }

  boost::container::small_vector<std::pair<int, int>, 4> slots(const Items& argument, const Items& functor,
                                                               int goal) const {
    Counts target = sum(argument);
    int lone = argument.size() == 1 ? argument[0].label : -1;
    boost::container::small_vector<std::pair<int, int>, 4> out;
    for (const auto& f : functor)
      for (const auto& step : spines[f.type]) {
        if (step.result != goal || counts[step.argument] != target) continue;
        if (lone >= 0 && lone != step.label) continue;
        std::pair<int, int> slot{step.argument, step.label};
        if (std::find(out.begin(), out.end(), slot) == out.end()) out.push_back(slot);
      }
    return out;
  }

  bool balanced(const Items& items, int goal) const {
    boost::container::small_vector<int, 8> acc(atom_ids.size(), 0);
    for (const auto& it : items)
      for (auto [a, n] : counts[it.type]) acc[a] += n;
    for (auto [a, n] : counts[goal]) acc[a] -= n;
    return std::all_of(acc.begin(), acc.end(), [](int n) { return n == 0; });
  }

  bool derive(const Items& items, int goal, int guard) {
    if (!balanced(items, goal)) return false;
    Key key{goal, guard};
    for (const auto& it : items) key.push_back((static_cast<std::int64_t>(it.type) << 20) | (it.label + 1));
    std::sort(key.begin() + 2, key.end());
    if (auto hit = results.find(key); hit != results.end()) return hit->second;
    bool ok = compute(items, goal, guard);
    results.emplace(std::move(key), ok);
    return ok;
  }

  bool compute(const Items& items, int goal, int guard) {
    if (items.size() == 1 && items[0].type == goal) return true;
    if (!spines[goal].empty()) {
      const SpineStep& top = spines[goal].front();
      if (!modifier_labels[top.label] && top.argument != guard) {
        Items more = items;
        more.push_back({top.argument, top.label});
        return derive(more, top.result, -1);
      }
    }
    if (items.size() < 2) return false;
    return for_each_split(items.size(), [&](const std::vector<std::size_t>& pick) {
      return choose(items, pick, goal).has_value();
    });
  }

  // First slot under which both sides of the split are derivable.
  std::optional<std::pair<int, int>> choose(const Items& items, const std::vector<std::size_t>& pick, int goal) {
    Items argument, functor;
    std::size_t j = 0;
    for (std::size_t i = 0; i < items.size(); ++i) {
      if (j < pick.size() && pick[j] == i) {
        argument.push_back(items[i]);
        ++j;
      } else {
        functor.push_back(items[i]);
      }
    }
    for (auto [a, l] : slots(argument, functor, goal))
      if (derive(argument, a, -1) && derive(functor, arrow(a, l, goal), a)) return std::pair{a, l};
    return std::nullopt;
  }

  Items items_of(const std::vector<Premise>& premises) {
    Items out;
    for (const auto& p : premises)
      out.push_back({intern(p.type), p.origin == Origin::hypothetical ? label_id(p.label) : -1});
    return out;
  }
};

BruteForceOracle::BruteForceOracle(ParserConfig c) : config_(std::move(c)), memo_(std::make_shared<Memo>()) {
  memo_->config = &config_;
}

bool BruteForceOracle::derivable(const ParseState& s) const {
  memo_->config = &config_;
  int guard = s.last_eliminated ? memo_->intern(*s.last_eliminated) : -1;
  return memo_->derive(memo_->items_of(s.premises), memo_->intern(s.goal), guard);
}

std::optional<ElimChoice> BruteForceOracle::operator()(const ParseState& s) const {
  memo_->config = &config_;
  auto items = memo_->items_of(s.premises);
  int goal = memo_->intern(s.goal);
  int guard = s.last_eliminated ? memo_->intern(*s.last_eliminated) : -1;
  std::optional<ElimChoice> out;
  if (!memo_->derive(items, goal, guard)) return out;
  std::size_t n = items.size();
  std::vector<std::size_t> mirrored;
  for_each_split(n, [&](const std::vector<std::size_t>& order) {
    const std::vector<std::size_t>* picked = &order;
    if (config_.tie_break == TieBreak::rightmost) {
      mirrored.clear();
      for (auto it = order.rbegin(); it != order.rend(); ++it) mirrored.push_back(n - 1 - *it);
      picked = &mirrored;
    }
    const auto& pick = *picked;
    auto slot = memo_->choose(items, pick, goal);
    if (!slot) return false;
    out = ElimChoice{pick, Slot{memo_->types[slot->first], memo_->labels[slot->second]}};
    return true;
  });
  return out;
}

// ---------------------------------------------------------------------------
// Parse driver

namespace {

class Driver {
 public:
  Driver(const EliminationOracle& oracle, const ParserConfig& c, const std::vector<Premise>& premises)
      : oracle_(oracle), config_(c), premises_(premises), budget_(2 * premises.size() + 2) {}

  std::optional<Proof> build(const ParseState& s, std::size_t depth) {
    if (s.premises.size() == 1 && s.premises[0].type == s.goal) return leaf(s.premises[0]);
    if (can_introduce(s, config_)) {
      std::string id = fresh();
      auto body = build(apply_intro(s, id), depth);
      if (!body) return std::nullopt;
      return Proof::intro(id, s.goal, std::move(*body));
    }
    if (s.premises.size() < 2)
      return fail(ErrorCode::underivable, "premise " + s.premises[0].id + " does not derive " + infix(s.goal));
    if (depth > budget_) return fail(ErrorCode::underivable, "elimination depth exceeded");
    auto r = elim_step(s, oracle_, failure);
    if (!r) return std::nullopt;
    auto functor = build(r->functor, depth + 1);
    if (!functor) return std::nullopt;
    auto argument = build(r->argument, depth + 1);
    if (!argument) return std::nullopt;
    return Proof::elim(std::move(*functor), std::move(*argument));
  }

  Failure failure{ErrorCode::underivable, {}};

 private:
  std::nullopt_t fail(ErrorCode code, std::string message) {
    failure = {code, std::move(message)};
    return std::nullopt;
  }

  static Proof leaf(const Premise& p) {
    if (p.origin == Origin::hypothetical) return Proof::ax(p.id, p.type, p.label);
    return Proof::lex(p.id, p.type, p.word);
  }

  std::string fresh() {
    std::string id;
    static constexpr const char* kNames[] = {"x", "y", "z"};
    if (next_ == 0)
      for (const auto& p : premises_) used_.insert(p.id);
    do {
      id = next_ < 3 ? kNames[next_] : "x" + std::to_string(next_);
      ++next_;
    } while (used_.count(id));
    used_.insert(id);
    return id;
  }

  const EliminationOracle& oracle_;
  const ParserConfig& config_;
  const std::vector<Premise>& premises_;
  std::size_t budget_;
  std::size_t next_ = 0;
  std::unordered_set<std::string> used_;
};

}  // namespace

ParseOutcome try_parse(const std::vector<Premise>& premises, const EliminationOracle& oracle,
                       const std::optional<Type>& goal, const ParserConfig& c) {
  try {
    if (premises.empty()) return {std::nullopt, ErrorCode::invalid_argument, "nothing to parse"};
    require_supported(premises, c);
    std::unordered_set<std::string> ids;
    for (const auto& p : premises)
      if (!ids.insert(p.id).second) return {std::nullopt, ErrorCode::invalid_argument, "duplicate premise id " + p.id};
    ParseState root{premises, goal ? *goal : infer_root_goal(premises, c), std::nullopt};
    Driver driver(oracle, c, premises);
    auto proof = driver.build(root, 0);
    if (!proof) return {std::nullopt, driver.failure.code, driver.failure.message};
    return {std::move(proof), ErrorCode::underivable, {}};
  } catch (const Error& e) {
    return {std::nullopt, e.code(), e.what()};
  }
}

Proof parse(const std::vector<Premise>& premises, const EliminationOracle& oracle, const std::optional<Type>& goal,
            const ParserConfig& c) {
  auto outcome = try_parse(premises, oracle, goal, c);
  if (!outcome.proof) throw Error(outcome.code, outcome.message);
  return std::move(*outcome.proof);
}

}  // namespace mill
