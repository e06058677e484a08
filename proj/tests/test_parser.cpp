#include <doctest.h>

#include <algorithm>
#include <functional>
#include <map>
#include <random>

#include "mill/error.hpp"
#include "mill/parser.hpp"

using namespace mill;

namespace {

Type T(const std::string& s) { return parse_type(s, Notation::infix); }

std::vector<Premise> sentence(const std::vector<std::pair<std::string, std::string>>& words) {
  std::vector<std::string> ws;
  std::vector<Type> ts;
  for (const auto& [w, t] : words) {
    ws.push_back(w);
    ts.push_back(T(t));
  }
  return lexical_premises(ws, ts);
}

std::string term(const Proof& p) { return print_term(term_of(p)); }

ErrorCode code_of(const std::function<void()>& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.code();
  }
  FAIL("expected an error");
  return ErrorCode::io;
}

std::multiset<std::pair<std::string, std::string>> root_leaves(const Proof& p) {
  std::multiset<std::pair<std::string, std::string>> out;
  for (const auto& s : p.conclusion.antecedent.top_level()) {
    REQUIRE(s.kind() == Structure::Kind::leaf);
    out.emplace(s.id(), print_type(s.type(), Notation::polish));
  }
  return out;
}

std::multiset<std::pair<std::string, std::string>> premise_leaves(const std::vector<Premise>& ps) {
  std::multiset<std::pair<std::string, std::string>> out;
  for (const auto& p : ps) out.emplace(p.id, print_type(p.type, Notation::polish));
  return out;
}

CountVector structure_counts(const Structure& s) {
  CountVector v;
  for (const auto& item : s.top_level())
    for (const auto& [atom, n] : count_vector(item.type())) v[atom] += n;
  std::erase_if(v, [](const auto& kv) { return kv.second == 0; });
  return v;
}

void each_node(const Proof& p, const std::function<void(const Proof&)>& f) {
  f(p);
  for (const auto& q : p.premises) each_node(q, f);
}

const std::vector<std::pair<std::string, std::string>> kHondBijtMan{
    {"hond", "NP"}, {"bijt", "NP →obj NP →su S_MAIN"}, {"man", "NP"}};

const std::vector<std::pair<std::string, std::string>> kObjectRelative{
    {"die", "(NP →obj1 S) →body NP →mod NP"}, {"het", "N → NP"}, {"meisje", "N"}, {"at", "NP →obj1 NP →su S"}};

}  // namespace

TEST_CASE("count vectors") {
  CHECK(count_vector(T("NP")) == CountVector{{"NP", 1}});
  CHECK(count_vector(T("NP →obj1 NP →su S")) == CountVector{{"NP", -2}, {"S", 1}});
  CHECK(count_vector(T("(NP →obj1 S) →body NP →mod NP")) == CountVector{{"NP", 1}, {"S", -1}});
  CHECK(count_vector(T("NP →mod NP")).empty());
  CHECK(count_vector(sentence(kHondBijtMan)) == CountVector{{"S_MAIN", 1}});
  CHECK(code_of([] { count_vector(T("◇su NP")); }) == ErrorCode::unsupported);
}

TEST_CASE("goal inference") {
  CHECK(infer_goal(sentence(kHondBijtMan)) == T("S_MAIN"));
  CHECK(infer_goal(sentence({{"het", "N → NP"}, {"meisje", "N"}, {"at", "NP → NP → S"}, {"een", "N → NP"},
                             {"appel", "N"}})) == T("S"));
  auto modified = sentence({{"man", "NP"}, {"oud", "NP →mod NP"}});
  CHECK(code_of([&] { infer_goal(modified); }) == ErrorCode::ambiguous);
  CHECK(infer_root_goal(modified) == T("NP"));
  CHECK(code_of([] { infer_goal(sentence({{"a", "NP"}, {"b", "NP"}})); }) == ErrorCode::ambiguous);
  CHECK(code_of([] { infer_root_goal(sentence(kObjectRelative)); }) == ErrorCode::ambiguous);

  auto premises = sentence({{"bijt", "NP →obj NP →su S_MAIN"}});
  CHECK(infer_goal(premises, Prior{T("S_MAIN"), T("NP")}) == T("NP →su S_MAIN"));
  CHECK(code_of([&] { infer_goal(premises, Prior{T("S_MAIN"), T("N")}); }) == ErrorCode::ambiguous);
}

TEST_CASE("fragment restrictions") {
  CHECK(code_of([] { require_supported(sentence({{"a", "◇su NP"}})); }) == ErrorCode::unsupported);
  CHECK(code_of([] { require_supported(sentence({{"a", "((NP → S) → S) → S"}})); }) == ErrorCode::unsupported);
  CHECK_NOTHROW(require_supported(sentence({{"a", "(NP → S) → S"}})));
  ParserConfig deep;
  deep.max_order = 3;
  CHECK_NOTHROW(require_supported(sentence({{"a", "((NP → S) → S) → S"}}), deep));
}

TEST_CASE("introduction guard") {
  ParseState s{{}, T("NP →su S"), std::nullopt};
  CHECK(can_introduce(s));
  s.last_eliminated = T("NP");
  CHECK(!can_introduce(s));
  s.last_eliminated = T("N");
  CHECK(can_introduce(s));
  CHECK(!can_introduce(ParseState{{}, T("NP →mod NP"), std::nullopt}));
  CHECK(!can_introduce(ParseState{{}, T("S"), std::nullopt}));

  ParseState next = apply_intro(ParseState{{}, T("NP →obj1 S"), T("N")}, "x");
  CHECK(next.goal == T("S"));
  CHECK(!next.last_eliminated);
  REQUIRE(next.premises.size() == 1);
  CHECK(next.premises[0].origin == Origin::hypothetical);
  CHECK(next.premises[0].label == "obj1");
  CHECK(next.premises[0].type == T("NP"));
}

TEST_CASE("elimination with a scripted oracle") {
  ParseState root{sentence(kHondBijtMan), T("S_MAIN"), std::nullopt};
  auto pick_man = [](const ParseState&) { return std::optional<ElimChoice>(ElimChoice{{2}, std::nullopt}); };
  ElimResult r = apply_elim(root, pick_man);
  REQUIRE(r.argument.premises.size() == 1);
  CHECK(r.argument.premises[0].id == "man");
  CHECK(r.argument.goal == T("NP"));
  CHECK(r.functor.goal == T("NP →su S_MAIN"));
  CHECK(r.functor.last_eliminated == T("NP"));
  CHECK(!can_introduce(r.functor));
  CHECK(r.slot.label == "su");

  auto none = [](const ParseState&) { return std::optional<ElimChoice>(); };
  CHECK(code_of([&] { apply_elim(root, none); }) == ErrorCode::underivable);
  auto all = [](const ParseState&) { return std::optional<ElimChoice>(ElimChoice{{0, 1, 2}, std::nullopt}); };
  CHECK(code_of([&] { apply_elim(root, all); }) == ErrorCode::invalid_argument);
  auto stray = [](const ParseState&) { return std::optional<ElimChoice>(ElimChoice{{1}, std::nullopt}); };
  CHECK(code_of([&] { apply_elim(root, stray); }) == ErrorCode::ambiguous);
}

TEST_CASE("elimination slots") {
  auto ps = sentence(kHondBijtMan);
  auto slots = elim_slots({ps[2]}, {ps[0], ps[1]}, T("NP →su S_MAIN"));
  REQUIRE(slots.size() == 1);
  CHECK(slots[0] == Slot{T("NP"), "obj"});
  CHECK(elim_slots({ps[2]}, {ps[0], ps[1]}, T("S_MAIN")) == std::vector<Slot>{Slot{T("NP"), "su"}});

  Premise hyp{std::nullopt, T("NP"), Origin::hypothetical, "x", "obj"};
  CHECK(elim_slots({hyp}, {ps[1]}, T("S_MAIN")).empty());
  CHECK(elim_slots({hyp}, {ps[1]}, T("NP →su S_MAIN")).size() == 1);
}

ParserConfig leftmost() {
  ParserConfig c;
  c.tie_break = TieBreak::leftmost;
  return c;
}

TEST_CASE("oracle order") {
  BruteForceOracle left(leftmost()), right;
  ParseState two{sentence({{"a", "NP"}, {"f", "NP →su S"}}), T("S"), std::nullopt};
  for (const auto* oracle : {&left, &right}) {
    auto c = (*oracle)(two);
    REQUIRE(c);
    CHECK(c->argument == std::vector<std::size_t>{0});
  }

  ParseState three{sentence({{"a", "NP"}, {"b", "NP"}, {"v", "NP →su NP →obj1 S"}}), T("S"), std::nullopt};
  auto c = left(three);
  REQUIRE(c);
  CHECK(c->argument == std::vector<std::size_t>{0});
  REQUIRE(c->slot);
  CHECK(c->slot->label == "obj1");
  CHECK(term(parse(three.premises, left, std::nullopt, leftmost())) == "(v b) a");
  c = right(three);
  REQUIRE(c);
  CHECK(c->argument == std::vector<std::size_t>{1});
  CHECK(term(parse(three.premises, right)) == "(v a) b");

  ParseState root{sentence(kHondBijtMan), T("S_MAIN"), std::nullopt};
  c = left(root);
  REQUIRE(c);
  CHECK(c->argument == std::vector<std::size_t>{0});
  c = right(root);
  REQUIRE(c);
  CHECK(c->argument == std::vector<std::size_t>{2});
  CHECK(!right(ParseState{sentence({{"a", "NP"}, {"b", "S"}}), T("S"), std::nullopt}));
}

TEST_CASE("parsing sentences") {
  BruteForceOracle left(leftmost()), right;
  Proof p = parse(sentence(kHondBijtMan), left, std::nullopt, leftmost());
  CHECK(!check(p));
  CHECK(term(p) == "(bijt man) hond");
  CHECK(term(parse(sentence(kHondBijtMan), right)) == "(bijt hond) man");

  auto appel = sentence({{"het", "N → NP"}, {"meisje", "N"}, {"at", "NP → NP → S"}, {"een", "N → NP"},
                         {"appel", "N"}});
  Proof a = parse(appel, left, std::nullopt, leftmost());
  CHECK(!check(a));
  CHECK(term(a) == "(at(een appel))(het meisje)");
  CHECK(term(parse(appel, right)) == "(at(het meisje))(een appel)");

  auto transitive = sentence({{"de", "N →invdet NP"}, {"man", "N"}, {"ziet", "NP →su NP →obj1 S_MAIN"},
                              {"de", "N →invdet NP"}, {"vrouw", "N"}});
  CHECK(term(parse(transitive, right)) == "(ziet(de man))(de vrouw)");

  for (const auto* oracle : {&left, &right}) {
    Proof rel = parse(sentence(kObjectRelative), *oracle, T("NP →mod NP"));
    CHECK(!check(rel));
    CHECK(term(rel) == "die(λx.((at x)(het meisje)))");
  }

  Proof single = parse(sentence({{"slaap", "S"}}), right);
  CHECK(single.rule == Rule::lex);
  CHECK(term(single) == "slaap");
}

TEST_CASE("parse failures") {
  BruteForceOracle oracle;
  CHECK(code_of([&] { parse(sentence({{"a", "NP"}, {"b", "NP →su S"}, {"c", "◇su NP"}}), oracle); }) ==
        ErrorCode::unsupported);
  CHECK(code_of([&] { parse(sentence({{"a", "NP"}, {"b", "N"}}), oracle); }) == ErrorCode::ambiguous);
  CHECK(code_of([&] { parse(sentence({{"a", "NP"}, {"b", "S → S"}}), oracle); }) ==
        ErrorCode::underivable);
  CHECK(code_of([&] { parse({}, oracle); }) == ErrorCode::invalid_argument);
}

TEST_CASE("repeated words get distinct ids") {
  BruteForceOracle oracle;
  auto ps = sentence({{"de", "N → NP"}, {"man", "N"}, {"ziet", "NP →obj1 NP →su S"}, {"de", "N → NP"},
                      {"vrouw", "N"}});
  CHECK(ps[0].id == "de~0");
  CHECK(ps[3].id == "de~3");
  Proof p = parse(ps, oracle);
  CHECK(!check(p));
  CHECK(root_leaves(p) == premise_leaves(ps));
}

TEST_CASE("parses are sound, deterministic and count-preserving") {
  const std::vector<std::string> universe{"NP", "S", "N", "NP →su S", "NP →obj1 S", "N → NP",
                                          "NP →obj1 NP →su S", "(NP →obj1 S) →body NP →mod NP",
                                          "NP →mod NP", "(NP →su S) → S", "S →vc NP →su S"};
  std::mt19937 rng(7);
  std::uniform_int_distribution<std::size_t> pick(0, universe.size() - 1), len(1, 4);
  int parsed = 0;
  for (int round = 0; round < 400; ++round) {
    std::vector<std::pair<std::string, std::string>> words;
    std::size_t n = len(rng);
    for (std::size_t i = 0; i < n; ++i) words.emplace_back("w" + std::to_string(i), universe[pick(rng)]);
    auto ps = sentence(words);
    CountVector total = count_vector(ps);
    if (total.size() != 1 || total.begin()->second != 1) continue;
    Type goal = Type::atom(total.begin()->first);

    BruteForceOracle oracle;
    bool derivable = oracle.derivable(ParseState{ps, goal, std::nullopt});
    try {
      Proof p = parse(ps, oracle);
      CHECK(derivable);
      ++parsed;
      CHECK(!check(p));
      CHECK(p.conclusion.succedent == goal);
      CHECK(root_leaves(p) == premise_leaves(ps));
      CHECK(write_proof(p) == write_proof(parse(ps, BruteForceOracle{})));
      each_node(p, [](const Proof& q) {
        if (q.rule == Rule::intro || q.rule == Rule::elim)
          CHECK(structure_counts(q.conclusion.antecedent) == count_vector(q.conclusion.succedent));
      });
    } catch (const Error& e) {
      CHECK(!derivable);
      CHECK(e.code() == ErrorCode::underivable);
    }
  }
  CHECK(parsed > 20);
}
