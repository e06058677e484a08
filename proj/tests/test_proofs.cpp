#include <doctest.h>

#include <algorithm>
#include <functional>
#include <map>
#include <random>

#include "mill/error.hpp"
#include "mill/proofs.hpp"
#include "support/fixtures.hpp"

using namespace mill;
using mill::testing::fixture_dir;
using mill::testing::slurp;

namespace {

Type T(const std::string& s) { return parse_type(s, Notation::infix); }

Proof load(const std::string& name) { return read_proof(slurp(fixture_dir() + "/proofs/" + name + ".proof")); }

std::string term(const Proof& p) { return print_term(term_of(p)); }

// Spacing between a functor and a parenthesized argument varies across the printed captions.
std::string tight(std::string s) {
  std::string out;
  for (std::size_t i = 0; i < s.size(); ++i) {
    if (s[i] == ' ' && ((i + 1 < s.size() && s[i + 1] == '(') || (!out.empty() && out.back() == ')'))) continue;
    out += s[i];
  }
  return out;
}

Structure map_structure(const Structure& s, const std::function<std::string(const std::string&)>& relabel,
                        std::mt19937* shuffle = nullptr) {
  switch (s.kind()) {
    case Structure::Kind::leaf:
      return s;
    case Structure::Kind::bracket:
      return Structure::bracket(relabel(s.label()), map_structure(s.inner(), relabel, shuffle));
    case Structure::Kind::multiset: {
      std::vector<Structure> items;
      for (const auto& item : s.items()) items.push_back(map_structure(item, relabel, shuffle));
      if (shuffle) std::shuffle(items.begin(), items.end(), *shuffle);
      return Structure::multiset(std::move(items));
    }
  }
  return s;
}

Proof map_antecedents(Proof p, const std::function<std::string(const std::string&)>& relabel,
                      std::mt19937* shuffle = nullptr) {
  p.conclusion.antecedent = map_structure(p.conclusion.antecedent, relabel, shuffle);
  for (auto& child : p.premises) child = map_antecedents(child, relabel, shuffle);
  return p;
}

std::string swap_su_obj(const std::string& l) { return l == "su" ? "obj" : l == "obj" ? "su" : l; }
std::string same(const std::string& l) { return l; }

void count_vars(const Term::Ptr& t, std::map<std::string, int>& uses, std::map<std::string, int>& binds) {
  if (!t) return;
  if (t->kind() == Term::Kind::var) ++uses[t->name()];
  if (t->kind() == Term::Kind::abs || t->kind() == Term::Kind::modal_elim) ++binds[t->name()];
  count_vars(t->first(), uses, binds);
  count_vars(t->second(), uses, binds);
}

}  // namespace

TEST_CASE("axiom") {
  Proof p = Proof::ax("x", T("NP"));
  CHECK(!check(p).has_value());
  CHECK(term(p) == "x");
  Proof l = Proof::lex("w0", T("NP"), "Jan");
  CHECK(!check(l));
  CHECK(term(l) == "Jan");
}

TEST_CASE("captioned derivations") {
  Proof a = load("transitive");
  CHECK(!check(a));
  CHECK(a.conclusion.succedent == T("S"));
  CHECK(term(a) == "(at(een appel))(het meisje)");

  Proof b = load("subject_relative");
  CHECK(!check(b));
  CHECK(term(b) == "dat(at(een appel))");
  CHECK(tight(term(b)) == tight("dat(at (een appel))"));

  Proof c = load("object_relative");
  CHECK(!check(c));
  CHECK(term(c) == "die(λx.((at x)(het meisje)))");
}

TEST_CASE("modal derivations") {
  Proof obj = load("modal_object_relative");
  auto report = check(obj);
  CHECK_MESSAGE(!report, (report ? report->describe() : ""));
  CHECK(term(obj) == "(die(▵body(leggen(▵su kippen))))(▵mod eieren)");
  CHECK(print_structure(obj.conclusion.antecedent) == "⟨eieren⟩mod, die, ⟨⟨kippen⟩su, leggen⟩body");

  Proof su = load("modal_subject_relative");
  report = check(su);
  CHECK_MESSAGE(!report, (report ? report->describe() : ""));
  CHECK(term(su) == "(die(▵body(λx.(let ▿su y = x in (leggen(▵su y))(▵obj kippen)))))(▵mod eieren)");
}

TEST_CASE("swapping dependency brackets breaks the derivation") {
  Proof swapped = map_antecedents(load("modal_object_relative"), swap_su_obj);
  auto report = check(swapped);
  REQUIRE(report);
  CHECK(report->failure == CheckFailure::bracket_mismatch);
  CHECK(report->path_string() == "root.0.1.0.1");

  auto other = check(map_antecedents(load("modal_subject_relative"), swap_su_obj));
  REQUIRE(other);
  CHECK(other->failure == CheckFailure::bracket_mismatch);
}

TEST_CASE("multiset antecedents ignore order") {
  std::mt19937 rng(7);
  for (const char* name : {"transitive", "subject_relative", "object_relative", "modal_object_relative",
                           "modal_subject_relative"}) {
    CAPTURE(name);
    Proof p = load(name);
    for (int round = 0; round < 20; ++round) CHECK(!check(map_antecedents(p, same, &rng)));
  }
}

TEST_CASE("structure equality agrees with keys") {
  std::mt19937 rng(5);
  const std::vector<Type> types{T("NP"), T("N"), T("NP →su S")};
  std::function<Structure(int)> random_structure = [&](int depth) {
    int pick = depth == 0 ? 0 : static_cast<int>(rng() % 4);
    if (pick == 0) return Structure::leaf(std::string(1, static_cast<char>('a' + rng() % 3)), types[rng() % 3]);
    if (pick == 1) return Structure::bracket(rng() % 2 ? "su" : "obj1", random_structure(depth - 1));
    std::vector<Structure> items;
    for (std::size_t i = rng() % 4; i > 0; --i) items.push_back(random_structure(depth - 1));
    return Structure::multiset(std::move(items));
  };
  std::size_t equal = 0;
  for (int round = 0; round < 4000; ++round) {
    Structure a = random_structure(3);
    Structure b = round % 2 ? random_structure(3) : map_structure(a, same, &rng);
    CHECK((a == b) == (a.key() == b.key()));
    equal += a == b;
  }
  CHECK(equal > 1000);
}

TEST_CASE("text format round trip") {
  for (const char* name : {"transitive", "subject_relative", "object_relative", "modal_object_relative",
                           "modal_subject_relative", "broken"}) {
    CAPTURE(name);
    Proof p = load(name);
    std::string text = write_proof(p);
    Proof back = read_proof(text);
    CHECK(write_proof(back) == text);
    CHECK(term(back) == term(p));
    CHECK(check(back).has_value() == check(p).has_value());
  }
  CHECK(read_proofs("; nothing\n").empty());
  CHECK(read_proofs(slurp(fixture_dir() + "/proofs/transitive.proof") + slurp(fixture_dir() + "/proofs/broken.proof"))
            .size() == 2);
  CHECK_THROWS_AS(read_proof("(elim"), Error);
  CHECK_THROWS_AS(read_proof("(jump (|- () \"NP\"))"), Error);
  CHECK_THROWS_AS(read_proof("(ax (|- ((: x \"NP →\")) \"NP\"))"), Error);
  CHECK_THROWS_AS(read_proof("(ax :colour red (|- ((: x \"NP\")) \"NP\"))"), Error);
}

TEST_CASE("check failures carry the offending node") {
  auto broken = check(load("broken"));
  REQUIRE(broken);
  CHECK(broken->failure == CheckFailure::type_mismatch);
  CHECK(broken->path_string() == "root");

  Proof at = Proof::lex("at", T("NP → NP → S"));
  Proof free = Proof::elim(at, Proof::ax("x", T("NP")));
  CHECK(!check(free));
  CHECK(print_structure(free.conclusion.antecedent) == "at, x");

  Proof vacant = Proof::intro("x", T("NP → NP → S"), Proof::elim(at, Proof::lex("a", T("NP"))));
  auto u = check(Proof::elim(vacant, Proof::ax("x", T("NP"))));
  REQUIRE(u);
  CHECK(u->failure == CheckFailure::unused_hypothesis);
  CHECK(u->path_string() == "root.0");
  CHECK(check(Proof::intro("y", T("NP → NP → NP → S"), at))->failure == CheckFailure::malformed);

  Proof twice = Proof::elim(Proof::elim(at, Proof::lex("a", T("NP"))), Proof::lex("a", T("NP")));
  auto dup = check(twice);
  REQUIRE(dup);
  CHECK(dup->failure == CheckFailure::duplicated_hypothesis);

  Proof body = Proof::elim(Proof::elim(at, Proof::ax("x", T("NP"), "obj1")), Proof::lex("a", T("NP")));
  CHECK(check(body)->failure == CheckFailure::label_mismatch);
  Proof labeled_at = Proof::lex("at", T("NP →su NP →obj1 S"));
  Proof ok_body = Proof::elim(Proof::elim(labeled_at, Proof::lex("a", T("NP"))), Proof::ax("x", T("NP"), "obj1"));
  CHECK(!check(Proof::intro("x", T("NP →obj1 S"), ok_body)));
  auto wrong_slot = check(Proof::intro("x", T("NP →su S"), ok_body));
  REQUIRE(wrong_slot);
  CHECK(wrong_slot->failure == CheckFailure::label_mismatch);

  Proof stray = Proof::intro("x", T("NP →obj1 S"), ok_body);
  stray.premises[0].premises[0] = Proof::elim(labeled_at, Proof::lex("b", T("NP")));
  auto gone = check(stray);
  REQUIRE(gone);
  CHECK(gone->path_string() == "root.0");
  CHECK(gone->failure == CheckFailure::antecedent_mismatch);

  Proof vacuous = Proof::intro("z", T("NP → S"), Proof::elim(Proof::elim(at, Proof::lex("a", T("NP"))), Proof::lex("b", T("NP"))));
  vacuous.premises.push_back(Proof::ax("z", T("NP")));
  auto v = check(vacuous);
  REQUIRE(v);
  CHECK(v->failure == CheckFailure::malformed);
  vacuous.premises.pop_back();
  CHECK(check(vacuous)->failure == CheckFailure::malformed);
}

TEST_CASE("terms are linear") {
  for (const char* name : {"transitive", "subject_relative", "object_relative", "modal_object_relative",
                           "modal_subject_relative"}) {
    std::map<std::string, int> uses, binds;
    count_vars(term_of(load(name)), uses, binds);
    for (const auto& [v, n] : uses) CHECK(n == 1);
    for (const auto& [v, n] : binds) CHECK(uses[v] == 1);
  }
}

TEST_CASE("modal embedding") {
  CHECK(embed_modal(T("NP →su NP →obj1 S")) == T("◇su NP → ◇obj1 NP → S"));
  CHECK(embed_modal(T("(NP →obj S) →body NP →mod NP")) == T("◇body (◇obj NP → S) → ◇mod NP → NP"));
  CHECK(embed_modal(T("NP → S")) == T("NP → S"));
}
