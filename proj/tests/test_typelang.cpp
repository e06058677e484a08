#include <doctest.h>

#include <map>

#include "mill/typelang.hpp"
#include "support/gen.hpp"

using namespace mill;

namespace {

SymbolSeq seq(const char* s) { return split_symbols(s); }

// Independent digram counter used to derive the expected first merge.
Merge oracle_first_merge(const std::vector<SymbolSeq>& corpus) {
  std::map<std::string, int> counts;
  for (const auto& s : corpus)
    for (std::size_t i = 0; i + 1 < s.size(); ++i)
      if (s[i] != "#" && s[i + 1] != "#") counts[s[i] + " " + s[i + 1]]++;
  std::string best;
  int best_n = 0;
  for (const auto& [k, n] : counts)
    if (n > best_n) best = k, best_n = n;
  auto sp = best.find(' ');
  return {best.substr(0, sp), best.substr(sp + 1)};
}

}  // namespace

TEST_CASE("atomize") {
  CHECK(atomize(parse_type("NP →su S_MAIN", Notation::infix)) == seq("→su NP S_MAIN"));
  CHECK(atomize(Type::atom("NP")) == seq("NP"));
  CHECK(atomize(parse_type("NP →obj1 NP →mod NP", Notation::infix)) == seq("→obj1 NP →mod NP NP"));
}

TEST_CASE("deatomize") {
  CHECK(deatomize(seq("→su NP S_MAIN")) == parse_type("NP →su S_MAIN", Notation::infix));
  try {
    deatomize(seq("→su NP"));
    FAIL("expected error");
  } catch (const SequenceError& e) {
    CHECK(e.kind() == SequenceError::Kind::incomplete);
    CHECK(std::string(e.what()).find("incomplete") != std::string::npos);
    CHECK(e.position() == 2);
  }
  try {
    deatomize(seq("NP NP"));
    FAIL("expected error");
  } catch (const SequenceError& e) {
    CHECK(e.kind() == SequenceError::Kind::trailing);
    CHECK(std::string(e.what()).find("trailing symbol") != std::string::npos);
    CHECK(e.position() == 1);
  }
}

TEST_CASE("recognize") {
  CHECK(recognize(seq("→mod S_MAIN S_MAIN")));
  CHECK(!recognize({}));
  CHECK(!recognize(seq("→su S_MAIN NP NP")));
  CHECK(!recognize(seq("NP # NP")));
  CHECK(!recognize(seq("⟨→su·NP⟩ S")));
}

TEST_CASE("learn_merges") {
  std::vector<SymbolSeq> spec_corpus{seq("→su NP S"), seq("→su NP S"), seq("→mod NP NP")};
  // Both (→su,NP) and (NP,S) occur twice; the byte-wise smaller printed pair wins.
  auto table = learn_merges(spec_corpus, 1);
  REQUIRE(table.size() == 1);
  CHECK(table[0] == oracle_first_merge(spec_corpus));
  CHECK(table[0] == Merge{"NP", "S"});

  std::vector<SymbolSeq> tie_free{seq("→su NP S"), seq("→su NP S_MAIN"), seq("→mod NP NP")};
  CHECK(learn_merges(tie_free, 1) == MergeTable{{"→su", "NP"}});
  CHECK(learn_merges(tie_free, 0).empty());

  auto full = learn_merges({seq("→su NP →obj1 NP S_MAIN")}, std::nullopt);
  auto collapsed = apply_merges(seq("→su NP →obj1 NP S_MAIN"), full);
  CHECK(collapsed.size() == 1);
}

TEST_CASE("merges never cross separators") {
  auto table = learn_merges({seq("NP # NP # NP"), seq("NP # NP")}, std::nullopt);
  CHECK(table.empty());
  auto t2 = learn_merges({seq("→su NP S # →su NP S")}, std::nullopt);
  for (const auto& m : t2) {
    CHECK(m.left != "#");
    CHECK(m.right != "#");
  }
}

TEST_CASE("apply and revert") {
  MergeTable t{{"→su", "NP"}};
  CHECK(apply_merges(seq("→su NP S"), t) == SymbolSeq{"⟨→su·NP⟩", "S"});
  CHECK(apply_merges({}, t).empty());

  testing::TypeGen gen(3);
  std::vector<SymbolSeq> corpus;
  for (int i = 0; i < 200; ++i) corpus.push_back(atomize_all({gen(4), gen(3), gen(2)}));
  for (std::optional<std::size_t> n : {std::optional<std::size_t>(0), std::optional<std::size_t>(1),
                                       std::optional<std::size_t>(5), std::optional<std::size_t>(40),
                                       std::optional<std::size_t>()}) {
    auto table = learn_merges(corpus, n);
    for (int i = 0; i < 1000; ++i) {
      SymbolSeq s = atomize_all({gen(5), gen(2)});
      REQUIRE(revert_merges(apply_merges(s, table), table) == s);
    }
  }
}

TEST_CASE("merge table file format") {
  MergeTable t{{"→su", "NP"}, {"⟨→su·NP⟩", "S"}};
  CHECK(write_merge_table(t) == "→su\tNP\n⟨→su·NP⟩\tS\n");
  CHECK(read_merge_table(write_merge_table(t)) == t);
  CHECK_THROWS(read_merge_table("bad line\n"));
}
