#include <doctest.h>

#include <json.hpp>

#include "mill/error.hpp"
#include "mill/extraction.hpp"
#include "support/fixtures.hpp"

using namespace mill;
using mill::testing::fixture_dir;
using mill::testing::fixture_path;
using mill::testing::slurp;
using json = nlohmann::ordered_json;

namespace {

std::map<std::string, std::string> printed(const TypeDict& dict) {
  std::map<std::string, std::string> out;
  for (const auto& [id, t] : dict) out[id] = print_type(t, Notation::infix);
  return out;
}

void check_fixture(const std::string& name, const json& expected, const std::vector<Pass>& passes,
                   const Tables& tables, const std::string& xml_path) {
  CAPTURE(name);
  Dag raw = load_alpino_file(xml_path);
  auto result = run_pipeline(raw, passes);
  REQUIRE(!result.diagnostic);
  REQUIRE(result.dags.size() == expected.size());
  auto extracted = extract_sample(raw, passes, tables);
  REQUIRE(extracted.records.size() == expected.size());
  for (std::size_t i = 0; i < expected.size(); ++i) {
    const auto& want = expected[i];
    const Dag& d = result.dags[i];
    const auto& record = extracted.records[i];
    CHECK(d.id == want["id"].get<std::string>());
    CHECK(record.id == d.id);
    if (want.contains("skipped")) {
      try {
        annotate_dag(d, tables);
        FAIL("expected a skipped sample");
      } catch (const Error& e) {
        CHECK(e.code() == ErrorCode::skipped);
      }
      CHECK(record.skipped);
      CHECK(record.reason.find(want["skipped"].get<std::string>()) != std::string::npos);
      continue;
    }
    auto dict = annotate_dag(d, tables);
    CHECK(printed(dict) == want["dict"].get<std::map<std::string, std::string>>());
    auto seq = to_sequences(d, dict, tables);
    std::vector<std::pair<std::string, std::string>> got;
    for (std::size_t k = 0; k < seq.words.size(); ++k)
      got.emplace_back(seq.words[k], print_type(seq.types[k], Notation::infix));
    std::vector<std::pair<std::string, std::string>> expected_seq;
    for (const auto& pair : want["sequence"]) expected_seq.emplace_back(pair[0], pair[1]);
    CHECK(got == expected_seq);
    CHECK(!record.skipped);
    CHECK(record.words == seq.words);
    CHECK(record.types == seq.types);
  }
}

}  // namespace

TEST_CASE("extraction goldens") {
  json goldens = json::parse(slurp(fixture_path("goldens.json")));
  CHECK(goldens.size() >= 15);
  auto passes = make_passes(default_pass_names());
  for (const auto& [name, expected] : goldens.items())
    check_fixture(name, expected, passes, Tables::standard(), fixture_path(name + ".xml"));
}

TEST_CASE("custom tables and pass list") {
  const std::string dir = fixture_dir() + "/custom/";
  json goldens = json::parse(slurp(dir + "goldens.json"));
  Tables tables = Tables::from_json(slurp(dir + "fig43.tables.json"));
  auto passes = make_passes(parse_pass_list(slurp(dir + "fig43.passes")));
  for (const auto& [name, expected] : goldens.items())
    check_fixture(name, expected, passes, tables, dir + name + ".xml");
}

TEST_CASE("type assignment helpers") {
  Dag d = collapse_phantoms(load_alpino_file(fixture_path("transitive.xml")));
  Type np = parse_type("NP", Notation::infix);
  CHECK(print_type(trans(d, d.node("3")), Notation::infix) == "N");
  CHECK(print_type(trans(d, d.node("1")), Notation::infix) == "NP");
  CHECK(print_type(type_assign(d, d.node("3"), "mod", np), Notation::infix) == "NP →mod NP");

  Dag bare = d;
  bare.nodes.push_back({"x", 0, 1, {}, {}, {}, {}});
  CHECK_THROWS_AS(trans(bare, bare.node("x")), Error);
}

TEST_CASE("records serialize as one JSON object per line") {
  SampleRecord r{"s1", {"de", "man"}, {parse_type("N →invdet NP", Notation::infix), parse_type("N", Notation::infix)}};
  std::string line = record_to_json(r);
  CHECK(line.find('\n') == std::string::npos);
  json j = json::parse(line);
  CHECK(j["id"] == "s1");
  CHECK(j["types"][0] == print_type(r.types[0], Notation::polish));
  CHECK(j["reason"].is_null());
  auto back = record_from_json(line);
  CHECK(back.id == r.id);
  CHECK(back.words == r.words);
  CHECK(back.types == r.types);
  CHECK(!back.skipped);

  SampleRecord skipped{"s2", {}, {}, true, "non-polymorphic ellipsis"};
  auto again = record_from_json(record_to_json(skipped));
  CHECK(again.skipped);
  CHECK(again.reason == skipped.reason);

  CHECK_THROWS_AS(record_from_json("{\"id\": 3}"), Error);
  CHECK(json::parse(diagnostic_to_json({"a", "b", "c"})) == json{{"sample", "a"}, {"pass", "b"}, {"reason", "c"}});
}

TEST_CASE("table overrides") {
  Tables t = Tables::from_json(R"({"pos_table": {"n": "NOUN"}, "mod_labels": ["mod"]})");
  CHECK(t.pos_table.at("n") == "NOUN");
  CHECK(t.pos_table.at("ww") == "WW");
  CHECK(t.mod_labels == TagSet{"mod"});
  CHECK(t.vocabulary().atoms.count("NOUN"));
  CHECK_THROWS_AS(Tables::from_json("[1]"), Error);
}
