#include "mill/mill.h"

#include <cstdlib>
#include <cstring>
#include <optional>
#include <string>

#include <json.hpp>

#include "mill/error.hpp"
#include "mill/extraction.hpp"
#include "mill/lexicon.hpp"
#include "mill/parser.hpp"
#include "mill/proofs.hpp"
#include "mill/typelang.hpp"

using json = nlohmann::ordered_json;

struct mill_type {
  mill::Type value;
};

struct mill_extractor {
  mill::Tables tables;
  std::vector<mill::Pass> passes;
};

struct mill_corpus {
  mill::Vocabulary vocab;
  std::vector<mill::Sequence> samples;
};

struct mill_merge_table {
  mill::MergeTable merges;
  mill::Vocabulary vocab;
};

struct mill_parser {
  mill::Vocabulary vocab;
  mill::ParserConfig config;
  mill::BruteForceOracle oracle;
};

namespace {

thread_local std::string last_error;

mill_status status_of(mill::ErrorCode code) { return static_cast<mill_status>(static_cast<int>(code) + 1); }

template <typename F>
mill_status guarded(F&& f) {
  last_error.clear();
  try {
    f();
    return MILL_OK;
  } catch (const mill::Error& e) {
    last_error = e.what();
    return status_of(e.code());
  } catch (const json::exception& e) {
    last_error = std::string("malformed JSON: ") + e.what();
    return MILL_ERR_INVALID_ARGUMENT;
  } catch (const std::exception& e) {
    last_error = e.what();
    return MILL_ERR_INTERNAL;
  }
}

char* copy(const std::string& s) {
  char* out = static_cast<char*>(std::malloc(s.size() + 1));
  if (!out) throw std::bad_alloc();
  std::memcpy(out, s.data(), s.size() + 1);
  return out;
}

void require(const void* p, const char* what) {
  if (!p) throw mill::Error(mill::ErrorCode::invalid_argument, std::string(what) + " is null");
}

mill::Notation notation_of(mill_notation n) {
  return n == MILL_POLISH ? mill::Notation::polish : mill::Notation::infix;
}

mill::Tables tables_of(const char* tables_json) {
  return tables_json ? mill::Tables::from_json(tables_json) : mill::Tables::standard();
}

mill::Type polish(const json& j, const mill::Vocabulary& vocab) {
  return mill::parse_type(j.get<std::string>(), mill::Notation::polish, vocab);
}

json parse_object(const char* line) {
  require(line, "record");
  json j = json::parse(line);
  if (!j.is_object()) throw mill::Error(mill::ErrorCode::invalid_argument, "record is not a JSON object");
  return j;
}

// Rebuilds `j` with `from` renamed to `to` and its value replaced, keeping key order.
json replace_field(const json& j, const std::string& from, const std::string& to, json value) {
  if (!j.contains(from)) throw mill::Error(mill::ErrorCode::invalid_argument, "record has no \"" + from + "\" field");
  json out = json::object();
  for (const auto& [key, v] : j.items()) {
    if (key == from)
      out[to] = value;
    else
      out[key] = v;
  }
  return out;
}

}  // namespace

extern "C" {

const char* mill_status_name(mill_status status) {
  switch (status) {
    case MILL_OK:
      return "ok";
    case MILL_ERR_INTERNAL:
      return "internal";
    default:
      if (status >= MILL_ERR_LEXING && status <= MILL_ERR_UNDERIVABLE)
        return mill::to_string(static_cast<mill::ErrorCode>(static_cast<int>(status) - 1));
      return "unknown";
  }
}

const char* mill_last_error(void) { return last_error.c_str(); }

void mill_free(char* text) { std::free(text); }

mill_status mill_type_parse(const char* text, mill_notation notation, mill_type** out) {
  return guarded([&] {
    require(text, "text");
    require(out, "out");
    *out = new mill_type{mill::parse_type(text, notation_of(notation))};
  });
}

mill_status mill_type_print(const mill_type* type, mill_notation notation, char** out) {
  return guarded([&] {
    require(type, "type");
    require(out, "out");
    *out = copy(mill::print_type(type->value, notation_of(notation)));
  });
}

int mill_type_order(const mill_type* type) { return type ? mill::order(type->value) : -1; }

int mill_type_equal(const mill_type* a, const mill_type* b) { return a && b && a->value == b->value; }

void mill_type_free(mill_type* type) { delete type; }

mill_status mill_extractor_new(const char* tables_json, const char* pass_list, mill_extractor** out) {
  return guarded([&] {
    require(out, "out");
    auto names = pass_list ? mill::parse_pass_list(pass_list) : mill::default_pass_names();
    *out = new mill_extractor{tables_of(tables_json), mill::make_passes(names)};
  });
}

void mill_extractor_free(mill_extractor* extractor) { delete extractor; }

mill_status mill_extract_xml(const mill_extractor* extractor, const char* xml, const char* sample_id,
                             char** records, char** diagnostics) {
  return guarded([&] {
    require(extractor, "extractor");
    require(xml, "xml");
    require(records, "records");
    require(diagnostics, "diagnostics");
    *records = nullptr;
    *diagnostics = nullptr;
    auto dag = mill::load_alpino(xml, sample_id ? sample_id : "");
    auto result = mill::extract_sample(dag, extractor->passes, extractor->tables);
    std::string rec, diag;
    bool any = false;
    for (const auto& r : result.records) {
      rec += mill::record_to_json(r) + "\n";
      any = any || !r.skipped;
    }
    for (const auto& d : result.diagnostics) diag += mill::diagnostic_to_json(d) + "\n";
    *records = copy(rec);
    *diagnostics = copy(diag);
    if (!any) throw mill::Error(mill::ErrorCode::skipped, "no sample of '" + dag.id + "' was extracted");
  });
}

mill_status mill_corpus_new(const char* tables_json, mill_corpus** out) {
  return guarded([&] {
    require(out, "out");
    *out = new mill_corpus{tables_of(tables_json).vocabulary(), {}};
  });
}

void mill_corpus_free(mill_corpus* corpus) { delete corpus; }

mill_status mill_corpus_add_record(mill_corpus* corpus, const char* json_line) {
  return guarded([&] {
    require(corpus, "corpus");
    require(json_line, "record");
    auto r = mill::record_from_json(json_line, corpus->vocab);
    if (!r.skipped) corpus->samples.push_back(mill::Sequence{r.words, r.types});
  });
}

size_t mill_corpus_size(const mill_corpus* corpus) { return corpus ? corpus->samples.size() : 0; }

mill_status mill_corpus_stats(const mill_corpus* corpus, unsigned threads, char** lexicon_tsv, char** stats_json) {
  return guarded([&] {
    require(corpus, "corpus");
    auto lexicon = mill::aggregate_parallel(corpus->samples, threads);
    if (lexicon_tsv) *lexicon_tsv = copy(lexicon.to_tsv());
    if (stats_json) *stats_json = copy(mill::stats_to_json(lexicon, corpus->samples));
  });
}

mill_status mill_corpus_learn_merges(const mill_corpus* corpus, long merges, char** table) {
  return guarded([&] {
    require(corpus, "corpus");
    require(table, "table");
    std::vector<mill::SymbolSeq> seqs;
    for (const auto& s : corpus->samples) seqs.push_back(mill::atomize_all(s.types));
    std::optional<std::size_t> n;
    if (merges >= 0) n = static_cast<std::size_t>(merges);
    *table = copy(mill::write_merge_table(mill::learn_merges(seqs, n)));
  });
}

mill_status mill_merge_table_read(const char* text, const char* tables_json, mill_merge_table** out) {
  return guarded([&] {
    require(text, "text");
    require(out, "out");
    *out = new mill_merge_table{mill::read_merge_table(text), tables_of(tables_json).vocabulary()};
  });
}

size_t mill_merge_table_size(const mill_merge_table* table) { return table ? table->merges.size() : 0; }

void mill_merge_table_free(mill_merge_table* table) { delete table; }

mill_status mill_merges_apply(const mill_merge_table* table, const char* json_line, char** out) {
  return guarded([&] {
    require(table, "table");
    require(out, "out");
    json j = parse_object(json_line);
    std::vector<mill::Type> types;
    for (const auto& t : j.at("types")) types.push_back(polish(t, table->vocab));
    mill::SymbolSeq symbols = mill::apply_merges(mill::atomize_all(types), table->merges);
    *out = copy(replace_field(j, "types", "symbols", symbols).dump());
  });
}

mill_status mill_merges_revert(const mill_merge_table* table, const char* json_line, char** out) {
  return guarded([&] {
    require(table, "table");
    require(out, "out");
    json j = parse_object(json_line);
    auto symbols = mill::revert_merges(j.at("symbols").get<mill::SymbolSeq>(), table->merges);
    json types = json::array();
    mill::SymbolSeq current;
    auto flush = [&] {
      types.push_back(mill::print_type(mill::deatomize(current, table->vocab), mill::Notation::polish));
      current.clear();
    };
    for (const auto& s : symbols) {
      if (s == mill::kSeparator)
        flush();
      else
        current.push_back(s);
    }
    if (!symbols.empty()) flush();
    *out = copy(replace_field(j, "symbols", "types", types).dump());
  });
}

mill_status mill_check_proofs(const char* text, char** report, size_t* checked, size_t* valid) {
  return guarded([&] {
    require(text, "text");
    require(report, "report");
    auto proofs = mill::read_proofs(text);
    std::string out;
    std::size_t ok = 0;
    for (std::size_t i = 0; i < proofs.size(); ++i) {
      json line{{"index", i}};
      if (auto failure = mill::check(proofs[i])) {
        line["ok"] = false;
        line["failure"] = mill::to_string(failure->failure);
        line["path"] = failure->path_string();
        line["message"] = failure->message;
      } else {
        ++ok;
        line["ok"] = true;
        line["antecedent"] = mill::print_structure(proofs[i].conclusion.antecedent);
        line["goal"] = mill::print_type(proofs[i].conclusion.succedent, mill::Notation::infix);
        line["term"] = mill::print_term(mill::term_of(proofs[i]));
      }
      out += line.dump() + "\n";
    }
    *report = copy(out);
    if (checked) *checked = proofs.size();
    if (valid) *valid = ok;
  });
}

mill_status mill_parser_new(const char* tables_json, int prefer_left, mill_parser** out) {
  return guarded([&] {
    require(out, "out");
    mill::ParserConfig config;
    if (prefer_left) config.tie_break = mill::TieBreak::leftmost;
    *out = new mill_parser{tables_of(tables_json).vocabulary(), config, mill::BruteForceOracle{config}};
  });
}

void mill_parser_free(mill_parser* parser) { delete parser; }

mill_status mill_parse_record(mill_parser* parser, const char* json_line, const char* fallback_id, char** result) {
  return guarded([&] {
    require(parser, "parser");
    require(result, "result");
    *result = nullptr;
    json j = parse_object(json_line);
    std::string id = j.contains("id") ? j.at("id").get<std::string>() : (fallback_id ? fallback_id : "");
    if (j.value("skipped", false))
      throw mill::Error(mill::ErrorCode::skipped, "sample '" + id + "' was skipped during extraction");
    auto words = j.at("words").get<std::vector<std::string>>();
    std::vector<mill::Type> types;
    for (const auto& t : j.at("types")) types.push_back(polish(t, parser->vocab));
    std::optional<mill::Type> goal;
    if (j.contains("goal") && !j.at("goal").is_null()) goal = polish(j.at("goal"), parser->vocab);
    auto premises = mill::lexical_premises(words, types);
    mill::Proof proof = [&] {
      try {
        return mill::parse(premises, parser->oracle, goal, parser->config);
      } catch (const mill::Error& e) {
        throw mill::Error(e.code(), "sample '" + id + "': " + e.what());
      }
    }();
    json out{{"id", id},
             {"goal", mill::print_type(proof.conclusion.succedent, mill::Notation::polish)},
             {"term", mill::print_term(mill::term_of(proof))},
             {"proof", mill::write_proof(proof)}};
    *result = copy(out.dump());
  });
}

}  // extern "C"
