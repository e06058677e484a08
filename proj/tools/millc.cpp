#include <algorithm>
#include <atomic>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <memory>
#include <optional>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include <CLI11.hpp>

#include "mill/mill.h"

namespace fs = std::filesystem;

namespace {

enum Exit { kOk = 0, kUsage = 1, kAllFailed = 2, kIo = 3 };

struct IoError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct Options {
  std::vector<std::string> inputs;
  std::string tables;
  std::string passes;
  std::string out;
  std::string table;
  std::string tie_break = "right";
  long merges = -1;
  unsigned jobs = 1;
  bool fail_fast = false;
};

struct CString {
  char* p = nullptr;
  ~CString() { mill_free(p); }
  std::string str() const { return p ? p : ""; }
};

std::string slurp(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot read " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

std::vector<std::string> lines_of(const std::string& text) {
  std::vector<std::string> out;
  std::istringstream in(text);
  for (std::string line; std::getline(in, line);) out.push_back(line);
  return out;
}

bool blank(const std::string& s) { return s.find_first_not_of(" \t\r") == std::string::npos; }

// Files named directly plus the matching files of named directories, sorted.
std::vector<fs::path> expand(const std::vector<std::string>& inputs, const std::string& extension) {
  std::vector<fs::path> out;
  for (const auto& in : inputs) {
    fs::path p(in);
    std::error_code ec;
    if (fs::is_directory(p, ec)) {
      for (const auto& e : fs::directory_iterator(p, ec))
        if (e.is_regular_file() && e.path().extension() == extension) out.push_back(e.path());
    } else if (fs::is_regular_file(p, ec)) {
      out.push_back(p);
    } else {
      throw IoError("no such file or directory: " + in);
    }
  }
  std::sort(out.begin(), out.end());
  return out;
}

std::optional<std::string> tables_json(const Options& o) {
  if (o.tables.empty()) return std::nullopt;
  return slurp(o.tables);
}

const char* c_str(const std::optional<std::string>& s) { return s ? s->c_str() : nullptr; }

// Pass list from a file, or from a comma-separated list of names.
std::optional<std::string> pass_list(const Options& o) {
  if (o.passes.empty()) return std::nullopt;
  if (fs::is_regular_file(o.passes)) return slurp(o.passes);
  std::string out = o.passes;
  std::replace(out.begin(), out.end(), ',', '\n');
  return out;
}

class Sink {
 public:
  explicit Sink(const std::string& path) {
    if (path.empty()) return;
    file_.open(path, std::ios::binary);
    if (!file_) throw IoError("cannot write " + path);
  }
  std::ostream& stream() { return file_.is_open() ? file_ : std::cout; }
  void close() {
    if (!file_.is_open()) return;
    file_.close();
    if (file_.fail()) throw IoError("write failed");
  }

 private:
  std::ofstream file_;
};

// Runs `work(i, worker)` for every index over `jobs` threads.
void parallel_for(std::size_t n, unsigned jobs, const std::function<void(std::size_t, unsigned)>& work) {
  jobs = std::max(1u, std::min<unsigned>(jobs, static_cast<unsigned>(std::max<std::size_t>(n, 1))));
  std::atomic<std::size_t> next{0};
  std::vector<std::thread> pool;
  for (unsigned w = 0; w < jobs; ++w)
    pool.emplace_back([&, w] {
      for (std::size_t i = next++; i < n; i = next++) work(i, w);
    });
  for (auto& t : pool) t.join();
}

std::string diagnostic(const std::string& sample, mill_status status, const std::string& reason) {
  auto escape = [](const std::string& s) {
    std::string out;
    for (char c : s) {
      if (c == '"' || c == '\\') out += '\\';
      if (c == '\n') {
        out += "\\n";
        continue;
      }
      out += c;
    }
    return out;
  };
  return "{\"sample\":\"" + escape(sample) + "\",\"error\":\"" + mill_status_name(status) + "\",\"reason\":\"" +
         escape(reason) + "\"}";
}

struct Outcome {
  bool ok = false;
  std::string output;
  std::string diagnostics;
};

// Emits outcomes in order, stopping after the first failure under fail-fast.
int report(const std::vector<Outcome>& outcomes, const Options& o, Sink& sink) {
  std::size_t succeeded = 0;
  bool stopped = false;
  for (const auto& r : outcomes) {
    sink.stream() << r.output;
    std::cerr << r.diagnostics;
    if (r.ok) {
      ++succeeded;
    } else if (o.fail_fast) {
      stopped = true;
      break;
    }
  }
  sink.close();
  return succeeded == 0 || stopped ? kAllFailed : kOk;
}

int cmd_extract(const Options& o) {
  auto files = expand(o.inputs, ".xml");
  if (files.empty()) {
    std::cerr << "extract: no .xml inputs found\n";
    return kAllFailed;
  }
  auto tables = tables_json(o);
  auto passes = pass_list(o);
  mill_extractor* raw = nullptr;
  if (mill_extractor_new(c_str(tables), c_str(passes), &raw) != MILL_OK) {
    std::cerr << "extract: " << mill_last_error() << "\n";
    return kUsage;
  }
  std::unique_ptr<mill_extractor, decltype(&mill_extractor_free)> extractor(raw, mill_extractor_free);
  std::vector<std::string> texts;
  for (const auto& f : files) texts.push_back(slurp(f));

  std::vector<Outcome> outcomes(files.size());
  parallel_for(files.size(), o.jobs, [&](std::size_t i, unsigned) {
    CString records, diags;
    std::string id = files[i].stem().string();
    mill_status s = mill_extract_xml(extractor.get(), texts[i].c_str(), id.c_str(), &records.p, &diags.p);
    outcomes[i].ok = s == MILL_OK;
    outcomes[i].output = records.str();
    outcomes[i].diagnostics = diags.str();
    if (s != MILL_OK && s != MILL_ERR_SKIPPED) outcomes[i].diagnostics += diagnostic(id, s, mill_last_error()) + "\n";
  });
  Sink sink(o.out);
  return report(outcomes, o, sink);
}

// Feeds every non-blank JSONL line to `add`; malformed lines are reported with their position.
struct LineStats {
  std::size_t lines = 0;
  std::size_t failed = 0;
};

LineStats each_line(const std::vector<fs::path>& files, bool fail_fast,
                    const std::function<mill_status(const std::string&)>& add) {
  LineStats st;
  for (const auto& f : files) {
    auto lines = lines_of(slurp(f));
    for (std::size_t n = 0; n < lines.size(); ++n) {
      if (blank(lines[n])) continue;
      ++st.lines;
      mill_status s = add(lines[n]);
      if (s == MILL_OK) continue;
      ++st.failed;
      std::cerr << f.string() << ":" << n + 1 << ": " << mill_last_error() << "\n";
      if (fail_fast) return st;
    }
  }
  return st;
}

struct Corpus {
  std::unique_ptr<mill_corpus, decltype(&mill_corpus_free)> handle{nullptr, mill_corpus_free};
  LineStats stats;
};

std::optional<Corpus> load_corpus(const Options& o) {
  auto tables = tables_json(o);
  mill_corpus* raw = nullptr;
  if (mill_corpus_new(c_str(tables), &raw) != MILL_OK) {
    std::cerr << mill_last_error() << "\n";
    return std::nullopt;
  }
  Corpus c;
  c.handle.reset(raw);
  c.stats = each_line(expand(o.inputs, ".jsonl"), o.fail_fast,
                      [&](const std::string& line) { return mill_corpus_add_record(raw, line.c_str()); });
  return c;
}

bool failed_run(const LineStats& st, bool fail_fast) {
  return (st.lines > 0 && st.failed == st.lines) || (fail_fast && st.failed > 0);
}

int cmd_stats(const Options& o) {
  auto corpus = load_corpus(o);
  if (!corpus) return kUsage;
  if (failed_run(corpus->stats, o.fail_fast)) return kAllFailed;
  CString tsv, stats;
  if (mill_corpus_stats(corpus->handle.get(), o.jobs, &tsv.p, &stats.p) != MILL_OK) {
    std::cerr << "stats: " << mill_last_error() << "\n";
    return kAllFailed;
  }
  if (o.out.empty()) {
    std::cout << stats.str();
    return kOk;
  }
  fs::create_directories(o.out);
  Sink lex((fs::path(o.out) / "lexicon.tsv").string());
  lex.stream() << tsv.str();
  lex.close();
  Sink js((fs::path(o.out) / "stats.json").string());
  js.stream() << stats.str();
  js.close();
  return kOk;
}

int cmd_merges_learn(const Options& o) {
  auto corpus = load_corpus(o);
  if (!corpus) return kUsage;
  if (failed_run(corpus->stats, o.fail_fast)) return kAllFailed;
  CString table;
  if (mill_corpus_learn_merges(corpus->handle.get(), o.merges, &table.p) != MILL_OK) {
    std::cerr << "merges: " << mill_last_error() << "\n";
    return kAllFailed;
  }
  Sink sink(o.out);
  sink.stream() << table.str();
  sink.close();
  return kOk;
}

int cmd_merges_map(const Options& o, bool apply) {
  auto tables = tables_json(o);
  mill_merge_table* raw = nullptr;
  if (mill_merge_table_read(slurp(o.table).c_str(), c_str(tables), &raw) != MILL_OK) {
    std::cerr << o.table << ": " << mill_last_error() << "\n";
    return kUsage;
  }
  std::unique_ptr<mill_merge_table, decltype(&mill_merge_table_free)> table(raw, mill_merge_table_free);
  Sink sink(o.out);
  auto st = each_line(expand(o.inputs, ".jsonl"), o.fail_fast, [&](const std::string& line) {
    CString out;
    mill_status s = apply ? mill_merges_apply(table.get(), line.c_str(), &out.p)
                          : mill_merges_revert(table.get(), line.c_str(), &out.p);
    if (s == MILL_OK) sink.stream() << out.str() << "\n";
    return s;
  });
  sink.close();
  return failed_run(st, o.fail_fast) ? kAllFailed : kOk;
}

int cmd_check(const Options& o) {
  auto files = expand(o.inputs, ".proof");
  Sink sink(o.out);
  std::size_t valid = 0, total = 0;
  for (const auto& f : files) {
    CString report;
    std::size_t checked = 0, ok = 0;
    if (mill_check_proofs(slurp(f).c_str(), &report.p, &checked, &ok) != MILL_OK) {
      std::cerr << f.string() << ": " << mill_last_error() << "\n";
      if (o.fail_fast) break;
      continue;
    }
    for (const auto& line : lines_of(report.str())) sink.stream() << f.string() << "\t" << line << "\n";
    total += checked;
    valid += ok;
    if (o.fail_fast && ok < checked) break;
  }
  sink.close();
  if (total == 0) std::cerr << "check: no proofs found\n";
  if (valid == 0 || (o.fail_fast && valid < total)) return kAllFailed;
  return kOk;
}

int cmd_parse(const Options& o) {
  auto files = expand(o.inputs, ".jsonl");
  struct Job {
    std::string line;
    std::string fallback_id;
  };
  std::vector<Job> jobs;
  for (const auto& f : files) {
    auto lines = lines_of(slurp(f));
    for (std::size_t n = 0; n < lines.size(); ++n)
      if (!blank(lines[n])) jobs.push_back({lines[n], f.stem().string() + ":" + std::to_string(n + 1)});
  }
  auto tables = tables_json(o);
  unsigned workers = std::max(1u, o.jobs);
  std::vector<std::unique_ptr<mill_parser, decltype(&mill_parser_free)>> parsers;
  for (unsigned w = 0; w < workers; ++w) {
    mill_parser* raw = nullptr;
    if (mill_parser_new(c_str(tables), o.tie_break == "left", &raw) != MILL_OK) {
      std::cerr << "parse: " << mill_last_error() << "\n";
      return kUsage;
    }
    parsers.emplace_back(raw, mill_parser_free);
  }
  std::vector<Outcome> outcomes(jobs.size());
  parallel_for(jobs.size(), workers, [&](std::size_t i, unsigned w) {
    CString result;
    mill_status s = mill_parse_record(parsers[w].get(), jobs[i].line.c_str(), jobs[i].fallback_id.c_str(), &result.p);
    outcomes[i].ok = s == MILL_OK;
    if (s == MILL_OK)
      outcomes[i].output = result.str() + "\n";
    else
      outcomes[i].diagnostics = diagnostic(jobs[i].fallback_id, s, mill_last_error()) + "\n";
  });
  Sink sink(o.out);
  return report(outcomes, o, sink);
}

void common(CLI::App* cmd, Options& o, bool with_jobs = true) {
  cmd->add_option("--tables", o.tables, "JSON file overriding the translation tables")->check(CLI::ExistingFile);
  cmd->add_option("--out", o.out, "output path (stdout when absent)");
  cmd->add_flag("--fail-fast", o.fail_fast, "stop at the first failing input");
  if (with_jobs) cmd->add_option("--jobs,-j", o.jobs, "worker threads")->check(CLI::PositiveNumber);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Type extraction, statistics, proof checking and parsing for dependency-labeled MILL grammars"};
  app.set_config("--config", "", "TOML or INI file with default option values");
  app.require_subcommand(1);
  Options o;

  auto* extract = app.add_subcommand("extract", "extract type sequences from Alpino XML files");
  extract->add_option("inputs", o.inputs, "XML files or directories")->required();
  extract->add_option("--passes", o.passes, "pass list file, or comma-separated pass names");
  common(extract, o);

  auto* stats = app.add_subcommand("stats", "lexicon and ambiguity statistics from extracted JSONL");
  stats->add_option("inputs", o.inputs, "JSONL files or directories")->required();
  common(stats, o);

  auto* merges = app.add_subcommand("merges", "digram merges over type sequences");
  merges->require_subcommand(1);
  auto* learn = merges->add_subcommand("learn", "learn a merge table");
  learn->add_option("inputs", o.inputs, "JSONL files or directories")->required();
  learn->add_option("--merges", o.merges, "number of merges; negative merges to exhaustion");
  common(learn, o, false);
  auto* apply = merges->add_subcommand("apply", "replace types by merged symbol sequences");
  auto* revert = merges->add_subcommand("revert", "restore types from merged symbol sequences");
  for (auto* cmd : {apply, revert}) {
    cmd->add_option("table", o.table, "merge table")->required()->check(CLI::ExistingFile);
    cmd->add_option("inputs", o.inputs, "JSONL files or directories")->required();
    common(cmd, o, false);
  }

  auto* check = app.add_subcommand("check", "check proof files and print their terms");
  check->add_option("inputs", o.inputs, "proof files or directories")->required();
  common(check, o, false);

  auto* parse = app.add_subcommand("parse", "parse {words, types} JSONL records");
  parse->add_option("inputs", o.inputs, "JSONL files or directories")->required();
  parse->add_option("--tie-break", o.tie_break, "preferred side among equally small arguments")
      ->check(CLI::IsMember({"left", "right"}));
  common(parse, o);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e);
    return code == 0 ? kOk : kUsage;
  }

  try {
    if (*extract) return cmd_extract(o);
    if (*stats) return cmd_stats(o);
    if (*learn) return cmd_merges_learn(o);
    if (*apply) return cmd_merges_map(o, true);
    if (*revert) return cmd_merges_map(o, false);
    if (*check) return cmd_check(o);
    if (*parse) return cmd_parse(o);
  } catch (const IoError& e) {
    std::cerr << e.what() << "\n";
    return kIo;
  } catch (const fs::filesystem_error& e) {
    std::cerr << e.what() << "\n";
    return kIo;
  }
  return kUsage;
}
