#pragma once

#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "mill/dag.hpp"
#include "mill/transforms.hpp"
#include "mill/types.hpp"

namespace mill {

struct Tables {
  std::map<std::string, std::string, std::less<>> pos_table;
  std::map<std::string, std::string, std::less<>> cat_table;
  std::map<std::string, std::string, std::less<>> dep_table;
  std::map<std::string, std::string, std::less<>> placeholders;
  TagSet mod_labels;
  TagSet head_labels;

  static const Tables& standard();
  // Keys present in the JSON object replace the corresponding defaults.
  static Tables from_json(std::string_view text);
  // Standard vocabulary extended with every atom and label the tables can produce.
  Vocabulary vocabulary() const;
};

using TypeDict = std::map<std::string, Type>;

Type trans(const Dag& d, const Node& n, const Tables& t = Tables::standard());
Type type_assign(const Dag& d, const Node& n, std::string_view dep, const Type& parent_type,
                 const Tables& t = Tables::standard());

// Throws Error with code `skipped` for ellipses outside the polymorphic schemes.
TypeDict annotate_dag(const Dag& d, const Tables& t = Tables::standard());

struct Sequence {
  std::vector<std::string> words;
  std::vector<Type> types;
};

Sequence to_sequences(const Dag& d, const TypeDict& dict, const Tables& t = Tables::standard());

struct SampleRecord {
  std::string id;
  std::vector<std::string> words;
  std::vector<Type> types;
  bool skipped = false;
  std::string reason;
};

struct ExtractionResult {
  std::vector<SampleRecord> records;
  std::vector<Diagnostic> diagnostics;
};

ExtractionResult extract_sample(const Dag& raw, const std::vector<Pass>& passes,
                                const Tables& t = Tables::standard());

std::string record_to_json(const SampleRecord& r);
SampleRecord record_from_json(std::string_view line, const Vocabulary& vocab = Vocabulary::standard());
std::string diagnostic_to_json(const Diagnostic& d);

}  // namespace mill
