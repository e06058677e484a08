#pragma once

#include <functional>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include "mill/dag.hpp"

namespace mill {

using TagSet = std::set<std::string, std::less<>>;

struct TransformConfig {
  TagSet head_labels{"hd", "rhd", "whd", "cmp", "crd"};
  TagSet mod_labels{"mod", "app", "predm"};
  TagSet abstract_parents{"ppart", "inf", "ti", "oti"};
  TagSet abstract_labels{"su", "obj1", "obj2"};
  TagSet numeral_tags{"tw"};
  TagSet nominal_mwu_tags{"n", "spec"};
  // Tag promotion for collapsed multi-word units; unmapped tags stay part-of-speech tags.
  std::map<std::string, std::string, std::less<>> pos_to_phrase{
      {"adj", "ap"}, {"bw", "advp"}, {"n", "np"},     {"spec", "np"},
      {"vnw", "np"}, {"vz", "pp"},   {"tw", "detp"}, {"lid", "detp"}};
  // Priority groups for category votes, each with the category a tie resolves to.
  struct BiasGroup {
    TagSet members;
    std::optional<std::string> resolves_to;  // nullopt keeps the tied member
  };
  std::vector<BiasGroup> bias{
      {{"smain", "ssub", "sv1", "whq", "whsub", "whrel", "svan"}, std::nullopt},
      {{"np", "n", "spec", "vnw"}, "np"},
      {{"ap", "adj", "ppart", "ppres"}, "ap"},
  };

  static const TransformConfig& standard();
};

inline constexpr std::string_view kDetPlaceholder = "_det";
inline constexpr std::string_view kCrdPlaceholder = "_crd";

Dag remove_abstract_arguments(Dag d, const TransformConfig& c = TransformConfig::standard());
Dag swap_np_heads(Dag d);
Dag relabel_numeral_determiners(Dag d, const TransformConfig& c = TransformConfig::standard());
Dag refine_body_labels(Dag d);
Dag collapse_mwu(Dag d, const TransformConfig& c = TransformConfig::standard());
Dag relabel_conjunction_category(Dag d, const TransformConfig& c = TransformConfig::standard());
Dag detach_shared_modifiers(Dag d, const TransformConfig& c = TransformConfig::standard());
std::vector<Dag> split_unheaded(const Dag& d, const TransformConfig& c = TransformConfig::standard());
Dag collapse_single_daughters(Dag d);

// Biased majority vote over tags, in first-occurrence order.
std::string vote_category(const std::vector<std::string>& tags, const TransformConfig& c);

using PassFn = std::function<std::vector<Dag>(const Dag&)>;

struct Pass {
  std::string name;
  PassFn run;
};

const std::vector<std::string>& default_pass_names();
Pass make_pass(std::string_view name, const TransformConfig& c = TransformConfig::standard());
// One pass name per line; blank lines and '#' comments ignored.
std::vector<std::string> parse_pass_list(std::string_view text);

struct Diagnostic {
  std::string sample;
  std::string pass;
  std::string reason;
};

struct PipelineResult {
  std::vector<Dag> dags;
  std::optional<Diagnostic> diagnostic;
};

PipelineResult run_pipeline(const Dag& d, const std::vector<Pass>& passes);
std::vector<Pass> make_passes(const std::vector<std::string>& names,
                              const TransformConfig& c = TransformConfig::standard());

}  // namespace mill
