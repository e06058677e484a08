#include "mill/transforms.hpp"

#include <algorithm>
#include <sstream>

#include "mill/error.hpp"

namespace mill {

const TransformConfig& TransformConfig::standard() {
  static const TransformConfig config;
  return config;
}

namespace {

std::string tag_of(const Node& n) { return n.cat ? *n.cat : n.pos.value_or(""); }

std::vector<std::string> primary_ancestors(const Dag& d, const std::string& id) {
  std::vector<std::string> out;
  for (const Edge* e = d.primary_in(id); e; e = d.primary_in(e->parent)) out.push_back(e->parent);
  return out;
}

std::vector<Edge*> mutable_out(Dag& d, const std::string& id) {
  std::vector<Edge*> out;
  for (auto& e : d.edges)
    if (e.parent == id) out.push_back(&e);
  std::stable_sort(out.begin(), out.end(), [&](const Edge* a, const Edge* b) {
    return d.node(a->child).begin < d.node(b->child).begin;
  });
  return out;
}

}  // namespace

std::string vote_category(const std::vector<std::string>& tags, const TransformConfig& c) {
  if (tags.empty()) throw Error(ErrorCode::pipeline, "category vote over no members");
  std::vector<std::pair<std::string, int>> counts;
  for (const auto& t : tags) {
    auto it = std::find_if(counts.begin(), counts.end(), [&](const auto& p) { return p.first == t; });
    if (it == counts.end())
      counts.emplace_back(t, 1);
    else
      ++it->second;
  }
  int top = 0;
  for (const auto& [t, n] : counts) top = std::max(top, n);
  std::vector<std::string> winners;
  for (const auto& [t, n] : counts)
    if (n == top) winners.push_back(t);
  if (winners.size() == 1) return winners.front();
  for (const auto& group : c.bias)
    for (const auto& w : winners)
      if (group.members.count(w)) return group.resolves_to.value_or(w);
  return winners.front();
}

Dag remove_abstract_arguments(Dag d, const TransformConfig& c) {
  std::erase_if(d.edges, [&](const Edge& e) {
    if (e.rank != Rank::secondary || !c.abstract_labels.count(e.dep)) return false;
    const Node& parent = d.node(e.parent);
    if (!parent.cat || !c.abstract_parents.count(*parent.cat)) return false;
    const Edge* primary = d.primary_in(e.child);
    if (!primary || !c.abstract_labels.count(primary->dep)) return false;
    auto ancestors = primary_ancestors(d, e.parent);
    return std::find(ancestors.begin(), ancestors.end(), primary->parent) != ancestors.end();
  });
  return d;
}

Dag swap_np_heads(Dag d) {
  for (const auto& n : d.nodes) {
    if (n.cat != "np") continue;
    auto out = mutable_out(d, n.id);
    bool has_det = std::any_of(out.begin(), out.end(), [](const Edge* e) { return e->dep == "det"; });
    bool has_hd = std::any_of(out.begin(), out.end(), [](const Edge* e) { return e->dep == "hd"; });
    if (!has_det || !has_hd) continue;
    for (Edge* e : out) {
      if (e->dep == "hd")
        e->dep = "invdet";
      else if (e->dep == "det")
        e->dep = "hd";
    }
  }
  return d;
}

Dag relabel_numeral_determiners(Dag d, const TransformConfig& c) {
  for (const auto& n : d.nodes) {
    auto out = mutable_out(d, n.id);
    bool swapped = std::any_of(out.begin(), out.end(), [](const Edge* e) { return e->dep == "invdet"; });
    std::vector<Edge*> group;
    for (Edge* e : out)
      if (e->dep == "det" || (swapped && e->dep == "hd")) group.push_back(e);
    if (group.size() < 2) continue;
    auto is_numeral = [&](const Edge* e) {
      const Node& m = d.node(e->child);
      return m.pos && c.numeral_tags.count(*m.pos);
    };
    if (!std::all_of(group.begin(), group.end(), is_numeral)) {
      for (Edge* e : group)
        if (is_numeral(e)) e->dep = "mod";
      std::erase_if(group, is_numeral);
    }
    for (std::size_t i = 1; i < group.size(); ++i) group[i]->dep = kDetPlaceholder;
  }
  return d;
}

Dag refine_body_labels(Dag d) {
  for (const auto& n : d.nodes) {
    auto out = mutable_out(d, n.id);
    std::string refined;
    for (const Edge* e : out)
      if (e->dep == "rhd" || e->dep == "whd") refined = e->dep + "_body";
    if (refined.empty()) continue;
    for (Edge* e : out)
      if (e->dep == "body") e->dep = refined;
  }
  return d;
}

Dag collapse_mwu(Dag d, const TransformConfig& c) {
  std::vector<std::string> units;
  for (const auto& n : d.nodes)
    if (n.cat == "mwu") units.push_back(n.id);
  for (const auto& id : units) {
    std::vector<std::string> parts;
    for (const Edge* e : d.out_edges(id))
      if (e->rank == Rank::primary) parts.push_back(e->child);
    std::string word;
    std::vector<std::string> tags;
    bool nominal = false;
    for (const auto& p : parts) {
      const Node& m = d.node(p);
      if (!m.word || !d.is_leaf(p))
        throw Error(ErrorCode::pipeline, "multi-word unit '" + id + "' has a non-lexical part");
      word += (word.empty() ? "" : " ") + *m.word;
      std::string tag = tag_of(m);
      tags.push_back(tag);
      nominal = nominal || c.nominal_mwu_tags.count(tag);
    }
    if (parts.empty()) throw Error(ErrorCode::pipeline, "multi-word unit '" + id + "' is empty");
    Node& unit = d.node(id);
    unit.word = word;
    unit.cat.reset();
    unit.pos.reset();
    std::string tag = nominal ? "np" : vote_category(tags, c);
    if (auto it = c.pos_to_phrase.find(tag); !nominal && it != c.pos_to_phrase.end())
      unit.cat = it->second;
    else if (std::find(tags.begin(), tags.end(), tag) == tags.end())
      unit.cat = tag;
    else
      unit.pos = tag;
    for (const auto& p : parts) d.remove_node(p);
  }
  return d;
}

Dag relabel_conjunction_category(Dag d, const TransformConfig& c) {
  for (auto& n : d.nodes) {
    if (n.cat != "conj") continue;
    auto out = mutable_out(d, n.id);
    std::vector<std::string> tags;
    for (const Edge* e : out)
      if (e->dep == "cnj") tags.push_back(tag_of(d.node(e->child)));
    bool seen_crd = false;
    for (Edge* e : out) {
      if (e->dep != "crd") continue;
      if (seen_crd) e->dep = kCrdPlaceholder;
      seen_crd = true;
    }
    if (!tags.empty()) d.node(n.id).cat = vote_category(tags, c);
  }
  return d;
}

Dag detach_shared_modifiers(Dag d, const TransformConfig& c) {
  std::vector<std::string> conj_ids;
  for (const auto& n : d.nodes)
    if (std::any_of(d.edges.begin(), d.edges.end(),
                    [&](const Edge& e) { return e.parent == n.id && e.dep == "cnj"; }))
      conj_ids.push_back(n.id);
  for (const auto& conj : conj_ids) {
    std::vector<std::string> conjuncts;
    for (const Edge* e : d.out_edges(conj))
      if (e->dep == "cnj") conjuncts.push_back(e->child);
    if (conjuncts.size() < 2) continue;
    std::vector<std::string> shared;
    for (const Edge* e : d.out_edges(conjuncts.front())) {
      if (!c.mod_labels.count(e->dep)) continue;
      bool everywhere = std::all_of(conjuncts.begin() + 1, conjuncts.end(), [&](const std::string& k) {
        return std::any_of(d.edges.begin(), d.edges.end(), [&](const Edge& x) {
          return x.parent == k && x.child == e->child && c.mod_labels.count(x.dep);
        });
      });
      if (everywhere && std::find(shared.begin(), shared.end(), e->child) == shared.end())
        shared.push_back(e->child);
    }
    for (const auto& m : shared) {
      const Edge* primary = d.primary_in(m);
      std::string dep = primary ? primary->dep : "mod";
      std::erase_if(d.edges, [&](const Edge& x) {
        return x.child == m && std::find(conjuncts.begin(), conjuncts.end(), x.parent) != conjuncts.end();
      });
      d.edges.push_back({conj, m, dep, Rank::primary});
    }
  }
  return d;
}

namespace {

bool headed(const Dag& d, const std::string& id, const TransformConfig& c) {
  auto out = d.out_edges(id);
  return out.empty() || std::any_of(out.begin(), out.end(),
                                    [&](const Edge* e) { return c.head_labels.count(e->dep); });
}

Dag extract_sample(const Dag& d, const std::string& root, std::string id) {
  Dag s;
  s.id = std::move(id);
  s.root = root;
  std::set<std::string> keep;
  std::vector<std::string> stack{root};
  while (!stack.empty()) {
    std::string n = std::move(stack.back());
    stack.pop_back();
    if (!keep.insert(n).second) continue;
    for (const Edge* e : d.out_edges(n))
      if (e->rank == Rank::primary) stack.push_back(e->child);
  }
  for (const auto& n : d.nodes)
    if (keep.count(n.id)) s.nodes.push_back(n);
  for (const auto& e : d.edges)
    if (keep.count(e.parent) && keep.count(e.child) && e.child != root) s.edges.push_back(e);
  std::set<int> positions;
  for (const auto& leaf : s.leaves_in_order())
    for (int i = s.node(leaf).begin; i < s.node(leaf).end; ++i) positions.insert(i);
  for (int i : positions)
    if (i >= 0 && static_cast<std::size_t>(i) < d.sentence.size()) s.sentence.push_back(d.sentence[i]);
  return s;
}

}  // namespace

std::vector<Dag> split_unheaded(const Dag& d, const TransformConfig& c) {
  for (const auto& id : d.primary_preorder()) {
    if (headed(d, id, c)) continue;
    std::vector<Dag> out;
    int k = 0;
    for (const Edge* e : d.out_edges(id)) {
      if (e->rank != Rank::primary) continue;
      auto parts = split_unheaded(extract_sample(d, e->child, d.id + "." + std::to_string(++k)), c);
      for (auto& p : parts) out.push_back(std::move(p));
    }
    return out;
  }
  return {d};
}

Dag collapse_single_daughters(Dag d) {
  auto order = d.primary_preorder();
  for (auto it = order.rbegin(); it != order.rend(); ++it) {
    const std::string& id = *it;
    auto out = d.out_edges(id);
    if (out.size() != 1 || out.front()->rank != Rank::primary) continue;
    std::string child = out.front()->child;
    Node inherited = d.node(child);
    Node& survivor = d.node(id);
    survivor.begin = inherited.begin;
    survivor.end = inherited.end;
    survivor.word = inherited.word;
    survivor.pos = inherited.pos;
    survivor.cat = inherited.cat;
    if (inherited.index) survivor.index = inherited.index;
    std::erase_if(d.edges, [&](const Edge& e) { return e.parent == id && e.child == child; });
    for (auto& e : d.edges) {
      if (e.parent == child) e.parent = id;
      if (e.child == child) e.child = id;
    }
    std::erase_if(d.nodes, [&](const Node& n) { return n.id == child; });
  }
  return d;
}

const std::vector<std::string>& default_pass_names() {
  static const std::vector<std::string> names{
      "collapse_phantoms",           "remove_abstract_arguments", "swap_np_heads",
      "relabel_numeral_determiners", "refine_body_labels",        "collapse_mwu",
      "relabel_conjunction_category", "detach_shared_modifiers",  "split_unheaded",
      "collapse_single_daughters"};
  return names;
}

Pass make_pass(std::string_view name, const TransformConfig& c) {
  auto single = [](auto fn) -> PassFn {
    return [fn](const Dag& d) { return std::vector<Dag>{fn(d)}; };
  };
  const TransformConfig* cfg = &c;
  PassFn fn;
  if (name == "collapse_phantoms")
    fn = single([](const Dag& d) { return collapse_phantoms(d); });
  else if (name == "remove_abstract_arguments")
    fn = single([cfg](const Dag& d) { return remove_abstract_arguments(d, *cfg); });
  else if (name == "swap_np_heads")
    fn = single([](const Dag& d) { return swap_np_heads(d); });
  else if (name == "relabel_numeral_determiners")
    fn = single([cfg](const Dag& d) { return relabel_numeral_determiners(d, *cfg); });
  else if (name == "refine_body_labels")
    fn = single([](const Dag& d) { return refine_body_labels(d); });
  else if (name == "collapse_mwu")
    fn = single([cfg](const Dag& d) { return collapse_mwu(d, *cfg); });
  else if (name == "relabel_conjunction_category")
    fn = single([cfg](const Dag& d) { return relabel_conjunction_category(d, *cfg); });
  else if (name == "detach_shared_modifiers")
    fn = single([cfg](const Dag& d) { return detach_shared_modifiers(d, *cfg); });
  else if (name == "split_unheaded")
    fn = [cfg](const Dag& d) { return split_unheaded(d, *cfg); };
  else if (name == "collapse_single_daughters")
    fn = single([](const Dag& d) { return collapse_single_daughters(d); });
  else
    throw Error(ErrorCode::invalid_argument, "unknown pass '" + std::string(name) + "'");
  return {std::string(name), std::move(fn)};
}

std::vector<Pass> make_passes(const std::vector<std::string>& names, const TransformConfig& c) {
  std::vector<Pass> passes;
  for (const auto& n : names) passes.push_back(make_pass(n, c));
  return passes;
}

std::vector<std::string> parse_pass_list(std::string_view text) {
  std::vector<std::string> names;
  std::istringstream in{std::string(text)};
  std::string line;
  while (std::getline(in, line)) {
    if (auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    std::istringstream words(line);
    std::string w;
    while (words >> w) names.push_back(w);
  }
  return names;
}

PipelineResult run_pipeline(const Dag& d, const std::vector<Pass>& passes) {
  PipelineResult result;
  result.dags = {d};
  for (const auto& pass : passes) {
    std::vector<Dag> next;
    for (const auto& current : result.dags) {
      try {
        for (auto& out : pass.run(current)) next.push_back(std::move(out));
      } catch (const Error& e) {
        result.dags.clear();
        result.diagnostic = Diagnostic{current.id, pass.name, e.what()};
        return result;
      }
    }
    result.dags = std::move(next);
  }
  return result;
}

}  // namespace mill
