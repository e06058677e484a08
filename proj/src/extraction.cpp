#include "mill/extraction.hpp"

#include <algorithm>
#include <set>

#include <json.hpp>

#include "mill/error.hpp"

namespace mill {

using ordered_json = nlohmann::ordered_json;

const Tables& Tables::standard() {
  static const Tables tables = [] {
    Tables t;
    for (const char* tag : {"adj", "bw", "let", "lid", "n", "spec", "tsw", "tw", "vg", "vnw", "vz", "ww"}) {
      std::string atom(tag);
      std::transform(atom.begin(), atom.end(), atom.begin(), ::toupper);
      t.pos_table[tag] = atom;
    }
    for (const char* tag : {"ahi", "ap", "cp", "detp", "inf", "np", "oti", "pp", "ppart", "ppres", "rel",
                            "sv1", "svan", "ti", "whq", "whrel", "whsub"}) {
      std::string atom(tag);
      std::transform(atom.begin(), atom.end(), atom.begin(), ::toupper);
      t.cat_table[tag] = atom;
    }
    t.cat_table["smain"] = "S_MAIN";
    t.cat_table["ssub"] = "S_SUB";
    t.cat_table["advp"] = "ADV";
    for (const char* dep : {"app", "whd_body", "rhd_body", "body", "cmp", "cnj", "crd", "invdet", "hdf", "ld",
                            "me", "mod", "obcomp", "obj1", "obj2", "pc", "pobj1", "predc", "predm", "se", "su",
                            "sup", "svp", "vc", "tag", "det", "obj", "pobj"})
      t.dep_table[dep] = dep;
    t.placeholders = {{"_det", "_DET"}, {"_crd", "_CRD"}};
    t.mod_labels = {"mod", "app", "predm"};
    t.head_labels = {"hd", "rhd", "whd", "cmp", "crd"};
    return t;
  }();
  return tables;
}

Tables Tables::from_json(std::string_view text) {
  Tables t = standard();
  ordered_json j;
  try {
    j = ordered_json::parse(text);
  } catch (const ordered_json::exception& e) {
    throw Error(ErrorCode::invalid_argument, std::string("tables: ") + e.what());
  }
  if (!j.is_object()) throw Error(ErrorCode::invalid_argument, "tables: expected a JSON object");
  try {
    for (auto [key, map] : {std::pair{"pos_table", &t.pos_table}, std::pair{"cat_table", &t.cat_table},
                            std::pair{"dep_table", &t.dep_table}, std::pair{"placeholders", &t.placeholders}})
      if (j.contains(key))
        for (const auto& [k, v] : j.at(key).items()) (*map)[k] = v.get<std::string>();
    for (auto [key, set] : {std::pair{"mod_labels", &t.mod_labels}, std::pair{"head_labels", &t.head_labels}})
      if (j.contains(key)) {
        set->clear();
        for (const auto& v : j.at(key)) set->insert(v.get<std::string>());
      }
  } catch (const ordered_json::exception& e) {
    throw Error(ErrorCode::invalid_argument, std::string("tables: ") + e.what());
  }
  return t;
}

Vocabulary Tables::vocabulary() const {
  Vocabulary v = Vocabulary::standard();
  for (const auto* m : {&pos_table, &cat_table, &placeholders})
    for (const auto& [k, atom] : *m) v.atoms.insert(atom);
  for (const auto& [k, label] : dep_table) v.labels.insert(label);
  return v;
}

namespace {

const std::string& lookup(const std::map<std::string, std::string, std::less<>>& table, const std::string& key,
                          const char* what) {
  auto it = table.find(key);
  if (it == table.end()) throw Error(ErrorCode::extraction, std::string("unmapped ") + what + " '" + key + "'");
  return it->second;
}

}  // namespace

Type trans(const Dag& d, const Node& n, const Tables& t) {
  if (n.pos && (d.is_leaf(n.id) || !n.cat)) return Type::atom(lookup(t.pos_table, *n.pos, "part of speech"));
  if (n.cat) {
    if (auto it = t.cat_table.find(*n.cat); it != t.cat_table.end()) return Type::atom(it->second);
    if (auto it = t.pos_table.find(*n.cat); it != t.pos_table.end()) return Type::atom(it->second);
    throw Error(ErrorCode::extraction, "unmapped category '" + *n.cat + "'");
  }
  throw Error(ErrorCode::extraction, "node '" + n.id + "' has neither category nor part of speech");
}

Type type_assign(const Dag& d, const Node& n, std::string_view dep, const Type& parent_type, const Tables& t) {
  if (t.mod_labels.count(dep))
    return Type::arrow(parent_type, lookup(t.dep_table, std::string(dep), "dependency"), parent_type);
  return trans(d, n, t);
}

namespace {

class Annotator {
 public:
  Annotator(const Dag& d, const Tables& t) : d_(d), t_(t) {}

  TypeDict run() {
    const Node& root = d_.node(d_.root);
    Type top = trans(d_, root, t_);
    set(root.id, top);
    assign(root.id, top);
    return std::move(dict_);
  }

 private:
  const Dag& d_;
  const Tables& t_;
  TypeDict dict_;

  void set(const std::string& id, const Type& type) {
    auto [it, inserted] = dict_.emplace(id, type);
    if (!inserted && it->second != type)
      throw Error(ErrorCode::extraction, "conflicting types for node '" + id + "': " +
                                             print_type(it->second, Notation::infix) + " and " +
                                             print_type(type, Notation::infix));
  }

  std::string label(const std::string& dep) const { return lookup(t_.dep_table, dep, "dependency"); }

  Type complex(std::vector<Argument> args, Type result) const {
    for (auto& a : args) a.label = label(a.label);
    try {
      return make_complex(std::move(args), std::move(result));
    } catch (const Error& e) {
      throw Error(ErrorCode::extraction, e.what());
    }
  }

  const Edge& select_head(const std::string& id) const {
    const Edge* head = nullptr;
    for (const Edge* e : d_.out_edges(id)) {
      if (!t_.head_labels.count(e->dep)) continue;
      if (head) throw Error(ErrorCode::extraction, "node '" + id + "' has multiple heads");
      head = e;
    }
    if (!head) throw Error(ErrorCode::extraction, "node '" + id + "' has no head");
    return *head;
  }

  // Types the head would take from inside a daughter's subgraph, one per distinct inner dependency.
  std::vector<Argument> embedded(const std::string& daughter, const std::string& head, const Type& daughter_type) {
    std::vector<Argument> out;
    std::set<std::string> deps;
    std::set<std::string> seen;
    std::vector<std::string> stack{daughter};
    std::vector<std::string> order;
    while (!stack.empty()) {
      std::string n = std::move(stack.back());
      stack.pop_back();
      if (!seen.insert(n).second) continue;
      order.push_back(n);
      auto kids = d_.out_edges(n);
      for (auto it = kids.rbegin(); it != kids.rend(); ++it) stack.push_back((*it)->child);
    }
    for (const auto& n : order)
      for (const Edge* e : d_.out_edges(n))
        if (e->child == head && deps.insert(e->dep).second)
          out.push_back({type_assign(d_, d_.node(head), e->dep, daughter_type, t_), e->dep});
    return out;
  }

  std::vector<Argument> daughters(const std::string& id, const Edge& head, const Type& p,
                                  const std::set<std::string>& exclude) {
    std::vector<Argument> args;
    for (const Edge* e : d_.out_edges(id)) {
      if (e == &head) continue;
      const Node& child = d_.node(e->child);
      if (auto ph = t_.placeholders.find(e->dep); ph != t_.placeholders.end()) {
        if (e->rank == Rank::primary) set(child.id, Type::atom(ph->second));
        continue;
      }
      Type dt = type_assign(d_, child, e->dep, p, t_);
      auto emb = embedded(child.id, head.child, dt);
      if (e->rank == Rank::primary) {
        set(child.id, dt);
        assign(child.id, dt);
      }
      dt = complex(std::move(emb), dt);
      if (!t_.mod_labels.count(e->dep) && !exclude.count(child.id)) args.push_back({dt, e->dep});
    }
    return args;
  }

  void assign_head(const Edge& head, const Type& type) {
    bool fresh = !dict_.count(head.child);
    set(head.child, type);
    if (fresh && head.rank == Rank::primary && !d_.is_leaf(head.child)) assign(head.child, type);
  }

  void assign(const std::string& id, const Type& p) {
    if (d_.is_leaf(id)) return;
    const Edge& head = select_head(id);
    if (head.dep == "crd") return coordinate(id, head, p);
    auto args = daughters(id, head, p, {});
    assign_head(head, complex(std::move(args), p));
  }

  void coordinate(const std::string& id, const Edge& crd, const Type& p) {
    std::vector<const Edge*> conjuncts;
    for (const Edge* e : d_.out_edges(id)) {
      if (e == &crd) continue;
      if (e->dep == "cnj") {
        conjuncts.push_back(e);
        continue;
      }
      const Node& child = d_.node(e->child);
      if (auto ph = t_.placeholders.find(e->dep); ph != t_.placeholders.end()) {
        if (e->rank == Rank::primary) set(child.id, Type::atom(ph->second));
      } else if (t_.mod_labels.count(e->dep)) {
        Type dt = type_assign(d_, child, e->dep, p, t_);
        if (e->rank == Rank::primary) {
          set(child.id, dt);
          assign(child.id, dt);
        }
      } else {
        throw Error(ErrorCode::extraction, "unsupported dependency '" + e->dep + "' under coordination");
      }
    }
    if (conjuncts.size() < 2)
      throw Error(ErrorCode::extraction, "coordination '" + id + "' has fewer than two conjuncts");

    // Material reached from more than one conjunct.
    std::vector<std::pair<std::string, std::string>> shared;
    std::map<std::string, std::vector<std::string>> reached;
    std::vector<std::string> first_seen;
    for (const Edge* k : conjuncts) {
      std::set<std::string> local;
      for (const Edge* e : d_.out_edges(k->child)) {
        if (t_.mod_labels.count(e->dep) || !local.insert(e->child).second) continue;
        if (!reached.count(e->child)) first_seen.push_back(e->child);
        reached[e->child].push_back(e->dep);
      }
    }
    for (const auto& node : first_seen) {
      const auto& deps = reached[node];
      if (deps.size() < 2) continue;
      bool uniform = std::all_of(deps.begin(), deps.end(), [&](const std::string& x) { return x == deps[0]; });
      if (deps.size() != conjuncts.size() || !uniform)
        throw Error(ErrorCode::skipped, "non-polymorphic ellipsis: node '" + node + "' is not shared uniformly");
      shared.emplace_back(node, deps[0]);
    }

    std::set<std::string> shared_ids;
    std::vector<Argument> shared_args;
    bool head_copy = false;
    for (const auto& [node, dep] : shared) {
      shared_ids.insert(node);
      if (t_.head_labels.count(dep))
        head_copy = true;
      else
        shared_args.push_back({trans(d_, d_.node(node), t_), dep});
    }

    std::vector<Type> conjunct_types;
    for (const Edge* k : conjuncts) {
      const Node& node = d_.node(k->child);
      Type r = type_assign(d_, node, k->dep, p, t_);
      Type conjunct_type = r;
      if (shared.empty()) {
        auto emb = embedded(node.id, crd.child, r);
        if (k->rank == Rank::primary) {
          set(node.id, r);
          assign(node.id, r);
        }
        conjunct_type = complex(std::move(emb), r);
      } else {
        if (d_.is_leaf(node.id))
          throw Error(ErrorCode::skipped, "non-polymorphic ellipsis: lexical conjunct '" + node.id + "'");
        Type inner = complex(shared_args, r);
        const Edge& head = select_head(node.id);
        auto args = daughters(node.id, head, inner, shared_ids);
        Type head_type = complex(std::move(args), inner);
        if (head_copy) {
          if (auto it = dict_.find(head.child); it != dict_.end() && it->second != head_type)
            throw Error(ErrorCode::skipped, "non-polymorphic ellipsis: copied head '" + head.child +
                                                "' takes different arguments per conjunct");
          assign_head(head, head_type);
          conjunct_type = Type::arrow(head_type, "", inner);
        } else {
          assign_head(head, head_type);
          conjunct_type = inner;
        }
        if (k->rank == Rank::primary) set(node.id, conjunct_type);
      }
      conjunct_types.push_back(conjunct_type);
    }
    assign_head(crd, instantiate_coordinator(conjunct_types));
  }
};

}  // namespace

TypeDict annotate_dag(const Dag& d, const Tables& t) { return Annotator(d, t).run(); }

Sequence to_sequences(const Dag& d, const TypeDict& dict, const Tables& t) {
  Sequence s;
  auto crd_placeholder = t.placeholders.find("_crd");
  auto det_placeholder = t.placeholders.find("_det");
  for (const auto& id : d.leaves_in_order()) {
    const Node& leaf = d.node(id);
    auto it = dict.find(id);
    if (it == dict.end()) throw Error(ErrorCode::extraction, "leaf '" + id + "' has no type");
    if (!leaf.word) throw Error(ErrorCode::extraction, "leaf '" + id + "' has no word");
    Type type = it->second;
    if (det_placeholder != t.placeholders.end() && type == Type::atom(det_placeholder->second)) {
      if (s.words.empty()) throw Error(ErrorCode::extraction, "determiner placeholder without a left neighbour");
      s.words.back() += " " + *leaf.word;
      continue;
    }
    if (crd_placeholder != t.placeholders.end() && type == Type::atom(crd_placeholder->second)) {
      const Edge* up = d.primary_in(id);
      const Edge* partner = nullptr;
      if (up)
        for (const Edge* e : d.out_edges(up->parent))
          if (e->dep == "crd") partner = e;
      if (!partner || !dict.count(partner->child))
        throw Error(ErrorCode::extraction, "coordinator placeholder '" + id + "' has no partner");
      type = dict.at(partner->child);
    }
    s.words.push_back(*leaf.word);
    s.types.push_back(type);
  }
  return s;
}

ExtractionResult extract_sample(const Dag& raw, const std::vector<Pass>& passes, const Tables& t) {
  ExtractionResult out;
  auto pipeline = run_pipeline(raw, passes);
  if (pipeline.diagnostic) {
    out.records.push_back({raw.id, {}, {}, true, pipeline.diagnostic->reason});
    out.diagnostics.push_back(*pipeline.diagnostic);
    return out;
  }
  for (const auto& dag : pipeline.dags) {
    try {
      auto dict = annotate_dag(dag, t);
      auto seq = to_sequences(dag, dict, t);
      out.records.push_back({dag.id, std::move(seq.words), std::move(seq.types), false, {}});
    } catch (const Error& e) {
      out.records.push_back({dag.id, {}, {}, true, e.what()});
      out.diagnostics.push_back({dag.id, "annotate", e.what()});
    }
  }
  return out;
}

std::string record_to_json(const SampleRecord& r) {
  ordered_json j;
  j["id"] = r.id;
  j["words"] = r.words;
  j["types"] = ordered_json::array();
  for (const auto& t : r.types) j["types"].push_back(print_type(t, Notation::polish));
  j["skipped"] = r.skipped;
  j["reason"] = r.skipped ? ordered_json(r.reason) : ordered_json(nullptr);
  return j.dump();
}

SampleRecord record_from_json(std::string_view line, const Vocabulary& vocab) {
  SampleRecord r;
  try {
    auto j = ordered_json::parse(line);
    r.id = j.at("id").get<std::string>();
    r.words = j.at("words").get<std::vector<std::string>>();
    for (const auto& t : j.at("types")) r.types.push_back(parse_type(t.get<std::string>(), Notation::polish, vocab));
    r.skipped = j.value("skipped", false);
    if (j.contains("reason") && j.at("reason").is_string()) r.reason = j.at("reason").get<std::string>();
  } catch (const ordered_json::exception& e) {
    throw Error(ErrorCode::invalid_argument, std::string("malformed record: ") + e.what());
  }
  if (!r.skipped && r.words.size() != r.types.size())
    throw Error(ErrorCode::invalid_argument, "record '" + r.id + "': words and types differ in length");
  return r;
}

std::string diagnostic_to_json(const Diagnostic& d) {
  ordered_json j;
  j["sample"] = d.sample;
  j["pass"] = d.pass;
  j["reason"] = d.reason;
  return j.dump();
}

}  // namespace mill
