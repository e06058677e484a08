#include "mill/dag.hpp"

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

#include <boost/property_tree/ptree.hpp>
#include <boost/property_tree/xml_parser.hpp>

#include "mill/error.hpp"

namespace mill {

namespace pt = boost::property_tree;

const Node* Dag::find(std::string_view node_id) const {
  for (const auto& n : nodes)
    if (n.id == node_id) return &n;
  return nullptr;
}

Node* Dag::find(std::string_view node_id) {
  for (auto& n : nodes)
    if (n.id == node_id) return &n;
  return nullptr;
}

const Node& Dag::node(std::string_view node_id) const {
  if (const Node* n = find(node_id)) return *n;
  throw Error(ErrorCode::structure, "no node with id '" + std::string(node_id) + "'");
}

Node& Dag::node(std::string_view node_id) {
  if (Node* n = find(node_id)) return *n;
  throw Error(ErrorCode::structure, "no node with id '" + std::string(node_id) + "'");
}

std::vector<const Edge*> Dag::out_edges(std::string_view node_id) const {
  std::vector<const Edge*> out;
  for (const auto& e : edges)
    if (e.parent == node_id) out.push_back(&e);
  std::stable_sort(out.begin(), out.end(), [this](const Edge* a, const Edge* b) {
    return node(a->child).begin < node(b->child).begin;
  });
  return out;
}

std::vector<const Edge*> Dag::in_edges(std::string_view node_id) const {
  std::vector<const Edge*> in;
  for (const auto& e : edges)
    if (e.child == node_id) in.push_back(&e);
  return in;
}

const Edge* Dag::primary_in(std::string_view node_id) const {
  for (const auto& e : edges)
    if (e.child == node_id && e.rank == Rank::primary) return &e;
  return nullptr;
}

bool Dag::is_leaf(std::string_view node_id) const {
  return std::none_of(edges.begin(), edges.end(), [&](const Edge& e) { return e.parent == node_id; });
}

std::vector<std::string> Dag::primary_preorder() const {
  std::vector<std::string> order;
  std::set<std::string> seen;
  std::vector<std::string> stack{root};
  while (!stack.empty()) {
    std::string id = std::move(stack.back());
    stack.pop_back();
    if (!seen.insert(id).second) continue;
    order.push_back(id);
    auto kids = out_edges(id);
    for (auto it = kids.rbegin(); it != kids.rend(); ++it)
      if ((*it)->rank == Rank::primary) stack.push_back((*it)->child);
  }
  return order;
}

std::vector<std::string> Dag::leaves_in_order() const {
  std::vector<const Node*> leaves;
  for (const auto& n : nodes)
    if (is_leaf(n.id) && (n.word || n.pos)) leaves.push_back(&n);
  std::stable_sort(leaves.begin(), leaves.end(),
                   [](const Node* a, const Node* b) { return a->begin < b->begin; });
  std::vector<std::string> ids;
  for (const Node* n : leaves) ids.push_back(n->id);
  return ids;
}

void Dag::remove_node(std::string_view node_id) {
  std::erase_if(edges, [&](const Edge& e) { return e.parent == node_id || e.child == node_id; });
  std::erase_if(nodes, [&](const Node& n) { return n.id == node_id; });
}

bool equivalent(const Dag& a, const Dag& b) {
  if (a.root != b.root || a.sentence != b.sentence || a.nodes != b.nodes) return false;
  auto key = [](const Edge& e) { return std::tie(e.parent, e.child, e.dep, e.rank); };
  auto sorted = [&](std::vector<Edge> v) {
    std::sort(v.begin(), v.end(), [&](const Edge& x, const Edge& y) { return key(x) < key(y); });
    return v;
  };
  return sorted(a.edges) == sorted(b.edges);
}

namespace {

[[noreturn]] void schema_error(const std::string& msg) { throw Error(ErrorCode::schema, msg); }

std::optional<std::string> attr(const pt::ptree& el, const char* name) {
  if (auto attrs = el.get_child_optional("<xmlattr>"))
    if (auto v = attrs->get_optional<std::string>(name)) return *v;
  return std::nullopt;
}

int parse_position(const std::string& text, const std::string& what, const std::string& id) {
  std::size_t used = 0;
  int value = 0;
  try {
    value = std::stoi(text, &used);
  } catch (const std::exception&) {
    used = 0;
  }
  if (used != text.size() || text.empty() || value < 0)
    schema_error("node '" + id + "': malformed " + what + " '" + text + "'");
  return value;
}

struct Loader {
  Dag dag;
  std::set<std::string> ids;

  void visit(const pt::ptree& el, const std::string* parent, bool is_root) {
    std::vector<const pt::ptree*> kids;
    for (const auto& [tag, child] : el) {
      if (tag == "node")
        kids.push_back(&child);
      else if (tag != "<xmlattr>" && tag != "<xmlcomment>")
        schema_error("unknown element <" + tag + ">");
    }
    if (is_root && kids.empty()) schema_error("root must be non-terminal");

    auto id = attr(el, "id");
    if (!id || id->empty()) schema_error("node without id");
    if (!ids.insert(*id).second) schema_error("duplicate node id '" + *id + "'");

    Node n;
    n.id = *id;
    n.word = attr(el, "word");
    n.pos = attr(el, "pt");
    n.cat = attr(el, "cat");
    n.index = attr(el, "index");
    bool phantom = n.index && !n.word && !n.pos && !n.cat && kids.empty();

    auto rel = attr(el, "rel");
    if (!is_root && !rel) schema_error("node '" + n.id + "': missing rel");

    if (!phantom) {
      if (!n.cat && !n.pos) schema_error("node '" + n.id + "': missing cat or pt");
      if (n.pos && !kids.empty()) schema_error("node '" + n.id + "': terminal with daughters");
      if (kids.empty() && !n.pos && !n.word)
        schema_error("node '" + n.id + "': non-terminal without daughters");
    }
    auto b = attr(el, "begin");
    auto e = attr(el, "end");
    if (!phantom && (!b || !e)) schema_error("node '" + n.id + "': missing span");
    if (b) n.begin = parse_position(*b, "begin", n.id);
    if (e) n.end = parse_position(*e, "end", n.id);
    if ((b || e) && !(b && e && n.begin < n.end))
      schema_error("node '" + n.id + "': malformed span");

    if (is_root) dag.root = n.id;
    if (parent) dag.edges.push_back({*parent, n.id, *rel, Rank::primary});
    std::string self = n.id;
    dag.nodes.push_back(std::move(n));
    for (const pt::ptree* k : kids) visit(*k, &self, false);
  }
};

bool is_phantom(const Dag& d, const Node& n) {
  return n.index && !n.word && !n.pos && !n.cat && d.is_leaf(n.id);
}

}  // namespace

Dag load_alpino(std::string_view xml, std::string sample_id) {
  pt::ptree doc;
  std::istringstream in{std::string(xml)};
  try {
    pt::read_xml(in, doc, pt::xml_parser::trim_whitespace);
  } catch (const pt::xml_parser_error& e) {
    schema_error(std::string("malformed XML: ") + e.what());
  }
  const pt::ptree* top = nullptr;
  for (const auto& [tag, child] : doc) {
    if (tag == "alpino_ds" && !top)
      top = &child;
    else if (tag != "<xmlcomment>")
      schema_error("unexpected top-level element <" + tag + ">");
  }
  if (!top) schema_error("missing <alpino_ds> element");

  Loader loader;
  loader.dag.id = std::move(sample_id);
  const pt::ptree* root = nullptr;
  for (const auto& [tag, child] : *top) {
    if (tag == "node") {
      if (root) schema_error("more than one root node");
      root = &child;
    } else if (tag == "sentence") {
      std::istringstream words(child.data());
      std::string w;
      while (words >> w) loader.dag.sentence.push_back(w);
    } else if (tag != "<xmlattr>" && tag != "<xmlcomment>") {
      schema_error("unknown element <" + tag + ">");
    }
  }
  if (!root) schema_error("missing root node");
  loader.visit(*root, nullptr, true);
  return std::move(loader.dag);
}

Dag load_alpino_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::io, "cannot read '" + path + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  return load_alpino(buf.str(), std::filesystem::path(path).stem().string());
}

Dag collapse_phantoms(Dag d) {
  std::map<std::string, int> depth;
  for (const auto& id : d.primary_preorder()) {
    const Edge* in = d.primary_in(id);
    depth[id] = in ? depth[in->parent] + 1 : 0;
  }
  std::map<std::string, std::size_t> position;
  for (std::size_t i = 0; i < d.nodes.size(); ++i) position[d.nodes[i].id] = i;

  struct Group {
    std::vector<std::string> material;
    std::vector<std::string> phantoms;
  };
  std::map<std::string, Group> groups;
  for (const auto& n : d.nodes) {
    if (!n.index) continue;
    auto& g = groups[*n.index];
    (is_phantom(d, n) ? g.phantoms : g.material).push_back(n.id);
  }

  std::vector<std::string> removed;
  for (auto& [index, g] : groups) {
    if (g.phantoms.empty()) continue;
    if (g.material.empty())
      throw Error(ErrorCode::structure, "index " + index + " has no material node");
    if (g.material.size() > 1)
      throw Error(ErrorCode::structure, "index " + index + " is shared by more than one material node");
    const std::string& target = g.material.front();

    std::vector<Edge*> candidates;
    for (auto& e : d.edges)
      if (e.child == target ||
          std::find(g.phantoms.begin(), g.phantoms.end(), e.child) != g.phantoms.end())
        candidates.push_back(&e);
    auto key = [&](const Edge* e) {
      return std::tuple(depth[e->parent], d.node(e->parent).begin, position[e->child]);
    };
    Edge* best = *std::min_element(candidates.begin(), candidates.end(),
                                   [&](const Edge* a, const Edge* b) { return key(a) < key(b); });
    for (Edge* e : candidates) {
      e->rank = e == best ? Rank::primary : Rank::secondary;
      e->child = target;
    }
    removed.insert(removed.end(), g.phantoms.begin(), g.phantoms.end());
  }
  std::erase_if(d.nodes, [&](const Node& n) {
    return std::find(removed.begin(), removed.end(), n.id) != removed.end();
  });
  return d;
}

namespace {

struct Writer {
  const Dag& d;
  std::map<std::string, int> copies;

  std::string index_of(const Node& n) const { return n.index ? *n.index : "_" + n.id; }

  bool has_secondary(const std::string& id) const {
    return std::any_of(d.edges.begin(), d.edges.end(),
                       [&](const Edge& e) { return e.child == id && e.rank == Rank::secondary; });
  }

  void emit(pt::ptree& parent, const Node& n, const std::string& rel) {
    pt::ptree el;
    el.put("<xmlattr>.id", n.id);
    el.put("<xmlattr>.rel", rel);
    if (n.cat) el.put("<xmlattr>.cat", *n.cat);
    if (n.pos) el.put("<xmlattr>.pt", *n.pos);
    if (n.word) el.put("<xmlattr>.word", *n.word);
    el.put("<xmlattr>.begin", n.begin);
    el.put("<xmlattr>.end", n.end);
    if (n.index || has_secondary(n.id)) el.put("<xmlattr>.index", index_of(n));
    for (const Edge* e : d.out_edges(n.id)) {
      const Node& child = d.node(e->child);
      if (e->rank == Rank::primary) {
        emit(el, child, e->dep);
      } else {
        pt::ptree ph;
        ph.put("<xmlattr>.id", child.id + "~" + std::to_string(++copies[child.id]));
        ph.put("<xmlattr>.rel", e->dep);
        ph.put("<xmlattr>.index", index_of(child));
        el.add_child("node", ph);
      }
    }
    parent.add_child("node", el);
  }
};

std::string dot_quote(const std::string& s) {
  std::string out = "\"";
  for (char c : s) {
    if (c == '"' || c == '\\') out += '\\';
    out += c;
  }
  return out + "\"";
}

}  // namespace

std::string write_alpino(const Dag& d) {
  pt::ptree ds;
  Writer w{d, {}};
  w.emit(ds, d.node(d.root), "--");
  std::string sentence;
  for (const auto& tok : d.sentence) sentence += (sentence.empty() ? "" : " ") + tok;
  ds.put("sentence", sentence);
  pt::ptree doc;
  doc.add_child("alpino_ds", ds);
  std::ostringstream out;
  pt::write_xml(out, doc, pt::xml_writer_make_settings<std::string>(' ', 2));
  return out.str();
}

std::string write_dot(const Dag& d) {
  std::ostringstream out;
  out << "digraph " << dot_quote(d.id.empty() ? "dag" : d.id) << " {\n";
  for (const auto& n : d.nodes) {
    std::string label = n.id;
    if (n.cat) label += "\\n" + *n.cat;
    if (n.pos) label += "\\n" + *n.pos;
    if (n.word) label += "\\n" + *n.word;
    out << "  " << dot_quote(n.id) << " [label=\"";
    for (char c : label) out << (c == '"' ? "\\\"" : std::string(1, c));
    out << "\"];\n";
  }
  for (const Edge* e : [&] {
         std::vector<const Edge*> all;
         for (const auto& id : d.primary_preorder())
           for (const Edge* x : d.out_edges(id)) all.push_back(x);
         return all;
       }()) {
    out << "  " << dot_quote(e->parent) << " -> " << dot_quote(e->child) << " [label="
        << dot_quote(e->dep);
    if (e->rank == Rank::secondary) out << ", style=dashed";
    out << "];\n";
  }
  out << "}\n";
  return out.str();
}

}  // namespace mill
