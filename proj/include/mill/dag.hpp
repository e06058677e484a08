#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace mill {

struct Node {
  std::string id;
  int begin = 0;
  int end = 0;
  std::optional<std::string> word;
  std::optional<std::string> pos;
  std::optional<std::string> cat;
  std::optional<std::string> index;

  friend bool operator==(const Node&, const Node&) = default;
};

enum class Rank { primary, secondary };

struct Edge {
  std::string parent;
  std::string child;
  std::string dep;
  Rank rank = Rank::primary;

  friend bool operator==(const Edge&, const Edge&) = default;
};

struct Dag {
  std::string id;
  std::vector<Node> nodes;  // document order
  std::vector<Edge> edges;
  std::string root;
  std::vector<std::string> sentence;

  const Node* find(std::string_view node_id) const;
  Node* find(std::string_view node_id);
  const Node& node(std::string_view node_id) const;
  Node& node(std::string_view node_id);

  // Outgoing edges ordered by child begin, stable on edge order.
  std::vector<const Edge*> out_edges(std::string_view node_id) const;
  std::vector<const Edge*> in_edges(std::string_view node_id) const;
  const Edge* primary_in(std::string_view node_id) const;
  bool is_leaf(std::string_view node_id) const;
  // Nodes reachable from root along primary edges, parents before children.
  std::vector<std::string> primary_preorder() const;
  std::vector<std::string> leaves_in_order() const;

  void remove_node(std::string_view node_id);  // also drops incident edges
};

// Same nodes and same edge multiset, ignoring edge order.
bool equivalent(const Dag& a, const Dag& b);

// A raw tree: phantoms kept as nodes without content, every edge primary.
Dag load_alpino(std::string_view xml, std::string sample_id = {});
Dag load_alpino_file(const std::string& path);

Dag collapse_phantoms(Dag d);

// Secondary edges are written as phantom copies carrying the shared index.
std::string write_alpino(const Dag& d);
std::string write_dot(const Dag& d);

}  // namespace mill
