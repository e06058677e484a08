#include "mill/typelang.hpp"

#include <map>
#include <sstream>

namespace mill {

namespace {

constexpr std::string_view kOpen = "⟨";
constexpr std::string_view kJoin = "·";
constexpr std::string_view kClose = "⟩";

Type build(const SymbolSeq& s, std::size_t& i, const Vocabulary& vocab) {
  if (i >= s.size())
    throw SequenceError(SequenceError::Kind::incomplete, i,
                        "incomplete: expected a symbol at position " + std::to_string(i));
  std::size_t here = i++;
  const std::string& tok = s[here];
  int arity = token_arity(tok);
  if (arity > 0) {
    std::string_view tv = tok;
    if (tv.substr(0, kArrow.size()) == kArrow || tv.substr(0, 2) == "->") {
      std::string label(tv.substr(tv.substr(0, kArrow.size()) == kArrow ? kArrow.size() : 2));
      if (!label.empty() && !vocab.has_label(label))
        throw SequenceError(SequenceError::Kind::unknown_symbol, here,
                            "unknown symbol '" + tok + "' at position " + std::to_string(here));
      Type a = build(s, i, vocab);
      Type r = build(s, i, vocab);
      return Type::arrow(std::move(a), std::move(label), std::move(r));
    }
    if (tok == kStar || tok == "*") return Type::star(build(s, i, vocab));
    std::string label(tv.substr(tv.substr(0, kDiamond.size()) == kDiamond ? kDiamond.size() : 2));
    if (!vocab.has_label(label))
      throw SequenceError(SequenceError::Kind::unknown_symbol, here,
                          "unknown symbol '" + tok + "' at position " + std::to_string(here));
    return Type::diamond(std::move(label), build(s, i, vocab));
  }
  if (!vocab.has_atom(tok))
    throw SequenceError(SequenceError::Kind::unknown_symbol, here,
                        "unknown symbol '" + tok + "' at position " + std::to_string(here));
  return Type::atom(tok);
}

}  // namespace

SymbolSeq atomize(const Type& t) { return polish_tokens(t); }

SymbolSeq atomize_all(const std::vector<Type>& types) {
  SymbolSeq out;
  for (std::size_t i = 0; i < types.size(); ++i) {
    if (i) out.emplace_back(kSeparator);
    auto part = atomize(types[i]);
    out.insert(out.end(), part.begin(), part.end());
  }
  return out;
}

Type deatomize(const SymbolSeq& s, const Vocabulary& vocab) {
  std::size_t i = 0;
  Type t = build(s, i, vocab);
  if (i != s.size())
    throw SequenceError(SequenceError::Kind::trailing, i,
                        "trailing symbol at position " + std::to_string(i));
  return t;
}

bool recognize(const SymbolSeq& s, const Vocabulary& vocab) {
  if (s.empty()) return false;
  long open = 1;
  for (const auto& tok : s) {
    if (open == 0) return false;
    int arity = token_arity(tok);
    if (arity == 0 && !vocab.has_atom(tok)) return false;
    open += arity - 1;
  }
  return open == 0;
}

std::string join_symbols(const SymbolSeq& s) {
  std::string out;
  for (const auto& tok : s) {
    if (!out.empty()) out += ' ';
    out += tok;
  }
  return out;
}

SymbolSeq split_symbols(std::string_view text) {
  SymbolSeq out;
  std::istringstream in{std::string(text)};
  std::string tok;
  while (in >> tok) out.push_back(tok);
  return out;
}

std::string merged_token(const Merge& m) {
  std::string out(kOpen);
  out += m.left;
  out += kJoin;
  out += m.right;
  out += kClose;
  return out;
}

bool is_merged_token(std::string_view token) { return token.substr(0, kOpen.size()) == kOpen; }

namespace {

void merge_in_place(SymbolSeq& s, const Merge& m, const std::string& name) {
  if (m.left == kSeparator || m.right == kSeparator) return;
  SymbolSeq out;
  out.reserve(s.size());
  for (std::size_t i = 0; i < s.size(); ++i) {
    if (i + 1 < s.size() && s[i] == m.left && s[i + 1] == m.right) {
      out.push_back(name);
      ++i;
    } else {
      out.push_back(std::move(s[i]));
    }
  }
  s = std::move(out);
}

}  // namespace

MergeTable learn_merges(const std::vector<SymbolSeq>& corpus, std::optional<std::size_t> n) {
  MergeTable table;
  std::vector<SymbolSeq> work = corpus;
  while (!n || table.size() < *n) {
    std::map<std::pair<std::string, std::string>, long> counts;
    for (const auto& s : work)
      for (std::size_t i = 0; i + 1 < s.size(); ++i)
        if (s[i] != kSeparator && s[i + 1] != kSeparator) ++counts[{s[i], s[i + 1]}];
    if (counts.empty()) break;
    const std::pair<std::string, std::string>* best = nullptr;
    long best_count = 0;
    std::string best_printed;
    for (const auto& [pair, count] : counts) {
      std::string printed = pair.first + " " + pair.second;
      if (!best || count > best_count || (count == best_count && printed < best_printed)) {
        best = &pair;
        best_count = count;
        best_printed = std::move(printed);
      }
    }
    Merge m{best->first, best->second};
    std::string name = merged_token(m);
    for (auto& s : work) merge_in_place(s, m, name);
    table.push_back(std::move(m));
  }
  return table;
}

SymbolSeq apply_merges(SymbolSeq s, const MergeTable& table) {
  for (const auto& m : table) merge_in_place(s, m, merged_token(m));
  return s;
}

SymbolSeq revert_merges(SymbolSeq s, const MergeTable& table) {
  for (auto it = table.rbegin(); it != table.rend(); ++it) {
    std::string name = merged_token(*it);
    SymbolSeq out;
    out.reserve(s.size() + 4);
    for (auto& tok : s) {
      if (tok == name) {
        out.push_back(it->left);
        out.push_back(it->right);
      } else {
        out.push_back(std::move(tok));
      }
    }
    s = std::move(out);
  }
  return s;
}

std::string write_merge_table(const MergeTable& table) {
  std::string out;
  for (const auto& m : table) {
    out += m.left;
    out += '\t';
    out += m.right;
    out += '\n';
  }
  return out;
}

MergeTable read_merge_table(std::string_view text) {
  MergeTable table;
  std::size_t line_no = 0;
  std::size_t pos = 0;
  while (pos < text.size()) {
    std::size_t end = text.find('\n', pos);
    if (end == std::string_view::npos) end = text.size();
    std::string_view line = text.substr(pos, end - pos);
    pos = end + 1;
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    if (line.empty()) continue;
    std::size_t tab = line.find('\t');
    if (tab == std::string_view::npos || tab == 0 || tab + 1 == line.size() ||
        line.find('\t', tab + 1) != std::string_view::npos)
      throw Error(ErrorCode::invalid_argument,
                  "merge table line " + std::to_string(line_no) + ": expected LEFT<TAB>RIGHT");
    table.push_back({std::string(line.substr(0, tab)), std::string(line.substr(tab + 1))});
  }
  return table;
}

}  // namespace mill
