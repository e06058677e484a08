#include "mill/types.hpp"

#include <algorithm>
#include <map>
#include <sstream>

#include "mill/error.hpp"

namespace mill {

const char* to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::lexing: return "lexing";
    case ErrorCode::structure: return "structure";
    case ErrorCode::invalid_argument: return "invalid_argument";
    case ErrorCode::schema: return "schema";
    case ErrorCode::pipeline: return "pipeline";
    case ErrorCode::extraction: return "extraction";
    case ErrorCode::skipped: return "skipped";
    case ErrorCode::ambiguous: return "ambiguous";
    case ErrorCode::unsupported: return "unsupported";
    case ErrorCode::check: return "check";
    case ErrorCode::io: return "io";
    case ErrorCode::underivable: return "underivable";
  }
  return "unknown";
}

struct Type::Node {
  Kind kind;
  std::string text;  // atom name or label
  std::vector<Type> kids;
  std::size_t hash;
};

namespace {

std::size_t mix(std::size_t seed, std::size_t v) {
  return seed ^ (v + 0x9e3779b97f4a7c15ULL + (seed << 6) + (seed >> 2));
}

}  // namespace

Type Type::atom(std::string name) {
  auto h = mix(std::hash<std::string>{}(name), 0);
  return Type(std::make_shared<const Node>(Node{Kind::atom, std::move(name), {}, h}));
}

Type Type::arrow(Type argument, std::string label, Type result) {
  auto h = mix(mix(mix(1, std::hash<std::string>{}(label)), argument.hash()), result.hash());
  return Type(std::make_shared<const Node>(
      Node{Kind::arrow, std::move(label), {std::move(argument), std::move(result)}, h}));
}

Type Type::star(Type inner) {
  if (inner.is_star()) throw Error(ErrorCode::structure, "nested star");
  auto h = mix(2, inner.hash());
  return Type(std::make_shared<const Node>(Node{Kind::star, {}, {std::move(inner)}, h}));
}

Type Type::diamond(std::string label, Type inner) {
  auto h = mix(mix(3, std::hash<std::string>{}(label)), inner.hash());
  return Type(std::make_shared<const Node>(
      Node{Kind::diamond, std::move(label), {std::move(inner)}, h}));
}

Type::Kind Type::kind() const noexcept { return node_->kind; }

const std::string& Type::name() const {
  if (!is_atom()) throw Error(ErrorCode::invalid_argument, "not an atom");
  return node_->text;
}

const std::string& Type::label() const {
  if (!is_arrow() && !is_diamond()) throw Error(ErrorCode::invalid_argument, "type has no label");
  return node_->text;
}

const Type& Type::argument() const {
  if (!is_arrow()) throw Error(ErrorCode::invalid_argument, "not an arrow");
  return node_->kids[0];
}

const Type& Type::result() const {
  if (!is_arrow()) throw Error(ErrorCode::invalid_argument, "not an arrow");
  return node_->kids[1];
}

const Type& Type::inner() const {
  if (!is_star() && !is_diamond()) throw Error(ErrorCode::invalid_argument, "not a unary type");
  return node_->kids[0];
}

std::size_t Type::hash() const noexcept { return node_->hash; }

bool operator==(const Type& a, const Type& b) noexcept {
  if (a.node_ == b.node_) return true;
  if (a.node_->hash != b.node_->hash || a.node_->kind != b.node_->kind ||
      a.node_->text != b.node_->text || a.node_->kids.size() != b.node_->kids.size())
    return false;
  for (std::size_t i = 0; i < a.node_->kids.size(); ++i)
    if (!(a.node_->kids[i] == b.node_->kids[i])) return false;
  return true;
}

std::strong_ordering operator<=>(const Type& a, const Type& b) noexcept {
  if (a.node_ == b.node_) return std::strong_ordering::equal;
  if (auto c = a.node_->kind <=> b.node_->kind; c != 0) return c;
  if (auto c = a.node_->text <=> b.node_->text; c != 0) return c;
  for (std::size_t i = 0; i < a.node_->kids.size(); ++i)
    if (auto c = a.node_->kids[i] <=> b.node_->kids[i]; c != 0) return c;
  return std::strong_ordering::equal;
}

std::ostream& operator<<(std::ostream& os, const Type& t) {
  return os << print_type(t, Notation::infix);
}

const Vocabulary& Vocabulary::standard() {
  static const Vocabulary v{
      {"ADJ", "BW", "LET", "LID", "N", "SPEC", "TSW", "TW", "VG", "VNW", "VZ", "WW",
       "ADV", "AHI", "AP", "CP", "DETP", "INF", "NP", "OTI", "PP", "PPART", "PPRES", "REL",
       "S_MAIN", "S_SUB", "SV1", "SVAN", "TI", "WHQ", "WHREL", "WHSUB", "S", "_DET", "_CRD"},
      {"app", "whd_body", "rhd_body", "body", "cmp", "cnj", "crd", "invdet", "hdf", "ld",
       "me", "mod", "obcomp", "obj1", "obj2", "pc", "pobj1", "predc", "predm", "se", "su",
       "sup", "svp", "vc", "tag", "obj", "det", "pobj"}};
  return v;
}

ObliquenessPoset::ObliquenessPoset(std::vector<std::vector<std::string>> ranks)
    : ranks_(std::move(ranks)) {
  std::set<std::string> seen;
  for (const auto& rank : ranks_)
    for (const auto& label : rank)
      if (!seen.insert(label).second)
        throw Error(ErrorCode::invalid_argument, "label ranked twice: " + label);
}

std::optional<std::size_t> ObliquenessPoset::rank(std::string_view label) const {
  for (std::size_t i = 0; i < ranks_.size(); ++i)
    for (const auto& l : ranks_[i])
      if (l == label) return i;
  return std::nullopt;
}

const ObliquenessPoset& ObliquenessPoset::standard() {
  static const ObliquenessPoset p({{"cnj"},
                                   {"invdet"},
                                   {"su"},
                                   {"pobj", "pobj1"},
                                   {"obj1"},
                                   {"predc", "obj2", "se", "pc", "hdf"},
                                   {"ld", "me", "vc"},
                                   {"svp"},
                                   {"whd_body", "rhd_body", "body"},
                                   {"app", "predm", "mod"}});
  return p;
}

const CoordinatorBias& CoordinatorBias::standard() {
  static const CoordinatorBias b{{{"S_MAIN", "S_SUB", "SV1", "S", "WHQ", "WHSUB", "WHREL", "SVAN"},
                                  {"NP", "N", "SPEC"},
                                  {"AP", "ADJ", "PPART", "PPRES"}}};
  return b;
}

// ---------------------------------------------------------------- printing

namespace {

void print_infix(const Type& t, std::string& out);

void print_operand(const Type& t, std::string& out) {
  if (t.is_arrow()) {
    out += '(';
    print_infix(t, out);
    out += ')';
  } else {
    print_infix(t, out);
  }
}

void print_infix(const Type& t, std::string& out) {
  switch (t.kind()) {
    case Type::Kind::atom:
      out += t.name();
      break;
    case Type::Kind::arrow:
      print_operand(t.argument(), out);
      out += ' ';
      out += kArrow;
      out += t.label();
      out += ' ';
      print_infix(t.result(), out);
      break;
    case Type::Kind::star:
      out += kStar;
      print_operand(t.inner(), out);
      break;
    case Type::Kind::diamond:
      out += kDiamond;
      out += t.label();
      out += ' ';
      print_operand(t.inner(), out);
      break;
  }
}

void collect_polish(const Type& t, std::vector<std::string>& out) {
  switch (t.kind()) {
    case Type::Kind::atom:
      out.push_back(t.name());
      break;
    case Type::Kind::arrow:
      out.push_back(std::string(kArrow) + t.label());
      collect_polish(t.argument(), out);
      collect_polish(t.result(), out);
      break;
    case Type::Kind::star:
      out.emplace_back(kStar);
      collect_polish(t.inner(), out);
      break;
    case Type::Kind::diamond:
      out.push_back(std::string(kDiamond) + t.label());
      collect_polish(t.inner(), out);
      break;
  }
}

}  // namespace

std::vector<std::string> polish_tokens(const Type& t) {
  std::vector<std::string> out;
  collect_polish(t, out);
  return out;
}

std::string print_type(const Type& t, Notation notation) {
  std::string out;
  if (notation == Notation::infix) {
    print_infix(t, out);
    return out;
  }
  for (const auto& tok : polish_tokens(t)) {
    if (!out.empty()) out += ' ';
    out += tok;
  }
  return out;
}

// ---------------------------------------------------------------- parsing

namespace {

bool starts_with(std::string_view s, std::string_view prefix) {
  return s.substr(0, prefix.size()) == prefix;
}

bool ident_char(char c) {
  return (c >= 'A' && c <= 'Z') || (c >= 'a' && c <= 'z') || (c >= '0' && c <= '9') || c == '_';
}

struct Token {
  enum Kind { ident, arrow, star, diamond, lparen, rparen, end } kind;
  std::string text;  // ident name or connective label
  std::size_t pos;
};

class InfixLexer {
 public:
  InfixLexer(std::string_view src, const Vocabulary& vocab) : src_(src), vocab_(vocab) {}

  std::vector<Token> run() {
    std::vector<Token> out;
    while (true) {
      skip_space();
      if (i_ >= src_.size()) break;
      std::size_t start = i_;
      std::string_view rest = src_.substr(i_);
      if (starts_with(rest, kArrow) || starts_with(rest, "->")) {
        i_ += starts_with(rest, kArrow) ? kArrow.size() : 2;
        std::string id = read_ident();
        if (id.empty() || vocab_.has_label(id)) {
          out.push_back({Token::arrow, id, start});
        } else if (vocab_.has_atom(id)) {
          // Bare arrow glued to its result atom, e.g. "NP→S".
          out.push_back({Token::arrow, "", start});
          out.push_back({Token::ident, id, start + kArrow.size()});
        } else {
          throw Error(ErrorCode::lexing, "unknown label '" + id + "' at offset " +
                                             std::to_string(start));
        }
      } else if (starts_with(rest, kStar) || rest[0] == '*') {
        i_ += rest[0] == '*' ? 1 : kStar.size();
        out.push_back({Token::star, "", start});
      } else if (starts_with(rest, kDiamond) || starts_with(rest, "<>")) {
        i_ += starts_with(rest, kDiamond) ? kDiamond.size() : 2;
        std::string id = read_ident();
        if (!vocab_.has_label(id))
          throw Error(ErrorCode::lexing, "unknown diamond label '" + id + "' at offset " +
                                             std::to_string(start));
        out.push_back({Token::diamond, id, start});
      } else if (rest[0] == '(') {
        ++i_;
        out.push_back({Token::lparen, "", start});
      } else if (rest[0] == ')') {
        ++i_;
        out.push_back({Token::rparen, "", start});
      } else if (ident_char(rest[0])) {
        std::string id = read_ident();
        if (!vocab_.has_atom(id))
          throw Error(ErrorCode::lexing, "unknown atom '" + id + "' at offset " +
                                             std::to_string(start));
        out.push_back({Token::ident, id, start});
      } else {
        throw Error(ErrorCode::lexing, "unexpected character at offset " + std::to_string(start));
      }
    }
    out.push_back({Token::end, "", src_.size()});
    return out;
  }

 private:
  void skip_space() {
    while (i_ < src_.size() && (src_[i_] == ' ' || src_[i_] == '\t' || src_[i_] == '\n' ||
                                src_[i_] == '\r'))
      ++i_;
  }
  std::string read_ident() {
    std::size_t start = i_;
    while (i_ < src_.size() && ident_char(src_[i_])) ++i_;
    return std::string(src_.substr(start, i_ - start));
  }

  std::string_view src_;
  const Vocabulary& vocab_;
  std::size_t i_ = 0;
};

class InfixParser {
 public:
  explicit InfixParser(std::vector<Token> toks) : toks_(std::move(toks)) {}

  Type run() {
    Type t = type();
    if (peek().kind == Token::rparen)
      throw Error(ErrorCode::structure, "unbalanced parentheses at offset " +
                                            std::to_string(peek().pos));
    if (peek().kind != Token::end)
      throw Error(ErrorCode::structure, "unexpected token at offset " + std::to_string(peek().pos));
    return t;
  }

 private:
  const Token& peek() const { return toks_[i_]; }

  Type type() {
    Type lhs = unary();
    if (peek().kind == Token::arrow) {
      Token op = toks_[i_++];
      if (peek().kind == Token::end || peek().kind == Token::rparen)
        throw Error(ErrorCode::structure, "dangling connective at offset " + std::to_string(op.pos));
      Type rhs = type();
      return Type::arrow(std::move(lhs), op.text, std::move(rhs));
    }
    return lhs;
  }

  Type unary() {
    const Token& t = peek();
    switch (t.kind) {
      case Token::ident:
        ++i_;
        return Type::atom(t.text);
      case Token::lparen: {
        std::size_t open = t.pos;
        ++i_;
        if (peek().kind == Token::rparen)
          throw Error(ErrorCode::structure, "empty parentheses at offset " + std::to_string(open));
        Type inner = type();
        if (peek().kind != Token::rparen)
          throw Error(ErrorCode::structure, "unbalanced parentheses at offset " +
                                                std::to_string(open));
        ++i_;
        return inner;
      }
      case Token::star: {
        std::size_t p = t.pos;
        ++i_;
        if (peek().kind == Token::end || peek().kind == Token::arrow || peek().kind == Token::rparen)
          throw Error(ErrorCode::structure, "dangling connective at offset " + std::to_string(p));
        return Type::star(unary());
      }
      case Token::diamond: {
        Token d = t;
        ++i_;
        if (peek().kind == Token::end || peek().kind == Token::arrow || peek().kind == Token::rparen)
          throw Error(ErrorCode::structure, "dangling connective at offset " + std::to_string(d.pos));
        return Type::diamond(d.text, unary());
      }
      case Token::arrow:
        throw Error(ErrorCode::structure, "dangling connective at offset " + std::to_string(t.pos));
      case Token::rparen:
        throw Error(ErrorCode::structure, "unbalanced parentheses at offset " +
                                              std::to_string(t.pos));
      case Token::end:
        throw Error(ErrorCode::structure, "unexpected end of input");
    }
    throw Error(ErrorCode::structure, "unreachable");
  }

  std::vector<Token> toks_;
  std::size_t i_ = 0;
};

std::vector<std::string> split_ws(std::string_view s) {
  std::vector<std::string> out;
  std::size_t i = 0;
  while (i < s.size()) {
    while (i < s.size() && (s[i] == ' ' || s[i] == '\t' || s[i] == '\n' || s[i] == '\r')) ++i;
    std::size_t start = i;
    while (i < s.size() && !(s[i] == ' ' || s[i] == '\t' || s[i] == '\n' || s[i] == '\r')) ++i;
    if (i > start) out.emplace_back(s.substr(start, i - start));
  }
  return out;
}

Type parse_polish(const std::vector<std::string>& toks, std::size_t& i, const Vocabulary& vocab) {
  if (i >= toks.size())
    throw Error(ErrorCode::structure, "dangling connective: missing operand at symbol " +
                                          std::to_string(i));
  const std::string& tok = toks[i];
  std::size_t here = i++;
  std::string_view tv = tok;
  if (starts_with(tv, kArrow) || starts_with(tv, "->")) {
    std::string label(tv.substr(starts_with(tv, kArrow) ? kArrow.size() : 2));
    if (!label.empty() && !vocab.has_label(label))
      throw Error(ErrorCode::lexing, "unknown label '" + label + "' at symbol " +
                                         std::to_string(here));
    Type a = parse_polish(toks, i, vocab);
    Type r = parse_polish(toks, i, vocab);
    return Type::arrow(std::move(a), std::move(label), std::move(r));
  }
  if (tok == kStar || tok == "*") return Type::star(parse_polish(toks, i, vocab));
  if (starts_with(tv, kDiamond) || starts_with(tv, "<>")) {
    std::string label(tv.substr(starts_with(tv, kDiamond) ? kDiamond.size() : 2));
    if (!vocab.has_label(label))
      throw Error(ErrorCode::lexing, "unknown diamond label '" + label + "' at symbol " +
                                         std::to_string(here));
    return Type::diamond(std::move(label), parse_polish(toks, i, vocab));
  }
  if (!vocab.has_atom(tok))
    throw Error(ErrorCode::lexing, "unknown atom '" + tok + "' at symbol " + std::to_string(here));
  return Type::atom(tok);
}

}  // namespace

int token_arity(std::string_view token) {
  if (starts_with(token, kArrow) || starts_with(token, "->")) return 2;
  if (token == kStar || token == "*") return 1;
  if (starts_with(token, kDiamond) || starts_with(token, "<>")) return 1;
  return 0;
}

Type parse_type(std::string_view text, Notation notation, const Vocabulary& vocab) {
  Type t = [&] {
    if (notation == Notation::infix) {
      bool blank = std::all_of(text.begin(), text.end(), [](char c) { return c == ' ' || c == '\t'; });
      if (blank) throw Error(ErrorCode::structure, "empty type");
      return InfixParser(InfixLexer(text, vocab).run()).run();
    }
    auto toks = split_ws(text);
    if (toks.empty()) throw Error(ErrorCode::structure, "empty type");
    std::size_t i = 0;
    Type r = parse_polish(toks, i, vocab);
    if (i != toks.size())
      throw Error(ErrorCode::structure, "trailing symbol at " + std::to_string(i));
    return r;
  }();
  if (!well_formed(t)) throw Error(ErrorCode::structure, "star outside a coordinator argument");
  return t;
}

// ---------------------------------------------------------------- structure

int order(const Type& t) {
  switch (t.kind()) {
    case Type::Kind::atom: return 0;
    case Type::Kind::arrow: return std::max(order(t.argument()) + 1, order(t.result()));
    case Type::Kind::star:
    case Type::Kind::diamond: return order(t.inner());
  }
  return 0;
}

const Type& final_result(const Type& t) {
  const Type* cur = &t;
  while (true) {
    if (cur->is_arrow()) cur = &cur->result();
    else if (cur->is_star() || cur->is_diamond()) cur = &cur->inner();
    else return *cur;
  }
}

namespace {

bool well_formed_at(const Type& t, bool star_allowed) {
  switch (t.kind()) {
    case Type::Kind::atom: return true;
    case Type::Kind::arrow:
      return well_formed_at(t.argument(), t.label() == kConjunctLabel) &&
             well_formed_at(t.result(), false);
    case Type::Kind::star:
      return star_allowed && !t.inner().is_star() && well_formed_at(t.inner(), false);
    case Type::Kind::diamond: return well_formed_at(t.inner(), false);
  }
  return false;
}

}  // namespace

bool well_formed(const Type& t) { return well_formed_at(t, false); }

Type make_complex(std::vector<Argument> args, Type result, const ObliquenessPoset& poset) {
  struct Keyed {
    long rank;
    std::string label;
    std::string printed;
    Argument arg;
  };
  std::vector<Keyed> keyed;
  keyed.reserve(args.size());
  for (auto& a : args) {
    long rank = -1;
    if (!a.label.empty()) {
      auto r = poset.rank(a.label);
      if (!r) throw Error(ErrorCode::invalid_argument, "label not in obliqueness poset: " + a.label);
      rank = static_cast<long>(*r);
    }
    std::string printed = print_type(a.type, Notation::infix);
    keyed.push_back({rank, a.label, std::move(printed), std::move(a)});
  }
  std::sort(keyed.begin(), keyed.end(), [](const Keyed& x, const Keyed& y) {
    return std::tie(x.rank, x.label, x.printed) < std::tie(y.rank, y.label, y.printed);
  });
  Type out = std::move(result);
  for (auto it = keyed.rbegin(); it != keyed.rend(); ++it)
    out = Type::arrow(it->arg.type, it->arg.label, std::move(out));
  return out;
}

std::pair<std::vector<Argument>, Type> decompose(const Type& t) {
  std::vector<Argument> args;
  const Type* cur = &t;
  while (cur->is_arrow()) {
    args.push_back({cur->argument(), cur->label()});
    cur = &cur->result();
  }
  return {std::move(args), *cur};
}

Type instantiate_coordinator(const std::vector<Type>& conjuncts, const CoordinatorBias& bias) {
  if (conjuncts.size() < 2)
    throw Error(ErrorCode::invalid_argument, "a coordinator needs at least two conjuncts");
  std::vector<Type> distinct;
  std::vector<int> counts;
  for (const auto& c : conjuncts) {
    auto it = std::find(distinct.begin(), distinct.end(), c);
    if (it == distinct.end()) {
      distinct.push_back(c);
      counts.push_back(1);
    } else {
      ++counts[static_cast<std::size_t>(it - distinct.begin())];
    }
  }
  std::string label(kConjunctLabel);
  if (distinct.size() == 1) return Type::arrow(Type::star(distinct[0]), label, distinct[0]);

  int best = *std::max_element(counts.begin(), counts.end());
  std::vector<std::size_t> tied;
  for (std::size_t i = 0; i < distinct.size(); ++i)
    if (counts[i] == best) tied.push_back(i);
  std::size_t chosen = tied.front();
  if (tied.size() > 1) {
    bool found = false;
    for (const auto& group : bias.groups) {
      for (std::size_t i : tied) {
        const Type& r = final_result(distinct[i]);
        if (group.count(r.name())) {
          chosen = i;
          found = true;
          break;
        }
      }
      if (found) break;
    }
  }
  Type out = distinct[chosen];
  for (auto it = distinct.rbegin(); it != distinct.rend(); ++it)
    out = Type::arrow(Type::star(*it), label, std::move(out));
  return out;
}

}  // namespace mill
