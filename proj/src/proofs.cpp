#include "mill/proofs.hpp"

#include <algorithm>
#include <functional>
#include <map>
#include <set>
#include <sstream>

#include "mill/error.hpp"

namespace mill {

namespace {

std::string polish(const Type& t) { return print_type(t, Notation::polish); }
std::string infix(const Type& t) { return print_type(t, Notation::infix); }

}  // namespace

// ---------------------------------------------------------------------------
// Structures

Structure Structure::leaf(std::string id, Type type) {
  return Structure(Kind::leaf, std::move(id), std::move(type), {});
}

Structure Structure::multiset(std::vector<Structure> items) {
  return Structure(Kind::multiset, {}, std::nullopt, std::move(items));
}

Structure Structure::bracket(std::string label, Structure inner) {
  return Structure(Kind::bracket, std::move(label), std::nullopt, {std::move(inner)});
}

Structure Structure::normalized() const {
  switch (kind_) {
    case Kind::leaf:
      return *this;
    case Kind::bracket:
      return bracket(text_, inner().normalized());
    case Kind::multiset: {
      std::vector<Structure> flat;
      for (const auto& item : items_) {
        Structure n = item.normalized();
        if (n.kind_ == Kind::multiset)
          flat.insert(flat.end(), n.items_.begin(), n.items_.end());
        else
          flat.push_back(std::move(n));
      }
      if (flat.size() == 1) return flat.front();
      return multiset(std::move(flat));
    }
  }
  return *this;
}

std::string Structure::key() const {
  Structure n = normalized();
  switch (n.kind_) {
    case Kind::leaf:
      return n.text_ + ":" + polish(*n.type_);
    case Kind::bracket:
      return "<" + n.inner().key() + ">" + n.text_;
    case Kind::multiset: {
      std::vector<std::string> keys;
      for (const auto& item : n.items_) keys.push_back(item.key());
      std::sort(keys.begin(), keys.end());
      std::string out = "{";
      for (std::size_t i = 0; i < keys.size(); ++i) out += (i ? "," : "") + keys[i];
      return out + "}";
    }
  }
  return {};
}

std::vector<Structure> Structure::top_level() const {
  Structure n = normalized();
  if (n.kind_ == Kind::multiset) return n.items_;
  return {n};
}

namespace {

// Top-level items with nested multisets inlined.
void flatten(const Structure& s, std::vector<const Structure*>& out) {
  if (s.kind() == Structure::Kind::multiset)
    for (const auto& item : s.items()) flatten(item, out);
  else
    out.push_back(&s);
}

}  // namespace

bool operator==(const Structure& a, const Structure& b) {
  std::vector<const Structure*> xs, ys;
  flatten(a, xs);
  flatten(b, ys);
  if (xs.size() != ys.size()) return false;
  if (xs.size() == 1) {
    const Structure& x = *xs.front();
    const Structure& y = *ys.front();
    if (x.kind() != y.kind()) return false;
    if (x.kind() == Structure::Kind::leaf) return x.id() == y.id() && x.type() == y.type();
    return x.label() == y.label() && x.inner() == y.inner();
  }
  std::vector<bool> used(ys.size(), false);
  for (const Structure* x : xs) {
    std::size_t j = 0;
    while (j < ys.size() && (used[j] || !(*x == *ys[j]))) ++j;
    if (j == ys.size()) return false;
    used[j] = true;
  }
  return true;
}

Structure union_of(const Structure& a, const Structure& b) {
  return Structure::multiset({a, b}).normalized();
}

std::string print_structure(const Structure& s) {
  Structure n = s.normalized();
  switch (n.kind()) {
    case Structure::Kind::leaf:
      return n.id();
    case Structure::Kind::bracket:
      return "⟨" + print_structure(n.inner()) + "⟩" + n.label();
    case Structure::Kind::multiset: {
      std::string out;
      for (std::size_t i = 0; i < n.items().size(); ++i) out += (i ? ", " : "") + print_structure(n.items()[i]);
      return out;
    }
  }
  return {};
}

namespace {

struct BracketHit {
  std::size_t count = 0;
  std::string label;
  std::optional<Type> type;
};

// Finds brackets whose sole content is the leaf `id` and replaces them with `replacement`.
Structure replace_bracketed(const Structure& s, const std::string& id, const Structure& replacement,
                            BracketHit& hit) {
  switch (s.kind()) {
    case Structure::Kind::leaf:
      return s;
    case Structure::Kind::bracket: {
      Structure inner = s.inner().normalized();
      if (inner.kind() == Structure::Kind::leaf && inner.id() == id) {
        ++hit.count;
        hit.label = s.label();
        hit.type = inner.type();
        return replacement;
      }
      return Structure::bracket(s.label(), replace_bracketed(s.inner(), id, replacement, hit));
    }
    case Structure::Kind::multiset: {
      std::vector<Structure> items;
      for (const auto& item : s.items()) items.push_back(replace_bracketed(item, id, replacement, hit));
      return Structure::multiset(std::move(items));
    }
  }
  return s;
}

}  // namespace

// ---------------------------------------------------------------------------
// Proof construction

const char* rule_name(Rule r) {
  switch (r) {
    case Rule::ax: return "ax";
    case Rule::lex: return "lex";
    case Rule::elim: return "elim";
    case Rule::intro: return "intro";
    case Rule::diamond_intro: return "dia-intro";
    case Rule::diamond_elim: return "dia-elim";
  }
  return "?";
}

namespace {

// Braced lists of proofs would copy each subtree.
std::vector<Proof> children(Proof first) {
  std::vector<Proof> out;
  out.push_back(std::move(first));
  return out;
}

std::vector<Proof> children(Proof first, Proof second) {
  std::vector<Proof> out;
  out.reserve(2);
  out.push_back(std::move(first));
  out.push_back(std::move(second));
  return out;
}

}  // namespace

Proof Proof::ax(std::string id, Type type, std::string label) {
  Proof p{Rule::ax, {Structure::leaf(std::move(id), type), type}, {}, std::nullopt, std::move(label), std::nullopt};
  return p;
}

Proof Proof::lex(std::string id, Type type, std::optional<std::string> word) {
  return Proof{Rule::lex, {Structure::leaf(std::move(id), type), type}, {}, std::nullopt, {}, std::move(word)};
}

Proof Proof::elim(Proof functor, Proof argument) {
  const Type& f = functor.conclusion.succedent;
  if (!f.is_arrow()) throw Error(ErrorCode::check, "elimination needs an arrow, got " + infix(f));
  Judgement j{union_of(functor.conclusion.antecedent, argument.conclusion.antecedent), f.result()};
  return Proof{Rule::elim, std::move(j), children(std::move(functor), std::move(argument)), std::nullopt, {},
               std::nullopt};
}

Proof Proof::intro(std::string binder, Type conclusion, Proof body) {
  std::vector<Structure> rest;
  for (auto& item : body.conclusion.antecedent.top_level())
    if (!(item.kind() == Structure::Kind::leaf && item.id() == binder)) rest.push_back(std::move(item));
  Judgement j{Structure::multiset(std::move(rest)).normalized(), std::move(conclusion)};
  return Proof{Rule::intro, std::move(j), children(std::move(body)), std::move(binder), {}, std::nullopt};
}

Proof Proof::diamond_intro(std::string label, Proof body) {
  Judgement j{Structure::bracket(label, body.conclusion.antecedent), Type::diamond(label, body.conclusion.succedent)};
  return Proof{Rule::diamond_intro, std::move(j), children(std::move(body)), std::nullopt, std::move(label),
               std::nullopt};
}

Proof Proof::diamond_elim(std::string binder, Proof diamond, Proof body) {
  const Type& d = diamond.conclusion.succedent;
  if (!d.is_diamond()) throw Error(ErrorCode::check, "diamond elimination needs a diamond, got " + infix(d));
  BracketHit hit;
  Structure ant = replace_bracketed(body.conclusion.antecedent, binder, diamond.conclusion.antecedent, hit);
  Judgement j{ant.normalized(), body.conclusion.succedent};
  std::string label = d.label();
  return Proof{Rule::diamond_elim, std::move(j), children(std::move(diamond), std::move(body)), std::move(binder),
               std::move(label), std::nullopt};
}

// ---------------------------------------------------------------------------
// Checking

const char* to_string(CheckFailure f) {
  switch (f) {
    case CheckFailure::malformed: return "malformed";
    case CheckFailure::type_mismatch: return "type mismatch";
    case CheckFailure::label_mismatch: return "label mismatch";
    case CheckFailure::bracket_mismatch: return "bracket mismatch";
    case CheckFailure::antecedent_mismatch: return "antecedent mismatch";
    case CheckFailure::unused_hypothesis: return "unused hypothesis";
    case CheckFailure::duplicated_hypothesis: return "duplicated hypothesis";
  }
  return "?";
}

std::string CheckReport::path_string() const {
  std::string out = "root";
  for (auto i : path) out += "." + std::to_string(i);
  return out;
}

std::string CheckReport::describe() const {
  return path_string() + ": " + to_string(failure) + ": " + message;
}

namespace {

class Checker {
 public:
  std::optional<CheckReport> run(const Proof& root) {
    if (auto r = collect(root)) return r;
    return visit(root);
  }

 private:
  std::optional<CheckReport> fail(CheckFailure f, std::string message) const {
    return CheckReport{f, path_, std::move(message)};
  }

  std::optional<CheckReport> collect(const Proof& p) {
    if (p.rule == Rule::ax || p.rule == Rule::lex) {
      auto top = p.conclusion.antecedent.top_level();
      if (top.size() != 1 || top.front().kind() != Structure::Kind::leaf)
        return fail(CheckFailure::malformed, "leaf antecedent must be a single premise");
      const std::string& id = top.front().id();
      if (!seen_.insert(id).second) return fail(CheckFailure::duplicated_hypothesis, "premise " + id + " occurs twice");
      if (p.rule == Rule::ax) hypotheses_[id] = p.label;
    }
    for (std::size_t i = 0; i < p.premises.size(); ++i) {
      path_.push_back(i);
      auto r = collect(p.premises[i]);
      path_.pop_back();
      if (r) return r;
    }
    return std::nullopt;
  }

  std::optional<CheckReport> visit(const Proof& p) {
    for (std::size_t i = 0; i < p.premises.size(); ++i) {
      path_.push_back(i);
      auto r = visit(p.premises[i]);
      path_.pop_back();
      if (r) return r;
    }
    return node(p);
  }

  std::optional<CheckReport> arity(const Proof& p, std::size_t n) const {
    if (p.premises.size() != n)
      return fail(CheckFailure::malformed, std::string(rule_name(p.rule)) + " expects " + std::to_string(n) +
                                                " premise(s), got " + std::to_string(p.premises.size()));
    return std::nullopt;
  }

  std::optional<CheckReport> node(const Proof& p) {
    const auto& ant = p.conclusion.antecedent;
    const Type& succ = p.conclusion.succedent;
    switch (p.rule) {
      case Rule::ax:
      case Rule::lex: {
        if (auto r = arity(p, 0)) return r;
        const Structure leaf = ant.top_level().front();
        if (!(leaf.type() == succ))
          return fail(CheckFailure::type_mismatch, "premise " + leaf.id() + " has type " + infix(leaf.type()) +
                                                       " but concludes " + infix(succ));
        return std::nullopt;
      }
      case Rule::elim: {
        if (auto r = arity(p, 2)) return r;
        const Proof& f = p.premises[0];
        const Proof& a = p.premises[1];
        const Type& ft = f.conclusion.succedent;
        if (!ft.is_arrow()) return fail(CheckFailure::type_mismatch, "functor concludes " + infix(ft));
        if (!(ft.argument() == a.conclusion.succedent))
          return fail(CheckFailure::type_mismatch, "functor expects " + infix(ft.argument()) + ", argument is " +
                                                       infix(a.conclusion.succedent));
        if (a.rule == Rule::ax && a.label != ft.label())
          return fail(CheckFailure::label_mismatch, "hypothesis slot " + quote(a.label) + " fills " + quote(ft.label()));
        if (!(ft.result() == succ))
          return fail(CheckFailure::type_mismatch, "expected " + infix(ft.result()) + ", concluded " + infix(succ));
        if (!(union_of(f.conclusion.antecedent, a.conclusion.antecedent) == ant))
          return fail(CheckFailure::antecedent_mismatch, "antecedent is not the union of the premises");
        return std::nullopt;
      }
      case Rule::intro: {
        if (auto r = arity(p, 1)) return r;
        if (!p.binder) return fail(CheckFailure::malformed, "intro without binder");
        const std::string& x = *p.binder;
        auto it = hypotheses_.find(x);
        if (it == hypotheses_.end()) return fail(CheckFailure::malformed, x + " is not a hypothesis");
        const Proof& body = p.premises[0];
        if (!succ.is_arrow()) return fail(CheckFailure::type_mismatch, "intro concludes " + infix(succ));
        if (!(succ.result() == body.conclusion.succedent))
          return fail(CheckFailure::type_mismatch, "body concludes " + infix(body.conclusion.succedent) +
                                                       ", arrow needs " + infix(succ.result()));
        std::vector<Structure> rest;
        std::optional<Type> found;
        for (auto& item : body.conclusion.antecedent.top_level()) {
          if (!found && item.kind() == Structure::Kind::leaf && item.id() == x)
            found = item.type();
          else
            rest.push_back(std::move(item));
        }
        if (!found) return fail(CheckFailure::unused_hypothesis, "hypothesis " + x + " is not in the body's antecedent");
        if (!(*found == succ.argument()))
          return fail(CheckFailure::type_mismatch, "hypothesis " + x + " has type " + infix(*found) +
                                                       ", arrow needs " + infix(succ.argument()));
        if (it->second != succ.label())
          return fail(CheckFailure::label_mismatch,
                      "hypothesis " + x + " has slot " + quote(it->second) + ", arrow has " + quote(succ.label()));
        if (!(Structure::multiset(std::move(rest)) == ant))
          return fail(CheckFailure::antecedent_mismatch, "antecedent differs from the body's minus " + x);
        return std::nullopt;
      }
      case Rule::diamond_intro: {
        if (auto r = arity(p, 1)) return r;
        const Proof& body = p.premises[0];
        if (!succ.is_diamond() || succ.label() != p.label || !(succ.inner() == body.conclusion.succedent))
          return fail(CheckFailure::type_mismatch, "expected ◇" + p.label + " over " +
                                                       infix(body.conclusion.succedent) + ", concluded " + infix(succ));
        Structure n = ant.normalized();
        if (n.kind() != Structure::Kind::bracket)
          return fail(CheckFailure::bracket_mismatch, "antecedent is not bracketed");
        if (n.label() != p.label)
          return fail(CheckFailure::bracket_mismatch, "bracket " + n.label() + " wraps a ◇" + p.label + " introduction");
        if (!(n.inner() == body.conclusion.antecedent))
          return fail(CheckFailure::antecedent_mismatch, "bracket contents differ from the body's antecedent");
        return std::nullopt;
      }
      case Rule::diamond_elim: {
        if (auto r = arity(p, 2)) return r;
        if (!p.binder) return fail(CheckFailure::malformed, "dia-elim without binder");
        const std::string& y = *p.binder;
        if (!hypotheses_.count(y)) return fail(CheckFailure::malformed, y + " is not a hypothesis");
        const Proof& d = p.premises[0];
        const Proof& body = p.premises[1];
        const Type& dt = d.conclusion.succedent;
        if (!dt.is_diamond()) return fail(CheckFailure::type_mismatch, "first premise concludes " + infix(dt));
        if (!p.label.empty() && p.label != dt.label())
          return fail(CheckFailure::label_mismatch, "rule labeled " + p.label + " eliminates ◇" + dt.label());
        if (!(body.conclusion.succedent == succ))
          return fail(CheckFailure::type_mismatch, "body concludes " + infix(body.conclusion.succedent));
        BracketHit hit;
        Structure replaced = replace_bracketed(body.conclusion.antecedent, y, d.conclusion.antecedent, hit);
        if (hit.count == 0) return fail(CheckFailure::unused_hypothesis, "no bracketed " + y + " in the body");
        if (hit.count > 1) return fail(CheckFailure::duplicated_hypothesis, y + " is bracketed more than once");
        if (hit.label != dt.label())
          return fail(CheckFailure::bracket_mismatch, "bracket " + hit.label + " around " + y + ", eliminating ◇" + dt.label());
        if (!(*hit.type == dt.inner()))
          return fail(CheckFailure::type_mismatch, y + " has type " + infix(*hit.type) + ", ◇ holds " + infix(dt.inner()));
        if (!(replaced == ant)) return fail(CheckFailure::antecedent_mismatch, "substituted antecedent differs");
        return std::nullopt;
      }
    }
    return fail(CheckFailure::malformed, "unknown rule");
  }

  static std::string quote(const std::string& s) { return "'" + s + "'"; }

  std::vector<std::size_t> path_;
  std::set<std::string> seen_;
  std::map<std::string, std::string> hypotheses_;
};

}  // namespace

std::optional<CheckReport> check(const Proof& p) { return Checker{}.run(p); }

// ---------------------------------------------------------------------------
// Terms

Term::Ptr Term::var(std::string name) {
  return Ptr(new Term(Kind::var, std::move(name), {}, nullptr, nullptr));
}
Term::Ptr Term::constant(std::string word) {
  return Ptr(new Term(Kind::constant, std::move(word), {}, nullptr, nullptr));
}
Term::Ptr Term::app(Ptr function, Ptr argument) {
  return Ptr(new Term(Kind::app, {}, {}, std::move(function), std::move(argument)));
}
Term::Ptr Term::abs(std::string name, Ptr body) {
  return Ptr(new Term(Kind::abs, std::move(name), {}, std::move(body), nullptr));
}
Term::Ptr Term::modal_intro(std::string label, Ptr body) {
  return Ptr(new Term(Kind::modal_intro, {}, std::move(label), std::move(body), nullptr));
}
Term::Ptr Term::modal_elim(std::string label, std::string name, Ptr source, Ptr body) {
  return Ptr(new Term(Kind::modal_elim, std::move(name), std::move(label), std::move(source), std::move(body)));
}

Term::Ptr term_of(const Proof& p) {
  switch (p.rule) {
    case Rule::ax:
      return Term::var(p.conclusion.antecedent.top_level().front().id());
    case Rule::lex:
      return Term::constant(p.word ? *p.word : p.conclusion.antecedent.top_level().front().id());
    case Rule::elim:
      return Term::app(term_of(p.premises.at(0)), term_of(p.premises.at(1)));
    case Rule::intro:
      return Term::abs(p.binder.value_or("?"), term_of(p.premises.at(0)));
    case Rule::diamond_intro:
      return Term::modal_intro(p.label, term_of(p.premises.at(0)));
    case Rule::diamond_elim:
      return Term::modal_elim(p.premises.at(0).conclusion.succedent.label(), p.binder.value_or("?"),
                              term_of(p.premises.at(0)), term_of(p.premises.at(1)));
  }
  throw Error(ErrorCode::check, "unknown rule");
}

namespace {

bool atomic(const Term::Ptr& t) { return t->kind() == Term::Kind::var || t->kind() == Term::Kind::constant; }

std::string wrapped(const Term::Ptr& t) {
  std::string s = print_term(t);
  return atomic(t) ? " " + s : "(" + s + ")";
}

}  // namespace

std::string print_term(const Term::Ptr& t) {
  switch (t->kind()) {
    case Term::Kind::var:
    case Term::Kind::constant:
      return t->name();
    case Term::Kind::app: {
      const auto& f = t->first();
      std::string fs = print_term(f);
      if (f->kind() == Term::Kind::app || f->kind() == Term::Kind::abs || f->kind() == Term::Kind::modal_elim)
        fs = "(" + fs + ")";
      return fs + wrapped(t->second());
    }
    case Term::Kind::abs: {
      std::string body = print_term(t->first());
      return "λ" + t->name() + "." + (atomic(t->first()) ? body : "(" + body + ")");
    }
    case Term::Kind::modal_intro:
      return "▵" + t->label() + wrapped(t->first());
    case Term::Kind::modal_elim:
      return "let ▿" + t->label() + " " + t->name() + " = " + print_term(t->first()) + " in " + print_term(t->second());
  }
  return {};
}

Type embed_modal(const Type& t) {
  switch (t.kind()) {
    case Type::Kind::atom:
      return t;
    case Type::Kind::arrow: {
      Type arg = embed_modal(t.argument());
      if (!t.label().empty()) arg = Type::diamond(t.label(), arg);
      return Type::arrow(arg, "", embed_modal(t.result()));
    }
    case Type::Kind::star:
      return Type::star(embed_modal(t.inner()));
    case Type::Kind::diamond:
      return Type::diamond(t.label(), embed_modal(t.inner()));
  }
  return t;
}

// ---------------------------------------------------------------------------
// S-expression format

namespace {

struct SExpr {
  bool is_list = false;
  bool quoted = false;
  std::string atom;
  std::vector<SExpr> items;
  std::size_t line = 1;
};

class SExprReader {
 public:
  explicit SExprReader(std::string_view text) : text_(text) {}

  std::vector<SExpr> read_all() {
    std::vector<SExpr> out;
    for (skip(); pos_ < text_.size(); skip()) out.push_back(read());
    return out;
  }

 private:
  [[noreturn]] void error(const std::string& message) const {
    throw Error(ErrorCode::structure, "line " + std::to_string(line_) + ": " + message);
  }

  void skip() {
    while (pos_ < text_.size()) {
      char c = text_[pos_];
      if (c == ';') {
        while (pos_ < text_.size() && text_[pos_] != '\n') ++pos_;
      } else if (c == ' ' || c == '\t' || c == '\r' || c == '\n') {
        if (c == '\n') ++line_;
        ++pos_;
      } else {
        break;
      }
    }
  }

  SExpr read() {
    skip();
    if (pos_ >= text_.size()) error("unexpected end of input");
    SExpr e;
    e.line = line_;
    char c = text_[pos_];
    if (c == ')') error("unbalanced ')'");
    if (c == '(') {
      ++pos_;
      e.is_list = true;
      for (skip(); pos_ < text_.size() && text_[pos_] != ')'; skip()) e.items.push_back(read());
      if (pos_ >= text_.size()) error("missing ')'");
      ++pos_;
      return e;
    }
    if (c == '"') {
      ++pos_;
      e.quoted = true;
      while (pos_ < text_.size() && text_[pos_] != '"') {
        if (text_[pos_] == '\\' && pos_ + 1 < text_.size()) ++pos_;
        if (text_[pos_] == '\n') ++line_;
        e.atom += text_[pos_++];
      }
      if (pos_ >= text_.size()) error("unterminated string");
      ++pos_;
      return e;
    }
    while (pos_ < text_.size()) {
      char d = text_[pos_];
      if (d == '(' || d == ')' || d == '"' || d == ';' || d == ' ' || d == '\t' || d == '\r' || d == '\n') break;
      e.atom += d;
      ++pos_;
    }
    return e;
  }

  std::string_view text_;
  std::size_t pos_ = 0;
  std::size_t line_ = 1;
};

std::string quote_atom(const std::string& s) {
  bool plain = !s.empty() && s.front() != ':';
  for (char c : s)
    if (c == '(' || c == ')' || c == '"' || c == ';' || c == ' ' || c == '\t' || c == '\n' || c == '\\') plain = false;
  if (plain) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"' || c == '\\') out += '\\';
    out += c;
  }
  return out + "\"";
}

std::string quote_string(const std::string& s) {
  std::string out = "\"";
  for (char c : s) {
    if (c == '"' || c == '\\') out += '\\';
    out += c;
  }
  return out + "\"";
}

std::string write_items(const Structure& s);

std::string write_item(const Structure& s) {
  if (s.kind() == Structure::Kind::leaf) return "(: " + quote_atom(s.id()) + " " + quote_string(infix(s.type())) + ")";
  if (s.kind() == Structure::Kind::bracket) {
    std::string inner = write_items(s.inner());
    return "(<> " + quote_atom(s.label()) + (inner.empty() ? "" : " " + inner) + ")";
  }
  return write_items(s);
}

std::string write_items(const Structure& s) {
  std::string out;
  for (const auto& item : s.top_level()) out += (out.empty() ? "" : " ") + write_item(item);
  return out;
}

void write_node(const Proof& p, int depth, std::ostringstream& os) {
  os << std::string(depth * 2, ' ') << '(' << rule_name(p.rule);
  if (p.binder) os << " :binder " << quote_atom(*p.binder);
  if (!p.label.empty()) os << " :label " << quote_atom(p.label);
  if (p.word) os << " :word " << quote_atom(*p.word);
  os << " (|- (" << write_items(p.conclusion.antecedent) << ") " << quote_string(infix(p.conclusion.succedent)) << ')';
  for (const auto& child : p.premises) {
    os << '\n';
    write_node(child, depth + 1, os);
  }
  os << ')';
}

class ProofBuilder {
 public:
  explicit ProofBuilder(const Vocabulary& vocab) : vocab_(vocab) {}

  Proof proof(const SExpr& e) const {
    if (!e.is_list || e.items.empty() || e.items[0].is_list) error(e, "expected (rule ...)");
    static const std::map<std::string, Rule, std::less<>> rules{
        {"ax", Rule::ax},       {"lex", Rule::lex},
        {"elim", Rule::elim},   {"intro", Rule::intro},
        {"dia-intro", Rule::diamond_intro}, {"dia-elim", Rule::diamond_elim}};
    auto rit = rules.find(e.items[0].atom);
    if (rit == rules.end()) error(e, "unknown rule '" + e.items[0].atom + "'");
    std::optional<std::string> binder, word;
    std::string label;
    std::size_t i = 1;
    while (i < e.items.size() && !e.items[i].is_list && !e.items[i].quoted && !e.items[i].atom.empty() &&
           e.items[i].atom.front() == ':') {
      if (i + 1 >= e.items.size() || e.items[i + 1].is_list) error(e, "keyword " + e.items[i].atom + " needs a value");
      const std::string& k = e.items[i].atom;
      const std::string& v = e.items[i + 1].atom;
      if (k == ":binder")
        binder = v;
      else if (k == ":label")
        label = v;
      else if (k == ":word")
        word = v;
      else
        error(e, "unknown keyword " + k);
      i += 2;
    }
    if (i >= e.items.size()) error(e, "missing judgement");
    Judgement j = judgement(e.items[i++]);
    std::vector<Proof> children;
    for (; i < e.items.size(); ++i) children.push_back(proof(e.items[i]));
    return Proof{rit->second, std::move(j), std::move(children), std::move(binder), std::move(label), std::move(word)};
  }

 private:
  [[noreturn]] static void error(const SExpr& e, const std::string& message) {
    throw Error(ErrorCode::structure, "line " + std::to_string(e.line) + ": " + message);
  }

  Type type(const SExpr& e) const {
    if (e.is_list) error(e, "expected a quoted type");
    try {
      return parse_type(e.atom, Notation::infix, vocab_);
    } catch (const Error& err) {
      error(e, std::string("bad type: ") + err.what());
    }
  }

  Judgement judgement(const SExpr& e) const {
    if (!e.is_list || e.items.size() != 3 || e.items[0].is_list || e.items[0].atom != "|-" || !e.items[1].is_list)
      error(e, "expected (|- (items...) \"type\")");
    return Judgement{items(e.items[1].items), type(e.items[2])};
  }

  Structure items(const std::vector<SExpr>& list) const {
    std::vector<Structure> out;
    for (const auto& item : list) out.push_back(structure(item));
    return Structure::multiset(std::move(out)).normalized();
  }

  Structure structure(const SExpr& e) const {
    if (!e.is_list || e.items.empty() || e.items[0].is_list) error(e, "expected (: id \"type\") or (<> label ...)");
    const std::string& head = e.items[0].atom;
    if (head == ":") {
      if (e.items.size() != 3 || e.items[1].is_list) error(e, "expected (: id \"type\")");
      return Structure::leaf(e.items[1].atom, type(e.items[2]));
    }
    if (head == "<>") {
      if (e.items.size() < 2 || e.items[1].is_list) error(e, "expected (<> label items...)");
      return Structure::bracket(e.items[1].atom, items({e.items.begin() + 2, e.items.end()}));
    }
    error(e, "unknown structure item '" + head + "'");
  }

  const Vocabulary& vocab_;
};

}  // namespace

std::string write_proof(const Proof& p) {
  std::ostringstream os;
  write_node(p, 0, os);
  os << '\n';
  return os.str();
}

std::vector<Proof> read_proofs(std::string_view text, const Vocabulary& vocab) {
  ProofBuilder builder(vocab);
  std::vector<Proof> out;
  for (const auto& e : SExprReader(text).read_all()) out.push_back(builder.proof(e));
  return out;
}

Proof read_proof(std::string_view text, const Vocabulary& vocab) {
  auto proofs = read_proofs(text, vocab);
  if (proofs.size() != 1)
    throw Error(ErrorCode::structure, "expected one proof, found " + std::to_string(proofs.size()));
  return std::move(proofs.front());
}

}  // namespace mill
