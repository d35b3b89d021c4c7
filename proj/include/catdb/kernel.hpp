#pragma once

#include <algorithm>
#include <cstdint>
#include <deque>
#include <functional>
#include <map>
#include <mutex>
#include <optional>
#include <set>
#include <sstream>
#include <stdexcept>
#include <string>
#include <unordered_map>
#include <unordered_set>
#include <utility>
#include <vector>

namespace catdb {

enum class ErrorKind {
  UnknownVariable,
  UnknownSymbol,
  UnknownSort,
  AritySortMismatch,
  SortMismatch,
  ContextMismatch,
  BudgetExceeded,
  PossiblyInfinite,
  InconsistentInstance,
  DomainDependence,
  NotOpfibration,
  NameClash,
  SchemaMismatch,
  InvalidKeys,
  NonGround,
  Parse,
  Usage,
  Io,
};

inline const char* kind_name(ErrorKind k) {
  switch (k) {
    case ErrorKind::UnknownVariable: return "UnknownVariable";
    case ErrorKind::UnknownSymbol: return "UnknownSymbol";
    case ErrorKind::UnknownSort: return "UnknownSort";
    case ErrorKind::AritySortMismatch: return "AritySortMismatch";
    case ErrorKind::SortMismatch: return "SortMismatch";
    case ErrorKind::ContextMismatch: return "ContextMismatch";
    case ErrorKind::BudgetExceeded: return "BudgetExceeded";
    case ErrorKind::PossiblyInfinite: return "PossiblyInfinite";
    case ErrorKind::InconsistentInstance: return "InconsistentInstance";
    case ErrorKind::DomainDependence: return "DomainDependence";
    case ErrorKind::NotOpfibration: return "NotOpfibration";
    case ErrorKind::NameClash: return "NameClash";
    case ErrorKind::SchemaMismatch: return "SchemaMismatch";
    case ErrorKind::InvalidKeys: return "InvalidKeys";
    case ErrorKind::NonGround: return "NonGround";
    case ErrorKind::Parse: return "ParseError";
    case ErrorKind::Usage: return "UsageError";
    case ErrorKind::Io: return "IoError";
  }
  return "Error";
}

struct Error : std::runtime_error {
  ErrorKind kind;
  Error(ErrorKind k, const std::string& msg)
      : std::runtime_error(std::string(kind_name(k)) + ": " + msg), kind(k) {}
};

// ---------------------------------------------------------------- terms

namespace detail {
struct TermNode;
}

class Term {
 public:
  Term() = default;

  static Term var(const std::string& name);
  static Term app(const std::string& head, const std::vector<Term>& args = {});

  bool null() const { return n_ == nullptr; }
  bool is_var() const;
  const std::string& head() const;
  std::size_t arity() const;
  Term arg(std::size_t i) const;
  const std::vector<Term>& args() const;
  std::uint32_t height() const;
  std::uint32_t size() const;
  std::size_t hash() const;
  bool ground() const;

  friend bool operator==(Term a, Term b) { return a.n_ == b.n_; }
  friend bool operator!=(Term a, Term b) { return a.n_ != b.n_; }

 private:
  explicit Term(const detail::TermNode* n) : n_(n) {}
  const detail::TermNode* n_ = nullptr;
};

namespace detail {

struct TermNode {
  bool var = false;
  std::string head;
  std::vector<Term> args;
  std::size_t hash = 0;
  std::uint32_t height = 0;
  std::uint32_t size = 1;
  bool ground = true;
};

struct NodeHash {
  std::size_t operator()(const TermNode* n) const { return n->hash; }
};
struct NodeEq {
  bool operator()(const TermNode* a, const TermNode* b) const {
    return a->var == b->var && a->head == b->head && a->args == b->args;
  }
};

class TermPool {
 public:
  const TermNode* intern(TermNode&& probe) {
    std::lock_guard<std::mutex> lock(mu_);
    auto it = set_.find(&probe);
    if (it != set_.end()) return *it;
    store_.push_back(std::move(probe));
    const TermNode* n = &store_.back();
    set_.insert(n);
    return n;
  }

 private:
  std::mutex mu_;
  std::deque<TermNode> store_;
  std::unordered_set<const TermNode*, NodeHash, NodeEq> set_;
};

inline TermPool& pool() {
  static TermPool p;
  return p;
}

inline std::size_t mix(std::size_t h, std::size_t v) {
  return h ^ (v + 0x9e3779b97f4a7c15ULL + (h << 6) + (h >> 2));
}

}  // namespace detail

inline Term Term::var(const std::string& name) {
  detail::TermNode n;
  n.var = true;
  n.head = name;
  n.hash = detail::mix(std::hash<std::string>{}(name), 1);
  n.ground = false;
  return Term(detail::pool().intern(std::move(n)));
}

inline Term Term::app(const std::string& head, const std::vector<Term>& args) {
  detail::TermNode n;
  n.head = head;
  n.args = args;
  std::size_t h = detail::mix(std::hash<std::string>{}(head), 2);
  std::uint32_t ht = 0, sz = 1;
  for (const Term& a : args) {
    h = detail::mix(h, a.hash());
    ht = std::max(ht, a.height() + 1);
    sz += a.size();
    n.ground = n.ground && a.ground();
  }
  n.hash = h;
  n.height = ht;
  n.size = sz;
  return Term(detail::pool().intern(std::move(n)));
}

inline bool Term::is_var() const { return n_->var; }
inline const std::string& Term::head() const { return n_->head; }
inline std::size_t Term::arity() const { return n_->args.size(); }
inline Term Term::arg(std::size_t i) const { return n_->args[i]; }
inline const std::vector<Term>& Term::args() const { return n_->args; }
inline std::uint32_t Term::height() const { return n_->height; }
inline std::uint32_t Term::size() const { return n_->size; }
inline std::size_t Term::hash() const { return n_ ? n_->hash : 0; }
inline bool Term::ground() const { return n_->ground; }

}  // namespace catdb

template <>
struct std::hash<catdb::Term> {
  std::size_t operator()(catdb::Term t) const { return t.hash(); }
};

namespace catdb {

// Deterministic total order: height, then variables first, then head, then arguments.
inline int term_cmp(Term a, Term b) {
  if (a == b) return 0;
  if (a.height() != b.height()) return a.height() < b.height() ? -1 : 1;
  if (a.is_var() != b.is_var()) return a.is_var() ? -1 : 1;
  if (a.head() != b.head()) return a.head() < b.head() ? -1 : 1;
  if (a.arity() != b.arity()) return a.arity() < b.arity() ? -1 : 1;
  for (std::size_t i = 0; i < a.arity(); ++i) {
    int c = term_cmp(a.arg(i), b.arg(i));
    if (c) return c;
  }
  return 0;
}

struct TermLess {
  bool operator()(Term a, Term b) const { return term_cmp(a, b) < 0; }
};

inline Term unary(const std::string& f, Term t) { return Term::app(f, {t}); }

inline Term path(Term root, const std::vector<std::string>& edges) {
  for (const auto& e : edges) root = unary(e, root);
  return root;
}

inline void collect_vars(Term t, std::vector<std::string>& out) {
  if (t.is_var()) {
    if (std::find(out.begin(), out.end(), t.head()) == out.end()) out.push_back(t.head());
    return;
  }
  for (Term a : t.args()) collect_vars(a, out);
}

inline std::vector<std::string> vars_of(Term t) {
  std::vector<std::string> v;
  collect_vars(t, v);
  return v;
}

inline bool occurs(const std::string& x, Term t) {
  if (t.is_var()) return t.head() == x;
  for (Term a : t.args())
    if (occurs(x, a)) return true;
  return false;
}

inline bool contains(Term t, Term sub) {
  if (t == sub) return true;
  for (Term a : t.args())
    if (contains(a, sub)) return true;
  return false;
}

using Subst = std::unordered_map<std::string, Term>;

inline Term apply_subst(Term t, const Subst& s) {
  if (t.is_var()) {
    auto it = s.find(t.head());
    return it == s.end() ? t : it->second;
  }
  if (t.ground()) return t;
  std::vector<Term> a;
  a.reserve(t.arity());
  bool changed = false;
  for (Term x : t.args()) {
    Term y = apply_subst(x, s);
    changed = changed || y != x;
    a.push_back(y);
  }
  return changed ? Term::app(t.head(), a) : t;
}

// Replace every occurrence of a subterm.
inline Term replace_all(Term t, Term from, Term to) {
  if (t == from) return to;
  if (t.arity() == 0) return t;
  std::vector<Term> a;
  bool changed = false;
  for (Term x : t.args()) {
    Term y = replace_all(x, from, to);
    changed = changed || y != x;
    a.push_back(y);
  }
  return changed ? Term::app(t.head(), a) : t;
}

inline Term subterm_at(Term t, const std::vector<int>& pos) {
  for (int i : pos) t = t.arg(i);
  return t;
}

inline Term replace_at(Term t, const std::vector<int>& pos, Term by, std::size_t k = 0) {
  if (k == pos.size()) return by;
  std::vector<Term> a = t.args();
  a[pos[k]] = replace_at(a[pos[k]], pos, by, k + 1);
  return Term::app(t.head(), a);
}

// ---------------------------------------------------------------- signatures

struct Symbol {
  std::string name;
  std::vector<std::string> dom;
  std::string cod;
  bool postfix = false;
};

inline bool is_numeral(const std::string& s) {
  return !s.empty() && std::all_of(s.begin(), s.end(), [](char c) { return c >= '0' && c <= '9'; });
}

class Signature {
 public:
  void add_sort(const std::string& s) {
    if (!has_sort(s)) sorts_.push_back(s);
  }

  void add_symbol(const Symbol& f) {
    if (index_.count(f.name))
      throw Error(ErrorKind::NameClash, "duplicate symbol '" + f.name + "'");
    for (const auto& s : f.dom)
      if (!has_sort(s)) throw Error(ErrorKind::UnknownSort, s + " in symbol " + f.name);
    if (!has_sort(f.cod)) throw Error(ErrorKind::UnknownSort, f.cod + " in symbol " + f.name);
    index_[f.name] = symbols_.size();
    symbols_.push_back(f);
  }

  bool has_sort(const std::string& s) const {
    return std::find(sorts_.begin(), sorts_.end(), s) != sorts_.end();
  }

  std::optional<Symbol> lookup(const std::string& name) const {
    auto it = index_.find(name);
    if (it != index_.end()) return symbols_[it->second];
    if (numerals && is_numeral(name) && has_sort("Int")) return Symbol{name, {}, "Int", false};
    return std::nullopt;
  }

  bool has_symbol(const std::string& name) const { return lookup(name).has_value(); }

  // Declaration position; implicit numerals sort before everything.
  long decl_index(const std::string& name) const {
    auto it = index_.find(name);
    return it == index_.end() ? -1 : static_cast<long>(it->second);
  }

  const std::vector<std::string>& sorts() const { return sorts_; }
  const std::vector<Symbol>& symbols() const { return symbols_; }

  bool numerals = false;

 private:
  std::vector<std::string> sorts_;
  std::vector<Symbol> symbols_;
  std::unordered_map<std::string, std::size_t> index_;
};

// ---------------------------------------------------------------- contexts

struct Binding {
  std::string var;
  std::string sort;
  friend bool operator==(const Binding&, const Binding&) = default;
};

class Context {
 public:
  Context() = default;
  Context(std::initializer_list<Binding> b) {
    for (const auto& x : b) add(x.var, x.sort);
  }

  void add(const std::string& v, const std::string& s) {
    if (find(v)) throw Error(ErrorKind::NameClash, "variable '" + v + "' bound twice");
    b_.push_back({v, s});
  }

  const std::string* find(const std::string& v) const {
    for (const auto& x : b_)
      if (x.var == v) return &x.sort;
    return nullptr;
  }

  std::string fresh(const std::string& base) const {
    if (!find(base)) return base;
    for (int i = 1;; ++i) {
      std::string c = base + std::to_string(i);
      if (!find(c)) return c;
    }
  }

  // Concatenation; clashing names of the right operand get a numeric suffix.
  std::pair<Context, Subst> concat(const Context& rhs) const {
    Context out = *this;
    Subst ren;
    for (const auto& x : rhs.b_) {
      std::string v = out.fresh(x.var);
      if (v != x.var) ren[x.var] = Term::var(v);
      out.b_.push_back({v, x.sort});
    }
    return {out, ren};
  }

  std::size_t size() const { return b_.size(); }
  bool empty() const { return b_.empty(); }
  const Binding& operator[](std::size_t i) const { return b_[i]; }
  std::vector<Binding>::const_iterator begin() const { return b_.begin(); }
  std::vector<Binding>::const_iterator end() const { return b_.end(); }
  friend bool operator==(const Context&, const Context&) = default;

 private:
  std::vector<Binding> b_;
};

// ---------------------------------------------------------------- sort checking

inline std::string to_string(Term t);

inline std::string well_sort_check(Term t, const Context& ctx, const Signature& sig) {
  if (t.is_var()) {
    const std::string* s = ctx.find(t.head());
    if (!s) throw Error(ErrorKind::UnknownVariable, "'" + t.head() + "'");
    return *s;
  }
  auto f = sig.lookup(t.head());
  if (!f) throw Error(ErrorKind::UnknownSymbol, "'" + t.head() + "'");
  if (f->dom.size() != t.arity())
    throw Error(ErrorKind::AritySortMismatch,
                "'" + t.head() + "' expects " + std::to_string(f->dom.size()) + " arguments in " +
                    to_string(t));
  for (std::size_t i = 0; i < t.arity(); ++i) {
    std::string s = well_sort_check(t.arg(i), ctx, sig);
    if (s != f->dom[i])
      throw Error(ErrorKind::AritySortMismatch, "argument " + std::to_string(i + 1) + " of '" +
                                                    t.head() + "' has sort " + s + ", expected " +
                                                    f->dom[i] + " in " + to_string(t));
  }
  return f->cod;
}

// ---------------------------------------------------------------- morphisms & equations

struct ContextMorphism {
  Context source;
  Context target;
  std::vector<Term> assign;  // aligned with target

  Term at(const std::string& v) const {
    for (std::size_t i = 0; i < target.size(); ++i)
      if (target[i].var == v) return assign[i];
    throw Error(ErrorKind::UnknownVariable, v);
  }

  Subst as_subst() const {
    Subst s;
    for (std::size_t i = 0; i < target.size(); ++i) s[target[i].var] = assign[i];
    return s;
  }

  static ContextMorphism identity(const Context& c) {
    ContextMorphism m{c, c, {}};
    for (const auto& b : c) m.assign.push_back(Term::var(b.var));
    return m;
  }

  void validate(const Signature& sig) const {
    if (assign.size() != target.size())
      throw Error(ErrorKind::SortMismatch, "context morphism is not total on its target");
    for (std::size_t i = 0; i < target.size(); ++i) {
      std::string s = well_sort_check(assign[i], source, sig);
      if (s != target[i].sort)
        throw Error(ErrorKind::SortMismatch,
                    target[i].var + " := " + to_string(assign[i]) + " has sort " + s);
    }
  }
};

inline Term substitute(Term t, const ContextMorphism& m) {
  for (const auto& v : vars_of(t))
    if (!m.target.find(v)) throw Error(ErrorKind::SortMismatch, "variable '" + v + "' not in target");
  return apply_subst(t, m.as_subst());
}

// f : G -> Th, g : Th -> Psi ; result G -> Psi
inline ContextMorphism compose_ctx_morphisms(const ContextMorphism& f, const ContextMorphism& g) {
  if (!(f.target == g.source)) throw Error(ErrorKind::ContextMismatch, "morphisms not composable");
  ContextMorphism h{f.source, g.target, {}};
  for (Term u : g.assign) h.assign.push_back(substitute(u, f));
  return h;
}

struct Equation {
  Context ctx;
  Term lhs;
  Term rhs;
  std::string sort;
};

inline Equation make_equation(const Context& ctx, Term l, Term r, const Signature& sig) {
  std::string a = well_sort_check(l, ctx, sig);
  std::string b = well_sort_check(r, ctx, sig);
  if (a != b) throw Error(ErrorKind::SortMismatch, to_string(l) + " : " + a + " vs " + to_string(r) + " : " + b);
  return {ctx, l, r, a};
}

struct Presentation {
  Signature sig;
  std::vector<Equation> eqs;
};

// ---------------------------------------------------------------- enumeration

inline std::vector<Term> enumerate_terms(const Signature& sig, const Context& ctx,
                                         const std::string& sort, std::size_t bound) {
  // by_height[h][s] = terms of sort s with height exactly h
  std::vector<std::map<std::string, std::vector<Term>>> by_height(bound + 1);
  for (const auto& b : ctx) by_height[0][b.sort].push_back(Term::var(b.var));
  for (const auto& f : sig.symbols())
    if (f.dom.empty()) by_height[0][f.cod].push_back(Term::app(f.name));
  for (std::size_t h = 1; h <= bound; ++h) {
    for (const auto& f : sig.symbols()) {
      if (f.dom.empty()) continue;
      std::vector<std::vector<Term>> upto(f.dom.size());
      for (std::size_t i = 0; i < f.dom.size(); ++i)
        for (std::size_t k = 0; k < h; ++k) {
          auto it = by_height[k].find(f.dom[i]);
          if (it != by_height[k].end()) upto[i].insert(upto[i].end(), it->second.begin(), it->second.end());
        }
      bool empty = false;
      for (const auto& u : upto) empty = empty || u.empty();
      if (empty) continue;
      std::vector<std::size_t> idx(f.dom.size(), 0);
      for (;;) {
        std::vector<Term> args;
        bool tall = false;
        for (std::size_t i = 0; i < idx.size(); ++i) {
          args.push_back(upto[i][idx[i]]);
          tall = tall || args.back().height() + 1 == h;
        }
        if (tall) by_height[h][f.cod].push_back(Term::app(f.name, args));
        std::size_t i = idx.size();
        bool carry = true;
        while (carry && i > 0) {
          --i;
          if (++idx[i] < upto[i].size()) carry = false;
          else idx[i] = 0;
        }
        if (carry) break;
      }
    }
  }
  std::vector<Term> out;
  for (std::size_t h = 0; h <= bound; ++h) {
    auto it = by_height[h].find(sort);
    if (it != by_height[h].end()) out.insert(out.end(), it->second.begin(), it->second.end());
  }
  return out;
}

// ---------------------------------------------------------------- printing

namespace detail {

inline bool is_letter_const(Term t) {
  return !t.is_var() && t.arity() == 0 && t.head().size() == 3 && t.head()[0] == '\'' &&
         t.head()[2] == '\'';
}

inline bool letters_of(Term t, std::string& out) {
  if (!t.is_var() && t.arity() == 0 && t.head() == "eps") return true;
  if (is_letter_const(t)) {
    out += t.head()[1];
    return true;
  }
  if (!t.is_var() && t.arity() == 2 && t.head() == "++")
    return letters_of(t.arg(0), out) && letters_of(t.arg(1), out);
  return false;
}

inline int infix_level(const std::string& h) {
  if (h == "or") return 1;
  if (h == "and") return 2;
  if (h == "<=") return 3;
  if (h == "++") return 4;
  if (h == "+") return 5;
  if (h == "*") return 6;
  return 0;
}

}  // namespace detail

struct PrintOptions {
  const Signature* sig = nullptr;  // consulted for postfix flags
};

inline void print_term(std::ostream& os, Term t, const PrintOptions& po, int ctx_level = 0) {
  if (t.is_var()) {
    os << t.head();
    return;
  }
  std::string lit;
  if (t.arity() > 0 || t.head() == "eps") {
    if (detail::letters_of(t, lit)) {
      os << '"' << lit << '"';
      return;
    }
  }
  const std::string& h = t.head();
  if (t.arity() == 0) {
    os << h;
    return;
  }
  if (t.arity() == 1) {
    if (h == "neg" || h == "not") {
      bool paren = ctx_level > 6;
      if (paren) os << '(';
      os << (h == "neg" ? "-" : "not ");
      print_term(os, t.arg(0), po, 7);
      if (paren) os << ')';
      return;
    }
    bool postfix = true;
    if (po.sig) {
      auto f = po.sig->lookup(h);
      postfix = !f || f->postfix;
    }
    if (postfix) {
      Term a = t.arg(0);
      bool paren = !a.is_var() && a.arity() >= 1 && (detail::infix_level(a.head()) > 0 ||
                                                      a.head() == "neg" || a.head() == "not");
      std::string tmp;
      if (paren && detail::letters_of(a, tmp)) paren = false;
      if (paren) os << '(';
      print_term(os, a, po, 8);
      if (paren) os << ')';
      os << '.' << h;
      return;
    }
  }
  int lv = t.arity() == 2 ? detail::infix_level(h) : 0;
  if (lv) {
    bool paren = ctx_level >= lv;
    if (paren) os << '(';
    print_term(os, t.arg(0), po, lv - 1 + (h == "<=" ? 1 : 0));
    Term r = t.arg(1);
    if (h == "+" && !r.is_var() && r.head() == "neg" && r.arity() == 1) {
      os << " - ";
      print_term(os, r.arg(0), po, lv);
    } else {
      os << ' ' << h << ' ';
      print_term(os, r, po, lv);
    }
    if (paren) os << ')';
    return;
  }
  os << h << '(';
  for (std::size_t i = 0; i < t.arity(); ++i) {
    if (i) os << ", ";
    print_term(os, t.arg(i), po, 0);
  }
  os << ')';
}

inline std::string to_string(Term t, const PrintOptions& po) {
  if (t.null()) return "<null>";
  std::ostringstream os;
  print_term(os, t, po);
  return os.str();
}

inline std::string to_string(Term t) { return to_string(t, PrintOptions{}); }

inline std::string to_string(const Equation& e) {
  std::ostringstream os;
  if (!e.ctx.empty()) {
    os << "forall ";
    for (std::size_t i = 0; i < e.ctx.size(); ++i)
      os << (i ? ", " : "") << e.ctx[i].var << ":" << e.ctx[i].sort;
    os << " . ";
  }
  os << to_string(e.lhs) << " = " << to_string(e.rhs);
  return os.str();
}

inline std::ostream& operator<<(std::ostream& os, Term t) { return os << to_string(t); }

}  // namespace catdb
