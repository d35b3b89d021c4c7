#pragma once

#include <boost/multiprecision/cpp_int.hpp>

#include "catdb/rewrite.hpp"

namespace catdb {

using BigInt = boost::multiprecision::cpp_int;

// ---------------------------------------------------------------- the fixed theory

inline const std::string& letters() {
  static const std::string s = "abcdefghijklmnopqrstuvwxyzABCDEFGHIJKLMNOPQRSTUVWXYZ";
  return s;
}

inline std::string letter_name(char c) { return std::string("'") + c + "'"; }

inline bool is_type_sort(const std::string& s) { return s == "Int" || s == "Bool" || s == "Str"; }

inline const Signature& type_signature() {
  static const Signature sig = [] {
    Signature s;
    s.numerals = true;
    for (const char* x : {"Int", "Bool", "Str"}) s.add_sort(x);
    s.add_symbol({"0", {}, "Int"});
    s.add_symbol({"1", {}, "Int"});
    s.add_symbol({"neg", {"Int"}, "Int"});
    s.add_symbol({"+", {"Int", "Int"}, "Int"});
    s.add_symbol({"*", {"Int", "Int"}, "Int"});
    s.add_symbol({"<=", {"Int", "Int"}, "Bool"});
    s.add_symbol({"true", {}, "Bool"});
    s.add_symbol({"false", {}, "Bool"});
    s.add_symbol({"not", {"Bool"}, "Bool"});
    s.add_symbol({"and", {"Bool", "Bool"}, "Bool"});
    s.add_symbol({"or", {"Bool", "Bool"}, "Bool"});
    s.add_symbol({"eps", {}, "Str"});
    for (char c : letters()) s.add_symbol({letter_name(c), {}, "Str"});
    s.add_symbol({"++", {"Str", "Str"}, "Str"});
    s.add_symbol({"eq", {"Str", "Str"}, "Bool"});
    return s;
  }();
  return sig;
}

inline bool is_type_symbol(const std::string& h) {
  return type_signature().has_symbol(h);
}

inline Term int_lit(const BigInt& v) {
  if (v < 0) return Term::app("neg", {Term::app(BigInt(-v).str())});
  return Term::app(v.str());
}

inline Term bool_lit(bool b) { return Term::app(b ? "true" : "false"); }

inline Term str_lit(const std::string& s) {
  if (s.empty()) return Term::app("eps");
  Term t = Term::app(letter_name(s.back()));
  for (std::size_t i = s.size() - 1; i-- > 0;) t = Term::app("++", {Term::app(letter_name(s[i])), t});
  return t;
}

// The presentation of the built-in theory, equation for equation.
inline Presentation builtin_type_theory() {
  Presentation p{type_signature(), {}};
  const Signature& sg = p.sig;
  auto V = [](const char* n) { return Term::var(n); };
  auto A = [](const char* f, std::vector<Term> a = {}) { return Term::app(f, a); };
  auto eq = [&](Context c, Term l, Term r) { p.eqs.push_back(make_equation(c, l, r, sg)); };
  Term T = A("true"), F = A("false"), zero = A("0"), one = A("1");
  auto imp = [&](Term a, Term b) { return A("or", {A("not", {a}), b}); };
  auto le = [&](Term a, Term b) { return A("<=", {a, b}); };
  auto cat = [&](Term a, Term b) { return A("++", {a, b}); };
  auto seq = [&](Term a, Term b) { return A("eq", {a, b}); };

  Context a1{{"a", "Bool"}}, a2{{"a", "Bool"}, {"b", "Bool"}}, a3{{"a", "Bool"}, {"b", "Bool"}, {"c", "Bool"}};
  Term a = V("a"), b = V("b"), c = V("c");
  eq(a1, A("or", {a, F}), a);
  eq(a1, A("and", {a, T}), a);
  eq(a2, A("or", {a, b}), A("or", {b, a}));
  eq(a2, A("and", {a, b}), A("and", {b, a}));
  eq(a1, A("or", {a, A("not", {a})}), T);
  eq(a1, A("and", {a, A("not", {a})}), F);
  eq(a3, A("or", {a, A("and", {b, c})}), A("and", {A("or", {a, b}), A("or", {a, c})}));
  eq(a3, A("and", {a, A("or", {b, c})}), A("or", {A("and", {a, b}), A("and", {a, c})}));

  Context x1{{"x", "Int"}}, x2{{"x", "Int"}, {"y", "Int"}}, x3{{"x", "Int"}, {"y", "Int"}, {"z", "Int"}};
  Context x4{{"x", "Int"}, {"y", "Int"}, {"z", "Int"}, {"w", "Int"}};
  Term x = V("x"), y = V("y"), z = V("z"), w = V("w");
  auto add = [&](Term l, Term r) { return A("+", {l, r}); };
  auto mul = [&](Term l, Term r) { return A("*", {l, r}); };
  eq(x3, add(add(x, y), z), add(x, add(y, z)));
  eq(x1, add(x, zero), x);
  eq(x2, add(x, y), add(y, x));
  eq(x1, add(x, A("neg", {x})), zero);
  eq(x3, mul(mul(x, y), z), mul(x, mul(y, z)));
  eq(x1, mul(x, one), x);
  eq(x2, mul(x, y), mul(y, x));
  eq(x3, mul(x, add(y, z)), add(mul(x, y), mul(x, z)));

  eq(x3, imp(A("and", {le(x, y), le(y, z)}), le(x, z)), T);
  eq(x2, A("or", {le(x, y), le(y, x)}), T);
  eq(x4, imp(A("and", {le(x, y), le(z, w)}), le(add(x, z), add(y, w))), T);
  eq(x3, imp(A("and", {le(x, y), le(zero, z)}), le(mul(x, z), mul(y, z))), T);
  eq(x3, imp(A("and", {le(mul(x, z), mul(y, z)), le(zero, z)}), le(x, y)), T);
  eq(Context{}, le(one, zero), A("not", {T}));

  Context s1{{"s", "Str"}}, s2{{"s", "Str"}, {"t", "Str"}}, s3{{"s", "Str"}, {"t", "Str"}, {"u", "Str"}};
  Context s4{{"s", "Str"}, {"t", "Str"}, {"u", "Str"}, {"v", "Str"}};
  Term s = V("s"), t = V("t"), u = V("u"), v = V("v"), e = A("eps");
  eq(s1, cat(s, e), s);
  eq(s3, cat(cat(s, t), u), cat(s, cat(t, u)));
  eq(s1, cat(e, s), s);

  eq(s1, seq(s, s), T);
  eq(s2, seq(s, t), seq(t, s));
  eq(s3, imp(A("and", {seq(s, t), seq(t, u)}), seq(s, u)), T);
  eq(s4, imp(A("and", {seq(s, t), seq(u, v)}), seq(cat(s, u), cat(t, v))), T);

  eq(s3, seq(cat(s, u), cat(t, u)), seq(s, t));
  eq(s3, seq(cat(s, t), cat(s, u)), seq(t, u));
  Term bot = A("not", {T});
  const std::string& L = letters();
  for (std::size_t i = 0; i < L.size(); ++i)
    for (std::size_t j = i + 1; j < L.size(); ++j) {
      Term li = A(letter_name(L[i]).c_str()), lj = A(letter_name(L[j]).c_str());
      eq(s2, seq(cat(s, li), cat(t, lj)), bot);
      eq(s2, seq(cat(li, s), cat(lj, t)), bot);
    }
  for (char ch : L) {
    Term l = A(letter_name(ch).c_str());
    eq(s1, seq(cat(s, l), e), bot);
    eq(s1, seq(cat(l, s), e), bot);
  }
  return p;
}

// ---------------------------------------------------------------- canonical forms

namespace ts {

// Int: polynomials over opaque atoms.
using Monomial = std::vector<std::pair<Term, unsigned>>;  // sorted by term_cmp

struct MonoLess {
  bool operator()(const Monomial& a, const Monomial& b) const {
    unsigned da = 0, db = 0;
    for (auto& p : a) da += p.second;
    for (auto& p : b) db += p.second;
    if (da != db) return da > db;
    for (std::size_t i = 0; i < std::min(a.size(), b.size()); ++i) {
      int c = term_cmp(a[i].first, b[i].first);
      if (c) return c < 0;
      if (a[i].second != b[i].second) return a[i].second > b[i].second;
    }
    return a.size() < b.size();
  }
};

using Poly = std::map<Monomial, BigInt, MonoLess>;

inline void poly_add(Poly& p, const Monomial& m, const BigInt& c) {
  if (c == 0) return;
  BigInt& slot = p[m];
  slot += c;
  if (slot == 0) p.erase(m);
}

inline Poly poly_const(const BigInt& c) {
  Poly p;
  poly_add(p, {}, c);
  return p;
}

inline Poly poly_sum(const Poly& a, const Poly& b, int sign = 1) {
  Poly r = a;
  for (auto& [m, c] : b) poly_add(r, m, sign * c);
  return r;
}

inline Monomial mono_mul(const Monomial& a, const Monomial& b) {
  std::map<Term, unsigned, TermLess> acc;
  for (auto& p : a) acc[p.first] += p.second;
  for (auto& p : b) acc[p.first] += p.second;
  return Monomial(acc.begin(), acc.end());
}

inline Poly poly_mul(const Poly& a, const Poly& b) {
  Poly r;
  for (auto& [ma, ca] : a)
    for (auto& [mb, cb] : b) poly_add(r, mono_mul(ma, mb), ca * cb);
  return r;
}

inline bool poly_is_const(const Poly& p, BigInt* out = nullptr) {
  if (p.empty()) {
    if (out) *out = 0;
    return true;
  }
  if (p.size() == 1 && p.begin()->first.empty()) {
    if (out) *out = p.begin()->second;
    return true;
  }
  return false;
}

inline Term poly_term(const Poly& p) {
  if (p.empty()) return Term::app("0");
  Term acc;
  for (auto& [m, c] : p) {
    Term mono;
    for (auto& [a, k] : m)
      for (unsigned i = 0; i < k; ++i) mono = mono.null() ? a : Term::app("*", {mono, a});
    BigInt mag = c < 0 ? BigInt(-c) : c;
    Term piece;
    if (mono.null()) piece = Term::app(mag.str());
    else if (mag == 1) piece = mono;
    else piece = Term::app("*", {Term::app(mag.str()), mono});
    if (acc.null()) acc = c < 0 ? Term::app("neg", {piece}) : piece;
    else acc = Term::app("+", {acc, c < 0 ? Term::app("neg", {piece}) : piece});
  }
  return acc;
}

// Str: words over letters and opaque atoms.
using Word = std::vector<Term>;

inline bool is_letter(Term t) { return detail::is_letter_const(t); }

inline Term word_term(const Word& w) {
  if (w.empty()) return Term::app("eps");
  // group maximal letter runs so that literals print as strings
  std::vector<Term> chunks;
  std::size_t i = 0;
  while (i < w.size()) {
    if (!is_letter(w[i])) {
      chunks.push_back(w[i++]);
      continue;
    }
    std::size_t j = i;
    while (j < w.size() && is_letter(w[j])) ++j;
    Term run = w[j - 1];
    for (std::size_t k = j - 1; k-- > i;) run = Term::app("++", {w[k], run});
    chunks.push_back(run);
    i = j;
  }
  Term t = chunks.back();
  for (std::size_t k = chunks.size() - 1; k-- > 0;) t = Term::app("++", {chunks[k], t});
  return t;
}

// Bool: truth tables over sorted essential atoms.
struct BoolFn {
  std::vector<Term> atoms;  // sorted by term_cmp
  std::vector<char> tt;     // bit i of the row index = value of atoms[i]

  bool is_const(bool* v = nullptr) const {
    if (!atoms.empty()) return false;
    if (v) *v = tt[0];
    return true;
  }
};

constexpr std::size_t kMaxBoolAtoms = 20;

struct BExpr {
  enum Op { Const, Atom, Not, And, Or } op;
  bool value = false;
  std::size_t atom = 0;
  std::vector<BExpr> kids;

  bool eval(std::size_t row) const {
    switch (op) {
      case Const: return value;
      case Atom: return (row >> atom) & 1u;
      case Not: return !kids[0].eval(row);
      case And: return kids[0].eval(row) && kids[1].eval(row);
      case Or: return kids[0].eval(row) || kids[1].eval(row);
    }
    return false;
  }
};

inline BoolFn reduce(BoolFn f) {
  for (std::size_t i = f.atoms.size(); i-- > 0;) {
    std::size_t bit = std::size_t{1} << i;
    bool essential = false;
    for (std::size_t r = 0; r < f.tt.size() && !essential; ++r)
      if (f.tt[r] != f.tt[r ^ bit]) essential = true;
    if (essential) continue;
    std::vector<char> nt(f.tt.size() / 2);
    for (std::size_t r = 0; r < nt.size(); ++r) {
      std::size_t low = r & (bit - 1), high = (r >> i) << (i + 1);
      nt[r] = f.tt[high | low];
    }
    f.tt = std::move(nt);
    f.atoms.erase(f.atoms.begin() + static_cast<long>(i));
  }
  return f;
}

// Re-express f over a superset of its atoms.
inline std::vector<char> widen(const BoolFn& f, const std::vector<Term>& atoms) {
  std::vector<std::size_t> where;
  for (Term a : f.atoms)
    where.push_back(static_cast<std::size_t>(std::find(atoms.begin(), atoms.end(), a) - atoms.begin()));
  std::vector<char> out(std::size_t{1} << atoms.size());
  for (std::size_t r = 0; r < out.size(); ++r) {
    std::size_t sub = 0;
    for (std::size_t i = 0; i < where.size(); ++i)
      if ((r >> where[i]) & 1u) sub |= std::size_t{1} << i;
    out[r] = f.tt[sub];
  }
  return out;
}

inline std::vector<Term> merge_atoms(const std::vector<Term>& a, const std::vector<Term>& b) {
  std::vector<Term> out = a;
  for (Term t : b)
    if (std::find(out.begin(), out.end(), t) == out.end()) out.push_back(t);
  std::sort(out.begin(), out.end(), TermLess{});
  if (out.size() > kMaxBoolAtoms)
    throw Error(ErrorKind::BudgetExceeded, "boolean formula mentions too many atoms");
  return out;
}

inline BoolFn combine(const BoolFn& a, const BoolFn& b, char op) {
  BoolFn r;
  r.atoms = merge_atoms(a.atoms, b.atoms);
  auto ta = widen(a, r.atoms), tb = widen(b, r.atoms);
  r.tt.resize(ta.size());
  for (std::size_t i = 0; i < ta.size(); ++i) {
    switch (op) {
      case '&': r.tt[i] = ta[i] && tb[i]; break;
      case '|': r.tt[i] = ta[i] || tb[i]; break;
      case '=': r.tt[i] = ta[i] == tb[i]; break;
      case '>': r.tt[i] = !ta[i] || tb[i]; break;
    }
  }
  return reduce(r);
}

inline BoolFn bool_const(bool v) { return BoolFn{{}, {static_cast<char>(v)}}; }

struct Implicant {
  std::size_t care;
  std::size_t val;
};

inline Term implicant_term(const Implicant& im, const std::vector<Term>& atoms) {
  Term acc;
  for (std::size_t i = 0; i < atoms.size(); ++i) {
    if (!((im.care >> i) & 1u)) continue;
    Term lit = ((im.val >> i) & 1u) ? atoms[i] : Term::app("not", {atoms[i]});
    acc = acc.null() ? lit : Term::app("and", {acc, lit});
  }
  return acc.null() ? bool_lit(true) : acc;
}

inline Term bool_term(const BoolFn& f) {
  bool v;
  if (f.is_const(&v)) return bool_lit(v);
  std::size_t n = f.atoms.size(), rows = f.tt.size(), full = rows - 1;
  std::vector<Implicant> chosen;
  std::vector<std::size_t> ones;
  for (std::size_t r = 0; r < rows; ++r)
    if (f.tt[r]) ones.push_back(r);
  if (n > 8) {
    for (std::size_t r : ones) chosen.push_back({full, r});
  } else {
    // prime implicants by exhaustive cube check
    std::vector<Implicant> primes;
    for (std::size_t care = 0; care < rows; ++care)
      for (std::size_t val = 0; val < rows; ++val) {
        if (val & ~care) continue;
        bool ok = true;
        for (std::size_t r = 0; r < rows && ok; ++r)
          if ((r & care) == val && !f.tt[r]) ok = false;
        if (!ok) continue;
        bool prime = true;
        for (std::size_t i = 0; i < n && prime; ++i) {
          std::size_t bit = std::size_t{1} << i;
          if (!(care & bit)) continue;
          std::size_t c2 = care & ~bit, v2 = val & ~bit;
          bool ok2 = true;
          for (std::size_t r = 0; r < rows && ok2; ++r)
            if ((r & c2) == v2 && !f.tt[r]) ok2 = false;
          if (ok2) prime = false;
        }
        if (prime) primes.push_back({care, val});
      }
    auto lits = [](const Implicant& im) { return __builtin_popcountll(im.care); };
    std::sort(primes.begin(), primes.end(), [&](const Implicant& a, const Implicant& b) {
      if (lits(a) != lits(b)) return lits(a) < lits(b);
      if (a.care != b.care) return a.care < b.care;
      return a.val < b.val;
    });
    std::vector<char> covered(rows, 0);
    std::size_t left = ones.size();
    while (left) {
      std::size_t best = 0, best_gain = 0;
      for (std::size_t k = 0; k < primes.size(); ++k) {
        std::size_t gain = 0;
        for (std::size_t r : ones)
          if (!covered[r] && (r & primes[k].care) == primes[k].val) ++gain;
        if (gain > best_gain) {
          best_gain = gain;
          best = k;
        }
      }
      chosen.push_back(primes[best]);
      for (std::size_t r : ones)
        if (!covered[r] && (r & primes[best].care) == primes[best].val) {
          covered[r] = 1;
          --left;
        }
    }
    std::sort(chosen.begin(), chosen.end(), [&](const Implicant& a, const Implicant& b) {
      if (lits(a) != lits(b)) return lits(a) < lits(b);
      if (a.care != b.care) return a.care < b.care;
      return a.val < b.val;
    });
  }
  Term acc;
  for (auto& im : chosen) {
    Term t = implicant_term(im, f.atoms);
    acc = acc.null() ? t : Term::app("or", {acc, t});
  }
  return acc;
}

}  // namespace ts

// ---------------------------------------------------------------- canonicalization

// Substitution on opaque atoms; applied to whole subterms.
using AtomMap = std::map<Term, Term, TermLess>;

class Canon {
 public:
  explicit Canon(const AtomMap* m = nullptr) : m_(m) {}

  Term canon(Term t, const std::string& sort) {
    if (sort == "Int") return ts::poly_term(poly(t));
    if (sort == "Str") return ts::word_term(word(t));
    if (sort == "Bool") return ts::bool_term(boolfn(t));
    return t;
  }

  ts::Poly poly(Term t) {
    if (auto r = mapped(t)) return poly(*r);
    if (!t.is_var()) {
      const std::string& h = t.head();
      if (t.arity() == 0 && is_numeral(h)) return ts::poly_const(BigInt(h));
      if (h == "neg" && t.arity() == 1) return ts::poly_sum({}, poly(t.arg(0)), -1);
      if (h == "+" && t.arity() == 2) return ts::poly_sum(poly(t.arg(0)), poly(t.arg(1)));
      if (h == "*" && t.arity() == 2) return ts::poly_mul(poly(t.arg(0)), poly(t.arg(1)));
    }
    ts::Poly p;
    ts::poly_add(p, {{t, 1u}}, 1);
    return p;
  }

  ts::Word word(Term t) {
    if (auto r = mapped(t)) return word(*r);
    if (!t.is_var()) {
      if (t.head() == "eps" && t.arity() == 0) return {};
      if (ts::is_letter(t)) return {t};
      if (t.head() == "++" && t.arity() == 2) {
        ts::Word a = word(t.arg(0)), b = word(t.arg(1));
        a.insert(a.end(), b.begin(), b.end());
        return a;
      }
    }
    return {t};
  }

  ts::BoolFn boolfn(Term t) {
    std::vector<Term> atoms;
    ts::BExpr e = bexpr(t, atoms);
    if (atoms.size() > ts::kMaxBoolAtoms)
      throw Error(ErrorKind::BudgetExceeded, "boolean formula mentions too many atoms");
    // sort atoms and remap indices
    std::vector<Term> sorted = atoms;
    std::sort(sorted.begin(), sorted.end(), TermLess{});
    std::vector<std::size_t> perm(atoms.size());
    for (std::size_t i = 0; i < atoms.size(); ++i)
      perm[i] = static_cast<std::size_t>(std::find(sorted.begin(), sorted.end(), atoms[i]) - sorted.begin());
    remap(e, perm);
    ts::BoolFn f;
    f.atoms = sorted;
    f.tt.resize(std::size_t{1} << sorted.size());
    for (std::size_t r = 0; r < f.tt.size(); ++r) f.tt[r] = e.eval(r);
    return ts::reduce(f);
  }

  // Canonical comparison atom, or a constant when decided.
  Term le_atom(Term p, Term q) {
    ts::Poly d = ts::poly_sum(poly(q), poly(p), -1);
    BigInt c;
    if (ts::poly_is_const(d, &c)) return bool_lit(c >= 0);
    ts::Poly lo, hi;
    for (auto& [m, k] : d) {
      if (k < 0) ts::poly_add(lo, m, -k);
      else ts::poly_add(hi, m, k);
    }
    return Term::app("<=", {ts::poly_term(lo), ts::poly_term(hi)});
  }

  Term eq_atom(Term a, Term b) {
    ts::Word u = word(a), v = word(b);
    std::size_t i = 0;
    while (i < u.size() && i < v.size() && u[i] == v[i]) ++i;
    u.erase(u.begin(), u.begin() + static_cast<long>(i));
    v.erase(v.begin(), v.begin() + static_cast<long>(i));
    while (!u.empty() && !v.empty() && u.back() == v.back()) {
      u.pop_back();
      v.pop_back();
    }
    if (u.empty() && v.empty()) return bool_lit(true);
    if (words_apart(u, v)) return bool_lit(false);
    Term x = ts::word_term(u), y = ts::word_term(v);
    if (term_cmp(y, x) < 0) std::swap(x, y);
    return Term::app("eq", {x, y});
  }

  static bool words_apart(const ts::Word& u, const ts::Word& v) {
    if (u.empty() != v.empty()) {
      const ts::Word& w = u.empty() ? v : u;
      return ts::is_letter(w.front()) || ts::is_letter(w.back());
    }
    if (u.empty()) return false;
    if (ts::is_letter(u.front()) && ts::is_letter(v.front()) && u.front() != v.front()) return true;
    if (ts::is_letter(u.back()) && ts::is_letter(v.back()) && u.back() != v.back()) return true;
    return false;
  }

 private:
  std::optional<Term> mapped(Term t) const {
    if (!m_) return std::nullopt;
    auto it = m_->find(t);
    if (it == m_->end()) return std::nullopt;
    return it->second;
  }

  static void remap(ts::BExpr& e, const std::vector<std::size_t>& perm) {
    if (e.op == ts::BExpr::Atom) e.atom = perm[e.atom];
    for (auto& k : e.kids) remap(k, perm);
  }

  ts::BExpr bexpr(Term t, std::vector<Term>& atoms) {
    using ts::BExpr;
    if (auto r = mapped(t)) return bexpr(*r, atoms);
    if (!t.is_var()) {
      const std::string& h = t.head();
      if (t.arity() == 0 && (h == "true" || h == "false")) return BExpr{BExpr::Const, h == "true", 0, {}};
      if (h == "not" && t.arity() == 1) return BExpr{BExpr::Not, false, 0, {bexpr(t.arg(0), atoms)}};
      if ((h == "and" || h == "or") && t.arity() == 2)
        return BExpr{h == "and" ? BExpr::And : BExpr::Or, false, 0,
                     {bexpr(t.arg(0), atoms), bexpr(t.arg(1), atoms)}};
      if (h == "<=" && t.arity() == 2) {
        Term a = le_atom(t.arg(0), t.arg(1));
        if (a.head() != "<=") return BExpr{BExpr::Const, a.head() == "true", 0, {}};
        if (auto r = mapped(a)) return bexpr(*r, atoms);
        return atom(a, atoms);
      }
      if (h == "eq" && t.arity() == 2) {
        Term a = eq_atom(t.arg(0), t.arg(1));
        if (a.head() != "eq") return BExpr{BExpr::Const, a.head() == "true", 0, {}};
        if (auto r = mapped(a)) return bexpr(*r, atoms);
        return atom(a, atoms);
      }
    }
    return atom(t, atoms);
  }

  static ts::BExpr atom(Term a, std::vector<Term>& atoms) {
    auto it = std::find(atoms.begin(), atoms.end(), a);
    std::size_t i = static_cast<std::size_t>(it - atoms.begin());
    if (it == atoms.end()) atoms.push_back(a);
    return ts::BExpr{ts::BExpr::Atom, false, i, {}};
  }

  const AtomMap* m_;
};

// Sort of a type-side term whose head is a built-in symbol, or of a null in ctx.
inline std::optional<std::string> type_sort_of(Term t, const Context* nulls = nullptr) {
  if (t.is_var()) {
    if (nulls)
      if (const std::string* s = nulls->find(t.head())) return *s;
    return std::nullopt;
  }
  if (auto f = type_signature().lookup(t.head())) return f->cod;
  return std::nullopt;
}

// Ground value of a closed type-side term.
inline Term eval_ground(Term t, const std::string& sort = "") {
  std::string s = sort;
  if (s.empty()) {
    auto g = type_sort_of(t);
    if (!g) throw Error(ErrorKind::NonGround, to_string(t));
    s = *g;
  }
  Canon c;
  Term v = c.canon(t, s);
  std::function<bool(Term)> closed = [&](Term x) {
    if (x.is_var() || !is_type_symbol(x.head())) return false;
    for (Term a : x.args())
      if (!closed(a)) return false;
    return true;
  };
  if (!closed(v)) throw Error(ErrorKind::NonGround, to_string(t));
  return v;
}

// A value is closed when it mentions no null and no opaque atom.
inline bool is_closed_value(Term v) {
  if (v.is_var() || !is_type_symbol(v.head())) return false;
  for (Term a : v.args())
    if (!is_closed_value(a)) return false;
  return true;
}

inline std::vector<std::pair<Term, std::string>> value_atoms_sorted(Term v, const std::string& sort) {
  std::vector<std::pair<Term, std::string>> out;
  Canon c;
  auto push = [&](Term a, const std::string& s) {
    for (auto& [b, _] : out)
      if (b == a) return;
    out.push_back({a, s});
  };
  std::function<void(Term, const std::string&)> go = [&](Term t, const std::string& s) {
    if (s == "Int") {
      for (auto& [m, k] : c.poly(t))
        for (auto& [a, e] : m) push(a, s);
    } else if (s == "Str") {
      for (Term a : c.word(t))
        if (!ts::is_letter(a)) push(a, s);
    } else if (s == "Bool") {
      for (Term a : c.boolfn(t).atoms) {
        if (!a.is_var() && a.head() == "<=" && a.arity() == 2) {
          go(a.arg(0), "Int");
          go(a.arg(1), "Int");
        } else if (!a.is_var() && a.head() == "eq" && a.arity() == 2) {
          go(a.arg(0), "Str");
          go(a.arg(1), "Str");
        } else {
          push(a, s);
        }
      }
    }
  };
  go(v, sort);
  return out;
}

inline std::vector<Term> value_atoms(Term v, const std::string& sort) {
  std::vector<Term> out;
  for (auto& [a, _] : value_atoms_sorted(v, sort)) out.push_back(a);
  return out;
}

// ---------------------------------------------------------------- presented type algebras

struct TypedEq {
  Term lhs;
  Term rhs;
  std::string sort;
};

namespace detail {

// Preference for which side of a solved equation gets eliminated.
inline bool elim_before(Term a, Term b) {
  bool ca = !a.is_var(), cb = !b.is_var();
  if (ca != cb) return ca;
  if (a.size() != b.size()) return a.size() > b.size();
  return term_cmp(a, b) > 0;
}

inline Term replace_subterms(Term t, const std::map<Term, Term, TermLess>& m) {
  auto it = m.find(t);
  if (it != m.end()) return it->second;
  if (t.is_var() || t.arity() == 0) return t;
  std::vector<Term> a;
  bool ch = false;
  for (Term x : t.args()) {
    a.push_back(replace_subterms(x, m));
    ch = ch || a.back() != x;
  }
  return ch ? Term::app(t.head(), a) : t;
}

}  // namespace detail

class TypeAlgebra {
 public:
  TypeAlgebra() = default;

  TypeAlgebra(Context nulls, std::vector<TypedEq> hyps) : nulls_(std::move(nulls)), hyps_(std::move(hyps)) {
    solve();
  }

  const Context& nulls() const { return nulls_; }
  const std::vector<TypedEq>& hypotheses() const { return hyps_; }
  const AtomMap& solved() const { return m_; }
  const std::vector<TypedEq>& unsolved() const { return unsolved_; }
  bool inconsistent() const { return inconsistent_; }
  const std::string& conflict() const { return conflict_; }

  Term normalize(Term t, const std::string& sort) const {
    Canon c(&m_);
    Term once = c.canon(t, sort);
    Term again = c.canon(once, sort);
    return again;
  }

  EqResult decide(Term a, Term b, const std::string& sort) const {
    if (inconsistent_) return EqResult::Equal;
    Term x = normalize(a, sort), y = normalize(b, sort);
    if (x == y) return EqResult::Equal;
    Canon c;
    if (sort == "Int") {
      BigInt k;
      if (ts::poly_is_const(ts::poly_sum(c.poly(x), c.poly(y), -1), &k)) return EqResult::NotEqual;
    } else if (sort == "Str") {
      Term e = c.eq_atom(x, y);
      if (e.head() == "false") return EqResult::NotEqual;
    } else if (sort == "Bool") {
      if (is_closed_value(x) && is_closed_value(y)) return EqResult::NotEqual;
      if (entailed(c.boolfn(Term::app("and", {Term::app("or", {Term::app("not", {x}), y}),
                                              Term::app("or", {Term::app("not", {y}), x})}))))
        return EqResult::Equal;
    }
    if (is_closed_value(x) && is_closed_value(y)) return EqResult::NotEqual;
    return EqResult::Unknown;
  }

 private:
  bool entailed(const ts::BoolFn& goal) const {
    bool v;
    if (goal.is_const(&v)) return v;
    ts::BoolFn premise = ts::bool_const(true);
    Canon c(&m_);
    for (const auto& u : unsolved_)
      if (u.sort == "Bool") {
        ts::BoolFn l = c.boolfn(u.lhs), r = c.boolfn(u.rhs);
        premise = ts::combine(premise, ts::combine(l, r, '='), '&');
      }
    ts::BoolFn imp = ts::combine(premise, goal, '>');
    return imp.is_const(&v) && v;
  }

  void fail(const TypedEq& h) {
    inconsistent_ = true;
    conflict_ = to_string(h.lhs) + " = " + to_string(h.rhs);
  }

  void bind(Term atom, Term value) {
    std::map<Term, Term, TermLess> one{{atom, value}};
    std::vector<Term> stale;
    for (auto& [k, v] : m_)
      if (k != atom && contains(k, atom)) stale.push_back(k);
    for (Term k : stale) {
      requeue_.push_back({k, m_.at(k), sort_hint_.at(k)});
      m_.erase(k);
    }
    for (auto& [k, v] : m_) {
      Term nv = detail::replace_subterms(v, one);
      if (nv != v) {
        auto s = sort_hint_.at(k);
        v = Canon(&m_).canon(nv, s);
      }
    }
    m_[atom] = value;
  }

  // Returns true when the equation was absorbed (solved or redundant).
  bool absorb(const TypedEq& h) {
    Canon c(&m_);
    Term L = normalize(h.lhs, h.sort), R = normalize(h.rhs, h.sort);
    if (L == R) return true;
    if (h.sort == "Int") {
      ts::Poly d = ts::poly_sum(c.poly(L), c.poly(R), -1);
      BigInt k;
      if (ts::poly_is_const(d, &k)) {
        fail(h);
        return true;
      }
      std::optional<Term> best;
      BigInt coef;
      for (auto& [m, k2] : d) {
        if (m.size() != 1 || m[0].second != 1 || (k2 != 1 && k2 != -1)) continue;
        Term a = m[0].first;
        bool alone = true;
        for (auto& [m2, k3] : d)
          if (m2 != m)
            for (auto& pr : m2)
              if (pr.first == a || contains(pr.first, a)) alone = false;
        if (!alone) continue;
        if (!best || detail::elim_before(a, *best)) {
          best = a;
          coef = k2;
        }
      }
      if (!best) return false;
      ts::Poly rest = d;
      rest.erase(ts::Monomial{{*best, 1u}});
      ts::Poly val = ts::poly_sum({}, rest, coef == 1 ? -1 : 1);
      sort_hint_[*best] = "Int";
      bind(*best, ts::poly_term(val));
      return true;
    }
    if (h.sort == "Str") {
      ts::Word u = c.word(L), v = c.word(R);
      std::size_t i = 0;
      while (i < u.size() && i < v.size() && u[i] == v[i]) ++i;
      u.erase(u.begin(), u.begin() + static_cast<long>(i));
      v.erase(v.begin(), v.begin() + static_cast<long>(i));
      while (!u.empty() && !v.empty() && u.back() == v.back()) {
        u.pop_back();
        v.pop_back();
      }
      if (Canon::words_apart(u, v)) {
        fail(h);
        return true;
      }
      auto single = [](const ts::Word& w, const ts::Word& other) {
        return w.size() == 1 && !ts::is_letter(w[0]) &&
               std::none_of(other.begin(), other.end(), [&](Term x) { return x == w[0] || contains(x, w[0]); });
      };
      bool su = single(u, v), sv = single(v, u);
      if (su && sv) {
        if (detail::elim_before(v[0], u[0])) su = false;
        else sv = false;
      }
      if (su) {
        sort_hint_[u[0]] = "Str";
        bind(u[0], ts::word_term(v));
        return true;
      }
      if (sv) {
        sort_hint_[v[0]] = "Str";
        bind(v[0], ts::word_term(u));
        return true;
      }
      return false;
    }
    if (h.sort == "Bool") {
      ts::BoolFn chi = ts::combine(c.boolfn(L), c.boolfn(R), '=');
      bool k;
      if (chi.is_const(&k)) {
        if (!k) fail(h);
        return true;
      }
      bool progress = false;
      for (std::size_t i = 0; i < chi.atoms.size(); ++i) {
        bool all1 = true, all0 = true;
        for (std::size_t r = 0; r < chi.tt.size(); ++r)
          if (chi.tt[r]) {
            if ((r >> i) & 1u) all0 = false;
            else all1 = false;
          }
        if (all1 || all0) {
          sort_hint_[chi.atoms[i]] = "Bool";
          bind(chi.atoms[i], bool_lit(all1));
          progress = true;
        }
      }
      if (progress) return absorb(h);
      // a ↔ φ with φ free of a
      for (std::size_t i = chi.atoms.size(); i-- > 0;) {
        std::size_t bit = std::size_t{1} << i;
        bool iff = true;
        for (std::size_t r = 0; r < chi.tt.size() && iff; ++r)
          if (!(r & bit) && chi.tt[r] == chi.tt[r | bit]) iff = false;
        if (!iff) continue;
        ts::BoolFn phi;
        for (std::size_t j = 0; j < chi.atoms.size(); ++j)
          if (j != i) phi.atoms.push_back(chi.atoms[j]);
        phi.tt.resize(chi.tt.size() / 2);
        for (std::size_t r = 0; r < phi.tt.size(); ++r) {
          std::size_t low = r & (bit - 1), high = (r >> i) << (i + 1);
          phi.tt[r] = chi.tt[high | low | bit];
        }
        sort_hint_[chi.atoms[i]] = "Bool";
        bind(chi.atoms[i], ts::bool_term(ts::reduce(phi)));
        return true;
      }
      return false;
    }
    return false;
  }

  void solve() {
    std::vector<TypedEq> pending = hyps_;
    bool progress = true;
    while (progress && !inconsistent_) {
      progress = false;
      std::vector<TypedEq> left;
      for (const auto& h : pending) {
        if (inconsistent_) break;
        if (absorb(h)) progress = true;
        else left.push_back(h);
        for (auto& r : requeue_) left.push_back(r);
        requeue_.clear();
      }
      pending = std::move(left);
    }
    for (const auto& h : pending)
      unsolved_.push_back({normalize(h.lhs, h.sort), normalize(h.rhs, h.sort), h.sort});
  }

  Context nulls_;
  std::vector<TypedEq> hyps_;
  AtomMap m_;
  std::map<Term, std::string, TermLess> sort_hint_;
  std::vector<TypedEq> unsolved_;
  std::vector<TypedEq> requeue_;
  bool inconsistent_ = false;
  std::string conflict_;
};

inline Term ts_normalize(Term t, const TypeAlgebra& alg, const std::string& sort = "") {
  std::string s = sort;
  if (s.empty()) {
    auto g = type_sort_of(t, &alg.nulls());
    if (!g) throw Error(ErrorKind::SortMismatch, "cannot infer the sort of " + to_string(t));
    s = *g;
  }
  return alg.normalize(t, s);
}

inline EqResult ts_decide(Term a, Term b, const TypeAlgebra& alg, const std::string& sort = "") {
  std::string s = sort;
  if (s.empty()) {
    auto g = type_sort_of(a, &alg.nulls());
    if (!g) g = type_sort_of(b, &alg.nulls());
    if (!g) throw Error(ErrorKind::SortMismatch, "cannot infer the sort of " + to_string(a));
    s = *g;
  }
  return alg.decide(a, b, s);
}

}  // namespace catdb
