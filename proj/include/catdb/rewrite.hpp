#pragma once

#include <queue>

#include "catdb/kernel.hpp"

namespace catdb {

enum class EqResult { Equal, NotEqual, Unknown };

inline const char* to_string(EqResult r) {
  switch (r) {
    case EqResult::Equal: return "Equal";
    case EqResult::NotEqual: return "NotEqual";
    case EqResult::Unknown: return "Unknown";
  }
  return "Unknown";
}

// ---------------------------------------------------------------- matching

inline bool match(Term p, Term s, Subst& b) {
  if (p.is_var()) {
    auto it = b.find(p.head());
    if (it != b.end()) return it->second == s;
    b.emplace(p.head(), s);
    return true;
  }
  if (s.is_var() || p.head() != s.head() || p.arity() != s.arity()) return false;
  for (std::size_t i = 0; i < p.arity(); ++i)
    if (!match(p.arg(i), s.arg(i), b)) return false;
  return true;
}

namespace detail {

inline Term walk(Term t, const Subst& s) {
  while (t.is_var()) {
    auto it = s.find(t.head());
    if (it == s.end()) break;
    t = it->second;
  }
  return t;
}

inline Term resolve(Term t, const Subst& s) {
  t = walk(t, s);
  if (t.is_var() || t.arity() == 0) return t;
  std::vector<Term> a;
  for (Term x : t.args()) a.push_back(resolve(x, s));
  return Term::app(t.head(), a);
}

inline bool occurs_walk(const std::string& x, Term t, const Subst& s) {
  t = walk(t, s);
  if (t.is_var()) return t.head() == x;
  for (Term a : t.args())
    if (occurs_walk(x, a, s)) return true;
  return false;
}

}  // namespace detail

inline bool unify(Term a, Term b, Subst& s) {
  a = detail::walk(a, s);
  b = detail::walk(b, s);
  if (a == b) return true;
  if (a.is_var()) {
    if (detail::occurs_walk(a.head(), b, s)) return false;
    s[a.head()] = b;
    return true;
  }
  if (b.is_var()) return unify(b, a, s);
  if (a.head() != b.head() || a.arity() != b.arity()) return false;
  for (std::size_t i = 0; i < a.arity(); ++i)
    if (!unify(a.arg(i), b.arg(i), s)) return false;
  return true;
}

inline Term rename_vars(Term t, const std::string& suffix) {
  if (t.is_var()) return Term::var(t.head() + suffix);
  if (t.ground()) return t;
  std::vector<Term> a;
  for (Term x : t.args()) a.push_back(rename_vars(x, suffix));
  return Term::app(t.head(), a);
}

// Sorts of the variables of t, read off the argument positions they occupy.
inline Context infer_context(const std::vector<Term>& ts, const Signature& sig) {
  Context ctx;
  std::function<void(Term, const std::string&)> go = [&](Term t, const std::string& want) {
    if (t.is_var()) {
      if (!ctx.find(t.head()) && !want.empty()) ctx.add(t.head(), want);
      return;
    }
    auto f = sig.lookup(t.head());
    for (std::size_t i = 0; i < t.arity(); ++i)
      go(t.arg(i), f && i < f->dom.size() ? f->dom[i] : std::string());
  };
  for (Term t : ts) go(t, sig.sorts().size() == 1 ? sig.sorts()[0] : std::string());
  return ctx;
}

// ---------------------------------------------------------------- term order

struct TermOrder {
  std::unordered_map<std::string, long> prec;  // larger rank = larger symbol

  static TermOrder from_signature(const Signature& sig) {
    TermOrder o;
    long i = 0;
    for (const auto& f : sig.symbols()) o.prec[f.name] = i++;
    return o;
  }

  // Reorder so that `order` lists symbols from largest to smallest.
  void set_precedence(const std::vector<std::string>& largest_first) {
    long r = static_cast<long>(prec.size() + largest_first.size()) + 1000;
    for (const auto& f : largest_first) prec[f] = r--;
  }

  int cmp_symbols(const std::string& a, const std::string& b) const {
    if (a == b) return 0;
    auto ia = prec.find(a), ib = prec.find(b);
    bool ka = ia != prec.end(), kb = ib != prec.end();
    if (ka && kb) return ia->second < ib->second ? -1 : 1;
    if (ka != kb) return ka ? 1 : -1;
    return a < b ? -1 : 1;
  }

  // Lexicographic path order.
  bool greater(Term s, Term t) const {
    Memo memo;
    return gt(s, t, memo);
  }

 private:
  struct PairHash {
    std::size_t operator()(const std::pair<Term, Term>& p) const { return p.first.hash() * 31 + p.second.hash(); }
  };
  using Memo = std::unordered_map<std::pair<Term, Term>, bool, PairHash>;

  bool gt(Term s, Term t, Memo& memo) const {
    if (s == t || s.is_var()) return false;
    if (t.is_var()) return occurs(t.head(), s);
    auto it = memo.find({s, t});
    if (it != memo.end()) return it->second;
    bool r = gt_raw(s, t, memo);
    memo[{s, t}] = r;
    return r;
  }

  bool gt_raw(Term s, Term t, Memo& memo) const {
    for (Term si : s.args())
      if (si == t || gt(si, t, memo)) return true;
    int c = cmp_symbols(s.head(), t.head());
    if (c == 0 && s.arity() != t.arity()) c = s.arity() < t.arity() ? -1 : 1;
    if (c > 0) {
      for (Term tj : t.args())
        if (!gt(s, tj, memo)) return false;
      return true;
    }
    if (c == 0) {
      std::size_t i = 0;
      while (i < s.arity() && s.arg(i) == t.arg(i)) ++i;
      if (i == s.arity() || !gt(s.arg(i), t.arg(i), memo)) return false;
      for (Term tj : t.args())
        if (!gt(s, tj, memo)) return false;
      return true;
    }
    return false;
  }
};

// ---------------------------------------------------------------- rules & derivations

struct ProofStep {
  Term after;
  std::size_t via;
  bool reversed;
};

struct Derivation {
  Term lhs;
  Term rhs;
  bool axiom = false;
  std::vector<ProofStep> steps;  // chain from lhs to rhs
};

struct RewriteRule {
  Context ctx;
  Term lhs;
  Term rhs;
  std::size_t id = 0;  // index into the derivation ledger
};

enum class Status { Confluent, Unfailing, BudgetExhausted };

inline const char* to_string(Status s) {
  switch (s) {
    case Status::Confluent: return "confluent";
    case Status::Unfailing: return "unfailing";
    case Status::BudgetExhausted: return "budget-exhausted";
  }
  return "?";
}

class RewriteSystem {
 public:
  Signature sig;
  TermOrder order;
  std::vector<RewriteRule> rules;
  std::vector<RewriteRule> equations;  // unorientable, used for ordered rewriting
  Status status = Status::Confluent;
  std::vector<Derivation> ledger;
  std::size_t step_budget = 100000;

  void reindex() {
    by_head_.clear();
    for (std::size_t i = 0; i < rules.size(); ++i) by_head_[rules[i].lhs.head()].push_back(i);
  }

  struct Hit {
    Term result;
    std::size_t via;
    bool reversed;
  };

  std::optional<Hit> rewrite_root(Term t) const {
    if (t.is_var()) return std::nullopt;
    auto it = by_head_.find(t.head());
    if (it != by_head_.end()) {
      for (std::size_t i : it->second) {
        Subst b;
        if (match(rules[i].lhs, t, b)) return Hit{apply_subst(rules[i].rhs, b), rules[i].id, false};
      }
    }
    for (const auto& e : equations) {
      for (int dir = 0; dir < 2; ++dir) {
        Term l = dir ? e.rhs : e.lhs, r = dir ? e.lhs : e.rhs;
        if (l.is_var()) continue;
        Subst b;
        if (!match(l, t, b)) continue;
        bool covered = true;
        for (const auto& v : vars_of(r)) covered = covered && b.count(v);
        if (!covered) continue;
        Term out = apply_subst(r, b);
        if (order.greater(t, out)) return Hit{out, e.id, dir == 1};
      }
    }
    return std::nullopt;
  }

  bool reducible(Term t) const {
    if (t.is_var()) return false;
    if (rewrite_root(t)) return true;
    for (Term a : t.args())
      if (reducible(a)) return true;
    return false;
  }

 private:
  std::unordered_map<std::string, std::vector<std::size_t>> by_head_;
};

// ---------------------------------------------------------------- normalization

namespace detail {

class Normalizer {
 public:
  Normalizer(const RewriteSystem& rs, std::vector<ProofStep>* rec, std::size_t budget)
      : rs_(rs), rec_(rec), budget_(budget) {}

  Term run(Term t) {
    full_ = t;
    return norm(t);
  }

 private:
  Term norm(Term t) {
    if (t.is_var()) return t;
    if (!rec_) {
      auto it = memo_.find(t);
      if (it != memo_.end()) return it->second;
    }
    std::vector<Term> a = t.args();
    bool changed = false;
    for (std::size_t i = 0; i < a.size(); ++i) {
      path_.push_back(static_cast<int>(i));
      Term n = norm(a[i]);
      path_.pop_back();
      if (n != a[i]) {
        a[i] = n;
        changed = true;
      }
    }
    Term cur = changed ? Term::app(t.head(), a) : t;
    auto hit = rs_.rewrite_root(cur);
    Term out = cur;
    if (hit) {
      if (++steps_ > budget_)
        throw Error(ErrorKind::BudgetExceeded, "normalize exceeded " + std::to_string(budget_) + " steps");
      if (rec_) {
        full_ = replace_at(full_, path_, hit->result);
        rec_->push_back({full_, hit->via, hit->reversed});
      }
      out = norm(hit->result);
    }
    if (!rec_) memo_[t] = out;
    return out;
  }

  const RewriteSystem& rs_;
  std::vector<ProofStep>* rec_;
  std::size_t budget_;
  std::size_t steps_ = 0;
  Term full_;
  std::vector<int> path_;
  std::unordered_map<Term, Term> memo_;
};

inline std::vector<ProofStep> reverse_chain(Term start, const std::vector<ProofStep>& steps) {
  std::vector<ProofStep> out;
  for (std::size_t k = steps.size(); k-- > 0;) {
    Term before = k == 0 ? start : steps[k - 1].after;
    out.push_back({before, steps[k].via, !steps[k].reversed});
  }
  return out;
}

inline void append(std::vector<ProofStep>& a, const std::vector<ProofStep>& b) {
  a.insert(a.end(), b.begin(), b.end());
}

}  // namespace detail

// Leftmost-innermost normal form.
inline Term normalize(Term t, const RewriteSystem& rs, std::vector<ProofStep>* rec = nullptr) {
  detail::Normalizer n(rs, rec, rs.step_budget);
  return n.run(t);
}

inline EqResult decide_equal(Term a, Term b, const RewriteSystem& rs) {
  if (a == b) return EqResult::Equal;
  Term na = normalize(a, rs), nb = normalize(b, rs);
  if (na == nb) return EqResult::Equal;
  return rs.status == Status::Confluent ? EqResult::NotEqual : EqResult::Unknown;
}

// ---------------------------------------------------------------- orientation

inline std::optional<RewriteRule> orient(const Equation& eq, const TermOrder& order) {
  if (order.greater(eq.lhs, eq.rhs)) return RewriteRule{eq.ctx, eq.lhs, eq.rhs, 0};
  if (order.greater(eq.rhs, eq.lhs)) return RewriteRule{eq.ctx, eq.rhs, eq.lhs, 0};
  return std::nullopt;
}

// ---------------------------------------------------------------- completion

namespace detail {

inline std::string pretty_var(std::size_t i) {
  static const char* base[] = {"x", "y", "z", "u", "v", "w"};
  if (i < 6) return base[i];
  return "x" + std::to_string(i - 5);
}

struct Pending {
  Term s;
  Term t;
  std::vector<ProofStep> chain;  // from s to t
  std::size_t weight;
  std::size_t seq;
};

struct PendingCmp {
  bool operator()(const Pending& a, const Pending& b) const {
    if (a.weight != b.weight) return a.weight > b.weight;
    return a.seq > b.seq;
  }
};

inline std::string variant_key(Term l, Term r) {
  Subst ren;
  std::vector<std::string> vs = vars_of(l);
  for (const auto& v : vars_of(r))
    if (std::find(vs.begin(), vs.end(), v) == vs.end()) vs.push_back(v);
  for (std::size_t i = 0; i < vs.size(); ++i) ren[vs[i]] = Term::var("#" + std::to_string(i));
  return to_string(apply_subst(l, ren)) + " == " + to_string(apply_subst(r, ren));
}

class Completion {
 public:
  Completion(const Presentation& pres, const TermOrder& order, std::size_t budget)
      : budget_(budget) {
    rs_.sig = pres.sig;
    rs_.order = order;
    for (const auto& e : pres.eqs) {
      std::size_t id = rs_.ledger.size();
      rs_.ledger.push_back({e.lhs, e.rhs, true, {}});
      push(e.lhs, e.rhs, {{e.rhs, id, false}});
    }
  }

  RewriteSystem run() {
    std::size_t processed = 0;
    try {
      while (!queue_.empty()) {
        if (++processed > budget_) {
          rs_.status = Status::BudgetExhausted;
          break;
        }
        Pending p = queue_.top();
        queue_.pop();
        process(p);
      }
    } catch (const Error& e) {
      if (e.kind != ErrorKind::BudgetExceeded) throw;
      rs_.status = Status::BudgetExhausted;
    }
    if (rs_.status != Status::BudgetExhausted)
      rs_.status = rs_.equations.empty() ? Status::Confluent : Status::Unfailing;
    std::sort(rs_.rules.begin(), rs_.rules.end(),
              [](const RewriteRule& a, const RewriteRule& b) { return a.id < b.id; });
    rs_.reindex();
    return rs_;
  }

 private:
  void push(Term s, Term t, std::vector<ProofStep> chain) {
    // canonical variable names, applied to the whole chain
    std::vector<std::string> vs = vars_of(s);
    for (const auto& v : vars_of(t))
      if (std::find(vs.begin(), vs.end(), v) == vs.end()) vs.push_back(v);
    for (const auto& st : chain)
      for (const auto& v : vars_of(st.after))
        if (std::find(vs.begin(), vs.end(), v) == vs.end()) vs.push_back(v);
    Subst tmp, fin;
    for (std::size_t i = 0; i < vs.size(); ++i) {
      tmp[vs[i]] = Term::var("%" + std::to_string(i));
      fin["%" + std::to_string(i)] = Term::var(pretty_var(i));
    }
    auto ren = [&](Term x) { return apply_subst(apply_subst(x, tmp), fin); };
    s = ren(s);
    t = ren(t);
    for (auto& st : chain) st.after = ren(st.after);
    queue_.push({s, t, std::move(chain), s.size() + t.size(), seq_++});
  }

  std::size_t add_ledger(Term l, Term r, std::vector<ProofStep> steps) {
    rs_.ledger.push_back({l, r, false, std::move(steps)});
    return rs_.ledger.size() - 1;
  }

  void process(Pending& p) {
    std::vector<ProofStep> a, b;
    Term ns = normalize(p.s, rs_, &a);
    Term nt = normalize(p.t, rs_, &b);
    if (ns == nt) return;
    std::vector<ProofStep> chain = reverse_chain(p.s, a);
    append(chain, p.chain);
    append(chain, b);
    std::string k1 = variant_key(ns, nt), k2 = variant_key(nt, ns);
    for (const auto& e : rs_.equations) {
      std::string k = variant_key(e.lhs, e.rhs);
      if (k == k1 || k == k2) return;
    }
    if (rs_.order.greater(ns, nt)) {
      add_rule(ns, nt, chain);
    } else if (rs_.order.greater(nt, ns)) {
      add_rule(nt, ns, reverse_chain(ns, chain));
    } else {
      std::size_t id = add_ledger(ns, nt, chain);
      RewriteRule e{infer_context({ns, nt}, rs_.sig), ns, nt, id};
      rs_.equations.push_back(e);
      critical_pairs_with(e, true);
    }
  }

  void add_rule(Term l, Term r, std::vector<ProofStep> chain) {
    std::size_t id = add_ledger(l, r, std::move(chain));
    RewriteRule nr{infer_context({l, r}, rs_.sig), l, r, id};
    RewriteSystem single;
    single.rules.push_back(nr);
    single.reindex();

    std::vector<RewriteRule> keep;
    for (auto& old : rs_.rules) {
      if (single.reducible(old.lhs)) {
        push(old.lhs, old.rhs, {{old.rhs, old.id, false}});
      } else {
        keep.push_back(old);
      }
    }
    std::vector<RewriteRule> keep_eq;
    for (auto& e : rs_.equations) {
      if (single.reducible(e.lhs) || single.reducible(e.rhs))
        push(e.lhs, e.rhs, {{e.rhs, e.id, false}});
      else
        keep_eq.push_back(e);
    }
    rs_.rules = std::move(keep);
    rs_.equations = std::move(keep_eq);
    rs_.rules.push_back(nr);
    rs_.reindex();
    for (auto& old : rs_.rules) {
      if (old.id == id || !rs_.reducible(old.rhs)) continue;
      std::vector<ProofStep> c{{old.rhs, old.id, false}};
      std::vector<ProofStep> more;
      Term nrhs = normalize(old.rhs, rs_, &more);
      detail::append(c, more);
      old.id = add_ledger(old.lhs, nrhs, std::move(c));
      old.rhs = nrhs;
    }
    rs_.reindex();
    critical_pairs_with(nr, false);
  }

  struct Side {
    Term l, r;
    std::size_t id;
    bool rev;
    std::size_t owner;
  };

  std::vector<Side> sides() const {
    std::vector<Side> out;
    for (const auto& x : rs_.rules) out.push_back({x.lhs, x.rhs, x.id, false, x.id});
    for (const auto& e : rs_.equations) {
      out.push_back({e.lhs, e.rhs, e.id, false, e.id});
      out.push_back({e.rhs, e.lhs, e.id, true, e.id});
    }
    return out;
  }

  void critical_pairs_with(const RewriteRule& nr, bool is_eq) {
    std::vector<Side> mine{{nr.lhs, nr.rhs, nr.id, false, nr.id}};
    if (is_eq) mine.push_back({nr.rhs, nr.lhs, nr.id, true, nr.id});
    for (const Side& x : mine)
      for (const Side& y : sides()) {
        overlap(x, y);
        if (y.owner != x.owner) overlap(y, x);
      }
  }

  // Overlaps of `inner` into non-variable positions of `outer`.
  void overlap(const Side& outer, const Side& inner_raw) {
    if (outer.l.is_var()) return;
    Side inner = inner_raw;
    inner.l = rename_vars(inner.l, "'");
    inner.r = rename_vars(inner.r, "'");
    if (inner.l.is_var()) return;
    std::vector<int> pos;
    std::function<void(Term)> walk = [&](Term sub) {
      if (sub.is_var()) return;
      bool same = outer.id == inner.id && outer.rev == inner.rev;
      if (!(pos.empty() && same)) {
        Subst s;
        if (unify(sub, inner.l, s)) {
          Term peak = detail::resolve(outer.l, s);
          Term left = detail::resolve(outer.r, s);
          Term right = replace_at(peak, pos, detail::resolve(inner.r, s));
          if (left != right) {
            std::vector<ProofStep> c{{peak, outer.id, !outer.rev}, {right, inner.id, inner.rev}};
            push(left, right, std::move(c));
          }
        }
      }
      for (std::size_t i = 0; i < sub.arity(); ++i) {
        pos.push_back(static_cast<int>(i));
        walk(sub.arg(i));
        pos.pop_back();
      }
    };
    walk(outer.l);
  }

  RewriteSystem rs_;
  std::size_t budget_;
  std::size_t seq_ = 0;
  std::priority_queue<Pending, std::vector<Pending>, PendingCmp> queue_;
};

}  // namespace detail

inline RewriteSystem complete(const Presentation& pres, const TermOrder& order,
                              std::size_t budget = 10000) {
  if (budget == 0) throw Error(ErrorKind::Usage, "completion budget must be positive");
  detail::Completion c(pres, order, budget);
  return c.run();
}

inline RewriteSystem complete(const Presentation& pres, std::size_t budget = 10000) {
  return complete(pres, TermOrder::from_signature(pres.sig), budget);
}

// ---------------------------------------------------------------- derivation replay

namespace detail {

inline bool single_step(Term before, Term after, Term l, Term r) {
  Subst s;
  if (match(l, before, s) && match(r, after, s)) return true;
  if (before.is_var() || after.is_var() || before.head() != after.head() ||
      before.arity() != after.arity())
    return false;
  int diff = -1;
  for (std::size_t i = 0; i < before.arity(); ++i) {
    if (before.arg(i) == after.arg(i)) continue;
    if (diff >= 0) return false;
    diff = static_cast<int>(i);
  }
  if (diff < 0) return false;
  return single_step(before.arg(diff), after.arg(diff), l, r);
}

}  // namespace detail

// Checks that ledger entry `id` follows from earlier entries by single rewrite steps.
inline bool replay(const RewriteSystem& rs, std::size_t id) {
  const Derivation& d = rs.ledger.at(id);
  if (d.axiom) return true;
  Term cur = d.lhs;
  for (const auto& st : d.steps) {
    if (st.via >= id) return false;
    const Derivation& e = rs.ledger[st.via];
    Term l = st.reversed ? e.rhs : e.lhs, r = st.reversed ? e.lhs : e.rhs;
    if (!detail::single_step(cur, st.after, l, r)) return false;
    cur = st.after;
  }
  return cur == d.rhs;
}

// ---------------------------------------------------------------- ground congruence

// Congruence closure of ground equations modulo a rewrite system. Generators
// (variables of the equations) are treated as fresh constants below every symbol.
class GroundCongruence {
 public:
  GroundCongruence(const std::vector<Equation>& ground_eqs, const RewriteSystem& rs,
                   std::size_t budget = 10000) {
    Presentation p;
    p.sig = rs.sig;
    for (const auto& r : rs.rules) p.eqs.push_back({r.ctx, r.lhs, r.rhs, ""});
    for (const auto& r : rs.equations) p.eqs.push_back({r.ctx, r.lhs, r.rhs, ""});
    for (const auto& e : ground_eqs) {
      if (!vars_of(e.lhs).empty() && false) {}
      p.eqs.push_back({Context{}, constify(e.lhs), constify(e.rhs), e.sort});
    }
    TermOrder o = rs.order;
    sys_ = complete(p, o, budget);
    sys_.step_budget = rs.step_budget;
  }

  Term representative(Term t) const { return deconstify(normalize(constify(t), sys_)); }

  EqResult equal(Term a, Term b) const {
    return decide_equal(constify(a), constify(b), sys_);
  }

  const RewriteSystem& system() const { return sys_; }

  static Term constify(Term t) {
    if (t.is_var()) return Term::app("@" + t.head());
    if (t.ground()) return t;
    std::vector<Term> a;
    for (Term x : t.args()) a.push_back(constify(x));
    return Term::app(t.head(), a);
  }

  static Term deconstify(Term t) {
    if (!t.is_var() && t.arity() == 0 && !t.head().empty() && t.head()[0] == '@')
      return Term::var(t.head().substr(1));
    if (t.arity() == 0) return t;
    std::vector<Term> a;
    for (Term x : t.args()) a.push_back(deconstify(x));
    return Term::app(t.head(), a);
  }

 private:
  RewriteSystem sys_;
};

inline GroundCongruence ground_congruence_close(const std::vector<Equation>& eqs,
                                                const RewriteSystem& rs,
                                                std::size_t budget = 10000) {
  return GroundCongruence(eqs, rs, budget);
}

}  // namespace catdb
