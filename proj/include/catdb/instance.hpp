#pragma once

#include <queue>
#include <set>

#include "catdb/schema.hpp"

namespace catdb {

struct InstancePresentation {
  std::string name;
  SchemaRef schema;
  Context gens;  // entity-sorted generators and type-sorted nulls
  std::vector<Equation> eqs;
};

inline void validate_presentation(const InstancePresentation& P) {
  for (const auto& b : P.gens)
    if (!P.schema->is_entity(b.sort) && !is_type_sort(b.sort))
      throw Error(ErrorKind::UnknownSort, b.sort + " for generator " + b.var);
  for (const auto& e : P.eqs) {
    std::string a = P.schema->sort_of(e.lhs, P.gens), b = P.schema->sort_of(e.rhs, P.gens);
    if (a != b) throw Error(ErrorKind::SortMismatch, P.schema->show(e.lhs) + " = " + P.schema->show(e.rhs));
  }
}

inline Equation ground_eq(const InstancePresentation& P, Term l, Term r) {
  return Equation{Context{}, l, r, P.schema->sort_of(l, P.gens)};
}

struct SaturatedInstance {
  std::string name;
  SchemaRef schema;
  std::shared_ptr<const TypeAlgebra> alg;
  std::map<std::string, std::vector<Term>> reps;
  std::map<std::string, std::vector<std::size_t>> edges;
  std::map<std::string, std::vector<Term>> cells;
  std::map<std::string, std::size_t> gen_rows;

  std::size_t rows(const std::string& e) const {
    auto it = reps.find(e);
    return it == reps.end() ? 0 : it->second.size();
  }
  std::size_t total_rows() const {
    std::size_t n = 0;
    for (auto& [_, v] : reps) n += v.size();
    return n;
  }
  Term rep(const std::string& e, std::size_t i) const { return reps.at(e)[i]; }
  std::string row_name(const std::string& e, std::size_t i) const { return schema->show(rep(e, i)); }
  std::size_t follow(const std::string& f, std::size_t i) const { return edges.at(f)[i]; }
  Term cell(const std::string& a, std::size_t i) const { return cells.at(a)[i]; }
  Term normalize(Term t, const std::string& sort) const { return alg->normalize(t, sort); }
  EqResult decide(Term a, Term b, const std::string& sort) const { return alg->decide(a, b, sort); }

  // Equations of the type algebra that do not pin down a cell.
  std::vector<TypedEq> type_equations() const {
    std::set<Term, TermLess> own;
    for (const auto& a : schema->pres.attributes)
      for (Term r : reps.at(a.dom[0])) own.insert(unary(a.name, r));
    std::vector<TypedEq> out;
    for (auto& [k, v] : alg->solved()) {
      if (own.count(k)) continue;
      auto s = type_sort_of(k, &alg->nulls());
      if (!s) continue;
      out.push_back({k, v, *s});
    }
    for (const auto& e : alg->unsolved()) out.push_back(e);
    return out;
  }
};

// ---------------------------------------------------------------- evaluation

struct Assignment {
  std::map<std::string, std::size_t> ent;
  std::map<std::string, Term> typ;
  bool operator==(const Assignment& o) const { return ent == o.ent && typ == o.typ; }
};

inline std::optional<std::size_t> eval_entity(const SaturatedInstance& J, Term t, const Assignment& env) {
  if (t.is_var()) {
    auto it = env.ent.find(t.head());
    if (it == env.ent.end()) return std::nullopt;
    return it->second;
  }
  if (t.arity() != 1 || !J.schema->is_edge(t.head()))
    throw Error(ErrorKind::UnknownSymbol, "not a path: " + J.schema->show(t));
  auto r = eval_entity(J, t.arg(0), env);
  if (!r) return std::nullopt;
  return J.follow(t.head(), *r);
}

// Type-side term with cells and nulls substituted; not yet normalized.
inline std::optional<Term> eval_type_raw(const SaturatedInstance& J, Term t, const Assignment& env) {
  if (t.is_var()) {
    auto it = env.typ.find(t.head());
    if (it == env.typ.end()) return std::nullopt;
    return it->second;
  }
  if (t.arity() == 1 && J.schema->is_attribute(t.head())) {
    auto r = eval_entity(J, t.arg(0), env);
    if (!r) return std::nullopt;
    return J.cell(t.head(), *r);
  }
  if (t.arity() == 0) return t;
  std::vector<Term> a;
  for (Term x : t.args()) {
    auto v = eval_type_raw(J, x, env);
    if (!v) return std::nullopt;
    a.push_back(*v);
  }
  return Term::app(t.head(), a);
}

inline std::optional<Term> eval_type(const SaturatedInstance& J, Term t, const std::string& sort,
                                     const Assignment& env) {
  auto v = eval_type_raw(J, t, env);
  if (!v) return std::nullopt;
  return J.normalize(*v, sort);
}

// ---------------------------------------------------------------- saturation

namespace detail {

class Saturator {
 public:
  Saturator(const InstancePresentation& P, std::size_t budget) : P_(P), S_(*P.schema), budget_(budget) {
    for (std::size_t i = 0; i < S_.pres.edges.size(); ++i) edge_ix_[S_.pres.edges[i].name] = i;
  }

  SaturatedInstance run(bool entity_only) {
    validate_presentation(P_);
    for (const auto& b : P_.gens)
      if (S_.is_entity(b.sort)) gen_node_[b.var] = make(b.sort);
    for (const auto& e : P_.eqs)
      if (S_.is_entity(e.sort)) unite(eval(e.lhs, {}), eval(e.rhs, {}));
    for (std::size_t i = 0; i < sort_.size(); ++i) {
      if (find(i) != i) continue;
      for (std::size_t k = 0; k < S_.pres.edges.size(); ++k)
        if (S_.pres.edges[k].dom[0] == sort_[i]) step(i, k);
      for (const auto& eq : S_.pres.path_eqs) {
        if (find(i) != i) break;
        if (eq.ctx[0].sort != sort_[i]) continue;
        std::map<std::string, std::size_t> env{{eq.ctx[0].var, i}};
        unite(eval(eq.lhs, env), eval(eq.rhs, env));
      }
    }
    return finish(entity_only);
  }

 private:
  const InstancePresentation& P_;
  const Schema& S_;
  std::size_t budget_;
  std::map<std::string, std::size_t> edge_ix_;
  std::vector<std::size_t> parent_;
  std::vector<std::string> sort_;
  std::vector<std::vector<long>> next_;
  std::map<std::string, std::size_t> live_;
  std::map<std::string, std::size_t> gen_node_;

  std::size_t make(const std::string& s) {
    parent_.push_back(sort_.size());
    sort_.push_back(s);
    next_.emplace_back(S_.pres.edges.size(), -1);
    if (++live_[s] > budget_ || sort_.size() > 64 * budget_ + 4096)
      throw Error(ErrorKind::PossiblyInfinite, "entity " + s + " exceeded " + std::to_string(budget_) + " rows");
    return sort_.size() - 1;
  }

  std::size_t find(std::size_t n) {
    while (parent_[n] != n) {
      parent_[n] = parent_[parent_[n]];
      n = parent_[n];
    }
    return n;
  }

  std::size_t step(std::size_t n, std::size_t k) {
    n = find(n);
    if (next_[n][k] < 0) {
      std::size_t m = make(S_.pres.edges[k].cod);
      next_[n][k] = static_cast<long>(m);
      return m;
    }
    return find(static_cast<std::size_t>(next_[n][k]));
  }

  std::size_t eval(Term t, const std::map<std::string, std::size_t>& env) {
    if (t.is_var()) {
      auto it = env.find(t.head());
      if (it != env.end()) return find(it->second);
      auto g = gen_node_.find(t.head());
      if (g == gen_node_.end()) throw Error(ErrorKind::UnknownVariable, t.head());
      return find(g->second);
    }
    return step(eval(t.arg(0), env), edge_ix_.at(t.head()));
  }

  void unite(std::size_t a, std::size_t b) {
    std::vector<std::pair<std::size_t, std::size_t>> todo{{a, b}};
    while (!todo.empty()) {
      auto [x, y] = todo.back();
      todo.pop_back();
      x = find(x);
      y = find(y);
      if (x == y) continue;
      if (x > y) std::swap(x, y);
      parent_[y] = x;
      --live_[sort_[y]];
      for (std::size_t k = 0; k < next_[y].size(); ++k) {
        if (next_[y][k] < 0) continue;
        if (next_[x][k] < 0)
          next_[x][k] = next_[y][k];
        else
          todo.push_back({static_cast<std::size_t>(next_[x][k]), static_cast<std::size_t>(next_[y][k])});
      }
    }
  }

  SaturatedInstance finish(bool entity_only) {
    std::map<std::size_t, Term> best;
    std::set<std::pair<Term, std::size_t>, bool (*)(const std::pair<Term, std::size_t>&,
                                                      const std::pair<Term, std::size_t>&)>
        pq([](const std::pair<Term, std::size_t>& a, const std::pair<Term, std::size_t>& b) {
          int c = term_cmp(a.first, b.first);
          return c != 0 ? c < 0 : a.second < b.second;
        });
    auto offer = [&](std::size_t n, Term t) {
      auto it = best.find(n);
      if (it != best.end()) {
        if (term_cmp(t, it->second) >= 0) return;
        pq.erase({it->second, n});
      }
      best[n] = t;
      pq.insert({t, n});
    };
    for (auto& [g, n] : gen_node_) offer(find(n), Term::var(g));
    std::set<std::size_t> done;
    while (!pq.empty()) {
      auto [t, n] = *pq.begin();
      pq.erase(pq.begin());
      done.insert(n);
      for (std::size_t k = 0; k < next_[n].size(); ++k) {
        if (next_[n][k] < 0) continue;
        std::size_t m = find(static_cast<std::size_t>(next_[n][k]));
        if (!done.count(m)) offer(m, unary(S_.pres.edges[k].name, t));
      }
    }

    SaturatedInstance J;
    J.name = P_.name;
    J.schema = P_.schema;
    std::map<std::size_t, std::size_t> row;
    for (const auto& e : S_.pres.entities) {
      std::vector<std::pair<Term, std::size_t>> v;
      for (auto& [n, t] : best)
        if (sort_[n] == e) v.push_back({t, n});
      std::sort(v.begin(), v.end(), [](auto& a, auto& b) { return term_cmp(a.first, b.first) < 0; });
      auto& reps = J.reps[e];
      for (auto& [t, n] : v) {
        row[n] = reps.size();
        reps.push_back(t);
      }
    }
    for (std::size_t k = 0; k < S_.pres.edges.size(); ++k) {
      const auto& f = S_.pres.edges[k];
      auto& col = J.edges[f.name];
      for (Term t : J.reps[f.dom[0]]) {
        std::size_t n = find(gen_root(t));
        col.push_back(row.at(find(static_cast<std::size_t>(next_[n][k]))));
      }
    }
    for (auto& [g, n] : gen_node_) J.gen_rows[g] = row.at(find(n));

    Context nulls;
    for (const auto& b : P_.gens)
      if (is_type_sort(b.sort)) nulls.add(b.var, b.sort);
    if (entity_only) {
      J.alg = std::make_shared<TypeAlgebra>(nulls, std::vector<TypedEq>{});
      for (const auto& a : S_.pres.attributes)
        for (Term r : J.reps[a.dom[0]]) J.cells[a.name].push_back(unary(a.name, r));
      return J;
    }

    auto resolve = [&](Term t) {
      std::function<Term(Term)> go = [&](Term x) -> Term {
        if (x.is_var() || x.arity() == 0) return x;
        if (x.arity() == 1 && S_.is_attribute(x.head())) {
          const std::string& e = S_.attribute(x.head())->dom[0];
          std::size_t n = find(eval(x.arg(0), {}));
          return unary(x.head(), J.reps[e][row.at(n)]);
        }
        std::vector<Term> a;
        for (Term y : x.args()) a.push_back(go(y));
        return Term::app(x.head(), a);
      };
      return go(t);
    };
    std::vector<TypedEq> hyps;
    for (const auto& e : P_.eqs)
      if (is_type_sort(e.sort)) hyps.push_back({resolve(e.lhs), resolve(e.rhs), e.sort});
    for (const auto& eq : S_.pres.obs_eqs)
      for (Term r : J.reps[eq.ctx[0].sort]) {
        Subst s{{eq.ctx[0].var, r}};
        hyps.push_back({resolve(apply_subst(eq.lhs, s)), resolve(apply_subst(eq.rhs, s)), eq.sort});
      }
    auto alg = std::make_shared<TypeAlgebra>(nulls, hyps);
    if (alg->inconsistent())
      throw Error(ErrorKind::InconsistentInstance, "instance " + P_.name + ": " + alg->conflict());
    J.alg = alg;
    for (const auto& a : S_.pres.attributes)
      for (Term r : J.reps[a.dom[0]]) J.cells[a.name].push_back(alg->normalize(unary(a.name, r), a.cod));
    return J;
  }

  std::size_t gen_root(Term t) { return eval(t, {}); }
};

}  // namespace detail

inline SaturatedInstance saturate(const InstancePresentation& P, std::size_t budget = 10000,
                                  bool entity_only = false) {
  return detail::Saturator(P, budget).run(entity_only);
}

inline InstancePresentation representable(const SchemaRef& S, const std::string& entity,
                                          const std::string& var = kMapVar) {
  if (!S->is_entity(entity)) throw Error(ErrorKind::UnknownSort, entity);
  return InstancePresentation{"y(" + entity + ")", S, Context{{var, entity}}, {}};
}

// ---------------------------------------------------------------- transforms

namespace detail {

class TransformSearch {
 public:
  TransformSearch(const InstancePresentation& P, const SaturatedInstance& J, std::size_t limit)
      : P_(P), J_(J), limit_(limit) {}

  std::vector<Assignment> run(Assignment seed = {}) {
    validate_presentation(P_);
    dfs(std::move(seed));
    return out_;
  }

  // false when some equation fails; forces generators defined by an equation.
  bool propagate(Assignment& env) const {
    for (bool changed = true; changed;) {
      changed = false;
      for (const auto& e : P_.eqs) {
        for (int side = 0; side < 2; ++side) {
          Term g = side ? e.lhs : e.rhs, t = side ? e.rhs : e.lhs;
          if (!g.is_var() || assigned(env, g.head())) continue;
          if (J_.schema->is_entity(e.sort)) {
            if (auto r = eval_entity(J_, t, env)) {
              env.ent[g.head()] = *r;
              changed = true;
            }
          } else if (auto v = eval_type(J_, t, e.sort, env)) {
            env.typ[g.head()] = *v;
            changed = true;
          }
        }
      }
    }
    for (const auto& e : P_.eqs)
      if (holds(e, env) == EqResult::NotEqual) return false;
    return true;
  }

  // Equal, NotEqual (fails or undecided), Unknown (not yet evaluable).
  EqResult holds(const Equation& e, const Assignment& env) const {
    if (J_.schema->is_entity(e.sort)) {
      auto a = eval_entity(J_, e.lhs, env), b = eval_entity(J_, e.rhs, env);
      if (!a || !b) return EqResult::Unknown;
      return *a == *b ? EqResult::Equal : EqResult::NotEqual;
    }
    auto a = eval_type(J_, e.lhs, e.sort, env), b = eval_type(J_, e.rhs, e.sort, env);
    if (!a || !b) return EqResult::Unknown;
    return J_.decide(*a, *b, e.sort) == EqResult::Equal ? EqResult::Equal : EqResult::NotEqual;
  }

 private:
  const InstancePresentation& P_;
  const SaturatedInstance& J_;
  std::size_t limit_;
  std::vector<Assignment> out_;

  static bool assigned(const Assignment& env, const std::string& g) {
    return env.ent.count(g) || env.typ.count(g);
  }

  void dfs(Assignment env) {
    if (out_.size() >= limit_) return;
    if (!propagate(env)) return;
    for (const auto& b : P_.gens) {
      if (assigned(env, b.var) || !J_.schema->is_entity(b.sort)) continue;
      for (std::size_t r = 0; r < J_.rows(b.sort); ++r) {
        Assignment next = env;
        next.ent[b.var] = r;
        dfs(std::move(next));
      }
      return;
    }
    for (const auto& b : P_.gens)
      if (!assigned(env, b.var))
        throw Error(ErrorKind::DomainDependence, "null " + b.var + " of " + P_.name + " is not determined");
    out_.push_back(std::move(env));
  }
};

}  // namespace detail

inline std::vector<Assignment> enumerate_transforms(const InstancePresentation& P, const SaturatedInstance& J,
                                                    std::size_t limit = SIZE_MAX) {
  return detail::TransformSearch(P, J, limit).run();
}

// Violated equations of P under a candidate assignment into J.
inline std::vector<std::string> check_transform(const InstancePresentation& P, const SaturatedInstance& J,
                                                const Assignment& env) {
  std::vector<std::string> bad;
  for (const auto& b : P.gens)
    if (!env.ent.count(b.var) && !env.typ.count(b.var)) bad.push_back("generator " + b.var + " unassigned");
  detail::TransformSearch ts(P, J, 1);
  for (const auto& e : P.eqs)
    if (ts.holds(e, env) != EqResult::Equal)
      bad.push_back(P.schema->show(e.lhs) + " = " + P.schema->show(e.rhs));
  return bad;
}

// ---------------------------------------------------------------- canonical presentation

struct CanonicalPresentation {
  InstancePresentation pres;
  std::map<std::string, std::vector<std::string>> row_gen;  // entity -> generator per row
  std::map<Term, Term, TermLess> dict;                        // atom -> term over generators
  std::vector<std::string> fresh;                             // atoms given their own null
};

inline Term express(Term v, const std::map<Term, Term, TermLess>& dict) { return detail::replace_subterms(v, dict); }

struct AtomSource {
  Term value;
  std::string sort;
  Term expr;  // a term whose value is `value`
};

inline bool is_opaque_atom(Term v) { return v.is_var() || !is_type_symbol(v.head()); }

// Expressions for the atoms that can be recovered from the given cells.
inline std::map<Term, Term, TermLess> atom_dictionary(const std::vector<AtomSource>& cells) {
  std::map<Term, Term, TermLess> dict;
  for (const auto& c : cells)
    if (is_opaque_atom(c.value) && !dict.count(c.value)) dict[c.value] = c.expr;
  for (bool changed = true; changed;) {
    changed = false;
    for (const auto& c : cells) {
      if (c.sort != "Int") continue;
      ts::Poly p = Canon().poly(c.value);
      Term unknown;
      BigInt coef;
      bool ok = true;
      for (auto& [m, k] : p)
        for (auto& [x, d] : m)
          if (!dict.count(x)) {
            if (!unknown.null() && unknown != x) ok = false;
            if (m.size() != 1 || d != 1 || (k != 1 && k != -1)) ok = false;
            unknown = x;
            coef = k;
          }
      if (!ok || unknown.null()) continue;
      ts::Poly rest = p;
      rest.erase(ts::Monomial{{unknown, 1}});
      Term r = express(ts::poly_term(rest), dict);
      dict[unknown] = coef == 1 ? Term::app("+", {c.expr, Term::app("neg", {r})})
                                : Term::app("+", {r, Term::app("neg", {c.expr})});
      changed = true;
    }
  }
  return dict;
}

inline CanonicalPresentation canonical_presentation(const SaturatedInstance& J) {
  CanonicalPresentation C;
  const Schema& S = *J.schema;
  C.pres.name = J.name;
  C.pres.schema = J.schema;
  std::set<std::string> used;
  for (const auto& e : S.pres.entities) {
    auto& names = C.row_gen[e];
    for (std::size_t i = 0; i < J.rows(e); ++i) {
      std::string n = J.row_name(e, i);
      if (used.count(n)) n = n + "#" + e + std::to_string(i);
      used.insert(n);
      names.push_back(n);
      C.pres.gens.add(n, e);
    }
  }
  auto gen = [&](const std::string& e, std::size_t i) { return Term::var(C.row_gen[e][i]); };
  std::vector<AtomSource> src;
  for (const auto& a : S.pres.attributes)
    for (std::size_t i = 0; i < J.rows(a.dom[0]); ++i)
      src.push_back({J.cell(a.name, i), a.cod, unary(a.name, gen(a.dom[0], i))});
  C.dict = atom_dictionary(src);

  std::size_t k = 0;
  auto fresh_null = [&](Term atom, const std::string& s) {
    std::string n;
    if (atom.is_var() && !used.count(atom.head()))
      n = atom.head();
    else
      do n = "n" + std::to_string(++k);
      while (used.count(n));
    used.insert(n);
    C.pres.gens.add(n, s);
    C.dict[atom] = Term::var(n);
    C.fresh.push_back(n);
  };
  for (const auto& a : S.pres.attributes)
    for (std::size_t i = 0; i < J.rows(a.dom[0]); ++i)
      for (auto& [x, s] : value_atoms_sorted(J.cell(a.name, i), a.cod))
        if (!C.dict.count(x)) fresh_null(x, s);

  for (const auto& f : S.pres.edges)
    for (std::size_t i = 0; i < J.rows(f.dom[0]); ++i)
      C.pres.eqs.push_back({Context{}, unary(f.name, gen(f.dom[0], i)), gen(f.cod, J.follow(f.name, i)), f.cod});
  for (const auto& a : S.pres.attributes)
    for (std::size_t i = 0; i < J.rows(a.dom[0]); ++i) {
      Term lhs = unary(a.name, gen(a.dom[0], i)), rhs = express(J.cell(a.name, i), C.dict);
      if (lhs != rhs) C.pres.eqs.push_back({Context{}, lhs, rhs, a.cod});
    }
  for (const auto& e : J.type_equations()) {
    bool ok = true;
    for (Term side : {e.lhs, e.rhs})
      for (Term x : value_atoms(side, e.sort))
        if (!C.dict.count(x)) ok = false;
    if (ok) C.pres.eqs.push_back({Context{}, express(e.lhs, C.dict), express(e.rhs, C.dict), e.sort});
  }
  return C;
}

// ---------------------------------------------------------------- hom-sets of the entity category

struct EntityCategory {
  std::map<std::pair<std::string, std::string>, std::vector<Term>> homs;  // paths over kMapVar
  const std::vector<Term>& hom(const std::string& a, const std::string& b) const {
    static const std::vector<Term> none;
    auto it = homs.find({a, b});
    return it == homs.end() ? none : it->second;
  }
  std::size_t total() const {
    std::size_t n = 0;
    for (auto& [_, v] : homs) n += v.size();
    return n;
  }
};

inline EntityCategory saturate_entity_category(const SchemaRef& S, std::size_t budget = 10000) {
  EntityCategory C;
  for (const auto& a : S->pres.entities) {
    auto J = saturate(representable(S, a), budget, true);
    for (const auto& b : S->pres.entities) C.homs[{a, b}] = J.reps[b];
  }
  return C;
}

// Observable with its entity paths in normal form.
inline Term normalize_paths(Term t, const Schema& S) {
  if (t.is_var()) return t;
  if (t.arity() == 1 && S.is_edge(t.head())) return normalize(t, S.entity_rs);
  if (t.arity() == 0) return t;
  std::vector<Term> a;
  for (Term x : t.args()) a.push_back(normalize_paths(x, S));
  return Term::app(t.head(), a);
}

// Violations of F as a morphism of schemas; empty when F is valid.
inline std::vector<std::string> check_mapping(const SchemaMapping& F, std::size_t budget = 10000) {
  validate_mapping_shape(F);
  std::vector<std::string> bad;
  for (const auto& e : F.src->pres.path_eqs) {
    Term l = normalize(translate(e.lhs, F), F.dst->entity_rs), r = normalize(translate(e.rhs, F), F.dst->entity_rs);
    if (l != r) bad.push_back("path equation " + to_string(e) + " maps to " + F.dst->show(l) + " != " + F.dst->show(r));
  }
  std::map<std::string, SaturatedInstance> reps;
  for (const auto& e : F.src->pres.obs_eqs) {
    const std::string& v = e.ctx[0].var;
    std::string t = map_sort(e.ctx[0].sort, F);
    auto P = representable(F.dst, t, v);
    auto J = saturate(P, budget);
    Assignment env;
    env.ent[v] = J.gen_rows.at(v);
    auto l = eval_type(J, translate(e.lhs, F), e.sort, env), r = eval_type(J, translate(e.rhs, F), e.sort, env);
    if (J.decide(*l, *r, e.sort) != EqResult::Equal)
      bad.push_back("observation equation " + to_string(e) + " is not preserved");
  }
  return bad;
}

// Reason F fails to be a discrete opfibration, or nullopt when it is one.
inline std::optional<std::string> discrete_opfibration_failure(const SchemaMapping& F, std::size_t budget = 10000) {
  auto CS = saturate_entity_category(F.src, budget), CT = saturate_entity_category(F.dst, budget);
  const Schema& T = *F.dst;
  Term x = Term::var(kMapVar);
  for (const auto& s : F.src->pres.entities) {
    std::string fs = F.entity_map.at(s);
    for (const auto& t : T.pres.entities)
      for (Term u : CT.hom(fs, t)) {
        Term nu = normalize(u, T.entity_rs);
        int lifts = 0;
        for (const auto& s2 : F.src->pres.entities) {
          if (F.entity_map.at(s2) != t) continue;
          for (Term v : CS.hom(s, s2))
            if (normalize(translate(v, F), T.entity_rs) == nu) ++lifts;
        }
        if (lifts != 1)
          return "morphism " + T.show(u) + " out of " + fs + " has " + std::to_string(lifts) + " lifts at " + s;
        for (const auto* a : T.attributes_of(t)) {
          Term want = normalize_paths(unary(a->name, nu), T);
          int alifts = 0;
          for (const auto& s2 : F.src->pres.entities)
            for (Term v : CS.hom(s, s2))
              for (const auto* b : F.src->attributes_of(s2))
                if (normalize_paths(translate(unary(b->name, v), F), T) == want) ++alifts;
          if (alifts != 1)
            return "observable " + T.show(want) + " has " + std::to_string(alifts) + " lifts at " + s;
        }
      }
  }
  (void)x;
  return std::nullopt;
}

inline bool is_discrete_opfibration(const SchemaMapping& F, std::size_t budget = 10000) {
  return !discrete_opfibration_failure(F, budget);
}

// ---------------------------------------------------------------- isomorphism

namespace detail {

class IsoSearch {
 public:
  IsoSearch(const SaturatedInstance& A, const SaturatedInstance& B) : A_(A), B_(B) {}

  std::optional<std::map<std::string, std::vector<std::size_t>>> run() {
    const Schema& S = *A_.schema;
    St st;
    for (const auto& e : S.pres.entities) {
      if (A_.rows(e) != B_.rows(e) || !B_.schema->is_entity(e)) return std::nullopt;
      st.fwd[e].assign(A_.rows(e), -1);
      st.used[e].assign(B_.rows(e), false);
    }
    if (auto r = dfs(std::move(st))) return r;
    return std::nullopt;
  }

 private:
  struct St {
    std::map<std::string, std::vector<long>> fwd;
    std::map<std::string, std::vector<bool>> used;
    std::map<Term, Term, TermLess> atoms, back;
  };
  const SaturatedInstance& A_;
  const SaturatedInstance& B_;

  bool match(Term a, Term b, St& st) const {
    if (A_.alg == B_.alg) return a == b;
    bool aa = a.is_var() || !is_type_symbol(a.head()), ba = b.is_var() || !is_type_symbol(b.head());
    if (aa || ba) {
      if (aa != ba) return false;
      auto f = st.atoms.find(a), g = st.back.find(b);
      if (f != st.atoms.end() || g != st.back.end())
        return f != st.atoms.end() && g != st.back.end() && f->second == b && g->second == a;
      st.atoms[a] = b;
      st.back[b] = a;
      return true;
    }
    if (a.head() != b.head() || a.arity() != b.arity()) return false;
    for (std::size_t i = 0; i < a.arity(); ++i)
      if (!match(a.arg(i), b.arg(i), st)) return false;
    return true;
  }

  bool assign(St& st, const std::string& e, std::size_t i, std::size_t j) const {
    const Schema& S = *A_.schema;
    std::vector<std::tuple<std::string, std::size_t, std::size_t>> todo{{e, i, j}};
    while (!todo.empty()) {
      auto [en, a, b] = todo.back();
      todo.pop_back();
      long& f = st.fwd[en][a];
      if (f >= 0) {
        if (static_cast<std::size_t>(f) != b) return false;
        continue;
      }
      if (st.used[en][b]) return false;
      f = static_cast<long>(b);
      st.used[en][b] = true;
      for (const auto* g : S.edges_from(en)) {
        if (!B_.edges.count(g->name)) return false;
        todo.push_back({g->cod, A_.follow(g->name, a), B_.follow(g->name, b)});
      }
      for (const auto* at : S.attributes_of(en)) {
        if (!B_.cells.count(at->name)) return false;
        if (!match(A_.cell(at->name, a), B_.cell(at->name, b), st)) return false;
      }
    }
    return true;
  }

  std::optional<std::map<std::string, std::vector<std::size_t>>> dfs(St st) const {
    for (const auto& e : A_.schema->pres.entities) {
      auto& fw = st.fwd[e];
      for (std::size_t i = 0; i < fw.size(); ++i) {
        if (fw[i] >= 0) continue;
        for (std::size_t j = 0; j < fw.size(); ++j) {
          if (st.used[e][j]) continue;
          St next = st;
          if (!assign(next, e, i, j)) continue;
          if (auto r = dfs(std::move(next))) return r;
        }
        return std::nullopt;
      }
    }
    std::map<std::string, std::vector<std::size_t>> out;
    for (auto& [e, v] : st.fwd)
      for (long x : v) out[e].push_back(static_cast<std::size_t>(x));
    return out;
  }
};

}  // namespace detail

inline std::optional<std::map<std::string, std::vector<std::size_t>>> find_isomorphism(const SaturatedInstance& A,
                                                                                      const SaturatedInstance& B) {
  return detail::IsoSearch(A, B).run();
}

inline bool isomorphic(const SaturatedInstance& A, const SaturatedInstance& B) {
  return find_isomorphism(A, B).has_value();
}

}  // namespace catdb
