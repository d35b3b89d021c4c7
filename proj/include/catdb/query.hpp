#pragma once

#include "catdb/migration.hpp"

namespace catdb {

inline const std::string kResultEntity = "*";

struct Query {
  std::string name;
  SchemaRef schema;
  Context for_ctx;
  std::vector<Equation> where_eqs;
  Context return_ctx;
  ContextMorphism return_morph;  // for_ctx -> return_ctx
};

inline Query make_query(const std::string& name, const SchemaRef& S, const Context& for_ctx,
                        const std::vector<std::pair<Term, Term>>& where,
                        const std::vector<std::pair<std::string, Term>>& ret) {
  Query Q{name, S, for_ctx, {}, {}, {}};
  for (const auto& b : for_ctx)
    if (!S->is_entity(b.sort) && !is_type_sort(b.sort)) throw Error(ErrorKind::UnknownSort, b.sort);
  for (auto& [l, r] : where) {
    std::string a = S->sort_of(l, for_ctx), b = S->sort_of(r, for_ctx);
    if (a != b) throw Error(ErrorKind::SortMismatch, S->show(l) + " = " + S->show(r));
    Q.where_eqs.push_back({Context{}, l, r, a});
  }
  for (auto& [v, t] : ret) {
    std::string s = S->sort_of(t, for_ctx);
    if (!is_type_sort(s)) throw Error(ErrorKind::SortMismatch, "return " + v + " has entity sort " + s);
    Q.return_ctx.add(v, s);
    Q.return_morph.assign.push_back(t);
  }
  Q.return_morph.source = for_ctx;
  Q.return_morph.target = Q.return_ctx;
  return Q;
}

// FOR variables of type sort; empty when the query is domain independent.
inline std::vector<std::string> check_domain_independence(const Query& Q) {
  std::vector<std::string> bad;
  for (const auto& b : Q.for_ctx)
    if (!Q.schema->is_entity(b.sort)) bad.push_back(b.var);
  return bad;
}

inline InstancePresentation frozen_instance(const Query& Q) {
  return InstancePresentation{"frozen " + Q.name, Q.schema, Q.for_ctx, Q.where_eqs};
}

inline SchemaRef query_result_schema(const Query& Q) {
  SchemaPresentation p;
  p.entities = {kResultEntity};
  for (const auto& b : Q.return_ctx) p.attributes.push_back({b.var, {kResultEntity}, b.sort, true});
  return compile_schema(p, "R_" + Q.name);
}

inline std::pair<SchemaRef, BimodulePresentation> query_to_bimodule(const Query& Q) {
  auto R = query_result_schema(Q);
  BimodulePresentation M{"bimodule " + Q.name, R, Q.schema, {}, {}, {}};
  Term x = Term::var(kMapVar);
  Subst s;
  for (const auto& b : Q.for_ctx) {
    if (!Q.schema->is_entity(b.sort)) throw Error(ErrorKind::DomainDependence, b.var);
    M.gen_edges.push_back({b.var, {kResultEntity}, b.sort, true});
    s[b.var] = unary(b.var, x);
  }
  Context c{{kMapVar, kResultEntity}};
  for (const auto& e : Q.where_eqs) M.eqs.push_back({c, apply_subst(e.lhs, s), apply_subst(e.rhs, s), e.sort});
  for (std::size_t i = 0; i < Q.return_ctx.size(); ++i)
    M.eqs.push_back({c, unary(Q.return_ctx[i].var, x), apply_subst(Q.return_morph.assign[i], s),
                     Q.return_ctx[i].sort});
  return {R, M};
}

struct QueryResult {
  SaturatedInstance table;
  std::vector<Assignment> tuples;
};

inline SaturatedInstance result_table(const SchemaRef& R, const std::string& entity, const SaturatedInstance& J,
                                      const std::vector<Assignment>& tuples,
                                      const std::vector<std::pair<std::string, Term>>& ret, SaturatedInstance out) {
  auto& reps = out.reps[entity];
  for (std::size_t i = 0; i < tuples.size(); ++i) reps.push_back(Term::var(std::to_string(i + 1)));
  for (auto& [a, t] : ret) {
    const Symbol* sym = R->attribute(a);
    auto& col = out.cells[a];
    for (const auto& rho : tuples) col.push_back(*eval_type(J, t, sym->cod, rho));
  }
  return out;
}

inline QueryResult eval_query(const Query& Q, const SaturatedInstance& J) {
  auto bad = check_domain_independence(Q);
  if (!bad.empty()) {
    std::string v;
    for (auto& b : bad) v += (v.empty() ? "" : ", ") + b;
    throw Error(ErrorKind::DomainDependence, "type-sorted FOR variables: " + v);
  }
  QueryResult res;
  res.tuples = enumerate_transforms(frozen_instance(Q), J);
  auto R = query_result_schema(Q);
  SaturatedInstance out;
  out.name = Q.name + "(" + J.name + ")";
  out.schema = R;
  out.alg = J.alg;
  std::vector<std::pair<std::string, Term>> ret;
  for (std::size_t i = 0; i < Q.return_ctx.size(); ++i) ret.push_back({Q.return_ctx[i].var, Q.return_morph.assign[i]});
  res.table = result_table(R, kResultEntity, J, res.tuples, ret, out);
  return res;
}

// Describes the first disagreement between two tables, or nullopt when isomorphic.
inline std::optional<std::string> table_mismatch(const SaturatedInstance& A, const SaturatedInstance& B) {
  if (find_isomorphism(A, B)) return std::nullopt;
  for (const auto& e : A.schema->pres.entities) {
    if (A.rows(e) != B.rows(e))
      return e + ": " + std::to_string(A.rows(e)) + " rows vs " + std::to_string(B.rows(e));
    for (std::size_t i = 0; i < A.rows(e); ++i) {
      bool found = false;
      for (std::size_t j = 0; j < B.rows(e) && !found; ++j) {
        bool same = true;
        for (const auto* a : A.schema->attributes_of(e))
          if (A.decide(A.cell(a->name, i), B.cell(a->name, j), a->cod) != EqResult::Equal) same = false;
        found = same;
      }
      if (!found) {
        std::string cells;
        for (const auto* a : A.schema->attributes_of(e))
          cells += " " + a->name + "=" + A.schema->show(A.cell(a->name, i));
        return e + " row " + A.row_name(e, i) + " has no counterpart:" + cells;
      }
    }
  }
  return "edge columns disagree";
}

inline std::optional<std::string> crosscheck_migration(const Query& Q, const SaturatedInstance& J,
                                                       std::size_t budget = 10000) {
  auto direct = eval_query(Q, J).table;
  auto [R, M] = query_to_bimodule(Q);
  auto via = gamma(M, J, budget);
  if (via.alg != J.alg) return std::string("type algebra changed");
  return table_mismatch(direct, via);
}

// ---------------------------------------------------------------- uber-queries

struct UberBlock {
  std::string entity;
  Context for_ctx;
  std::vector<Equation> where_eqs;
  std::map<std::string, ContextMorphism> keys;  // result edge -> (this block's FOR) -> (target block's FOR)
  std::vector<std::pair<std::string, Term>> ret;
};

struct UberQuery {
  std::string name;
  SchemaRef schema;
  SchemaRef result;
  std::vector<UberBlock> blocks;

  const UberBlock& block(const std::string& e) const {
    for (const auto& b : blocks)
      if (b.entity == e) return b;
    throw Error(ErrorKind::SchemaMismatch, "no block for entity " + e);
  }
};

inline InstancePresentation frozen_block(const UberQuery& N, const UberBlock& b) {
  return InstancePresentation{"frozen " + b.entity, N.schema, b.for_ctx, b.where_eqs};
}

// Problems with the keys of an uber-query; empty when every keys morphism is a transform.
inline std::vector<std::string> check_uber_query(const UberQuery& N, std::size_t budget = 10000) {
  std::vector<std::string> bad;
  for (const auto& e : N.result->pres.entities) N.block(e);
  for (const auto& b : N.blocks) {
    if (!N.result->is_entity(b.entity)) bad.push_back("block " + b.entity + " is not a result entity");
    for (const auto& v : b.for_ctx)
      if (!N.schema->is_entity(v.sort)) bad.push_back("block " + b.entity + ": " + v.var + " is type-sorted");
    for (const auto* a : N.result->attributes_of(b.entity)) {
      bool ok = false;
      for (auto& [n, t] : b.ret) ok = ok || n == a->name;
      if (!ok) bad.push_back("block " + b.entity + " does not return " + a->name);
    }
    for (const auto* f : N.result->edges_from(b.entity)) {
      auto it = b.keys.find(f->name);
      if (it == b.keys.end()) {
        bad.push_back("block " + b.entity + " has no keys for " + f->name);
        continue;
      }
      const UberBlock& tgt = N.block(f->cod);
      const ContextMorphism& k = it->second;
      if (!(k.target == tgt.for_ctx)) {
        bad.push_back("keys " + f->name + " do not cover the FOR clause of " + tgt.entity);
        continue;
      }
      k.validate(N.schema->collage_sig);
      auto src = saturate(frozen_block(N, b), budget);
      Assignment env, base;
      for (const auto& v : b.for_ctx) base.ent[v.var] = src.gen_rows.at(v.var);
      for (std::size_t i = 0; i < k.target.size(); ++i) env.ent[k.target[i].var] = *eval_entity(src, k.assign[i], base);
      for (const auto& v : check_transform(frozen_block(N, tgt), src, env))
        bad.push_back("keys " + f->name + " violate " + v);
    }
  }
  return bad;
}

inline SaturatedInstance eval_uber_query(const UberQuery& N, const SaturatedInstance& J, std::size_t budget = 10000) {
  auto bad = check_uber_query(N, budget);
  if (!bad.empty()) throw Error(ErrorKind::InvalidKeys, bad.front());
  SaturatedInstance out;
  out.name = N.name + "(" + J.name + ")";
  out.schema = N.result;
  out.alg = J.alg;
  std::map<std::string, std::vector<Assignment>> rows;
  for (const auto& e : N.result->pres.entities) {
    const UberBlock& b = N.block(e);
    rows[e] = enumerate_transforms(frozen_block(N, b), J);
    out = result_table(N.result, e, J, rows[e], b.ret, out);
  }
  for (const auto& f : N.result->pres.edges) {
    const UberBlock& b = N.block(f.dom[0]);
    const ContextMorphism& k = b.keys.at(f.name);
    std::map<std::map<std::string, std::size_t>, std::size_t> lookup;
    for (std::size_t i = 0; i < rows[f.cod].size(); ++i) lookup[rows[f.cod][i].ent] = i;
    auto& col = out.edges[f.name];
    for (const auto& rho : rows[f.dom[0]]) {
      std::map<std::string, std::size_t> img;
      for (std::size_t i = 0; i < k.target.size(); ++i) img[k.target[i].var] = *eval_entity(J, k.assign[i], rho);
      auto it = lookup.find(img);
      if (it == lookup.end()) throw Error(ErrorKind::InvalidKeys, "keys " + f.name + " leave the result rows");
      col.push_back(it->second);
    }
  }
  return out;
}

}  // namespace catdb
