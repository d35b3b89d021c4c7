#pragma once

#include "catdb/instance.hpp"

namespace catdb {

// ---------------------------------------------------------------- Δ

inline SaturatedInstance delta(const SchemaMapping& F, const SaturatedInstance& K) {
  if (K.schema.get() != F.dst.get() && K.schema->name != F.dst->name)
    throw Error(ErrorKind::SchemaMismatch, "instance " + K.name + " is not on " + F.dst->name);
  const Schema& S = *F.src;
  SaturatedInstance D;
  D.name = "delta " + F.name + " " + K.name;
  D.schema = F.src;
  D.alg = K.alg;
  for (const auto& s : S.pres.entities) D.reps[s] = K.reps.at(F.entity_map.at(s));
  for (const auto& f : S.pres.edges) {
    auto& col = D.edges[f.name];
    for (std::size_t i = 0; i < D.rows(f.dom[0]); ++i) {
      Assignment env;
      env.ent[kMapVar] = i;
      col.push_back(*eval_entity(K, F.edge_map.at(f.name), env));
    }
  }
  for (const auto& a : S.pres.attributes) {
    auto& col = D.cells[a.name];
    for (std::size_t i = 0; i < D.rows(a.dom[0]); ++i) {
      Assignment env;
      env.ent[kMapVar] = i;
      col.push_back(*eval_type(K, F.attr_map.at(a.name), a.cod, env));
    }
  }
  return D;
}

// ---------------------------------------------------------------- Σ

inline InstancePresentation sigma(const SchemaMapping& F, const InstancePresentation& I) {
  InstancePresentation out;
  out.name = "sigma " + F.name + " " + I.name;
  out.schema = F.dst;
  out.gens = translate_ctx(I.gens, F);
  for (const auto& e : I.eqs) {
    Equation t{Context{}, translate(e.lhs, F), translate(e.rhs, F), map_sort(e.sort, F)};
    out.eqs.push_back(t);
  }
  return out;
}

inline SaturatedInstance sigma_pointwise(const SchemaMapping& F, const SaturatedInstance& I,
                                         std::size_t budget = 10000) {
  if (auto why = discrete_opfibration_failure(F, budget)) throw Error(ErrorKind::NotOpfibration, *why);
  const Schema& S = *F.src;
  const Schema& T = *F.dst;
  auto CS = saturate_entity_category(F.src, budget);
  SaturatedInstance out;
  out.name = "sigma " + F.name + " " + I.name;
  out.schema = F.dst;
  out.alg = I.alg;
  // (source entity, source row) of each target row
  std::map<std::string, std::vector<std::pair<std::string, std::size_t>>> origin;
  std::map<std::pair<std::string, std::size_t>, std::size_t> index;
  for (const auto& t : T.pres.entities) {
    auto& reps = out.reps[t];
    for (const auto& s : S.pres.entities) {
      if (F.entity_map.at(s) != t) continue;
      for (std::size_t r = 0; r < I.rows(s); ++r) {
        index[{s, r}] = reps.size();
        origin[t].push_back({s, r});
        reps.push_back(I.rep(s, r));
      }
    }
  }
  auto lift = [&](const std::string& s, Term want) -> std::pair<std::string, Term> {
    for (const auto& s2 : S.pres.entities)
      for (Term v : CS.hom(s, s2))
        if (normalize(translate(v, F), T.entity_rs) == want) return {s2, v};
    throw Error(ErrorKind::NotOpfibration, "no lift of " + T.show(want));
  };
  for (const auto& u : T.pres.edges) {
    auto& col = out.edges[u.name];
    Term want = normalize(unary(u.name, Term::var(kMapVar)), T.entity_rs);
    for (auto& [s, r] : origin[u.dom[0]]) {
      auto [s2, v] = lift(s, want);
      Assignment env;
      env.ent[kMapVar] = r;
      col.push_back(index.at({s2, *eval_entity(I, v, env)}));
    }
  }
  for (const auto& a : T.pres.attributes) {
    auto& col = out.cells[a.name];
    Term want = normalize_paths(unary(a.name, Term::var(kMapVar)), T);
    for (auto& [s, r] : origin[a.dom[0]]) {
      Term val;
      for (const auto& s2 : S.pres.entities)
        for (Term v : CS.hom(s, s2))
          for (const auto* b : S.attributes_of(s2))
            if (val.null() && normalize_paths(translate(unary(b->name, v), F), T) == want) {
              Assignment env;
              env.ent[kMapVar] = r;
              val = *eval_type(I, unary(b->name, v), a.cod, env);
            }
      if (val.null()) throw Error(ErrorKind::NotOpfibration, "no lift of attribute " + a.name);
      col.push_back(val);
    }
  }
  return out;
}

// ---------------------------------------------------------------- Π

inline SaturatedInstance pi(const SchemaMapping& F, const SaturatedInstance& I, std::size_t budget = 10000) {
  if (I.schema.get() != F.src.get() && I.schema->name != F.src->name)
    throw Error(ErrorKind::SchemaMismatch, "instance " + I.name + " is not on " + F.src->name);
  const Schema& S = *F.src;
  const Schema& T = *F.dst;
  const std::string q = "q";
  struct Piece {
    SaturatedInstance Y;
    CanonicalPresentation C;
    std::vector<Assignment> rows;
  };
  std::map<std::string, Piece> piece;
  for (const auto& t : T.pres.entities) {
    Piece p;
    p.Y = saturate(representable(F.dst, t, q), budget);
    p.C = canonical_presentation(delta(F, p.Y));
    p.rows = enumerate_transforms(p.C.pres, I);
    piece[t] = std::move(p);
  }
  auto key = [](const Assignment& a) { return a.ent; };

  SaturatedInstance out;
  out.name = "pi " + F.name + " " + I.name;
  out.schema = F.dst;
  out.alg = I.alg;
  for (const auto& t : T.pres.entities) {
    const Piece& p = piece[t];
    std::vector<Term> reps;
    std::size_t qrow = p.Y.gen_rows.at(q);
    for (const auto& s : S.pres.entities) {
      if (F.entity_map.at(s) != t) continue;
      for (const auto& a : p.rows) reps.push_back(I.rep(s, a.ent.at(p.C.row_gen.at(s)[qrow])));
      break;
    }
    std::set<Term, TermLess> distinct(reps.begin(), reps.end());
    if (reps.size() != p.rows.size() || distinct.size() != reps.size()) {
      reps.clear();
      std::string base = t;
      std::transform(base.begin(), base.end(), base.begin(), [](unsigned char c) { return std::tolower(c); });
      for (std::size_t i = 0; i < p.rows.size(); ++i) reps.push_back(Term::var(base + std::to_string(i + 1)));
    }
    out.reps[t] = reps;
  }
  for (const auto& u : T.pres.edges) {
    const Piece& src = piece[u.dom[0]];
    const Piece& dst = piece[u.cod];
    std::map<std::map<std::string, std::size_t>, std::size_t> lookup;
    for (std::size_t i = 0; i < dst.rows.size(); ++i) lookup[key(dst.rows[i])] = i;
    Assignment qenv;
    qenv.ent[q] = src.Y.gen_rows.at(q);
    Subst shift{{q, unary(u.name, Term::var(q))}};
    auto& col = out.edges[u.name];
    for (const auto& rho : src.rows) {
      std::map<std::string, std::size_t> img;
      for (const auto& s : S.pres.entities) {
        const std::string& fs = F.entity_map.at(s);
        for (std::size_t w = 0; w < dst.Y.rows(fs); ++w) {
          std::size_t r = *eval_entity(src.Y, apply_subst(dst.Y.rep(fs, w), shift), qenv);
          img[dst.C.row_gen.at(s)[w]] = rho.ent.at(src.C.row_gen.at(s)[r]);
        }
      }
      auto it = lookup.find(img);
      if (it == lookup.end()) throw Error(ErrorKind::DomainDependence, "edge " + u.name + " leaves the computed rows");
      col.push_back(it->second);
    }
  }
  for (const auto& a : T.pres.attributes) {
    const Piece& p = piece[a.dom[0]];
    Term v = p.Y.cell(a.name, p.Y.gen_rows.at(q));
    for (Term x : value_atoms(v, a.cod))
      if (!p.C.dict.count(x))
        throw Error(ErrorKind::DomainDependence, "attribute " + a.name + " is not determined by " + S.name);
    Term e = express(v, p.C.dict);
    auto& col = out.cells[a.name];
    for (const auto& rho : p.rows) col.push_back(*eval_type(I, e, a.cod, rho));
  }
  return out;
}

// ---------------------------------------------------------------- bimodules

struct BimodulePresentation {
  std::string name;
  SchemaRef src;
  SchemaRef dst;
  std::vector<Symbol> gen_edges;  // src entity -> dst entity
  std::vector<Symbol> gen_attrs;  // src entity -> type sort
  std::vector<Equation> eqs;      // context (x : src entity)
};

struct CollageSchema {
  SchemaRef schema;
  SchemaMapping incl_src;
  SchemaMapping incl_dst;
};

namespace detail {

class CollageBuilder {
 public:
  SchemaPresentation pres;

  CollageBuilder() {
    for (const auto& s : type_signature().sorts()) sorts_.insert(s);
    for (const auto& f : type_signature().symbols()) taken_.insert(f.name);
  }

  // Adds a schema; names that clash get the schema's name as prefix.
  SchemaMapping add_schema(const SchemaRef& s) {
    SchemaMapping m{"incl " + s->name, s, nullptr, {}, {}, {}};
    Term x = Term::var(kMapVar);
    for (const auto& e : s->pres.entities) {
      std::string n = claim(e, s->name, sorts_);
      m.entity_map[e] = n;
      pres.entities.push_back(n);
    }
    std::map<std::string, std::string> ren;
    for (const auto& f : s->pres.edges) {
      std::string n = claim(f.name, s->name, taken_);
      ren[f.name] = n;
      m.edge_map[f.name] = unary(n, x);
      pres.edges.push_back({n, {m.entity_map[f.dom[0]]}, m.entity_map[f.cod], true});
    }
    for (const auto& f : s->pres.attributes) {
      std::string n = claim(f.name, s->name, taken_);
      ren[f.name] = n;
      m.attr_map[f.name] = unary(n, x);
      pres.attributes.push_back({n, {m.entity_map[f.dom[0]]}, f.cod, true});
    }
    auto fix = [&](const Equation& e) {
      Context c{{e.ctx[0].var, m.entity_map[e.ctx[0].sort]}};
      return Equation{c, translate(e.lhs, m), translate(e.rhs, m), map_sort(e.sort, m)};
    };
    for (const auto& e : s->pres.path_eqs) pres.path_eqs.push_back(fix(e));
    for (const auto& e : s->pres.obs_eqs) pres.obs_eqs.push_back(fix(e));
    return m;
  }

  // Adds M's generators and equations; returns generator name -> collage name.
  std::map<std::string, std::string> add_bimodule(const BimodulePresentation& M, const SchemaMapping& ms,
                                                  const SchemaMapping& md, bool rename = false) {
    std::map<std::string, std::string> gens;
    auto take = [&](const std::string& n) {
      if (!rename) {
        if (!taken_.insert(n).second) throw Error(ErrorKind::NameClash, "generator " + n);
        return n;
      }
      return claim(n, "m", taken_);
    };
    for (const auto& g : M.gen_edges) {
      if (!M.src->is_entity(g.dom.at(0)) || !M.dst->is_entity(g.cod))
        throw Error(ErrorKind::SortMismatch, "generator " + g.name + " must go from " + M.src->name + " to " +
                                                 M.dst->name);
      gens[g.name] = take(g.name);
      pres.edges.push_back({gens[g.name], {ms.entity_map.at(g.dom[0])}, md.entity_map.at(g.cod), true});
    }
    for (const auto& g : M.gen_attrs) {
      if (!M.src->is_entity(g.dom.at(0)) || !is_type_sort(g.cod))
        throw Error(ErrorKind::SortMismatch, "generator " + g.name);
      gens[g.name] = take(g.name);
      pres.attributes.push_back({gens[g.name], {ms.entity_map.at(g.dom[0])}, g.cod, true});
    }
    for (const auto& e : M.eqs) {
      if (e.ctx.size() != 1 || !M.src->is_entity(e.ctx[0].sort))
        throw Error(ErrorKind::ContextMismatch, "bimodule equations need one source variable");
      auto [l, s] = resolve_side(M, e.lhs, e.ctx, ms, md, gens);
      auto [r, s2] = resolve_side(M, e.rhs, e.ctx, ms, md, gens);
      if (s != s2) throw Error(ErrorKind::SortMismatch, to_string(e.lhs) + " = " + to_string(e.rhs));
      Context c{{e.ctx[0].var, ms.entity_map.at(e.ctx[0].sort)}};
      Equation out{c, l, r, s};
      (is_type_sort(s) ? pres.obs_eqs : pres.path_eqs).push_back(out);
    }
    return gens;
  }

  // Term of a bimodule equation in collage names, with its collage sort.
  static std::pair<Term, std::string> resolve_side(const BimodulePresentation& M, Term t, const Context& ctx,
                                                   const SchemaMapping& ms, const SchemaMapping& md,
                                                   const std::map<std::string, std::string>& gens = {}) {
    enum Side { Src, Dst, Type };
    std::function<std::tuple<Term, Side, std::string>(Term)> go = [&](Term u) -> std::tuple<Term, Side, std::string> {
      if (u.is_var()) {
        const std::string* s = ctx.find(u.head());
        if (!s) throw Error(ErrorKind::UnknownVariable, u.head());
        return {u, Src, *s};
      }
      if (u.arity() == 1) {
        const std::string& h = u.head();
        bool edge_or_attr = M.src->is_edge(h) || M.src->is_attribute(h) || M.dst->is_edge(h) ||
                            M.dst->is_attribute(h);
        const Symbol* gen = nullptr;
        for (const auto& g : M.gen_edges)
          if (g.name == h) gen = &g;
        for (const auto& g : M.gen_attrs)
          if (g.name == h) gen = &g;
        if (edge_or_attr || gen) {
          auto [a, side, sort] = go(u.arg(0));
          if (side == Src && gen && gen->dom[0] == sort) {
            auto it = gens.find(h);
            return {unary(it == gens.end() ? h : it->second, a), is_type_sort(gen->cod) ? Type : Dst, gen->cod};
          }
          const Schema& sch = side == Src ? *M.src : *M.dst;
          const SchemaMapping& mm = side == Src ? ms : md;
          if (side != Type) {
            if (const Symbol* f = sch.edge(h); f && f->dom[0] == sort)
              return {apply_subst(mm.edge_map.at(h), Subst{{kMapVar, a}}), side, f->cod};
            if (const Symbol* f = sch.attribute(h); f && f->dom[0] == sort)
              return {apply_subst(mm.attr_map.at(h), Subst{{kMapVar, a}}), Type, f->cod};
          }
          throw Error(ErrorKind::SortMismatch, "cannot apply " + h + " to " + to_string(u.arg(0)));
        }
      }
      auto f = type_signature().lookup(u.head());
      if (!f) throw Error(ErrorKind::UnknownSymbol, u.head());
      std::vector<Term> args;
      for (Term a : u.args()) args.push_back(std::get<0>(go(a)));
      return {Term::app(u.head(), args), Type, f->cod};
    };
    auto [term, side, sort] = go(t);
    std::string s = side == Type ? sort : (side == Src ? ms.entity_map.at(sort) : md.entity_map.at(sort));
    return {term, s};
  }

 private:
  std::set<std::string> sorts_;
  std::set<std::string> taken_;

  static std::string claim(const std::string& n, const std::string& prefix, std::set<std::string>& used) {
    std::string out = n;
    while (used.count(out)) out = prefix + "_" + out;
    used.insert(out);
    return out;
  }
};

}  // namespace detail

inline CollageSchema collage_of_bimodule(const BimodulePresentation& M, std::size_t budget = 10000) {
  detail::CollageBuilder b;
  SchemaMapping ms = b.add_schema(M.src);
  SchemaMapping md = b.add_schema(M.dst);
  b.add_bimodule(M, ms, md);
  auto C = compile_schema(b.pres, "Col(" + M.name + ")", budget);
  ms.dst = C;
  md.dst = C;
  ms.name = "i_" + M.src->name;
  md.name = "i_" + M.dst->name;
  return CollageSchema{C, ms, md};
}

inline BimodulePresentation companion_presentation(const SchemaMapping& F) {
  BimodulePresentation M{"comp " + F.name, F.src, F.dst, {}, {}, {}};
  Term x = Term::var(kMapVar);
  auto psi = [](const std::string& r) { return "psi_" + r; };
  for (const auto& r : F.src->pres.entities) M.gen_edges.push_back({psi(r), {r}, F.entity_map.at(r), true});
  for (const auto& f : F.src->pres.edges) {
    Term l = unary(psi(f.cod), unary(f.name, x));
    Term r = apply_subst(F.edge_map.at(f.name), Subst{{kMapVar, unary(psi(f.dom[0]), x)}});
    M.eqs.push_back({Context{{kMapVar, f.dom[0]}}, l, r, F.entity_map.at(f.cod)});
  }
  for (const auto& a : F.src->pres.attributes) {
    Term r = apply_subst(F.attr_map.at(a.name), Subst{{kMapVar, unary(psi(a.dom[0]), x)}});
    M.eqs.push_back({Context{{kMapVar, a.dom[0]}}, unary(a.name, x), r, a.cod});
  }
  return M;
}

inline BimodulePresentation conjoint_presentation(const SchemaMapping& F) {
  BimodulePresentation M{"conj " + F.name, F.dst, F.src, {}, {}, {}};
  Term x = Term::var(kMapVar);
  auto phi = [](const std::string& r) { return "phi_" + r; };
  for (const auto& r : F.src->pres.entities) M.gen_edges.push_back({phi(r), {F.entity_map.at(r)}, r, true});
  for (const auto& f : F.src->pres.edges) {
    Term l = unary(f.name, unary(phi(f.dom[0]), x));
    Term r = unary(phi(f.cod), F.edge_map.at(f.name));
    M.eqs.push_back({Context{{kMapVar, F.entity_map.at(f.dom[0])}}, l, r, f.cod});
  }
  for (const auto& a : F.src->pres.attributes) {
    Term l = unary(a.name, unary(phi(a.dom[0]), x));
    M.eqs.push_back({Context{{kMapVar, F.entity_map.at(a.dom[0])}}, l, F.attr_map.at(a.name), a.cod});
  }
  return M;
}

namespace detail {

// Renames collage symbols back to the names of the schema they came from.
inline Term rename_back(Term t, const std::map<std::string, std::string>& back) {
  if (t.is_var() || t.arity() == 0) return t;
  std::vector<Term> a;
  for (Term x : t.args()) a.push_back(rename_back(x, back));
  auto it = back.find(t.head());
  return Term::app(it == back.end() ? t.head() : it->second, a);
}

inline void invert_into(const SchemaMapping& m, std::map<std::string, std::string>& back) {
  for (auto& [f, p] : m.edge_map) back[p.head()] = f;
  for (auto& [f, p] : m.attr_map) back[p.head()] = f;
}

}  // namespace detail

// M : R -|-> S and N : S -|-> U give R -|-> U; every element of the composite becomes a generator.
inline BimodulePresentation compose_bimodules(const BimodulePresentation& M, const BimodulePresentation& N,
                                              std::size_t budget = 10000) {
  if (M.dst.get() != N.src.get() && M.dst->name != N.src->name)
    throw Error(ErrorKind::SchemaMismatch, "cannot compose " + M.name + " with " + N.name);
  detail::CollageBuilder b;
  SchemaMapping mr = b.add_schema(M.src), ms = b.add_schema(M.dst), mu = b.add_schema(N.dst);
  auto gm = b.add_bimodule(M, mr, ms, true);
  auto gn = b.add_bimodule(N, ms, mu, true);
  auto K = compile_schema(b.pres, "Col(" + M.name + "," + N.name + ")", budget);
  const Schema& R = *M.src;
  const Schema& U = *N.dst;

  std::map<std::string, std::string> back;
  detail::invert_into(mr, back);
  detail::invert_into(mu, back);
  std::map<std::string, std::string> kent_u;  // collage entity -> U entity
  for (auto& [e, k] : mu.entity_map) kent_u[k] = e;

  BimodulePresentation out{M.name + ";" + N.name, M.src, N.dst, {}, {}, {}};
  Term x = Term::var(kMapVar);
  std::map<std::string, SaturatedInstance> Y;
  std::map<std::string, std::map<std::pair<std::string, std::size_t>, std::string>> gname;
  for (const auto& r : R.pres.entities) {
    Y[r] = saturate(representable(K, mr.entity_map.at(r), kMapVar), budget);
    std::size_t n = 0;
    for (const auto& u : U.pres.entities) {
      const std::string& ku = mu.entity_map.at(u);
      for (std::size_t i = 0; i < Y[r].rows(ku); ++i) {
        std::string g = "g_" + r + "_" + std::to_string(++n);
        gname[r][{ku, i}] = g;
        out.gen_edges.push_back({g, {r}, u, true});
      }
    }
  }
  auto G = [&](const std::string& r, const std::string& ku, std::size_t i) {
    return unary(gname[r].at({ku, i}), x);
  };
  std::size_t nattr = 0;
  for (const auto& r : R.pres.entities) {
    const SaturatedInstance& Yr = Y[r];
    Context c{{kMapVar, r}};
    auto is_r_path = [&](Term t) {
      for (Term p = t; !p.is_var(); p = p.arg(0))
        if (!back.count(p.head()) || !R.is_edge(back.at(p.head())) ||
            mr.edge_map.at(back.at(p.head())).head() != p.head())
          return false;
      return true;
    };
    for (const auto& u : U.pres.edges) {
      const std::string& ku = mu.entity_map.at(u.dom[0]);
      const std::string& kg = mu.edge_map.at(u.name).head();
      for (std::size_t i = 0; i < Yr.rows(ku); ++i)
        out.eqs.push_back({c, unary(u.name, G(r, ku, i)), G(r, mu.entity_map.at(u.cod), Yr.follow(kg, i)), u.cod});
    }
    for (const auto& f : R.pres.edges) {
      if (f.dom[0] != r) continue;
      const SaturatedInstance& Y2 = Y[f.cod];
      Subst shift{{kMapVar, unary(mr.edge_map.at(f.name).head(), x)}};
      Assignment env;
      env.ent[kMapVar] = Yr.gen_rows.at(kMapVar);
      for (const auto& u : U.pres.entities) {
        const std::string& ku = mu.entity_map.at(u);
        for (std::size_t i = 0; i < Y2.rows(ku); ++i) {
          std::size_t j = *eval_entity(Yr, apply_subst(Y2.rep(ku, i), shift), env);
          out.eqs.push_back({c, unary(gname[f.cod].at({ku, i}), unary(f.name, x)), G(r, ku, j), u});
        }
      }
    }
    // atoms of Yr expressed over x
    std::vector<AtomSource> src;
    for (const auto& u : U.pres.entities) {
      const std::string& ku = mu.entity_map.at(u);
      for (const auto* a : U.attributes_of(u))
        for (std::size_t i = 0; i < Yr.rows(ku); ++i)
          src.push_back({Yr.cell(mu.attr_map.at(a->name).head(), i), a->cod, unary(a->name, G(r, ku, i))});
    }
    for (const auto& s2 : R.pres.entities) {
      const std::string& ks = mr.entity_map.at(s2);
      for (const auto* a : R.attributes_of(s2))
        for (std::size_t i = 0; i < Yr.rows(ks); ++i)
          if (is_r_path(Yr.rep(ks, i)))
            src.push_back({Yr.cell(mr.attr_map.at(a->name).head(), i), a->cod,
                           unary(a->name, detail::rename_back(Yr.rep(ks, i), back))});
    }
    auto dict = atom_dictionary(src);
    auto ensure = [&](Term v, const std::string& sort) {
      for (auto& [atom, s] : value_atoms_sorted(v, sort))
        if (!dict.count(atom)) {
          std::string g = "a_" + r + "_" + std::to_string(++nattr);
          out.gen_attrs.push_back({g, {r}, s, true});
          dict[atom] = unary(g, x);
        }
    };
    for (auto& s : src) {
      ensure(s.value, s.sort);
      Term rhs = express(s.value, dict);
      if (rhs != s.expr) out.eqs.push_back({c, s.expr, rhs, s.sort});
    }
    for (const auto& e : Yr.type_equations()) {
      bool ok = true;
      for (Term side : {e.lhs, e.rhs})
        for (Term a : value_atoms(side, e.sort))
          if (!dict.count(a)) ok = false;
      if (ok) out.eqs.push_back({c, express(e.lhs, dict), express(e.rhs, dict), e.sort});
    }
  }
  (void)gm;
  (void)gn;
  (void)kent_u;
  return out;
}

inline BimodulePresentation unit_bimodule(const SchemaRef& S) {
  auto M = companion_presentation(identity_mapping(S));
  M.name = "unit " + S->name;
  return M;
}

inline SaturatedInstance lambda(const BimodulePresentation& M, const InstancePresentation& I,
                                std::size_t budget = 10000) {
  auto C = collage_of_bimodule(M, budget);
  auto out = delta(C.incl_dst, saturate(sigma(C.incl_src, I), budget));
  out.name = "lambda " + M.name + " " + I.name;
  return out;
}

inline SaturatedInstance gamma(const BimodulePresentation& M, const SaturatedInstance& J, std::size_t budget = 10000) {
  auto C = collage_of_bimodule(M, budget);
  auto out = delta(C.incl_src, pi(C.incl_dst, J, budget));
  out.name = "gamma " + M.name + " " + J.name;
  return out;
}

}  // namespace catdb
