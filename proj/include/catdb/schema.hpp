#pragma once

#include <memory>

#include "catdb/typeside.hpp"

namespace catdb {

struct SchemaPresentation {
  std::vector<std::string> entities;
  std::vector<Symbol> edges;       // unary, entity -> entity
  std::vector<Symbol> attributes;  // unary, entity -> type sort
  std::vector<Equation> path_eqs;
  std::vector<Equation> obs_eqs;
};

class Schema {
 public:
  std::string name;
  SchemaPresentation pres;
  Signature collage_sig;
  Signature entity_sig;
  RewriteSystem entity_rs;

  bool is_entity(const std::string& s) const {
    return std::find(pres.entities.begin(), pres.entities.end(), s) != pres.entities.end();
  }
  const Symbol* edge(const std::string& f) const { return find_in(pres.edges, f); }
  const Symbol* attribute(const std::string& f) const { return find_in(pres.attributes, f); }
  bool is_edge(const std::string& f) const { return edge(f) != nullptr; }
  bool is_attribute(const std::string& f) const { return attribute(f) != nullptr; }

  std::vector<const Symbol*> edges_from(const std::string& e) const {
    std::vector<const Symbol*> out;
    for (const auto& f : pres.edges)
      if (f.dom[0] == e) out.push_back(&f);
    return out;
  }
  std::vector<const Symbol*> attributes_of(const std::string& e) const {
    std::vector<const Symbol*> out;
    for (const auto& f : pres.attributes)
      if (f.dom[0] == e) out.push_back(&f);
    return out;
  }

  std::string sort_of(Term t, const Context& ctx) const { return well_sort_check(t, ctx, collage_sig); }

  PrintOptions print_options() const { return PrintOptions{&collage_sig}; }
  std::string show(Term t) const { return to_string(t, print_options()); }

 private:
  static const Symbol* find_in(const std::vector<Symbol>& v, const std::string& f) {
    for (const auto& s : v)
      if (s.name == f) return &s;
    return nullptr;
  }
};

using SchemaRef = std::shared_ptr<const Schema>;

inline Signature collage_signature(const SchemaPresentation& p) {
  Signature sig = type_signature();
  for (const auto& e : p.entities) {
    if (sig.has_sort(e)) throw Error(ErrorKind::NameClash, "entity '" + e + "' clashes with a sort");
    sig.add_sort(e);
  }
  for (auto f : p.edges) {
    f.postfix = true;
    sig.add_symbol(f);
  }
  for (auto f : p.attributes) {
    f.postfix = true;
    sig.add_symbol(f);
  }
  return sig;
}

inline SchemaRef compile_schema(const SchemaPresentation& p, const std::string& name = "",
                                std::size_t budget = 10000) {
  auto s = std::make_shared<Schema>();
  s->name = name;
  s->pres = p;
  for (auto& f : s->pres.edges) f.postfix = true;
  for (auto& f : s->pres.attributes) f.postfix = true;
  s->collage_sig = collage_signature(p);

  for (const auto& f : p.edges) {
    if (f.dom.size() != 1) throw Error(ErrorKind::AritySortMismatch, "edge " + f.name + " must be unary");
    if (!s->is_entity(f.dom[0]) || !s->is_entity(f.cod))
      throw Error(ErrorKind::SortMismatch, "edge " + f.name + " must go between entities");
  }
  for (const auto& f : p.attributes) {
    if (f.dom.size() != 1) throw Error(ErrorKind::AritySortMismatch, "attribute " + f.name + " must be unary");
    if (!s->is_entity(f.dom[0]) || !is_type_sort(f.cod))
      throw Error(ErrorKind::SortMismatch, "attribute " + f.name + " must go from an entity to a type");
  }
  auto check_eq = [&](const Equation& e, bool path) {
    if (e.ctx.size() != 1 || !s->is_entity(e.ctx[0].sort))
      throw Error(ErrorKind::ContextMismatch, "schema equations need one entity-sorted variable: " + to_string(e));
    std::string a = s->sort_of(e.lhs, e.ctx), b = s->sort_of(e.rhs, e.ctx);
    if (a != b) throw Error(ErrorKind::SortMismatch, to_string(e));
    if (path != s->is_entity(a))
      throw Error(ErrorKind::SortMismatch, std::string(path ? "path" : "observation") +
                                               " equation has the wrong kind of sort: " + to_string(e));
  };
  for (const auto& e : p.path_eqs) check_eq(e, true);
  for (const auto& e : p.obs_eqs) check_eq(e, false);

  for (const auto& e : p.entities) s->entity_sig.add_sort(e);
  for (const auto& f : s->pres.edges) s->entity_sig.add_symbol(f);
  Presentation ep{s->entity_sig, p.path_eqs};
  s->entity_rs = complete(ep, budget);
  if (s->entity_rs.status == Status::BudgetExhausted)
    throw Error(ErrorKind::BudgetExceeded, "completion of the path equations of " + name + " did not finish");
  return s;
}

// ---------------------------------------------------------------- mappings

struct SchemaMapping {
  std::string name;
  SchemaRef src;
  SchemaRef dst;
  std::map<std::string, std::string> entity_map;
  std::map<std::string, Term> edge_map;  // path over variable "x"
  std::map<std::string, Term> attr_map;  // observable over variable "x"
};

inline const std::string kMapVar = "x";

// Image of a source collage term under the mapping.
inline Term translate(Term t, const SchemaMapping& F) {
  if (t.is_var()) return t;
  const std::string& h = t.head();
  if (t.arity() == 1 && (F.src->is_edge(h) || F.src->is_attribute(h))) {
    Term a = translate(t.arg(0), F);
    const auto& m = F.src->is_edge(h) ? F.edge_map : F.attr_map;
    auto it = m.find(h);
    if (it == m.end()) throw Error(ErrorKind::SchemaMismatch, "mapping " + F.name + " does not map " + h);
    return apply_subst(it->second, Subst{{kMapVar, a}});
  }
  if (t.arity() == 0) return t;
  std::vector<Term> args;
  for (Term a : t.args()) args.push_back(translate(a, F));
  return Term::app(h, args);
}

inline std::string map_sort(const std::string& s, const SchemaMapping& F) {
  auto it = F.entity_map.find(s);
  if (it != F.entity_map.end()) return it->second;
  if (is_type_sort(s)) return s;
  throw Error(ErrorKind::SchemaMismatch, "mapping " + F.name + " does not map entity " + s);
}

inline Context translate_ctx(const Context& c, const SchemaMapping& F) {
  Context out;
  for (const auto& b : c) out.add(b.var, map_sort(b.sort, F));
  return out;
}

inline void validate_mapping_shape(const SchemaMapping& F) {
  for (const auto& e : F.src->pres.entities) {
    auto it = F.entity_map.find(e);
    if (it == F.entity_map.end()) throw Error(ErrorKind::SchemaMismatch, "entity " + e + " unmapped");
    if (!F.dst->is_entity(it->second)) throw Error(ErrorKind::UnknownSort, it->second);
  }
  for (const auto& f : F.src->pres.edges) {
    auto it = F.edge_map.find(f.name);
    if (it == F.edge_map.end()) throw Error(ErrorKind::SchemaMismatch, "edge " + f.name + " unmapped");
    Context c{{kMapVar, map_sort(f.dom[0], F)}};
    std::string s = F.dst->sort_of(it->second, c);
    if (s != map_sort(f.cod, F))
      throw Error(ErrorKind::SortMismatch, "edge " + f.name + " maps to a path ending in " + s);
  }
  for (const auto& f : F.src->pres.attributes) {
    auto it = F.attr_map.find(f.name);
    if (it == F.attr_map.end()) throw Error(ErrorKind::SchemaMismatch, "attribute " + f.name + " unmapped");
    Context c{{kMapVar, map_sort(f.dom[0], F)}};
    std::string s = F.dst->sort_of(it->second, c);
    if (s != f.cod) throw Error(ErrorKind::SortMismatch, "attribute " + f.name + " maps to sort " + s);
  }
}

inline SchemaMapping identity_mapping(const SchemaRef& s) {
  SchemaMapping F{"id", s, s, {}, {}, {}};
  Term x = Term::var(kMapVar);
  for (const auto& e : s->pres.entities) F.entity_map[e] = e;
  for (const auto& f : s->pres.edges) F.edge_map[f.name] = unary(f.name, x);
  for (const auto& f : s->pres.attributes) F.attr_map[f.name] = unary(f.name, x);
  return F;
}

// F : A -> B, G : B -> C ; result A -> C
inline SchemaMapping compose_mappings(const SchemaMapping& F, const SchemaMapping& G) {
  if (F.dst.get() != G.src.get() && F.dst->name != G.src->name)
    throw Error(ErrorKind::SchemaMismatch, "cannot compose " + F.name + " with " + G.name);
  SchemaMapping H{F.name + ";" + G.name, F.src, G.dst, {}, {}, {}};
  for (auto& [e, t] : F.entity_map) H.entity_map[e] = map_sort(t, G);
  for (auto& [f, p] : F.edge_map) H.edge_map[f] = translate(p, G);
  for (auto& [a, p] : F.attr_map) H.attr_map[a] = translate(p, G);
  return H;
}

inline bool same_mapping(const SchemaMapping& a, const SchemaMapping& b) {
  return a.entity_map == b.entity_map && a.edge_map == b.edge_map && a.attr_map == b.attr_map;
}

}  // namespace catdb
