#pragma once

#include <random>

#include "catdb/migration.hpp"
#include "paper_fixture.hpp"

namespace props {

using namespace catdb;

inline std::mt19937& rng() {
  static std::mt19937 g(20240607);
  return g;
}

inline std::size_t pick(std::size_t n) { return std::uniform_int_distribution<std::size_t>(0, n - 1)(rng()); }

// ------------------------------------------------------------ small schemas

inline Equation eq1(const std::string& v, const std::string& e, Term l, Term r, const SchemaPresentation& p) {
  return make_equation(Context{{v, e}}, l, r, collage_signature(p));
}

// two entities swapped by mutually inverse edges
inline SchemaRef schema_swap() {
  SchemaPresentation p;
  p.entities = {"A", "B"};
  p.edges = {{"f", {"A"}, "B"}, {"h", {"B"}, "A"}};
  p.attributes = {{"va", {"A"}, "Int"}, {"vb", {"B"}, "Int"}};
  p.path_eqs.push_back(eq1("a", "A", fx::P("a.f.h"), fx::P("a"), p));
  p.path_eqs.push_back(eq1("b", "B", fx::P("b.h.f"), fx::P("b"), p));
  return compile_schema(p, "Swap");
}

inline SchemaRef schema_inv() {
  SchemaPresentation p;
  p.entities = {"C"};
  p.edges = {{"g", {"C"}, "C"}};
  p.attributes = {{"vc", {"C"}, "Int"}};
  p.path_eqs.push_back(eq1("c", "C", fx::P("c.g.g"), fx::P("c"), p));
  return compile_schema(p, "Inv");
}

inline SchemaMapping mapping_fold(const SchemaRef& sw, const SchemaRef& iv) {
  SchemaMapping W{"W", sw, iv, {{"A", "C"}, {"B", "C"}}, {}, {}};
  W.edge_map["f"] = fx::P("x.g");
  W.edge_map["h"] = fx::P("x.g");
  W.attr_map["va"] = fx::P("x.vc");
  W.attr_map["vb"] = fx::P("x.vc");
  return W;
}

// ------------------------------------------------------------ random instances

// Every generator gets every edge and every attribute, so all cells are closed.
inline std::optional<InstancePresentation> random_instance(const SchemaRef& S, const std::string& name, std::size_t max_gens,
                                                    std::size_t values) {
  InstancePresentation I{name, S, {}, {}};
  std::map<std::string, std::vector<std::string>> gens;
  for (const auto& e : S->pres.entities) {
    std::size_t n = 1 + pick(max_gens);
    for (std::size_t i = 0; i < n; ++i) {
      std::string g = e + std::to_string(i);
      std::transform(g.begin(), g.end(), g.begin(), [](char c) { return c == '\'' ? 'p' : std::tolower(c); });
      I.gens.add(g, e);
      gens[e].push_back(g);
    }
  }
  static const std::vector<std::string> words = {"Admin", "HR", "IT"};
  for (const auto& e : S->pres.entities)
    for (const auto& g : gens[e]) {
      for (const auto* f : S->edges_from(e))
        I.eqs.push_back(ground_eq(I, unary(f->name, Term::var(g)), Term::var(gens[f->cod][pick(gens[f->cod].size())])));
      for (const auto* a : S->attributes_of(e)) {
        Term v = a->cod == "Int" ? int_lit(BigInt(pick(values))) : str_lit(words[pick(values)]);
        I.eqs.push_back(ground_eq(I, unary(a->name, Term::var(g)), v));
      }
    }
  try {
    auto J = saturate(I, 2000);
    if (J.total_rows() > 10) return std::nullopt;
  } catch (const Error& e) {
    if (e.kind == ErrorKind::InconsistentInstance || e.kind == ErrorKind::PossiblyInfinite) return std::nullopt;
    throw;
  }
  return I;
}

inline InstancePresentation random_valid(const SchemaRef& S, const std::string& name, std::size_t max_gens,
                                  std::size_t values) {
  for (int tries = 0; tries < 500; ++tries)
    if (auto I = random_instance(S, name, max_gens, values)) return *I;
  throw std::runtime_error("no consistent random instance on " + S->name);
}

struct Fixture {
  SchemaMapping F;
  InstancePresentation I;  // on F.src
  InstancePresentation K;  // on F.dst
};

inline std::vector<Fixture> fixtures() {
  static std::vector<Fixture> all = [] {
    auto S = fx::schema_S(), T = fx::schema_T(), L = fx::schema_L(), R = fx::schema_R();
    auto sw = schema_swap(), iv = schema_inv();
    std::vector<SchemaMapping> maps = {fx::inclusion(S, T, "G"), fx::inclusion(S, L, "H"), fx::mapping_F(R, T),
                                       mapping_fold(sw, iv)};
    std::vector<Fixture> out;
    for (int round = 0; round < 10; ++round)
      for (const auto& F : maps)
        out.push_back({F, random_valid(F.src, "I", 3, round < 7 ? 1 : 2), random_valid(F.dst, "K", 3, round < 7 ? 1 : 2)});
    return out;
  }();
  return all;
}

inline std::size_t homs(const InstancePresentation& P, const SaturatedInstance& J) {
  return enumerate_transforms(P, J).size();
}


// pi along H or F would have to invent values for attributes outside the image
inline bool pi_finite(const SchemaMapping& F) { return F.name == "G" || F.name == "W"; }

// Classes of paths a -> b up to the given height; also reports whether a normal form of full height exists.
inline std::pair<std::size_t, bool> oracle_homs(const Schema& S, const std::string& a, const std::string& b,
                                         std::size_t height) {
  // confluent systems only, so decide_equal is a comparison of normal forms
  auto ts = enumerate_terms(S.entity_sig, Context{{kMapVar, a}}, b, height);
  std::set<Term, TermLess> classes;
  bool tall = false;
  for (Term t : ts) {
    Term n = normalize(t, S.entity_rs);
    if (classes.insert(n).second) tall = tall || n.height() == height;
  }
  return {classes.size(), tall};
}

inline std::optional<SchemaRef> random_schema(int k) {
  SchemaPresentation p;
  std::size_t ne = 1 + pick(3);
  for (std::size_t i = 0; i < ne; ++i) p.entities.push_back(std::string(1, static_cast<char>('A' + i)));
  std::size_t nf = 1 + pick(4);
  for (std::size_t i = 0; i < nf; ++i)
    p.edges.push_back({"f" + std::to_string(i), {p.entities[pick(ne)]}, p.entities[pick(ne)]});
  Signature sig;
  for (auto& e : p.entities) sig.add_sort(e);
  for (auto& f : p.edges) sig.add_symbol(f);
  std::size_t neq = pick(3);
  for (std::size_t i = 0; i < neq; ++i) {
    std::string a = p.entities[pick(ne)];
    auto paths = enumerate_terms(sig, Context{{"x", a}}, p.entities[pick(ne)], 3);
    if (paths.size() < 2) continue;
    Term l = paths[pick(paths.size())], r = paths[pick(paths.size())];
    if (l == r) continue;
    p.path_eqs.push_back(make_equation(Context{{"x", a}}, l, r, collage_signature(p)));
  }
  try {
    auto S = compile_schema(p, "rand" + std::to_string(k), 3000);
    if (S->entity_rs.status != Status::Confluent) return std::nullopt;
    return S;
  } catch (const Error&) {
    return std::nullopt;
  }
}


inline Presentation group() {
  Presentation p;
  p.sig.add_sort("G");
  p.sig.add_symbol({"1", {}, "G"});
  p.sig.add_symbol({"*", {"G", "G"}, "G"});
  p.sig.add_symbol({"inv", {"G"}, "G"});
  Context c{{"x", "G"}, {"y", "G"}, {"z", "G"}};
  auto X = [](const char* n) { return Term::var(n); };
  auto mul = [](Term a, Term b) { return Term::app("*", {a, b}); };
  p.eqs.push_back(make_equation(c, mul(Term::app("1"), X("x")), X("x"), p.sig));
  p.eqs.push_back(make_equation(c, mul(Term::app("inv", {X("x")}), X("x")), Term::app("1"), p.sig));
  p.eqs.push_back(make_equation(c, mul(mul(X("x"), X("y")), X("z")), mul(X("x"), mul(X("y"), X("z"))), p.sig));
  return p;
}

inline Term random_term(const Signature& sig, const std::string& sort, const std::vector<std::string>& vars, int depth) {
  std::vector<const Symbol*> c;
  for (const auto& f : sig.symbols())
    if (f.cod == sort && (depth > 0 || f.dom.empty())) c.push_back(&f);
  if (c.empty() || pick(4) == 0) return Term::var(vars[pick(vars.size())]);
  const Symbol* f = c[pick(c.size())];
  std::vector<Term> args;
  for (const auto& d : f->dom) args.push_back(random_term(sig, d, vars, depth - 1));
  return Term::app(f->name, args);
}

}  // namespace props
