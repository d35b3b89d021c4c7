#include <catch_amalgamated.hpp>

#include "property_support.hpp"

using namespace catdb;
using namespace props;

TEST_CASE("random fixtures are plentiful and small") {
  auto fs = fixtures();
  CHECK(fs.size() >= 20);
  for (const auto& f : fs) {
    CHECK(saturate(f.I).total_rows() <= 10);
    CHECK(saturate(f.K).total_rows() <= 10);
  }
}

TEST_CASE("sigma is left adjoint to delta on hom counts") {
  std::size_t nonzero = 0;
  for (const auto& f : fixtures()) {
    auto K = saturate(f.K);
    std::size_t lhs = homs(sigma(f.F, f.I), K);
    std::size_t rhs = homs(f.I, delta(f.F, K));
    INFO(f.F.name << " " << lhs << " vs " << rhs);
    CHECK(lhs == rhs);
    nonzero += lhs > 0;
  }
  CHECK(nonzero >= 20);
}


TEST_CASE("delta is left adjoint to pi on hom counts") {
  std::size_t seen = 0, nonzero = 0;
  for (const auto& f : fixtures()) {
    if (!pi_finite(f.F)) continue;
    ++seen;
    auto K = saturate(f.K), I = saturate(f.I);
    auto dk = canonical_presentation(delta(f.F, K));
    CHECK(dk.fresh.empty());
    std::size_t lhs = homs(dk.pres, I);
    std::size_t rhs = homs(f.K, pi(f.F, I));
    INFO(f.F.name << " " << lhs << " vs " << rhs);
    CHECK(lhs == rhs);
    nonzero += lhs > 0;
  }
  CHECK(seen >= 20);
  CHECK(nonzero >= 10);
  auto S = fx::schema_S(), T = fx::schema_T();
  auto G = fx::inclusion(S, T, "G");
  auto J = saturate(fx::instance_J(S));
  auto yq = representable(T, "QR", "q");
  auto dy = canonical_presentation(delta(G, saturate(yq)));
  CHECK(homs(yq, pi(G, J)) == 3);
  CHECK(homs(dy.pres, J) == 3);
}

TEST_CASE("pi refuses to invent attribute values") {
  for (const auto& f : fixtures())
    if (!pi_finite(f.F)) CHECK_THROWS_AS(pi(f.F, saturate(f.I)), Error);
}

TEST_CASE("delta and pi keep the type algebra") {
  for (const auto& f : fixtures()) {
    auto K = saturate(f.K), I = saturate(f.I);
    CHECK(delta(f.F, K).alg == K.alg);
    if (pi_finite(f.F)) CHECK(pi(f.F, I).alg == I.alg);
  }
  auto S = fx::schema_S(), T = fx::schema_T();
  auto J = saturate(fx::instance_J(S));
  auto PJ = pi(fx::inclusion(S, T, "G"), J);
  CHECK(PJ.alg == J.alg);
  CHECK(delta(fx::mapping_F(fx::schema_R(), T), PJ).alg == J.alg);
}

TEST_CASE("pointwise sigma agrees with saturated sigma on opfibrations") {
  std::size_t seen = 0;
  for (const auto& f : fixtures()) {
    if (!is_discrete_opfibration(f.F)) continue;
    ++seen;
    auto I = saturate(f.I);
    auto pw = sigma_pointwise(f.F, I);
    CHECK(pw.alg == I.alg);
    CHECK(isomorphic(pw, saturate(sigma(f.F, f.I))));
  }
  CHECK(seen >= 6);
  auto S = fx::schema_S();
  auto G = fx::inclusion(S, fx::schema_T(), "G");
  CHECK(isomorphic(sigma_pointwise(G, saturate(fx::instance_J(S))), saturate(sigma(G, fx::instance_J(S)))));
}

// ------------------------------------------------------------ entity categories


TEST_CASE("saturated entity categories match the enumeration oracle") {
  std::vector<SchemaRef> schemas = {fx::schema_S(), fx::schema_T(), fx::schema_L(), fx::schema_R(), fx::schema_U(),
                                    schema_swap(),  schema_inv()};
  for (int k = 0; schemas.size() < 27 && k < 400; ++k)
    if (auto S = random_schema(k)) schemas.push_back(*S);
  std::size_t compared = 0;
  for (const auto& S : schemas) {
    std::optional<EntityCategory> C;
    try {
      C = saturate_entity_category(S, 3000);
    } catch (const Error& e) {
      REQUIRE(e.kind == ErrorKind::PossiblyInfinite);
    }
    bool oracle_done = true;
    std::map<std::pair<std::string, std::string>, std::size_t> counts;
    for (const auto& a : S->pres.entities)
      for (const auto& b : S->pres.entities) {
        auto [n, tall] = oracle_homs(*S, a, b, 6);
        counts[{a, b}] = n;
        oracle_done = oracle_done && !tall;
      }
    if (!oracle_done) continue;
    INFO(S->name);
    REQUIRE(C.has_value());
    ++compared;
    for (auto& [ab, n] : counts) CHECK(C->hom(ab.first, ab.second).size() == n);
  }
  CHECK(compared >= 10);
}

// ------------------------------------------------------------ rewriting laws


TEST_CASE("normal forms are idempotent and stable under substitution") {
  auto p = group();
  auto rs = complete(p);
  REQUIRE(rs.status == Status::Confluent);
  std::vector<std::string> vs = {"a", "b", "c"};
  for (int i = 0; i < 1000; ++i) {
    Term t = random_term(p.sig, "G", vs, 5);
    Term n = normalize(t, rs);
    CHECK(normalize(n, rs) == n);
    CHECK(!rs.reducible(n));
    Subst s{{"a", random_term(p.sig, "G", vs, 2)}, {"b", random_term(p.sig, "G", vs, 2)}};
    CHECK(normalize(apply_subst(n, s), rs) == normalize(apply_subst(t, s), rs));
  }
  auto S = fx::schema_S();
  for (int i = 0; i < 1000; ++i) {
    std::string e = pick(2) ? "Emp" : "Dept";
    auto ts = enumerate_terms(S->entity_sig, Context{{"x", e}}, pick(2) ? "Emp" : "Dept", 4);
    Term t = ts[pick(ts.size())];
    Term n = normalize(t, S->entity_rs);
    CHECK(normalize(n, S->entity_rs) == n);
  }
}

TEST_CASE("substitution composes") {
  auto p = group();
  Context g{{"a", "G"}, {"b", "G"}}, th{{"x", "G"}, {"y", "G"}, {"z", "G"}}, ps{{"u", "G"}, {"v", "G"}};
  for (int i = 0; i < 1000; ++i) {
    ContextMorphism f{g, th, {}}, h{th, ps, {}};
    for (std::size_t k = 0; k < th.size(); ++k) f.assign.push_back(random_term(p.sig, "G", {"a", "b"}, 3));
    for (std::size_t k = 0; k < ps.size(); ++k) h.assign.push_back(random_term(p.sig, "G", {"x", "y", "z"}, 3));
    Term t = random_term(p.sig, "G", {"u", "v"}, 4);
    auto fh = compose_ctx_morphisms(f, h);
    CHECK(substitute(t, fh) == substitute(substitute(t, h), f));
    CHECK(well_sort_check(substitute(t, fh), g, p.sig) == "G");
    CHECK(substitute(t, ContextMorphism::identity(ps)) == t);
  }
}
