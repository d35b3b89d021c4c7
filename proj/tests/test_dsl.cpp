#include <catch_amalgamated.hpp>

#include <filesystem>

#include "catdb/cli.hpp"
#include "paper_fixture.hpp"

using namespace catdb;

namespace {

const std::string kDir = CATDB_FIXTURE_DIR;

Workspace paper() { return load_workspace(kDir + "/paper.cdb"); }

std::pair<int, std::string> run(std::vector<std::string> args, std::string* err = nullptr) {
  args.insert(args.begin(), "catdb");
  std::vector<const char*> argv;
  for (auto& a : args) argv.push_back(a.c_str());
  std::ostringstream out, e;
  int rc = run_cli(static_cast<int>(argv.size()), argv.data(), out, e);
  if (err) *err = e.str();
  return {rc, out.str()};
}

bool same_eqs(const std::vector<Equation>& a, const std::vector<Equation>& b) {
  if (a.size() != b.size()) return false;
  for (std::size_t i = 0; i < a.size(); ++i)
    if (a[i].lhs != b[i].lhs || a[i].rhs != b[i].rhs || a[i].sort != b[i].sort || !(a[i].ctx == b[i].ctx))
      return false;
  return true;
}

bool same_symbols(const std::vector<Symbol>& a, const std::vector<Symbol>& b) {
  if (a.size() != b.size()) return false;
  for (std::size_t i = 0; i < a.size(); ++i)
    if (a[i].name != b[i].name || a[i].dom != b[i].dom || a[i].cod != b[i].cod) return false;
  return true;
}

bool same_schema(const Schema& a, const Schema& b) {
  return a.pres.entities == b.pres.entities && same_symbols(a.pres.edges, b.pres.edges) &&
         same_symbols(a.pres.attributes, b.pres.attributes) && same_eqs(a.pres.path_eqs, b.pres.path_eqs) &&
         same_eqs(a.pres.obs_eqs, b.pres.obs_eqs);
}

std::string parse_error(const std::string& text) {
  try {
    parse_workspace(text, "t.cdb");
  } catch (const Error& e) {
    return e.what();
  }
  return "";
}

}  // namespace

TEST_CASE("the employee schema parses to its presentation") {
  auto ws = paper();
  const Schema& S = *ws.schema("S");
  CHECK(S.pres.entities.size() == 2);
  CHECK(S.pres.edges.size() == 3);
  CHECK(S.pres.attributes.size() == 3);
  CHECK(S.pres.path_eqs.size() + S.pres.obs_eqs.size() == 4);
  CHECK(same_schema(S, *fx::schema_S()));
  CHECK(same_schema(*ws.schema("T"), *fx::schema_T()));
  CHECK(same_schema(*ws.schema("L"), *fx::schema_L()));
}

TEST_CASE("parsed instances and mappings match the hand-built ones") {
  auto ws = paper();
  auto S = ws.schema("S");
  auto J = ws.instance("J"), Jh = fx::instance_J(S);
  CHECK(J.gens == Jh.gens);
  std::set<std::pair<std::string, std::string>> a, b;
  for (auto& e : J.eqs) a.insert({to_string(e.lhs), to_string(e.rhs)});
  for (auto& e : Jh.eqs) b.insert({to_string(e.lhs), to_string(e.rhs)});
  CHECK(a == b);
  auto F = ws.mapping("F"), Fh = fx::mapping_F(ws.schema("R"), ws.schema("T"));
  CHECK(same_mapping(F, Fh));
  CHECK(same_mapping(ws.mapping("G"), fx::inclusion(S, ws.schema("T"), "G")));
}

TEST_CASE("query parses to its four parts") {
  auto ws = paper();
  const Query& Q = ws.query("Q");
  auto Qh = fx::query_Q(ws.schema("S"));
  CHECK(Q.for_ctx == Qh.for_ctx);
  CHECK(same_eqs(Q.where_eqs, Qh.where_eqs));
  CHECK(Q.return_ctx == Qh.return_ctx);
  CHECK(Q.return_morph.assign == Qh.return_morph.assign);
}

TEST_CASE("uberquery keys parse to a context morphism") {
  auto ws = paper();
  const UberQuery& N = ws.uber_query("N");
  auto Nh = fx::uber_N(ws.schema("S"));
  const auto& k = N.block("A'").keys.at("f");
  const auto& kh = Nh.block("A'").keys.at("f");
  CHECK(k.target == kh.target);
  CHECK(k.assign == kh.assign);
}

TEST_CASE("printing then parsing gives the same workspace") {
  for (const char* f : {"paper.cdb", "group.cdb"}) {
    auto ws = load_workspace(kDir + "/" + f);
    std::string once = print_workspace(ws);
    auto ws2 = parse_workspace(once, "printed");
    CHECK(print_workspace(ws2) == once);
    REQUIRE(ws2.order.size() == ws.order.size());
    for (auto& [n, s] : ws.schemas) CHECK(same_schema(*s, *ws2.schema(n)));
    for (auto& [n, I] : ws.instances) {
      CHECK(I.gens == ws2.instance(n).gens);
      CHECK(same_eqs(I.eqs, ws2.instance(n).eqs));
    }
    for (auto& [n, F] : ws.mappings) CHECK(same_mapping(F, ws2.mapping(n)));
    for (auto& [n, M] : ws.bimodules) {
      CHECK(same_symbols(M.gen_edges, ws2.bimodule(n).gen_edges));
      CHECK(same_eqs(M.eqs, ws2.bimodule(n).eqs));
    }
    for (auto& [n, t] : ws.theories) {
      CHECK(same_eqs(t.pres.eqs, ws2.theory(n).pres.eqs));
      CHECK(same_symbols(t.pres.sig.symbols(), ws2.theory(n).pres.sig.symbols()));
    }
  }
}

TEST_CASE("errors carry positions") {
  CHECK(parse_error("schema S { entities A; edges f : A -> B; }").find("t.cdb:1:") != std::string::npos);
  std::string e = parse_error("schema S {\n  entities A;\n  attributes a : A -> Int;\n  path_eqs forall x:A . x.a = x;\n}");
  CHECK(e.find("t.cdb:4:") != std::string::npos);
  CHECK(parse_error("schema S { entities A }\ninstance I on Nope { }").find("t.cdb:2:") != std::string::npos);
  CHECK(parse_error("schema S { entities A; } $").find("t.cdb:1:26") != std::string::npos);
  CHECK(parse_error("typeside Ty { }").find("built in") != std::string::npos);
  CHECK(parse_error("schema S { entities A; attributes a : A -> Str; }\ninstance I on S { generators g : A; "
                    "equations g.a = \"x y\"; }")
            .find("t.cdb:2:") != std::string::npos);
  CHECK(parse_error("schema S { entities A; }\nschema S { entities B; }").find("twice") != std::string::npos);
}

TEST_CASE("cli: query table and crosscheck") {
  auto [rc, out] = run({"query", kDir + "/paper.cdb", "--query", "Q", "--instance", "J", "--crosscheck"});
  CHECK(rc == 0);
  CHECK(out.find("(3 rows)") != std::string::npos);
  for (const char* s : {"\"Noether\" | \"HR\"      | 100", "\"Euclid\"  | \"HR\"      | 150",
                        "\"Euclid\"  | \"Admin\"   | 0"})
    CHECK(out.find(s) != std::string::npos);
  CHECK(out.find("crosscheck: ok") != std::string::npos);
}

TEST_CASE("cli: group word problems") {
  auto [rc, out] = run({"eq", kDir + "/group.cdb", "--theory", "Grp", "(inv(a)*a)*(b*inv(b))", "b*((inv(a*b))*a)"});
  CHECK(rc == 0);
  CHECK(out.rfind("Equal\n", 0) == 0);
  auto [rc2, out2] = run({"eq", kDir + "/group.cdb", "--theory", "Grp", "1*(a*b)", "b*(1*a)"});
  CHECK(rc2 == 0);
  CHECK(out2.rfind("NotEqual\n", 0) == 0);
  auto [rc3, out3] = run({"complete", kDir + "/group.cdb", "--theory", "Grp"});
  CHECK(rc3 == 0);
  CHECK(out3.find("confluent") != std::string::npos);
}

TEST_CASE("cli: exit codes") {
  std::string err;
  CHECK(run({"saturate", "missing.cdb", "--instance", "J"}, &err).first == 2);
  CHECK(err.find("missing.cdb") != std::string::npos);
  CHECK(run({"saturate"}).first == 2);
  CHECK(run({"migrate", kDir + "/paper.cdb", "--mapping", "G", "--instance", "J", "--mode", "up"}).first == 2);
  CHECK(run({"saturate", kDir + "/paper.cdb", "--instance", "Nope"}).first == 2);
  CHECK(run({"saturate", kDir + "/paper.cdb", "--instance", "J", "--budget", "3"}).first == 1);
  // J is on S, delta along G wants an instance on T
  CHECK(run({"migrate", kDir + "/paper.cdb", "--mapping", "G", "--instance", "J", "--mode", "delta"}).first == 1);
}

TEST_CASE("cli: every fixture checks cleanly") {
  for (const auto& f : std::filesystem::directory_iterator(kDir)) {
    if (f.path().extension() != ".cdb") continue;
    auto [rc, out] = run({"check", f.path().string()});
    INFO(out);
    CHECK(rc == 0);
  }
}

TEST_CASE("cli: output is deterministic") {
  std::vector<std::vector<std::string>> cmds = {
      {"saturate", kDir + "/paper.cdb", "--instance", "J"},
      {"migrate", kDir + "/paper.cdb", "--mapping", "H", "--instance", "J", "--mode", "sigma", "--saturate"},
      {"homs", kDir + "/paper.cdb", "--from", "I", "--to", "J", "--format", "json"},
      {"fuzz", kDir + "/group.cdb", "--theory", "Grp", "--count", "200", "--seed", "5"}};
  for (auto& c : cmds) CHECK(run(c) == run(c));
  CHECK(run({"fuzz", kDir + "/group.cdb", "--theory", "Grp", "--count", "200", "--seed", "5"}).first == 0);
}

TEST_CASE("cli: json and ascii carry the same rows") {
  auto ws = paper();
  auto J = saturate(ws.instance("J"));
  auto [rc, out] = run({"saturate", kDir + "/paper.cdb", "--instance", "J", "--format", "json"});
  REQUIRE(rc == 0);
  auto j = nlohmann::ordered_json::parse(out);
  auto tables = instance_tables(J);
  REQUIRE(j["tables"].size() == tables.size());
  std::ostringstream ascii;
  render_ascii(ascii, J);
  for (std::size_t t = 0; t < tables.size(); ++t) {
    CHECK(j["tables"][t]["entity"] == tables[t].title);
    CHECK(j["tables"][t]["columns"] == tables[t].header);
    REQUIRE(j["tables"][t]["rows"].size() == tables[t].rows.size());
    for (std::size_t r = 0; r < tables[t].rows.size(); ++r)
      for (std::size_t c = 0; c < tables[t].header.size(); ++c) {
        std::string cell = j["tables"][t]["rows"][r][tables[t].header[c]];
        CHECK(cell == tables[t].rows[r][c]);
        CHECK(ascii.str().find("| " + cell + " ") != std::string::npos);
      }
  }
  CHECK(j["type_equations"].size() == 1);
}

TEST_CASE("cli: sigma presentation output parses back") {
  auto [rc, out] = run({"migrate", kDir + "/paper.cdb", "--mapping", "H", "--instance", "J", "--mode", "sigma"});
  REQUIRE(rc == 0);
  std::ifstream in(kDir + "/paper.cdb");
  std::stringstream ss;
  ss << in.rdbuf();
  auto ws = parse_workspace(ss.str() + "\n" + out, "combined");
  auto K = saturate(ws.instance("sigma_H_J"));
  CHECK(K.rows("Team") == 4);
}
