#pragma once

#include <fstream>
#include <variant>

#include "catdb/query.hpp"

namespace catdb {

struct SourceSpan {
  std::string file;
  std::size_t line = 1, col = 1, end_line = 1, end_col = 1;

  std::string str() const { return file + ":" + std::to_string(line) + ":" + std::to_string(col); }
};

inline std::string strip_kind(const Error& e) {
  std::string w = e.what(), k = std::string(kind_name(e.kind)) + ": ";
  return w.rfind(k, 0) == 0 ? w.substr(k.size()) : w;
}

// Reraises an error with a source location in front of its message.
template <class F>
auto at_span(const SourceSpan& sp, F&& f) -> decltype(f()) {
  try {
    return f();
  } catch (const Error& e) {
    std::string m = strip_kind(e);
    if (m.rfind(sp.file + ":", 0) == 0) throw;
    throw Error(e.kind, sp.str() + ": " + m);
  }
}

struct Theory {
  std::string name;
  Presentation pres;
};

struct Workspace {
  enum class Kind { Theory, Schema, Instance, Mapping, Bimodule, Query, UberQuery };
  struct Decl {
    Kind kind;
    std::string name;
    SourceSpan span;
  };
  std::vector<Decl> order;
  std::map<std::string, Theory> theories;
  std::map<std::string, SchemaRef> schemas;
  std::map<std::string, InstancePresentation> instances;
  std::map<std::string, SchemaMapping> mappings;
  std::map<std::string, BimodulePresentation> bimodules;
  std::map<std::string, Query> queries;
  std::map<std::string, UberQuery> uber_queries;

  template <class M>
  static const typename M::mapped_type& get(const M& m, const std::string& n, const char* what) {
    auto it = m.find(n);
    if (it == m.end()) throw Error(ErrorKind::Usage, std::string("no ") + what + " named " + n);
    return it->second;
  }
  const Theory& theory(const std::string& n) const { return get(theories, n, "theory"); }
  const SchemaRef& schema(const std::string& n) const { return get(schemas, n, "schema"); }
  const InstancePresentation& instance(const std::string& n) const { return get(instances, n, "instance"); }
  const SchemaMapping& mapping(const std::string& n) const { return get(mappings, n, "mapping"); }
  const BimodulePresentation& bimodule(const std::string& n) const { return get(bimodules, n, "bimodule"); }
  const Query& query(const std::string& n) const { return get(queries, n, "query"); }
  const UberQuery& uber_query(const std::string& n) const { return get(uber_queries, n, "uberquery"); }
};

namespace dsl {

enum class Tok { Ident, Number, String, Punct, End };

struct Token {
  Tok kind;
  std::string text;
  SourceSpan span;
};

inline std::vector<Token> lex(const std::string& src, const std::string& file) {
  std::vector<Token> out;
  std::size_t i = 0, line = 1, col = 1;
  auto adv = [&](std::size_t n) {
    for (; n; --n, ++i) {
      if (src[i] == '\n') {
        ++line;
        col = 1;
      } else {
        ++col;
      }
    }
  };
  auto ident_char = [](char c) { return std::isalnum(static_cast<unsigned char>(c)) || c == '_' || c == '\''; };
  static const std::vector<std::string> puncts = {":=", "->", "<=", "++", "{", "}", "(", ")", "[", "]", ";",
                                                  ":",  ",",  ".",  "=",  "+", "-", "*"};
  while (i < src.size()) {
    char c = src[i];
    if (std::isspace(static_cast<unsigned char>(c))) {
      adv(1);
      continue;
    }
    if (c == '#' || (c == '/' && i + 1 < src.size() && src[i + 1] == '/')) {
      while (i < src.size() && src[i] != '\n') adv(1);
      continue;
    }
    Token t{Tok::End, "", SourceSpan{file, line, col, line, col}};
    std::size_t start = i;
    if (std::isdigit(static_cast<unsigned char>(c))) {
      while (i < src.size() && std::isdigit(static_cast<unsigned char>(src[i]))) adv(1);
      t.kind = Tok::Number;
      t.text = src.substr(start, i - start);
    } else if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
      while (i < src.size() && ident_char(src[i])) adv(1);
      t.kind = Tok::Ident;
      t.text = src.substr(start, i - start);
    } else if (c == '"') {
      adv(1);
      while (i < src.size() && src[i] != '"' && src[i] != '\n') adv(1);
      if (i >= src.size() || src[i] != '"') throw Error(ErrorKind::Parse, t.span.str() + ": unterminated string");
      t.kind = Tok::String;
      t.text = src.substr(start + 1, i - start - 1);
      adv(1);
    } else {
      for (const auto& p : puncts)
        if (src.compare(i, p.size(), p) == 0) {
          t.kind = Tok::Punct;
          t.text = p;
          adv(p.size());
          break;
        }
      if (t.kind == Tok::End)
        throw Error(ErrorKind::Parse, t.span.str() + ": unexpected character '" + std::string(1, c) + "'");
    }
    t.span.end_line = line;
    t.span.end_col = col;
    out.push_back(t);
  }
  out.push_back({Tok::End, "", SourceSpan{file, line, col, line, col}});
  return out;
}

// How bare identifiers inside a term are read.
struct Scope {
  const Context* ctx = nullptr;
  const Signature* consts = nullptr;  // nullary symbols besides the typeside
  std::string implicit;               // variable prefixed to a bare postfix path
  const std::set<std::string>* postfix = nullptr;
  bool free_vars = false;
};

class Parser {
 public:
  Parser(std::vector<Token> toks) : t_(std::move(toks)) {}

  const Token& peek(std::size_t k = 0) const { return t_[std::min(p_ + k, t_.size() - 1)]; }
  bool at(const std::string& s) const { return peek().kind == Tok::Punct && peek().text == s; }
  bool at_word(const std::string& s) const { return peek().kind == Tok::Ident && peek().text == s; }
  bool done() const { return peek().kind == Tok::End; }
  Token next() { return t_[p_ < t_.size() - 1 ? p_++ : p_]; }

  [[noreturn]] void fail(const std::string& msg) const {
    const Token& k = peek();
    std::string got = k.kind == Tok::End ? "end of input" : "'" + k.text + "'";
    throw Error(ErrorKind::Parse, k.span.str() + ": " + msg + ", found " + got);
  }
  void expect(const std::string& s) {
    if (!at(s)) fail("expected '" + s + "'");
    next();
  }
  void expect_word(const std::string& s) {
    if (!at_word(s)) fail("expected '" + s + "'");
    next();
  }
  bool accept(const std::string& s) {
    if (!at(s)) return false;
    next();
    return true;
  }
  std::string ident(const char* what = "identifier") {
    if (peek().kind != Tok::Ident) fail(std::string("expected ") + what);
    return next().text;
  }
  // symbol names in theories may be numerals or operators
  std::string symbol_name() {
    if (peek().kind == Tok::Ident || peek().kind == Tok::Number) return next().text;
    if (peek().kind == Tok::Punct && (at("*") || at("+") || at("<=") || at("++"))) return next().text;
    fail("expected a symbol name");
  }

  Term term(const Scope& s) { return binary(s, 0); }

  // x:A, y:B   (a run of names may share one sort: x y : A)
  Context bindings(const std::function<bool()>& stop) {
    Context c;
    while (!stop()) {
      std::vector<std::string> names{ident("variable")};
      while (peek().kind == Tok::Ident) names.push_back(next().text);
      expect(":");
      std::string sort = ident("sort");
      for (auto& n : names) {
        SourceSpan sp = peek().span;
        at_span(sp, [&] { c.add(n, sort); });
      }
      if (!accept(",")) break;
    }
    return c;
  }

 private:
  static int level(const std::string& op) {
    if (op == "or") return 1;
    if (op == "and") return 2;
    if (op == "<=") return 3;
    if (op == "++") return 4;
    if (op == "+" || op == "-") return 5;
    if (op == "*") return 6;
    return 0;
  }
  std::string peek_op() const {
    const Token& k = peek();
    if (k.kind == Tok::Punct && level(k.text)) return k.text;
    if (k.kind == Tok::Ident && (k.text == "and" || k.text == "or")) return k.text;
    return "";
  }

  Term binary(const Scope& s, int min) {
    Term lhs = unary_term(s);
    for (;;) {
      std::string op = peek_op();
      int lv = op.empty() ? 0 : level(op);
      if (!lv || lv <= min) return lhs;
      next();
      // <= is non-associative; the rest group to the left
      Term rhs = binary(s, lv);
      if (op == "-")
        lhs = Term::app("+", {lhs, Term::app("neg", {rhs})});
      else
        lhs = Term::app(op, {lhs, rhs});
      if (op == "<=" && peek_op() == "<=") fail("chained <=");
    }
  }

  Term unary_term(const Scope& s) {
    if (accept("-")) return Term::app("neg", {unary_term(s)});
    if (at_word("not")) {
      next();
      return Term::app("not", {unary_term(s)});
    }
    return postfix(s);
  }

  Term postfix(const Scope& s) {
    Term t = primary(s);
    while (at(".")) {
      next();
      t = unary(ident("edge or attribute"), t);
    }
    return t;
  }

  Term primary(const Scope& s) {
    const Token& k = peek();
    if (accept("(")) {
      Term t = term(s);
      expect(")");
      return t;
    }
    if (k.kind == Tok::Number) return Term::app(next().text);
    if (k.kind == Tok::String) {
      Token tk = next();
      for (char c : tk.text)
        if (letters().find(c) == std::string::npos)
          throw Error(ErrorKind::Parse, tk.span.str() + ": string literals may only hold letters");
      return str_lit(tk.text);
    }
    if (k.kind != Tok::Ident) fail("expected a term");
    Token tk = next();
    const std::string& n = tk.text;
    if (accept("(")) {
      std::vector<Term> args;
      if (!at(")")) do
          args.push_back(term(s));
        while (accept(","));
      expect(")");
      return Term::app(n, args);
    }
    if (s.ctx && s.ctx->find(n)) return Term::var(n);
    if (type_signature().has_symbol(n) && !type_signature().lookup(n)->dom.size()) return Term::app(n);
    if (s.consts) {
      auto f = s.consts->lookup(n);
      if (f && f->dom.empty()) return Term::app(n);
    }
    if (!s.implicit.empty() && s.postfix && s.postfix->count(n)) return unary(n, Term::var(s.implicit));
    if (s.free_vars) return Term::var(n);
    throw Error(ErrorKind::UnknownVariable, tk.span.str() + ": " + n);
  }

  std::vector<Token> t_;
  std::size_t p_ = 0;
};

class Loader {
 public:
  Loader(std::vector<Token> toks, Workspace& ws) : p_(std::move(toks)), ws_(ws) {}

  void run() {
    while (!p_.done()) decl();
  }

 private:
  using Stop = std::function<bool()>;

  Stop section_end(std::initializer_list<const char*> words) {
    std::vector<std::string> w(words.begin(), words.end());
    return [this, w] {
      if (p_.at("}") || p_.done()) return true;
      for (auto& x : w)
        if (p_.at_word(x)) return true;
      return false;
    };
  }

  // items up to the next section keyword, separated by ; or ,
  void items(const Stop& stop, const std::function<void()>& one) {
    while (!stop()) {
      one();
      if (!p_.accept(";") && !p_.accept(",") && !stop()) p_.fail("expected ';'");
    }
  }

  void declare(Workspace::Kind k, const std::string& name, const SourceSpan& sp) {
    for (const auto& d : ws_.order)
      if (d.name == name && d.kind == k) throw Error(ErrorKind::NameClash, sp.str() + ": " + name + " declared twice");
    ws_.order.push_back({k, name, sp});
  }

  SchemaRef schema_ref() {
    SourceSpan sp = p_.peek().span;
    std::string n = p_.ident("schema name");
    return at_span(sp, [&] { return ws_.schema(n); });
  }

  void decl() {
    SourceSpan sp = p_.peek().span;
    std::string kw = p_.ident("declaration");
    if (kw == "typeside") throw Error(ErrorKind::Parse, sp.str() + ": the typeside is built in");
    if (kw == "theory") return theory(sp);
    if (kw == "schema") return schema(sp);
    if (kw == "instance") return instance(sp);
    if (kw == "mapping") return mapping(sp);
    if (kw == "bimodule") return bimodule(sp);
    if (kw == "query") return query(sp);
    if (kw == "uberquery") return uber(sp);
    throw Error(ErrorKind::Parse, sp.str() + ": unknown declaration '" + kw + "'");
  }

  std::pair<Context, Term> forall_term(const Scope& base) {
    Context c;
    if (p_.at_word("forall")) {
      p_.next();
      c = p_.bindings([&] { return p_.at("."); });
      p_.expect(".");
    }
    Scope s = base;
    s.ctx = &c;
    Term l = p_.term(s);
    return {c, l};
  }

  // lhs [= rhs]; a bare boolean term means "= true"
  std::tuple<Context, Term, Term, SourceSpan> equation(const Scope& base) {
    SourceSpan sp = p_.peek().span;
    auto [c, l] = forall_term(base);
    Scope s = base;
    s.ctx = &c;
    Term r = p_.accept("=") ? p_.term(s) : bool_lit(true);
    return {c, l, r, sp};
  }

  void theory(const SourceSpan& sp) {
    Theory th{p_.ident("theory name"), {}};
    declare(Workspace::Kind::Theory, th.name, sp);
    Signature& sig = th.pres.sig;
    p_.expect("{");
    auto stop = section_end({"sorts", "symbols", "equations"});
    while (!p_.accept("}")) {
      SourceSpan ssp = p_.peek().span;
      std::string sec = p_.ident("section");
      if (sec == "sorts") {
        items(stop, [&] {
          while (p_.peek().kind == Tok::Ident && !stop()) sig.add_sort(p_.next().text);
        });
      } else if (sec == "symbols") {
        items(stop, [&] {
          SourceSpan isp = p_.peek().span;
          std::vector<std::string> names{p_.symbol_name()};
          while (!p_.at(":")) names.push_back(p_.symbol_name());
          p_.expect(":");
          std::vector<std::string> dom;
          while (p_.peek().kind == Tok::Ident) dom.push_back(p_.next().text);
          std::string cod;
          if (p_.accept("->")) {
            cod = p_.ident("sort");
          } else {
            if (dom.size() != 1) p_.fail("expected '->'");
            cod = dom[0];
            dom.clear();
          }
          for (auto& n : names) at_span(isp, [&] { sig.add_symbol({n, dom, cod, false}); });
        });
      } else if (sec == "equations") {
        Scope s;
        s.consts = &sig;
        items(stop, [&] {
          auto [c, l, r, esp] = equation(s);
          at_span(esp, [&, &c = c, &l = l, &r = r] { th.pres.eqs.push_back(make_equation(c, l, r, sig)); });
        });
      } else {
        throw Error(ErrorKind::Parse, ssp.str() + ": unknown theory section '" + sec + "'");
      }
    }
    ws_.theories[th.name] = th;
  }

  static std::set<std::string> postfix_names(const SchemaPresentation& p) {
    std::set<std::string> out;
    for (auto& f : p.edges) out.insert(f.name);
    for (auto& f : p.attributes) out.insert(f.name);
    return out;
  }

  void arrows(const Stop& stop, std::vector<Symbol>& out) {
    items(stop, [&] {
      std::vector<std::string> names{p_.ident("name")};
      while (p_.peek().kind == Tok::Ident) names.push_back(p_.next().text);
      p_.expect(":");
      std::string a = p_.ident("sort");
      p_.expect("->");
      std::string b = p_.ident("sort");
      for (auto& n : names) out.push_back({n, {a}, b, true});
    });
  }

  void schema(const SourceSpan& sp) {
    std::string name = p_.ident("schema name");
    declare(Workspace::Kind::Schema, name, sp);
    SchemaPresentation p;
    std::vector<std::tuple<Context, Term, Term, SourceSpan, bool>> eqs;
    p_.expect("{");
    auto stop = section_end({"entities", "edges", "attributes", "path_eqs", "obs_eqs"});
    while (!p_.accept("}")) {
      SourceSpan ssp = p_.peek().span;
      std::string sec = p_.ident("section");
      if (sec == "entities") {
        items(stop, [&] {
          while (p_.peek().kind == Tok::Ident && !stop()) p.entities.push_back(p_.next().text);
        });
      } else if (sec == "edges") {
        arrows(stop, p.edges);
      } else if (sec == "attributes") {
        arrows(stop, p.attributes);
      } else if (sec == "path_eqs" || sec == "obs_eqs") {
        items(stop, [&] {
          auto [c, l, r, esp] = equation(Scope{});
          eqs.push_back({c, l, r, esp, sec == "path_eqs"});
        });
      } else {
        throw Error(ErrorKind::Parse, ssp.str() + ": unknown schema section '" + sec + "'");
      }
    }
    Signature sig = at_span(sp, [&] { return collage_signature(p); });
    for (auto& [c, l, r, esp, path] : eqs) {
      Equation e = at_span(esp, [&, &c = c, &l = l, &r = r] { return make_equation(c, l, r, sig); });
      (path ? p.path_eqs : p.obs_eqs).push_back(e);
    }
    ws_.schemas[name] = at_span(sp, [&] { return compile_schema(p, name); });
  }

  void instance(const SourceSpan& sp) {
    std::string name = p_.ident("instance name");
    declare(Workspace::Kind::Instance, name, sp);
    p_.expect_word("on");
    InstancePresentation I{name, schema_ref(), {}, {}};
    p_.expect("{");
    auto stop = section_end({"generators", "equations"});
    while (!p_.accept("}")) {
      SourceSpan ssp = p_.peek().span;
      std::string sec = p_.ident("section");
      if (sec == "generators") {
        items(stop, [&] {
          std::vector<std::string> names{p_.ident("generator")};
          while (p_.peek().kind == Tok::Ident) names.push_back(p_.next().text);
          p_.expect(":");
          SourceSpan gsp = p_.peek().span;
          std::string s = p_.ident("sort");
          at_span(gsp, [&] {
            if (!I.schema->is_entity(s) && !is_type_sort(s)) throw Error(ErrorKind::UnknownSort, s);
            for (auto& n : names) I.gens.add(n, s);
          });
        });
      } else if (sec == "equations") {
        Scope s;
        s.ctx = &I.gens;
        items(stop, [&] {
          SourceSpan esp = p_.peek().span;
          Term l = p_.term(s);
          Term r = p_.accept("=") ? p_.term(s) : bool_lit(true);
          I.eqs.push_back(at_span(esp, [&] { return ground_eq(I, l, r); }));
        });
      } else {
        throw Error(ErrorKind::Parse, ssp.str() + ": unknown instance section '" + sec + "'");
      }
    }
    at_span(sp, [&] { validate_presentation(I); });
    ws_.instances[name] = I;
  }

  void mapping(const SourceSpan& sp) {
    std::string name = p_.ident("mapping name");
    declare(Workspace::Kind::Mapping, name, sp);
    p_.expect(":");
    SchemaMapping F{name, schema_ref(), nullptr, {}, {}, {}};
    p_.expect("->");
    F.dst = schema_ref();
    auto post = postfix_names(F.dst->pres);
    p_.expect("{");
    auto stop = section_end({"entity", "edge", "attribute", "entities", "edges", "attributes"});
    std::vector<std::tuple<std::string, std::string, SourceSpan>> pending;
    while (!p_.accept("}")) {
      SourceSpan ssp = p_.peek().span;
      std::string sec = p_.ident("section");
      if (!sec.empty() && sec.back() == 's') sec = sec == "entities" ? "entity" : sec.substr(0, sec.size() - 1);
      if (sec == "entity") {
        items(stop, [&] {
          std::string a = p_.ident("entity");
          p_.expect("->");
          F.entity_map[a] = p_.ident("entity");
        });
      } else if (sec == "edge" || sec == "attribute") {
        items(stop, [&] {
          SourceSpan isp = p_.peek().span;
          std::string f = p_.ident(sec.c_str());
          p_.expect("->");
          Context x{{kMapVar, "?"}};
          Scope s;
          s.ctx = &x;
          s.implicit = kMapVar;
          s.postfix = &post;
          Term t = p_.term(s);
          (sec == "edge" ? F.edge_map : F.attr_map)[f] = t;
        });
      } else {
        throw Error(ErrorKind::Parse, ssp.str() + ": unknown mapping section '" + sec + "'");
      }
    }
    // edges sent to the identity path may be left out
    for (const auto& f : F.src->pres.edges)
      if (!F.edge_map.count(f.name) && F.dst->is_edge(f.name)) F.edge_map[f.name] = unary(f.name, Term::var(kMapVar));
    for (const auto& f : F.src->pres.attributes)
      if (!F.attr_map.count(f.name) && F.dst->is_attribute(f.name))
        F.attr_map[f.name] = unary(f.name, Term::var(kMapVar));
    for (const auto& e : F.src->pres.entities)
      if (!F.entity_map.count(e) && F.dst->is_entity(e)) F.entity_map[e] = e;
    at_span(sp, [&] { validate_mapping_shape(F); });
    ws_.mappings[name] = F;
  }

  void bimodule(const SourceSpan& sp) {
    std::string name = p_.ident("bimodule name");
    declare(Workspace::Kind::Bimodule, name, sp);
    p_.expect(":");
    BimodulePresentation M{name, schema_ref(), nullptr, {}, {}, {}};
    p_.expect("->");
    M.dst = schema_ref();
    p_.expect("{");
    auto stop = section_end({"generators", "equations"});
    while (!p_.accept("}")) {
      SourceSpan ssp = p_.peek().span;
      std::string sec = p_.ident("section");
      if (sec == "generators") {
        std::vector<Symbol> gs;
        arrows(stop, gs);
        for (auto& g : gs) (is_type_sort(g.cod) ? M.gen_attrs : M.gen_edges).push_back(g);
      } else if (sec == "equations") {
        items(stop, [&] {
          auto [c, l, r, esp] = equation(Scope{});
          at_span(esp, [&, &c = c, &l = l, &r = r] {
            auto ms = identity_mapping(M.src), md = identity_mapping(M.dst);
            std::string s = detail::CollageBuilder::resolve_side(M, l, c, ms, md).second;
            std::string s2 = detail::CollageBuilder::resolve_side(M, r, c, ms, md).second;
            if (s != s2) throw Error(ErrorKind::SortMismatch, to_string(l) + " = " + to_string(r));
            M.eqs.push_back({c, l, r, s});
          });
        });
      } else {
        throw Error(ErrorKind::Parse, ssp.str() + ": unknown bimodule section '" + sec + "'");
      }
    }
    at_span(sp, [&] { collage_of_bimodule(M); });
    ws_.bimodules[name] = M;
  }

  // for / where / keys / return clauses shared by queries and uber-query blocks
  struct Clauses {
    Context for_ctx;
    std::vector<std::pair<Term, Term>> where;
    std::vector<std::tuple<std::string, std::string, std::vector<std::pair<std::string, Term>>, SourceSpan>> keys;
    std::vector<std::pair<std::string, Term>> ret;
  };

  Clauses clauses() {
    Clauses c;
    auto stop = section_end({"for", "where", "keys", "return"});
    Scope s;
    s.ctx = &c.for_ctx;
    while (!p_.accept("}")) {
      SourceSpan ssp = p_.peek().span;
      std::string sec = p_.ident("clause");
      if (sec == "for") {
        Context more = p_.bindings(stop);
        for (const auto& b : more) at_span(ssp, [&] { c.for_ctx.add(b.var, b.sort); });
        p_.accept(";");
      } else if (sec == "where") {
        items(stop, [&] {
          Term l = p_.term(s);
          Term r = p_.accept("=") ? p_.term(s) : bool_lit(true);
          c.where.push_back({l, r});
        });
      } else if (sec == "keys") {
        items(stop, [&] {
          SourceSpan ksp = p_.peek().span;
          std::string f = p_.ident("edge");
          p_.expect(":=");
          std::string tgt = p_.ident("entity");
          p_.expect("[");
          std::vector<std::pair<std::string, Term>> as;
          if (!p_.at("]")) do {
              std::string v = p_.ident("variable");
              p_.expect(":=");
              as.push_back({v, p_.term(s)});
            } while (p_.accept(","));
          p_.expect("]");
          c.keys.push_back({f, tgt, as, ksp});
        });
      } else if (sec == "return") {
        items(stop, [&] {
          std::string v = p_.ident("column");
          p_.expect(":=");
          c.ret.push_back({v, p_.term(s)});
        });
      } else {
        throw Error(ErrorKind::Parse, ssp.str() + ": unknown clause '" + sec + "'");
      }
    }
    return c;
  }

  void query(const SourceSpan& sp) {
    std::string name = p_.ident("query name");
    declare(Workspace::Kind::Query, name, sp);
    p_.expect_word("on");
    SchemaRef S = schema_ref();
    p_.expect("{");
    Clauses c = clauses();
    if (!c.keys.empty()) throw Error(ErrorKind::Parse, std::get<3>(c.keys[0]).str() + ": keys outside an uberquery");
    ws_.queries[name] = at_span(sp, [&] { return make_query(name, S, c.for_ctx, c.where, c.ret); });
  }

  void uber(const SourceSpan& sp) {
    std::string name = p_.ident("uberquery name");
    declare(Workspace::Kind::UberQuery, name, sp);
    p_.expect_word("on");
    SchemaRef S = schema_ref();
    p_.expect("->");
    UberQuery N{name, S, schema_ref(), {}};
    p_.expect("{");
    std::vector<std::pair<Clauses, SourceSpan>> raw;
    while (!p_.accept("}")) {
      SourceSpan bsp = p_.peek().span;
      p_.expect_word("entity");
      std::string e = p_.ident("entity");
      p_.expect("{");
      Clauses c = clauses();
      Query q = at_span(bsp, [&] { return make_query(e, S, c.for_ctx, c.where, {}); });
      UberBlock b{e, c.for_ctx, q.where_eqs, {}, {}};
      for (auto& [v, t] : c.ret) {
        at_span(bsp, [&, &v = v, &t = t] {
          const Symbol* a = N.result->attribute(v);
          if (!a || a->dom[0] != e) throw Error(ErrorKind::SchemaMismatch, v + " is not an attribute of " + e);
          std::string s = S->sort_of(t, c.for_ctx);
          if (s != a->cod) throw Error(ErrorKind::SortMismatch, "return " + v + " has sort " + s);
        });
        b.ret.push_back({v, t});
      }
      N.blocks.push_back(b);
      raw.push_back({c, bsp});
    }
    for (std::size_t i = 0; i < raw.size(); ++i)
      for (auto& [f, tgt, as, ksp] : raw[i].first.keys)
        at_span(ksp, [&, &f = f, &tgt = tgt, &as = as] {
          const Symbol* e = N.result->edge(f);
          if (!e || e->dom[0] != N.blocks[i].entity) throw Error(ErrorKind::SchemaMismatch, f + " is not an edge out of " + N.blocks[i].entity);
          if (e->cod != tgt) throw Error(ErrorKind::SchemaMismatch, f + " points at " + e->cod + ", not " + tgt);
          const UberBlock& tb = N.block(tgt);
          ContextMorphism k{N.blocks[i].for_ctx, tb.for_ctx, {}};
          for (const auto& b : tb.for_ctx) {
            auto it = std::find_if(as.begin(), as.end(), [&](auto& a) { return a.first == b.var; });
            if (it == as.end()) throw Error(ErrorKind::InvalidKeys, "keys " + f + " miss " + b.var);
            k.assign.push_back(it->second);
          }
          if (as.size() != tb.for_ctx.size()) throw Error(ErrorKind::InvalidKeys, "keys " + f + " name unknown variables");
          k.validate(S->collage_sig);
          N.blocks[i].keys[f] = k;
        });
    at_span(sp, [&] {
      auto bad = check_uber_query(N);
      if (!bad.empty()) throw Error(ErrorKind::InvalidKeys, bad.front());
    });
    ws_.uber_queries[name] = N;
  }

  Parser p_;
  Workspace& ws_;
};

}  // namespace dsl

inline Workspace parse_workspace(const std::string& text, const std::string& file = "<input>") {
  Workspace ws;
  dsl::Loader(dsl::lex(text, file), ws).run();
  return ws;
}

inline Workspace load_workspace(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorKind::Io, "cannot open " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_workspace(ss.str(), path);
}

// A term over a theory, with identifiers outside the signature read as variables.
inline Term parse_theory_term(const std::string& text, const Theory& th) {
  dsl::Parser p(dsl::lex(text, "<term>"));
  dsl::Scope s;
  s.consts = &th.pres.sig;
  s.free_vars = true;
  Term t = p.term(s);
  if (!p.done()) p.fail("trailing input");
  infer_context({t}, th.pres.sig);
  return t;
}

// ---------------------------------------------------------------- printing

namespace dsl {

inline std::string show_ctx(const Context& c) {
  std::string s;
  for (const auto& b : c) s += (s.empty() ? "" : ", ") + b.var + ":" + b.sort;
  return s;
}

inline std::string show_eq(const Equation& e, const PrintOptions& po, bool binder) {
  std::string s;
  if (binder) s += "forall " + show_ctx(e.ctx) + " . ";
  return s + to_string(e.lhs, po) + " = " + to_string(e.rhs, po);
}

inline void print_arrows(std::ostream& os, const char* kw, const std::vector<Symbol>& v) {
  if (v.empty()) return;
  os << "  " << kw << "\n";
  for (const auto& f : v) os << "    " << f.name << " : " << f.dom[0] << " -> " << f.cod << ";\n";
}

}  // namespace dsl

inline std::string print_workspace(const Workspace& ws) {
  using namespace dsl;
  std::ostringstream os;
  for (const auto& d : ws.order) {
    switch (d.kind) {
      case Workspace::Kind::Theory: {
        const Theory& th = ws.theory(d.name);
        PrintOptions po{&th.pres.sig};
        os << "theory " << th.name << " {\n  sorts";
        for (const auto& s : th.pres.sig.sorts()) os << " " << s;
        os << ";\n  symbols\n";
        for (const auto& f : th.pres.sig.symbols()) {
          os << "    " << f.name << " :";
          for (const auto& s : f.dom) os << " " << s;
          os << (f.dom.empty() ? " " : " -> ") << f.cod << ";\n";
        }
        os << "  equations\n";
        for (const auto& e : th.pres.eqs) os << "    " << show_eq(e, po, true) << ";\n";
        os << "}\n\n";
        break;
      }
      case Workspace::Kind::Schema: {
        const Schema& s = *ws.schema(d.name);
        PrintOptions po = s.print_options();
        os << "schema " << s.name << " {\n  entities";
        for (const auto& e : s.pres.entities) os << " " << e;
        os << ";\n";
        print_arrows(os, "edges", s.pres.edges);
        print_arrows(os, "attributes", s.pres.attributes);
        if (!s.pres.path_eqs.empty()) os << "  path_eqs\n";
        for (const auto& e : s.pres.path_eqs) os << "    " << show_eq(e, po, true) << ";\n";
        if (!s.pres.obs_eqs.empty()) os << "  obs_eqs\n";
        for (const auto& e : s.pres.obs_eqs) os << "    " << show_eq(e, po, true) << ";\n";
        os << "}\n\n";
        break;
      }
      case Workspace::Kind::Instance: {
        const InstancePresentation& I = ws.instance(d.name);
        PrintOptions po = I.schema->print_options();
        os << "instance " << I.name << " on " << I.schema->name << " {\n";
        if (!I.gens.empty()) {
          os << "  generators\n";
          for (const auto& b : I.gens) os << "    " << b.var << " : " << b.sort << ";\n";
        }
        if (!I.eqs.empty()) os << "  equations\n";
        for (const auto& e : I.eqs) os << "    " << show_eq(e, po, false) << ";\n";
        os << "}\n\n";
        break;
      }
      case Workspace::Kind::Mapping: {
        const SchemaMapping& F = ws.mapping(d.name);
        PrintOptions po = F.dst->print_options();
        os << "mapping " << F.name << " : " << F.src->name << " -> " << F.dst->name << " {\n";
        for (auto& [a, b] : F.entity_map) os << "  entity " << a << " -> " << b << ";\n";
        for (auto& [a, t] : F.edge_map) os << "  edge " << a << " -> " << to_string(t, po) << ";\n";
        for (auto& [a, t] : F.attr_map) os << "  attribute " << a << " -> " << to_string(t, po) << ";\n";
        os << "}\n\n";
        break;
      }
      case Workspace::Kind::Bimodule: {
        const BimodulePresentation& M = ws.bimodule(d.name);
        os << "bimodule " << M.name << " : " << M.src->name << " -> " << M.dst->name << " {\n";
        std::vector<Symbol> gs = M.gen_edges;
        gs.insert(gs.end(), M.gen_attrs.begin(), M.gen_attrs.end());
        print_arrows(os, "generators", gs);
        if (!M.eqs.empty()) os << "  equations\n";
        for (const auto& e : M.eqs) os << "    " << show_eq(e, PrintOptions{}, true) << ";\n";
        os << "}\n\n";
        break;
      }
      case Workspace::Kind::Query: {
        const Query& Q = ws.query(d.name);
        PrintOptions po = Q.schema->print_options();
        os << "query " << Q.name << " on " << Q.schema->name << " {\n  for " << show_ctx(Q.for_ctx) << ";\n";
        if (!Q.where_eqs.empty()) os << "  where\n";
        for (const auto& e : Q.where_eqs) os << "    " << show_eq(e, po, false) << ";\n";
        os << "  return\n";
        for (std::size_t i = 0; i < Q.return_ctx.size(); ++i)
          os << "    " << Q.return_ctx[i].var << " := " << to_string(Q.return_morph.assign[i], po) << ";\n";
        os << "}\n\n";
        break;
      }
      case Workspace::Kind::UberQuery: {
        const UberQuery& N = ws.uber_query(d.name);
        PrintOptions po = N.schema->print_options();
        os << "uberquery " << N.name << " on " << N.schema->name << " -> " << N.result->name << " {\n";
        for (const auto& b : N.blocks) {
          os << "  entity " << b.entity << " {\n    for " << show_ctx(b.for_ctx) << ";\n";
          if (!b.where_eqs.empty()) os << "    where\n";
          for (const auto& e : b.where_eqs) os << "      " << show_eq(e, po, false) << ";\n";
          for (auto& [f, k] : b.keys) {
            os << "    keys " << f << " := " << N.result->edge(f)->cod << "[";
            for (std::size_t i = 0; i < k.target.size(); ++i)
              os << (i ? ", " : "") << k.target[i].var << " := " << to_string(k.assign[i], po);
            os << "];\n";
          }
          if (!b.ret.empty()) os << "    return\n";
          for (auto& [v, t] : b.ret) os << "      " << v << " := " << to_string(t, po) << ";\n";
          os << "  }\n";
        }
        os << "}\n\n";
        break;
      }
    }
  }
  return os.str();
}

}  // namespace catdb
