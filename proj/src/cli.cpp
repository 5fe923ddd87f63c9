#include "skeinforge/cli.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <cstdlib>
#include <fstream>
#include <future>
#include <iostream>
#include <sstream>

#include "skeinforge/library.hpp"

namespace skf {

using nlohmann::json;

// ------------------------------------------------------------- definitions

SessionDefs parse_definitions(std::istream& in) {
  SessionDefs defs;
  std::string line;
  int lineno = 0;
  int marked = 0;
  std::vector<std::string> ends;
  std::vector<std::array<std::string, 4>> pending_curves;  // kind-specific
  while (std::getline(in, line)) {
    ++lineno;
    std::istringstream ls(line);
    std::string tok;
    if (!(ls >> tok) || tok.empty() || tok[0] == '#') continue;
    auto fail = [&](const std::string& m) {
      throw ParseError("line " + std::to_string(lineno) + ": " + m);
    };
    if (tok == "surface") {
      std::string name, kw;
      if (!(ls >> name >> kw) || kw != "bands") fail("want: surface NAME bands ... order ...");
      std::vector<std::string> words;
      std::string w;
      while (ls >> w) words.push_back(w);
      auto it = std::find(words.begin(), words.end(), "order");
      if (it == words.end()) fail("missing 'order'");
      ends.assign(it + 1, words.end());
    } else if (tok == "marked") {
      if (!(ls >> marked)) fail("want: marked K");
    } else if (tok == "curve") {
      std::string name, kind;
      if (!(ls >> name >> kind)) fail("want: curve NAME kind ...");
      std::string rest;
      std::getline(ls, rest);
      pending_curves.push_back({name, kind, rest, ""});
    } else if (tok == "torelli") {
      std::string name, kind, c1, c2;
      if (!(ls >> name >> kind >> c1)) fail("want: torelli NAME kind c1 [c2]");
      ls >> c2;
      GenKind gk;
      if (kind == "sep")
        gk = GenKind::Sep;
      else if (kind == "bp")
        gk = GenKind::Bp;
      else if (kind == "comm")
        gk = GenKind::Comm;
      else
        fail("unknown generator kind '" + kind + "'");
      defs.gens[name] = {gk, c1, c2};
    } else {
      fail("unknown declaration '" + tok + "'");
    }
  }
  if (ends.empty()) throw ParseError("no surface declaration");
  defs.S = make_surface(ends, marked);
  for (auto& [name, kind, rest, unused] : pending_curves) {
    std::istringstream rs(rest);
    if (kind == "core") {
      std::string b;
      rs >> b;
      defs.curves.emplace(name, OrientedCurve{defs.S, Word{{defs.S->band_index(b), 1}}});
    } else if (kind == "boundary") {
      int i = 0;
      rs >> i;
      Multicurve m = boundary_parallel(defs.S, i);
      defs.curves.emplace(name,
                          OrientedCurve{defs.S, defs.S->word_from_string(m.loops.begin()->first)});
    } else if (kind == "twist") {
      std::string c, d;
      int k = 1;
      rs >> c >> d >> k;
      if (!defs.curves.count(c) || !defs.curves.count(d))
        throw ParseError("curve '" + name + "': twist needs previously defined curves");
      defs.curves.emplace(name, dehn_twist(defs.curves.at(c), defs.curves.at(d), k));
    } else if (kind == "word") {
      std::string w;
      std::getline(rs, w);
      Multicurve m = curve_from_word(defs.S, defs.S->word_from_string(w));  // NotEmbeddable check
      (void)m;
      defs.curves.emplace(name, OrientedCurve{defs.S, cyclic_reduce(defs.S->word_from_string(w))});
    } else {
      throw ParseError("curve '" + name + "': unknown kind '" + kind + "'");
    }
  }
  return defs;
}

SessionDefs load_surface(const std::string& name_or_path) {
  if (SurfacePtr lib = lib_surface(name_or_path)) {
    SessionDefs defs;
    defs.S = lib;
    for (int b = 0; b < lib->num_bands(); ++b)
      defs.curves.emplace(lib->band_name(b), OrientedCurve{lib, Word{{b, 1}}});
    // conventional names on the torus library surface
    if (name_or_path == "S11") {
      defs.curves.emplace("x", OrientedCurve{lib, Word{{0, 1}}});
      defs.curves.emplace("y", OrientedCurve{lib, Word{{1, 1}}});
    }
    return defs;
  }
  std::ifstream f(name_or_path);
  if (!f) throw ParseError("no library surface or file named '" + name_or_path + "'");
  return parse_definitions(f);
}

// -------------------------------------------------------------- expressions

namespace {

struct Parser {
  const std::string& s;
  size_t pos = 0;
  Filtration& fil;
  const TruncationPolicy& pol;
  SessionDefs& defs;

  void skip() {
    while (pos < s.size() && isspace(static_cast<unsigned char>(s[pos]))) ++pos;
  }
  [[noreturn]] void fail(const std::string& m) const {
    throw ParseError(m + " at position " + std::to_string(pos) + " in '" + s + "'");
  }
  bool eat(char c) {
    skip();
    if (pos < s.size() && s[pos] == c) {
      ++pos;
      return true;
    }
    return false;
  }
  std::string ident() {
    skip();
    size_t start = pos;
    while (pos < s.size() && (isalnum(static_cast<unsigned char>(s[pos])) || s[pos] == '_' ||
                              s[pos] == '\''))
      ++pos;
    if (start == pos) fail("expected a name");
    return s.substr(start, pos - start);
  }

  OrientedCurve curve_arg() {
    std::string n = ident();
    auto it = defs.curves.find(n);
    if (it == defs.curves.end()) fail("unknown curve '" + n + "'");
    return it->second;
  }

  SkeinElement atom() {
    skip();
    if (eat('-')) return -atom();
    std::string n = ident();
    SkeinContext& ctx = fil.ctx();
    if (!eat('(')) {
      if (n == "empty") return SkeinElement::unit(ctx.S, ctx.hprec);
      auto it = defs.curves.find(n);
      if (it == defs.curves.end()) fail("unknown name '" + n + "'");
      return SkeinElement::from_multicurve(it->second.as_multicurve(), ctx.hprec);
    }
    std::vector<SkeinElement> args;
    if (n == "L") {
      OrientedCurve c = curve_arg();
      if (!eat(')')) fail("expected ')'");
      fil.add_generating_curve(c.word);
      return L_of_curve(ctx, c.as_multicurve(), pol, pol.filt_cap + 2);
    }
    if (n == "zeta") {
      TorelliWord w;
      do {
        skip();
        int e = 1;
        if (eat('-')) e = -1;
        std::string g = ident();
        auto it = defs.gens.find(g);
        if (it == defs.gens.end()) fail("unknown torelli generator '" + g + "'");
        auto cv = [&](const std::string& cn) {
          auto ci = defs.curves.find(cn);
          if (ci == defs.curves.end()) fail("generator '" + g + "' uses unknown curve " + cn);
          return ci->second;
        };
        TorelliGen gen = make_generator(fil, pol, it->second.kind, cv(it->second.c1),
                                        it->second.kind == GenKind::Sep
                                            ? OrientedCurve{}
                                            : cv(it->second.c2),
                                        g);
        w.letters.push_back({gen, e});
      } while (eat(','));
      if (!eat(')')) fail("expected ')'");
      return zeta(fil, w, pol);
    }
    do {
      args.push_back(atom());
    } while (eat(','));
    if (!eat(')')) fail("expected ')'");
    if (n == "mul") {
      if (args.size() != 2) fail("mul takes two arguments");
      return mul(fil.ctx(), args[0], args[1]);
    }
    if (n == "bracket") {
      if (args.size() != 2) fail("bracket takes two arguments");
      return bracket(fil.ctx(), args[0], args[1]);
    }
    if (n == "sigma") {
      if (args.size() != 2) fail("sigma takes two arguments");
      return sigma_action(fil.ctx(), args[0], args[1]);
    }
    if (n == "exp_sigma") {
      if (args.size() != 2) fail("exp_sigma takes two arguments");
      return exp_sigma(fil, args[0], args[1], pol);
    }
    if (n == "bch") {
      if (args.size() < 2) fail("bch takes at least two arguments");
      return bch_list(fil, args, pol);
    }
    fail("unknown operation '" + n + "'");
  }
};

}  // namespace

SkeinElement eval_expression(Filtration& fil, const TruncationPolicy& pol, SessionDefs& defs,
                             const std::string& expr) {
  Parser p{expr, 0, fil, pol, defs};
  SkeinElement e = p.atom();
  p.skip();
  if (p.pos != expr.size()) p.fail("trailing input");
  return e;
}

// ----------------------------------------------------------------- reports

std::string hseries_json(const HSeries& s) {
  json coeffs = json::array();
  for (int k = 0; k < s.prec(); ++k) coeffs.push_back(rat_to_string(s.coeff(k)));
  return json{{"prec", s.prec()}, {"coeffs", coeffs}}.dump();
}

static json hseries_j(const HSeries& s) {
  json coeffs = json::array();
  for (int k = 0; k < s.prec(); ++k) coeffs.push_back(rat_to_string(s.coeff(k)));
  return json{{"prec", s.prec()}, {"coeffs", coeffs}};
}

static json element_j(const SkeinElement& e) {
  json terms = json::array();
  for (auto& [k, c] : e.terms) {
    json loops = json::array();
    for (auto& [w, m] : k.loops) loops.push_back({w, m});
    json arcs = json::array();
    for (auto& a : k.arcs) arcs.push_back({a.from, a.to, a.word});
    terms.push_back({{"key", k.str()}, {"loops", loops}, {"arcs", arcs}, {"coeff", hseries_j(c)}});
  }
  json j{{"terms", terms}};
  if (e.err_order == ERR_NONE)
    j["err_order"] = "none";
  else
    j["err_order"] = e.err_order;
  return j;
}

std::string element_json(const SkeinElement& e) { return element_j(e).dump(2); }

static json policy_j(const TruncationPolicy& p) {
  return json{{"h_order", p.h_order}, {"filt_cap", p.filt_cap}, {"depth", p.depth}};
}

std::string report_json(const RelationReport& r) {
  json panel = json::array();
  for (auto& p : r.panel)
    panel.push_back({{"target", p.target},
                     {"surviving_order", p.surviving_order},
                     {"h_valuation", p.h_valuation}});
  json j{{"relation", r.relation}, {"surface", r.surface},
         {"instance", r.instance}, {"policy", r.policy},
         {"disk_eval", hseries_j(r.disk_eval)},
         {"disk_reliable_through",
          r.disk_reliable_through == INT_MAX ? json("exact") : json(r.disk_reliable_through)},
         {"panel_norms", panel},  {"value_degree", r.value_degree},
         {"verdict", r.verdict},  {"detail", r.detail}};
  return j.dump(2);
}

std::string report_text(const RelationReport& r) {
  std::ostringstream os;
  os << "relation: " << r.relation << "\nsurface: " << r.surface
     << "\ninstance: " << r.instance << "\npolicy: " << r.policy
     << "\ndisk_eval: " << r.disk_eval.to_string();
  if (r.disk_reliable_through == INT_MAX)
    os << " (exact)";
  else
    os << " (reliable through h^" << r.disk_reliable_through << ")";
  os << "\nvalue degree: F^" << r.value_degree << "\n";
  for (auto& p : r.panel)
    os << "panel " << p.target << ": surviving order F^" << p.surviving_order
       << ", leading h^" << p.h_valuation << "\n";
  if (!r.detail.empty()) os << "detail: " << r.detail << "\n";
  os << "verdict: " << r.verdict << "\n";
  return os.str();
}

// --------------------------------------------------------------------- CLI

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"skein-forge: completed Kauffman bracket skein algebra engine"};
  app.require_subcommand(1);

  SessionConfig cfg;
  app.add_option("--surface", cfg.surface, "library surface name or definition file")
      ->required();
  app.add_option("--h-order", cfg.policy.h_order, "reported h precision N");
  app.add_option("--filt-cap", cfg.policy.filt_cap, "filtration cap D");
  app.add_option("--depth", cfg.policy.depth, "sigma/bracket depth budget");
  app.add_option("--cache", cfg.cache_dir, "product cache directory");
  app.add_flag("--json", cfg.json, "JSON reports");
  app.add_option("--threads", cfg.threads, "verification job parallelism");

  std::string expr;
  auto* compute = app.add_subcommand("compute", "evaluate an expression");
  compute->add_option("expr", expr, "expression")->required();

  std::vector<std::string> relations;
  std::string pc, pz, pc3;
  auto* verify = app.add_subcommand("verify", "verify relation instances");
  verify->add_option("relation", relations, "relation ids")->required();
  verify->add_option("--c", pc, "twisting curve (dehn-twist relation)");
  verify->add_option("--z", pz, "target curve (dehn-twist relation)");
  verify->add_option("--c3", pc3, "third curve (f3 relation)");

  std::vector<const char*> argv;
  argv.push_back("skein-forge");
  for (auto& a : args) argv.push_back(a.c_str());
  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::ParseError& e) {
    err << "skein-forge: " << e.what() << "\n";
    return 1;
  }

  if (const char* env = std::getenv("SKEIN_FORGE_CACHE"); env && *env) cfg.cache_dir = env;

  try {
    SessionDefs defs = load_surface(cfg.surface);

    if (compute->parsed()) {
      ProductCache cache(cfg.cache_dir);
      SkeinContext ctx{defs.S, cfg.policy.work_prec(), &cache};
      Filtration fil(ctx);
      SkeinElement e = eval_expression(fil, cfg.policy, defs, expr);
      if (cfg.json) {
        json j{{"command", "compute"},
               {"expr", expr},
               {"surface", defs.S->spec_string()},
               {"policy", policy_j(cfg.policy)},
               {"result", element_j(e)}};
        out << j.dump(2) << "\n";
      } else {
        out << "surface: " << defs.S->spec_string() << "\npolicy: " << cfg.policy.str() << "\n"
            << expr << " = " << e.str() << "\n";
      }
      return 0;
    }

    // verify
    std::map<std::string, std::string> params;
    if (!pc.empty()) {
      auto it = defs.curves.find(pc);
      params["c"] = it != defs.curves.end() ? defs.S->word_to_string(it->second.word) : pc;
    }
    if (!pz.empty()) {
      auto it = defs.curves.find(pz);
      params["z"] = it != defs.curves.end() ? defs.S->word_to_string(it->second.word) : pz;
    }
    if (!pc3.empty()) {
      auto it = defs.curves.find(pc3);
      params["c3"] = it != defs.curves.end() ? defs.S->word_to_string(it->second.word) : pc3;
    }

    auto run_one = [&](const std::string& rel) {
      ProductCache cache(cfg.cache_dir);
      SkeinContext ctx{defs.S, cfg.policy.work_prec(), &cache};
      Filtration fil(ctx);
      return verify_relation(fil, rel, cfg.policy, params);
    };

    std::vector<RelationReport> reports(relations.size());
    if (cfg.threads > 1 && relations.size() > 1) {
      std::vector<std::future<RelationReport>> futs;
      for (auto& rel : relations)
        futs.push_back(std::async(std::launch::async, run_one, rel));
      for (size_t i = 0; i < futs.size(); ++i) reports[i] = futs[i].get();
    } else {
      for (size_t i = 0; i < relations.size(); ++i) reports[i] = run_one(relations[i]);
    }

    int exit_code = 0;
    for (auto& rep : reports) {
      if (cfg.json)
        out << report_json(rep) << "\n";
      else
        out << report_text(rep) << "\n";
      if (rep.verdict == "fail") exit_code = std::max(exit_code, 1);
      if (rep.verdict == "inconclusive") exit_code = std::max(exit_code, 2);
    }
    return exit_code;
  } catch (const UnknownRelation& e) {
    err << "skein-forge: " << e.what() << "\n";
    return 1;
  } catch (const ParseError& e) {
    err << "skein-forge: " << e.what() << "\n";
    return 1;
  } catch (const SkeinError& e) {
    err << "skein-forge: " << e.what() << "\n";
    return 1;
  }
}

}  // namespace skf
