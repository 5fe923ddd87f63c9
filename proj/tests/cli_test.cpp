#include <doctest.h>

#include <filesystem>
#include <sstream>

#include "skeinforge/cli.hpp"
#include "skeinforge/library.hpp"

using namespace skf;

namespace {

int cli(const std::vector<std::string>& args, std::string* out_text = nullptr,
        std::string* err_text = nullptr) {
  std::ostringstream out, err;
  int code = run_cli(args, out, err);
  if (out_text) *out_text = out.str();
  if (err_text) *err_text = err.str();
  return code;
}

}  // namespace

TEST_CASE("definition file parsing") {
  std::istringstream defs(R"(# a torus with one hole
surface S11 bands a b order a+ b+ a- b-
curve x core a
curve y core b
curve z twist x y 1
curve w boundary 0
torelli t bp x z
)");
  SessionDefs d = parse_definitions(defs);
  CHECK(d.S->genus() == 1);
  CHECK(d.curves.count("x"));
  CHECK(loop_key(*d.S, d.curves.at("z").word) == loop_key(*d.S, d.S->word_from_string("a b")));
  CHECK(loop_key(*d.S, d.curves.at("w").word) ==
        loop_key(*d.S, d.S->word_from_string("a b a' b'")));
  CHECK(d.gens.count("t"));

  std::istringstream bad("curve x core a\n");
  CHECK_THROWS_AS(parse_definitions(bad), ParseError);
  std::istringstream bad2("surface S bands a order a+ a-\nbogus line here\n");
  CHECK_THROWS_AS(parse_definitions(bad2), ParseError);
}

TEST_CASE("expression evaluation") {
  SessionDefs defs = load_surface("S11");
  TruncationPolicy pol;
  ProductCache cache;
  SkeinContext ctx{defs.S, pol.work_prec(), &cache};
  Filtration fil(ctx);

  SkeinElement e = eval_expression(fil, pol, defs, "mul(empty, x)");
  SkeinElement x = SkeinElement::from_multicurve(defs.curves.at("x").as_multicurve(), ctx.hprec);
  CHECK(e == x);

  SkeinElement br = eval_expression(fil, pol, defs, "bracket(x, y)");
  CHECK(br.terms.size() == 2);

  SkeinElement L = eval_expression(fil, pol, defs, "L(x)");
  CHECK(epsilon(L) == 0);

  CHECK_THROWS_AS(eval_expression(fil, pol, defs, "mul(x"), ParseError);
  CHECK_THROWS_AS(eval_expression(fil, pol, defs, "frob(x)"), ParseError);
  CHECK_THROWS_AS(eval_expression(fil, pol, defs, "mul(x, nosuch)"), ParseError);
}

TEST_CASE("cli compute command") {
  std::string out;
  int code = cli({"--surface", "S11", "--json", "compute", "bracket(x,y)"}, &out);
  CHECK(code == 0);
  CHECK(out.find("\"terms\"") != std::string::npos);
  CHECK(out.find("a b'") != std::string::npos);

  std::string err;
  code = cli({"--surface", "S11", "compute", "mul(x"}, &out, &err);
  CHECK(code == 1);
  CHECK(err.find("ParseError") != std::string::npos);
}

TEST_CASE("cli verify exit codes") {
  std::string out, err;
  // misuse: lantern needs S04
  int code = cli({"--surface", "S11", "verify", "lantern"}, &out, &err);
  CHECK(code == 1);
  CHECK(err.find("UnknownRelation") != std::string::npos);
  // quick pass: f1 on S21 is exact
  code = cli({"--surface", "S21", "verify", "f1"}, &out, &err);
  CHECK(code == 0);
  CHECK(out.find("verdict: pass") != std::string::npos);
}

TEST_CASE("cli reports are byte stable across runs and caches") {
  std::string dir = "/tmp/skf-cli-cache";
  std::filesystem::remove_all(dir);
  std::string cold, warm, warm2;
  CHECK(cli({"--surface", "S11", "--cache", dir, "--json", "compute", "sigma(L(x), y)"}, &cold) ==
        0);
  CHECK(cli({"--surface", "S11", "--cache", dir, "--json", "compute", "sigma(L(x), y)"}, &warm) ==
        0);
  CHECK(cli({"--surface", "S11", "--cache", dir, "--json", "--threads", "4", "compute",
             "sigma(L(x), y)"},
            &warm2) == 0);
  CHECK(cold == warm);
  CHECK(cold == warm2);
  std::filesystem::remove_all(dir);
}
