#pragma once

// Command-line front end: definition files, computation and verification
// commands, JSON reports, and the persistent product cache wiring.

#include <iosfwd>

#include "skeinforge/torelli.hpp"

namespace skf {

struct SessionConfig {
  std::string surface;  // library name or definition file path
  TruncationPolicy policy;
  std::string cache_dir;  // empty = in-memory only
  bool json = false;
  int threads = 1;
};

struct SessionDefs {
  SurfacePtr S;
  std::map<std::string, OrientedCurve> curves;
  struct GenSpec {
    GenKind kind;
    std::string c1, c2;
  };
  std::map<std::string, GenSpec> gens;
};

/// Parse a line-oriented definition file:
///   surface S11 bands a b order a+ b+ a- b-
///   marked 2
///   curve x core a
///   curve y boundary 0
///   curve z twist x y 1
///   curve w word a b'
///   torelli g bp x z   |  torelli s sep w  |  torelli t comm x z
/// Throws ParseError with the offending line.
SessionDefs parse_definitions(std::istream& in);

/// Resolve --surface: library name (S11/S04/S12/S21) or a definition file.
SessionDefs load_surface(const std::string& name_or_path);

/// Evaluate a compute expression over the defined names:
///   mul(x,y) bracket(x,y) sigma(x,z) L(x) bch(a,b,...) exp_sigma(x,z)
///   zeta(g,-h,...) empty <curve name>
/// Throws ParseError with position info.
SkeinElement eval_expression(Filtration& fil, const TruncationPolicy& pol, SessionDefs& defs,
                             const std::string& expr);

std::string hseries_json(const HSeries& s);
std::string element_json(const SkeinElement& e);
std::string report_json(const RelationReport& r);
std::string report_text(const RelationReport& r);

/// Full CLI entry point (exposed for tests). Returns the exit code and
/// fills out/err.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace skf
