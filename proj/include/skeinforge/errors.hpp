#pragma once

#include <stdexcept>
#include <string>

namespace skf {

struct SkeinError : std::runtime_error {
  explicit SkeinError(const std::string& m) : std::runtime_error(m) {}
};

// A division whose precondition (valuation/divisibility) failed. Signals an
// engine bug or an invalid input, never a recoverable condition.
struct ValuationError : SkeinError {
  explicit ValuationError(const std::string& m) : SkeinError("ValuationError: " + m) {}
};

struct MalformedSpec : SkeinError {
  explicit MalformedSpec(const std::string& m) : SkeinError("MalformedSpec: " + m) {}
};

struct UnknownBand : SkeinError {
  explicit UnknownBand(const std::string& m) : SkeinError("UnknownBand: " + m) {}
};

struct NotEmbeddable : SkeinError {
  explicit NotEmbeddable(const std::string& m) : SkeinError("NotEmbeddable: " + m) {}
};

struct SurfaceMismatch : SkeinError {
  explicit SurfaceMismatch(const std::string& m) : SkeinError("SurfaceMismatch: " + m) {}
};

struct InsufficientPrecision : SkeinError {
  explicit InsufficientPrecision(const std::string& m) : SkeinError("InsufficientPrecision: " + m) {}
};

struct DegreeError : SkeinError {
  explicit DegreeError(const std::string& m) : SkeinError("DegreeError: " + m) {}
};

struct NotInF3 : SkeinError {
  explicit NotInF3(const std::string& m) : SkeinError("NotInF3: " + m) {}
};

struct Inconclusive : SkeinError {
  explicit Inconclusive(const std::string& m) : SkeinError("Inconclusive: " + m) {}
};

struct StalledConvergence : SkeinError {
  int last_certified_degree;
  int depth_used;
  StalledConvergence(const std::string& m, int last_deg, int depth)
      : SkeinError("StalledConvergence: " + m + " (last certified degree " +
                   std::to_string(last_deg) + ", depth " + std::to_string(depth) + ")"),
        last_certified_degree(last_deg),
        depth_used(depth) {}
};

struct NotAdmissible : SkeinError {
  explicit NotAdmissible(const std::string& m) : SkeinError("NotAdmissible: " + m) {}
};

struct InvalidPair : SkeinError {
  explicit InvalidPair(const std::string& m) : SkeinError("InvalidPair: " + m) {}
};

struct UnknownRelation : SkeinError {
  explicit UnknownRelation(const std::string& m) : SkeinError("UnknownRelation: " + m) {}
};

struct ParseError : SkeinError {
  explicit ParseError(const std::string& m) : SkeinError("ParseError: " + m) {}
};

}  // namespace skf
