#pragma once

#include <stdexcept>
#include <string>

namespace periodlab {

// Every failure the library signals derives from PeriodlabError so callers
// (and the CLI) can distinguish domain errors from programming errors.
struct PeriodlabError : std::runtime_error {
  explicit PeriodlabError(const std::string& msg) : std::runtime_error(msg) {}
};

struct NonConvergent : PeriodlabError {
  explicit NonConvergent(const std::string& msg) : PeriodlabError(msg) {}
};

struct SingularOnPath : PeriodlabError {
  explicit SingularOnPath(const std::string& msg) : PeriodlabError(msg) {}
};

struct EndpointMismatch : PeriodlabError {
  explicit EndpointMismatch(const std::string& msg) : PeriodlabError(msg) {}
};

struct DimensionMismatch : PeriodlabError {
  explicit DimensionMismatch(const std::string& msg) : PeriodlabError(msg) {}
};

struct PoleOnRegion : PeriodlabError {
  explicit PoleOnRegion(const std::string& msg) : PeriodlabError(msg) {}
};

struct UnsupportedRegion : PeriodlabError {
  explicit UnsupportedRegion(const std::string& msg) : PeriodlabError(msg) {}
};

struct Divergent : PeriodlabError {
  explicit Divergent(const std::string& msg) : PeriodlabError(msg) {}
};

struct OnSingularDivisor : PeriodlabError {
  explicit OnSingularDivisor(const std::string& msg) : PeriodlabError(msg) {}
};

struct InvalidPair : PeriodlabError {
  explicit InvalidPair(const std::string& msg) : PeriodlabError(msg) {}
};

struct InvalidElement : PeriodlabError {
  explicit InvalidElement(const std::string& msg) : PeriodlabError(msg) {}
};

struct UnsupportedConfiguration : PeriodlabError {
  explicit UnsupportedConfiguration(const std::string& msg) : PeriodlabError(msg) {}
};

struct NonInvertible : PeriodlabError {
  explicit NonInvertible(const std::string& msg) : PeriodlabError(msg) {}
};

struct NonMonomialDivision : PeriodlabError {
  explicit NonMonomialDivision(const std::string& msg) : PeriodlabError(msg) {}
};

struct NotUnipotent : PeriodlabError {
  explicit NotUnipotent(const std::string& msg) : PeriodlabError(msg) {}
};

struct OnLattice : PeriodlabError {
  explicit OnLattice(const std::string& msg) : PeriodlabError(msg) {}
};

struct DegenerateLattice : PeriodlabError {
  explicit DegenerateLattice(const std::string& msg) : PeriodlabError(msg) {}
};

struct SingularCurve : PeriodlabError {
  explicit SingularCurve(const std::string& msg) : PeriodlabError(msg) {}
};

struct RecognitionFailed : PeriodlabError {
  explicit RecognitionFailed(const std::string& msg) : PeriodlabError(msg) {}
};

struct UsageError : PeriodlabError {
  explicit UsageError(const std::string& msg) : PeriodlabError(msg) {}
};

}  // namespace periodlab
