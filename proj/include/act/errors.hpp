#pragma once

#include <stdexcept>
#include <string>

namespace act {

struct RankDeficient : std::runtime_error {
  explicit RankDeficient(const std::string& what) : std::runtime_error(what) {}
};

struct NotPositiveDefinite : std::runtime_error {
  explicit NotPositiveDefinite(const std::string& what) : std::runtime_error(what) {}
};

struct NonFinite : std::runtime_error {
  explicit NonFinite(const std::string& what) : std::runtime_error(what) {}
};

struct UnknownSystem : std::runtime_error {
  explicit UnknownSystem(const std::string& what) : std::runtime_error(what) {}
};

struct BadParameter : std::runtime_error {
  explicit BadParameter(const std::string& what) : std::runtime_error(what) {}
};

struct InconsistentInitialState : std::runtime_error {
  explicit InconsistentInitialState(const std::string& what) : std::runtime_error(what) {}
};

struct RecipePreconditionViolated : std::runtime_error {
  explicit RecipePreconditionViolated(const std::string& what) : std::runtime_error(what) {}
};

struct Diverged : std::runtime_error {
  explicit Diverged(const std::string& what) : std::runtime_error(what) {}
};

struct IllConditioned : std::runtime_error {
  explicit IllConditioned(const std::string& what) : std::runtime_error(what) {}
};

struct SingularSurfaceDegenerate : std::runtime_error {
  explicit SingularSurfaceDegenerate(const std::string& what) : std::runtime_error(what) {}
};

struct DegenerateKappa : std::runtime_error {
  explicit DegenerateKappa(const std::string& what) : std::runtime_error(what) {}
};

struct NoConvergence : std::runtime_error {
  explicit NoConvergence(const std::string& what) : std::runtime_error(what) {}
};

struct IntegralDiverged : std::runtime_error {
  explicit IntegralDiverged(const std::string& what) : std::runtime_error(what) {}
};

struct StabilityViolated : std::runtime_error {
  explicit StabilityViolated(const std::string& what) : std::runtime_error(what) {}
};

struct NoPulse : std::runtime_error {
  explicit NoPulse(const std::string& what) : std::runtime_error(what) {}
};

struct NotConverged : std::runtime_error {
  explicit NotConverged(const std::string& what) : std::runtime_error(what) {}
};

struct ZeroCoupling : std::runtime_error {
  explicit ZeroCoupling(const std::string& what) : std::runtime_error(what) {}
};

struct RankDeficientAtNode : std::runtime_error {
  explicit RankDeficientAtNode(const std::string& what) : std::runtime_error(what) {}
};

struct Ambiguous : std::runtime_error {
  explicit Ambiguous(const std::string& what) : std::runtime_error(what) {}
};

struct SyntaxError : std::runtime_error {
  std::size_t offset;
  SyntaxError(const std::string& what, std::size_t off)
      : std::runtime_error(what + " at offset " + std::to_string(off)), offset(off) {}
};

struct UnknownIdentifier : std::runtime_error {
  explicit UnknownIdentifier(const std::string& what) : std::runtime_error(what) {}
};

struct ColumnMismatch : std::runtime_error {
  explicit ColumnMismatch(const std::string& what) : std::runtime_error(what) {}
};

struct ConfigError : std::runtime_error {
  explicit ConfigError(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace act
