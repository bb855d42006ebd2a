#pragma once

#include <functional>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

#include "simplicone/cone.hpp"
#include "simplicone/types.hpp"

namespace simplicone {

enum class StopMode { KnownSolution, Residual, PosterioriBound };

// KnownSolution: ||u - x_k|| < rel_tol ||u||           (benchmark protocol)
// Residual:      ||r(x_k)|| <= rel_tol (1 + ||A^T z||)
// PosterioriBound: alpha/(1-alpha) ||x_k - x_{k-1}|| <= rel_tol ||x_k||
//   (falls back to the residual test when alpha >= 1)
struct StopRule {
  StopMode mode = StopMode::Residual;
  double rel_tol = 1e-10;
  int max_iters = 100000;
};

enum class SolverKind { Picard1, Picard2, SsNewton, Oracle };
enum class SolveStatus { Converged, MaxIters, NotApplicable };

std::string_view to_string(SolverKind kind);
std::string_view to_string(SolveStatus status);
std::string_view to_string(StopMode mode);
std::optional<SolverKind> parse_solver(std::string_view name);
std::optional<StopMode> parse_stop_mode(std::string_view name);
std::optional<SolveStatus> parse_status(std::string_view name);

struct SolveOptions {
  // Iterate even when the convergence hypothesis of the method fails.
  bool override_guards = false;
  // Record the a-posteriori bound at every iteration.
  bool record_bounds = false;
  // Observer called with (k, x_k) after every iteration.
  std::function<void(int, const Vector&)> on_iterate;
};

struct SolveReport {
  SolverKind solver = SolverKind::Picard2;
  SolveStatus status = SolveStatus::MaxIters;
  Vector solution;
  Vector projection;
  int iterations = 0;
  double final_residual_norm = 0.0;
  double contraction_factor = 0.0;
  // ||u - x_k|| for k = 0..iterations; filled in KnownSolution mode.
  std::vector<double> per_iter_errors;
  // alpha/(1-alpha) ||x_k - x_{k-1}|| for k = 1..iterations when requested.
  std::vector<double> per_iter_bounds;
  bool diverged = false;
  // Newton only: the active pattern repeated without the stop rule firing.
  bool stalled = false;
  std::string message;
};

inline constexpr double kNewtonGuard = 1.0 / 3.0;
inline constexpr double kDivergenceLimit = 1e30;

// x_{k+1} = -(G - I) x_k^+ + A^T z; requires ||G - I|| < 1.
SolveReport picard1_solve(const ProjectionProblem& prob, const StopRule& stop,
                          const SolveOptions& opts = {});

// (G + I) x_{k+1} = -(G - I)|x_k| + 2 A^T z; any nonsingular A.
SolveReport picard2_solve(const ProjectionProblem& prob, const StopRule& stop,
                          const SolveOptions& opts = {});

// ((G - I) diag(sgn(x_k^+)) + I) x_{k+1} = A^T z; requires ||G - I|| < 1/3.
SolveReport ssnewton_solve(const ProjectionProblem& prob, const StopRule& stop,
                           const SolveOptions& opts = {});

// Exhaustive sign enumeration packaged as a report (m <= 20).
SolveReport oracle_solve(const ProjectionProblem& prob);

SolveReport solve(SolverKind kind, const ProjectionProblem& prob,
                  const StopRule& stop, const SolveOptions& opts = {});

// alpha/(1 - alpha) ||x_k - x_prev||. Throws Error{InvalidAlpha} unless
// 0 <= alpha < 1.
double posteriori_bound(const Vector& x_k, const Vector& x_prev, double alpha);

// P_K(z) computed as z + P_{K*}(-z), with K* generated by (A^T)^{-1}.
Vector dual_projection(const Vector& target, const SimplicialCone& cone,
                       SolverKind kind, const StopRule& stop = {},
                       const SolveOptions& opts = {});

std::string to_key_value(const SolveReport& report);
nlohmann::json to_json(const SolveReport& report);

}  // namespace simplicone
