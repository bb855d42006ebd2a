#include "simplicone/solvers.hpp"

#include <cmath>
#include <limits>
#include <sstream>
#include <utility>

#include <Eigen/Cholesky>
#include <Eigen/LU>

#include "simplicone/error.hpp"
#include "simplicone/io.hpp"
#include "simplicone/oracle.hpp"
#include "iteration.hpp"

namespace simplicone {

std::string_view to_string(SolverKind kind) {
  switch (kind) {
    case SolverKind::Picard1: return "picard1";
    case SolverKind::Picard2: return "picard2";
    case SolverKind::SsNewton: return "ssnewton";
    case SolverKind::Oracle: return "oracle";
  }
  return "unknown";
}

std::string_view to_string(SolveStatus status) {
  switch (status) {
    case SolveStatus::Converged: return "converged";
    case SolveStatus::MaxIters: return "max_iters";
    case SolveStatus::NotApplicable: return "not_applicable";
  }
  return "unknown";
}

std::string_view to_string(StopMode mode) {
  switch (mode) {
    case StopMode::KnownSolution: return "known";
    case StopMode::Residual: return "residual";
    case StopMode::PosterioriBound: return "posteriori";
  }
  return "unknown";
}

std::optional<SolverKind> parse_solver(std::string_view name) {
  for (auto k : {SolverKind::Picard1, SolverKind::Picard2, SolverKind::SsNewton,
                 SolverKind::Oracle}) {
    if (to_string(k) == name) return k;
  }
  return std::nullopt;
}

std::optional<StopMode> parse_stop_mode(std::string_view name) {
  for (auto m : {StopMode::KnownSolution, StopMode::Residual,
                 StopMode::PosterioriBound}) {
    if (to_string(m) == name) return m;
  }
  return std::nullopt;
}

std::optional<SolveStatus> parse_status(std::string_view name) {
  for (auto s : {SolveStatus::Converged, SolveStatus::MaxIters,
                 SolveStatus::NotApplicable}) {
    if (to_string(s) == name) return s;
  }
  return std::nullopt;
}

double posteriori_bound(const Vector& x_k, const Vector& x_prev, double alpha) {
  if (!(alpha >= 0.0 && alpha < 1.0)) {
    throw Error(ErrorCode::InvalidAlpha,
                "a-posteriori bound needs 0 <= alpha < 1");
  }
  return alpha / (1.0 - alpha) * (x_k - x_prev).norm();
}

namespace {

auto dense_residual(const ProjectionProblem& prob) {
  return [&prob](const Vector& x) { return residual_nonsmooth(x, prob).norm(); };
}

using DenseDriver =
    detail::IterationDriver<decltype(dense_residual(std::declval<
                                                    const ProjectionProblem&>()))>;

DenseDriver make_driver(const ProjectionProblem& prob, const StopRule& stop,
                        const SolveOptions& opts, SolverKind kind,
                        double alpha) {
  const double rhs_scale =
      1.0 + prob.cone->apply_transpose(prob.target).norm();
  const Vector* known =
      prob.known_solution ? &*prob.known_solution : nullptr;
  return DenseDriver(stop, opts, kind, alpha, known, rhs_scale,
                     dense_residual(prob));
}

SolveReport with_projection(SolveReport report, const SimplicialCone& cone) {
  if (report.status != SolveStatus::NotApplicable) {
    report.projection = recover_projection(report.solution, cone);
  }
  return report;
}

}  // namespace

SolveReport picard1_solve(const ProjectionProblem& prob, const StopRule& stop,
                          const SolveOptions& opts) {
  const SimplicialCone& cone = *prob.cone;
  auto driver = make_driver(prob, stop, opts, SolverKind::Picard1, cone.gram_norm_dev());
  if (!(cone.gram_norm_dev() < 1.0) && !opts.override_guards) {
    return driver.not_applicable("picard1 requires ||A^T A - I|| < 1 (got " +
                                 format_double(cone.gram_norm_dev()) + ")");
  }
  const Vector atz = cone.apply_transpose(prob.target);
  Vector xp(cone.dim());
  return with_projection(driver.run(prob.start, [&](const Vector& x, Vector& next) {
    xp = positive_part(x);
    next.noalias() = atz + xp;
    next.noalias() -= cone.gram() * xp;
    return false;
  }), cone);
}

SolveReport picard2_solve(const ProjectionProblem& prob, const StopRule& stop,
                          const SolveOptions& opts) {
  const SimplicialCone& cone = *prob.cone;
  const Index m = cone.dim();
  auto driver = make_driver(prob, stop, opts, SolverKind::Picard2, cone.contraction_c());
  const Matrix shifted = cone.gram() + Matrix::Identity(m, m);
  Eigen::LLT<Matrix> llt(shifted);
  if (llt.info() != Eigen::Success) {
    throw Error(ErrorCode::FactorizationFailure,
                "A^T A + I is not numerically positive definite");
  }
  const Vector atz2 = 2.0 * cone.apply_transpose(prob.target);
  Vector ax(m);
  Vector rhs(m);
  return with_projection(driver.run(prob.start, [&](const Vector& x, Vector& next) {
    ax = abs_part(x);
    rhs.noalias() = atz2 + ax;
    rhs.noalias() -= cone.gram() * ax;
    next = llt.solve(rhs);
    return false;
  }), cone);
}

SolveReport ssnewton_solve(const ProjectionProblem& prob, const StopRule& stop,
                           const SolveOptions& opts) {
  const SimplicialCone& cone = *prob.cone;
  const Index m = cone.dim();
  auto driver = make_driver(prob, stop, opts, SolverKind::SsNewton, cone.gram_norm_dev());
  if (!(cone.gram_norm_dev() < kNewtonGuard) && !opts.override_guards) {
    return driver.not_applicable(
        "ssnewton requires ||A^T A - I|| < 1/3 (got " +
        format_double(cone.gram_norm_dev()) + ")");
  }
  const Vector atz = cone.apply_transpose(prob.target);
  Matrix jac(m, m);
  Eigen::PartialPivLU<Matrix> lu;
  int iteration = 0;
  return with_projection(driver.run(prob.start, [&](const Vector& x, Vector& next) {
    ++iteration;
    // Column j of (G - I) D + I is G e_j when x_j > 0, else e_j.
    jac.setIdentity();
    for (Index j = 0; j < m; ++j) {
      if (x(j) > 0.0) jac.col(j) = cone.gram().col(j);
    }
    lu.compute(jac);
    if (!(lu.rcond() > 64 * std::numeric_limits<double>::epsilon())) {
      throw Error(ErrorCode::LinearSolveFailure,
                  "Newton system is numerically singular at iteration " +
                      std::to_string(iteration));
    }
    next = lu.solve(atz);
    for (Index j = 0; j < m; ++j) {
      if ((next(j) > 0.0) != (x(j) > 0.0)) return false;
    }
    return true;
  }), cone);
}

SolveReport oracle_solve(const ProjectionProblem& prob) {
  const EnumerationResult res = sign_enumeration_solve(prob);
  SolveReport report;
  report.solver = SolverKind::Oracle;
  report.status = SolveStatus::Converged;
  report.iterations = 0;
  report.final_residual_norm = res.residual_norm;
  report.projection = recover_projection(res.solution, *prob.cone);
  report.solution = res.solution;
  return report;
}

SolveReport solve(SolverKind kind, const ProjectionProblem& prob,
                  const StopRule& stop, const SolveOptions& opts) {
  switch (kind) {
    case SolverKind::Picard1: return picard1_solve(prob, stop, opts);
    case SolverKind::Picard2: return picard2_solve(prob, stop, opts);
    case SolverKind::SsNewton: return ssnewton_solve(prob, stop, opts);
    case SolverKind::Oracle: return oracle_solve(prob);
  }
  throw Error(ErrorCode::InvalidArgument, "unknown solver");
}

Vector dual_projection(const Vector& target, const SimplicialCone& cone,
                       SolverKind kind, const StopRule& stop,
                       const SolveOptions& opts) {
  const Index m = cone.dim();
  if (target.size() != m) {
    throw Error(ErrorCode::DimensionMismatch,
                "dual_projection: target length does not match cone");
  }
  // K* = (A^T)^{-1} R^m_+ = -polar(K).
  auto dual = make_shared_cone(-polar_generator(cone), 0.0);
  const ProjectionProblem prob = make_problem(dual, -target);
  StopRule rule = stop;
  if (rule.mode == StopMode::KnownSolution) rule.mode = StopMode::Residual;
  const SolveReport rep = solve(kind, prob, rule, opts);
  if (rep.status != SolveStatus::Converged) {
    throw Error(ErrorCode::InvalidArgument,
                "dual_projection: solver " + std::string(to_string(kind)) +
                    " ended with status " + std::string(to_string(rep.status)));
  }
  return target + rep.projection;
}

std::string to_key_value(const SolveReport& report) {
  std::ostringstream out;
  out << "solver=" << to_string(report.solver) << '\n'
      << "status=" << to_string(report.status) << '\n'
      << "iterations=" << report.iterations << '\n'
      << "final_residual_norm=" << format_double(report.final_residual_norm)
      << '\n'
      << "contraction_factor=" << format_double(report.contraction_factor)
      << '\n'
      << "diverged=" << (report.diverged ? "true" : "false") << '\n'
      << "solution=" << join_vector(report.solution) << '\n'
      << "projection=" << join_vector(report.projection) << '\n';
  if (!report.message.empty()) out << "message=" << report.message << '\n';
  return out.str();
}

nlohmann::json to_json(const SolveReport& report) {
  auto vec = [](const Vector& v) {
    return std::vector<double>(v.data(), v.data() + v.size());
  };
  nlohmann::json j;
  j["solver"] = to_string(report.solver);
  j["status"] = to_string(report.status);
  j["iterations"] = report.iterations;
  j["final_residual_norm"] = report.final_residual_norm;
  j["contraction_factor"] = report.contraction_factor;
  j["solution"] = vec(report.solution);
  j["projection"] = vec(report.projection);
  j["diverged"] = report.diverged;
  if (!report.message.empty()) j["message"] = report.message;
  return j;
}

}  // namespace simplicone
