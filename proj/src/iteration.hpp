#pragma once

// Fixed-point driver shared by the dense solvers and the O(m) monotone path.

#include <limits>
#include <string>
#include <utility>

#include "simplicone/error.hpp"
#include "simplicone/solvers.hpp"

namespace simplicone::detail {

// `Residual` maps an iterate to ||(G - I) x^+ + x - A^T z||.
template <typename Residual>
class IterationDriver {
 public:
  IterationDriver(const StopRule& stop, const SolveOptions& opts,
                  SolverKind kind, double alpha, const Vector* known_solution,
                  double rhs_scale, Residual residual)
      : stop_(stop),
        opts_(opts),
        alpha_(alpha),
        known_(known_solution),
        rhs_scale_(rhs_scale),
        residual_(std::move(residual)) {
    report_.solver = kind;
    report_.contraction_factor = alpha;
    if (!(stop.rel_tol > 0.0) || stop.max_iters <= 0) {
      throw Error(ErrorCode::InvalidArgument,
                  "stop rule needs rel_tol > 0 and max_iters > 0");
    }
    if (stop.mode == StopMode::KnownSolution) {
      if (known_ == nullptr) {
        throw Error(ErrorCode::InvalidArgument,
                    "KnownSolution stopping requires a known solution");
      }
      known_norm_ = known_->norm();
    }
  }

  // `step(x_k, x_next)` writes x_{k+1}; returns true when the map has become
  // stationary (Newton finite termination).
  template <typename Step>
  SolveReport run(Vector x, Step&& step) {
    Vector next(x.size());
    if (stop_.mode == StopMode::KnownSolution) {
      report_.per_iter_errors.push_back((*known_ - x).norm());
    }
    int k = 0;
    bool converged = false;
    while (k < stop_.max_iters) {
      const bool stationary = step(x, next);
      ++k;
      if (opts_.on_iterate) opts_.on_iterate(k, next);
      if (!next.allFinite() || next.norm() > kDivergenceLimit) {
        report_.diverged = true;
        report_.message = "iterates exceeded divergence limit";
        x.swap(next);
        break;
      }
      converged = should_stop(next, x);
      x.swap(next);
      if (converged) break;
      if (stationary) {
        report_.stalled = true;
        report_.message = "active pattern repeated before the stop rule fired";
        break;
      }
    }
    report_.iterations = k;
    report_.status = converged ? SolveStatus::Converged : SolveStatus::MaxIters;
    report_.final_residual_norm = residual_(x);
    report_.solution = std::move(x);
    return std::move(report_);
  }

  SolveReport not_applicable(std::string why) {
    report_.status = SolveStatus::NotApplicable;
    report_.message = std::move(why);
    return std::move(report_);
  }

 private:
  bool should_stop(const Vector& x, const Vector& prev) {
    const bool bound_usable = alpha_ < 1.0;
    double bound = std::numeric_limits<double>::infinity();
    if (bound_usable &&
        (opts_.record_bounds || stop_.mode == StopMode::PosterioriBound)) {
      bound = alpha_ / (1.0 - alpha_) * (x - prev).norm();
      if (opts_.record_bounds) report_.per_iter_bounds.push_back(bound);
    }
    switch (stop_.mode) {
      case StopMode::KnownSolution: {
        const double err = (*known_ - x).norm();
        report_.per_iter_errors.push_back(err);
        return known_norm_ > 0.0 ? err < stop_.rel_tol * known_norm_
                                 : err < stop_.rel_tol;
      }
      case StopMode::Residual:
        return residual_(x) <= stop_.rel_tol * rhs_scale_;
      case StopMode::PosterioriBound:
        if (!bound_usable) return residual_(x) <= stop_.rel_tol * rhs_scale_;
        return bound <= stop_.rel_tol * x.norm();
    }
    return false;
  }

  const StopRule& stop_;
  const SolveOptions& opts_;
  double alpha_;
  const Vector* known_;
  double known_norm_ = 0.0;
  double rhs_scale_;
  Residual residual_;
  SolveReport report_;
};

}  // namespace simplicone::detail
