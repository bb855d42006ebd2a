#pragma once

#include <cstddef>
#include <iosfwd>

#include "simplicone/cone.hpp"
#include "simplicone/types.hpp"

namespace simplicone {

inline constexpr Index kMaxEnumerationDim = 20;

struct EnumerationResult {
  Vector solution;
  double residual_norm = 0.0;
  // Number of sign patterns whose solution was sign-consistent.
  std::size_t accepted_patterns = 0;
  // Bit i set <=> component i is in the positive set P.
  unsigned long winning_pattern = 0;
};

/// Exact solve of (G - I) x^+ + x = A^T z by trying every sign pattern.
///
/// For each subset P of {1..m}, solves ((G - I) D_P + I) x = A^T z and keeps
/// x when it is consistent with P (x_i >= -eps on P, x_i <= eps off P, with
/// eps = 1e-9 (1 + ||x||_inf)). Among consistent candidates the one with the
/// smallest nonsmooth residual wins; ties go to the lowest pattern index, so
/// the result does not depend on how patterns are split across threads.
///
/// `threads == 0` reads SIMPLICONE_THREADS (default 1).
/// Throws Error{DimensionTooLarge} for m > 20 and Error{NoPatternAccepted}
/// when no pattern is consistent.
EnumerationResult sign_enumeration_solve(const ProjectionProblem& prob,
                                         unsigned threads = 0);

// Nonnegative QP / LCP data: Q = A^T A, b = -A^T z, c = z^T z / 2.
struct LcpInstance {
  Matrix q_matrix;
  Vector q_vector;
  double offset = 0.0;
};

LcpInstance lcp_export(const ProjectionProblem& prob);

// y = Q x + b; x >= -tol, y >= -tol, |x^T y| <= tol (1 + ||x|| ||y||).
bool lcp_check(const LcpInstance& inst, const Vector& x, double tol);

// 1/2 ||z - A x||^2
double qp_objective(const ProjectionProblem& prob, const Vector& x);

// "m", Q rows, b (one per line), c.
void write_lcp(std::ostream& out, const LcpInstance& inst);

}  // namespace simplicone
