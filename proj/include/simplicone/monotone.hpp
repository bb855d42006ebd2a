#pragma once

#include <optional>
#include <vector>

#include <boost/multiprecision/cpp_int.hpp>

#include "simplicone/solvers.hpp"
#include "simplicone/types.hpp"

namespace simplicone {

// Monotone nonnegative cone {x : x_1 >= x_2 >= ... >= x_m >= 0}. Its dual is
// generated by the lower-bidiagonal difference matrix A (1 on the diagonal,
// -1 below), whose Gram matrix A^T A is tridiagonal with diagonal
// (2, ..., 2, 1) and off-diagonals -1.

Matrix monotone_generator(Index m);

// lambda_i = 2 + 2 cos(2 i pi / (2m + 1)), i = 1..m (strictly decreasing).
Vector monotone_eigenvalues(Index m);

using BigInt = boost::multiprecision::cpp_int;

// Exact F_0..F_n.
std::vector<BigInt> fibonacci_table(std::size_t n);

/// Precomputed data for projecting onto A R^m_+ in O(m) per iteration.
///
/// A^T A + I = U L with U upper bidiagonal (diagonal d_i, superdiagonal -1)
/// and L unit lower bidiagonal (subdiagonal -1/d_{i+1}), where d_m = 2 and
/// d_i = 3 - 1/d_{i+1}. Immutable after construction.
class MonotoneConeWorkspace {
 public:
  explicit MonotoneConeWorkspace(Index m);

  Index dim() const { return static_cast<Index>(pivots_.size()); }
  const std::vector<double>& pivots() const { return pivots_; }
  double gram_norm_dev() const { return gram_norm_dev_; }
  double contraction_c() const { return contraction_c_; }

  // Solves (A^T A + I) x = rhs.
  Vector tridiag_solve(const Vector& rhs) const;
  // Same, writing into x (resized) to avoid allocation in loops.
  void tridiag_solve_into(const Vector& rhs, Vector& x) const;

  // O(m) products with the structured matrices.
  Vector apply_generator(const Vector& x) const;            // A x
  Vector apply_generator_transpose(const Vector& x) const;  // A^T x
  Vector solve_generator_transpose(const Vector& b) const;  // (A^T)^{-1} b
  Vector apply_gram_minus_identity(const Vector& x) const;  // (A^T A - I) x
  Vector residual_nonsmooth(const Vector& x, const Vector& target) const;

 private:
  std::vector<double> pivots_;
  std::vector<double> inv_pivots_;
  double gram_norm_dev_ = 0.0;
  double contraction_c_ = 0.0;
};

struct FormulaMismatch {
  char matrix = 'R';  // 'R' or 'S'
  Index i = 0;        // 1-based
  Index j = 0;
  double formula = 0.0;
  double direct = 0.0;
};

struct ClosedForm {
  Matrix value;
  // Entries where the closed form disagreed with the direct computation by
  // more than 1e-8 relative; `value` holds the direct entry there.
  std::vector<FormulaMismatch> mismatches;
  // Entries evaluated with the corrected R_mm corner case.
  std::vector<FormulaMismatch> corrections;
};

inline constexpr double kClosedFormRelTol = 1e-8;

// R = (A^T A + I)^{-1}(A^T A - I) from the Fibonacci closed forms, m >= 2.
// The bottom-right corner uses -F_{2m-2}/F_{2m+1}.
ClosedForm fibonacci_R(Index m);
// S = (A^T A + I)^{-1} A^T from the Fibonacci closed forms, m >= 1.
ClosedForm fibonacci_S(Index m);

// Exact reference values, rounded once to double.
Matrix direct_R(Index m);
Matrix direct_S(Index m);

/// Picard 2 on the monotone generator with O(m) work per iteration.
///
/// Each step forms -(A^T A - I)|x_k| + 2 A^T z from the banded products and
/// solves with tridiag_solve(). With `explicit_matrices` the step instead
/// applies the dense closed-form R and S (x_{k+1} = -R|x_k| + 2 S z).
SolveReport picard2_monotone(const MonotoneConeWorkspace& ws,
                             const Vector& target, const Vector& start,
                             const StopRule& stop,
                             const std::optional<Vector>& known_solution =
                                 std::nullopt,
                             const SolveOptions& opts = {},
                             bool explicit_matrices = false);

// Projection onto the monotone nonnegative cone via P_K(z) = z + P_{K*}(-z).
Vector project_monotone_nonneg(const MonotoneConeWorkspace& ws,
                               const Vector& target,
                               const StopRule& stop = {});

}  // namespace simplicone
