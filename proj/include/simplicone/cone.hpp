#pragma once

#include <memory>
#include <optional>

#include <Eigen/LU>

#include "simplicone/types.hpp"

namespace simplicone {

// Componentwise splitting of a vector: x = x^+ - x^-, |x| = x^+ + x^-.
Vector positive_part(const Vector& x);
Vector negative_part(const Vector& x);
Vector abs_part(const Vector& x);
// Entries in {-1, 0, 1}; -0.0 maps to 0.
Vector sign_vector(const Vector& x);

/// Simplicial cone K = A * R^m_+ for a nonsingular generator A.
///
/// Built only through make_cone(), which certifies nonsingularity and caches
/// the Gram matrix G = A^T A, its spectrum, and the two contraction factors
///   gram_norm_dev  = ||G - I||            = max_i |lambda_i - 1|
///   contraction_c  = ||(G+I)^{-1}(G-I)||  = max_i |1 - lambda_i| / (1 + lambda_i)
/// The object is immutable and may be shared between threads.
class SimplicialCone {
 public:
  Index dim() const { return generator_.rows(); }
  const Matrix& generator() const { return generator_; }
  const Matrix& gram() const { return gram_; }
  // Ascending eigenvalues of the Gram matrix.
  const Vector& gram_eigenvalues() const { return gram_eigenvalues_; }
  double gram_norm_dev() const { return gram_norm_dev_; }
  double contraction_c() const { return contraction_c_; }
  double singular_value_ratio() const { return singular_value_ratio_; }

  Vector apply(const Vector& x) const { return generator_ * x; }
  Vector apply_transpose(const Vector& x) const {
    return generator_.transpose() * x;
  }
  // A^{-1} b and (A^T)^{-1} b through the cached LU factorization.
  Vector solve(const Vector& b) const { return lu_.solve(b); }
  Vector solve_transpose(const Vector& b) const {
    return lu_.transpose().solve(b);
  }

 private:
  friend SimplicialCone make_cone(const Matrix& generator, double tol);

  SimplicialCone() = default;

  Matrix generator_;
  Matrix gram_;
  Vector gram_eigenvalues_;
  double gram_norm_dev_ = 0.0;
  double contraction_c_ = 0.0;
  double singular_value_ratio_ = 1.0;
  Eigen::PartialPivLU<Matrix> lu_;
};

inline constexpr double kDefaultSingularTol = 1e-12;

// Throws Error{NonFinite} or Error{SingularMatrix} (sigma_min < tol * sigma_max).
SimplicialCone make_cone(const Matrix& generator,
                         double tol = kDefaultSingularTol);

// Shared-ownership convenience; problems and reports hold cones this way.
std::shared_ptr<const SimplicialCone> make_shared_cone(
    const Matrix& generator, double tol = kDefaultSingularTol);

// -(A^T)^{-1}, the generator of the polar cone.
Matrix polar_generator(const SimplicialCone& cone);

// Spectral norm of C = (G+I)^{-1}(G-I) formed explicitly. O(m^3); used to
// cross-check contraction_c().
double contraction_operator_norm(const SimplicialCone& cone);

struct ProjectionProblem {
  std::shared_ptr<const SimplicialCone> cone;
  Vector target;
  std::optional<Vector> known_solution;
  Vector start;

  Index dim() const { return cone->dim(); }
};

// Validates dimensions; start defaults to the zero vector.
ProjectionProblem make_problem(std::shared_ptr<const SimplicialCone> cone,
                               Vector target,
                               std::optional<Vector> start = std::nullopt,
                               std::optional<Vector> known_solution =
                                   std::nullopt);

// (G - I) x^+ + x - A^T z
Vector residual_nonsmooth(const Vector& x, const ProjectionProblem& prob);
// (G + I) x + (G - I)|x| - 2 A^T z, identically twice the above.
Vector residual_abs(const Vector& x, const ProjectionProblem& prob);

// A u^+
Vector recover_projection(const Vector& u, const SimplicialCone& cone);

struct Certificate {
  Vector projection;   // p = A u^+
  Vector polar_part;   // q = -(A^T)^{-1} u^-
  double complementarity_gap = 0.0;  // <p, q>
  double feasibility_projection = 0.0;  // ||(A^{-1} p)^-||
  double feasibility_polar = 0.0;       // ||(-A^T q)^-||
  double decomposition_residual = 0.0;  // ||z - p - q||

  // Scales used to normalise the residuals in accepted().
  double target_norm = 0.0;
  double projection_coord_norm = 0.0;
  double polar_coord_norm = 0.0;

  // Every residual field, relative to its natural magnitude, is <= tol:
  //   decomposition / (1 + ||z||), feasibilities / (1 + ||coordinates||),
  //   |gap| / (1 + ||p|| ||q||).
  bool accepted(double tol) const;
};

Certificate certify(const Vector& target, const Vector& u,
                    const SimplicialCone& cone);

}  // namespace simplicone
