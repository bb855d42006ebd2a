#include "simplicone/cone.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include <Eigen/Cholesky>
#include <Eigen/Eigenvalues>
#include <Eigen/SVD>

#include "simplicone/error.hpp"

namespace simplicone {

Vector positive_part(const Vector& x) { return x.cwiseMax(0.0); }

Vector negative_part(const Vector& x) { return (-x).cwiseMax(0.0); }

Vector abs_part(const Vector& x) { return x.cwiseAbs(); }

Vector sign_vector(const Vector& x) {
  return x.unaryExpr([](double v) {
    if (v > 0.0) return 1.0;
    if (v < 0.0) return -1.0;
    return 0.0;
  });
}

SimplicialCone make_cone(const Matrix& generator, double tol) {
  if (generator.rows() != generator.cols() || generator.rows() == 0) {
    throw Error(ErrorCode::DimensionMismatch,
                "generator must be a non-empty square matrix");
  }
  if (!generator.allFinite()) {
    throw Error(ErrorCode::NonFinite, "generator contains non-finite entries");
  }

  Eigen::BDCSVD<Matrix> svd(generator);
  const Vector& sv = svd.singularValues();
  const double smax = sv(0);
  const double smin = sv(sv.size() - 1);
  if (!(smax > 0.0) || smin < tol * smax) {
    throw Error(ErrorCode::SingularMatrix,
                "singular matrix: sigma_min/sigma_max = " +
                    std::to_string(smax > 0.0 ? smin / smax : 0.0));
  }

  SimplicialCone cone;
  cone.generator_ = generator;
  cone.gram_ = generator.transpose() * generator;
  // Enforce exact symmetry so the eigensolver and LLT see the same matrix.
  cone.gram_ = 0.5 * (cone.gram_ + cone.gram_.transpose()).eval();

  Eigen::SelfAdjointEigenSolver<Matrix> eig(cone.gram_,
                                            Eigen::EigenvaluesOnly);
  if (eig.info() != Eigen::Success) {
    throw Error(ErrorCode::FactorizationFailure,
                "symmetric eigensolve of the Gram matrix failed");
  }
  cone.gram_eigenvalues_ = eig.eigenvalues();
  double dev = 0.0;
  double c = 0.0;
  for (double lambda : cone.gram_eigenvalues_) {
    dev = std::max(dev, std::abs(lambda - 1.0));
    c = std::max(c, std::abs(1.0 - lambda) / (1.0 + lambda));
  }
  cone.gram_norm_dev_ = dev;
  cone.contraction_c_ = c;
  cone.singular_value_ratio_ = smin / smax;
  cone.lu_.compute(generator);
  return cone;
}

std::shared_ptr<const SimplicialCone> make_shared_cone(const Matrix& generator,
                                                       double tol) {
  return std::make_shared<const SimplicialCone>(make_cone(generator, tol));
}

Matrix polar_generator(const SimplicialCone& cone) {
  const Index m = cone.dim();
  Matrix inv_t(m, m);
  for (Index j = 0; j < m; ++j) {
    inv_t.col(j) = cone.solve_transpose(Vector::Unit(m, j));
  }
  return -inv_t;
}

double contraction_operator_norm(const SimplicialCone& cone) {
  const Index m = cone.dim();
  const Matrix identity = Matrix::Identity(m, m);
  const Matrix c = (cone.gram() + identity).llt().solve(cone.gram() - identity);
  Eigen::BDCSVD<Matrix> svd(c);
  return svd.singularValues()(0);
}

ProjectionProblem make_problem(std::shared_ptr<const SimplicialCone> cone,
                               Vector target, std::optional<Vector> start,
                               std::optional<Vector> known_solution) {
  if (!cone) {
    throw Error(ErrorCode::InvalidArgument, "problem requires a cone");
  }
  const Index m = cone->dim();
  auto check = [m](const Vector& v, const char* name) {
    if (v.size() != m) {
      throw Error(ErrorCode::DimensionMismatch,
                  std::string(name) + " has length " +
                      std::to_string(v.size()) + ", expected " +
                      std::to_string(m));
    }
  };
  check(target, "target");
  if (start) check(*start, "start");
  if (known_solution) check(*known_solution, "known solution");

  ProjectionProblem prob;
  prob.cone = std::move(cone);
  prob.target = std::move(target);
  prob.start = start ? std::move(*start) : Vector::Zero(m);
  prob.known_solution = std::move(known_solution);
  return prob;
}

Vector residual_nonsmooth(const Vector& x, const ProjectionProblem& prob) {
  const SimplicialCone& cone = *prob.cone;
  const Vector xp = positive_part(x);
  return cone.gram() * xp - xp + x - cone.apply_transpose(prob.target);
}

Vector residual_abs(const Vector& x, const ProjectionProblem& prob) {
  const SimplicialCone& cone = *prob.cone;
  const Vector ax = abs_part(x);
  return cone.gram() * (x + ax) + x - ax -
         2.0 * cone.apply_transpose(prob.target);
}

Vector recover_projection(const Vector& u, const SimplicialCone& cone) {
  return cone.apply(positive_part(u));
}

bool Certificate::accepted(double tol) const {
  const double gap_scale =
      1.0 + projection.norm() * polar_part.norm();
  return decomposition_residual <= tol * (1.0 + target_norm) &&
         feasibility_projection <= tol * (1.0 + projection_coord_norm) &&
         feasibility_polar <= tol * (1.0 + polar_coord_norm) &&
         std::abs(complementarity_gap) <= tol * gap_scale;
}

Certificate certify(const Vector& target, const Vector& u,
                    const SimplicialCone& cone) {
  if (target.size() != cone.dim() || u.size() != cone.dim()) {
    throw Error(ErrorCode::DimensionMismatch,
                "certify: vector length does not match cone dimension");
  }
  Certificate cert;
  cert.projection = cone.apply(positive_part(u));
  cert.polar_part = -cone.solve_transpose(negative_part(u));
  cert.complementarity_gap = cert.projection.dot(cert.polar_part);

  // Coordinates are recomputed from p and q, not read back from u.
  const Vector p_coords = cone.solve(cert.projection);
  const Vector q_coords = -cone.apply_transpose(cert.polar_part);
  cert.feasibility_projection = negative_part(p_coords).norm();
  cert.feasibility_polar = negative_part(q_coords).norm();
  cert.decomposition_residual =
      (target - cert.projection - cert.polar_part).norm();

  cert.target_norm = target.norm();
  cert.projection_coord_norm = p_coords.norm();
  cert.polar_coord_norm = q_coords.norm();
  return cert;
}

}  // namespace simplicone
