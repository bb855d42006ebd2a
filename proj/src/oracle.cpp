#include "simplicone/oracle.hpp"

#include <cmath>
#include <limits>
#include <ostream>
#include <string>
#include <vector>

#include <Eigen/LU>

#include "simplicone/error.hpp"
#include "simplicone/io.hpp"
#include "simplicone/parallel.hpp"

namespace simplicone {

namespace {

struct Candidate {
  double residual = std::numeric_limits<double>::infinity();
  unsigned long pattern = 0;
  std::size_t accepted = 0;
  Vector x;
};

// Strict-weak "better": smaller residual, then lower pattern index.
bool better(const Candidate& a, const Candidate& b) {
  if (a.residual != b.residual) return a.residual < b.residual;
  return a.pattern < b.pattern;
}

}  // namespace

EnumerationResult sign_enumeration_solve(const ProjectionProblem& prob,
                                         unsigned threads) {
  const SimplicialCone& cone = *prob.cone;
  const Index m = cone.dim();
  if (m > kMaxEnumerationDim) {
    throw Error(ErrorCode::DimensionTooLarge,
                "sign enumeration supports m <= 20, got m = " +
                    std::to_string(m));
  }
  if (threads == 0) threads = worker_threads();

  const unsigned long patterns = 1UL << m;
  const Vector atz = cone.apply_transpose(prob.target);
  // Chunk count is fixed so the reduction order never depends on `threads`.
  const std::size_t chunks = std::min<unsigned long>(patterns, 256);
  const unsigned long per_chunk = (patterns + chunks - 1) / chunks;
  std::vector<Candidate> best(chunks);

  parallel_for(chunks, threads, [&](std::size_t c) {
    Matrix jac(m, m);
    Eigen::PartialPivLU<Matrix> lu;
    Candidate& local = best[c];
    const unsigned long lo = c * per_chunk;
    const unsigned long hi = std::min(patterns, lo + per_chunk);
    for (unsigned long p = lo; p < hi; ++p) {
      jac.setIdentity();
      for (Index j = 0; j < m; ++j) {
        if (p & (1UL << j)) jac.col(j) = cone.gram().col(j);
      }
      lu.compute(jac);
      const Vector x = lu.solve(atz);
      if (!x.allFinite()) continue;
      const double eps = 1e-9 * (1.0 + x.cwiseAbs().maxCoeff());
      bool consistent = true;
      for (Index j = 0; j < m && consistent; ++j) {
        consistent = (p & (1UL << j)) ? x(j) >= -eps : x(j) <= eps;
      }
      if (!consistent) continue;
      ++local.accepted;
      Candidate cand;
      cand.residual = residual_nonsmooth(x, prob).norm();
      cand.pattern = p;
      if (local.x.size() == 0 || better(cand, local)) {
        local.residual = cand.residual;
        local.pattern = cand.pattern;
        local.x = x;
      }
    }
  });

  EnumerationResult result;
  const Candidate* winner = nullptr;
  for (const Candidate& c : best) {
    result.accepted_patterns += c.accepted;
    if (c.x.size() == 0) continue;
    if (winner == nullptr || better(c, *winner)) winner = &c;
  }
  if (winner == nullptr) {
    throw Error(ErrorCode::NoPatternAccepted,
                "no sign pattern produced a consistent solution (m = " +
                    std::to_string(m) + ", ||A^T z|| = " +
                    format_double(atz.norm()) + ")");
  }
  result.solution = winner->x;
  result.residual_norm = winner->residual;
  result.winning_pattern = winner->pattern;
  return result;
}

LcpInstance lcp_export(const ProjectionProblem& prob) {
  const SimplicialCone& cone = *prob.cone;
  LcpInstance inst;
  inst.q_matrix = cone.gram();
  inst.q_vector = -cone.apply_transpose(prob.target);
  inst.offset = 0.5 * prob.target.squaredNorm();
  return inst;
}

bool lcp_check(const LcpInstance& inst, const Vector& x, double tol) {
  if (x.size() != inst.q_vector.size()) {
    throw Error(ErrorCode::DimensionMismatch,
                "lcp_check: x length does not match instance");
  }
  const Vector y = inst.q_matrix * x + inst.q_vector;
  return x.minCoeff() >= -tol && y.minCoeff() >= -tol &&
         std::abs(x.dot(y)) <= tol * (1.0 + x.norm() * y.norm());
}

double qp_objective(const ProjectionProblem& prob, const Vector& x) {
  return 0.5 * (prob.target - prob.cone->apply(x)).squaredNorm();
}

void write_lcp(std::ostream& out, const LcpInstance& inst) {
  write_matrix(out, inst.q_matrix);
  for (Index i = 0; i < inst.q_vector.size(); ++i) {
    out << format_double(inst.q_vector(i)) << '\n';
  }
  out << format_double(inst.offset) << '\n';
}

}  // namespace simplicone
