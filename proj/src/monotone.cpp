#include "simplicone/monotone.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

#include <boost/multiprecision/cpp_int.hpp>

#include "iteration.hpp"
#include "simplicone/error.hpp"

namespace simplicone {

namespace mp = boost::multiprecision;
using Rational = mp::cpp_rational;

Matrix monotone_generator(Index m) {
  if (m < 1) throw Error(ErrorCode::InvalidArgument, "m must be >= 1");
  Matrix a = Matrix::Identity(m, m);
  for (Index i = 0; i + 1 < m; ++i) a(i + 1, i) = -1.0;
  return a;
}

Vector monotone_eigenvalues(Index m) {
  if (m < 1) throw Error(ErrorCode::InvalidArgument, "m must be >= 1");
  Vector lambda(m);
  const double denom = 2.0 * static_cast<double>(m) + 1.0;
  for (Index i = 1; i <= m; ++i) {
    lambda(i - 1) =
        2.0 + 2.0 * std::cos(2.0 * static_cast<double>(i) * std::numbers::pi /
                             denom);
  }
  return lambda;
}

std::vector<BigInt> fibonacci_table(std::size_t n) {
  std::vector<BigInt> fib(n + 1);
  fib[0] = 0;
  if (n >= 1) fib[1] = 1;
  for (std::size_t i = 2; i <= n; ++i) fib[i] = fib[i - 1] + fib[i - 2];
  return fib;
}

MonotoneConeWorkspace::MonotoneConeWorkspace(Index m) {
  if (m < 1) throw Error(ErrorCode::InvalidArgument, "m must be >= 1");
  pivots_.resize(static_cast<std::size_t>(m));
  pivots_.back() = 2.0;
  for (Index i = m - 2; i >= 0; --i) {
    pivots_[i] = 3.0 - 1.0 / pivots_[i + 1];
  }
  inv_pivots_.reserve(pivots_.size());
  for (double d : pivots_) inv_pivots_.push_back(1.0 / d);
  const Vector lambda = monotone_eigenvalues(m);
  for (double l : lambda) {
    gram_norm_dev_ = std::max(gram_norm_dev_, std::abs(l - 1.0));
    contraction_c_ = std::max(contraction_c_, std::abs(1.0 - l) / (1.0 + l));
  }
}

Vector MonotoneConeWorkspace::tridiag_solve(const Vector& rhs) const {
  Vector x;
  tridiag_solve_into(rhs, x);
  return x;
}

void MonotoneConeWorkspace::tridiag_solve_into(const Vector& rhs,
                                               Vector& x) const {
  const Index m = dim();
  if (rhs.size() != m) {
    throw Error(ErrorCode::DimensionMismatch, "tridiag_solve: size mismatch");
  }
  x.resize(m);
  // U y = rhs, bottom-up.
  x(m - 1) = rhs(m - 1) * inv_pivots_[m - 1];
  for (Index i = m - 2; i >= 0; --i) {
    x(i) = (rhs(i) + x(i + 1)) * inv_pivots_[i];
  }
  // L x = y, top-down, in place.
  for (Index i = 1; i < m; ++i) x(i) += x(i - 1) * inv_pivots_[i];
}

Vector MonotoneConeWorkspace::apply_generator(const Vector& x) const {
  const Index m = dim();
  Vector y(m);
  y(0) = x(0);
  for (Index i = 1; i < m; ++i) y(i) = x(i) - x(i - 1);
  return y;
}

Vector MonotoneConeWorkspace::apply_generator_transpose(const Vector& x) const {
  const Index m = dim();
  Vector y(m);
  for (Index i = 0; i + 1 < m; ++i) y(i) = x(i) - x(i + 1);
  y(m - 1) = x(m - 1);
  return y;
}

Vector MonotoneConeWorkspace::solve_generator_transpose(const Vector& b) const {
  // A^T is upper bidiagonal with unit diagonal: suffix sums.
  const Index m = dim();
  Vector y(m);
  double acc = 0.0;
  for (Index i = m - 1; i >= 0; --i) {
    acc += b(i);
    y(i) = acc;
  }
  return y;
}

Vector MonotoneConeWorkspace::apply_gram_minus_identity(const Vector& x) const {
  const Index m = dim();
  Vector y(m);
  for (Index i = 0; i < m; ++i) {
    double v = (i + 1 < m) ? x(i) : 0.0;
    if (i > 0) v -= x(i - 1);
    if (i + 1 < m) v -= x(i + 1);
    y(i) = v;
  }
  return y;
}

Vector MonotoneConeWorkspace::residual_nonsmooth(const Vector& x,
                                                 const Vector& target) const {
  return apply_gram_minus_identity(x.cwiseMax(0.0)) + x -
         apply_generator_transpose(target);
}

namespace {

// Scales to a ~62-bit integer quotient before converting, so huge
// Fibonacci numerators and denominators never overflow a double.
double to_double(const Rational& r) {
  BigInt num = mp::numerator(r);
  const BigInt den = mp::denominator(r);
  if (num == 0) return 0.0;
  const bool negative = num < 0;
  if (negative) num = -num;
  const long shift = static_cast<long>(mp::msb(num)) -
                     static_cast<long>(mp::msb(den)) - 62;
  const BigInt q = shift < 0 ? BigInt(num << static_cast<unsigned>(-shift)) / den
                             : num / BigInt(den << static_cast<unsigned>(shift));
  const double v = std::ldexp(q.convert_to<double>(), static_cast<int>(shift));
  return negative ? -v : v;
}

double ratio(const BigInt& num, const BigInt& den) {
  return to_double(Rational(num, den));
}

// Exact inverse of A^T A + I (diagonal 3,...,3,2; off-diagonals -1) by
// Gaussian elimination in rationals.
std::vector<std::vector<Rational>> exact_shifted_gram_inverse(Index m) {
  const auto n = static_cast<std::size_t>(m);
  std::vector<Rational> diag(n, Rational(3));
  diag[n - 1] = 2;
  // Forward elimination of the subdiagonal: modified diagonal piv and
  // multipliers mult[i] = -1 / piv[i-1].
  std::vector<Rational> piv(n);
  std::vector<Rational> mult(n);
  piv[0] = diag[0];
  for (std::size_t i = 1; i < n; ++i) {
    mult[i] = Rational(-1) / piv[i - 1];
    piv[i] = diag[i] - mult[i] * Rational(-1);
  }
  std::vector<std::vector<Rational>> inv(n, std::vector<Rational>(n));
  std::vector<Rational> y(n);
  for (std::size_t col = 0; col < n; ++col) {
    for (std::size_t i = 0; i < n; ++i) {
      y[i] = (i == col) ? Rational(1) : Rational(0);
      if (i > 0) y[i] -= mult[i] * y[i - 1];
    }
    Rational next = 0;
    for (std::size_t k = n; k-- > 0;) {
      const Rational xi = (y[k] + (k + 1 < n ? next : Rational(0))) / piv[k];
      inv[k][col] = xi;
      next = xi;
    }
  }
  return inv;
}

bool disagrees(double formula, double direct) {
  const double scale = std::abs(direct);
  const double diff = std::abs(formula - direct);
  return scale > 0.0 ? diff > kClosedFormRelTol * scale
                     : diff > kClosedFormRelTol;
}

}  // namespace

Matrix direct_R(Index m) {
  const auto inv = exact_shifted_gram_inverse(m);
  Matrix r(m, m);
  for (Index i = 0; i < m; ++i) {
    for (Index j = 0; j < m; ++j) {
      Rational v = Rational(-2) * inv[i][j];
      if (i == j) v += 1;
      r(i, j) = to_double(v);
    }
  }
  return r;
}

Matrix direct_S(Index m) {
  const auto inv = exact_shifted_gram_inverse(m);
  // A^T has 1 on the diagonal and -1 on the superdiagonal.
  Matrix s(m, m);
  for (Index i = 0; i < m; ++i) {
    for (Index j = 0; j < m; ++j) {
      Rational v = inv[i][j];
      if (j > 0) v -= inv[i][j - 1];
      s(i, j) = to_double(v);
    }
  }
  return s;
}

ClosedForm fibonacci_R(Index m) {
  if (m < 2) throw Error(ErrorCode::InvalidArgument, "fibonacci_R needs m >= 2");
  const auto fib = fibonacci_table(2 * static_cast<std::size_t>(m) + 1);
  auto F = [&](Index k) -> const BigInt& { return fib[k]; };
  const BigInt& den = F(2 * m + 1);
  const Matrix direct = direct_R(m);

  ClosedForm out;
  out.value.resize(m, m);
  for (Index i = 1; i <= m; ++i) {
    for (Index j = i; j <= m; ++j) {
      BigInt num;
      bool corrected = false;
      if (i == j && (i == 1 || i == m)) {
        num = F(2 * m - 2);
        if (i == m) {
          num = -num;
          corrected = true;
        }
      } else if (i == 1 && j == m) {
        num = -2;
      } else if (i == 1) {
        num = 2 * F(2 * m - 2 * j + 1);
      } else if (j == m) {
        num = -2 * F(2 * i);
      } else if (i == j) {
        num = F(2 * i) * F(2 * m - 2 * i) - F(2 * i - 2) * F(2 * m - 2 * i + 1);
      } else {
        num = -2 * F(2 * i) * F(2 * m - 2 * j + 1);
      }
      const double formula = ratio(num, den);
      const double exact = direct(i - 1, j - 1);
      FormulaMismatch rec{'R', i, j, formula, exact};
      if (corrected) out.corrections.push_back(rec);
      double value = formula;
      if (disagrees(formula, exact)) {
        out.mismatches.push_back(rec);
        value = exact;
      }
      out.value(i - 1, j - 1) = value;
      out.value(j - 1, i - 1) = value;
    }
  }
  return out;
}

ClosedForm fibonacci_S(Index m) {
  if (m < 1) throw Error(ErrorCode::InvalidArgument, "fibonacci_S needs m >= 1");
  const auto fib = fibonacci_table(2 * static_cast<std::size_t>(m) + 2);
  auto F = [&](Index k) -> const BigInt& { return fib[k]; };
  const BigInt& den = F(2 * m + 1);
  const Matrix direct = direct_S(m);

  ClosedForm out;
  out.value.resize(m, m);
  for (Index i = 1; i <= m; ++i) {
    for (Index j = 1; j <= m; ++j) {
      BigInt num;
      if (i < j) {
        num = -F(2 * i) * F(2 * m - 2 * j + 2);
      } else if (j > 1) {
        num = F(2 * j - 1) * F(2 * m - 2 * i + 1);
      } else {
        num = F(2 * m - 2 * i + 1);
      }
      const double formula = ratio(num, den);
      const double exact = direct(i - 1, j - 1);
      double value = formula;
      if (disagrees(formula, exact)) {
        out.mismatches.push_back({'S', i, j, formula, exact});
        value = exact;
      }
      out.value(i - 1, j - 1) = value;
    }
  }
  return out;
}

SolveReport picard2_monotone(const MonotoneConeWorkspace& ws,
                             const Vector& target, const Vector& start,
                             const StopRule& stop,
                             const std::optional<Vector>& known_solution,
                             const SolveOptions& opts, bool explicit_matrices) {
  const Index m = ws.dim();
  if (target.size() != m || start.size() != m ||
      (known_solution && known_solution->size() != m)) {
    throw Error(ErrorCode::DimensionMismatch,
                "picard2_monotone: vector length does not match workspace");
  }
  const Vector atz = ws.apply_generator_transpose(target);
  const Vector atz2 = 2.0 * atz;
  const double rhs_scale = 1.0 + atz.norm();
  // ((G - I) w)_i = w_i - w_{i-1} - w_{i+1}, with the last diagonal entry 0.
  auto gram_minus_identity = [m](const Vector& w, Index i) {
    double v = i + 1 < m ? w(i) - w(i + 1) : 0.0;
    if (i > 0) v -= w(i - 1);
    return v;
  };
  Vector pos(m);
  auto residual = [&](const Vector& x) {
    pos = x.cwiseMax(0.0);
    double sq = 0.0;
    for (Index i = 0; i < m; ++i) {
      const double r = gram_minus_identity(pos, i) + x(i) - atz(i);
      sq += r * r;
    }
    return std::sqrt(sq);
  };
  detail::IterationDriver<decltype(residual)> driver(
      stop, opts, SolverKind::Picard2, ws.contraction_c(),
      known_solution ? &*known_solution : nullptr, rhs_scale, residual);

  SolveReport report;
  if (explicit_matrices) {
    // For m = 1, R = (1 - 1) / (1 + 1) = 0.
    const Matrix r = m >= 2 ? fibonacci_R(m).value : Matrix::Zero(1, 1);
    const Vector sz2 = 2.0 * (fibonacci_S(m).value * target);
    report = driver.run(start, [&](const Vector& x, Vector& next) {
      next.noalias() = sz2 - r * x.cwiseAbs();
      return false;
    });
  } else {
    Vector ax(m);
    Vector rhs(m);
    report = driver.run(start, [&](const Vector& x, Vector& next) {
      ax = x.cwiseAbs();
      for (Index i = 0; i < m; ++i) rhs(i) = atz2(i) - gram_minus_identity(ax, i);
      ws.tridiag_solve_into(rhs, next);
      return false;
    });
  }
  report.projection = ws.apply_generator(report.solution.cwiseMax(0.0));
  return report;
}

Vector project_monotone_nonneg(const MonotoneConeWorkspace& ws,
                               const Vector& target, const StopRule& stop) {
  StopRule rule = stop;
  if (rule.mode == StopMode::KnownSolution) rule.mode = StopMode::Residual;
  const Vector neg = -target;
  const SolveReport rep =
      picard2_monotone(ws, neg, Vector::Zero(ws.dim()), rule);
  if (rep.status != SolveStatus::Converged) {
    throw Error(ErrorCode::InvalidArgument,
                "project_monotone_nonneg: Picard 2 ended with status " +
                    std::string(to_string(rep.status)));
  }
  return target + rep.projection;
}

}  // namespace simplicone
