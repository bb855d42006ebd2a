// Acceptance criteria runner. Usage: acceptance [N ...]; no arguments runs
// all ten. Prints one PASS/FAIL line per criterion and exits nonzero if any
// criterion fails.

#include <Eigen/Eigenvalues>
#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include "simplicone/bench.hpp"
#include "simplicone/cone.hpp"
#include "simplicone/error.hpp"
#include "simplicone/monotone.hpp"
#include "simplicone/oracle.hpp"
#include "simplicone/problem_gen.hpp"
#include "simplicone/solvers.hpp"

using namespace simplicone;
namespace fs = std::filesystem;

namespace {

struct Outcome {
  bool pass = true;
  std::string detail;
};

// Collects the first few failure descriptions and a total count.
class Failures {
 public:
  void add(const std::string& what) {
    if (count_++ < 5) notes_ << (count_ > 1 ? "; " : "") << what;
  }
  bool any() const { return count_ > 0; }
  std::string summary() const {
    std::ostringstream s;
    s << count_ << " failure(s): " << notes_.str();
    if (count_ > 5) s << "; ...";
    return s.str();
  }

 private:
  std::size_t count_ = 0;
  std::ostringstream notes_;
};

double rel_err(const Vector& a, const Vector& b) {
  return (a - b).norm() / std::max(b.norm(), 1e-300);
}

std::string fmt(double v, int prec = 3) {
  std::ostringstream s;
  s.precision(prec);
  s << v;
  return s.str();
}

Instance make_instance(Family family, Index m, std::uint64_t seed,
                       std::size_t index) {
  GenConfig cfg;
  cfg.family = family;
  cfg.dim = m;
  cfg.seed = seed;
  return gen_instance(cfg, index);
}

// 1. Oracle equivalence.
Outcome criterion1() {
  Failures f;
  std::size_t problems = 0;
  std::size_t p1_checked = 0;
  std::size_t nt_checked = 0;
  double worst = 0.0;
  const StopRule stop{StopMode::Residual, 1e-10, 100000};
  for (Family family : {Family::ConformingSvd, Family::MonotoneCone}) {
    for (Index m = 1; m <= 10; ++m) {
      for (std::size_t i = 0; i < 200; ++i) {
        const Instance inst = make_instance(family, m, 1000 + m, i);
        const ProjectionProblem& prob = inst.problem;
        const Vector oracle = sign_enumeration_solve(prob).solution;
        ++problems;
        const std::string& where = inst.id;
        const SolveReport p2 = picard2_solve(prob, stop);
        const double e2 = rel_err(p2.solution, oracle);
        worst = std::max(worst, e2);
        if (p2.status != SolveStatus::Converged || !(e2 <= 1e-7)) {
          f.add("picard2 " + where + " err " + fmt(e2));
        }
        for (SolverKind kind : {SolverKind::Picard1, SolverKind::SsNewton}) {
          const SolveReport r = solve(kind, prob, stop);
          if (r.status == SolveStatus::NotApplicable) continue;
          (kind == SolverKind::Picard1 ? p1_checked : nt_checked)++;
          const double e = rel_err(r.solution, oracle);
          worst = std::max(worst, e);
          if (r.status != SolveStatus::Converged || !(e <= 1e-7)) {
            f.add(std::string(to_string(kind)) + " " + where + " err " + fmt(e));
          }
        }
      }
    }
  }
  std::ostringstream d;
  d << problems << " problems, picard1 on " << p1_checked << ", ssnewton on "
    << nt_checked << ", worst rel err " << fmt(worst);
  if (f.any()) d << "; " << f.summary();
  return {!f.any(), d.str()};
}

// 2. Contraction-rate bounds and a-posteriori domination.
Outcome criterion2() {
  Failures f;
  double worst_excess = -1.0;
  std::size_t ratios = 0;
  SolveOptions opts;
  opts.record_bounds = true;
  const StopRule stop{StopMode::KnownSolution, 1e-13, 100000};
  for (std::size_t i = 0; i < 50; ++i) {
    const Instance inst = make_instance(Family::ConformingSvd, 50, 2024, i);
    const ProjectionProblem& prob = inst.problem;
    const double u_norm = prob.known_solution->norm();
    const double floor = 1e-12 * u_norm;
    for (SolverKind kind : {SolverKind::Picard1, SolverKind::Picard2}) {
      const SolveReport r = solve(kind, prob, stop, opts);
      if (r.status != SolveStatus::Converged) {
        f.add(inst.id + " " + std::string(to_string(kind)) + " did not converge");
        continue;
      }
      const double alpha = kind == SolverKind::Picard1
                               ? prob.cone->gram_norm_dev()
                               : prob.cone->contraction_c();
      const auto& e = r.per_iter_errors;
      for (std::size_t k = 0; k + 1 < e.size(); ++k) {
        if (!(e[k] > floor)) continue;
        ++ratios;
        const double excess = e[k + 1] / e[k] - alpha;
        worst_excess = std::max(worst_excess, excess);
        if (excess > 1e-9) {
          f.add(inst.id + " " + std::string(to_string(kind)) + " k=" +
                std::to_string(k) + " ratio-alpha=" + fmt(excess) +
                " e_k/|u|=" + fmt(e[k] / u_norm));
        }
      }
      // bounds[k] estimates e[k+1]; the slack is the rounding floor.
      for (std::size_t k = 0; k < r.per_iter_bounds.size(); ++k) {
        if (r.per_iter_bounds[k] + floor < e[k + 1]) {
          f.add(inst.id + " " + std::string(to_string(kind)) +
                " bound below error at k=" + std::to_string(k + 1));
        }
      }
    }
  }
  std::ostringstream d;
  d << ratios << " ratios checked, max(ratio - alpha) = " << fmt(worst_excess);
  if (f.any()) d << "; " << f.summary();
  return {!f.any(), d.str()};
}

// 3. Eigenvalue formula.
Outcome criterion3() {
  Failures f;
  double worst = 0.0;
  for (Index m : {1, 2, 10, 50, 200}) {
    const Matrix a = monotone_generator(m);
    Eigen::SelfAdjointEigenSolver<Matrix> es(a.transpose() * a);
    const Vector dense = es.eigenvalues().reverse();
    const double err = (dense - monotone_eigenvalues(m)).cwiseAbs().maxCoeff();
    worst = std::max(worst, err);
    if (!(err <= 1e-10)) f.add("m=" + std::to_string(m) + " err " + fmt(err));
  }
  const Vector e2 = monotone_eigenvalues(2);
  if (std::abs(e2(0) - 2.6180339887) > 1e-10 ||
      std::abs(e2(1) - 0.3819660113) > 1e-10) {
    f.add("m=2 values " + fmt(e2(0), 12) + ", " + fmt(e2(1), 12));
  }
  std::string d = "max abs err " + fmt(worst);
  if (f.any()) d += "; " + f.summary();
  return {!f.any(), d};
}

// 4. Fibonacci closed forms.
Outcome criterion4() {
  Failures f;
  std::size_t corrections = 0;
  std::map<std::string, std::size_t> mismatch_cases;
  for (Index m = 2; m <= 40; ++m) {
    const ClosedForm r = fibonacci_R(m);
    const ClosedForm s = fibonacci_S(m);
    corrections += r.corrections.size();
    for (const ClosedForm* cf : {&r, &s}) {
      for (const FormulaMismatch& mm : cf->mismatches) {
        std::string kind;
        if (mm.matrix == 'R' && mm.i == 1 && mm.j > 1 && mm.j < m) {
          kind = "R case 1=i<j<m";
        } else {
          kind = std::string(1, mm.matrix) + " other";
        }
        if (mismatch_cases[kind]++ == 0) {
          f.add(std::string(1, mm.matrix) + "(m=" + std::to_string(m) + ",i=" +
                std::to_string(mm.i) + ",j=" + std::to_string(mm.j) +
                ") formula " + fmt(mm.formula, 10) + " direct " +
                fmt(mm.direct, 10));
        }
      }
    }
  }
  std::ostringstream d;
  d << corrections << " documented R_mm corrections applied";
  for (const auto& [kind, n] : mismatch_cases) {
    d << "; " << n << " mismatches in " << kind;
  }
  if (f.any()) d << "; first: " << f.summary();
  return {!f.any(), d.str()};
}

// 5. O(m) fast path.
Outcome criterion5() {
  Failures f;
  const Index m = 500;
  const MonotoneConeWorkspace ws(m);
  auto cone = make_shared_cone(monotone_generator(m));
  Rng rng(55);
  const Vector z = rng.uniform_vector(m, -1, 1);
  const Vector x0 = rng.uniform_vector(m, -1, 1);
  const StopRule hundred{StopMode::Residual, 1e-300, 100};

  std::vector<Vector> dense_iterates;
  std::vector<Vector> fast_iterates;
  SolveOptions dense_opts;
  dense_opts.on_iterate = [&](int, const Vector& x) {
    dense_iterates.push_back(x);
  };
  SolveOptions fast_opts;
  fast_opts.on_iterate = [&](int, const Vector& x) {
    fast_iterates.push_back(x);
  };
  (void)picard2_solve(make_problem(cone, z, x0), hundred, dense_opts);
  (void)picard2_monotone(ws, z, x0, hundred, std::nullopt, fast_opts);
  double worst = 0.0;
  if (dense_iterates.size() != 100 || fast_iterates.size() != 100) {
    f.add("expected 100 iterates, got " + std::to_string(dense_iterates.size()) +
          " and " + std::to_string(fast_iterates.size()));
  } else {
    for (std::size_t k = 0; k < 100; ++k) {
      const double e = rel_err(fast_iterates[k], dense_iterates[k]);
      worst = std::max(worst, e);
      if (!(e <= 1e-12)) f.add("iterate " + std::to_string(k + 1) + " err " + fmt(e));
    }
  }

  const Index big = 1000000;
  const auto t0 = std::chrono::steady_clock::now();
  const MonotoneConeWorkspace ws_big(big);
  const Vector z_big = rng.uniform_vector(big, -1, 1);
  const SolveReport r = picard2_monotone(ws_big, z_big, Vector::Zero(big),
                                         {StopMode::Residual, 1e-300, 1000});
  const double secs =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  if (r.iterations != 1000) f.add("m=1e6 ran " + std::to_string(r.iterations));
  if (!(secs < 60.0)) f.add("m=1e6 took " + fmt(secs) + " s");

  std::ostringstream d;
  d << "max iterate rel err " << fmt(worst) << " over 100 iterations at m=500; "
    << "1000 iterations at m=1e6 in " << fmt(secs) << " s";
  if (f.any()) d << "; " << f.summary();
  return {!f.any(), d.str()};
}

// 6. Guard correctness.
Outcome criterion6() {
  Failures f;
  double min_dev = 1e300;
  for (Index m = 2; m <= 50; ++m) {
    auto cone = make_shared_cone(monotone_generator(m));
    min_dev = std::min(min_dev, cone->gram_norm_dev());
    if (!(cone->gram_norm_dev() > 1.0) ||
        !(MonotoneConeWorkspace(m).gram_norm_dev() > 1.0)) {
      f.add("m=" + std::to_string(m) + " gram_norm_dev " +
            fmt(cone->gram_norm_dev()));
    }
    const auto prob = make_problem(cone, Vector::Ones(m));
    for (SolverKind kind : {SolverKind::Picard1, SolverKind::SsNewton}) {
      if (solve(kind, prob, {}).status != SolveStatus::NotApplicable) {
        f.add(std::string(to_string(kind)) + " ran at m=" + std::to_string(m));
      }
    }
  }
  double max_conf = 0.0;
  std::size_t generated = 0;
  for (Index m : {1, 2, 5, 10, 25, 50, 100}) {
    for (std::size_t i = 0; i < 50; ++i) {
      GenConfig cfg;
      cfg.dim = m;
      cfg.seed = mix_seed(606, static_cast<std::uint64_t>(m * 1000 + i));
      const double dev = make_cone(gen_conforming_matrix(cfg).generator)
                             .gram_norm_dev();
      ++generated;
      max_conf = std::max(max_conf, dev);
      if (!(dev < 1.0 / 3.0)) f.add("conforming m=" + std::to_string(m) + " dev " + fmt(dev));
    }
  }
  std::ostringstream d;
  d << "monotone min gram_norm_dev " << fmt(min_dev, 6) << " (m=2..50); "
    << generated << " conforming matrices, max gram_norm_dev " << fmt(max_conf, 6);
  if (f.any()) d << "; " << f.summary();
  return {!f.any(), d.str()};
}

// 7. Iteration trends of the monotone experiment.
Outcome criterion7() {
  Failures f;
  ExperimentConfig cfg;
  cfg.family = Family::MonotoneCone;
  cfg.dims = {100, 500};
  cfg.count = 10;
  cfg.tolerances = {1e-7, 1e-10, 1e-13};
  cfg.solvers = {SolverKind::Picard2};
  cfg.seed = 7;
  cfg.stop = StopMode::KnownSolution;
  cfg.repetitions = 1;
  const ExperimentResult res = run_experiment(cfg);
  for (const RunRecord& r : res.records) {
    if (r.status != SolveStatus::Converged) f.add(r.problem_id + " not converged");
  }
  const AggregateTable& t = res.table;
  auto total = [&](Index m, double tol) {
    return t.at(SolverKind::Picard2, m, tol).total_iterations;
  };
  std::ostringstream d;
  for (Index m : cfg.dims) {
    d << "m=" << m << ":";
    for (double tol : cfg.tolerances) d << ' ' << total(m, tol);
    d << "; ";
    for (std::size_t k = 0; k + 1 < cfg.tolerances.size(); ++k) {
      if (!(total(m, cfg.tolerances[k]) < total(m, cfg.tolerances[k + 1]))) {
        f.add("not increasing with tolerance at m=" + std::to_string(m));
      }
    }
  }
  for (double tol : cfg.tolerances) {
    if (!(total(100, tol) < total(500, tol))) {
      f.add("not increasing with m at tol " + fmt(tol));
    }
  }
  const double mean = static_cast<double>(total(100, 1e-7)) / 10.0;
  d << "mean at m=100, tol=1e-7: " << fmt(mean, 4);
  if (!(mean >= 15.0 && mean <= 150.0)) f.add("mean outside [15, 150]");
  if (f.any()) d << "; " << f.summary();
  return {!f.any(), d.str()};
}

// 8. Profile validity and the 1.01 rule.
Outcome criterion8() {
  Failures f;
  ExperimentConfig cfg;
  cfg.family = Family::ConformingSvd;
  cfg.dims = {50};
  cfg.count = 50;
  cfg.tolerances = {1e-7, 1e-10, 1e-13};
  cfg.solvers = {SolverKind::Picard1, SolverKind::Picard2, SolverKind::SsNewton};
  cfg.seed = 8;
  cfg.repetitions = kDefaultRepetitions;
  const ExperimentResult res = run_experiment(cfg);
  const std::vector<double> taus = default_tau_grid();
  std::ostringstream d;
  std::size_t profiles = 0;
  for (double tol : cfg.tolerances) {
    std::vector<RunRecord> group;
    bool all_converged = true;
    for (const RunRecord& r : res.records) {
      if (r.rel_tol != tol) continue;
      group.push_back(r);
      all_converged = all_converged && r.status == SolveStatus::Converged;
    }
    for (const PerformanceProfile& p : build_profile(group)) {
      ++profiles;
      const std::string name =
          std::string(to_string(p.solver)) + "@" + fmt(tol);
      double prev = 0.0;
      for (double tau : taus) {
        const double rho = p.rho(tau);
        if (rho < prev || rho < 0.0 || rho > 1.0) {
          f.add(name + " not a CDF at tau=" + fmt(tau));
          break;
        }
        prev = rho;
      }
      if (all_converged && p.rho(p.ratios.back()) != 1.0) {
        f.add(name + " does not reach 1");
      }
      d << name << " rho(1)=" << fmt(p.rho(1.0), 2)
        << " rho(4)=" << fmt(p.rho(4.0), 2) << "; ";
    }
  }

  auto rec = [](SolverKind s, double t) {
    RunRecord r;
    r.problem_id = "fixture";
    r.solver = s;
    r.runtime_seconds = t;
    r.status = SolveStatus::Converged;
    return r;
  };
  using K = SolverKind;
  const std::vector<std::pair<std::vector<RunRecord>, std::set<K>>> fixtures{
      {{rec(K::Picard1, 1.0), rec(K::Picard2, 1.005), rec(K::SsNewton, 2.0)},
       {K::Picard1, K::Picard2}},
      {{rec(K::Picard1, 1.0), rec(K::Picard2, 1.02)}, {K::Picard1}},
      {{rec(K::SsNewton, 0.5)}, {K::SsNewton}},
      {{rec(K::Picard1, 2.0), rec(K::Picard2, 2.02)}, {K::Picard1, K::Picard2}},
      {{rec(K::Picard1, 2.0), rec(K::Picard2, 2.0200001)}, {K::Picard1}},
  };
  for (std::size_t i = 0; i < fixtures.size(); ++i) {
    if (fastest_flags(fixtures[i].first) != fixtures[i].second) {
      f.add("fastest_flags fixture " + std::to_string(i));
    }
  }
  d << profiles << " profiles; " << fixtures.size() << " tie fixtures";
  if (f.any()) d << "; " << f.summary();
  return {!f.any(), d.str()};
}

// 9. Property suites.
Outcome criterion9() {
  Failures f;
  constexpr std::size_t kCases = 10000;
  Rng rng(909);
  std::size_t lcp_cases = 0;
  for (std::size_t c = 0; c < kCases; ++c) {
    const Index m = 1 + static_cast<Index>(rng.canonical() * 12);
    const Vector x = rng.uniform_vector(m, -10, 10);
    const Vector w = rng.uniform_vector(m, -10, 10);
    if ((positive_part(x) - positive_part(w)).norm() > (x - w).norm()) {
      f.add("nonexpansiveness case " + std::to_string(c));
    }
    const Vector xp = positive_part(x);
    const Vector xn = negative_part(x);
    if ((xp - xn - x).norm() != 0.0 || (xp + xn - abs_part(x)).norm() != 0.0 ||
        xp.dot(xn) != 0.0) {
      f.add("decomposition identity case " + std::to_string(c));
    }
  }
  for (std::size_t c = 0; c < kCases; ++c) {
    const Index m = 1 + static_cast<Index>(c % 8);
    const Family family = c % 3 == 0 ? Family::RawRandom : Family::ConformingSvd;
    const Instance inst = make_instance(family, m, 990, c);
    const ProjectionProblem& prob = inst.problem;
    const SimplicialCone& k = *prob.cone;
    const Vector& u = *prob.known_solution;

    const Vector x = rng.uniform_vector(m, -1e3, 1e3);
    const Vector r = residual_nonsmooth(x, prob);
    // Relative to the magnitude of the terms being summed.
    const double terms = (k.gram().norm() + 2.0) * x.norm() +
                         k.apply_transpose(prob.target).norm();
    if ((residual_abs(x, prob) - 2.0 * r).norm() > 1e-12 * 2.0 * terms) {
      f.add("residual_abs identity " + inst.id);
    }

    const Vector p = k.apply(positive_part(u));
    const Vector q = -k.solve_transpose(negative_part(u));
    const double scale = k.generator().norm() * k.solve(Matrix::Identity(m, m)).norm();
    if (std::abs(p.dot(q)) > 1e-10 * u.squaredNorm() * scale) {
      f.add("complementarity " + inst.id + " " + fmt(p.dot(q)));
    }

    // KKT point of the LCP: x = u^+, y = u^-.
    const LcpInstance lcp = lcp_export(prob);
    const double tol = 1e-9 * (1.0 + u.norm() * k.gram().norm());
    ++lcp_cases;
    if (!lcp_check(lcp, positive_part(u), tol)) {
      f.add("lcp check " + inst.id);
    }
  }
  std::ostringstream d;
  d << kCases << " vector cases, " << lcp_cases << " cone cases";
  if (f.any()) d << "; " << f.summary();
  return {!f.any(), d.str()};
}

std::string strip_runtime_column(const fs::path& records) {
  std::ifstream in(records);
  std::ostringstream out;
  std::string line;
  while (std::getline(in, line)) {
    std::vector<std::string> fields;
    std::stringstream ss(line);
    std::string field;
    while (std::getline(ss, field, ',')) fields.push_back(field);
    for (std::size_t i = 0; i < fields.size(); ++i) {
      if (i == 4) continue;
      out << fields[i] << (i + 1 < fields.size() ? "," : "");
    }
    out << '\n';
  }
  return out.str();
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

// 10. Determinism.
Outcome criterion10() {
  Failures f;
  const fs::path root = fs::temp_directory_path() / "simplicone_acceptance10";
  fs::remove_all(root);
  ExperimentConfig cfg;
  cfg.family = Family::ConformingSvd;
  cfg.dims = {8, 20};
  cfg.count = 6;
  cfg.tolerances = {1e-7, 1e-12};
  cfg.solvers = {SolverKind::Picard1, SolverKind::Picard2, SolverKind::SsNewton};
  cfg.seed = 10;
  cfg.repetitions = 2;

  // Second run uses more generator threads; outputs must not change.
  ::setenv("SIMPLICONE_THREADS", "1", 1);
  run_experiment(cfg, root / "a");
  ::setenv("SIMPLICONE_THREADS", "4", 1);
  run_experiment(cfg, root / "b");
  ::unsetenv("SIMPLICONE_THREADS");

  const std::string a = strip_runtime_column(root / "a" / "records.csv");
  const std::string b = strip_runtime_column(root / "b" / "records.csv");
  if (a.empty() || a != b) f.add("records differ outside runtime_s");

  GenConfig gen;
  gen.dim = 7;
  gen.seed = 7;
  write_instance_dir(root / "g1", gen_instance(gen, 0));
  write_instance_dir(root / "g2", gen_instance(gen, 0));
  for (const char* file : {"A.mat", "z.vec", "u.vec", "x0.vec", "meta.json"}) {
    if (slurp(root / "g1" / file) != slurp(root / "g2" / file)) {
      f.add(std::string("instance file differs: ") + file);
    }
  }
  fs::remove_all(root);
  std::ostringstream d;
  d << std::count(a.begin(), a.end(), '\n') - 1
    << " records identical outside runtime_s across reruns (1 vs 4 threads); "
       "instance directories identical";
  if (f.any()) d << "; " << f.summary();
  return {!f.any(), d.str()};
}

struct Criterion {
  const char* name;
  double budget_seconds;
  std::function<Outcome()> run;
};

}  // namespace

int main(int argc, char** argv) {
  const std::map<int, Criterion> criteria{
      {1, {"oracle equivalence", 60, criterion1}},
      {2, {"contraction-rate bounds", 30, criterion2}},
      {3, {"eigenvalue formula", 5, criterion3}},
      {4, {"Fibonacci closed forms", 10, criterion4}},
      {5, {"O(m) fast path", 120, criterion5}},
      {6, {"guard correctness", 60, criterion6}},
      {7, {"iteration trends", 300, criterion7}},
      {8, {"profile validity", 300, criterion8}},
      {9, {"property suites", 120, criterion9}},
      {10, {"determinism", 120, criterion10}},
  };
  std::vector<int> selected;
  for (int i = 1; i < argc; ++i) {
    const int n = std::atoi(argv[i]);
    if (!criteria.count(n)) {
      std::cerr << "unknown criterion " << argv[i] << '\n';
      return 1;
    }
    selected.push_back(n);
  }
  if (selected.empty()) {
    for (const auto& [n, c] : criteria) selected.push_back(n);
  }

  int failed = 0;
  for (int n : selected) {
    const Criterion& c = criteria.at(n);
    const auto t0 = std::chrono::steady_clock::now();
    Outcome out;
    try {
      out = c.run();
    } catch (const std::exception& e) {
      out = {false, std::string("exception: ") + e.what()};
    }
    const double secs =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0)
            .count();
    if (secs > c.budget_seconds) {
      out.pass = false;
      out.detail += "; exceeded the " + fmt(c.budget_seconds) + " s budget";
    }
    std::cout << "criterion " << n << " [" << c.name << "]: "
              << (out.pass ? "PASS" : "FAIL") << " (" << fmt(secs) << " s) "
              << out.detail << std::endl;
    if (!out.pass) ++failed;
  }
  return failed == 0 ? 0 : 1;
}
