#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <set>
#include <span>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "simplicone/problem_gen.hpp"
#include "simplicone/solvers.hpp"

namespace simplicone {

struct RunRecord {
  std::string problem_id;
  SolverKind solver = SolverKind::Picard1;
  Index dim = 0;
  double rel_tol = 0.0;
  double runtime_seconds = 0.0;  // median over the timed repetitions
  int iterations = 0;
  SolveStatus status = SolveStatus::MaxIters;
};

inline constexpr int kDefaultRepetitions = 10;
inline constexpr double kFastestFactor = 1.01;

// One warm-up solve (not timed), then `repetitions` timed solves back to
// back on the calling thread; records the median wall-clock time. Solver
// errors end up in `status`, never thrown.
RunRecord time_solver(const ProjectionProblem& prob, std::string problem_id,
                      SolverKind solver, const StopRule& stop,
                      const SolveOptions& opts = {},
                      int repetitions = kDefaultRepetitions);

// Solvers with runtime <= 1.01 * (best converged runtime). Records must all
// belong to one problem. Throws Error{NoConvergedRecord}.
std::set<SolverKind> fastest_flags(std::span<const RunRecord> records);

struct PerformanceProfile {
  SolverKind solver = SolverKind::Picard1;
  // Per-problem runtime ratio to the best solver, sorted ascending;
  // +inf for runs that did not converge.
  std::vector<double> ratios;

  // Fraction of problems with ratio <= tau.
  double rho(double tau) const;
  double efficiency() const { return rho(1.0); }
};

// Records for one (dim, tolerance) group across problems and solvers.
// Throws Error{NoConvergedRecord} if some problem has no converged run.
std::vector<PerformanceProfile> build_profile(std::span<const RunRecord> records);

// tau = 1.00, 1.01, ..., 4.00
std::vector<double> default_tau_grid();

struct AggregateCell {
  long long total_iterations = 0;
  double total_runtime = 0.0;
  std::size_t runs = 0;
};

/// Aggregate layout: one row per (solver, dimension), column groups of total
/// iterations and total runtime per tolerance.
struct AggregateTable {
  std::vector<SolverKind> solvers;
  std::vector<Index> dims;
  std::vector<double> tolerances;
  // cells[s][d][t]
  std::vector<std::vector<std::vector<AggregateCell>>> cells;

  bool empty() const { return dims.empty() || tolerances.empty(); }
  const AggregateCell& at(SolverKind solver, Index dim, double tol) const;
  std::string to_text() const;
  std::string to_csv() const;
};

AggregateTable aggregate_table(std::span<const RunRecord> records,
                               std::vector<Index> dims,
                               std::vector<double> tolerances);

// CSV: problem_id,solver,dim,rel_tol,runtime_s,iterations,status
void write_records_csv(std::ostream& out, std::span<const RunRecord> records);
std::vector<RunRecord> read_records_csv(std::istream& in);
// CSV: solver,tau,rho
void write_profile_csv(std::ostream& out,
                       std::span<const PerformanceProfile> profiles,
                       std::span<const double> taus);

struct ExperimentConfig {
  int schema_version = 1;
  Family family = Family::ConformingSvd;
  std::vector<Index> dims;
  std::size_t count = 1;
  std::vector<double> tolerances;
  std::vector<SolverKind> solvers;
  std::uint64_t seed = 0;
  StopMode stop = StopMode::KnownSolution;
  int max_iters = 100000;
  int repetitions = kDefaultRepetitions;
  bool override_guards = false;
};

// Keys: schema_version, family, m | dims, count, tolerances, solvers, seed,
// and optional stop, max_iters, repetitions, override_guards.
ExperimentConfig parse_experiment_config(const nlohmann::json& j);
ExperimentConfig read_experiment_config(const std::filesystem::path& path);

struct ExperimentResult {
  std::vector<RunRecord> records;
  AggregateTable table;
};

// Generates each dimension's set, runs every (problem, solver, tolerance)
// cell, and (when out_dir is non-empty) writes records.csv,
// profile_m<dim>_tol<tol>.csv, table.csv and table.txt.
ExperimentResult run_experiment(const ExperimentConfig& cfg,
                                const std::filesystem::path& out_dir = {});

// Profile CSVs recomputed from records, one file per (dim, tolerance) group.
void write_profiles_from_records(std::span<const RunRecord> records,
                                 const std::filesystem::path& out_dir);

std::string profile_file_name(Index dim, double tol);

}  // namespace simplicone
