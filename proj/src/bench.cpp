#include "simplicone/bench.hpp"

#include <algorithm>
#include <chrono>
#include <cstdio>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <limits>
#include <map>
#include <sstream>
#include <utility>

#include "simplicone/error.hpp"
#include "simplicone/io.hpp"

namespace simplicone {

namespace {

double median(std::vector<double> v) {
  std::sort(v.begin(), v.end());
  const std::size_t n = v.size();
  if (n == 0) return 0.0;
  return n % 2 == 1 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

std::string short_double(double v) {
  std::ostringstream s;
  s << std::setprecision(6) << v;
  return s.str();
}

}  // namespace

RunRecord time_solver(const ProjectionProblem& prob, std::string problem_id,
                      SolverKind solver, const StopRule& stop,
                      const SolveOptions& opts, int repetitions) {
  RunRecord rec;
  rec.problem_id = std::move(problem_id);
  rec.solver = solver;
  rec.dim = prob.dim();
  rec.rel_tol = stop.rel_tol;
  using Clock = std::chrono::steady_clock;
  try {
    const SolveReport warm = solve(solver, prob, stop, opts);
    rec.iterations = warm.iterations;
    rec.status = warm.status;
    if (warm.status == SolveStatus::NotApplicable) return rec;
    std::vector<double> times;
    times.reserve(static_cast<std::size_t>(std::max(repetitions, 1)));
    for (int r = 0; r < std::max(repetitions, 1); ++r) {
      const auto t0 = Clock::now();
      const SolveReport rep = solve(solver, prob, stop, opts);
      const auto t1 = Clock::now();
      times.push_back(std::chrono::duration<double>(t1 - t0).count());
      rec.iterations = rep.iterations;
      rec.status = rep.status;
    }
    rec.runtime_seconds = median(std::move(times));
  } catch (const Error&) {
    rec.status = SolveStatus::MaxIters;
  }
  return rec;
}

std::set<SolverKind> fastest_flags(std::span<const RunRecord> records) {
  double best = std::numeric_limits<double>::infinity();
  for (const RunRecord& r : records) {
    if (r.status == SolveStatus::Converged) best = std::min(best, r.runtime_seconds);
  }
  if (best == std::numeric_limits<double>::infinity()) {
    throw Error(ErrorCode::NoConvergedRecord,
                "fastest_flags: no converged record");
  }
  std::set<SolverKind> flags;
  for (const RunRecord& r : records) {
    if (r.status == SolveStatus::Converged &&
        r.runtime_seconds <= kFastestFactor * best) {
      flags.insert(r.solver);
    }
  }
  return flags;
}

double PerformanceProfile::rho(double tau) const {
  if (ratios.empty()) return 0.0;
  const auto it = std::upper_bound(ratios.begin(), ratios.end(), tau);
  return static_cast<double>(it - ratios.begin()) /
         static_cast<double>(ratios.size());
}

std::vector<PerformanceProfile> build_profile(
    std::span<const RunRecord> records) {
  std::vector<std::string> problems;
  std::vector<SolverKind> solvers;
  std::map<std::pair<std::string, SolverKind>, const RunRecord*> index;
  for (const RunRecord& r : records) {
    if (std::find(problems.begin(), problems.end(), r.problem_id) ==
        problems.end()) {
      problems.push_back(r.problem_id);
    }
    if (std::find(solvers.begin(), solvers.end(), r.solver) == solvers.end()) {
      solvers.push_back(r.solver);
    }
    index[{r.problem_id, r.solver}] = &r;
  }

  std::vector<PerformanceProfile> profiles(solvers.size());
  for (std::size_t s = 0; s < solvers.size(); ++s) {
    profiles[s].solver = solvers[s];
  }
  const double inf = std::numeric_limits<double>::infinity();
  for (const std::string& p : problems) {
    double best = inf;
    for (SolverKind s : solvers) {
      auto it = index.find({p, s});
      if (it != index.end() && it->second->status == SolveStatus::Converged) {
        best = std::min(best, it->second->runtime_seconds);
      }
    }
    if (best == inf) {
      throw Error(ErrorCode::NoConvergedRecord,
                  "build_profile: problem " + p + " has no converged run");
    }
    for (std::size_t s = 0; s < solvers.size(); ++s) {
      auto it = index.find({p, solvers[s]});
      double ratio = inf;
      if (it != index.end() && it->second->status == SolveStatus::Converged) {
        // Zero-time runs (timer resolution) count as ties with the best.
        ratio = best > 0.0 ? it->second->runtime_seconds / best : 1.0;
      }
      profiles[s].ratios.push_back(ratio);
    }
  }
  for (auto& prof : profiles) std::sort(prof.ratios.begin(), prof.ratios.end());
  return profiles;
}

std::vector<double> default_tau_grid() {
  std::vector<double> taus;
  for (int i = 0; i <= 300; ++i) taus.push_back(1.0 + 0.01 * i);
  return taus;
}

const AggregateCell& AggregateTable::at(SolverKind solver, Index dim,
                                        double tol) const {
  const auto s = std::find(solvers.begin(), solvers.end(), solver);
  const auto d = std::find(dims.begin(), dims.end(), dim);
  const auto t = std::find(tolerances.begin(), tolerances.end(), tol);
  if (s == solvers.end() || d == dims.end() || t == tolerances.end()) {
    throw Error(ErrorCode::InvalidArgument, "aggregate table: no such cell");
  }
  return cells[s - solvers.begin()][d - dims.begin()][t - tolerances.begin()];
}

AggregateTable aggregate_table(std::span<const RunRecord> records,
                               std::vector<Index> dims,
                               std::vector<double> tolerances) {
  AggregateTable table;
  table.dims = std::move(dims);
  table.tolerances = std::move(tolerances);
  for (const RunRecord& r : records) {
    if (std::find(table.solvers.begin(), table.solvers.end(), r.solver) ==
        table.solvers.end()) {
      table.solvers.push_back(r.solver);
    }
  }
  table.cells.assign(
      table.solvers.size(),
      std::vector<std::vector<AggregateCell>>(
          table.dims.size(), std::vector<AggregateCell>(table.tolerances.size())));
  for (const RunRecord& r : records) {
    const auto s = std::find(table.solvers.begin(), table.solvers.end(), r.solver);
    const auto d = std::find(table.dims.begin(), table.dims.end(), r.dim);
    const auto t =
        std::find(table.tolerances.begin(), table.tolerances.end(), r.rel_tol);
    if (d == table.dims.end() || t == table.tolerances.end()) continue;
    AggregateCell& cell = table.cells[s - table.solvers.begin()]
                                     [d - table.dims.begin()]
                                     [t - table.tolerances.begin()];
    cell.total_iterations += r.iterations;
    cell.total_runtime += r.runtime_seconds;
    ++cell.runs;
  }
  return table;
}

std::string AggregateTable::to_text() const {
  if (empty()) return {};
  std::ostringstream out;
  for (std::size_t s = 0; s < solvers.size(); ++s) {
    out << "solver " << to_string(solvers[s]) << '\n';
    out << std::setw(10) << "m";
    for (double t : tolerances) {
      out << std::setw(14) << ("iters@" + short_double(t));
    }
    for (double t : tolerances) {
      out << std::setw(16) << ("time@" + short_double(t));
    }
    out << '\n';
    for (std::size_t d = 0; d < dims.size(); ++d) {
      out << std::setw(10) << dims[d];
      for (std::size_t t = 0; t < tolerances.size(); ++t) {
        out << std::setw(14) << cells[s][d][t].total_iterations;
      }
      for (std::size_t t = 0; t < tolerances.size(); ++t) {
        std::ostringstream v;
        v << std::fixed << std::setprecision(6) << cells[s][d][t].total_runtime;
        out << std::setw(16) << v.str();
      }
      out << '\n';
    }
  }
  return out.str();
}

std::string AggregateTable::to_csv() const {
  if (empty()) return {};
  std::ostringstream out;
  out << "solver,dim";
  for (double t : tolerances) out << ",iterations_tol_" << short_double(t);
  for (double t : tolerances) out << ",time_s_tol_" << short_double(t);
  out << '\n';
  for (std::size_t s = 0; s < solvers.size(); ++s) {
    for (std::size_t d = 0; d < dims.size(); ++d) {
      out << to_string(solvers[s]) << ',' << dims[d];
      for (std::size_t t = 0; t < tolerances.size(); ++t) {
        out << ',' << cells[s][d][t].total_iterations;
      }
      for (std::size_t t = 0; t < tolerances.size(); ++t) {
        out << ',' << format_double(cells[s][d][t].total_runtime);
      }
      out << '\n';
    }
  }
  return out.str();
}

void write_records_csv(std::ostream& out, std::span<const RunRecord> records) {
  out << "problem_id,solver,dim,rel_tol,runtime_s,iterations,status\n";
  for (const RunRecord& r : records) {
    out << r.problem_id << ',' << to_string(r.solver) << ',' << r.dim << ','
        << format_double(r.rel_tol) << ',' << format_double(r.runtime_seconds)
        << ',' << r.iterations << ',' << to_string(r.status) << '\n';
  }
}

std::vector<RunRecord> read_records_csv(std::istream& in) {
  std::vector<RunRecord> records;
  std::string line;
  if (!std::getline(in, line) ||
      line != "problem_id,solver,dim,rel_tol,runtime_s,iterations,status") {
    throw Error(ErrorCode::Parse, "records csv: unexpected header");
  }
  std::size_t lineno = 1;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    std::vector<std::string> fields;
    std::stringstream ss(line);
    std::string field;
    while (std::getline(ss, field, ',')) fields.push_back(field);
    auto fail = [&](const std::string& why) {
      return Error(ErrorCode::Parse, "records csv line " +
                                         std::to_string(lineno) + ": " + why);
    };
    if (fields.size() != 7) throw fail("expected 7 fields");
    RunRecord r;
    r.problem_id = fields[0];
    const auto solver = parse_solver(fields[1]);
    const auto status = parse_status(fields[6]);
    if (!solver) throw fail("unknown solver '" + fields[1] + "'");
    if (!status) throw fail("unknown status '" + fields[6] + "'");
    r.solver = *solver;
    r.status = *status;
    try {
      r.dim = static_cast<Index>(std::stoll(fields[2]));
      r.rel_tol = std::stod(fields[3]);
      r.runtime_seconds = std::stod(fields[4]);
      r.iterations = std::stoi(fields[5]);
    } catch (const std::exception&) {
      throw fail("bad number");
    }
    records.push_back(std::move(r));
  }
  return records;
}

void write_profile_csv(std::ostream& out,
                       std::span<const PerformanceProfile> profiles,
                       std::span<const double> taus) {
  out << "solver,tau,rho\n";
  for (const PerformanceProfile& p : profiles) {
    for (double tau : taus) {
      out << to_string(p.solver) << ',' << format_double(tau) << ','
          << format_double(p.rho(tau)) << '\n';
    }
  }
}

ExperimentConfig parse_experiment_config(const nlohmann::json& j) {
  ExperimentConfig cfg;
  auto bad = [](const std::string& why) {
    return Error(ErrorCode::Parse, "experiment config: " + why);
  };
  try {
    cfg.schema_version = j.at("schema_version").get<int>();
    if (cfg.schema_version != 1) {
      throw bad("unsupported schema_version " +
                std::to_string(cfg.schema_version));
    }
    const auto family = parse_family(j.at("family").get<std::string>());
    if (!family) throw bad("unknown family");
    cfg.family = *family;
    if (j.contains("dims")) {
      cfg.dims = j.at("dims").get<std::vector<Index>>();
    } else {
      cfg.dims = {j.at("m").get<Index>()};
    }
    cfg.count = j.at("count").get<std::size_t>();
    cfg.tolerances = j.at("tolerances").get<std::vector<double>>();
    for (const auto& name : j.at("solvers").get<std::vector<std::string>>()) {
      const auto s = parse_solver(name);
      if (!s) throw bad("unknown solver '" + name + "'");
      cfg.solvers.push_back(*s);
    }
    cfg.seed = j.at("seed").get<std::uint64_t>();
    if (j.contains("stop")) {
      const auto mode = parse_stop_mode(j.at("stop").get<std::string>());
      if (!mode) throw bad("unknown stop mode");
      cfg.stop = *mode;
    }
    cfg.max_iters = j.value("max_iters", cfg.max_iters);
    cfg.repetitions = j.value("repetitions", cfg.repetitions);
    cfg.override_guards = j.value("override_guards", cfg.override_guards);
  } catch (const nlohmann::json::exception& e) {
    throw bad(e.what());
  }
  if (cfg.dims.empty() || cfg.tolerances.empty() || cfg.solvers.empty()) {
    throw bad("dims, tolerances and solvers must be nonempty");
  }
  for (Index m : cfg.dims) {
    if (m < 1) throw bad("dimensions must be >= 1");
  }
  for (double t : cfg.tolerances) {
    if (!(t > 0.0)) throw bad("tolerances must be positive");
  }
  if (cfg.count < 1) throw bad("count must be >= 1");
  if (cfg.max_iters < 1) throw bad("max_iters must be >= 1");
  return cfg;
}

ExperimentConfig read_experiment_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::Io, "cannot open " + path.string());
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(in);
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::Parse, "experiment config: " + std::string(e.what()));
  }
  return parse_experiment_config(j);
}

std::string profile_file_name(Index dim, double tol) {
  return "profile_m" + std::to_string(dim) + "_tol" + short_double(tol) +
         ".csv";
}

void write_profiles_from_records(std::span<const RunRecord> records,
                                 const std::filesystem::path& out_dir) {
  std::map<std::pair<Index, double>, std::vector<RunRecord>> groups;
  for (const RunRecord& r : records) groups[{r.dim, r.rel_tol}].push_back(r);
  const std::vector<double> taus = default_tau_grid();
  for (const auto& [key, group] : groups) {
    std::vector<PerformanceProfile> profiles;
    try {
      profiles = build_profile(group);
    } catch (const Error& e) {
      std::cerr << "skipping profile m=" << key.first
                << " tol=" << short_double(key.second) << ": " << e.what()
                << '\n';
      continue;
    }
    const auto path = out_dir / profile_file_name(key.first, key.second);
    std::ofstream out(path);
    if (!out) throw Error(ErrorCode::Io, "cannot write " + path.string());
    write_profile_csv(out, profiles, taus);
  }
}

ExperimentResult run_experiment(const ExperimentConfig& cfg,
                                const std::filesystem::path& out_dir) {
  ExperimentResult result;
  SolveOptions opts;
  opts.override_guards = cfg.override_guards;
  for (Index m : cfg.dims) {
    GenConfig gen;
    gen.dim = m;
    gen.family = cfg.family;
    gen.seed = mix_seed(cfg.seed, static_cast<std::uint64_t>(m));
    const std::vector<Instance> set = gen_experiment_set(gen, cfg.count);
    for (const Instance& inst : set) {
      for (double tol : cfg.tolerances) {
        const StopRule stop{cfg.stop, tol, cfg.max_iters};
        for (SolverKind solver : cfg.solvers) {
          result.records.push_back(time_solver(inst.problem, inst.id, solver,
                                               stop, opts, cfg.repetitions));
        }
      }
    }
  }
  result.table = aggregate_table(result.records, cfg.dims, cfg.tolerances);

  if (!out_dir.empty()) {
    std::error_code ec;
    std::filesystem::create_directories(out_dir, ec);
    if (ec) throw Error(ErrorCode::Io, "cannot create " + out_dir.string());
    {
      std::ofstream out(out_dir / "records.csv");
      if (!out) throw Error(ErrorCode::Io, "cannot write records.csv");
      write_records_csv(out, result.records);
    }
    write_profiles_from_records(result.records, out_dir);
    std::ofstream csv(out_dir / "table.csv");
    csv << result.table.to_csv();
    std::ofstream txt(out_dir / "table.txt");
    txt << result.table.to_text();
  }
  return result;
}

}  // namespace simplicone
