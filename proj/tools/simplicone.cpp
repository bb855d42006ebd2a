#include <CLI11.hpp>

#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>

#include "simplicone/bench.hpp"
#include "simplicone/cone.hpp"
#include "simplicone/error.hpp"
#include "simplicone/io.hpp"
#include "simplicone/monotone.hpp"
#include "simplicone/oracle.hpp"
#include "simplicone/problem_gen.hpp"
#include "simplicone/solvers.hpp"

namespace fs = std::filesystem;
using namespace simplicone;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitUsage = 1;
constexpr int kExitNumerical = 2;

struct SolverFlags {
  std::string solver = "picard2";
  std::string stop = "residual";
  double tol = 1e-10;
  int max_iters = 100000;
  bool override_guards = false;
  bool json = false;
};

void add_solver_flags(CLI::App* cmd, SolverFlags& f) {
  cmd->add_option("--solver", f.solver, "picard1, picard2, ssnewton or oracle")
      ->check(CLI::IsMember({"picard1", "picard2", "ssnewton", "oracle"}))
      ->capture_default_str();
  cmd->add_option("--stop", f.stop, "known, residual or posteriori")
      ->check(CLI::IsMember({"known", "residual", "posteriori"}))
      ->capture_default_str();
  cmd->add_option("--tol", f.tol, "relative tolerance")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
  cmd->add_option("--max-iters", f.max_iters, "iteration cap")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
  cmd->add_flag("--override-guards", f.override_guards,
                "iterate even when the convergence guard fails");
  cmd->add_flag("--json", f.json, "print the report as JSON");
}

StopRule stop_rule(const SolverFlags& f) {
  return {*parse_stop_mode(f.stop), f.tol, f.max_iters};
}

SolveOptions solve_options(const SolverFlags& f) {
  SolveOptions opts;
  opts.override_guards = f.override_guards;
  return opts;
}

int print_solution(const SolveReport& report, const ProjectionProblem& prob,
                   const SolverFlags& f, double cert_tol) {
  const bool solved = report.status == SolveStatus::Converged;
  std::optional<Certificate> cert;
  if (solved) cert = certify(prob.target, report.solution, *prob.cone);
  const bool accepted = cert && cert->accepted(cert_tol);

  if (f.json) {
    nlohmann::json j = to_json(report);
    if (cert) {
      j["certificate"] = {
          {"accepted", accepted},
          {"tolerance", cert_tol},
          {"complementarity_gap", cert->complementarity_gap},
          {"feasibility_projection", cert->feasibility_projection},
          {"feasibility_polar", cert->feasibility_polar},
          {"decomposition_residual", cert->decomposition_residual}};
    }
    std::cout << j.dump(2) << '\n';
  } else {
    std::cout << to_key_value(report);
    if (cert) {
      std::cout << "certificate=" << (accepted ? "accepted" : "rejected")
                << '\n'
                << "certificate_tolerance=" << format_double(cert_tol) << '\n'
                << "complementarity_gap="
                << format_double(cert->complementarity_gap) << '\n'
                << "feasibility_projection="
                << format_double(cert->feasibility_projection) << '\n'
                << "feasibility_polar=" << format_double(cert->feasibility_polar)
                << '\n'
                << "decomposition_residual="
                << format_double(cert->decomposition_residual) << '\n';
    }
  }

  if (!solved) {
    std::cerr << "error: solver " << to_string(report.solver) << " finished with "
              << to_string(report.status);
    if (!report.message.empty()) std::cerr << ": " << report.message;
    std::cerr << '\n';
    return kExitNumerical;
  }
  if (!accepted) {
    std::cerr << "error: projection failed certification at tolerance "
              << cert_tol << '\n';
    return kExitNumerical;
  }
  return kExitOk;
}

void require_file(const std::string& path) {
  if (!fs::is_regular_file(path)) {
    throw Error(ErrorCode::Io, "no such file: " + path);
  }
}

void require_dir(const std::string& path) {
  if (!fs::is_directory(path)) {
    throw Error(ErrorCode::Io, "no such directory: " + path);
  }
}

int exit_code_for(ErrorCode code) {
  switch (code) {
    case ErrorCode::FactorizationFailure:
    case ErrorCode::LinearSolveFailure:
    case ErrorCode::NoPatternAccepted:
    case ErrorCode::DegenerateSvd:
    case ErrorCode::NoConvergedRecord:
      return kExitNumerical;
    default:
      return kExitUsage;
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Euclidean projection onto simplicial cones"};
  app.require_subcommand(1, 1);

  // project
  SolverFlags project_flags;
  std::string project_a, project_z, project_known, project_lcp;
  double cert_tol = 1e-8;
  auto* project = app.add_subcommand("project", "project z onto A R^m_+");
  project->add_option("A", project_a, "generator matrix file")->required();
  project->add_option("z", project_z, "target vector file")->required();
  project->add_option("--known", project_known,
                      "known solution vector (for --stop known)");
  project->add_option("--cert-tol", cert_tol, "certificate tolerance")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
  project->add_option("--lcp", project_lcp, "also write the LCP form here");
  add_solver_flags(project, project_flags);

  // solve
  SolverFlags solve_flags;
  std::string solve_dir;
  double solve_cert_tol = 1e-8;
  auto* solve_cmd = app.add_subcommand("solve", "run a solver on an instance");
  solve_cmd->add_option("instance", solve_dir, "instance directory")->required();
  solve_cmd->add_option("--cert-tol", solve_cert_tol, "certificate tolerance")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
  add_solver_flags(solve_cmd, solve_flags);

  // gen
  std::string gen_family = "conforming", gen_out;
  Index gen_dim = 10;
  std::uint64_t gen_seed = 0;
  std::size_t gen_count = 0;
  auto* gen = app.add_subcommand("gen", "generate instance directories");
  gen->add_option("--family", gen_family, "conforming, monotone or raw")
      ->check(CLI::IsMember({"conforming", "monotone", "raw"}))
      ->capture_default_str();
  gen->add_option("--dim,-m", gen_dim, "dimension")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
  gen->add_option("--seed", gen_seed, "set seed")->capture_default_str();
  gen->add_option("--count", gen_count,
                  "number of instances (one subdirectory each)");
  gen->add_option("--out", gen_out, "output directory")->required();

  // bench
  std::string bench_config, bench_out;
  std::optional<std::uint64_t> bench_seed;
  auto* bench = app.add_subcommand("bench", "run an experiment config");
  bench->add_option("config", bench_config, "experiment JSON")->required();
  bench->add_option("--out", bench_out, "output directory")->required();
  bench->add_option("--seed", bench_seed, "override the config seed");

  // profile
  std::string profile_records, profile_out;
  auto* profile = app.add_subcommand("profile", "profiles from a records CSV");
  profile->add_option("records", profile_records, "records CSV")->required();
  profile->add_option("--out", profile_out, "output directory")->required();

  // monotone
  SolverFlags mono_flags;
  Index mono_dim = 0;
  std::string mono_z;
  std::uint64_t mono_seed = 0;
  bool mono_explicit = false;
  bool mono_nonneg = false;
  auto* mono = app.add_subcommand(
      "monotone", "Picard 2 fast path on the monotone generator");
  mono->add_option("--dim,-m", mono_dim, "dimension")
      ->check(CLI::PositiveNumber);
  mono->add_option("--z", mono_z, "target vector file (default: random)");
  mono->add_option("--seed", mono_seed, "seed for a generated target")
      ->capture_default_str();
  mono->add_flag("--explicit", mono_explicit,
                 "use the dense closed-form matrices");
  mono->add_flag("--nonneg", mono_nonneg,
                 "print the projection onto the monotone nonnegative cone");
  add_solver_flags(mono, mono_flags);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitUsage;
  }

  try {
    if (*project) {
      require_file(project_a);
      require_file(project_z);
      if (!project_known.empty()) require_file(project_known);
      auto cone = make_shared_cone(read_matrix_file(project_a));
      Vector z = read_vector_file(project_z);
      std::optional<Vector> known;
      if (!project_known.empty()) known = read_vector_file(project_known);
      const ProjectionProblem prob =
          make_problem(std::move(cone), std::move(z), std::nullopt, known);
      if (!project_lcp.empty()) {
        std::ofstream out(project_lcp);
        if (!out) throw Error(ErrorCode::Io, "cannot write " + project_lcp);
        write_lcp(out, lcp_export(prob));
      }
      const SolveReport report =
          solve(*parse_solver(project_flags.solver), prob,
                stop_rule(project_flags), solve_options(project_flags));
      return print_solution(report, prob, project_flags, cert_tol);
    }

    if (*solve_cmd) {
      require_dir(solve_dir);
      const Instance inst = read_instance_dir(solve_dir);
      const SolveReport report =
          solve(*parse_solver(solve_flags.solver), inst.problem,
                stop_rule(solve_flags), solve_options(solve_flags));
      return print_solution(report, inst.problem, solve_flags, solve_cert_tol);
    }

    if (*gen) {
      GenConfig cfg;
      cfg.dim = gen_dim;
      cfg.seed = gen_seed;
      cfg.family = *parse_family(gen_family);
      if (gen_count == 0) {
        write_instance_dir(gen_out, gen_instance(cfg, 0));
        std::cout << gen_out << '\n';
      } else {
        for (const Instance& inst : gen_experiment_set(cfg, gen_count)) {
          write_instance_dir(fs::path(gen_out) / inst.id, inst);
          std::cout << (fs::path(gen_out) / inst.id).string() << '\n';
        }
      }
      return kExitOk;
    }

    if (*bench) {
      require_file(bench_config);
      ExperimentConfig cfg = read_experiment_config(bench_config);
      if (bench_seed) cfg.seed = *bench_seed;
      const ExperimentResult result = run_experiment(cfg, bench_out);
      std::cout << result.table.to_text();
      return kExitOk;
    }

    if (*profile) {
      require_file(profile_records);
      std::ifstream in(profile_records);
      const std::vector<RunRecord> records = read_records_csv(in);
      std::error_code ec;
      fs::create_directories(profile_out, ec);
      if (ec) throw Error(ErrorCode::Io, "cannot create " + profile_out);
      write_profiles_from_records(records, profile_out);
      return kExitOk;
    }

    if (*mono) {
      Vector z;
      std::optional<Vector> known;
      std::optional<MonotoneConeWorkspace> ws;
      if (!mono_z.empty()) {
        require_file(mono_z);
        z = read_vector_file(mono_z);
        if (mono_dim != 0 && mono_dim != z.size()) {
          throw Error(ErrorCode::DimensionMismatch,
                      "--dim does not match the target vector");
        }
        ws.emplace(z.size());
      } else {
        if (mono_dim < 1) {
          throw Error(ErrorCode::InvalidArgument,
                      "monotone needs --dim or --z");
        }
        // Same construction as generated instances: z = A u^+ - (A^T)^{-1} u^-.
        ws.emplace(mono_dim);
        GenConfig range;
        Rng rng(mono_seed);
        Vector u = rng.uniform_vector(mono_dim, range.range_lo, range.range_hi);
        z = ws->apply_generator(positive_part(u)) -
            ws->solve_generator_transpose(negative_part(u));
        known = std::move(u);
      }
      if (mono_flags.solver != "picard2") {
        throw Error(ErrorCode::InvalidArgument,
                    "monotone runs picard2 only");
      }
      const StopRule stop = stop_rule(mono_flags);
      if (stop.mode == StopMode::KnownSolution && !known) {
        throw Error(ErrorCode::InvalidArgument,
                    "--stop known needs a generated target (omit --z)");
      }
      if (mono_nonneg) {
        // The dual problem has no known solution of its own.
        StopRule dual_stop = stop;
        if (dual_stop.mode == StopMode::KnownSolution) {
          dual_stop.mode = StopMode::Residual;
        }
        const Vector p = project_monotone_nonneg(*ws, z, dual_stop);
        if (mono_flags.json) {
          std::cout << nlohmann::json{{"projection",
                                       std::vector<double>(p.data(),
                                                           p.data() + p.size())}}
                           .dump(2)
                    << '\n';
        } else {
          std::cout << "projection=" << join_vector(p) << '\n';
        }
        return kExitOk;
      }
      const SolveReport report = picard2_monotone(
          *ws, z, Vector::Zero(z.size()), stop, known,
          solve_options(mono_flags), mono_explicit);
      if (mono_flags.json) {
        std::cout << to_json(report).dump(2) << '\n';
      } else {
        std::cout << to_key_value(report);
      }
      return report.status == SolveStatus::Converged ? kExitOk
                                                     : kExitNumerical;
    }
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return exit_code_for(e.code());
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitUsage;
  }
  return kExitUsage;
}
