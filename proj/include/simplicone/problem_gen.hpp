#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <random>
#include <string>
#include <string_view>
#include <vector>

#include "simplicone/cone.hpp"
#include "simplicone/types.hpp"

namespace simplicone {

enum class Family { ConformingSvd, MonotoneCone, RawRandom };

std::string_view to_string(Family family);
std::optional<Family> parse_family(std::string_view name);

struct GenConfig {
  Index dim = 1;
  std::uint64_t seed = 0;
  double range_lo = -1e6;
  double range_hi = 1e6;
  Family family = Family::ConformingSvd;
};

// splitmix64 finaliser.
std::uint64_t splitmix64(std::uint64_t x);
// Sub-seed of problem i: splitmix64(seed + 0x9E3779B97F4A7C15 * (i + 1)).
std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t index);

/// Deterministic uniform doubles from std::mt19937_64. The mapping from raw
/// 64-bit outputs to doubles is fixed here (top 53 bits), so streams are
/// bit-identical across standard library implementations.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}
  // [0, 1)
  double canonical();
  // [lo, hi)
  double uniform(double lo, double hi);
  // (lo, hi): redraws the endpoint lo.
  double uniform_open(double lo, double hi);
  Vector uniform_vector(Index n, double lo, double hi);
  Matrix uniform_matrix(Index rows, Index cols, double lo, double hi);

 private:
  std::mt19937_64 engine_;
};

struct GeneratedMatrix {
  Matrix generator;
  double b = 0.0;      // drawn from (0, 1/3)
  double b_bar = 0.0;  // drawn from (0, b); equals ||A^T A - I||
};

// A = S sqrt(I + (b_bar / nu) V) D from the SVD S V D of a uniform random
// matrix, nu its largest singular value. Throws Error{DegenerateSvd} if nu = 0.
GeneratedMatrix gen_conforming_matrix(const GenConfig& cfg);

// Generator for any family (RawRandom: uniform entries from the range).
GeneratedMatrix gen_matrix(const GenConfig& cfg);

// Known solution u and start x0 uniform from the range; z = A u^+ - (A^T)^{-1} u^-.
ProjectionProblem gen_problem(const GenConfig& cfg,
                              std::shared_ptr<const SimplicialCone> cone);

struct Instance {
  std::string id;
  GenConfig config;  // seed here is the per-instance sub-seed
  std::uint64_t set_seed = 0;
  std::size_t index = 0;
  double b = 0.0;
  double b_bar = 0.0;
  ProjectionProblem problem;
};

Instance gen_instance(const GenConfig& cfg, std::size_t index);

// Problem i uses sub-seed mix_seed(cfg.seed, i). `threads == 0` reads
// SIMPLICONE_THREADS.
std::vector<Instance> gen_experiment_set(const GenConfig& cfg,
                                         std::size_t count,
                                         unsigned threads = 0);

// Directory with A.mat, z.vec, u.vec, x0.vec and meta.json.
void write_instance_dir(const std::filesystem::path& dir,
                        const Instance& inst);
Instance read_instance_dir(const std::filesystem::path& dir);

}  // namespace simplicone
