#include "simplicone/problem_gen.hpp"

#include <cmath>
#include <fstream>
#include <iomanip>
#include <sstream>

#include <Eigen/SVD>
#include <nlohmann/json.hpp>

#include "simplicone/error.hpp"
#include "simplicone/io.hpp"
#include "simplicone/monotone.hpp"
#include "simplicone/parallel.hpp"

namespace simplicone {

std::string_view to_string(Family family) {
  switch (family) {
    case Family::ConformingSvd: return "conforming";
    case Family::MonotoneCone: return "monotone";
    case Family::RawRandom: return "raw";
  }
  return "unknown";
}

std::optional<Family> parse_family(std::string_view name) {
  for (auto f :
       {Family::ConformingSvd, Family::MonotoneCone, Family::RawRandom}) {
    if (to_string(f) == name) return f;
  }
  return std::nullopt;
}

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ULL;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
  return x ^ (x >> 31);
}

std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t index) {
  return splitmix64(seed + 0x9E3779B97F4A7C15ULL * (index + 1));
}

double Rng::canonical() {
  return static_cast<double>(engine_() >> 11) * 0x1.0p-53;
}

double Rng::uniform(double lo, double hi) {
  return lo + (hi - lo) * canonical();
}

double Rng::uniform_open(double lo, double hi) {
  double u = 0.0;
  do {
    u = canonical();
  } while (u == 0.0);
  return lo + (hi - lo) * u;
}

Vector Rng::uniform_vector(Index n, double lo, double hi) {
  Vector v(n);
  for (Index i = 0; i < n; ++i) v(i) = uniform(lo, hi);
  return v;
}

Matrix Rng::uniform_matrix(Index rows, Index cols, double lo, double hi) {
  Matrix a(rows, cols);
  // Row-major fill order is part of the determinism contract.
  for (Index i = 0; i < rows; ++i) {
    for (Index j = 0; j < cols; ++j) a(i, j) = uniform(lo, hi);
  }
  return a;
}

namespace {

void validate(const GenConfig& cfg) {
  if (cfg.dim < 1) {
    throw Error(ErrorCode::InvalidArgument, "dimension must be >= 1");
  }
  if (!(cfg.range_lo < cfg.range_hi)) {
    throw Error(ErrorCode::InvalidArgument, "value range must be nonempty");
  }
}

}  // namespace

GeneratedMatrix gen_conforming_matrix(const GenConfig& cfg) {
  validate(cfg);
  Rng rng(cfg.seed);
  GeneratedMatrix out;
  out.b = rng.uniform_open(0.0, 1.0 / 3.0);
  out.b_bar = rng.uniform_open(0.0, out.b);
  const Matrix raw =
      rng.uniform_matrix(cfg.dim, cfg.dim, cfg.range_lo, cfg.range_hi);

  Eigen::BDCSVD<Matrix> svd(raw, Eigen::ComputeFullU | Eigen::ComputeFullV);
  const Vector& sigma = svd.singularValues();
  const double nu = sigma(0);
  if (!(nu > 0.0)) {
    throw Error(ErrorCode::DegenerateSvd, "largest singular value is zero");
  }
  const Vector scale =
      (Vector::Ones(cfg.dim) + (out.b_bar / nu) * sigma).cwiseSqrt();
  out.generator =
      svd.matrixU() * scale.asDiagonal() * svd.matrixV().transpose();
  return out;
}

GeneratedMatrix gen_matrix(const GenConfig& cfg) {
  validate(cfg);
  switch (cfg.family) {
    case Family::ConformingSvd:
      return gen_conforming_matrix(cfg);
    case Family::MonotoneCone:
      return {monotone_generator(cfg.dim), 0.0, 0.0};
    case Family::RawRandom: {
      Rng rng(cfg.seed);
      return {rng.uniform_matrix(cfg.dim, cfg.dim, cfg.range_lo, cfg.range_hi),
              0.0, 0.0};
    }
  }
  throw Error(ErrorCode::InvalidArgument, "unknown family");
}

ProjectionProblem gen_problem(const GenConfig& cfg,
                              std::shared_ptr<const SimplicialCone> cone) {
  validate(cfg);
  if (!cone || cone->dim() != cfg.dim) {
    throw Error(ErrorCode::DimensionMismatch,
                "gen_problem: cone dimension does not match config");
  }
  // Separate stream from the matrix draw.
  Rng rng(splitmix64(cfg.seed ^ 1ULL));
  Vector u = rng.uniform_vector(cfg.dim, cfg.range_lo, cfg.range_hi);
  Vector x0 = rng.uniform_vector(cfg.dim, cfg.range_lo, cfg.range_hi);
  Vector z = cone->apply(positive_part(u)) -
             cone->solve_transpose(negative_part(u));
  return make_problem(std::move(cone), std::move(z), std::move(x0),
                      std::move(u));
}

Instance gen_instance(const GenConfig& cfg, std::size_t index) {
  GenConfig sub = cfg;
  sub.seed = mix_seed(cfg.seed, index);
  GeneratedMatrix gm = gen_matrix(sub);
  auto cone = make_shared_cone(gm.generator);

  Instance inst;
  std::ostringstream id;
  id << to_string(cfg.family) << "-m" << cfg.dim << "-p" << std::setw(4)
     << std::setfill('0') << index;
  inst.id = id.str();
  inst.config = sub;
  inst.set_seed = cfg.seed;
  inst.index = index;
  inst.b = gm.b;
  inst.b_bar = gm.b_bar;
  inst.problem = gen_problem(sub, std::move(cone));
  return inst;
}

std::vector<Instance> gen_experiment_set(const GenConfig& cfg,
                                         std::size_t count, unsigned threads) {
  if (count < 1) {
    throw Error(ErrorCode::InvalidArgument, "count must be >= 1");
  }
  if (threads == 0) threads = worker_threads();
  std::vector<Instance> set(count);
  parallel_for(count, threads,
               [&](std::size_t i) { set[i] = gen_instance(cfg, i); });
  return set;
}

void write_instance_dir(const std::filesystem::path& dir,
                        const Instance& inst) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) throw Error(ErrorCode::Io, "cannot create " + dir.string());
  const ProjectionProblem& prob = inst.problem;
  write_matrix_file(dir / "A.mat", prob.cone->generator());
  write_vector_file(dir / "z.vec", prob.target);
  if (prob.known_solution) write_vector_file(dir / "u.vec", *prob.known_solution);
  write_vector_file(dir / "x0.vec", prob.start);

  nlohmann::ordered_json meta;
  meta["schema_version"] = 1;
  meta["id"] = inst.id;
  meta["family"] = to_string(inst.config.family);
  meta["dim"] = inst.config.dim;
  meta["set_seed"] = inst.set_seed;
  meta["index"] = inst.index;
  meta["seed"] = inst.config.seed;
  meta["range"] = {inst.config.range_lo, inst.config.range_hi};
  meta["b"] = inst.b;
  meta["b_bar"] = inst.b_bar;
  std::ofstream out(dir / "meta.json");
  if (!out) throw Error(ErrorCode::Io, "cannot write meta.json");
  out << meta.dump(2) << '\n';
}

Instance read_instance_dir(const std::filesystem::path& dir) {
  Instance inst;
  const std::filesystem::path meta_path = dir / "meta.json";
  if (std::filesystem::exists(meta_path)) {
    std::ifstream in(meta_path);
    nlohmann::json meta;
    try {
      meta = nlohmann::json::parse(in);
      inst.id = meta.value("id", std::string());
      if (auto f = parse_family(meta.value("family", std::string()))) {
        inst.config.family = *f;
      }
      inst.config.dim = meta.value("dim", Index{0});
      inst.config.seed = meta.value("seed", std::uint64_t{0});
      inst.set_seed = meta.value("set_seed", std::uint64_t{0});
      inst.index = meta.value("index", std::size_t{0});
      inst.b = meta.value("b", 0.0);
      inst.b_bar = meta.value("b_bar", 0.0);
    } catch (const nlohmann::json::exception& e) {
      throw Error(ErrorCode::Parse, "meta.json: " + std::string(e.what()));
    }
  }
  auto cone = make_shared_cone(read_matrix_file(dir / "A.mat"));
  Vector z = read_vector_file(dir / "z.vec");
  std::optional<Vector> x0;
  std::optional<Vector> u;
  if (std::filesystem::exists(dir / "x0.vec")) {
    x0 = read_vector_file(dir / "x0.vec");
  }
  if (std::filesystem::exists(dir / "u.vec")) {
    u = read_vector_file(dir / "u.vec");
  }
  inst.config.dim = cone->dim();
  if (inst.id.empty()) inst.id = dir.filename().string();
  inst.problem = make_problem(std::move(cone), std::move(z), std::move(x0),
                              std::move(u));
  return inst;
}

}  // namespace simplicone
