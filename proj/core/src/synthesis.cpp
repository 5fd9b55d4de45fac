#include "geosocial/synthesis.hpp"

#include "geosocial/error.hpp"
#include "geosocial/graph.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <cmath>

namespace geosocial {

namespace {

Eigen::Index idx(std::size_t i) { return static_cast<Eigen::Index>(i); }

using IndexPair = std::pair<std::size_t, std::size_t>;

// Moves a uniform `count`-subset of `pool` to its front (partial Fisher-Yates).
void choose_front(std::vector<IndexPair>& pool, std::size_t count, std::mt19937_64& rng) {
  for (std::size_t i = 0; i < count; ++i) {
    std::uniform_int_distribution<std::size_t> pick(i, pool.size() - 1);
    std::swap(pool[i], pool[pick(rng)]);
  }
}

void check_binary(const SymmetricMatrix& m, const char* what) {
  for (std::size_t i = 0; i < m.size(); ++i) {
    if (m(i, i) != 1.0) throw ConfigError(std::string(what) + " must have a unit diagonal");
    for (std::size_t j = i + 1; j < m.size(); ++j) {
      if (m(i, j) != 0.0 && m(i, j) != 1.0) throw ConfigError(std::string(what) + " must be 0/1");
    }
  }
}

}  // namespace

NoiseParams::NoiseParams(double p, double q) : p_(p), q_(q) {
  if (!(p >= 0.0 && p <= 1.0) || !(q >= 0.0 && q <= 1.0)) {
    throw ConfigError("noise fractions p and q must lie in [0, 1]");
  }
}

SynthConfig lattice_config(std::size_t gangs, std::size_t size, double spread, double separation,
                           RunSeed seed) {
  if (gangs == 0) throw ConfigError("at least one gang is required");
  SynthConfig cfg;
  cfg.seed = seed;
  const auto side = static_cast<std::size_t>(std::ceil(std::sqrt(static_cast<double>(gangs))));
  for (std::size_t g = 0; g < gangs; ++g) {
    cfg.sizes.push_back(size);
    cfg.centers.push_back({static_cast<double>(g % side) * separation * spread,
                           static_cast<double>(g / side) * separation * spread});
    cfg.spread.push_back(spread);
  }
  return cfg;
}

SymmetricMatrix gt_matrix(const Partition& truth) {
  validate_partition(truth, truth.size());
  return SymmetricMatrix::generate(truth.size(), [&](std::size_t i, std::size_t j) {
    return truth.assign[i] == truth.assign[j] ? 1.0 : 0.0;
  });
}

std::size_t round_half_up(double x) { return static_cast<std::size_t>(std::floor(x + 0.5)); }

SymmetricMatrix degrade(const SymmetricMatrix& gt, const NoiseParams& noise, const RunSeed& seed,
                        DegradeCounts* counts) {
  check_binary(gt, "ground-truth matrix");
  std::vector<IndexPair> ones;
  std::vector<IndexPair> zeros;
  for (std::size_t i = 0; i < gt.size(); ++i) {
    for (std::size_t j = i + 1; j < gt.size(); ++j) (gt(i, j) == 1.0 ? ones : zeros).emplace_back(i, j);
  }
  auto rng = seed.engine();

  const std::size_t truth_links = ones.size();
  const std::size_t dropped =
      std::min(truth_links, round_half_up((1.0 - noise.p()) * static_cast<double>(truth_links)));
  choose_front(ones, dropped, rng);
  ones.erase(ones.begin(), ones.begin() + static_cast<std::ptrdiff_t>(dropped));

  const std::size_t swapped =
      std::min(ones.size(), round_half_up(noise.q() * static_cast<double>(ones.size())));
  if (swapped > zeros.size()) {
    throw InfeasibleNoiseError("q stage needs " + std::to_string(swapped) +
                               " false links but only " + std::to_string(zeros.size()) +
                               " zero pairs exist");
  }
  choose_front(ones, swapped, rng);
  choose_front(zeros, swapped, rng);

  Eigen::MatrixXd out = Eigen::MatrixXd::Identity(idx(gt.size()), idx(gt.size()));
  auto set = [&](const IndexPair& e) {
    out(idx(e.first), idx(e.second)) = 1.0;
    out(idx(e.second), idx(e.first)) = 1.0;
  };
  for (std::size_t t = swapped; t < ones.size(); ++t) set(ones[t]);
  for (std::size_t t = 0; t < swapped; ++t) set(zeros[t]);

  if (counts) {
    *counts = {truth_links, ones.size(), swapped, ones.size() - swapped};
  }
  return SymmetricMatrix(std::move(out));
}

Roster synth_roster(const SynthConfig& cfg) {
  const std::size_t g = cfg.gangs();
  if (g == 0) throw ConfigError("synthetic roster needs at least one gang");
  if (cfg.centers.size() != g || cfg.spread.size() != g) {
    throw DimensionError("sizes, centers and spread must have one entry per gang");
  }
  for (std::size_t s = 0; s < g; ++s) {
    if (cfg.sizes[s] < 2) throw ConfigError("every gang needs at least two members");
    if (!(cfg.spread[s] > 0.0)) throw ConfigError("spread must be positive");
  }
  const int gang_digits = std::max(2, static_cast<int>(std::to_string(g - 1).size()));
  auto rng = cfg.seed.engine();
  std::vector<Individual> people;
  std::size_t serial = 0;
  for (std::size_t s = 0; s < g; ++s) {
    std::normal_distribution<double> nx(cfg.centers[s].x, cfg.spread[s]);
    std::normal_distribution<double> ny(cfg.centers[s].y, cfg.spread[s]);
    const std::string gang = fmt::format("gang{:0{}}", s, gang_digits);
    for (std::size_t m = 0; m < cfg.sizes[s]; ++m) {
      std::string id = fmt::format("p{:05}", serial++);
      const double x = nx(rng);
      const double y = ny(rng);
      people.push_back({std::move(id), x, y, gang});
    }
  }
  return Roster(std::move(people));
}

SparsityReport sparsity_report(const SymmetricMatrix& observed, const SymmetricMatrix& gt) {
  if (observed.size() != gt.size()) throw DimensionError("A and GT differ in size");
  check_binary(observed, "observed matrix");
  check_binary(gt, "ground-truth matrix");
  SparsityReport r;
  r.n = gt.size();
  std::size_t truth_zeros = 0;
  std::size_t zero_zero = 0;
  std::size_t observed_zeros = 0;
  std::size_t missed = 0;
  std::vector<std::size_t> degree(r.n, 0);
  for (std::size_t i = 0; i < r.n; ++i) {
    for (std::size_t j = i + 1; j < r.n; ++j) {
      const bool a = observed(i, j) == 1.0;
      const bool t = gt(i, j) == 1.0;
      r.truth_links += t;
      r.observed_links += a;
      r.true_positives += a && t;
      truth_zeros += !t;
      zero_zero += !a && !t;
      observed_zeros += !a;
      missed += !a && t;
      if (a) {
        ++degree[i];
        ++degree[j];
      }
    }
  }
  auto ratio = [](std::size_t num, std::size_t den) {
    return den == 0 ? 0.0 : static_cast<double>(num) / static_cast<double>(den);
  };
  r.recall = ratio(r.true_positives, r.truth_links);
  r.false_positive_rate = ratio(r.observed_links - r.true_positives, r.observed_links);
  r.true_negative_rate = ratio(zero_zero, truth_zeros);
  r.false_negative_share = ratio(missed, observed_zeros);
  if (r.n > 0) {
    double sum = 0.0;
    for (std::size_t d : degree) sum += static_cast<double>(d);
    r.mean_degree = sum / static_cast<double>(r.n);
    double ss = 0.0;
    for (std::size_t d : degree) ss += (static_cast<double>(d) - r.mean_degree) * (static_cast<double>(d) - r.mean_degree);
    r.degree_std = std::sqrt(ss / static_cast<double>(r.n));
    r.max_degree = *std::max_element(degree.begin(), degree.end());
    r.isolated = static_cast<std::size_t>(std::count(degree.begin(), degree.end(), std::size_t{0}));
  }
  return r;
}

}  // namespace geosocial
