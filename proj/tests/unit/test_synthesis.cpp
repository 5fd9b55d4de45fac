#include <doctest.h>

#include "support/oracles.hpp"

#include <geosocial/error.hpp>
#include <geosocial/graph.hpp>
#include <geosocial/metrics.hpp>
#include <geosocial/spectral.hpp>
#include <geosocial/synthesis.hpp>

#include <cmath>
#include <numeric>
#include <random>

using namespace geosocial;

namespace {

using oracle::blocks;

std::size_t upper_ones(const SymmetricMatrix& m) { return upper_links(m).size(); }

}  // namespace

TEST_SUITE("synthesis") {

TEST_CASE("gt matrix") {
  Eigen::Matrix3d expect;
  expect << 1, 1, 0, 1, 1, 0, 0, 0, 1;
  CHECK(gt_matrix(Partition{2, {0, 0, 1}}).dense() == Eigen::MatrixXd(expect));
  CHECK(gt_matrix(Partition{1, {0, 0, 0, 0}}) == SymmetricMatrix::constant(4, 1.0));
}

TEST_CASE("gt matrix with 15904 intra-group pairs") {
  auto sizes = oracle::anchor_group_sizes();
  CHECK(sizes.size() == 31);
  CHECK(std::accumulate(sizes.begin(), sizes.end(), std::size_t{0}) == 748);
  CHECK(upper_ones(gt_matrix(blocks(sizes))) == 15904);
}

TEST_CASE("round half up") {
  CHECK(round_half_up(0.5) == 1);
  CHECK(round_half_up(1.49) == 1);
  CHECK(round_half_up(2.5) == 3);
  CHECK(round_half_up(0.0) == 0);
}

TEST_CASE("degrade identity and counts") {
  auto gt = gt_matrix(blocks({5, 5, 4, 6}));
  CHECK(degrade(gt, NoiseParams(1.0, 0.0), RunSeed(1)) == gt);

  // 100 upper ones: groups of 10, 10 and 5 give 45 + 45 + 10.
  auto gt100 = gt_matrix(blocks({10, 10, 5}));
  REQUIRE(upper_ones(gt100) == 100);
  DegradeCounts c;
  auto half = degrade(gt100, NoiseParams(0.5, 0.0), RunSeed(2), &c);
  CHECK(upper_ones(half) == 50);
  CHECK(c.kept == 50);
  CHECK(c.swapped == 0);
  for (auto [i, j] : upper_links(half)) CHECK(gt100(i, j) == 1.0);

  CHECK(upper_ones(degrade(gt100, NoiseParams(0.0, 0.0), RunSeed(2))) == 0);
  CHECK_THROWS_AS(NoiseParams(1.2, 0.0), ConfigError);
  CHECK_THROWS_AS(NoiseParams(0.5, -0.1), ConfigError);
}

TEST_CASE("degrade output structure and true positive identity") {
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int trial = 0; trial < 40; ++trial) {
    auto truth = oracle::random_partition(60, 4 + std::size_t(trial % 5), rng);
    auto gt = gt_matrix(truth);
    const double p = u(rng), q = u(rng) * 0.5;
    DegradeCounts c;
    auto a = degrade(gt, NoiseParams(p, q), RunSeed(std::uint64_t(trial)), &c);
    CHECK_NOTHROW(check_symmetric(a.dense()));
    for (Eigen::Index i = 0; i < a.dense().rows(); ++i) {
      CHECK(a.dense()(i, i) == 1.0);
      for (Eigen::Index j = 0; j < a.dense().cols(); ++j) {
        const double v = a.dense()(i, j);
        CHECK((v == 0.0 || v == 1.0));
      }
    }
    const double t = double(c.truth_links);
    const auto expect = double(round_half_up(t * p * (1.0 - q)));
    CHECK(std::abs(double(c.true_positives) - expect) <= 1.0);
    auto rep = sparsity_report(a, gt);
    CHECK(rep.true_positives == c.true_positives);
    CHECK(rep.observed_links == c.kept);
    CHECK(rep.observed_links - rep.true_positives == c.swapped);
    if (rep.truth_links > 0 && c.kept > 0) {
      CHECK(std::abs(rep.recall - p * (1 - q)) <= 1.0 / t + 1e-12);
      CHECK(std::abs(rep.false_positive_rate - q) <= 0.5 / double(c.kept) + 1e-12);
    }
  }
}

TEST_CASE("degrade is reproducible per stream") {
  auto gt = gt_matrix(blocks({20, 20, 20}));
  NoiseParams noise(0.4, 0.2);
  CHECK(degrade(gt, noise, RunSeed(9).derive(1)) == degrade(gt, noise, RunSeed(9).derive(1)));
  CHECK_FALSE(degrade(gt, noise, RunSeed(9).derive(1)) == degrade(gt, noise, RunSeed(9).derive(2)));
}

TEST_CASE("degrade reports infeasible swaps") {
  auto gt = gt_matrix(blocks({5}));
  CHECK_THROWS_AS(degrade(gt, NoiseParams(1.0, 0.5), RunSeed(1)), InfeasibleNoiseError);
  CHECK_NOTHROW(degrade(gt, NoiseParams(1.0, 0.0), RunSeed(1)));
}

TEST_CASE("degrade with the reference anchor") {
  auto sizes = oracle::anchor_group_sizes();
  auto gt = gt_matrix(blocks(sizes));
  REQUIRE(upper_ones(gt) == 15904);
  const double q = 0.11321;
  const double p = (423.0 / 15904.0) / (1.0 - q);
  DegradeCounts c;
  degrade(gt, NoiseParams(p, q), RunSeed(2013), &c);
  CHECK(c.true_positives == 423);
}

TEST_CASE("synthetic roster") {
  auto cfg = lattice_config(4, 25, 100.0, 10.0, RunSeed(3));
  auto r = synth_roster(cfg);
  CHECK(r.size() == 100);
  CHECK(r[0].id == "p00000");
  CHECK(r[99].gang == "gang03");
  CHECK(r.gangs().size() == 4);
  auto again = synth_roster(cfg);
  for (std::size_t i = 0; i < r.size(); ++i) {
    CHECK(r[i].x == again[i].x);
    CHECK(r[i].id == again[i].id);
  }
  // Group means within 4 spread / sqrt(size) of the centre.
  for (std::size_t g = 0; g < 4; ++g) {
    double sx = 0, sy = 0;
    for (std::size_t m = 0; m < 25; ++m) {
      sx += r[g * 25 + m].x;
      sy += r[g * 25 + m].y;
    }
    CHECK(std::abs(sx / 25 - cfg.centers[g].x) <= 4.0 * 100.0 / 5.0);
    CHECK(std::abs(sy / 25 - cfg.centers[g].y) <= 4.0 * 100.0 / 5.0);
  }

  auto tight = lattice_config(2, 5, 1e-9, 1e12, RunSeed(4));
  auto rt = synth_roster(tight);
  for (std::size_t i = 0; i < rt.size(); ++i) {
    CHECK(std::abs(rt[i].x - tight.centers[i / 5].x) < 1e-6);
    CHECK(std::abs(rt[i].y - tight.centers[i / 5].y) < 1e-6);
  }

  SynthConfig bad = lattice_config(2, 5, 1.0, 8.0, RunSeed(1));
  bad.sizes[0] = 1;
  CHECK_THROWS_AS(synth_roster(bad), ConfigError);
  bad = lattice_config(2, 5, 1.0, 8.0, RunSeed(1));
  bad.spread[1] = 0.0;
  CHECK_THROWS_AS(synth_roster(bad), ConfigError);
}

TEST_CASE("two far-apart groups are separated by geography alone") {
  int perfect = 0;
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    SynthConfig cfg;
    cfg.sizes = {10, 10};
    cfg.centers = {{0, 0}, {10000, 0}};
    cfg.spread = {1000, 1000};
    cfg.seed = RunSeed(seed);
    auto r = synth_roster(cfg);
    auto truth = partition_from_labels(r);
    auto w = build_affinity(SymmetricMatrix::identity(20), build_distance_kernel(r, KernelScale(2000.0)), 0.0);
    auto parts = cluster_pipeline(w, 2, 1, RunSeed(seed).derive("km"));
    perfect += purity(parts[0], truth) == 1.0;
  }
  CHECK(perfect >= 9);
}

TEST_CASE("sparsity report") {
  auto gt = gt_matrix(blocks({3, 3}));
  auto same = sparsity_report(gt, gt);
  CHECK(same.recall == 1.0);
  CHECK(same.false_positive_rate == 0.0);
  CHECK(same.true_negative_rate == 1.0);

  auto id = sparsity_report(SymmetricMatrix::identity(6), gt);
  CHECK(id.recall == 0.0);
  CHECK(id.mean_degree == 0.0);
  CHECK(id.isolated == 6);
  CHECK(id.max_degree == 0);

  std::mt19937_64 rng(5);
  std::bernoulli_distribution coin(0.3);
  for (int trial = 0; trial < 10; ++trial) {
    const std::size_t n = 15;
    auto gtr = gt_matrix(oracle::random_partition(n, 4, rng));
    std::vector<std::pair<std::size_t, std::size_t>> edges;
    for (std::size_t i = 0; i < n; ++i) {
      for (std::size_t j = i + 1; j < n; ++j) {
        if (coin(rng)) edges.emplace_back(i, j);
      }
    }
    auto a = build_adjacency(n, edges);
    double tp = 0, t1 = 0, a1 = 0, tn = 0, t0 = 0, a0 = 0, fn = 0;
    std::vector<double> deg(n, 0);
    for (std::size_t i = 0; i < n; ++i) {
      for (std::size_t j = 0; j < n; ++j) {
        if (i == j) continue;
        deg[i] += a(i, j);
        if (j < i) continue;
        t1 += gtr(i, j);
        a1 += a(i, j);
        tp += gtr(i, j) * a(i, j);
        t0 += 1 - gtr(i, j);
        a0 += 1 - a(i, j);
        tn += (1 - gtr(i, j)) * (1 - a(i, j));
        fn += gtr(i, j) * (1 - a(i, j));
      }
    }
    auto rep = sparsity_report(a, gtr);
    CHECK(rep.recall == doctest::Approx(t1 ? tp / t1 : 0.0));
    CHECK(rep.false_positive_rate == doctest::Approx(a1 ? (a1 - tp) / a1 : 0.0));
    CHECK(rep.true_negative_rate == doctest::Approx(t0 ? tn / t0 : 0.0));
    CHECK(rep.false_negative_share == doctest::Approx(a0 ? fn / a0 : 0.0));
    double mean = 0;
    for (double d : deg) mean += d / double(n);
    CHECK(rep.mean_degree == doctest::Approx(mean));
    CHECK(rep.max_degree == std::size_t(*std::max_element(deg.begin(), deg.end())));
    CHECK(rep.isolated == std::size_t(std::count(deg.begin(), deg.end(), 0.0)));
  }
}

}  // TEST_SUITE
