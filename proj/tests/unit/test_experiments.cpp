#include <doctest.h>

#include "support/oracles.hpp"

#include <geosocial/error.hpp>
#include <geosocial/experiments.hpp>
#include <geosocial/io.hpp>
#include <geosocial/synthesis.hpp>

#include <json.hpp>

#include <cmath>
#include <random>

using namespace geosocial;

namespace {

struct Fixture {
  Roster roster;
  Partition truth;
  std::vector<Edge> edges;
};

Fixture fixture(std::size_t gangs, std::size_t size, double separation, double p, double q,
                std::uint64_t seed) {
  Fixture f;
  f.roster = synth_roster(lattice_config(gangs, size, 1000.0, separation, RunSeed(seed)));
  f.truth = partition_from_labels(f.roster);
  auto a = degrade(gt_matrix(f.truth), NoiseParams(p, q), RunSeed(seed).derive("edges"));
  f.edges = edges_from_matrix(a, f.roster);
  return f;
}

SweepSpec small_spec(std::uint64_t seed) {
  SweepSpec s;
  s.seed = RunSeed(seed);
  s.k = 4;
  s.runs = 3;
  s.alpha_grid = {0.0, 0.5, 1.0};
  return s;
}

}  // namespace

TEST_SUITE("experiments") {

TEST_CASE("default grids") {
  auto a = default_alpha_grid();
  REQUIRE(a.size() == 11);
  CHECK(a.front() == 0.0);
  CHECK(a.back() == 1.0);
  CHECK(a[3] == doctest::Approx(0.3));
  auto k = default_k_grid();
  CHECK(k.size() == 19);
  CHECK(k.front() == 5);
  CHECK(k.back() == 95);
  CHECK(default_q_grid() == std::vector<double>{0.0, 0.055, 0.11321});
}

TEST_CASE("reference line p star") {
  ReferenceAnchor anchor;
  CHECK(anchor.p_star(0.0) == doctest::Approx(423.0 / 15904.0));
  CHECK(anchor.p_star(0.11321) == doctest::Approx(423.0 / 15904.0 / (1 - 0.11321)));
  const double p = anchor.p_star(0.11321);
  DegradeCounts c;
  degrade(gt_matrix(oracle::blocks(oracle::anchor_group_sizes())), NoiseParams(p, 0.11321),
          RunSeed(1), &c);
  CHECK(c.true_positives == 423);
}

TEST_CASE("alpha sweep structure and reproducibility") {
  auto f = fixture(4, 15, 8.0, 0.3, 0.1, 1);
  auto spec = small_spec(5);
  auto r = alpha_sweep(f.roster, f.edges, spec);
  CHECK(r.experiment == "sweep-alpha");
  REQUIRE(r.rows.size() == 3);
  for (std::size_t i = 0; i < 3; ++i) {
    CHECK(r.rows[i].params[0].second == spec.alpha_grid[i]);
    CHECK_FALSE(r.rows[i].failure.has_value());
    CHECK(r.rows[i].runs.size() == 3);
    CHECK(r.rows[i].summary.at("purity").stddev >= 0.0);
  }
  auto again = alpha_sweep(f.roster, f.edges, spec);
  CHECK(to_csv(r) == to_csv(again));
  CHECK(to_json(r) == to_json(again));

  spec.workers = 1;
  CHECK(to_csv(alpha_sweep(f.roster, f.edges, spec)) == to_csv(r));
  spec.workers = 3;
  CHECK(to_csv(alpha_sweep(f.roster, f.edges, spec)) == to_csv(r));
}

TEST_CASE("single run gives zero std everywhere") {
  auto f = fixture(3, 12, 8.0, 0.5, 0.0, 2);
  auto spec = small_spec(6);
  spec.runs = 1;
  spec.extended_metrics = true;
  auto r = alpha_sweep(f.roster, f.edges, spec);
  for (const auto& row : r.rows) {
    for (const auto& [name, stat] : row.summary.stats) CHECK(stat.stddev == 0.0);
  }
}

TEST_CASE("alpha zero ignores the social input") {
  auto f = fixture(4, 12, 6.0, 0.4, 0.1, 3);
  auto other = f;
  other.edges = {};
  auto spec = small_spec(7);
  spec.alpha_grid = {0.0};
  spec.sigma = 2500.0;
  auto base = alpha_sweep(f.roster, f.edges, spec);
  CHECK(to_csv(base) == to_csv(alpha_sweep(other.roster, other.edges, spec)));
  for (auto kind : all_social_variants()) {
    spec.variant = kind;
    auto r = alpha_sweep(f.roster, f.edges, spec);
    CHECK(r.rows[0].summary.at("purity").mean == base.rows[0].summary.at("purity").mean);
  }
}

TEST_CASE("alpha sweep without links needs an explicit sigma") {
  auto f = fixture(2, 5, 8.0, 1.0, 0.0, 4);
  auto spec = small_spec(8);
  CHECK_THROWS_AS(alpha_sweep(f.roster, {}, spec), UndefinedError);
  spec.sigma = 1000.0;
  CHECK_NOTHROW(alpha_sweep(f.roster, {}, spec));
  spec.alpha_grid = {1.5};
  CHECK_THROWS_AS(alpha_sweep(f.roster, {}, spec), ConfigError);
}

TEST_CASE("ground-truth social recovers separated gangs") {
  auto f = fixture(6, 20, 8.0, 1.0, 0.0, 5);
  auto spec = small_spec(9);
  spec.k = 6;
  spec.runs = 5;
  spec.alpha_grid = {0.5};
  // Uniform row seeding stalls in Lloyd local minima on near-block embeddings.
  spec.kmeans.init = KMeansInit::PlusPlus;
  auto r = alpha_sweep(f.roster, f.edges, spec);
  CHECK(r.rows[0].summary.at("purity").mean >= 0.95);
}

TEST_CASE("pq sweep grid order, flat alpha zero line and anchor") {
  auto f = fixture(5, 14, 2.0, 1.0, 0.0, 6);
  SweepSpec spec = small_spec(10);
  spec.k = 5;
  spec.kmeans.init = KMeansInit::PlusPlus;
  spec.alpha_grid = {0.0, 0.8};
  spec.p_grid = {0.05, 1.0};
  spec.q_grid = {0.0, 0.1};
  spec.sigma = 2000.0;
  spec.anchor = ReferenceAnchor{};
  auto r = pq_sweep(f.roster, f.truth, spec);
  REQUIRE(r.rows.size() == 8);
  CHECK(r.param_names == std::vector<std::string>{"q", "alpha", "p"});
  CHECK(r.rows[0].params[0].second == 0.0);
  CHECK(r.rows[1].params[2].second == 1.0);
  CHECK(r.rows[2].params[1].second == 0.8);
  CHECK(r.rows[4].params[0].second == 0.1);
  REQUIRE(r.p_star.size() == 2);
  CHECK(r.p_star[1].second == doctest::Approx(423.0 / 15904.0 / 0.9));
  for (std::size_t qi = 0; qi < 2; ++qi) {
    const auto& lo = r.rows[qi * 4 + 0].summary.at("purity");
    const auto& hi = r.rows[qi * 4 + 1].summary.at("purity");
    CHECK(lo.mean == hi.mean);
    CHECK(lo.stddev == hi.stddev);
    // p = 1 beats p = 0.05 at alpha = 0.8.
    CHECK(r.rows[qi * 4 + 3].summary.at("purity").mean >= r.rows[qi * 4 + 2].summary.at("purity").mean);
  }
  CHECK(to_csv(r) == to_csv(pq_sweep(f.roster, f.truth, spec)));
}

TEST_CASE("pq sweep surfaces infeasible noise") {
  auto f = fixture(1, 6, 8.0, 1.0, 0.0, 7);
  SweepSpec spec = small_spec(11);
  spec.k = 2;
  spec.alpha_grid = {0.5};
  spec.p_grid = {1.0};
  spec.q_grid = {0.5};
  spec.sigma = 1000.0;
  CHECK_THROWS_AS(pq_sweep(f.roster, f.truth, spec), InfeasibleNoiseError);
}

TEST_CASE("k sweep peaks near the true gang count") {
  auto f = fixture(6, 15, 10.0, 1.0, 0.0, 8);
  SweepSpec spec = small_spec(12);
  spec.alpha_grid = {0.5};
  spec.k_grid = {2, 4, 6, 10, 20, 40};
  spec.runs = 5;
  auto r = k_sweep(f.roster, f.edges, spec);
  REQUIRE(r.rows.size() == 6);
  CHECK_FALSE(r.notes.empty());
  std::size_t best = 0;
  for (std::size_t i = 0; i < r.rows.size(); ++i) {
    if (r.rows[i].summary.at("z_rand").mean > r.rows[best].summary.at("z_rand").mean) best = i;
  }
  CHECK(spec.k_grid[best] == 6);
}

TEST_CASE("k sweep extremes leave z-Rand undefined") {
  auto f = fixture(3, 6, 8.0, 1.0, 0.0, 9);
  SweepSpec spec = small_spec(13);
  spec.alpha_grid = {0.5};
  spec.k_grid = {1, f.roster.size()};
  spec.runs = 2;
  auto r = k_sweep(f.roster, f.edges, spec);
  for (const auto& row : r.rows) {
    CHECK_FALSE(row.summary.at("z_rand").defined());
    CHECK(row.summary.at("z_rand").undefined == 2);
  }
  auto csv = to_csv(r);
  CHECK(csv.find("z_rand,NA,NA,0,2") != std::string::npos);
  spec.k_grid = {f.roster.size() + 1};
  CHECK_THROWS_AS(k_sweep(f.roster, f.edges, spec), ConfigError);
}

TEST_CASE("sweep csv and json layout") {
  auto f = fixture(3, 10, 8.0, 0.5, 0.0, 10);
  auto spec = small_spec(14);
  spec.k = 3;
  spec.extended_metrics = true;
  auto r = alpha_sweep(f.roster, f.edges, spec);
  auto csv = to_csv(r);
  CHECK(csv.rfind("# units:", 0) == 0);
  CHECK(csv.find("meters") != std::string::npos);
  CHECK(csv.find("feet") != std::string::npos);
  CHECK(csv.find("\nalpha,metric,mean,std,runs,undefined\n") != std::string::npos);
  for (const auto& name : metric_names(true)) CHECK(csv.find("," + name + ",") != std::string::npos);

  auto j = nlohmann::json::parse(to_json(r));
  CHECK(j["experiment"] == "sweep-alpha");
  CHECK(j["provenance"]["master_seed"] == 14);
  CHECK(j["rows"].size() == 3);
}

TEST_CASE("composition export") {
  Roster r({{"a", 0, 0, "g1"}, {"b", 2, 0, "g1"}, {"c", 10, 10, "g2"}, {"d", 12, 10, "g1"}});
  Partition p{3, {0, 0, 1, 1}};
  auto a = build_adjacency(r, {{"a", "b"}, {"b", "c"}, {"a", "d"}, {"c", "d"}});
  auto t = composition_export(p, r, a);
  REQUIRE(t.clusters.size() == 2);
  CHECK(t.clusters[0].size == 2);
  CHECK(t.clusters[0].histogram.size() == 1);
  CHECK(t.clusters[0].histogram.at("g1") == 2);
  CHECK(t.clusters[0].centroid.x == doctest::Approx(1.0));
  CHECK(t.clusters[1].histogram.size() == 2);
  CHECK(t.clusters[0].links.at(1) == 2);
  CHECK(t.clusters[1].links.at(0) == 2);
  CHECK(t.inter_cluster_links == 2);

  auto none = composition_export(p, r, SymmetricMatrix::identity(4));
  CHECK(none.inter_cluster_links == 0);

  std::mt19937_64 rng(3);
  std::bernoulli_distribution coin(0.2);
  auto f = fixture(4, 8, 4.0, 1.0, 0.0, 11);
  auto part = oracle::random_partition(f.roster.size(), 5, rng);
  std::vector<std::pair<std::size_t, std::size_t>> edges;
  for (std::size_t i = 0; i < f.roster.size(); ++i) {
    for (std::size_t j = i + 1; j < f.roster.size(); ++j) {
      if (coin(rng)) edges.emplace_back(i, j);
    }
  }
  auto adj = build_adjacency(f.roster.size(), edges);
  auto tab = composition_export(part, f.roster, adj);
  std::size_t crossing = 0;
  for (auto [i, j] : edges) crossing += part.assign[i] != part.assign[j];
  CHECK(tab.inter_cluster_links == crossing);
  for (const auto& c : tab.clusters) {
    for (const auto& [other, count] : c.links) {
      std::size_t brute = 0;
      for (auto [i, j] : edges) {
        brute += (part.assign[i] == c.index && part.assign[j] == other) ||
                 (part.assign[j] == c.index && part.assign[i] == other);
      }
      CHECK(count == brute);
    }
  }
  auto j = nlohmann::json::parse(to_json(tab));
  CHECK(j["clusters"].size() == tab.clusters.size());
}

TEST_CASE("eigenvector field export and csv round trip") {
  auto f = fixture(3, 10, 6.0, 1.0, 0.0, 12);
  auto w = build_affinity(gt_matrix(f.truth), build_distance_kernel(f.roster, KernelScale(3000.0)), 0.3);
  auto s = normalized_spectrum(w, 4);
  auto field = eigenvector_field_export(s, f.roster, {0, 1, 2, 3});
  const Eigen::VectorXd c0 = field.values.col(0);
  CHECK((c0.array() - c0.mean()).abs().maxCoeff() <= 1e-8 * std::abs(c0.mean()));
  for (std::size_t c = 0; c < 4; ++c) {
    CHECK(field.min[c] <= field.values.col(Eigen::Index(c)).minCoeff());
    CHECK(field.max[c] >= field.values.col(Eigen::Index(c)).maxCoeff());
  }
  auto csv = to_csv(field);
  CHECK(csv.find("id,x,y,v1,v2,v3,v4\n") != std::string::npos);
  CHECK(csv.find("feet") != std::string::npos);
  auto back = parse_field_csv(csv);
  REQUIRE(back.values.rows() == field.values.rows());
  for (Eigen::Index i = 0; i < field.values.rows(); ++i) {
    for (Eigen::Index c = 0; c < 4; ++c) {
      const double v = field.values(i, c);
      CHECK(std::abs(back.values(i, c) - v) <= 1e-12 * std::max(1e-300, std::abs(v)));
    }
    CHECK(back.points[std::size_t(i)].x == doctest::Approx(field.points[std::size_t(i)].x).epsilon(1e-12));
  }
  CHECK(back.ids == field.ids);
  CHECK_THROWS_AS(eigenvector_field_export(s, f.roster, {4}), RangeError);
}

}  // TEST_SUITE
