#include "geosocial/metrics.hpp"

#include "geosocial/error.hpp"
#include "geosocial/transport.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace geosocial {

namespace {

Eigen::Index idx(std::size_t i) { return static_cast<Eigen::Index>(i); }

void check_same_size(const Partition& p, const Partition& truth) {
  validate_partition(p, p.assign.size());
  validate_partition(truth, p.assign.size());
}

std::int64_t choose2(std::int64_t n) { return n * (n - 1) / 2; }

// Falling factorial (n)_r in long double.
long double falling(long double n, int r) {
  long double out = 1.0L;
  for (int i = 0; i < r; ++i) out *= (n - i);
  return out;
}

struct SizeMoments {
  long double pairs = 0.0L;     // sum C(n_a, 2)
  long double triples = 0.0L;   // sum (n_a)_3
  long double ordered2sq = 0.0L;  // sum ((n_a)_2)^2
  long double ordered4 = 0.0L;    // sum (n_a)_4
};

SizeMoments size_moments(const std::vector<std::size_t>& sizes) {
  SizeMoments s;
  for (std::size_t raw : sizes) {
    const auto n = static_cast<long double>(raw);
    s.pairs += falling(n, 2) / 2.0L;
    s.triples += falling(n, 3);
    s.ordered2sq += falling(n, 2) * falling(n, 2);
    s.ordered4 += falling(n, 4);
  }
  return s;
}

bool trivial(const std::vector<std::size_t>& sizes, std::size_t n) {
  const bool all_singletons =
      std::all_of(sizes.begin(), sizes.end(), [](std::size_t s) { return s <= 1; });
  const bool one_cluster =
      std::any_of(sizes.begin(), sizes.end(), [n](std::size_t s) { return s == n; });
  return all_singletons || one_cluster;
}

}  // namespace

Eigen::MatrixXd contingency(const Partition& p, const Partition& truth) {
  check_same_size(p, truth);
  Eigen::MatrixXd table = Eigen::MatrixXd::Zero(idx(p.k), idx(truth.k));
  for (std::size_t i = 0; i < p.size(); ++i) table(idx(p.assign[i]), idx(truth.assign[i])) += 1.0;
  return table;
}

double purity(const Partition& p, const Partition& truth) {
  const Eigen::MatrixXd table = contingency(p, truth);
  if (p.size() == 0) throw UndefinedError("purity of an empty partition");
  double correct = 0.0;
  for (Eigen::Index a = 0; a < table.rows(); ++a) correct += table.row(a).maxCoeff();
  return correct / static_cast<double>(p.size());
}

PairCounts pair_counts(const Partition& p, const Partition& truth) {
  check_same_size(p, truth);
  std::vector<std::int64_t> rows(p.k, 0);
  std::vector<std::int64_t> cols(truth.k, 0);
  std::map<std::pair<std::size_t, std::size_t>, std::int64_t> cells;
  for (std::size_t i = 0; i < p.size(); ++i) {
    ++rows[p.assign[i]];
    ++cols[truth.assign[i]];
    ++cells[{p.assign[i], truth.assign[i]}];
  }
  PairCounts w;
  std::int64_t same_p = 0;
  std::int64_t same_truth = 0;
  for (const auto& [key, count] : cells) w.w11 += choose2(count);
  for (std::int64_t r : rows) same_p += choose2(r);
  for (std::int64_t c : cols) same_truth += choose2(c);
  w.w10 = same_p - w.w11;
  w.w01 = same_truth - w.w11;
  w.w00 = choose2(static_cast<std::int64_t>(p.size())) - w.w11 - w.w10 - w.w01;
  return w;
}

ZRandMoments z_rand_moments(const Partition& p, const Partition& truth) {
  check_same_size(p, truth);
  const auto n = static_cast<long double>(p.size());
  const SizeMoments a = size_moments(p.cluster_sizes());
  const SizeMoments b = size_moments(truth.cluster_sizes());
  const long double total_pairs = falling(n, 2) / 2.0L;

  ZRandMoments out;
  if (total_pairs == 0.0L) return out;
  const long double mean = a.pairs * b.pairs / total_pairs;

  // E[w11^2] over ordered pairs of p-linked pairs, split by how many individuals
  // the two pairs share: both (the same pair), exactly one, or none.
  auto disjoint_both_linked = [](const SizeMoments& s) {
    return 4.0L * s.pairs * s.pairs - s.ordered2sq + s.ordered4;
  };
  long double second = a.pairs * b.pairs / total_pairs;
  if (n >= 3) second += a.triples * b.triples / falling(n, 3);
  if (n >= 4) {
    // Number of ordered disjoint linked pair-pairs in p is disjoint_both_linked(a) / 4.
    second += disjoint_both_linked(a) / 4.0L * disjoint_both_linked(b) / falling(n, 4);
  }
  out.mean = static_cast<double>(mean);
  out.variance = static_cast<double>(std::max(0.0L, second - mean * mean));
  return out;
}

double z_rand(const Partition& p, const Partition& truth) {
  check_same_size(p, truth);
  if (trivial(p.cluster_sizes(), p.size()) || trivial(truth.cluster_sizes(), truth.size())) {
    throw UndefinedError(
        "z-Rand undefined: a partition is all singletons or a single cluster");
  }
  const ZRandMoments m = z_rand_moments(p, truth);
  if (!(m.variance > 0.0)) throw UndefinedError("z-Rand undefined: zero null variance");
  const double w11 = static_cast<double>(pair_counts(p, truth).w11);
  return (w11 - m.mean) / std::sqrt(m.variance);
}

double ingroup_homogeneity(const Partition& p, const Partition& truth, bool scaled) {
  const Eigen::MatrixXd table = contingency(p, truth);
  double weighted = 0.0;
  double weights = 0.0;
  for (Eigen::Index a = 0; a < table.rows(); ++a) {
    const double size = table.row(a).sum();
    if (size < 2.0) continue;
    double same = 0.0;
    for (Eigen::Index g = 0; g < table.cols(); ++g) same += table(a, g) * (table(a, g) - 1.0) / 2.0;
    const double w = scaled ? size : 1.0;
    weighted += w * same / (size * (size - 1.0) / 2.0);
    weights += w;
  }
  if (weights == 0.0) throw UndefinedError("ingroup homogeneity undefined: no cluster of size >= 2");
  return weighted / weights;
}

double outgroup_heterogeneity(const Partition& p, const Partition& truth, bool scaled) {
  const Eigen::MatrixXd table = contingency(p, truth);
  std::vector<Eigen::Index> nonempty;
  for (Eigen::Index a = 0; a < table.rows(); ++a) {
    if (table.row(a).sum() > 0.0) nonempty.push_back(a);
  }
  if (nonempty.size() < 2) {
    throw UndefinedError("outgroup heterogeneity undefined: fewer than two clusters");
  }
  double weighted = 0.0;
  double weights = 0.0;
  for (std::size_t s = 0; s < nonempty.size(); ++s) {
    const Eigen::Index a = nonempty[s];
    const double na = table.row(a).sum();
    for (std::size_t t = s + 1; t < nonempty.size(); ++t) {
      const Eigen::Index b = nonempty[t];
      const double nb = table.row(b).sum();
      const double same = table.row(a).dot(table.row(b)) / (na * nb);
      const double w = scaled ? na * nb : 1.0;
      weighted += w * (1.0 - same);
      weights += w;
    }
  }
  return weighted / weights;
}

std::vector<Point> centroids(const Partition& p, const Roster& roster) {
  validate_partition(p, roster.size());
  std::vector<double> sx(p.k, 0.0);
  std::vector<double> sy(p.k, 0.0);
  std::vector<std::size_t> count(p.k, 0);
  for (std::size_t i = 0; i < roster.size(); ++i) {
    sx[p.assign[i]] += roster[i].x;
    sy[p.assign[i]] += roster[i].y;
    ++count[p.assign[i]];
  }
  std::vector<Point> out;
  for (std::size_t c = 0; c < p.k; ++c) {
    if (count[c] == 0) continue;
    out.push_back({sx[c] / double(count[c]), sy[c] / double(count[c])});
  }
  return out;
}

CentroidDistances hausdorff_and_mean(const std::vector<Point>& pc, const std::vector<Point>& gc) {
  if (pc.empty() || gc.empty()) throw UndefinedError("centroid distance of an empty set");
  CentroidDistances out;
  double sum = 0.0;
  auto sweep = [&](const std::vector<Point>& from, const std::vector<Point>& to) {
    for (const Point& a : from) {
      double nearest = std::numeric_limits<double>::infinity();
      for (const Point& b : to) nearest = std::min(nearest, distance(a, b));
      out.hausdorff = std::max(out.hausdorff, nearest);
      sum += nearest;
    }
  };
  sweep(pc, gc);
  sweep(gc, pc);
  out.mean = sum / static_cast<double>(pc.size() + gc.size());
  return out;
}

double cluster_distance(const Partition& p, const Partition& truth, const Roster& roster) {
  check_same_size(p, truth);
  if (p.size() != roster.size()) throw DimensionError("partition does not match roster");
  if (p.size() == 0) throw UndefinedError("cluster distance of empty partitions");

  auto members = [&](const Partition& part) {
    std::vector<std::vector<Point>> out(part.k);
    for (std::size_t i = 0; i < part.size(); ++i) out[part.assign[i]].push_back(roster.point(i));
    std::erase_if(out, [](const auto& v) { return v.empty(); });
    return out;
  };
  const auto left = members(p);
  const auto right = members(truth);

  Eigen::MatrixXd ground(idx(left.size()), idx(right.size()));
  std::vector<std::int64_t> supply;
  std::vector<std::int64_t> demand;
  for (const auto& c : left) supply.push_back(static_cast<std::int64_t>(c.size()));
  for (const auto& c : right) demand.push_back(static_cast<std::int64_t>(c.size()));
  double naive = 0.0;
  for (std::size_t a = 0; a < left.size(); ++a) {
    for (std::size_t b = 0; b < right.size(); ++b) {
      const double d = point_set_emd(left[a], right[b]);
      ground(idx(a), idx(b)) = d;
      naive += static_cast<double>(supply[a]) * static_cast<double>(demand[b]) * d;
    }
  }
  const double n = static_cast<double>(p.size());
  naive /= n * n;
  if (naive <= 0.0) return 0.0;
  const double optimal = solve_transport(supply, demand, ground).cost / n;
  return std::clamp(optimal / naive, 0.0, 1.0);
}

MetricSummary summarize(const std::vector<MetricValues>& runs) {
  MetricSummary out;
  for (const auto& run : runs) {
    for (const auto& [name, value] : run) {
      MetricStat& s = out.stats[name];
      if (value) {
        ++s.runs;
      } else {
        ++s.undefined;
      }
    }
  }
  for (auto& [name, s] : out.stats) {
    if (s.runs == 0) continue;
    double sum = 0.0;
    for (const auto& run : runs) {
      auto it = run.find(name);
      if (it != run.end() && it->second) sum += *it->second;
    }
    s.mean = sum / static_cast<double>(s.runs);
    if (s.runs > 1) {
      double ss = 0.0;
      for (const auto& run : runs) {
        auto it = run.find(name);
        if (it != run.end() && it->second) ss += (*it->second - s.mean) * (*it->second - s.mean);
      }
      s.stddev = std::sqrt(ss / static_cast<double>(s.runs - 1));
    }
  }
  return out;
}

}  // namespace geosocial
