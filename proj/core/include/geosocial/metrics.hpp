#pragma once

#include "geosocial/model.hpp"

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

namespace geosocial {

// Classification of all C(N,2) unordered pairs: same/different cluster x same/different gang.
struct PairCounts {
  std::int64_t w11 = 0;
  std::int64_t w10 = 0;
  std::int64_t w01 = 0;
  std::int64_t w00 = 0;

  std::int64_t total() const noexcept { return w11 + w10 + w01 + w00; }
  friend bool operator==(const PairCounts&, const PairCounts&) = default;
};

// Cluster x gang counts; rows follow p's cluster indices, columns truth's.
Eigen::MatrixXd contingency(const Partition& p, const Partition& truth);

double purity(const Partition& p, const Partition& truth);

PairCounts pair_counts(const Partition& p, const Partition& truth);

// Mean and standard deviation of w11 under the permutation null that keeps both
// partitions' cluster sizes fixed.
struct ZRandMoments {
  double mean = 0.0;
  double variance = 0.0;
};

ZRandMoments z_rand_moments(const Partition& p, const Partition& truth);

// (w11 - mean) / sd. Throws UndefinedError when the null variance vanishes
// (either partition all singletons or a single cluster).
double z_rand(const Partition& p, const Partition& truth);

double ingroup_homogeneity(const Partition& p, const Partition& truth, bool scaled);
double outgroup_heterogeneity(const Partition& p, const Partition& truth, bool scaled);

// Means of member coordinates, one per nonempty cluster in cluster-index order.
std::vector<Point> centroids(const Partition& p, const Roster& roster);

struct CentroidDistances {
  double hausdorff = 0.0;
  double mean = 0.0;  // M
};

// Nearest-neighbour distances from each set to the other: maximum and mean.
CentroidDistances hausdorff_and_mean(const std::vector<Point>& pc, const std::vector<Point>& gc);

// Optimal transport between the two clusterings (masses = cluster sizes, ground
// distance = point-set EMD between cluster members), divided by the cost of the
// naive proportional plan that ships every cluster's mass to all clusters of the
// other side in proportion to their sizes. Lies in [0, 1]; 0 when the denominator is 0.
double cluster_distance(const Partition& p, const Partition& truth, const Roster& roster);

// Metric name -> value for one run; nullopt marks an undefined value.
using MetricValues = std::map<std::string, std::optional<double>>;

struct MetricStat {
  double mean = 0.0;
  double stddev = 0.0;  // sample (n - 1) standard deviation; 0 for a single value
  std::size_t runs = 0;       // defined values
  std::size_t undefined = 0;  // runs where the metric was undefined

  bool defined() const noexcept { return runs > 0; }
};

struct MetricSummary {
  std::map<std::string, MetricStat> stats;

  const MetricStat& at(const std::string& name) const { return stats.at(name); }
};

MetricSummary summarize(const std::vector<MetricValues>& runs);

}  // namespace geosocial
