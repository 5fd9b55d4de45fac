#pragma once

#include "geosocial/graph.hpp"
#include "geosocial/metrics.hpp"
#include "geosocial/model.hpp"
#include "geosocial/spectral.hpp"

#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace geosocial {

// Observed true-positive count and ground-truth link count used for the reference
// line p* = (observed / truth) / (1 - q).
struct ReferenceAnchor {
  double observed_true_positives = 423.0;
  double truth_links = 15904.0;

  double p_star(double q) const { return observed_true_positives / truth_links / (1.0 - q); }
};

struct SweepSpec {
  SocialVariantKind variant = SocialVariantKind::Adjacency;
  std::vector<double> alpha_grid;
  std::vector<double> p_grid;
  std::vector<double> q_grid;
  std::vector<std::size_t> k_grid;
  std::size_t k = 31;
  std::size_t runs = 10;
  RunSeed seed;
  std::optional<double> sigma;  // feet; estimated when absent
  SigmaRule sigma_rule = SigmaRule::MeanPlusStd;
  bool extended_metrics = false;  // pair counts, homogeneity, centroid and transport metrics
  std::optional<ReferenceAnchor> anchor;
  KMeansOptions kmeans;
  std::size_t workers = 0;  // 0: GEOSOCIAL_WORKERS or hardware concurrency
};

std::vector<double> default_alpha_grid();             // 0, 0.1, ..., 1
std::vector<std::size_t> default_k_grid();            // 5, 10, ..., 95
std::vector<double> default_q_grid();                 // 0, 0.055, 0.11321

struct GridPoint {
  std::vector<std::pair<std::string, double>> params;
  MetricSummary summary;
  std::vector<MetricValues> runs;
  std::optional<std::string> failure;
};

struct SweepReport {
  std::string experiment;
  std::vector<std::string> param_names;
  std::vector<GridPoint> rows;
  std::uint64_t master_seed = 0;
  double sigma = 0.0;  // feet
  std::string variant;
  std::size_t runs = 0;
  std::size_t k = 0;
  std::vector<std::pair<double, double>> p_star;  // (q, p*)
  std::vector<std::string> notes;
};

// Metric order used in reports.
const std::vector<std::string>& metric_names(bool extended);

// purity and z_rand; with `extended` the full metric suite. Lengths in meters.
MetricValues evaluate_partition(const Partition& p, const Partition& truth, const Roster& roster,
                                bool extended);

SweepReport alpha_sweep(const Roster& roster, const std::vector<Edge>& edges,
                        const SweepSpec& spec);

SweepReport pq_sweep(const Roster& roster, const Partition& truth, const SweepSpec& spec);

SweepReport k_sweep(const Roster& roster, const std::vector<Edge>& edges, const SweepSpec& spec);

// Sweep CSV: units comment, then `param...,metric,mean,std,runs,undefined`.
std::string to_csv(const SweepReport& report);
std::string to_json(const SweepReport& report);

struct CompositionTable {
  struct Cluster {
    std::size_t index = 0;
    Point centroid;  // feet
    std::size_t size = 0;
    std::map<std::string, std::size_t> histogram;
    std::map<std::size_t, std::size_t> links;  // other cluster -> crossing links
  };
  std::vector<Cluster> clusters;  // nonempty only
  std::size_t inter_cluster_links = 0;
};

CompositionTable composition_export(const Partition& p, const Roster& roster,
                                    const SymmetricMatrix& adjacency);
std::string to_json(const CompositionTable& table);

struct EigenvectorField {
  std::vector<std::string> ids;
  std::vector<Point> points;
  std::vector<std::size_t> indices;  // 0-based eigenvector indices
  Eigen::MatrixXd values;            // n x indices.size()
  std::vector<double> min;
  std::vector<double> max;
};

EigenvectorField eigenvector_field_export(const SpectrumSlice& spectrum, const Roster& roster,
                                          const std::vector<std::size_t>& indices);
// `id,x,y,v<index+1>...` with a units comment and a min/max comment.
std::string to_csv(const EigenvectorField& field);
EigenvectorField parse_field_csv(const std::string& text);

// Worker count from GEOSOCIAL_WORKERS, falling back to hardware concurrency.
std::size_t default_workers();

}  // namespace geosocial
