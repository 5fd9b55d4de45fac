#include "geosocial/experiments.hpp"

#include "geosocial/error.hpp"
#include "geosocial/synthesis.hpp"

#include <fmt/format.h>

#include <json.hpp>

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdlib>
#include <exception>
#include <mutex>
#include <sstream>
#include <thread>

namespace geosocial {

namespace {

// Runs body(i) for i in [0, count) on a small pool. Each index owns its output slot,
// so results do not depend on scheduling. The first exception is rethrown.
template <class Body>
void parallel_for(std::size_t count, std::size_t workers, Body&& body) {
  workers = std::max<std::size_t>(1, std::min(workers, count));
  if (workers == 1) {
    for (std::size_t i = 0; i < count; ++i) body(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::exception_ptr error;
  std::mutex error_mutex;
  std::vector<std::thread> pool;
  for (std::size_t w = 0; w < workers; ++w) {
    pool.emplace_back([&] {
      for (std::size_t i = next++; i < count; i = next++) {
        try {
          body(i);
        } catch (...) {
          std::lock_guard lock(error_mutex);
          if (!error) error = std::current_exception();
        }
      }
    });
  }
  for (auto& t : pool) t.join();
  if (error) std::rethrow_exception(error);
}

std::optional<double> guarded(auto&& f) {
  try {
    return f();
  } catch (const UndefinedError&) {
    return std::nullopt;
  }
}

void check_unit_grid(const std::vector<double>& grid, const char* name) {
  if (grid.empty()) throw ConfigError(std::string(name) + " grid is empty");
  for (double v : grid) {
    if (!(v >= 0.0 && v <= 1.0)) throw ConfigError(std::string(name) + " grid must lie in [0, 1]");
  }
}

// Restarts on a spectrum, each evaluated against the truth.
GridPoint run_point(const SpectrumSlice& spectrum, const Partition& truth, const Roster& roster,
                    const SweepSpec& spec, const RunSeed& seed) {
  GridPoint point;
  for (const auto& r : kmeans_restarts(spectrum, spec.runs, seed, spec.kmeans)) {
    point.runs.push_back(evaluate_partition(r.partition, truth, roster, spec.extended_metrics));
  }
  point.summary = summarize(point.runs);
  return point;
}

// Component failures other than configuration problems mark the grid point failed.
template <class F>
void capture_failure(GridPoint& point, F&& f) {
  try {
    f();
  } catch (const ConfigError&) {
    throw;
  } catch (const InfeasibleNoiseError&) {
    throw;
  } catch (const Error& e) {
    point.failure = e.what();
    point.runs.clear();
    point.summary = {};
  }
}

std::size_t workers_for(const SweepSpec& spec) {
  return spec.workers == 0 ? default_workers() : spec.workers;
}

KernelScale resolve_sigma(const SweepSpec& spec, const Roster& roster,
                          const SymmetricMatrix& social) {
  if (spec.sigma) return KernelScale(*spec.sigma);
  return estimate_sigma(roster, social, spec.sigma_rule);
}

std::string number(double v) { return fmt::format("{}", v); }

}  // namespace

std::size_t default_workers() {
  if (const char* env = std::getenv("GEOSOCIAL_WORKERS")) {
    char* end = nullptr;
    const unsigned long v = std::strtoul(env, &end, 10);
    if (end != env && *end == '\0' && v > 0) return v;
  }
  return std::max(1u, std::thread::hardware_concurrency());
}

std::vector<double> default_alpha_grid() {
  std::vector<double> out;
  for (int i = 0; i <= 10; ++i) out.push_back(i / 10.0);
  return out;
}

std::vector<std::size_t> default_k_grid() {
  std::vector<std::size_t> out;
  for (std::size_t k = 5; k <= 95; k += 5) out.push_back(k);
  return out;
}

std::vector<double> default_q_grid() { return {0.0, 0.055, 0.11321}; }

const std::vector<std::string>& metric_names(bool extended) {
  static const std::vector<std::string> basic{"purity", "z_rand"};
  static const std::vector<std::string> full{"purity",
                                             "z_rand",
                                             "w11",
                                             "w10",
                                             "w01",
                                             "w00",
                                             "ingroup_homogeneity",
                                             "ingroup_homogeneity_scaled",
                                             "outgroup_heterogeneity",
                                             "outgroup_heterogeneity_scaled",
                                             "hausdorff_m",
                                             "mean_centroid_distance_m",
                                             "cluster_distance"};
  return extended ? full : basic;
}

MetricValues evaluate_partition(const Partition& p, const Partition& truth, const Roster& roster,
                                bool extended) {
  MetricValues out;
  out["purity"] = purity(p, truth);
  out["z_rand"] = guarded([&] { return z_rand(p, truth); });
  if (!extended) return out;
  const PairCounts w = pair_counts(p, truth);
  out["w11"] = static_cast<double>(w.w11);
  out["w10"] = static_cast<double>(w.w10);
  out["w01"] = static_cast<double>(w.w01);
  out["w00"] = static_cast<double>(w.w00);
  out["ingroup_homogeneity"] = guarded([&] { return ingroup_homogeneity(p, truth, false); });
  out["ingroup_homogeneity_scaled"] = guarded([&] { return ingroup_homogeneity(p, truth, true); });
  out["outgroup_heterogeneity"] = guarded([&] { return outgroup_heterogeneity(p, truth, false); });
  out["outgroup_heterogeneity_scaled"] =
      guarded([&] { return outgroup_heterogeneity(p, truth, true); });
  const CentroidDistances cd = hausdorff_and_mean(centroids(p, roster), centroids(truth, roster));
  out["hausdorff_m"] = cd.hausdorff * kMetersPerFoot;
  out["mean_centroid_distance_m"] = cd.mean * kMetersPerFoot;
  out["cluster_distance"] = cluster_distance(p, truth, roster);
  return out;
}

SweepReport alpha_sweep(const Roster& roster, const std::vector<Edge>& edges,
                        const SweepSpec& spec) {
  check_unit_grid(spec.alpha_grid, "alpha");
  if (spec.runs == 0) throw ConfigError("runs must be at least 1");
  const Partition truth = partition_from_labels(roster);
  const SymmetricMatrix adjacency = build_adjacency(roster, edges);
  const KernelScale sigma = resolve_sigma(spec, roster, adjacency);
  const SymmetricMatrix kernel = build_distance_kernel(roster, sigma);
  const SymmetricMatrix social = social_variant(adjacency, spec.variant);

  SweepReport report;
  report.experiment = "sweep-alpha";
  report.param_names = {"alpha"};
  report.master_seed = spec.seed.master();
  report.sigma = sigma.sigma();
  report.variant = std::string(to_string(spec.variant));
  report.runs = spec.runs;
  report.k = spec.k;
  report.rows.resize(spec.alpha_grid.size());

  const RunSeed base = spec.seed.derive("sweep-alpha");
  parallel_for(spec.alpha_grid.size(), workers_for(spec), [&](std::size_t ai) {
    const double alpha = spec.alpha_grid[ai];
    GridPoint& point = report.rows[ai];
    capture_failure(point, [&] {
      const SymmetricMatrix w = build_affinity(social, kernel, alpha);
      point = run_point(normalized_spectrum(w, spec.k), truth, roster, spec, base.derive(ai));
    });
    point.params = {{"alpha", alpha}};
  });
  return report;
}

SweepReport pq_sweep(const Roster& roster, const Partition& truth, const SweepSpec& spec) {
  check_unit_grid(spec.alpha_grid, "alpha");
  check_unit_grid(spec.p_grid, "p");
  check_unit_grid(spec.q_grid, "q");
  if (spec.runs == 0) throw ConfigError("runs must be at least 1");
  validate_partition(truth, roster.size());
  const SymmetricMatrix gt = gt_matrix(truth);
  const KernelScale sigma = resolve_sigma(spec, roster, gt);
  const SymmetricMatrix kernel = build_distance_kernel(roster, sigma);

  SweepReport report;
  report.experiment = "sweep-pq";
  report.param_names = {"q", "alpha", "p"};
  report.master_seed = spec.seed.master();
  report.sigma = sigma.sigma();
  report.variant = "gt(p,q)/" + std::string(to_string(spec.variant));
  report.runs = spec.runs;
  report.k = spec.k;
  if (spec.anchor) {
    for (double q : spec.q_grid) report.p_star.emplace_back(q, spec.anchor->p_star(q));
  }

  const std::size_t nq = spec.q_grid.size();
  const std::size_t na = spec.alpha_grid.size();
  const std::size_t np = spec.p_grid.size();
  report.rows.resize(nq * na * np);
  const RunSeed noise_base = spec.seed.derive("sweep-pq-noise");
  const RunSeed kmeans_base = spec.seed.derive("sweep-pq-kmeans");

  // GT(p, q) depends on (q, p) only, so every alpha sees the same degraded matrix.
  std::vector<std::optional<SymmetricMatrix>> degraded(nq * np);
  parallel_for(nq * np, workers_for(spec), [&](std::size_t flat) {
    const std::size_t qi = flat / np;
    const std::size_t pi = flat % np;
    const NoiseParams noise(spec.p_grid[pi], spec.q_grid[qi]);
    degraded[flat] = social_variant(degrade(gt, noise, noise_base.derive(qi).derive(pi)),
                                    spec.variant);
  });

  parallel_for(report.rows.size(), workers_for(spec), [&](std::size_t flat) {
    const std::size_t qi = flat / (na * np);
    const std::size_t ai = (flat / np) % na;
    const std::size_t pi = flat % np;
    GridPoint& point = report.rows[flat];
    capture_failure(point, [&] {
      const SymmetricMatrix w =
          build_affinity(*degraded[qi * np + pi], kernel, spec.alpha_grid[ai]);
      // Seeds exclude p so lines that ignore S are identical across p.
      point = run_point(normalized_spectrum(w, spec.k), truth, roster, spec,
                        kmeans_base.derive(qi).derive(ai));
    });
    point.params = {{"q", spec.q_grid[qi]}, {"alpha", spec.alpha_grid[ai]}, {"p", spec.p_grid[pi]}};
  });
  return report;
}

SweepReport k_sweep(const Roster& roster, const std::vector<Edge>& edges, const SweepSpec& spec) {
  check_unit_grid(spec.alpha_grid, "alpha");
  if (spec.k_grid.empty()) throw ConfigError("k grid is empty");
  if (spec.runs == 0) throw ConfigError("runs must be at least 1");
  for (std::size_t k : spec.k_grid) {
    if (k < 1 || k > roster.size()) throw ConfigError("k grid must lie within 1..N");
  }
  const Partition truth = partition_from_labels(roster);
  const SymmetricMatrix adjacency = build_adjacency(roster, edges);
  const KernelScale sigma = resolve_sigma(spec, roster, adjacency);
  const SymmetricMatrix kernel = build_distance_kernel(roster, sigma);
  const SymmetricMatrix social = social_variant(adjacency, spec.variant);
  const std::size_t kmax = *std::max_element(spec.k_grid.begin(), spec.k_grid.end());

  SweepReport report;
  report.experiment = "sweep-k";
  report.param_names = {"alpha", "k"};
  report.master_seed = spec.seed.master();
  report.sigma = sigma.sigma();
  report.variant = std::string(to_string(spec.variant));
  report.runs = spec.runs;
  report.k = kmax;
  report.notes.push_back("purity is biased toward larger k; compare k values by z_rand");

  const std::size_t na = spec.alpha_grid.size();
  const std::size_t nk = spec.k_grid.size();
  report.rows.resize(na * nk);
  const RunSeed base = spec.seed.derive("sweep-k");

  parallel_for(na, workers_for(spec), [&](std::size_t ai) {
    std::optional<SpectrumSlice> spectrum;
    std::optional<std::string> spectrum_failure;
    try {
      spectrum = normalized_spectrum(build_affinity(social, kernel, spec.alpha_grid[ai]), kmax);
    } catch (const ConfigError&) {
      throw;
    } catch (const Error& e) {
      spectrum_failure = e.what();
    }
    for (std::size_t ki = 0; ki < nk; ++ki) {
      GridPoint& point = report.rows[ai * nk + ki];
      if (spectrum) {
        capture_failure(point, [&] {
          point = run_point(spectrum->leading(spec.k_grid[ki]), truth, roster, spec,
                            base.derive(ai).derive(ki));
        });
      } else {
        point.failure = spectrum_failure;
      }
      point.params = {{"alpha", spec.alpha_grid[ai]},
                      {"k", static_cast<double>(spec.k_grid[ki])}};
    }
  });
  return report;
}

std::string to_csv(const SweepReport& report) {
  std::string out = "# units: hausdorff_m and mean_centroid_distance_m in meters; other metrics "
                    "dimensionless; sigma " + number(report.sigma) + " feet\n";
  for (const auto& name : report.param_names) out += name + ",";
  out += "metric,mean,std,runs,undefined\n";
  for (const GridPoint& point : report.rows) {
    std::string prefix;
    for (const auto& [name, value] : point.params) prefix += number(value) + ",";
    if (point.failure) {
      out += prefix + "failed,NA,NA,0,0\n";
      continue;
    }
    std::vector<std::string> names;
    for (const auto& name : metric_names(true)) {
      if (point.summary.stats.count(name)) names.push_back(name);
    }
    for (const auto& name : names) {
      const MetricStat& s = point.summary.at(name);
      out += prefix + name + ",";
      if (s.defined()) {
        out += number(s.mean) + "," + number(s.stddev);
      } else {
        out += "NA,NA";
      }
      out += "," + std::to_string(s.runs) + "," + std::to_string(s.undefined) + "\n";
    }
  }
  return out;
}

std::string to_json(const SweepReport& report) {
  using nlohmann::ordered_json;
  ordered_json j;
  j["experiment"] = report.experiment;
  j["provenance"] = {{"master_seed", report.master_seed},
                     {"sigma_feet", report.sigma},
                     {"variant", report.variant},
                     {"runs", report.runs},
                     {"k", report.k}};
  j["notes"] = report.notes;
  if (!report.p_star.empty()) {
    ordered_json refs = ordered_json::array();
    for (const auto& [q, p] : report.p_star) refs.push_back({{"q", q}, {"p_star", p}});
    j["reference_p_star"] = refs;
  }
  ordered_json rows = ordered_json::array();
  for (const GridPoint& point : report.rows) {
    ordered_json row;
    ordered_json params = ordered_json::object();
    for (const auto& [name, value] : point.params) params[name] = value;
    row["params"] = params;
    if (point.failure) {
      row["failed"] = *point.failure;
      rows.push_back(row);
      continue;
    }
    ordered_json summary = ordered_json::object();
    for (const auto& name : metric_names(true)) {
      auto it = point.summary.stats.find(name);
      if (it == point.summary.stats.end()) continue;
      const MetricStat& s = it->second;
      summary[name] = {{"mean", s.defined() ? ordered_json(s.mean) : ordered_json(nullptr)},
                       {"std", s.defined() ? ordered_json(s.stddev) : ordered_json(nullptr)},
                       {"runs", s.runs},
                       {"undefined", s.undefined}};
    }
    row["summary"] = summary;
    ordered_json runs = ordered_json::array();
    for (const auto& values : point.runs) {
      ordered_json r = ordered_json::object();
      for (const auto& name : metric_names(true)) {
        auto it = values.find(name);
        if (it == values.end()) continue;
        r[name] = it->second ? ordered_json(*it->second) : ordered_json(nullptr);
      }
      runs.push_back(r);
    }
    row["runs"] = runs;
    rows.push_back(row);
  }
  j["rows"] = rows;
  return j.dump(2) + "\n";
}

CompositionTable composition_export(const Partition& p, const Roster& roster,
                                    const SymmetricMatrix& adjacency) {
  validate_partition(p, roster.size());
  if (adjacency.size() != roster.size()) throw DimensionError("adjacency does not match roster");
  std::vector<CompositionTable::Cluster> all(p.k);
  for (std::size_t c = 0; c < p.k; ++c) all[c].index = c;
  for (std::size_t i = 0; i < roster.size(); ++i) {
    auto& cl = all[p.assign[i]];
    ++cl.size;
    ++cl.histogram[roster[i].gang];
    cl.centroid.x += roster[i].x;
    cl.centroid.y += roster[i].y;
  }
  CompositionTable table;
  for (std::size_t i = 0; i < roster.size(); ++i) {
    for (std::size_t j = i + 1; j < roster.size(); ++j) {
      const std::size_t a = p.assign[i];
      const std::size_t b = p.assign[j];
      if (a == b || adjacency(i, j) == 0.0) continue;
      ++all[a].links[b];
      ++all[b].links[a];
      ++table.inter_cluster_links;
    }
  }
  for (auto& cl : all) {
    if (cl.size == 0) continue;
    cl.centroid.x /= static_cast<double>(cl.size);
    cl.centroid.y /= static_cast<double>(cl.size);
    table.clusters.push_back(std::move(cl));
  }
  return table;
}

std::string to_json(const CompositionTable& table) {
  using nlohmann::ordered_json;
  ordered_json clusters = ordered_json::object();
  for (const auto& cl : table.clusters) {
    ordered_json links = ordered_json::object();
    for (const auto& [other, count] : cl.links) links[std::to_string(other)] = count;
    clusters[std::to_string(cl.index)] = {
        {"centroid", {{"x", cl.centroid.x}, {"y", cl.centroid.y}}},
        {"size", cl.size},
        {"histogram", cl.histogram},
        {"links", links}};
  }
  ordered_json j;
  j["units"] = "centroid coordinates in feet";
  j["inter_cluster_links"] = table.inter_cluster_links;
  j["clusters"] = clusters;
  return j.dump(2) + "\n";
}

EigenvectorField eigenvector_field_export(const SpectrumSlice& spectrum, const Roster& roster,
                                          const std::vector<std::size_t>& indices) {
  if (static_cast<std::size_t>(spectrum.vectors.rows()) != roster.size()) {
    throw DimensionError("spectrum does not match roster");
  }
  EigenvectorField f;
  f.indices = indices;
  f.values.resize(spectrum.vectors.rows(), static_cast<Eigen::Index>(indices.size()));
  for (std::size_t c = 0; c < indices.size(); ++c) {
    if (indices[c] >= spectrum.k()) {
      throw RangeError("eigenvector index " + std::to_string(indices[c]) + " outside spectrum");
    }
    const auto col = spectrum.vectors.col(static_cast<Eigen::Index>(indices[c]));
    f.values.col(static_cast<Eigen::Index>(c)) = col;
    f.min.push_back(col.minCoeff());
    f.max.push_back(col.maxCoeff());
  }
  for (std::size_t i = 0; i < roster.size(); ++i) {
    f.ids.push_back(roster[i].id);
    f.points.push_back(roster.point(i));
  }
  return f;
}

std::string to_csv(const EigenvectorField& field) {
  std::string header = "id,x,y";
  std::string range = "# range:";
  for (std::size_t c = 0; c < field.indices.size(); ++c) {
    const std::string name = "v" + std::to_string(field.indices[c] + 1);
    header += "," + name;
    range += " " + name + "=[" + number(field.min[c]) + "," + number(field.max[c]) + "]";
  }
  std::string out = "# units: x,y in feet; eigenvector components dimensionless\n";
  out += range + "\n" + header + "\n";
  for (std::size_t i = 0; i < field.ids.size(); ++i) {
    out += field.ids[i] + "," + number(field.points[i].x) + "," + number(field.points[i].y);
    for (Eigen::Index c = 0; c < field.values.cols(); ++c) {
      out += "," + number(field.values(static_cast<Eigen::Index>(i), c));
    }
    out += "\n";
  }
  return out;
}

EigenvectorField parse_field_csv(const std::string& text) {
  std::istringstream in(text);
  std::string line;
  EigenvectorField f;
  std::vector<std::vector<double>> rows;
  bool header_seen = false;
  auto split = [](const std::string& s) {
    std::vector<std::string> parts;
    std::string cur;
    std::istringstream ss(s);
    while (std::getline(ss, cur, ',')) parts.push_back(cur);
    return parts;
  };
  while (std::getline(in, line)) {
    if (line.empty() || line[0] == '#') continue;
    const auto parts = split(line);
    if (!header_seen) {
      header_seen = true;
      if (parts.size() < 3 || parts[0] != "id" || parts[1] != "x" || parts[2] != "y") {
        throw IngestError("eigenvector field header must start with id,x,y", 0);
      }
      for (std::size_t c = 3; c < parts.size(); ++c) {
        f.indices.push_back(std::stoul(parts[c].substr(1)) - 1);
      }
      continue;
    }
    if (parts.size() != 3 + f.indices.size()) throw IngestError("field row has wrong width", 0);
    f.ids.push_back(parts[0]);
    f.points.push_back({std::stod(parts[1]), std::stod(parts[2])});
    std::vector<double> vals;
    for (std::size_t c = 3; c < parts.size(); ++c) vals.push_back(std::stod(parts[c]));
    rows.push_back(std::move(vals));
  }
  f.values.resize(static_cast<Eigen::Index>(rows.size()),
                  static_cast<Eigen::Index>(f.indices.size()));
  for (std::size_t i = 0; i < rows.size(); ++i) {
    for (std::size_t c = 0; c < rows[i].size(); ++c) {
      f.values(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(c)) = rows[i][c];
    }
  }
  for (Eigen::Index c = 0; c < f.values.cols(); ++c) {
    f.min.push_back(rows.empty() ? 0.0 : f.values.col(c).minCoeff());
    f.max.push_back(rows.empty() ? 0.0 : f.values.col(c).maxCoeff());
  }
  return f;
}

}  // namespace geosocial
