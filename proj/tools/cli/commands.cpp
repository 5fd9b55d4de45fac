#include "cli/commands.hpp"

#include <geosocial/geosocial.hpp>

#include <CLI11.hpp>
#include <fmt/format.h>
#include <json.hpp>

#include <chrono>
#include <ctime>
#include <map>

namespace geosocial::cli {

namespace {

using nlohmann::ordered_json;

const std::vector<std::string> kCommands{"cluster",  "sweep-alpha", "sweep-pq",       "sweep-k",
                                         "rankone",  "synth",       "report-sparsity"};

bool is_sweep(const std::string& command) { return command.rfind("sweep-", 0) == 0; }

SigmaRule sigma_rule(const std::string& name) {
  if (name == "mean-plus-std") return SigmaRule::MeanPlusStd;
  if (name == "mean") return SigmaRule::Mean;
  throw ConfigError("unknown sigma rule '" + name + "' (mean-plus-std | mean)");
}

// Collects artifacts and writes them only after the whole command succeeded.
class Outputs {
 public:
  explicit Outputs(std::filesystem::path dir) : dir_(std::move(dir)) {}

  void add(const std::string& name, std::string content) { files_[name] = std::move(content); }
  void input(const std::filesystem::path& path, const std::string& bytes) {
    inputs_[path.string()] = content_hash(bytes);
  }

  void commit(const RunConfig& config, std::optional<double> sigma, std::ostream& log) const {
    ordered_json manifest;
    manifest["command"] = config.command;
    manifest["version"] = version();
    manifest["seed"] = config.seed.value_or(kDefaultClusterSeed);
    manifest["sigma_feet"] = sigma ? ordered_json(*sigma) : ordered_json(nullptr);
    manifest["hash"] = "fnv1a64";
    manifest["inputs"] = inputs_;
    ordered_json outputs = ordered_json::object();
    for (const auto& [name, content] : files_) outputs[name] = content_hash(content);
    manifest["outputs"] = outputs;
    const auto now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
    std::tm utc{};
    gmtime_r(&now, &utc);
    char stamp[32];
    std::strftime(stamp, sizeof stamp, "%Y-%m-%dT%H:%M:%SZ", &utc);
    manifest["created_utc"] = stamp;

    for (const auto& [name, content] : files_) {
      write_atomic(dir_ / name, content);
      log << "wrote " << (dir_ / name).string() << "\n";
    }
    write_atomic(dir_ / "manifest.json", manifest.dump(2) + "\n");
  }

 private:
  std::filesystem::path dir_;
  std::map<std::string, std::string> files_;
  std::map<std::string, std::string> inputs_;
};

struct Loaded {
  Roster roster;
  std::vector<Edge> edges;
};

Loaded load(const RunConfig& config, Outputs& outputs, std::ostream& err, bool need_edges) {
  const std::string roster_bytes = read_file(config.roster);
  outputs.input(config.roster, roster_bytes);
  std::istringstream roster_in(roster_bytes);
  Loaded data{parse_roster(roster_in), {}};
  if (config.edges) {
    const std::string edge_bytes = read_file(*config.edges);
    outputs.input(*config.edges, edge_bytes);
    std::istringstream edge_in(edge_bytes);
    std::vector<std::string> warnings;
    data.edges = parse_edges(edge_in, data.roster, &warnings);
    for (const auto& w : warnings) err << "warning: " << w << "\n";
  } else if (need_edges) {
    throw ConfigError("--edges is required for '" + config.command + "'");
  }
  return data;
}

KernelScale resolve_sigma(const RunConfig& config, const Roster& roster,
                          const SymmetricMatrix& adjacency) {
  if (config.sigma) return KernelScale(*config.sigma);
  return estimate_sigma(roster, adjacency, sigma_rule(config.sigma_rule));
}

KMeansOptions kmeans_options(const RunConfig& config) {
  KMeansOptions opt;
  if (config.kmeans_init == "uniform") {
    opt.init = KMeansInit::UniformRows;
  } else if (config.kmeans_init == "plusplus") {
    opt.init = KMeansInit::PlusPlus;
  } else {
    throw ConfigError("unknown k-means init '" + config.kmeans_init + "' (uniform | plusplus)");
  }
  return opt;
}

SweepSpec sweep_spec(const RunConfig& config) {
  SweepSpec spec;
  spec.variant = parse_social_variant(config.variant);
  spec.k = config.k;
  spec.runs = config.runs;
  spec.seed = RunSeed(*config.seed);
  spec.sigma = config.sigma;
  spec.sigma_rule = sigma_rule(config.sigma_rule);
  spec.extended_metrics = config.extended;
  spec.kmeans = kmeans_options(config);
  return spec;
}

ordered_json metric_json(const MetricValues& values) {
  ordered_json j = ordered_json::object();
  for (const auto& name : metric_names(true)) {
    auto it = values.find(name);
    if (it == values.end()) continue;
    j[name] = it->second ? ordered_json(*it->second) : ordered_json(nullptr);
  }
  return j;
}

ordered_json sparsity_json(const SparsityReport& r) {
  return {{"n", r.n},
          {"truth_links", r.truth_links},
          {"observed_links", r.observed_links},
          {"true_positives", r.true_positives},
          {"recall", r.recall},
          {"false_positive_rate", r.false_positive_rate},
          {"true_negative_rate", r.true_negative_rate},
          {"false_negative_share", r.false_negative_share},
          {"mean_degree", r.mean_degree},
          {"degree_std", r.degree_std},
          {"max_degree", r.max_degree},
          {"isolated", r.isolated}};
}

std::vector<std::size_t> field_indices(std::size_t k) {
  std::vector<std::size_t> out;
  for (std::size_t i = 1; i < std::min<std::size_t>(k, 4); ++i) out.push_back(i);
  return out;
}

std::optional<double> cmd_cluster(const RunConfig& config, Outputs& outputs, std::ostream& err) {
  const Loaded data = load(config, outputs, err, false);
  const SymmetricMatrix adjacency = build_adjacency(data.roster, data.edges);
  const KernelScale sigma = resolve_sigma(config, data.roster, adjacency);
  const SymmetricMatrix social = social_variant(adjacency, parse_social_variant(config.variant));
  const SymmetricMatrix w =
      build_affinity(social, build_distance_kernel(data.roster, sigma), config.alpha);
  const RunSeed seed = RunSeed(config.seed.value_or(kDefaultClusterSeed)).derive("cluster");
  const PipelineResult result = cluster_pipeline_detailed(w, config.k, config.runs, seed, kmeans_options(config));
  const Partition truth = partition_from_labels(data.roster);

  std::size_t best = 0;
  std::vector<MetricValues> per_run;
  for (std::size_t r = 0; r < result.runs.size(); ++r) {
    per_run.push_back(
        evaluate_partition(result.runs[r].partition, truth, data.roster, config.extended));
    if (result.runs[r].sse.back() < result.runs[best].sse.back()) best = r;
  }
  const MetricSummary summary = summarize(per_run);
  const Partition& chosen = result.runs[best].partition;

  ordered_json metrics;
  metrics["units"] = "hausdorff_m and mean_centroid_distance_m in meters";
  metrics["alpha"] = config.alpha;
  metrics["k"] = config.k;
  metrics["sigma_feet"] = sigma.sigma();
  metrics["variant"] = config.variant;
  metrics["kmeans_init"] = config.kmeans_init;
  metrics["selected_run"] = best;
  ordered_json runs = ordered_json::array();
  for (std::size_t r = 0; r < per_run.size(); ++r) {
    ordered_json run = metric_json(per_run[r]);
    run["kmeans_sse"] = result.runs[r].sse.back();
    run["kmeans_iterations"] = result.runs[r].iterations;
    runs.push_back(run);
  }
  metrics["runs"] = runs;
  ordered_json stats = ordered_json::object();
  for (const auto& [name, s] : summary.stats) {
    stats[name] = {{"mean", s.defined() ? ordered_json(s.mean) : ordered_json(nullptr)},
                   {"std", s.defined() ? ordered_json(s.stddev) : ordered_json(nullptr)},
                   {"runs", s.runs},
                   {"undefined", s.undefined}};
  }
  metrics["summary"] = stats;

  outputs.add("partition.csv", partition_csv(chosen, data.roster));
  outputs.add("metrics.json", metrics.dump(2) + "\n");
  outputs.add("composition.json", to_json(composition_export(chosen, data.roster, adjacency)));
  outputs.add("eigenvectors.csv",
              to_csv(eigenvector_field_export(result.spectrum, data.roster,
                                              field_indices(config.k))));
  return sigma.sigma();
}

void add_sweep_outputs(const SweepReport& report, Outputs& outputs) {
  outputs.add("sweep.csv", to_csv(report));
  outputs.add("sweep.json", to_json(report));
}

std::optional<double> cmd_sweep_alpha(const RunConfig& config, Outputs& outputs,
                                      std::ostream& err) {
  const Loaded data = load(config, outputs, err, false);
  SweepSpec spec = sweep_spec(config);
  spec.alpha_grid = config.alphas.empty() ? default_alpha_grid() : config.alphas;
  const SweepReport report = alpha_sweep(data.roster, data.edges, spec);
  add_sweep_outputs(report, outputs);
  return report.sigma;
}

std::optional<double> cmd_sweep_pq(const RunConfig& config, Outputs& outputs, std::ostream& err) {
  const Loaded data = load(config, outputs, err, false);
  SweepSpec spec = sweep_spec(config);
  spec.alpha_grid = config.alphas.empty() ? std::vector<double>{0.0, 0.2, 0.4, 0.6, 0.8, 1.0}
                                          : config.alphas;
  if (config.ps.empty()) {
    for (int i = 1; i <= 20; ++i) spec.p_grid.push_back(i / 20.0);
  } else {
    spec.p_grid = config.ps;
  }
  spec.q_grid = config.qs.empty() ? default_q_grid() : config.qs;
  if (config.anchor) {
    spec.anchor = ReferenceAnchor{config.anchor_true_positives, config.anchor_truth_links};
  }
  if (!spec.sigma && config.edges) {
    // Sigma from the observed adjacency keeps the kernel fixed across the noise grid.
    spec.sigma = resolve_sigma(config, data.roster, build_adjacency(data.roster, data.edges)).sigma();
  }
  const SweepReport report = pq_sweep(data.roster, partition_from_labels(data.roster), spec);
  add_sweep_outputs(report, outputs);
  return report.sigma;
}

std::optional<double> cmd_sweep_k(const RunConfig& config, Outputs& outputs, std::ostream& err) {
  const Loaded data = load(config, outputs, err, false);
  SweepSpec spec = sweep_spec(config);
  spec.alpha_grid = config.alphas.empty() ? std::vector<double>{0.2, 0.4, 0.6, 0.8} : config.alphas;
  spec.k_grid = config.ks.empty() ? default_k_grid() : config.ks;
  std::erase_if(spec.k_grid, [&](std::size_t k) { return k > data.roster.size(); });
  if (spec.k_grid.empty()) throw ConfigError("no k in the grid is <= N");
  const SweepReport report = k_sweep(data.roster, data.edges, spec);
  add_sweep_outputs(report, outputs);
  return report.sigma;
}

std::optional<double> cmd_rankone(const RunConfig& config, Outputs& outputs, std::ostream& err) {
  const Loaded data = load(config, outputs, err, false);
  const SymmetricMatrix adjacency = build_adjacency(data.roster, data.edges);
  const KernelScale sigma = resolve_sigma(config, data.roster, adjacency);
  const SymmetricMatrix kernel = build_distance_kernel(data.roster, sigma);
  const SymmetricMatrix before = build_affinity(adjacency, kernel, config.alpha);
  const SymmetricMatrix after = build_affinity(
      social_variant(adjacency, SocialVariantKind::RankOneLift), kernel, config.alpha);
  const std::size_t m = std::min(config.m, data.roster.size());
  const UpdateReport report = shift_report(before, after, m);

  std::string csv = "# eigenvalues of D^-1 W, descending; before: S = A, after: S = n(A + C)\n";
  csv += "index,eigenvalue_before,eigenvalue_after\n";
  for (std::size_t i = 0; i < m; ++i) {
    csv += fmt::format("{},{},{}\n", i + 1, report.before[i], report.after[i]);
  }
  std::vector<double> raw = report.lambda;
  std::sort(raw.begin(), raw.end(), std::greater<>());
  ordered_json j;
  j["alpha"] = config.alpha;
  j["sigma_feet"] = sigma.sigma();
  j["n"] = data.roster.size();
  j["raw_update"] = {{"trace_gap", report.trace_gap},
                     {"expected_trace_gap", static_cast<double>(data.roster.size())},
                     {"interlacing_ok", report.interlacing_ok},
                     {"leading_eigenvalues", std::vector<double>(raw.begin(), raw.begin() + m)}};
  outputs.add("spectrum.csv", csv);
  outputs.add("rankone.json", j.dump(2) + "\n");
  const std::size_t kfield = std::min<std::size_t>(4, data.roster.size());
  outputs.add("eigenvectors_before.csv",
              to_csv(eigenvector_field_export(normalized_spectrum(before, kfield), data.roster,
                                              field_indices(kfield))));
  outputs.add("eigenvectors_after.csv",
              to_csv(eigenvector_field_export(normalized_spectrum(after, kfield), data.roster,
                                              field_indices(kfield))));
  return sigma.sigma();
}

std::optional<double> cmd_synth(const RunConfig& config, Outputs& outputs, std::ostream&) {
  const RunSeed seed(*config.seed);
  const SynthConfig synth = lattice_config(config.gangs, config.size, config.spread,
                                           config.separation, seed.derive("synth-roster"));
  const Roster roster = synth_roster(synth);
  const SymmetricMatrix gt = gt_matrix(partition_from_labels(roster));
  const SymmetricMatrix observed = degrade(gt, NoiseParams(config.observed_p, config.observed_q),
                                           seed.derive("synth-edges"));
  outputs.add("roster.csv", roster_csv(roster));
  outputs.add("edges.csv", edges_csv(edges_from_matrix(observed, roster)));
  outputs.add("sparsity.json", sparsity_json(sparsity_report(observed, gt)).dump(2) + "\n");
  return std::nullopt;
}

std::optional<double> cmd_report_sparsity(const RunConfig& config, Outputs& outputs,
                                          std::ostream& err) {
  const Loaded data = load(config, outputs, err, true);
  const SymmetricMatrix adjacency = build_adjacency(data.roster, data.edges);
  const SymmetricMatrix gt = gt_matrix(partition_from_labels(data.roster));
  outputs.add("sparsity.json", sparsity_json(sparsity_report(adjacency, gt)).dump(2) + "\n");
  return std::nullopt;
}

void add_common(CLI::App* sub, RunConfig& c, bool needs_roster) {
  auto* roster = sub->add_option("--roster", c.roster, "Roster CSV id,x,y,gang (feet)");
  if (needs_roster) roster->required();
  sub->add_option("--edges", c.edges, "Edge CSV id_i,id_j");
  sub->add_option("--sigma", c.sigma, "Kernel scale in feet (estimated when absent)");
  sub->add_option("--sigma-rule", c.sigma_rule, "mean-plus-std | mean");
  sub->add_option("--variant", c.variant,
                  "adjacency | environment | rank-one-lift | exp-adjacency | exp-environment | "
                  "spectral-angle");
  sub->add_option("--k", c.k, "Number of clusters");
  sub->add_option("--runs", c.runs, "k-means restarts");
  sub->add_option("--seed", c.seed, "Master seed");
  sub->add_option("--out", c.out, "Output directory")->required();
  sub->add_flag("--extended", c.extended, "Compute the full metric suite");
  sub->add_option("--kmeans-init", c.kmeans_init, "uniform | plusplus");
}

}  // namespace

void validate(const RunConfig& c) {
  if (std::find(kCommands.begin(), kCommands.end(), c.command) == kCommands.end()) {
    throw ConfigError("unknown command '" + c.command + "'");
  }
  if ((is_sweep(c.command) || c.command == "synth") && !c.seed) {
    throw ConfigError("--seed is required for '" + c.command + "'");
  }
  if (c.command != "synth" && c.roster.empty()) throw ConfigError("--roster is required");
  if (c.out.empty()) throw ConfigError("--out is required");
  if (!(c.alpha >= 0.0 && c.alpha <= 1.0)) throw ConfigError("--alpha must lie in [0, 1]");
  if (c.k == 0) throw ConfigError("--k must be positive");
  if (c.runs == 0) throw ConfigError("--runs must be positive");
  if (c.sigma && !(*c.sigma > 0.0)) throw ConfigError("--sigma must be positive");
  sigma_rule(c.sigma_rule);
  parse_social_variant(c.variant);
  kmeans_options(c);
  for (double v : c.alphas) {
    if (!(v >= 0.0 && v <= 1.0)) throw ConfigError("--alphas must lie in [0, 1]");
  }
  for (const auto* grid : {&c.ps, &c.qs}) {
    for (double v : *grid) {
      if (!(v >= 0.0 && v <= 1.0)) throw ConfigError("--ps/--qs must lie in [0, 1]");
    }
  }
  if (c.command == "synth") {
    if (c.gangs == 0 || c.size < 2) throw ConfigError("synth needs >= 1 gang of >= 2 members");
    if (!(c.spread > 0.0) || !(c.separation >= 0.0)) {
      throw ConfigError("--spread must be positive and --separation nonnegative");
    }
    NoiseParams(c.observed_p, c.observed_q);
  }
}

int run_command(const RunConfig& config, std::ostream& log, std::ostream& err) {
  try {
    validate(config);
    Outputs outputs(config.out);
    std::optional<double> sigma;
    if (config.command == "cluster") {
      sigma = cmd_cluster(config, outputs, err);
    } else if (config.command == "sweep-alpha") {
      sigma = cmd_sweep_alpha(config, outputs, err);
    } else if (config.command == "sweep-pq") {
      sigma = cmd_sweep_pq(config, outputs, err);
    } else if (config.command == "sweep-k") {
      sigma = cmd_sweep_k(config, outputs, err);
    } else if (config.command == "rankone") {
      sigma = cmd_rankone(config, outputs, err);
    } else if (config.command == "synth") {
      sigma = cmd_synth(config, outputs, err);
    } else {
      sigma = cmd_report_sparsity(config, outputs, err);
    }
    outputs.commit(config, sigma, log);
    return 0;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return 1;
  }
}

int run_cli(int argc, const char* const* argv, std::ostream& log, std::ostream& err) {
  RunConfig config;
  CLI::App app{"Geosocial spectral clustering and robustness experiments"};
  app.require_subcommand(1);
  app.set_version_flag("--version", version());

  auto* cluster = app.add_subcommand("cluster", "Cluster one roster and score it");
  add_common(cluster, config, true);
  cluster->add_option("--alpha", config.alpha, "Social weight in [0, 1]");

  auto* sweep_alpha = app.add_subcommand("sweep-alpha", "Metrics over a grid of alpha");
  add_common(sweep_alpha, config, true);
  sweep_alpha->add_option("--alphas", config.alphas, "Alpha grid")->delimiter(',');

  auto* sweep_pq = app.add_subcommand("sweep-pq", "Purity with S = GT(p, q) over p, q, alpha");
  add_common(sweep_pq, config, true);
  sweep_pq->add_option("--alphas", config.alphas, "Alpha grid")->delimiter(',');
  sweep_pq->add_option("--ps", config.ps, "p grid")->delimiter(',');
  sweep_pq->add_option("--qs", config.qs, "q grid")->delimiter(',');
  sweep_pq->add_flag("--anchor", config.anchor, "Report the reference line p*(q)");
  sweep_pq->add_option("--anchor-true-positives", config.anchor_true_positives);
  sweep_pq->add_option("--anchor-truth-links", config.anchor_truth_links);

  auto* sweep_k = app.add_subcommand("sweep-k", "z-Rand over a grid of k and alpha");
  add_common(sweep_k, config, true);
  sweep_k->add_option("--alphas", config.alphas, "Alpha grid")->delimiter(',');
  sweep_k->add_option("--ks", config.ks, "k grid")->delimiter(',');

  auto* rankone = app.add_subcommand("rankone", "Spectra before and after the rank-one lift");
  add_common(rankone, config, true);
  rankone->add_option("--alpha", config.alpha, "Social weight in [0, 1]");
  rankone->add_option("--m", config.m, "Number of leading eigenvalues to export");

  auto* synth = app.add_subcommand("synth", "Generate a synthetic roster and observed edges");
  synth->add_option("--seed", config.seed, "Master seed")->required();
  synth->add_option("--out", config.out, "Output directory")->required();
  synth->add_option("--gangs", config.gangs, "Number of gangs");
  synth->add_option("--size", config.size, "Members per gang");
  synth->add_option("--spread", config.spread, "Isotropic std per gang (feet)");
  synth->add_option("--separation", config.separation, "Lattice spacing in spreads");
  synth->add_option("--p", config.observed_p, "Kept fraction of true links");
  synth->add_option("--q", config.observed_q, "Fraction of kept links turned false");

  auto* sparsity = app.add_subcommand("report-sparsity", "Compare observed edges with labels");
  sparsity->add_option("--roster", config.roster, "Roster CSV")->required();
  sparsity->add_option("--edges", config.edges, "Edge CSV")->required();
  sparsity->add_option("--out", config.out, "Output directory")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    log << app.help();
    return 0;
  } catch (const CLI::CallForVersion&) {
    log << version() << "\n";
    return 0;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << "\n";
    return 2;
  }
  config.command = app.get_subcommands().front()->get_name();
  return run_command(config, log, err);
}

int run_cli(const std::vector<std::string>& args, std::ostream& log, std::ostream& err) {
  std::vector<const char*> argv{"geosocial"};
  for (const auto& a : args) argv.push_back(a.c_str());
  return run_cli(static_cast<int>(argv.size()), argv.data(), log, err);
}

}  // namespace geosocial::cli
