#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

namespace geosocial::cli {

inline constexpr std::uint64_t kDefaultClusterSeed = 20130601;

struct RunConfig {
  std::string command;
  std::filesystem::path roster;
  std::optional<std::filesystem::path> edges;
  std::optional<double> sigma;  // feet
  std::string sigma_rule = "mean-plus-std";
  std::string variant = "adjacency";
  double alpha = 0.4;
  std::size_t k = 31;
  std::size_t runs = 10;
  std::optional<std::uint64_t> seed;
  std::filesystem::path out;
  bool extended = false;
  std::string kmeans_init = "uniform";

  std::vector<double> alphas;
  std::vector<double> ps;
  std::vector<double> qs;
  std::vector<std::size_t> ks;
  bool anchor = false;
  double anchor_true_positives = 423.0;
  double anchor_truth_links = 15904.0;

  std::size_t m = 100;  // rankone spectrum length

  // synth
  std::size_t gangs = 10;
  std::size_t size = 30;
  double spread = 1000.0;      // feet
  double separation = 8.0;     // in spreads
  double observed_p = 0.0266 / (1.0 - 0.1132);
  double observed_q = 0.1132;
};

// Rejects invalid combinations before any computation.
void validate(const RunConfig& config);

// Executes one validated command; writes artifacts under config.out.
// Returns 0 on success, 1 on a runtime error (diagnostic on `err`).
int run_command(const RunConfig& config, std::ostream& log, std::ostream& err);

// Parses argv (subcommand first) and runs it. Usage errors return 2.
int run_cli(int argc, const char* const* argv, std::ostream& log, std::ostream& err);
int run_cli(const std::vector<std::string>& args, std::ostream& log, std::ostream& err);

}  // namespace geosocial::cli
