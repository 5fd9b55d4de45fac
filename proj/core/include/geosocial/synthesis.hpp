#pragma once

#include "geosocial/model.hpp"

#include <cstdint>
#include <vector>

namespace geosocial {

// Keep a fraction p of the true links, then turn a fraction q of the kept ones
// into false links. Both fractions lie in [0, 1].
class NoiseParams {
 public:
  NoiseParams(double p, double q);
  double p() const noexcept { return p_; }
  double q() const noexcept { return q_; }

 private:
  double p_;
  double q_;
};

struct SynthConfig {
  std::vector<std::size_t> sizes;  // members per gang, each >= 2
  std::vector<Point> centers;      // feet
  std::vector<double> spread;      // isotropic std per gang, feet, > 0
  RunSeed seed;

  std::size_t gangs() const noexcept { return sizes.size(); }
};

// `gangs` equal-size gangs with centres on a square lattice whose spacing is
// `separation` spreads.
SynthConfig lattice_config(std::size_t gangs, std::size_t size, double spread, double separation,
                           RunSeed seed);

// 0/1 matrix linking members of the same cluster, unit diagonal.
SymmetricMatrix gt_matrix(const Partition& truth);

// round(x) with halves rounded up, for nonnegative x.
std::size_t round_half_up(double x);

struct DegradeCounts {
  std::size_t truth_links = 0;    // strictly-upper ones of the input
  std::size_t kept = 0;           // after the p stage
  std::size_t swapped = 0;        // ones turned into false links by the q stage
  std::size_t true_positives = 0; // kept - swapped
};

// GT(p, q). Stage one zeroes round((1-p) T) of the T strictly-upper ones; stage two
// zeroes round(q K) of the K survivors and sets as many strictly-upper zeros of the
// input to one. Throws InfeasibleNoiseError when the input has too few zeros.
SymmetricMatrix degrade(const SymmetricMatrix& gt, const NoiseParams& noise, const RunSeed& seed,
                        DegradeCounts* counts = nullptr);

// Members drawn from N(center, spread^2 I); ids "p00000", ..., gangs "gang00", ...
Roster synth_roster(const SynthConfig& cfg);

struct SparsityReport {
  std::size_t n = 0;
  std::size_t truth_links = 0;         // strictly-upper ones of gt
  std::size_t observed_links = 0;      // strictly-upper ones of A
  std::size_t true_positives = 0;
  double recall = 0.0;                 // gt ones present in A
  double false_positive_rate = 0.0;    // A ones absent from gt
  double true_negative_rate = 0.0;     // gt zeros that are zeros in A
  double false_negative_share = 0.0;   // A zeros that are gt ones
  double mean_degree = 0.0;            // off-diagonal ones per node in A
  double degree_std = 0.0;             // population std
  std::size_t max_degree = 0;
  std::size_t isolated = 0;
};

SparsityReport sparsity_report(const SymmetricMatrix& observed, const SymmetricMatrix& gt);

}  // namespace geosocial
