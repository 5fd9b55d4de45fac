#pragma once

#include "geosocial/model.hpp"

#include <cstddef>
#include <vector>

namespace geosocial {

// Leading eigenpairs of the random-walk operator D^-1 W.
struct SpectrumSlice {
  Eigen::VectorXd values;   // descending
  Eigen::MatrixXd vectors;  // n x k, unit 2-norm columns, largest-|component| positive

  std::size_t k() const noexcept { return static_cast<std::size_t>(values.size()); }
  // First `k` eigenpairs.
  SpectrumSlice leading(std::size_t k) const;
};

// One k-dimensional coordinate row per individual.
using EmbeddingMatrix = Eigen::MatrixXd;

SpectrumSlice normalized_spectrum(const SymmetricMatrix& w, std::size_t k);

// max_j ||D^-1 W v_j - lambda_j v_j|| / ||v_j||.
double max_relative_residual(const SymmetricMatrix& w, const SpectrumSlice& s);

enum class KMeansInit {
  UniformRows,  // k distinct rows, uniformly without replacement
  PlusPlus,
};

struct KMeansOptions {
  std::size_t max_iterations = 300;
  KMeansInit init = KMeansInit::UniformRows;
};

struct KMeansResult {
  Partition partition;
  Eigen::MatrixXd centroids;     // k x dim
  std::vector<double> sse;       // within-cluster SSE after each assignment step
  std::size_t iterations = 0;
  bool converged = false;
};

KMeansResult kmeans_detailed(const EmbeddingMatrix& rows, std::size_t k, const RunSeed& seed,
                             const KMeansOptions& options = {});

Partition kmeans(const EmbeddingMatrix& rows, std::size_t k, const RunSeed& seed,
                 const KMeansOptions& options = {});

struct PipelineResult {
  SpectrumSlice spectrum;
  std::vector<KMeansResult> runs;

  std::vector<Partition> partitions() const;
};

// One spectrum, `runs` k-means restarts seeded by seed.derive(restart).
PipelineResult cluster_pipeline_detailed(const SymmetricMatrix& w, std::size_t k,
                                         std::size_t runs, const RunSeed& seed,
                                         const KMeansOptions& options = {});

std::vector<Partition> cluster_pipeline(const SymmetricMatrix& w, std::size_t k,
                                        std::size_t runs, const RunSeed& seed,
                                        const KMeansOptions& options = {});

// Restarts on an already computed spectrum.
std::vector<KMeansResult> kmeans_restarts(const SpectrumSlice& spectrum, std::size_t runs,
                                          const RunSeed& seed, const KMeansOptions& options = {});

}  // namespace geosocial
