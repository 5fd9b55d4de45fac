#include "geosocial/spectral.hpp"

#include "geosocial/error.hpp"

#include <Eigen/Eigenvalues>

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

namespace geosocial {

namespace {

Eigen::Index idx(std::size_t i) { return static_cast<Eigen::Index>(i); }

void fix_sign(Eigen::Ref<Eigen::VectorXd> v) {
  Eigen::Index best = 0;
  for (Eigen::Index i = 1; i < v.size(); ++i) {
    if (std::abs(v(i)) > std::abs(v(best))) best = i;
  }
  if (v(best) < 0.0) v = -v;
}

}  // namespace

SpectrumSlice SpectrumSlice::leading(std::size_t k) const {
  if (k == 0 || k > this->k()) throw ConfigError("requested more eigenpairs than available");
  return {values.head(idx(k)), vectors.leftCols(idx(k))};
}

SpectrumSlice normalized_spectrum(const SymmetricMatrix& w, std::size_t k) {
  const std::size_t n = w.size();
  if (k == 0 || k > n) throw ConfigError("k must lie in 1..n");
  const Eigen::MatrixXd& m = w.dense();
  if (m.minCoeff() < 0.0) throw ConfigError("affinity has negative entries");

  const Eigen::VectorXd degree = m.rowwise().sum();
  for (Eigen::Index i = 0; i < degree.size(); ++i) {
    if (!(degree(i) > 0.0)) {
      throw DegenerateDegreeError("row " + std::to_string(i) + " of the affinity sums to zero");
    }
  }
  const Eigen::VectorXd inv_sqrt = degree.array().rsqrt();
  Eigen::MatrixXd sym = inv_sqrt.asDiagonal() * m * inv_sqrt.asDiagonal();
  // Restore exact symmetry lost to rounding of the two diagonal scalings.
  sym = 0.5 * (sym + sym.transpose()).eval();

  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(sym);
  if (solver.info() != Eigen::Success) throw Error("symmetric eigensolver failed");

  SpectrumSlice out;
  out.values.resize(idx(k));
  out.vectors.resize(idx(n), idx(k));
  for (std::size_t j = 0; j < k; ++j) {
    const Eigen::Index src = idx(n - 1 - j);  // solver is ascending
    out.values(idx(j)) = solver.eigenvalues()(src);
    Eigen::VectorXd v = inv_sqrt.cwiseProduct(solver.eigenvectors().col(src));
    v.normalize();
    fix_sign(v);
    out.vectors.col(idx(j)) = v;
  }
  return out;
}

double max_relative_residual(const SymmetricMatrix& w, const SpectrumSlice& s) {
  const Eigen::MatrixXd& m = w.dense();
  const Eigen::VectorXd inv_degree = m.rowwise().sum().cwiseInverse();
  double worst = 0.0;
  for (Eigen::Index j = 0; j < s.vectors.cols(); ++j) {
    const Eigen::VectorXd v = s.vectors.col(j);
    const Eigen::VectorXd r = inv_degree.asDiagonal() * (m * v) - s.values(j) * v;
    worst = std::max(worst, r.norm() / v.norm());
  }
  return worst;
}

namespace {

struct Assignment {
  std::vector<std::size_t> labels;
  double sse = 0.0;
};

Assignment assign_nearest(const Eigen::MatrixXd& rows, const Eigen::MatrixXd& centroids) {
  Assignment a;
  a.labels.resize(static_cast<std::size_t>(rows.rows()));
  for (Eigen::Index i = 0; i < rows.rows(); ++i) {
    double best = std::numeric_limits<double>::infinity();
    Eigen::Index arg = 0;
    for (Eigen::Index c = 0; c < centroids.rows(); ++c) {
      const double d = (rows.row(i) - centroids.row(c)).squaredNorm();
      if (d < best) {
        best = d;
        arg = c;
      }
    }
    a.labels[static_cast<std::size_t>(i)] = static_cast<std::size_t>(arg);
    a.sse += best;
  }
  return a;
}

std::vector<std::size_t> seed_uniform(std::size_t n, std::size_t k, std::mt19937_64& rng) {
  // Partial Fisher-Yates: first k entries are a uniform k-subset in uniform order.
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  for (std::size_t i = 0; i < k; ++i) {
    std::uniform_int_distribution<std::size_t> pick(i, n - 1);
    std::swap(order[i], order[pick(rng)]);
  }
  order.resize(k);
  return order;
}

std::vector<std::size_t> seed_plus_plus(const Eigen::MatrixXd& rows, std::size_t k,
                                        std::mt19937_64& rng) {
  const auto n = static_cast<std::size_t>(rows.rows());
  std::vector<std::size_t> chosen;
  std::vector<char> taken(n, 0);
  std::uniform_int_distribution<std::size_t> first(0, n - 1);
  chosen.push_back(first(rng));
  taken[chosen.back()] = 1;
  std::vector<double> d2(n, std::numeric_limits<double>::infinity());
  while (chosen.size() < k) {
    const auto last = idx(chosen.back());
    double total = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      d2[i] = std::min(d2[i], (rows.row(idx(i)) - rows.row(last)).squaredNorm());
      if (!taken[i]) total += d2[i];
    }
    std::size_t next = n;
    if (total > 0.0) {
      std::uniform_real_distribution<double> u(0.0, total);
      double r = u(rng);
      for (std::size_t i = 0; i < n; ++i) {
        if (taken[i]) continue;
        next = i;
        r -= d2[i];
        if (r <= 0.0) break;
      }
    } else {
      // Every remaining row duplicates a chosen one; fall back to the first free row.
      for (std::size_t i = 0; i < n && next == n; ++i) {
        if (!taken[i]) next = i;
      }
    }
    chosen.push_back(next);
    taken[next] = 1;
  }
  return chosen;
}

}  // namespace

KMeansResult kmeans_detailed(const EmbeddingMatrix& rows, std::size_t k, const RunSeed& seed,
                             const KMeansOptions& options) {
  const auto n = static_cast<std::size_t>(rows.rows());
  if (k == 0) throw ConfigError("k must be at least 1");
  if (k > n) throw ConfigError("k = " + std::to_string(k) + " exceeds the number of rows");

  auto rng = seed.engine();
  const auto seeds = options.init == KMeansInit::PlusPlus ? seed_plus_plus(rows, k, rng)
                                                          : seed_uniform(n, k, rng);
  KMeansResult result;
  result.centroids.resize(idx(k), rows.cols());
  for (std::size_t c = 0; c < k; ++c) result.centroids.row(idx(c)) = rows.row(idx(seeds[c]));

  Assignment current = assign_nearest(rows, result.centroids);
  result.sse.push_back(current.sse);

  while (result.iterations < options.max_iterations) {
    ++result.iterations;

    Eigen::MatrixXd sums = Eigen::MatrixXd::Zero(idx(k), rows.cols());
    std::vector<std::size_t> counts(k, 0);
    for (std::size_t i = 0; i < n; ++i) {
      sums.row(idx(current.labels[i])) += rows.row(idx(i));
      ++counts[current.labels[i]];
    }
    for (std::size_t c = 0; c < k; ++c) {
      if (counts[c] > 0) result.centroids.row(idx(c)) = sums.row(idx(c)) / double(counts[c]);
    }
    // Empty clusters take the row farthest from its own centroid. Each reseed claims a
    // distinct row so two empty clusters never collapse onto one point.
    std::vector<char> claimed(n, 0);
    for (std::size_t c = 0; c < k; ++c) {
      if (counts[c] > 0) continue;
      double far = 0.0;
      std::size_t arg = n;
      for (std::size_t i = 0; i < n; ++i) {
        if (claimed[i]) continue;
        const double d =
            (rows.row(idx(i)) - result.centroids.row(idx(current.labels[i]))).squaredNorm();
        if (d > far) {
          far = d;
          arg = i;
        }
      }
      if (arg < n) {
        claimed[arg] = 1;
        result.centroids.row(idx(c)) = rows.row(idx(arg));
      }
    }

    Assignment next = assign_nearest(rows, result.centroids);
    result.sse.push_back(next.sse);
    const bool unchanged = next.labels == current.labels;
    current = std::move(next);
    if (unchanged) {
      result.converged = true;
      break;
    }
  }
  result.partition = Partition{k, std::move(current.labels)};
  return result;
}

Partition kmeans(const EmbeddingMatrix& rows, std::size_t k, const RunSeed& seed,
                 const KMeansOptions& options) {
  return kmeans_detailed(rows, k, seed, options).partition;
}

std::vector<Partition> PipelineResult::partitions() const {
  std::vector<Partition> out;
  out.reserve(runs.size());
  for (const auto& r : runs) out.push_back(r.partition);
  return out;
}

std::vector<KMeansResult> kmeans_restarts(const SpectrumSlice& spectrum, std::size_t runs,
                                          const RunSeed& seed, const KMeansOptions& options) {
  if (runs == 0) throw ConfigError("runs must be at least 1");
  std::vector<KMeansResult> out;
  out.reserve(runs);
  for (std::size_t r = 0; r < runs; ++r) {
    out.push_back(kmeans_detailed(spectrum.vectors, spectrum.k(), seed.derive(r), options));
  }
  return out;
}

PipelineResult cluster_pipeline_detailed(const SymmetricMatrix& w, std::size_t k,
                                         std::size_t runs, const RunSeed& seed,
                                         const KMeansOptions& options) {
  if (runs == 0) throw ConfigError("runs must be at least 1");
  PipelineResult out;
  out.spectrum = normalized_spectrum(w, k);
  out.runs = kmeans_restarts(out.spectrum, runs, seed, options);
  return out;
}

std::vector<Partition> cluster_pipeline(const SymmetricMatrix& w, std::size_t k,
                                        std::size_t runs, const RunSeed& seed,
                                        const KMeansOptions& options) {
  return cluster_pipeline_detailed(w, k, runs, seed, options).partitions();
}

}  // namespace geosocial
