#include "geosocial/graph.hpp"

#include "geosocial/error.hpp"

#include <algorithm>
#include <array>
#include <cmath>

namespace geosocial {

KernelScale::KernelScale(double sigma) : sigma_(sigma) {
  if (!(sigma > 0.0) || !std::isfinite(sigma)) {
    throw ConfigError("kernel scale sigma must be positive and finite");
  }
}

namespace {

constexpr std::array<std::pair<SocialVariantKind, std::string_view>, 6> kVariantNames{{
    {SocialVariantKind::Adjacency, "adjacency"},
    {SocialVariantKind::Environment, "environment"},
    {SocialVariantKind::RankOneLift, "rank-one-lift"},
    {SocialVariantKind::ExpAdjacency, "exp-adjacency"},
    {SocialVariantKind::ExpEnvironment, "exp-environment"},
    {SocialVariantKind::SpectralAngle, "spectral-angle"},
}};

Eigen::Index idx(std::size_t i) { return static_cast<Eigen::Index>(i); }

}  // namespace

std::string_view to_string(SocialVariantKind kind) {
  for (const auto& [k, name] : kVariantNames) {
    if (k == kind) return name;
  }
  return "unknown";
}

SocialVariantKind parse_social_variant(std::string_view name) {
  for (const auto& [k, n] : kVariantNames) {
    if (n == name) return k;
  }
  throw ConfigError("unknown social variant '" + std::string(name) + "'");
}

const std::vector<SocialVariantKind>& all_social_variants() {
  static const std::vector<SocialVariantKind> kinds = [] {
    std::vector<SocialVariantKind> out;
    for (const auto& entry : kVariantNames) out.push_back(entry.first);
    return out;
  }();
  return kinds;
}

SymmetricMatrix build_adjacency(std::size_t n,
                                const std::vector<std::pair<std::size_t, std::size_t>>& edges) {
  Eigen::MatrixXd a = Eigen::MatrixXd::Identity(idx(n), idx(n));
  for (const auto& [i, j] : edges) {
    if (i >= n || j >= n) throw RangeError("edge endpoint outside roster");
    a(idx(i), idx(j)) = 1.0;
    a(idx(j), idx(i)) = 1.0;
  }
  return SymmetricMatrix(std::move(a));
}

SymmetricMatrix build_adjacency(const Roster& roster, const std::vector<Edge>& edges) {
  std::vector<std::pair<std::size_t, std::size_t>> positions;
  positions.reserve(edges.size());
  for (const auto& [a, b] : edges) {
    const auto i = roster.position(a);
    const auto j = roster.position(b);
    if (!i) throw IngestError("edge references unknown id '" + a + "'", 0);
    if (!j) throw IngestError("edge references unknown id '" + b + "'", 0);
    positions.emplace_back(*i, *j);
  }
  return build_adjacency(roster.size(), positions);
}

KernelScale estimate_sigma(const Roster& roster, const SymmetricMatrix& adjacency,
                           SigmaRule rule) {
  if (adjacency.size() != roster.size()) throw DimensionError("adjacency does not match roster");
  std::vector<double> d;
  for (std::size_t i = 0; i < roster.size(); ++i) {
    for (std::size_t j = i + 1; j < roster.size(); ++j) {
      if (adjacency(i, j) == 1.0) d.push_back(distance(roster.point(i), roster.point(j)));
    }
  }
  if (d.empty()) {
    throw UndefinedError("sigma undefined: no co-stopped pairs; supply sigma explicitly");
  }
  double sum = 0.0;
  for (double v : d) sum += v;
  const double mean = sum / static_cast<double>(d.size());
  double ss = 0.0;
  for (double v : d) ss += (v - mean) * (v - mean);
  const double stddev = std::sqrt(ss / static_cast<double>(d.size()));
  return KernelScale(rule == SigmaRule::Mean ? mean : mean + stddev);
}

SymmetricMatrix build_distance_kernel(const Roster& roster, KernelScale scale) {
  const double s2 = scale.sigma() * scale.sigma();
  return SymmetricMatrix::generate(roster.size(), [&](std::size_t i, std::size_t j) {
    if (i == j) return 1.0;
    const double dx = roster[i].x - roster[j].x;
    const double dy = roster[i].y - roster[j].y;
    return std::exp(-(dx * dx + dy * dy) / s2);
  });
}

SymmetricMatrix social_environment(const SymmetricMatrix& adjacency) {
  const Eigen::MatrixXd& a = adjacency.dense();
  const Eigen::VectorXd norms = a.colwise().norm().transpose();
  if ((norms.array() <= 0.0).any()) {
    throw ConfigError("social environment requires nonzero columns");
  }
  const Eigen::MatrixXd gram = a.transpose() * a;
  return SymmetricMatrix::generate(adjacency.size(), [&](std::size_t i, std::size_t j) {
    if (i == j) return 1.0;
    // Gram entries of a 0/1 matrix are exact integers; clamp rounding of the quotient.
    const double c = gram(idx(i), idx(j)) / (norms(idx(i)) * norms(idx(j)));
    return std::min(1.0, c);
  });
}

SymmetricMatrix social_variant(const SymmetricMatrix& adjacency, SocialVariantKind kind) {
  auto elementwise = [](const SymmetricMatrix& m, auto&& f) {
    return SymmetricMatrix::generate(m.size(),
                                     [&](std::size_t i, std::size_t j) { return f(m(i, j)); });
  };
  switch (kind) {
    case SocialVariantKind::Adjacency:
      return adjacency;
    case SocialVariantKind::Environment:
      return social_environment(adjacency);
    case SocialVariantKind::RankOneLift: {
      const double n = 1.0 / (adjacency.max_coeff() + 1.0);
      return elementwise(adjacency, [n](double v) { return n * (v + 1.0); });
    }
    case SocialVariantKind::ExpAdjacency:
      return elementwise(adjacency, [](double v) { return std::exp(v); });
    case SocialVariantKind::ExpEnvironment:
      return elementwise(social_environment(adjacency), [](double v) { return std::exp(v); });
    case SocialVariantKind::SpectralAngle:
      return elementwise(social_environment(adjacency), [](double v) {
        return std::exp(-std::acos(std::clamp(v, -1.0, 1.0)));
      });
  }
  throw ConfigError("unhandled social variant");
}

SymmetricMatrix build_affinity(const SymmetricMatrix& social, const SymmetricMatrix& kernel,
                               double alpha) {
  if (!(alpha >= 0.0 && alpha <= 1.0)) throw ConfigError("alpha must lie in [0, 1]");
  if (social.size() != kernel.size()) throw DimensionError("S and G differ in size");
  if (social.size() > 0 && social.dense().minCoeff() < 0.0) {
    throw ConfigError("social matrix has negative entries");
  }
  if (alpha == 0.0) return kernel;
  if (alpha == 1.0) return social;
  return SymmetricMatrix::generate(social.size(), [&](std::size_t i, std::size_t j) {
    return alpha * social(i, j) + (1.0 - alpha) * kernel(i, j);
  });
}

std::vector<std::pair<std::size_t, std::size_t>> upper_links(const SymmetricMatrix& m) {
  std::vector<std::pair<std::size_t, std::size_t>> out;
  for (std::size_t i = 0; i < m.size(); ++i) {
    for (std::size_t j = i + 1; j < m.size(); ++j) {
      if (m(i, j) != 0.0) out.emplace_back(i, j);
    }
  }
  return out;
}

}  // namespace geosocial
