#pragma once

#include "geosocial/model.hpp"

#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace geosocial {

using Edge = std::pair<std::string, std::string>;

// Gaussian kernel length scale in feet; always strictly positive.
class KernelScale {
 public:
  explicit KernelScale(double sigma);
  double sigma() const noexcept { return sigma_; }

 private:
  double sigma_;
};

enum class SocialVariantKind {
  Adjacency,
  Environment,
  RankOneLift,
  ExpAdjacency,
  ExpEnvironment,
  SpectralAngle,
};

std::string_view to_string(SocialVariantKind kind);
// Accepts the names produced by to_string (case-sensitive, kebab-case).
SocialVariantKind parse_social_variant(std::string_view name);
const std::vector<SocialVariantKind>& all_social_variants();

enum class SigmaRule {
  MeanPlusStd,  // mean + population std of co-stop distances
  Mean,         // mean co-stop distance only
};

// 0/1 co-stop matrix with unit diagonal. Duplicate and reversed edges collapse.
SymmetricMatrix build_adjacency(const Roster& roster, const std::vector<Edge>& edges);

// Same, from roster positions.
SymmetricMatrix build_adjacency(std::size_t n,
                                const std::vector<std::pair<std::size_t, std::size_t>>& edges);

// Scale from the distances of linked pairs (i < j, A(i,j) = 1), summed in roster order.
// Throws UndefinedError when A has no off-diagonal link.
KernelScale estimate_sigma(const Roster& roster, const SymmetricMatrix& adjacency,
                           SigmaRule rule = SigmaRule::MeanPlusStd);

// G(i,j) = exp(-d(i,j)^2 / sigma^2).
SymmetricMatrix build_distance_kernel(const Roster& roster, KernelScale scale);

// Cosine similarity between columns of A.
SymmetricMatrix social_environment(const SymmetricMatrix& adjacency);

SymmetricMatrix social_variant(const SymmetricMatrix& adjacency, SocialVariantKind kind);

// W = alpha S + (1 - alpha) G.
SymmetricMatrix build_affinity(const SymmetricMatrix& social, const SymmetricMatrix& kernel,
                               double alpha);

// Strictly-upper-triangular positions (i < j) holding a one in a 0/1 matrix.
std::vector<std::pair<std::size_t, std::size_t>> upper_links(const SymmetricMatrix& m);

}  // namespace geosocial
