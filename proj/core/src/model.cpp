#include "geosocial/model.hpp"

#include "geosocial/error.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <set>

namespace geosocial {

double distance(const Point& a, const Point& b) { return std::hypot(a.x - b.x, a.y - b.y); }

Roster::Roster(std::vector<Individual> individuals) : individuals_(std::move(individuals)) {
  index_.reserve(individuals_.size());
  for (std::size_t i = 0; i < individuals_.size(); ++i) {
    const Individual& ind = individuals_[i];
    if (!std::isfinite(ind.x) || !std::isfinite(ind.y)) {
      throw ConfigError("individual '" + ind.id + "' has non-finite coordinates");
    }
    if (!index_.emplace(ind.id, i).second) {
      throw ConfigError("duplicate individual id '" + ind.id + "'");
    }
  }
}

std::optional<std::size_t> Roster::position(std::string_view id) const {
  auto it = index_.find(std::string(id));
  if (it == index_.end()) return std::nullopt;
  return it->second;
}

std::vector<std::string> Roster::gangs() const {
  std::set<std::string> labels;
  for (const auto& ind : individuals_) labels.insert(ind.gang);
  return {labels.begin(), labels.end()};
}

void check_symmetric(const Eigen::MatrixXd& m) {
  if (m.rows() != m.cols()) {
    throw DimensionError("matrix is not square");
  }
  for (Eigen::Index j = 0; j < m.cols(); ++j) {
    for (Eigen::Index i = 0; i <= j; ++i) {
      if (!std::isfinite(m(i, j))) throw ConfigError("matrix has a non-finite entry");
      if (m(i, j) != m(j, i)) throw ConfigError("matrix is not symmetric");
    }
  }
}

SymmetricMatrix::SymmetricMatrix(Eigen::MatrixXd entries) : m_(std::move(entries)) {
  check_symmetric(m_);
}

SymmetricMatrix SymmetricMatrix::identity(std::size_t n) {
  const auto en = static_cast<Eigen::Index>(n);
  return SymmetricMatrix(Eigen::MatrixXd::Identity(en, en));
}

SymmetricMatrix SymmetricMatrix::constant(std::size_t n, double value) {
  const auto en = static_cast<Eigen::Index>(n);
  return SymmetricMatrix(Eigen::MatrixXd::Constant(en, en, value));
}

std::vector<std::size_t> Partition::cluster_sizes() const {
  std::vector<std::size_t> sizes(k, 0);
  for (std::size_t c : assign) ++sizes.at(c);
  return sizes;
}

std::size_t Partition::nonempty_clusters() const {
  const auto sizes = cluster_sizes();
  return static_cast<std::size_t>(
      std::count_if(sizes.begin(), sizes.end(), [](std::size_t s) { return s > 0; }));
}

Partition partition_from_labels(const Roster& roster) {
  if (roster.empty()) throw ConfigError("roster is empty");
  const auto labels = roster.gangs();
  std::map<std::string, std::size_t> index;
  for (std::size_t i = 0; i < labels.size(); ++i) index.emplace(labels[i], i);
  Partition p{labels.size(), {}};
  p.assign.reserve(roster.size());
  for (const auto& ind : roster.individuals()) p.assign.push_back(index.at(ind.gang));
  return p;
}

void validate_partition(const Partition& p, std::size_t n) {
  if (p.assign.size() != n) {
    throw DimensionError("partition has " + std::to_string(p.assign.size()) +
                         " assignments, expected " + std::to_string(n));
  }
  for (std::size_t i = 0; i < n; ++i) {
    if (p.assign[i] >= p.k) {
      throw RangeError("cluster index " + std::to_string(p.assign[i]) + " of individual " +
                       std::to_string(i) + " is outside 0.." + std::to_string(p.k) + "-1");
    }
  }
}

namespace {

// splitmix64 finalizer.
std::uint64_t mix(std::uint64_t z) {
  z += 0x9e3779b97f4a7c15ULL;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

std::uint64_t fnv1a(std::string_view s) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : s) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

}  // namespace

RunSeed RunSeed::derive(std::uint64_t component) const {
  RunSeed out = *this;
  out.stream_.push_back(component);
  return out;
}

RunSeed RunSeed::derive(std::string_view label) const { return derive(fnv1a(label)); }

std::uint64_t RunSeed::value() const noexcept {
  std::uint64_t h = mix(master_);
  for (std::uint64_t c : stream_) h = mix(h ^ mix(c + 0x632be59bd9b4e019ULL));
  return h;
}

}  // namespace geosocial

