#pragma once

#include <Eigen/Dense>

#include <cstddef>
#include <cstdint>
#include <optional>
#include <random>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

namespace geosocial {

inline constexpr double kMetersPerFoot = 0.3048;

struct Point {
  double x = 0.0;
  double y = 0.0;
};

double distance(const Point& a, const Point& b);

struct Individual {
  std::string id;
  double x = 0.0;  // feet
  double y = 0.0;  // feet
  std::string gang;
};

// Ordered set of individuals. Positions 0..N-1 index every matrix built from it.
class Roster {
 public:
  Roster() = default;
  explicit Roster(std::vector<Individual> individuals);

  std::size_t size() const noexcept { return individuals_.size(); }
  bool empty() const noexcept { return individuals_.empty(); }

  const Individual& operator[](std::size_t i) const { return individuals_[i]; }
  const std::vector<Individual>& individuals() const noexcept { return individuals_; }

  Point point(std::size_t i) const { return {individuals_[i].x, individuals_[i].y}; }
  std::optional<std::size_t> position(std::string_view id) const;

  // Distinct gang labels in lexicographic order.
  std::vector<std::string> gangs() const;

 private:
  std::vector<Individual> individuals_;
  std::unordered_map<std::string, std::size_t> index_;
};

// Throws unless `m` is square, exactly symmetric and finite.
void check_symmetric(const Eigen::MatrixXd& m);

// Dense symmetric matrix; symmetry is exact and checked on construction.
class SymmetricMatrix {
 public:
  SymmetricMatrix() = default;
  explicit SymmetricMatrix(Eigen::MatrixXd entries);

  static SymmetricMatrix identity(std::size_t n);
  static SymmetricMatrix constant(std::size_t n, double value);

  // Evaluates f(i, j) for i <= j and mirrors it into (j, i).
  template <class F>
  static SymmetricMatrix generate(std::size_t n, F&& f) {
    Eigen::MatrixXd m(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(n));
    for (Eigen::Index j = 0; j < m.cols(); ++j) {
      for (Eigen::Index i = 0; i <= j; ++i) {
        const double v = f(static_cast<std::size_t>(i), static_cast<std::size_t>(j));
        m(i, j) = v;
        m(j, i) = v;
      }
    }
    return SymmetricMatrix(std::move(m));
  }

  std::size_t size() const noexcept { return static_cast<std::size_t>(m_.rows()); }
  double operator()(std::size_t i, std::size_t j) const {
    return m_(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j));
  }
  const Eigen::MatrixXd& dense() const noexcept { return m_; }

  double max_coeff() const { return m_.size() == 0 ? 0.0 : m_.maxCoeff(); }

  friend bool operator==(const SymmetricMatrix& a, const SymmetricMatrix& b) {
    return a.m_.rows() == b.m_.rows() && a.m_ == b.m_;
  }

 private:
  Eigen::MatrixXd m_;
};

// Hard assignment of N individuals to clusters 0..k-1. Empty clusters are legal
// at the type level; operations that forbid them say so.
struct Partition {
  std::size_t k = 0;
  std::vector<std::size_t> assign;

  std::size_t size() const noexcept { return assign.size(); }
  std::vector<std::size_t> cluster_sizes() const;
  std::size_t nonempty_clusters() const;

  friend bool operator==(const Partition&, const Partition&) = default;
};

// One cluster per distinct gang label, labels indexed lexicographically.
Partition partition_from_labels(const Roster& roster);

// Throws DimensionError / RangeError on a malformed partition.
void validate_partition(const Partition& p, std::size_t n);

// Master seed plus a derivation path. Equal (master, stream) pairs always produce
// identical engines; every extra path component yields an independent stream.
class RunSeed {
 public:
  RunSeed() = default;
  explicit RunSeed(std::uint64_t master) : master_(master) {}

  RunSeed derive(std::uint64_t component) const;
  RunSeed derive(std::string_view label) const;

  std::uint64_t master() const noexcept { return master_; }
  const std::vector<std::uint64_t>& stream() const noexcept { return stream_; }

  // Hash of (master, stream); the value used to seed engines.
  std::uint64_t value() const noexcept;
  std::mt19937_64 engine() const { return std::mt19937_64(value()); }

  friend bool operator==(const RunSeed&, const RunSeed&) = default;

 private:
  std::uint64_t master_ = 0;
  std::vector<std::uint64_t> stream_;
};

}  // namespace geosocial
