#include "geosocial/rankone.hpp"

#include "geosocial/error.hpp"
#include "geosocial/spectral.hpp"

#include <Eigen/Eigenvalues>

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <numeric>

namespace geosocial {

namespace {

Eigen::Index idx(std::size_t i) { return static_cast<Eigen::Index>(i); }

struct Rotation {
  Eigen::Index from;  // component zeroed
  Eigen::Index into;  // component receiving the norm
  double c;
  double s;
};

// Deflation of diag(d) + z z^T: rotations that zero z inside groups of repeated d,
// and the mask of slots whose z is negligible afterwards.
struct Deflation {
  Eigen::VectorXd z;  // rotated
  std::vector<Rotation> rotations;
  std::vector<char> deflated;
};

Deflation deflate(const Eigen::VectorXd& d, const Eigen::VectorXd& z) {
  const Eigen::Index n = d.size();
  if (z.size() != n) throw DimensionError("d and z differ in length");
  for (Eigen::Index i = 1; i < n; ++i) {
    if (d(i) < d(i - 1)) throw ConfigError("eigenvalues must be sorted ascending");
  }
  Deflation out{z, {}, std::vector<char>(static_cast<std::size_t>(n), 0)};
  if (n == 0) return out;
  const double eps = std::numeric_limits<double>::epsilon();
  const double tol = 8.0 * eps * std::max(d.cwiseAbs().maxCoeff(), z.cwiseAbs().maxCoeff());

  Eigen::Index last = -1;  // previous slot still carrying weight
  for (Eigen::Index i = 0; i < n; ++i) {
    if (std::abs(out.z(i)) <= tol) {
      out.deflated[static_cast<std::size_t>(i)] = 1;
      continue;
    }
    if (last >= 0) {
      // Rotating the weight of `last` into i leaves the off-diagonal c s (d_i - d_last);
      // when that is negligible, `last` becomes an eigenvector.
      const double r = std::hypot(out.z(last), out.z(i));
      const double c = out.z(i) / r;
      const double s = out.z(last) / r;
      if (std::abs(c * s * (d(i) - d(last))) > tol) {
        last = i;
        continue;
      }
      out.rotations.push_back({last, i, c, s});
      out.z(last) = 0.0;
      out.z(i) = r;
      out.deflated[static_cast<std::size_t>(last)] = 1;
    }
    last = i;
  }
  return out;
}

struct Root {
  std::size_t origin;  // pole the root is measured from
  double tau;          // lambda - delta[origin]

  double value(const std::vector<double>& delta) const { return delta[origin] + tau; }
};

// Root of 1 + sum w_j / (delta_j - lambda) in the open interval right of delta[t].
// Works in the shifted variable tau = lambda - origin with origin the nearer pole.
Root secular_root(const std::vector<double>& delta, const std::vector<double>& weight,
                    std::size_t t, double weight_sum) {
  const std::size_t r = delta.size();
  const bool last = t + 1 == r;
  const double gap = last ? weight_sum : delta[t + 1] - delta[t];

  auto f_at = [&](std::size_t origin, double tau) {
    double f = 1.0;
    for (std::size_t j = 0; j < r; ++j) f += weight[j] / ((delta[j] - delta[origin]) - tau);
    return f;
  };
  auto fprime_at = [&](std::size_t origin, double tau) {
    double g = 0.0;
    for (std::size_t j = 0; j < r; ++j) {
      const double diff = (delta[j] - delta[origin]) - tau;
      g += weight[j] / (diff * diff);
    }
    return g;
  };

  std::size_t origin = t;
  double lo = 0.0;
  double hi = gap;
  if (!last) {
    if (f_at(t, 0.5 * gap) < 0.0) {
      origin = t + 1;
      lo = -0.5 * gap;
      hi = 0.0;
    } else {
      hi = 0.5 * gap;
    }
  }
  // Bisection until the bracket stops shrinking, then safeguarded Newton polish.
  for (int it = 0; it < 200; ++it) {
    const double mid = 0.5 * (lo + hi);
    if (mid <= lo || mid >= hi) break;
    if (hi - lo <= 1e-14 * std::max(std::abs(lo), std::abs(hi))) break;
    const double f = f_at(origin, mid);
    if (f < 0.0) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  double tau = 0.5 * (lo + hi);
  for (int it = 0; it < 3; ++it) {
    const double g = fprime_at(origin, tau);
    if (!(g > 0.0) || !std::isfinite(g)) break;
    const double next = tau - f_at(origin, tau) / g;
    if (!(next > lo && next < hi)) break;
    tau = next;
  }
  return {origin, tau};
}

struct LiveSystem {
  std::vector<std::size_t> slots;
  std::vector<double> delta;
  std::vector<double> weight;
  std::vector<Root> roots;
};

LiveSystem solve_live(const Eigen::VectorXd& d, const Deflation& defl) {
  LiveSystem sys;
  double weight_sum = 0.0;
  for (Eigen::Index i = 0; i < d.size(); ++i) {
    if (defl.deflated[static_cast<std::size_t>(i)]) continue;
    sys.slots.push_back(static_cast<std::size_t>(i));
    sys.delta.push_back(d(i));
    sys.weight.push_back(defl.z(i) * defl.z(i));
    weight_sum += sys.weight.back();
  }
  for (std::size_t t = 0; t < sys.slots.size(); ++t) {
    sys.roots.push_back(secular_root(sys.delta, sys.weight, t, weight_sum));
  }
  return sys;
}

}  // namespace

EigenDecomposition eigen_decompose(const SymmetricMatrix& w) {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(w.dense());
  if (solver.info() != Eigen::Success) throw Error("symmetric eigensolver failed");
  return {solver.eigenvectors(), solver.eigenvalues()};
}

std::vector<double> secular_eigenvalues(const Eigen::VectorXd& d, const Eigen::VectorXd& z) {
  const Deflation defl = deflate(d, z);
  const LiveSystem sys = solve_live(d, defl);
  std::vector<double> lambda(d.data(), d.data() + d.size());
  for (std::size_t t = 0; t < sys.slots.size(); ++t) lambda[sys.slots[t]] = sys.roots[t].value(sys.delta);
  return lambda;
}

Eigen::MatrixXd updated_eigenvectors(const Eigen::MatrixXd& q, const Eigen::VectorXd& d,
                                     const std::vector<double>& lambda, const Eigen::VectorXd& z) {
  const Eigen::Index n = d.size();
  if (q.rows() != n || q.cols() != n || idx(lambda.size()) != n) {
    throw DimensionError("Q, d, lambda and z must agree in size");
  }
  const Deflation defl = deflate(d, z);
  Eigen::MatrixXd rotated = q;
  for (const Rotation& rot : defl.rotations) {
    // Q' = Q G^T keeps Q diag(d) Q^T (equal d within the group) and maps z to G z.
    const Eigen::VectorXd a = rotated.col(rot.from);
    const Eigen::VectorXd b = rotated.col(rot.into);
    rotated.col(rot.from) = rot.c * a - rot.s * b;
    rotated.col(rot.into) = rot.s * a + rot.c * b;
  }

  // Differences d_j - lambda_i are taken in the solver's shifted variable when lambda_i
  // is the root it produces; rounding lambda_i first would destroy them near a pole.
  const LiveSystem sys = solve_live(d, defl);
  Eigen::MatrixXd x = Eigen::MatrixXd::Zero(n, n);
  for (std::size_t t = 0; t < sys.slots.size(); ++t) {
    const std::size_t i = sys.slots[t];
    const Root& root = sys.roots[t];
    const bool own = root.value(sys.delta) == lambda[i];
    for (std::size_t u = 0; u < sys.slots.size(); ++u) {
      const double diff = own ? (sys.delta[u] - sys.delta[root.origin]) - root.tau
                              : sys.delta[u] - lambda[i];
      if (own ? !(diff != 0.0 && std::isfinite(diff)) : std::abs(diff) < 1e-12) {
        throw IllConditionedError("updated eigenvalue coincides with an old eigenvalue");
      }
      x(idx(sys.slots[u]), idx(i)) = defl.z(idx(sys.slots[u])) / diff;
    }
    x.col(idx(i)).normalize();
  }
  for (Eigen::Index i = 0; i < n; ++i) {
    if (defl.deflated[static_cast<std::size_t>(i)]) x(i, i) = 1.0;
  }
  return rotated * x;
}

bool interlaces(std::vector<double> before, std::vector<double> after, double tol) {
  if (before.size() != after.size()) return false;
  std::sort(before.begin(), before.end(), std::greater<>());
  std::sort(after.begin(), after.end(), std::greater<>());
  for (std::size_t i = 0; i < before.size(); ++i) {
    if (after[i] < before[i] - tol) return false;
    if (i > 0 && after[i] > before[i - 1] + tol) return false;
  }
  return true;
}

UpdateReport shift_report(const SymmetricMatrix& w, std::size_t m) {
  const SymmetricMatrix lifted = SymmetricMatrix::generate(
      w.size(), [&](std::size_t i, std::size_t j) { return w(i, j) + 1.0; });
  return shift_report(w, lifted, m);
}

UpdateReport shift_report(const SymmetricMatrix& w, const SymmetricMatrix& lifted, std::size_t m) {
  const std::size_t n = w.size();
  if (m > n) throw ConfigError("m exceeds the matrix dimension");
  if (lifted.size() != n) throw DimensionError("lifted matrix differs in size");

  const EigenDecomposition base = eigen_decompose(w);
  const Eigen::VectorXd z = base.q.transpose() * Eigen::VectorXd::Ones(idx(n));
  UpdateReport out;
  out.lambda = secular_eigenvalues(base.d, z);
  out.updated_vectors = updated_eigenvectors(base.q, base.d, out.lambda, z);
  out.trace_gap = std::accumulate(out.lambda.begin(), out.lambda.end(), 0.0) - base.d.sum();
  out.interlacing_ok =
      interlaces(std::vector<double>(base.d.data(), base.d.data() + n), out.lambda);

  if (m > 0) {
    const SpectrumSlice before = normalized_spectrum(w, m);
    const SpectrumSlice after = normalized_spectrum(lifted, m);
    out.before.assign(before.values.data(), before.values.data() + m);
    out.after.assign(after.values.data(), after.values.data() + m);
  }
  return out;
}

}  // namespace geosocial
