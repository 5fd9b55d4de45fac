#include <doctest.h>

#include "support/oracles.hpp"

#include <geosocial/error.hpp>
#include <geosocial/rankone.hpp>

#include <Eigen/Eigenvalues>

#include <algorithm>
#include <cmath>
#include <random>

using namespace geosocial;

TEST_SUITE("rankone") {

TEST_CASE("secular roots of the 2x2 example") {
  Eigen::Vector2d d(1, 2), z(1, 1);
  auto lambda = secular_eigenvalues(d, z);
  REQUIRE(lambda.size() == 2);
  CHECK(lambda[0] == doctest::Approx((5 - std::sqrt(5.0)) / 2).epsilon(1e-14));
  CHECK(lambda[1] == doctest::Approx((5 + std::sqrt(5.0)) / 2).epsilon(1e-14));

  Eigen::Matrix2d m;
  m << 2, 1, 1, 3;
  Eigen::SelfAdjointEigenSolver<Eigen::Matrix2d> es(m);
  auto x = updated_eigenvectors(Eigen::MatrixXd::Identity(2, 2), d, lambda, z);
  for (int i = 0; i < 2; ++i) {
    CHECK(lambda[std::size_t(i)] == doctest::Approx(es.eigenvalues()(i)).epsilon(1e-14));
    CHECK(oracle::line_angle(x.col(i), es.eigenvectors().col(i)) <= 1e-10);
  }
}

TEST_CASE("zero update leaves everything unchanged") {
  Eigen::VectorXd d(4);
  d << -1, 0.5, 2, 3;
  Eigen::VectorXd z = Eigen::VectorXd::Zero(4);
  auto lambda = secular_eigenvalues(d, z);
  for (int i = 0; i < 4; ++i) CHECK(lambda[std::size_t(i)] == d(i));
  std::mt19937_64 rng(1);
  Eigen::HouseholderQR<Eigen::MatrixXd> qr(oracle::random_symmetric(4, rng));
  Eigen::MatrixXd q = qr.householderQ();
  CHECK((updated_eigenvectors(q, d, lambda, z) - q).cwiseAbs().maxCoeff() <= 1e-15);
}

TEST_CASE("trace identity and interlacing of secular roots") {
  std::mt19937_64 rng(2);
  std::normal_distribution<double> g;
  for (int trial = 0; trial < 30; ++trial) {
    const int n = 2 + trial;
    Eigen::VectorXd d(n), z(n);
    for (int i = 0; i < n; ++i) {
      d(i) = g(rng);
      z(i) = g(rng);
    }
    std::sort(d.data(), d.data() + n);
    auto lambda = secular_eigenvalues(d, z);
    double sum = 0;
    for (double l : lambda) sum += l;
    CHECK(sum == doctest::Approx(d.sum() + z.squaredNorm()).epsilon(1e-10));
    for (int i = 0; i < n; ++i) {
      CHECK(lambda[std::size_t(i)] >= d(i) - 1e-12);
      if (i + 1 < n) CHECK(lambda[std::size_t(i)] <= d(i + 1) + 1e-12);
    }
  }
}

TEST_CASE("deflation for repeated eigenvalues and zero weights") {
  Eigen::VectorXd d(5), z(5);
  d << 1, 1, 2, 3, 3;
  z << 1, 1, 0, 0.5, 0.5;
  Eigen::MatrixXd m = Eigen::MatrixXd(d.asDiagonal()) + z * z.transpose();
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(m);
  auto lambda = secular_eigenvalues(d, z);
  std::vector<double> sorted = lambda;
  std::sort(sorted.begin(), sorted.end());
  for (int i = 0; i < 5; ++i) CHECK(sorted[std::size_t(i)] == doctest::Approx(es.eigenvalues()(i)).epsilon(1e-12));

  Eigen::MatrixXd x = updated_eigenvectors(Eigen::MatrixXd::Identity(5, 5), d, lambda, z);
  Eigen::MatrixXd lam = Eigen::VectorXd::Map(lambda.data(), 5).asDiagonal();
  CHECK((x * lam * x.transpose() - m).norm() <= 1e-10);
  CHECK((x.transpose() * x - Eigen::MatrixXd::Identity(5, 5)).cwiseAbs().maxCoeff() <= 1e-10);
}

TEST_CASE("updated eigenvectors match a direct solve on random matrices") {
  std::mt19937_64 rng(3);
  for (int trial = 0; trial < 5; ++trial) {
    Eigen::MatrixXd w = oracle::random_symmetric(50, rng);
    SymmetricMatrix sw(w);
    auto dec = eigen_decompose(sw);
    Eigen::VectorXd b = Eigen::VectorXd::Ones(50);
    Eigen::VectorXd z = dec.q.transpose() * b;
    auto lambda = secular_eigenvalues(dec.d, z);
    auto qx = updated_eigenvectors(dec.q, dec.d, lambda, z);

    Eigen::MatrixXd lifted = w + b * b.transpose();
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(lifted);
    std::vector<std::size_t> order(50);
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::sort(order.begin(), order.end(), [&](auto a, auto c) { return lambda[a] < lambda[c]; });
    for (std::size_t i = 0; i < 50; ++i) {
      const auto slot = order[i];
      CHECK(std::abs(lambda[slot] - es.eigenvalues()(Eigen::Index(i))) <= 1e-8);
      CHECK(oracle::line_angle(qx.col(Eigen::Index(slot)), es.eigenvectors().col(Eigen::Index(i))) <= 1e-8);
    }
    Eigen::MatrixXd lam = Eigen::VectorXd::Map(lambda.data(), 50).asDiagonal();
    CHECK((qx * lam * qx.transpose() - lifted).norm() <= 1e-6);

    // mu_i = (lambda_i - d_i) / |z|^2 lies in [0, 1] and sums to one.
    double musum = 0;
    for (std::size_t i = 0; i < 50; ++i) {
      const double mu = (lambda[i] - dec.d(Eigen::Index(i))) / z.squaredNorm();
      CHECK(mu >= -1e-12);
      CHECK(mu <= 1 + 1e-12);
      musum += mu;
    }
    CHECK(musum == doctest::Approx(1.0).epsilon(1e-10));
  }
}

TEST_CASE("eigen decomposition invariants") {
  std::mt19937_64 rng(4);
  Eigen::MatrixXd w = oracle::random_symmetric(20, rng);
  auto dec = eigen_decompose(SymmetricMatrix(w));
  CHECK((dec.q.transpose() * dec.q - Eigen::MatrixXd::Identity(20, 20)).cwiseAbs().maxCoeff() <= 1e-8);
  CHECK((dec.q * dec.d.asDiagonal() * dec.q.transpose() - w).cwiseAbs().maxCoeff() <= 1e-8);
  for (int i = 1; i < 20; ++i) CHECK(dec.d(i) >= dec.d(i - 1));
}

TEST_CASE("shift report") {
  Eigen::MatrixXd diag = Eigen::VectorXd::LinSpaced(6, 0.5, 3.0).asDiagonal();
  auto rep = shift_report(SymmetricMatrix(diag), 6);
  CHECK(rep.trace_gap == doctest::Approx(6.0).epsilon(1e-12));
  CHECK(rep.interlacing_ok);
  CHECK(rep.before.size() == 6);
  CHECK(rep.after.size() == 6);

  std::mt19937_64 rng(5);
  SymmetricMatrix w(oracle::random_affinity(30, rng));
  auto r = shift_report(w, 10);
  CHECK(std::abs(r.trace_gap - 30.0) <= 1e-6);
  CHECK(r.interlacing_ok);
  CHECK(r.before.size() == 10);
  CHECK(r.before[0] == doctest::Approx(1.0));
  CHECK(r.after[0] == doctest::Approx(1.0));
  CHECK(shift_report(w, 30).after.size() == 30);
  CHECK_THROWS_AS(shift_report(w, 31), ConfigError);

  SymmetricMatrix lifted = SymmetricMatrix::generate(30, [&](std::size_t i, std::size_t j) {
    return (w(i, j) + 1.0) / 2.0;
  });
  auto rl = shift_report(w, lifted, 5);
  CHECK(rl.after.size() == 5);
  CHECK_THROWS_AS(shift_report(w, SymmetricMatrix::identity(3), 5), DimensionError);
}

TEST_CASE("spectra clustered near zero still update") {
  // Gaussian kernels have many numerically tiny, nearly equal eigenvalues.
  std::mt19937_64 rng(6);
  std::uniform_real_distribution<double> u(0.0, 4000.0);
  std::vector<Point> pts(120);
  for (auto& p : pts) p = {u(rng), u(rng)};
  auto w = SymmetricMatrix::generate(120, [&](std::size_t i, std::size_t j) {
    const double d = distance(pts[i], pts[j]);
    return std::exp(-d * d / (3000.0 * 3000.0));
  });
  auto dec = eigen_decompose(w);
  Eigen::VectorXd b = Eigen::VectorXd::Ones(120);
  Eigen::VectorXd z = dec.q.transpose() * b;
  auto lambda = secular_eigenvalues(dec.d, z);
  Eigen::MatrixXd qx;
  REQUIRE_NOTHROW(qx = updated_eigenvectors(dec.q, dec.d, lambda, z));
  Eigen::MatrixXd lifted = w.dense() + b * b.transpose();
  Eigen::MatrixXd lam = Eigen::VectorXd::Map(lambda.data(), 120).asDiagonal();
  CHECK((qx * lam * qx.transpose() - lifted).norm() <= 1e-6 * lifted.norm());
  auto rep = shift_report(w, 20);
  CHECK(rep.interlacing_ok);
  CHECK(std::abs(rep.trace_gap - 120.0) <= 1e-6);
}

TEST_CASE("caller-supplied eigenvalues at a pole are rejected") {
  Eigen::Vector2d d(1, 2), z(1, 1);
  std::vector<double> at_pole{1.0, 3.5};
  CHECK_THROWS_AS(updated_eigenvectors(Eigen::MatrixXd::Identity(2, 2), d, at_pole, z), IllConditionedError);
}

TEST_CASE("interlacing check") {
  CHECK(interlaces({3, 2, 1}, {3.5, 2.5, 1.5}));
  CHECK_FALSE(interlaces({3, 2, 1}, {3.5, 3.2, 1.5}));
  CHECK_FALSE(interlaces({3, 2, 1}, {3.5, 2.5, 0.5}));
}

}  // TEST_SUITE
