#pragma once

#include "geosocial/model.hpp"

#include <vector>

namespace geosocial {

// W = Q diag(d) Q^T with d ascending.
struct EigenDecomposition {
  Eigen::MatrixXd q;
  Eigen::VectorXd d;
};

EigenDecomposition eigen_decompose(const SymmetricMatrix& w);

// Eigenvalues of diag(d) + z z^T for ascending d, from the secular equation
// 1 + sum_j z_j^2 / (d_j - lambda) = 0.
//
// Entries come back in slot order: for every non-deflated slot i the value is the
// secular root lying in (d_i, next non-deflated d); deflated slots (negligible z_i or
// a d_i repeated within tolerance) keep d_i. The sorted multiset interlaces with d.
std::vector<double> secular_eigenvalues(const Eigen::VectorXd& d, const Eigen::VectorXd& z);

// Eigenvectors Q X of Q (diag(d) + z z^T) Q^T, column i paired with lambda[i] from
// secular_eigenvalues. Non-deflated columns follow
//   X(:, i) = c_i (z_1 / (d_1 - lambda_i), ..., z_n / (d_n - lambda_i)),
// normalised to unit length; deflated columns pass through (after the rotations that
// concentrate z on one member of each repeated-eigenvalue group).
// Throws IllConditionedError when a non-deflated |d_j - lambda_i| < 1e-12.
Eigen::MatrixXd updated_eigenvectors(const Eigen::MatrixXd& q, const Eigen::VectorXd& d,
                                     const std::vector<double>& lambda, const Eigen::VectorXd& z);

struct UpdateReport {
  std::vector<double> lambda;       // slot order, see secular_eigenvalues
  Eigen::MatrixXd updated_vectors;  // Q X
  double trace_gap = 0.0;           // sum lambda - sum d; equals N for b = ones
  bool interlacing_ok = false;
  // First m eigenvalues (descending) of D^-1 W before and after the lift.
  std::vector<double> before;
  std::vector<double> after;
};

// Raw update W + b b^T (b all ones) through the secular route, with the spectra of
// the normalised operators of W and of `lifted` (defaults to W + C).
UpdateReport shift_report(const SymmetricMatrix& w, std::size_t m);
UpdateReport shift_report(const SymmetricMatrix& w, const SymmetricMatrix& lifted, std::size_t m);

// Descending d_i <= lambda_i <= d_{i-1} check for a positive rank-one update.
bool interlaces(std::vector<double> before, std::vector<double> after, double tol = 1e-8);

}  // namespace geosocial
