#pragma once

#include <Eigen/Core>
#include <stdexcept>
#include <utility>

namespace groklab {

struct NumericError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

using Mat = Eigen::MatrixXd;
using Vec = Eigen::VectorXd;

// Cholesky solve of A X = B for symmetric positive definite A.
// Throws NumericError on asymmetric or non-PD input.
Mat solve_spd(const Mat& A, const Mat& B);

// Orthonormal polar factor U V^T of G, via Newton-Schulz on the
// Frobenius-normalized input with an SVD fallback. Throws on G = 0.
Mat polar_factor(const Mat& G, double tol = 1e-8, int max_iter = 50);

// (lambda_min, lambda_max) of a symmetric matrix.
std::pair<double, double> sym_eig_extremes(const Mat& H);

// Per-frequency squared DFT magnitude of u (cos/sin masses combined), after
// mean removal; sums to ||u - mean(u)||^2. Length floor(M/2)+1, entry 0 is 0.
Vec power_spectrum(const Vec& u);

// ||A - Diag(A)||_F / ||A||_F; 0 for a zero matrix.
double diag_err(const Mat& A);

// Mean absolute off-diagonal entry of the correlation-normalized matrix,
// mean over i != j of |A_ij| / sqrt(A_ii A_jj).
double offdiag_corr_mean(const Mat& A);

// Frobenius cosine <A, B> / (||A|| ||B||); 0 if either is zero.
double frob_cosine(const Mat& A, const Mat& B);

}  // namespace groklab
