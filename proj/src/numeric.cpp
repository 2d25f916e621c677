#include "groklab/numeric.hpp"

#include <Eigen/Cholesky>
#include <Eigen/Eigenvalues>
#include <Eigen/SVD>
#include <cmath>
#include <numbers>

namespace groklab {

Mat solve_spd(const Mat& A, const Mat& B) {
    if (A.rows() != A.cols()) throw NumericError("solve_spd: square matrix required");
    if (A.rows() != B.rows()) throw NumericError("solve_spd: shape mismatch");
    const double scale = std::max(1.0, A.cwiseAbs().maxCoeff());
    if ((A - A.transpose()).cwiseAbs().maxCoeff() > 1e-8 * scale)
        throw NumericError("solve_spd: matrix not symmetric");
    Eigen::LLT<Mat> llt(A);
    if (llt.info() != Eigen::Success) throw NumericError("solve_spd: factorization failed (not positive definite)");
    return llt.solve(B);
}

Mat polar_factor(const Mat& G, double tol, int max_iter) {
    const double norm = G.norm();
    if (!(norm > 0.0)) throw NumericError("polar_factor: zero matrix");

    const bool wide = G.rows() < G.cols();
    Mat X = wide ? Mat(G.transpose() / norm) : Mat(G / norm);

    bool converged = false;
    for (int it = 0; it < max_iter; ++it) {
        Mat gram = X.transpose() * X;
        const double err = (gram - Mat::Identity(gram.rows(), gram.cols())).norm();
        if (err <= tol) {
            if (converged) break;
            converged = true;  // one polish pass past the tolerance
        }
        X = 1.5 * X - 0.5 * X * gram;
    }
    if (!converged) {
        Eigen::BDCSVD<Mat> svd(wide ? G.transpose() : G, Eigen::ComputeThinU | Eigen::ComputeThinV);
        X = svd.matrixU() * svd.matrixV().transpose();
    }
    return wide ? Mat(X.transpose()) : X;
}

std::pair<double, double> sym_eig_extremes(const Mat& H) {
    if (H.rows() != H.cols()) throw NumericError("sym_eig_extremes: square matrix required");
    const double scale = std::max(1.0, H.cwiseAbs().maxCoeff());
    if ((H - H.transpose()).cwiseAbs().maxCoeff() > 1e-6 * scale)
        throw NumericError("sym_eig_extremes: matrix not symmetric");
    if (H.rows() == 0) return {0.0, 0.0};
    Eigen::SelfAdjointEigenSolver<Mat> es(H, Eigen::EigenvaluesOnly);
    const auto& ev = es.eigenvalues();
    return {ev.minCoeff(), ev.maxCoeff()};
}

Vec power_spectrum(const Vec& u) {
    const auto M = u.size();
    if (M < 1) throw NumericError("power_spectrum: empty vector");
    const Vec c = u.array() - u.mean();
    const auto half = M / 2;
    Vec out = Vec::Zero(half + 1);
    for (Eigen::Index f = 1; f <= half; ++f) {
        double re = 0.0, im = 0.0;
        for (Eigen::Index m = 0; m < M; ++m) {
            const double t = 2.0 * std::numbers::pi * static_cast<double>(f) * static_cast<double>(m) /
                             static_cast<double>(M);
            re += c[m] * std::cos(t);
            im -= c[m] * std::sin(t);
        }
        const double mag = re * re + im * im;
        const bool nyquist = (M % 2 == 0) && (f == half);
        out[f] = (nyquist ? 1.0 : 2.0) * mag / static_cast<double>(M);
    }
    return out;
}

double diag_err(const Mat& A) {
    const double total = A.norm();
    if (!(total > 0.0)) return 0.0;
    return (A - Mat(A.diagonal().asDiagonal())).norm() / total;
}

double offdiag_corr_mean(const Mat& A) {
    const auto n = A.rows();
    if (n != A.cols()) throw NumericError("offdiag_corr_mean: square matrix required");
    if (n < 2) return 0.0;
    Vec d = A.diagonal().cwiseAbs().cwiseSqrt();
    double acc = 0;
    long cnt = 0;
    for (Eigen::Index i = 0; i < n; ++i)
        for (Eigen::Index j = 0; j < n; ++j) {
            if (i == j) continue;
            const double denom = d[i] * d[j];
            if (denom > 0) {
                acc += std::abs(A(i, j)) / denom;
                ++cnt;
            }
        }
    return cnt ? acc / static_cast<double>(cnt) : 0.0;
}

double frob_cosine(const Mat& A, const Mat& B) {
    const double na = A.norm(), nb = B.norm();
    if (!(na > 0.0) || !(nb > 0.0)) return 0.0;
    return A.cwiseProduct(B).sum() / (na * nb);
}

}  // namespace groklab
