#include <doctest.h>

#include <Eigen/Dense>
#include <cmath>

#include "groklab/numeric.hpp"
#include "groklab/util.hpp"
#include "oracles.hpp"

using namespace groklab;

TEST_SUITE_BEGIN("numeric");

TEST_CASE("solve_spd basics") {
    auto rng = make_rng(1);
    Mat I = Mat::Identity(3, 3);
    Mat B = oracles::gaussian_mat(3, 2, rng);
    CHECK((solve_spd(I, B) - B).norm() <= 1e-14);

    Mat A = Mat::Zero(2, 2);
    A(0, 0) = 2;
    A(1, 1) = 4;
    Vec b(2);
    b << 2, 4;
    Mat x = solve_spd(A, b);
    CHECK(x(0, 0) == doctest::Approx(1.0));
    CHECK(x(1, 0) == doctest::Approx(1.0));
}

TEST_CASE("solve_spd residual and symmetry of inverse") {
    auto rng = make_rng(7);
    Mat M0 = oracles::gaussian_mat(50, 50, rng);
    Mat A = M0.transpose() * M0 + Mat::Identity(50, 50);
    Mat B = oracles::gaussian_mat(50, 6, rng);
    Mat X = solve_spd(A, B);
    CHECK((A * X - B).norm() <= 1e-10 * B.norm());

    Mat inv = solve_spd(A, Mat::Identity(50, 50));
    CHECK((inv - inv.transpose()).norm() <= 1e-8 * inv.norm());
}

TEST_CASE("solve_spd rejects bad input") {
    Mat asym(2, 2);
    asym << 1, 0.5, 0.1, 1;
    CHECK_THROWS_AS(solve_spd(asym, Mat::Identity(2, 2)), NumericError);

    Mat indef(2, 2);
    indef << 1, 0, 0, -1;
    CHECK_THROWS_AS(solve_spd(indef, Mat::Identity(2, 2)), NumericError);
}

TEST_CASE("polar factor basics") {
    // orthogonal input is its own polar factor
    Mat Q(2, 2);
    const double c = std::cos(0.7), s = std::sin(0.7);
    Q << c, -s, s, c;
    CHECK((polar_factor(Q) - Q).norm() <= 1e-10);

    Mat D = Mat::Zero(2, 2);
    D(0, 0) = 2;
    D(1, 1) = 3;
    CHECK((polar_factor(D) - Mat::Identity(2, 2)).norm() <= 1e-10);

    CHECK_THROWS_AS(polar_factor(Mat::Zero(3, 2)), NumericError);
}

TEST_CASE("polar factor vs SVD oracle") {
    auto rng = make_rng(17);
    for (int t = 0; t < 10; ++t) {
        Mat G = oracles::gaussian_mat(10, 6, rng);
        Mat P = polar_factor(G);
        CHECK((P.transpose() * P - Mat::Identity(6, 6)).norm() <= 1e-8);
        Eigen::BDCSVD<Mat> svd(G);
        CHECK(std::abs(P.cwiseProduct(G).sum() - svd.singularValues().sum()) <= 1e-8);
    }
    // wide case orthonormal rows
    Mat G = oracles::gaussian_mat(4, 9, rng);
    Mat P = polar_factor(G);
    CHECK((P * P.transpose() - Mat::Identity(4, 4)).norm() <= 1e-8);

    // rank-1 of norm 3: inner product equals 3 (SVD fallback path)
    Vec u = Vec::Zero(5), v = Vec::Zero(4);
    u[1] = 1;
    v[2] = 1;
    Mat R1 = 3.0 * u * v.transpose();
    CHECK(polar_factor(R1).cwiseProduct(R1).sum() == doctest::Approx(3.0).epsilon(1e-10));
}

TEST_CASE("polar equivariance under orthogonal maps") {
    auto rng = make_rng(23);
    for (int t = 0; t < 5; ++t) {
        Mat G = oracles::gaussian_mat(8, 5, rng);
        Mat A = oracles::gaussian_mat(8, 8, rng);
        Eigen::HouseholderQR<Mat> qr(A);
        Mat Q = qr.householderQ();
        CHECK((polar_factor(Q * G) - Q * polar_factor(G)).norm() <= 1e-8);
    }
}

TEST_CASE("symmetric eigenvalue extremes") {
    CHECK(sym_eig_extremes(Mat::Zero(3, 3)) == std::pair<double, double>{0.0, 0.0});

    Mat D = Mat::Zero(3, 3);
    D(0, 0) = -1;
    D(2, 2) = 2;
    auto [lo, hi] = sym_eig_extremes(D);
    CHECK(lo == doctest::Approx(-1.0));
    CHECK(hi == doctest::Approx(2.0));

    auto rng = make_rng(5);
    Mat A = oracles::gaussian_mat(30, 30, rng);
    Mat S = 0.5 * (A + A.transpose());
    auto [mn, mx] = sym_eig_extremes(S);
    Eigen::SelfAdjointEigenSolver<Mat> full(S);
    CHECK(std::abs(mn - full.eigenvalues().minCoeff()) <= 1e-8);
    CHECK(std::abs(mx - full.eigenvalues().maxCoeff()) <= 1e-8);

    Mat asym(2, 2);
    asym << 0, 1, -1, 0;
    CHECK_THROWS_AS(sym_eig_extremes(asym), NumericError);
}

TEST_CASE("power spectrum") {
    const int M = 31;
    Vec u(M);
    for (int m = 0; m < M; ++m) u[m] = std::cos(2.0 * std::numbers::pi * 3 * m / M);
    Vec spec = power_spectrum(u);
    REQUIRE(spec.size() == M / 2 + 1);
    Eigen::Index argmax;
    spec.maxCoeff(&argmax);
    CHECK(argmax == 3);
    CHECK(spec.sum() - spec[3] <= 1e-10);  // all mass at frequency 3

    CHECK(power_spectrum(Vec::Constant(8, 2.5)).cwiseAbs().maxCoeff() <= 1e-20);

    auto rng = make_rng(2);
    for (int t = 0; t < 5; ++t) {
        const int n = 7 + 3 * t;  // odd and even lengths
        Vec x = oracles::gaussian_mat(n, 1, rng).col(0);
        Vec s = power_spectrum(x);
        Vec cent = x.array() - x.mean();
        CHECK(std::abs(s.sum() - cent.squaredNorm()) <= 1e-10);  // Parseval
        CHECK((s.array() >= -1e-15).all());
    }
}

TEST_CASE("diag_err and frob_cosine") {
    Mat I = Mat::Identity(4, 4);
    CHECK(diag_err(I) == 0.0);
    Mat J = Mat::Ones(2, 2);
    CHECK(diag_err(J) == doctest::Approx(std::sqrt(2.0) / 2.0));
    CHECK(frob_cosine(I, 2 * I) == doctest::Approx(1.0));
    CHECK(frob_cosine(I, Mat::Zero(4, 4)) == 0.0);
}

TEST_SUITE_END();
