#include <doctest.h>

#include <cmath>

#include "groklab/model.hpp"
#include "groklab/task.hpp"
#include "groklab/util.hpp"
#include "oracles.hpp"

using namespace groklab;

TEST_SUITE_BEGIN("model");

namespace {

ActFun act_of(Activation k) {
    ActFun a;
    a.kind = k;
    return a;
}

}  // namespace

TEST_CASE("forward zero weights and hand case") {
    ModelState m = init_model(4, 3, 2, 1, act_of(Activation::Quadratic), false, 1.0, 0);
    m.hidden[0].setZero();
    Mat X = Mat::Ones(5, 4);
    ForwardPass f = forward(m, X);
    CHECK(f.F[0].cwiseAbs().maxCoeff() == 0.0);
    CHECK(f.yhat.cwiseAbs().maxCoeff() == 0.0);

    // K=1, w = e_0: quadratic response to (e_a, e_b) is [a == 0] / 2
    ModelState m1 = init_model(4, 1, 2, 1, act_of(Activation::Quadratic), false, 1.0, 0);
    m1.hidden[0].setZero();
    m1.hidden[0](0, 0) = 1.0;
    m1.output.setOnes();
    Mat X2 = Mat::Zero(2, 4);
    X2(0, 0) = 1;
    X2(0, 2) = 1;  // a=0 -> active
    X2(1, 1) = 1;
    X2(1, 3) = 1;  // a=1 -> inactive
    ForwardPass f1 = forward(m1, X2);
    CHECK(f1.F[0](0, 0) == doctest::Approx(0.5));
    CHECK(f1.F[0](1, 0) == 0.0);
}

TEST_CASE("forward matches a scalar-loop reference") {
    auto rng = make_rng(3);
    for (Activation k : {Activation::Quadratic, Activation::Relu, Activation::Tanh}) {
        ModelState m = init_model(6, 7, 4, 1, act_of(k), false, 1.0, 11);
        Mat X = oracles::gaussian_mat(9, 6, rng);
        ForwardPass f = forward(m, X);
        ActFun a = act_of(k);
        Mat ref = oracles::naive_forward(X, m.hidden[0], m.output, [&](double x) { return a.f(x); });
        CHECK((f.yhat - ref).cwiseAbs().maxCoeff() <= 1e-12);
    }
}

TEST_CASE("gf is zero when the top layer is zero") {
    ModelState m = init_model(4, 5, 3, 1, act_of(Activation::Quadratic), false, 1.0, 2);
    m.output.setZero();
    auto rng = make_rng(4);
    Mat X = oracles::gaussian_mat(6, 4, rng);
    Mat Y = Mat::Zero(6, 3);
    for (int i = 0; i < 6; ++i) Y(i, i % 3) = 1.0;
    GradResult g = loss_and_grads(m, X, Y, 0.0);
    CHECK(g.gf.cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("perfect fit kills the output gradient at eta=0") {
    auto rng = make_rng(5);
    ModelState m = init_model(4, 6, 3, 1, act_of(Activation::Quadratic), false, 1.0, 6);
    Mat X = oracles::gaussian_mat(8, 4, rng);
    ForwardPass f = forward(m, X);
    Mat Y = f.yhat;  // zero residual by construction
    GradResult g = loss_and_grads(m, X, Y, 0.0);
    CHECK(g.d_output.cwiseAbs().maxCoeff() <= 1e-12);
    CHECK(g.loss <= 1e-20);
}

TEST_CASE("analytic gradients match finite differences across activations") {
    const double h = 1e-5;
    for (Activation k : {Activation::Quadratic, Activation::LinQuad, Activation::Relu, Activation::Silu,
                         Activation::Tanh, Activation::Sigmoid}) {
        for (std::uint64_t seed = 0; seed < 5; ++seed) {
            auto rng = make_rng(100 + seed);
            const int n = 11, d = 10, K = 7, M = 5;
            ModelState m = init_model(d, K, M, 1, act_of(k), false, 1.0, seed);
            Mat X = oracles::gaussian_mat(n, d, rng);
            Mat Y = Mat::Zero(n, M);
            for (int i = 0; i < n; ++i) Y(i, i % M) = 1.0;
            const double eta = 1e-3;

            GradResult g = loss_and_grads(m, X, Y, eta);

            ModelState probe = m;
            Mat fdW = oracles::fd_gradient_mat(
                [&](const Mat& W) {
                    probe.hidden[0] = W;
                    return loss_and_grads(probe, X, Y, eta).loss;
                },
                m.hidden[0], h);
            probe = m;
            Mat fdV = oracles::fd_gradient_mat(
                [&](const Mat& V) {
                    probe.output = V;
                    return loss_and_grads(probe, X, Y, eta).loss;
                },
                m.output, h);
            CHECK(oracles::max_rel_err(g.d_hidden[0], fdW, 1e-4) <= 1e-5);
            CHECK(oracles::max_rel_err(g.d_output, fdV, 1e-4) <= 1e-5);
        }
    }
}

TEST_CASE("deep and residual gradients match finite differences") {
    auto rng = make_rng(50);
    for (bool residual : {false, true}) {
        ModelState m = init_model(6, 5, 3, 3, act_of(Activation::Silu), residual, 1.0, 9);
        Mat X = oracles::gaussian_mat(7, 6, rng);
        Mat Y = Mat::Zero(7, 3);
        for (int i = 0; i < 7; ++i) Y(i, i % 3) = 1.0;
        GradResult g = loss_and_grads(m, X, Y, 1e-3);
        for (int l = 0; l < 3; ++l) {
            ModelState probe = m;
            Mat fd = oracles::fd_gradient_mat(
                [&](const Mat& W) {
                    probe.hidden[static_cast<std::size_t>(l)] = W;
                    return loss_and_grads(probe, X, Y, 1e-3).loss;
                },
                m.hidden[static_cast<std::size_t>(l)], 1e-5);
            CHECK(oracles::max_rel_err(g.d_hidden[static_cast<std::size_t>(l)], fd, 1e-4) <= 1e-5);
        }
    }
}

TEST_CASE("gf equals the centered residual times V transpose") {
    auto rng = make_rng(8);
    ModelState m = init_model(6, 5, 4, 1, act_of(Activation::Quadratic), false, 1.0, 3);
    Mat X = oracles::gaussian_mat(9, 6, rng);
    Mat Y = Mat::Zero(9, 4);
    for (int i = 0; i < 9; ++i) Y(i, i % 4) = 1.0;
    GradResult g = loss_and_grads(m, X, Y, 0.5);
    ForwardPass f = forward(m, X);
    Mat R = Y - f.F[0] * m.output;
    R.rowwise() -= R.colwise().mean();
    CHECK((g.gf - R * m.output.transpose()).cwiseAbs().maxCoeff() <= 1e-12);
}

TEST_CASE("ridge_top stationarity and shrinkage") {
    auto rng = make_rng(9);
    Mat F = oracles::gaussian_mat(20, 6, rng);
    Mat Y = Mat::Zero(20, 3);
    for (int i = 0; i < 20; ++i) Y(i, i % 3) = 1.0;
    Mat Ft = center_rows(F), Yt = center_rows(Y);

    double prev_norm = 1e18;
    for (double eta : {1e-4, 1e-2, 1.0, 100.0}) {
        Mat V = ridge_top(F, Y, eta);
        Mat lhs = Ft.transpose() * Yt - (Ft.transpose() * Ft + eta * Mat::Identity(6, 6)) * V;
        CHECK(lhs.norm() <= 1e-8 * (Ft.transpose() * Yt).norm());
        CHECK(V.norm() < prev_norm);
        prev_norm = V.norm();
    }
}

TEST_CASE("ridge_top matches a gradient-flow oracle") {
    // dV/dt = Ft'Yt - (Ft'Ft + eta I) V has the ridge solution as fixed point.
    auto rng = make_rng(10);
    Mat F = oracles::gaussian_mat(15, 4, rng);
    Mat Y = Mat::Zero(15, 3);
    for (int i = 0; i < 15; ++i) Y(i, i % 3) = 1.0;
    Mat Ft = center_rows(F), Yt = center_rows(Y);
    const double eta = 0.1;

    Mat A = Ft.transpose() * Ft + eta * Mat::Identity(4, 4);
    Mat B = Ft.transpose() * Yt;
    Mat V = Mat::Zero(4, 3);
    const double dt = 0.5 / (A.norm() + 1);
    for (int it = 0; it < 200000; ++it) V += dt * (B - A * V);
    CHECK((V - ridge_top(F, Y, eta)).cwiseAbs().maxCoeff() <= 1e-6);
}

TEST_CASE("diagnostics") {
    Mat F(4, 2);
    F << 1, 1, -1, 1, 1, -1, -1, -1;  // centered orthogonal columns
    Mat Yt = center_rows(Mat::Identity(4, 4));
    DiagRecord d = diagnostics(F, Mat::Ones(4, 2), Yt);
    CHECK(d.diag_ftf == 0.0);

    Mat gf = 3.7 * Yt * (Yt.transpose() * F);
    DiagRecord d2 = diagnostics(F, gf, Yt);
    CHECK(d2.align_gf == doctest::Approx(1.0));

    DiagRecord d3 = diagnostics(F, Mat::Zero(4, 2), Yt);
    CHECK(d3.flagged);
}

TEST_CASE("random-init Gram diagonality at lab scale") {
    // M=71, K=2048 at random init: feature correlations stay at the percent
    // level entrywise (the Frobenius off-diagonal mass is dominated by the
    // sheer pair count and is not small here).
    auto g = std::make_shared<Group>(make_cyclic(71));
    EncodedSplit e = encode(split(full_task(g), 1.0, 0));
    ModelState m = init_model(2 * 71, 2048, 71, 1, act_of(Activation::Quadratic), false, 1.0, 31);
    ForwardPass f = forward(m, e.X_train);
    Mat Ft = center_rows(f.F[0]);
    CHECK(offdiag_corr_mean(Ft.transpose() * Ft) <= 0.15);
}

TEST_CASE("accuracy ties break toward the lowest index") {
    Mat logits(2, 3);
    logits << 1.0, 1.0, 0.5, 0.2, 0.9, 0.9;
    Mat Y = Mat::Zero(2, 3);
    Y(0, 0) = 1;
    Y(1, 1) = 1;
    CHECK(accuracy(logits, Y) == 1.0);
    Y(0, 0) = 0;
    Y(0, 1) = 1;  // tie resolves to index 0, so this row misses
    CHECK(accuracy(logits, Y) == 0.5);
}

TEST_SUITE_END();
