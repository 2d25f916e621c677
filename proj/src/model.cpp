#include "groklab/model.hpp"

#include <cmath>

#include "groklab/util.hpp"

namespace groklab {

Activation activation_from_string(const std::string& s) {
    if (s == "quadratic" || s == "quad" || s == "x2") return Activation::Quadratic;
    if (s == "linquad") return Activation::LinQuad;
    if (s == "relu") return Activation::Relu;
    if (s == "silu") return Activation::Silu;
    if (s == "tanh") return Activation::Tanh;
    if (s == "sigmoid") return Activation::Sigmoid;
    throw NumericError("unknown activation: " + s);
}

std::string to_string(Activation a) {
    switch (a) {
        case Activation::Quadratic: return "quadratic";
        case Activation::LinQuad: return "linquad";
        case Activation::Relu: return "relu";
        case Activation::Silu: return "silu";
        case Activation::Tanh: return "tanh";
        case Activation::Sigmoid: return "sigmoid";
    }
    return "?";
}

double ActFun::f(double x) const {
    switch (kind) {
        case Activation::Quadratic: return 0.5 * x * x;
        case Activation::LinQuad: return a * x + b * x * x;
        case Activation::Relu: return x > 0.0 ? x : 0.0;
        case Activation::Silu: return x / (1.0 + std::exp(-x));
        case Activation::Tanh: return std::tanh(x);
        case Activation::Sigmoid: return 1.0 / (1.0 + std::exp(-x));
    }
    return 0.0;
}

double ActFun::df(double x) const {
    switch (kind) {
        case Activation::Quadratic: return x;
        case Activation::LinQuad: return a + 2.0 * b * x;
        case Activation::Relu: return x > 0.0 ? 1.0 : 0.0;
        case Activation::Silu: {
            const double s = 1.0 / (1.0 + std::exp(-x));
            return s * (1.0 + x * (1.0 - s));
        }
        case Activation::Tanh: {
            const double t = std::tanh(x);
            return 1.0 - t * t;
        }
        case Activation::Sigmoid: {
            const double s = 1.0 / (1.0 + std::exp(-x));
            return s * (1.0 - s);
        }
    }
    return 0.0;
}

Mat ActFun::f(const Mat& x) const {
    if (kind == Activation::Quadratic) return 0.5 * x.array().square();
    if (kind == Activation::LinQuad) return a * x.array() + b * x.array().square();
    if (kind == Activation::Relu) return x.cwiseMax(0.0);
    return x.unaryExpr([this](double v) { return f(v); });
}

Mat ActFun::df(const Mat& x) const {
    if (kind == Activation::Quadratic) return x;
    if (kind == Activation::LinQuad) return a + 2.0 * b * x.array();
    if (kind == Activation::Relu) return (x.array() > 0.0).cast<double>();
    return x.unaryExpr([this](double v) { return df(v); });
}

ModelState init_model(int input_dim, int width, int classes, int depth, ActFun act,
                      bool residual, double init_scale, std::uint64_t seed) {
    if (depth < 1) throw NumericError("init_model: depth must be >= 1");
    ModelState m;
    m.act = act;
    m.residual = residual && depth > 1;
    m.init_scale = init_scale;
    auto rng = make_rng(seed, 0x11217);
    std::normal_distribution<double> normal(0.0, 1.0);
    auto fill = [&](Eigen::Index r, Eigen::Index c) {
        Mat w(r, c);
        const double sd = init_scale / std::sqrt(static_cast<double>(r));
        for (Eigen::Index i = 0; i < r; ++i)
            for (Eigen::Index j = 0; j < c; ++j) w(i, j) = sd * normal(rng);
        return w;
    };
    m.hidden.push_back(fill(input_dim, width));
    for (int l = 1; l < depth; ++l) m.hidden.push_back(fill(width, width));
    m.output = fill(width, classes);
    return m;
}

ForwardPass forward(const ModelState& m, const Mat& X) {
    if (X.cols() != m.hidden.front().rows()) throw NumericError("forward: input width mismatch");
    ForwardPass out;
    out.F.reserve(m.hidden.size());
    const Mat* prev = &X;
    for (std::size_t l = 0; l < m.hidden.size(); ++l) {
        Mat f = m.act.f(*prev * m.hidden[l]);
        if (m.residual && l > 0) f += *prev;
        out.F.push_back(std::move(f));
        prev = &out.F.back();
    }
    out.yhat = out.F.back() * m.output;
    return out;
}

GradResult loss_and_grads(const ModelState& m, const Mat& X, const Mat& Y, double eta) {
    const auto n = X.rows();
    if (Y.rows() != n) throw NumericError("loss_and_grads: X/Y row mismatch");

    // Forward, keeping preactivations for the gating matrices.
    std::vector<Mat> Z(m.hidden.size()), F(m.hidden.size());
    const Mat* prev = &X;
    for (std::size_t l = 0; l < m.hidden.size(); ++l) {
        Z[l] = *prev * m.hidden[l];
        F[l] = m.act.f(Z[l]);
        if (m.residual && l > 0) F[l] += *prev;
        prev = &F[l];
    }
    Mat yhat = F.back() * m.output;
    if (!yhat.allFinite()) throw NumericError("loss_and_grads: non-finite forward values");

    Mat R = Y - yhat;
    R.rowwise() -= R.colwise().mean();  // Pperp along the sample dimension

    GradResult g;
    g.loss = 0.5 * R.squaredNorm();
    if (eta > 0.0) {
        double w2 = m.output.squaredNorm();
        for (const auto& w : m.hidden) w2 += w.squaredNorm();
        g.loss += 0.5 * eta * w2;
    }

    g.gf = R * m.output.transpose();
    g.d_output = -(F.back().transpose() * R) + eta * m.output;

    g.d_hidden.resize(m.hidden.size());
    Mat gF = g.gf;  // gradient of -J w.r.t. F_l, walking down
    for (std::size_t l = m.hidden.size(); l-- > 0;) {
        Mat gZ = m.act.df(Z[l]).cwiseProduct(gF);
        const Mat& below = (l == 0) ? X : F[l - 1];
        g.d_hidden[l] = -(below.transpose() * gZ) + eta * m.hidden[l];
        if (l > 0) {
            Mat next = gZ * m.hidden[l].transpose();
            if (m.residual && l > 0) next += gF;  // skip path
            gF = std::move(next);
        }
    }
    return g;
}

Mat ridge_top(const Mat& F, const Mat& Y, double eta) {
    const Mat Ft = center_rows(F);
    const Mat Yt = center_rows(Y);
    Mat A = Ft.transpose() * Ft;
    A.diagonal().array() += eta;
    return solve_spd(A, Ft.transpose() * Yt);
}

DiagRecord diagnostics(const Mat& F, const Mat& gf, const Mat& Ytil) {
    DiagRecord d;
    const Mat Ft = center_rows(F);
    d.diag_ftf = diag_err(Ft.transpose() * Ft);
    d.diag_fft = diag_err(center_rows(Mat(F * F.transpose())));
    const Mat ref = Ytil * (Ytil.transpose() * F);
    d.align_gf = frob_cosine(gf, ref);
    d.flagged = !(gf.norm() > 0.0) || !(ref.norm() > 0.0) || !(Ft.norm() > 0.0);
    return d;
}

Mat center_rows(const Mat& A) {
    Mat out = A;
    out.rowwise() -= A.colwise().mean();
    return out;
}

double accuracy(const Mat& logits, const Mat& Y) {
    if (logits.rows() == 0) return 0.0;
    Eigen::Index hits = 0;
    for (Eigen::Index i = 0; i < logits.rows(); ++i) {
        Eigen::Index pred = 0;
        double best = logits(i, 0);
        for (Eigen::Index j = 1; j < logits.cols(); ++j)
            if (logits(i, j) > best) {  // strict: ties go to the lowest index
                best = logits(i, j);
                pred = j;
            }
        Eigen::Index label = 0;
        Y.row(i).maxCoeff(&label);
        if (pred == label) ++hits;
    }
    return static_cast<double>(hits) / static_cast<double>(logits.rows());
}

}  // namespace groklab
