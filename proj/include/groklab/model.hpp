#pragma once

#include <Eigen/Core>
#include <cstdint>
#include <string>
#include <vector>

#include "groklab/numeric.hpp"

namespace groklab {

enum class Activation { Quadratic, LinQuad, Relu, Silu, Tanh, Sigmoid };

Activation activation_from_string(const std::string& s);
std::string to_string(Activation a);

// sigma and sigma' applied elementwise. Quadratic is x^2/2 (so its derivative
// is x); LinQuad is a*x + b*x^2. Relu uses subgradient 0 at the kink.
struct ActFun {
    Activation kind = Activation::Quadratic;
    double a = 1.0, b = 1.0;  // LinQuad coefficients

    double f(double x) const;
    double df(double x) const;
    Mat f(const Mat& x) const;
    Mat df(const Mat& x) const;
};

struct ModelState {
    std::vector<Mat> hidden;  // W_1 (d x K), then K x K
    Mat output;               // V (K x M)
    ActFun act;
    bool residual = false;    // skip connections on hidden layers past the first
    double init_scale = 1.0;

    int depth() const { return static_cast<int>(hidden.size()); }
    int width() const { return static_cast<int>(hidden.empty() ? 0 : hidden[0].cols()); }
};

// Entries i.i.d. normal with sd init_scale/sqrt(fan_in).
ModelState init_model(int input_dim, int width, int classes, int depth, ActFun act,
                      bool residual, double init_scale, std::uint64_t seed);

struct ForwardPass {
    std::vector<Mat> F;  // hidden activations per layer
    Mat yhat;            // F_L * V
};

ForwardPass forward(const ModelState& m, const Mat& X);

struct GradResult {
    double loss = 0.0;          // 0.5*||Pperp (Y - Yhat)||_F^2 + (eta/2)*sum ||weights||^2
    std::vector<Mat> d_hidden;  // gradients of the loss (descent direction is -d)
    Mat d_output;
    Mat gf;                     // backpropagated G_F = Pperp (Y - F V) V^T at the top hidden layer
};

GradResult loss_and_grads(const ModelState& m, const Mat& X, const Mat& Y, double eta);

// Ridge stationary point V = (Ft' Ft + eta I)^-1 Ft' Yt over centered matrices.
Mat ridge_top(const Mat& F, const Mat& Y, double eta);

struct DiagRecord {
    double diag_ftf = 0.0;   // diag_err of Ft' Ft
    double diag_fft = 0.0;   // diag_err of Pperp F F'
    double align_gf = 0.0;   // Frobenius cosine of G_F and Yt Yt' F
    bool flagged = false;    // zero-norm input somewhere
};

DiagRecord diagnostics(const Mat& F, const Mat& gf, const Mat& Ytil);

// Centering helpers (Pperp = I - 11'/n applied from the left).
Mat center_rows(const Mat& A);
double accuracy(const Mat& logits, const Mat& Y);  // argmax with ties toward the lowest index

}  // namespace groklab
