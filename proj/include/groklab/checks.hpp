#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "groklab/energy.hpp"
#include "groklab/train.hpp"

namespace groklab {

struct VerifyReport {
    std::string check;
    std::map<std::string, double> params;
    bool pass = false;
    bool gating = true;  // non-gating checks report but never fail a suite
    std::map<std::string, double> stats;
    std::map<std::string, double> tolerances;
    std::uint64_t seed = 0;
    double seconds = 0;

    std::string to_json() const;
};

// Lemma-1 structure at random init: Gram diagonality and the alignment of the
// exact ridge-substituted G_F with Yt Yt' F. eta = 0 switches to the
// least-squares residual mode and checks ||G_F|| ~ 0 for K >= n.
VerifyReport check_gf_structure(int M, int K, double eta, std::uint64_t seed);

// Sign identity sign(b_jl) = -sign(f_j' P_{eta,-jl} f_l) over all pairs of a
// random centered design, plus the Woodbury projector identity.
VerifyReport check_repulsion(int n, int K, double eta, int trials, std::uint64_t seed);

// Complex rank-1 feature reconstruction on Z_M: residual of the least-squares
// fit of Yt from 2(M-1) quadratic features and the Gram off-block mass.
VerifyReport check_reconstruction(int M);

// Same construction from the dihedral catalog (d_k = 2 blocks); non-gating.
VerifyReport check_reconstruction_dihedral(int n);

// <polar(G), G> equals the singular value sum from an SVD oracle.
VerifyReport check_muon_ascent(int rows, int cols, int trials, std::uint64_t seed);

// Leader-wins spot check for the rebalancing dynamics ODE.
VerifyReport check_muon_ode(int modes, int trials, std::uint64_t seed);

struct CouponConfig {
    int modes = 4;
    Vec rates;                  // mu_l in (0,1]
    double frechet_a = 4.0;
    long trials = 5000;
    bool muon_guided = false;
    double suppression = 0.5;
    std::uint64_t seed = 0;
};

struct CouponStats {
    double mean = 0, se = 0;
    Vec selection_freq;         // first-draw mode frequencies
};

CouponStats coupon_collect(const CouponConfig& cfg);

// Independent vs muon-guided collection times against the closed-form bounds.
VerifyReport coupon_sim(const CouponConfig& cfg);

// Least-squares fit p* = c log(M)/M; returns c and the max relative residual.
std::pair<double, double> boundary_fit(const std::vector<std::pair<int, double>>& points);

// Closed-form expected draws to collect all modes with probabilities p
// (inclusion-exclusion).
double coupon_expected_time(const Vec& p);

// Deeper-architecture report: 3-layer relu training on Z_M and the spectral
// concentration of first-layer input-half columns. Non-gating.
VerifyReport check_deep_fourier(int M, double p, int K, int depth, long epochs, std::uint64_t seed);

// Adam vs Muon at small width (qualitative, non-gating).
VerifyReport check_muon_adam(int M, const std::vector<int>& widths, long epochs, std::uint64_t seed);

// Horvitz-Thompson unbiasedness of the subsampled energy at a fixed w.
VerifyReport check_ht_unbiased(int M, double p, int trials, std::uint64_t seed);

std::string reports_to_json(const std::vector<VerifyReport>& reports);

}  // namespace groklab
