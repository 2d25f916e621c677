#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "groklab/irreps.hpp"
#include "groklab/model.hpp"
#include "groklab/task.hpp"

namespace groklab {

// Row-weighted correlation energy E(w) = 0.5*||Yt' diag(w_row) sigma(X w)||^2.
// Single-target tasks drop the sample centering (it is degenerate there); the
// modulated variant replaces it with a target-space quadratic form built from
// characters.
struct EnergyTask {
    GroupPtr group;
    ActFun act;
    std::vector<PairRow> rows;
    Vec row_weight;                 // per-row multiplier (Horvitz-Thompson included here)
    bool centered = true;
    std::optional<Mat> mod_form;    // modulated quadratic form on z, full task only

    int order() const { return group->order; }
};

EnergyTask energy_task(const PairTable& table, ActFun act);
// train_rows = true uses the train split, false the full table; ht divides the
// kept-row weights by the keep ratio.
EnergyTask energy_task(const Dataset& ds, ActFun act, bool train_rows = true, bool ht = false);
EnergyTask energy_task(const WeightedPairs& wp, ActFun act);

// E_S with characters of irreps outside S (and the trivial one) forming the
// retained directions. S is closed under conjugation internally.
EnergyTask modulated_task(const PairTable& table, ActFun act, const IrrepCatalog& cat,
                          std::vector<int> suppressed);

double energy(const Vec& w, const EnergyTask& task);
Vec energy_grad(const Vec& w, const EnergyTask& task);

// Target sums z_h = sum over rows with target h of weight * sigma, no centering.
Vec target_sums(const Vec& w, const EnergyTask& task);

struct AscendConfig {
    double lr = 0.1;
    long max_steps = 20000;
    double tol = 1e-8;    // tangential gradient norm
    int max_halvings = 30;
};

struct FlatnessResult {
    double lambda_min_abs = 0;  // smallest |eigenvalue| of the tangential Hessian
    double lambda_max = 0;      // largest signed eigenvalue
    double lambda_max_abs = 0;  // spectral radius
};

struct AscentResult {
    Vec w;                     // unit norm
    double energy = 0;
    long steps = 0;
    double grad_norm = 0;      // final tangential gradient norm
    bool converged = false;

    bool classified = false;
    int label = -1;            // representative catalog id of the winning merged irrep
    std::string label_text;
    double c_max = 0;          // isotypic mass of the winner (conjugate pairs merged)
    std::vector<double> c_profile;  // mass per merged irrep group
    int sign = 1;              // s in w = [u; s P u]
    double struct_residual = 0;     // min_s ||v - s P u||
    double theory_energy = 0;       // M/(8 d_k) real, M/(16 d_k) complex pair; NaN if n/a
    FlatnessResult flatness;
    bool flatness_done = false;
};

// Projected gradient ascent on the unit sphere with backtracking; monotone in
// the energy along accepted steps.
AscentResult ascend(Vec w0, const EnergyTask& task, const AscendConfig& cfg = {});

// Fills classification fields from isotypic projector masses.
void classify_maximum(AscentResult& res, const IrrepCatalog& cat, const Group& g);

// Tangential Hessian extremes by central differences of the projected
// gradient field (step 1e-4), symmetrized in an explicit tangent basis.
FlatnessResult flatness(const Vec& w, const EnergyTask& task, double step = 1e-4);

struct MemorizationProfile {
    Activation act;
    bool focused = false;   // phi nondecreasing
    Vec s;                  // predicted pair-sum profile, sum s^2 = 2
    double lambda = 0;      // KKT multiplier (spreading case)
};

// phi(x) = sigma'(x)/x monotonicity decides focused vs spreading; spreading
// profiles solve sum_g phi^-1(2 lambda / p_g)^2 = 2 by bisection.
MemorizationProfile memorization_profile(const Vec& weights, ActFun act);

struct StabilityVerdict {
    bool stable = false;
    double leak_margin = 0;   // worst-case energy drop per unit perturbation
    int probes_returned = 0;
    int probes_total = 0;
};

// Re-ascends 16 tangential perturbations (norm 0.05) of a classified maximum
// on a subsampled task; stable iff all land within 0.1 rad of the original
// isotypic component with the same label.
StabilityVerdict vertex_stability(const AscentResult& ref, const EnergyTask& sub,
                                  const IrrepCatalog& cat, const Group& g, std::uint64_t seed);

// Variance-debiased Horvitz-Thompson estimate of the full-task energy from a
// Bernoulli(p) row subsample.
double ht_energy_unbiased(const Vec& w, const PairTable& full, const std::vector<char>& kept,
                          double p, ActFun act);

// Orthonormal basis of the tangent space at unit w (columns).
Mat tangent_basis(const Vec& w);

}  // namespace groklab
