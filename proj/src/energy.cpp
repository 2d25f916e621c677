#include "groklab/energy.hpp"

#include <Eigen/Eigenvalues>
#include <algorithm>
#include <cmath>
#include <limits>

#include "groklab/util.hpp"

namespace groklab {

namespace {

struct RowEval {
    Vec s;   // sigma per row
    Vec ds;  // sigma' per row
};

RowEval eval_rows(const Vec& w, const EnergyTask& t, bool need_deriv) {
    const int M = t.order();
    const auto n = static_cast<Eigen::Index>(t.rows.size());
    RowEval e;
    e.s.resize(n);
    if (need_deriv) e.ds.resize(n);
    for (Eigen::Index i = 0; i < n; ++i) {
        const PairRow& r = t.rows[static_cast<std::size_t>(i)];
        const double x = w[r.h1] + w[M + r.h2];
        e.s[i] = t.act.f(x);
        if (need_deriv) e.ds[i] = t.act.df(x);
    }
    return e;
}

// q = Yt' (weight o sigma) in target space, plus the per-row residual r used
// by the gradient: grad = X' [(weight o sigma') o r].
void target_residual(const EnergyTask& t, const Vec& s, Vec& q, Vec& row_r) {
    const int M = t.order();
    const auto n = static_cast<Eigen::Index>(t.rows.size());
    Vec z = Vec::Zero(M);
    Eigen::VectorXd cnt = Vec::Zero(M);
    for (Eigen::Index i = 0; i < n; ++i) {
        const PairRow& r = t.rows[static_cast<std::size_t>(i)];
        z[r.h] += t.row_weight[i] * s[i];
        cnt[r.h] += 1.0;
    }
    if (t.mod_form) {
        q.noalias() = *t.mod_form * z;
        row_r.resize(n);
        for (Eigen::Index i = 0; i < n; ++i) row_r[i] = q[t.rows[static_cast<std::size_t>(i)].h];
        return;
    }
    if (t.centered) {
        const double total = z.sum() / static_cast<double>(n);
        q = z - cnt * total;
        const double qbar = cnt.dot(q) / static_cast<double>(n);
        row_r.resize(n);
        for (Eigen::Index i = 0; i < n; ++i) row_r[i] = q[t.rows[static_cast<std::size_t>(i)].h] - qbar;
    } else {
        q = z;
        row_r.resize(n);
        for (Eigen::Index i = 0; i < n; ++i) row_r[i] = q[t.rows[static_cast<std::size_t>(i)].h];
    }
}

double energy_of(const EnergyTask& t, const Vec& s) {
    const int M = t.order();
    Vec z = Vec::Zero(M);
    Vec cnt = Vec::Zero(M);
    const auto n = static_cast<Eigen::Index>(t.rows.size());
    for (Eigen::Index i = 0; i < n; ++i) {
        const PairRow& r = t.rows[static_cast<std::size_t>(i)];
        z[r.h] += t.row_weight[i] * s[i];
        cnt[r.h] += 1.0;
    }
    if (t.mod_form) return 0.5 * z.dot(*t.mod_form * z);
    if (t.centered) {
        const double total = z.sum() / static_cast<double>(n);
        return 0.5 * (z - cnt * total).squaredNorm();
    }
    return 0.5 * z.squaredNorm();
}

}  // namespace

EnergyTask energy_task(const PairTable& table, ActFun act) {
    EnergyTask t;
    t.group = table.group;
    t.act = act;
    t.rows = table.rows;
    t.row_weight = Vec::Ones(static_cast<Eigen::Index>(t.rows.size()));
    return t;
}

EnergyTask energy_task(const Dataset& ds, ActFun act, bool train_rows, bool ht) {
    EnergyTask t;
    t.group = ds.table.group;
    t.act = act;
    const auto& idx = train_rows ? ds.train_idx : ds.test_idx;
    t.rows.reserve(idx.size());
    for (int i : idx) t.rows.push_back(ds.table.rows[static_cast<std::size_t>(i)]);
    const double w = ht ? 1.0 / ds.keep_ratio : 1.0;
    t.row_weight = Vec::Constant(static_cast<Eigen::Index>(t.rows.size()), w);
    return t;
}

EnergyTask energy_task(const WeightedPairs& wp, ActFun act) {
    EnergyTask t;
    t.group = wp.group;
    t.act = act;
    t.rows = wp.rows;
    t.row_weight = wp.weights;
    t.centered = false;  // sample centering annihilates a single-target task
    return t;
}

EnergyTask modulated_task(const PairTable& table, ActFun act, const IrrepCatalog& cat,
                          std::vector<int> suppressed) {
    const int M = table.order();
    if (cat.group_order != M) throw TaskError("modulated_task: catalog/group order mismatch");
    if (static_cast<long>(table.rows.size()) != static_cast<long>(M) * M)
        throw TaskError("modulated_task: full task required");

    std::vector<char> drop(cat.entries.size(), 0);
    for (int id : suppressed) {
        const Irrep& e = cat.at(id);  // throws on unknown id
        drop[static_cast<std::size_t>(id)] = 1;
        drop[static_cast<std::size_t>(e.partner)] = 1;  // keep S closed under conjugation
    }

    MatC A = MatC::Zero(M, M);
    for (const auto& e : cat.entries) {
        if (e.kind == Irrep::Trivial || drop[static_cast<std::size_t>(e.id)]) continue;
        VecC chi(M);
        for (int h = 0; h < M; ++h) chi[h] = e.character(h);
        A += (static_cast<double>(e.dim) / M) * (chi * chi.adjoint());
    }
    if (A.imag().cwiseAbs().maxCoeff() > 1e-10)
        throw TaskError("modulated_task: non-real modulation form");

    EnergyTask t = energy_task(table, act);
    t.mod_form = Mat(A.real());
    return t;
}

double energy(const Vec& w, const EnergyTask& task) {
    if (w.size() != 2 * task.order()) throw TaskError("energy: weight length must be 2M");
    return energy_of(task, eval_rows(w, task, false).s);
}

Vec energy_grad(const Vec& w, const EnergyTask& task) {
    const int M = task.order();
    if (w.size() != 2 * M) throw TaskError("energy_grad: weight length must be 2M");
    RowEval e = eval_rows(w, task, true);
    Vec q, row_r;
    target_residual(task, e.s, q, row_r);
    Vec g = Vec::Zero(2 * M);
    const auto n = static_cast<Eigen::Index>(task.rows.size());
    for (Eigen::Index i = 0; i < n; ++i) {
        const PairRow& r = task.rows[static_cast<std::size_t>(i)];
        const double c = task.row_weight[i] * e.ds[i] * row_r[i];
        g[r.h1] += c;
        g[M + r.h2] += c;
    }
    return g;
}

Vec target_sums(const Vec& w, const EnergyTask& task) {
    const int M = task.order();
    Vec z = Vec::Zero(M);
    RowEval e = eval_rows(w, task, false);
    for (std::size_t i = 0; i < task.rows.size(); ++i)
        z[task.rows[i].h] += task.row_weight[static_cast<Eigen::Index>(i)] * e.s[static_cast<Eigen::Index>(i)];
    return z;
}

AscentResult ascend(Vec w0, const EnergyTask& task, const AscendConfig& cfg) {
    const double n0 = w0.norm();
    if (!(n0 > 0.0)) throw TaskError("ascend: zero start vector");
    Vec w = w0 / n0;

    AscentResult res;
    double e = energy(w, task);
    double lr = cfg.lr;
    double prev_gt = std::numeric_limits<double>::infinity();
    long step = 0;
    for (; step < cfg.max_steps; ++step) {
        Vec g = energy_grad(w, task);
        Vec gt = g - w.dot(g) * w;
        res.grad_norm = gt.norm();
        if (res.grad_norm <= cfg.tol) {
            res.converged = true;
            break;
        }

        // Once the per-step energy change drops under double resolution the
        // line search reads noise; finish with plain projected steps governed
        // by the gradient norm instead.
        const bool polish = lr * res.grad_norm * res.grad_norm <= 1e-13 * std::max(1.0, e);
        if (polish) {
            if (res.grad_norm > 1.5 * prev_gt) {
                lr *= 0.5;
                if (lr < 1e-300) break;
            }
            prev_gt = res.grad_norm;
            w = (w + lr * g).normalized();
            continue;
        }

        lr = std::min(cfg.lr, 2.0 * lr);
        bool accepted = false;
        for (int h = 0; h <= cfg.max_halvings; ++h) {
            Vec cand = (w + lr * g).normalized();
            const double ec = energy(cand, task);
            if (ec >= e) {
                w = std::move(cand);
                e = ec;
                accepted = true;
                break;
            }
            lr *= 0.5;
        }
        if (!accepted) break;  // no uphill step left at the smallest trust size
    }
    res.w = w;
    res.energy = energy(w, task);
    res.steps = step;
    res.theory_energy = std::numeric_limits<double>::quiet_NaN();
    return res;
}

void classify_maximum(AscentResult& res, const IrrepCatalog& cat, const Group& g) {
    const int M = g.order;
    if (res.w.size() != 2 * M) throw TaskError("classify_maximum: weight length must be 2M");
    const Vec u = res.w.head(M), v = res.w.tail(M);

    std::vector<double> mass(cat.entries.size(), 0.0);
    for (const auto& e : cat.entries) {
        const MatC pi = isotypic_projector(cat, e.id, g);
        const Mat pr = pi.real();  // u, v real; Pi Hermitian idempotent
        mass[static_cast<std::size_t>(e.id)] = u.dot(pr * u) + v.dot(pr * v);
    }

    auto merged = cat.merged_ids();
    res.c_profile.clear();
    res.c_profile.reserve(merged.size());
    double best = -1.0;
    int best_rep = -1;
    for (const auto& grp : merged) {
        double c = 0.0;
        for (int id : grp) c += mass[static_cast<std::size_t>(id)];
        res.c_profile.push_back(c);
        const Irrep& rep = cat.at(grp.front());
        if (rep.kind != Irrep::Trivial && c > best) {
            best = c;
            best_rep = rep.id;
        }
    }
    res.classified = true;
    res.c_max = best;
    res.label = best_rep;

    const Irrep& win = cat.at(best_rep);
    res.label_text = win.label;
    if (win.kind == Irrep::Real)
        res.theory_energy = static_cast<double>(M) / (8.0 * win.dim);
    else if (win.kind == Irrep::ComplexPair)
        res.theory_energy = static_cast<double>(M) / (16.0 * win.dim);
    else
        res.theory_energy = std::numeric_limits<double>::quiet_NaN();

    const Mat P = g.inverse_op();
    const Vec pu = P * u;
    const double rp = (v - pu).norm(), rm = (v + pu).norm();
    res.sign = rp <= rm ? 1 : -1;

    // The maxima form flat families: v matches P u only up to an intertwiner
    // (a phase for complex pairs, a commutant element in general). Fit the
    // best intertwiner by group averaging and measure what is left.
    auto orbit = [&](const Vec& x) {
        Mat O(M, M);
        for (int h = 0; h < M; ++h)
            for (int a = 0; a < M; ++a) O(g.cayley(h, a), h) = x[a];  // column h = R_h x
        return O;
    };
    const Mat Opu = orbit(pu), Ov = orbit(v);
    const Mat Avu = Ov * Opu.transpose() / M;
    const Mat Auu = Opu * Opu.transpose() / M;
    Eigen::SelfAdjointEigenSolver<Mat> es(Auu);
    const Vec ev = es.eigenvalues();
    const double cutoff = 1e-10 * ev.cwiseAbs().maxCoeff();
    Mat pinv = Mat::Zero(M, M);
    for (int i = 0; i < M; ++i)
        if (ev[i] > cutoff)
            pinv += es.eigenvectors().col(i) * es.eigenvectors().col(i).transpose() / ev[i];
    res.struct_residual = (v - Avu * (pinv * pu)).norm();
}

Mat tangent_basis(const Vec& w) {
    const auto d = w.size();
    Vec q = w;
    q[0] -= 1.0;  // Householder vector sending e_0 to w
    const double qn = q.norm();
    Mat B(d, d - 1);
    if (qn < 1e-12) {
        B = Mat::Identity(d, d).rightCols(d - 1);
        return B;
    }
    q /= qn;
    for (Eigen::Index j = 1; j < d; ++j) {
        Vec col = Vec::Zero(d);
        col[j] = 1.0;
        col -= 2.0 * q[j] * q;
        B.col(j - 1) = col;
    }
    return B;
}

FlatnessResult flatness(const Vec& w, const EnergyTask& task, double step) {
    const auto d = w.size();
    const Vec wn = w.normalized();
    const Mat B = tangent_basis(wn);

    auto tangential_grad = [&](const Vec& x) {
        const Vec xn = x.normalized();
        Vec g = energy_grad(xn, task);
        return Vec(g - xn.dot(g) * xn);
    };

    Mat H(d - 1, d - 1);
    for (Eigen::Index j = 0; j < d - 1; ++j) {
        const Vec dir = B.col(j);
        const Vec gp = tangential_grad(wn + step * dir);
        const Vec gm = tangential_grad(wn - step * dir);
        H.col(j) = B.transpose() * ((gp - gm) / (2.0 * step));
    }
    Mat Hs = 0.5 * (H + H.transpose());
    Eigen::SelfAdjointEigenSolver<Mat> es(Hs, Eigen::EigenvaluesOnly);
    const Vec ev = es.eigenvalues();
    FlatnessResult out;
    out.lambda_min_abs = ev.cwiseAbs().minCoeff();
    out.lambda_max = ev.maxCoeff();
    out.lambda_max_abs = ev.cwiseAbs().maxCoeff();
    return out;
}

MemorizationProfile memorization_profile(const Vec& weights, ActFun act) {
    const auto M = weights.size();
    if ((weights.array() < 0).any()) throw TaskError("memorization_profile: negative weight");
    const double tot = weights.sum();
    if (!(tot > 0)) throw TaskError("memorization_profile: weights must not be all zero");
    const Vec p = weights / tot;

    auto phi = [&](double x) { return act.df(x) / x; };

    // Monotonicity of phi on a log grid over (1e-6, sqrt(2)].
    const int grid = 64;
    double prev = phi(1e-6);
    bool nondecr = true, strictdecr = true;
    for (int i = 1; i <= grid; ++i) {
        const double x = 1e-6 * std::pow(std::sqrt(2.0) / 1e-6, static_cast<double>(i) / grid);
        const double cur = phi(x);
        if (cur < prev - 1e-12) nondecr = false;
        if (cur >= prev - 1e-15) strictdecr = false;
        prev = cur;
    }

    MemorizationProfile prof;
    prof.act = act.kind;
    if (nondecr) {
        prof.focused = true;
        Eigen::Index gstar = 0;
        p.maxCoeff(&gstar);
        prof.s = Vec::Zero(M);
        prof.s[gstar] = std::sqrt(2.0);
        return prof;
    }
    if (!strictdecr)
        throw TaskError("memorization_profile: phi is not monotone; no profile");

    const double cap = 2.0;
    const double phi_floor = phi(cap);
    const double phi_ceil = phi(1e-9);  // proxy for phi(0+)
    auto phi_inv = [&](double y) {
        if (y >= phi_ceil) return 0.0;
        if (y <= phi_floor) return cap;
        double lo = 1e-9, hi = cap;
        for (int it = 0; it < 200; ++it) {
            const double mid = 0.5 * (lo + hi);
            (phi(mid) > y ? lo : hi) = mid;
        }
        return 0.5 * (lo + hi);
    };
    auto budget = [&](double lam) {
        double s2 = 0;
        for (Eigen::Index g = 0; g < M; ++g) {
            if (!(p[g] > 0)) continue;
            const double s = phi_inv(2.0 * lam / p[g]);
            s2 += s * s;
        }
        return s2;
    };

    double lo = 1e-18, hi = 1.0;
    for (int it = 0; it < 400 && budget(hi) > 2.0; ++it) hi *= 2.0;
    for (int it = 0; it < 400 && budget(lo) < 2.0; ++it) lo *= 0.5;
    for (int it = 0; it < 200; ++it) {
        const double mid = std::sqrt(lo * hi);
        (budget(mid) > 2.0 ? lo : hi) = mid;
    }
    prof.lambda = std::sqrt(lo * hi);
    prof.s = Vec::Zero(M);
    for (Eigen::Index g = 0; g < M; ++g)
        if (p[g] > 0) prof.s[g] = phi_inv(2.0 * prof.lambda / p[g]);
    return prof;
}

StabilityVerdict vertex_stability(const AscentResult& ref, const EnergyTask& sub,
                                  const IrrepCatalog& cat, const Group& g, std::uint64_t seed) {
    if (!ref.classified) throw TaskError("vertex_stability: reference must be classified first");
    const int M = g.order;
    constexpr int kProbes = 16;
    constexpr double kPerturb = 0.05;
    constexpr double kReturnRad = 0.1;

    // Real projector of the reference merged component.
    const Irrep& win = cat.at(ref.label);
    Mat proj = isotypic_projector(cat, win.id, g).real();
    if (win.partner != win.id) proj += isotypic_projector(cat, win.partner, g).real();

    auto rng = make_rng(seed, 0x57ab);
    std::normal_distribution<double> normal(0.0, 1.0);

    StabilityVerdict verdict;
    verdict.probes_total = kProbes;
    verdict.stable = true;
    verdict.leak_margin = std::numeric_limits<double>::infinity();
    const double e_ref = energy(ref.w, sub);

    for (int t = 0; t < kProbes; ++t) {
        Vec delta(2 * M);
        for (Eigen::Index i = 0; i < 2 * M; ++i) delta[i] = normal(rng);
        delta -= ref.w.dot(delta) * ref.w;
        delta *= kPerturb / delta.norm();
        Vec w0 = (ref.w + delta).normalized();

        verdict.leak_margin = std::min(verdict.leak_margin, (e_ref - energy(w0, sub)) / kPerturb);

        AscentResult probe = ascend(w0, sub);
        classify_maximum(probe, cat, g);
        const Vec u = probe.w.head(M), v = probe.w.tail(M);
        const double comp_mass = std::clamp(u.dot(proj * u) + v.dot(proj * v), 0.0, 1.0);
        const double angle = std::acos(std::sqrt(comp_mass));
        const bool returned = probe.converged && probe.label == ref.label && angle <= kReturnRad;
        if (returned) ++verdict.probes_returned;
        verdict.stable = verdict.stable && returned;
    }
    return verdict;
}

double ht_energy_unbiased(const Vec& w, const PairTable& full, const std::vector<char>& kept,
                          double p, ActFun act) {
    const int M = full.order();
    if (kept.size() != full.rows.size()) throw TaskError("ht_energy_unbiased: mask length mismatch");
    if (!(p > 0.0) || p > 1.0) throw TaskError("ht_energy_unbiased: keep probability in (0,1] required");
    Vec zhat = Vec::Zero(M), var = Vec::Zero(M);
    for (std::size_t i = 0; i < full.rows.size(); ++i) {
        if (!kept[i]) continue;
        const PairRow& r = full.rows[i];
        const double s = act.f(w[r.h1] + w[M + r.h2]);
        zhat[r.h] += s / p;
        var[r.h] += (1.0 - p) / (p * p) * s * s;
    }
    const Vec zt = zhat.array() - zhat.mean();
    const double corr = (1.0 - 1.0 / M) * var.sum();
    return 0.5 * (zt.squaredNorm() - corr);
}

}  // namespace groklab
