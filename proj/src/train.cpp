#include "groklab/train.hpp"

#include <cmath>
#include <sstream>

#include "groklab/util.hpp"

namespace groklab {

Optimizer optimizer_from_string(const std::string& s) {
    if (s == "gd") return Optimizer::GD;
    if (s == "adam") return Optimizer::Adam;
    if (s == "muon") return Optimizer::Muon;
    throw NumericError("unknown optimizer: " + s);
}

std::string to_string(Optimizer o) {
    switch (o) {
        case Optimizer::GD: return "gd";
        case Optimizer::Adam: return "adam";
        case Optimizer::Muon: return "muon";
    }
    return "?";
}

std::string RunLog::to_csv() const {
    std::ostringstream out;
    out << "epoch,train_loss,test_loss,train_acc,test_acc,gf_norm,dW_cos,dV_cos,diag_ftf,diag_fft,align_gf\n";
    for (const auto& r : records) {
        out << r.epoch << ',' << format_g9(r.train_loss) << ',' << format_g9(r.test_loss) << ','
            << format_g9(r.train_acc) << ',' << format_g9(r.test_acc) << ',' << format_g9(r.gf_norm)
            << ',' << format_g9(r.dw_cos) << ',' << format_g9(r.dv_cos) << ','
            << format_g9(r.diag_ftf) << ',' << format_g9(r.diag_fft) << ',' << format_g9(r.align_gf)
            << '\n';
    }
    return out.str();
}

namespace {

struct AdamState {
    Mat m, v;
    void init(const Mat& w) {
        m = Mat::Zero(w.rows(), w.cols());
        v = Mat::Zero(w.rows(), w.cols());
    }
    void step(Mat& w, const Mat& g, double lr, double b1, double b2, double eps, long t) {
        m = b1 * m + (1.0 - b1) * g;
        v = b2 * v + (1.0 - b2) * g.cwiseProduct(g);
        const double c1 = 1.0 - std::pow(b1, static_cast<double>(t));
        const double c2 = 1.0 - std::pow(b2, static_cast<double>(t));
        w.noalias() -= (lr / c1) * m.cwiseQuotient(((v / c2).cwiseSqrt().array() + eps).matrix());
    }
};

double cosine_distance(const std::vector<Mat>& a, const std::vector<Mat>& b) {
    double dot = 0, na = 0, nb = 0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        dot += a[i].cwiseProduct(b[i]).sum();
        na += a[i].squaredNorm();
        nb += b[i].squaredNorm();
    }
    if (!(na > 0) || !(nb > 0)) return 0.0;
    return 1.0 - dot / (std::sqrt(na) * std::sqrt(nb));
}

}  // namespace

RunLog train(ModelState& m, const Mat& X_train, const Mat& Y_train, const Mat& X_test,
             const Mat& Y_test, const TrainConfig& cfg, Centering centering) {
    if (cfg.lr <= 0) throw NumericError("train: learning rate must be positive");
    if (cfg.eta < 0) throw NumericError("train: weight decay must be nonnegative");
    if (cfg.epochs < 1) throw NumericError("train: epochs must be >= 1");

    const auto n_train = static_cast<double>(X_train.rows());
    const auto n_test = static_cast<double>(X_test.rows());
    const Mat Ytil = center_rows(Y_train);

    RunLog log;
    std::vector<AdamState> adam_hidden(m.hidden.size());
    AdamState adam_out;
    std::vector<Mat> muon_buf(m.hidden.size());
    if (cfg.opt != Optimizer::GD) {
        for (std::size_t l = 0; l < m.hidden.size(); ++l) {
            adam_hidden[l].init(m.hidden[l]);
            if (cfg.opt == Optimizer::Muon)
                muon_buf[l] = Mat::Zero(m.hidden[l].rows(), m.hidden[l].cols());
        }
        adam_out.init(m.output);
    }

    std::vector<Mat> prev_hidden, prev_out;
    bool have_prev = false;

    // GD always carries the decay in the gradient; Adam/Muon do too unless the
    // decoupled variant is requested.
    const bool decoupled = cfg.decoupled_decay && cfg.opt != Optimizer::GD;
    for (long ep = 1; ep <= cfg.epochs; ++ep) {
        const double grad_eta = decoupled ? 0.0 : cfg.eta;
        GradResult g;
        try {
            g = loss_and_grads(m, X_train, Y_train, grad_eta);
        } catch (const NumericError&) {
            log.diverged = true;
            log.diverged_epoch = ep;
            break;
        }
        if (!std::isfinite(g.loss) || g.loss > cfg.divergence_cap) {
            log.diverged = true;
            log.diverged_epoch = ep;
            break;
        }

        const bool eval_now = (ep % cfg.eval_every == 0) || ep == 1 || ep == cfg.epochs;
        if (eval_now) {
            RunRecord r;
            r.epoch = ep;
            ForwardPass tr = forward(m, X_train);
            r.train_acc = accuracy(tr.yhat, Y_train);
            Mat res = Y_train - tr.yhat;
            const Eigen::RowVectorXd mu = res.colwise().mean();
            res.rowwise() -= mu;
            r.train_loss = 0.5 * res.squaredNorm() / n_train;
            if (n_test > 0) {
                ForwardPass te = forward(m, X_test);
                r.test_acc = accuracy(te.yhat, Y_test);
                Mat rte = Y_test - te.yhat;
                if (centering == Centering::ExactProjection)
                    rte.rowwise() -= rte.colwise().mean().eval();
                else
                    rte.rowwise() -= mu;  // train statistics reused at test
                r.test_loss = 0.5 * rte.squaredNorm() / n_test;
            }
            r.gf_norm = g.gf.norm();
            if (cfg.full_telemetry) {
                DiagRecord d = diagnostics(tr.F.back(), g.gf, Ytil);
                r.diag_ftf = d.diag_ftf;
                r.diag_fft = d.diag_fft;
                r.align_gf = d.align_gf;
            }
            if (have_prev) {
                r.dw_cos = cosine_distance(m.hidden, prev_hidden);
                r.dv_cos = cosine_distance({m.output}, prev_out);
            }
            prev_hidden = m.hidden;
            prev_out = {m.output};
            have_prev = true;

            if (log.first_train_epoch < 0 && r.train_acc >= cfg.acc_threshold) log.first_train_epoch = ep;
            if (log.first_test_epoch < 0 && r.test_acc >= cfg.acc_threshold) log.first_test_epoch = ep;
            log.records.push_back(r);
            if (cfg.stop_when_generalized && log.first_train_epoch >= 0 && log.first_test_epoch >= 0)
                break;
        }

        switch (cfg.opt) {
            case Optimizer::GD:
                for (std::size_t l = 0; l < m.hidden.size(); ++l) m.hidden[l] -= cfg.lr * g.d_hidden[l];
                m.output -= cfg.lr * g.d_output;
                break;
            case Optimizer::Adam: {
                const double shrink = decoupled ? 1.0 - cfg.lr * cfg.eta : 1.0;
                for (std::size_t l = 0; l < m.hidden.size(); ++l) {
                    m.hidden[l] *= shrink;
                    adam_hidden[l].step(m.hidden[l], g.d_hidden[l], cfg.lr, cfg.beta1, cfg.beta2, cfg.eps, ep);
                }
                m.output *= shrink;
                adam_out.step(m.output, g.d_output, cfg.lr, cfg.beta1, cfg.beta2, cfg.eps, ep);
                break;
            }
            case Optimizer::Muon: {
                const double shrink = decoupled ? 1.0 - cfg.lr * cfg.eta : 1.0;
                for (std::size_t l = 0; l < m.hidden.size(); ++l) {
                    m.hidden[l] *= shrink;
                    muon_buf[l] = cfg.beta1 * muon_buf[l] + (1.0 - cfg.beta1) * g.d_hidden[l];
                    if (muon_buf[l].norm() > 1e-14)
                        m.hidden[l] -= cfg.lr * polar_factor(muon_buf[l]);
                }
                m.output *= shrink;
                adam_out.step(m.output, g.d_output, cfg.lr, cfg.beta1, cfg.beta2, cfg.eps, ep);
                break;
            }
        }
    }
    return log;
}

RunLog train(ModelState& m, const Dataset& ds, const TrainConfig& cfg) {
    EncodedSplit enc = encode(ds);
    return train(m, enc.X_train, enc.Y_train, enc.X_test, enc.Y_test, cfg, ds.centering);
}

}  // namespace groklab
