#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "groklab/model.hpp"
#include "groklab/task.hpp"

namespace groklab {

enum class Optimizer { GD, Adam, Muon };

Optimizer optimizer_from_string(const std::string& s);
std::string to_string(Optimizer o);

struct TrainConfig {
    double lr = 1e-3;
    double eta = 0.0;               // weight decay
    bool decoupled_decay = false;   // true: multiplicative shrink before the step (Adam/Muon)
    Optimizer opt = Optimizer::Adam;
    double beta1 = 0.9, beta2 = 0.999, eps = 1e-8;
    long epochs = 1000;
    long eval_every = 100;
    std::uint64_t seed = 0;
    double acc_threshold = 0.99;
    bool full_telemetry = true;           // Gram/alignment diagnostics at eval points
    bool stop_when_generalized = false;   // stop once train and test both clear the threshold
    double divergence_cap = 1e12;
};

struct RunRecord {
    long epoch = 0;
    double train_loss = 0, test_loss = 0;
    double train_acc = 0, test_acc = 0;
    double gf_norm = 0;
    double dw_cos = 0, dv_cos = 0;  // cosine distance of consecutive logged weights
    double diag_ftf = 0, diag_fft = 0, align_gf = 0;
};

struct RunLog {
    std::vector<RunRecord> records;
    long first_train_epoch = -1;   // first eval epoch with train acc >= threshold
    long first_test_epoch = -1;
    bool diverged = false;
    long diverged_epoch = -1;

    long grokking_delay() const {
        return (first_train_epoch >= 0 && first_test_epoch >= 0) ? first_test_epoch - first_train_epoch : -1;
    }
    const RunRecord& final_record() const { return records.back(); }
    std::string to_csv() const;
};

RunLog train(ModelState& m, const Mat& X_train, const Mat& Y_train, const Mat& X_test,
             const Mat& Y_test, const TrainConfig& cfg,
             Centering centering = Centering::ExactProjection);

RunLog train(ModelState& m, const Dataset& ds, const TrainConfig& cfg);

}  // namespace groklab
