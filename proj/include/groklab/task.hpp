#pragma once

#include <Eigen/Core>
#include <cstdint>
#include <string>
#include <vector>

#include "groklab/group.hpp"

namespace groklab {

struct TaskError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct PairRow {
    int h1, h2, h;  // h = h1 * h2
};

// All M^2 ordered pairs, grouped by target h and ordered by h1 within a block.
struct PairTable {
    GroupPtr group;
    std::vector<PairRow> rows;

    int order() const { return group->order; }
    long size() const { return static_cast<long>(rows.size()); }
};

PairTable full_task(GroupPtr g);

enum class SplitMode { FixedCount, Bernoulli };
enum class Centering { ExactProjection, TrainStatistics };

struct Dataset {
    PairTable table;
    std::vector<int> train_idx, test_idx;  // indices into table.rows, ascending
    double keep_ratio = 1.0;
    std::uint64_t seed = 0;
    SplitMode mode = SplitMode::FixedCount;
    Centering centering = Centering::ExactProjection;
};

// FixedCount draws floor(p*M^2) rows without replacement; Bernoulli keeps each
// row independently with probability p. Deterministic given (p, seed, mode).
Dataset split(const PairTable& table, double p, std::uint64_t seed,
              SplitMode mode = SplitMode::FixedCount);

struct EncodedSplit {
    Eigen::MatrixXd X_train, Y_train, X_test, Y_test;
};

// One-hot rows: x = (e_{h1}, e_{h2}) in R^{2M}, y = e_h in R^M.
EncodedSplit encode(const Dataset& ds);
void encode_rows(const PairTable& table, const std::vector<int>& idx,
                 Eigen::MatrixXd& X, Eigen::MatrixXd& Y);

// Single-target task of Thm-style memorization studies: rows (g, g^-1 h) with
// weights p_g >= 0 normalized to sum 1.
struct WeightedPairs {
    GroupPtr group;
    int target = 0;
    std::vector<PairRow> rows;   // row g is (g, g^-1 h)
    Eigen::VectorXd weights;
};

WeightedPairs single_target_task(GroupPtr g, int target, Eigen::VectorXd weights);

// JSON manifest with enough state to replay the split exactly.
std::string dataset_manifest_json(const Dataset& ds, const std::string& group_desc);

}  // namespace groklab
