#include "groklab/task.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include <nlohmann/json.hpp>

#include "groklab/util.hpp"

namespace groklab {

PairTable full_task(GroupPtr g) {
    if (!g) throw TaskError("full_task: null group");
    PairTable t;
    t.group = std::move(g);
    const Group& G = *t.group;
    const int M = G.order;
    t.rows.reserve(static_cast<std::size_t>(M) * M);
    for (int h = 0; h < M; ++h)
        for (int h1 = 0; h1 < M; ++h1) {
            const int h2 = G.op(G.inv(h1), h);
            t.rows.push_back({h1, h2, h});
        }
    return t;
}

Dataset split(const PairTable& table, double p, std::uint64_t seed, SplitMode mode) {
    if (!(p > 0.0) || p > 1.0) throw TaskError("split: keep ratio must be in (0, 1]");
    const long N = table.size();
    Dataset ds;
    ds.table = table;
    ds.keep_ratio = p;
    ds.seed = seed;
    ds.mode = mode;

    auto rng = make_rng(seed, 0x5917);
    std::vector<char> keep(static_cast<std::size_t>(N), 0);
    if (mode == SplitMode::FixedCount) {
        const long n = static_cast<long>(std::floor(p * static_cast<double>(N)));
        if (n < 1) throw TaskError("split: keep ratio yields an empty train set");
        std::vector<int> order(static_cast<std::size_t>(N));
        std::iota(order.begin(), order.end(), 0);
        std::shuffle(order.begin(), order.end(), rng);
        for (long i = 0; i < n; ++i) keep[static_cast<std::size_t>(order[static_cast<std::size_t>(i)])] = 1;
    } else {
        std::uniform_real_distribution<double> unif(0.0, 1.0);
        for (long i = 0; i < N; ++i)
            if (unif(rng) < p) keep[static_cast<std::size_t>(i)] = 1;
        if (std::find(keep.begin(), keep.end(), 1) == keep.end())
            throw TaskError("split: bernoulli draw yields an empty train set");
    }
    for (long i = 0; i < N; ++i)
        (keep[static_cast<std::size_t>(i)] ? ds.train_idx : ds.test_idx).push_back(static_cast<int>(i));
    return ds;
}

void encode_rows(const PairTable& table, const std::vector<int>& idx,
                 Eigen::MatrixXd& X, Eigen::MatrixXd& Y) {
    const int M = table.order();
    const auto n = static_cast<Eigen::Index>(idx.size());
    X = Eigen::MatrixXd::Zero(n, 2 * M);
    Y = Eigen::MatrixXd::Zero(n, M);
    for (Eigen::Index i = 0; i < n; ++i) {
        const PairRow& r = table.rows[static_cast<std::size_t>(idx[static_cast<std::size_t>(i)])];
        X(i, r.h1) = 1.0;
        X(i, M + r.h2) = 1.0;
        Y(i, r.h) = 1.0;
    }
}

EncodedSplit encode(const Dataset& ds) {
    EncodedSplit e;
    encode_rows(ds.table, ds.train_idx, e.X_train, e.Y_train);
    encode_rows(ds.table, ds.test_idx, e.X_test, e.Y_test);
    return e;
}

WeightedPairs single_target_task(GroupPtr g, int target, Eigen::VectorXd weights) {
    if (!g) throw TaskError("single_target_task: null group");
    const Group& G = *g;
    if (target < 0 || target >= G.order) throw TaskError("single_target_task: target out of range");
    if (weights.size() != G.order) throw TaskError("single_target_task: weights length must equal group order");
    if ((weights.array() < 0.0).any()) throw TaskError("single_target_task: negative weight");
    const double s = weights.sum();
    if (!(s > 0.0)) throw TaskError("single_target_task: weights must not be all zero");

    WeightedPairs w;
    w.group = std::move(g);
    w.target = target;
    w.weights = weights / s;
    for (int e = 0; e < G.order; ++e) w.rows.push_back({e, G.op(G.inv(e), target), target});
    return w;
}

std::string dataset_manifest_json(const Dataset& ds, const std::string& group_desc) {
    nlohmann::json j;
    j["group"] = group_desc;
    j["table_hash"] = fnv1a(ds.table.group->cayley.data(),
                            sizeof(int) * static_cast<std::size_t>(ds.table.group->order) *
                                static_cast<std::size_t>(ds.table.group->order));
    j["p"] = ds.keep_ratio;
    j["seed"] = ds.seed;
    j["mode"] = ds.mode == SplitMode::FixedCount ? "fixed-count" : "bernoulli";
    j["train_indices"] = ds.train_idx;
    j["test_indices"] = ds.test_idx;
    return j.dump(1);
}

}  // namespace groklab
