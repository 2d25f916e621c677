#include <doctest.h>

#include <cmath>
#include <set>

#include "groklab/model.hpp"
#include "groklab/task.hpp"
#include "oracles.hpp"

using namespace groklab;

TEST_SUITE_BEGIN("task");

TEST_CASE("full task enumeration and block order") {
    auto z2 = std::make_shared<Group>(make_cyclic(2));
    PairTable t2 = full_task(z2);
    REQUIRE(t2.rows.size() == 4);
    // block h=0: (0,0), (1,1)
    CHECK(t2.rows[0].h1 == 0);
    CHECK(t2.rows[0].h2 == 0);
    CHECK(t2.rows[1].h1 == 1);
    CHECK(t2.rows[1].h2 == 1);

    auto z3 = std::make_shared<Group>(make_cyclic(3));
    PairTable t3 = full_task(z3);
    // block h=1 is rows 3..5, ordered by h1: (0,1),(1,0),(2,2)
    CHECK(t3.rows[3].h1 == 0);
    CHECK(t3.rows[3].h2 == 1);
    CHECK(t3.rows[4].h1 == 1);
    CHECK(t3.rows[4].h2 == 0);
    CHECK(t3.rows[5].h1 == 2);
    CHECK(t3.rows[5].h2 == 2);

    auto d3 = std::make_shared<Group>(make_dihedral(3));
    PairTable td = full_task(d3);
    CHECK(td.rows.size() == 36);
    std::vector<int> counts(6, 0);
    for (const auto& r : td.rows) {
        CHECK(d3->op(r.h1, r.h2) == r.h);
        counts[static_cast<std::size_t>(r.h)]++;
    }
    for (int c : counts) CHECK(c == 6);
}

TEST_CASE("split sizes pin the paper's sample counts") {
    auto g71 = std::make_shared<Group>(make_cyclic(71));
    Dataset d = split(full_task(g71), 0.4, 0);
    CHECK(d.train_idx.size() == 2016);
    CHECK(d.test_idx.size() == 71 * 71 - 2016);

    auto g127 = std::make_shared<Group>(make_cyclic(127));
    Dataset d2 = split(full_task(g127), 0.2, 0);
    CHECK(d2.train_idx.size() == 3225);
}

TEST_CASE("split p=1 and reproducibility") {
    auto g = std::make_shared<Group>(make_cyclic(7));
    PairTable t = full_task(g);
    Dataset all = split(t, 1.0, 3);
    CHECK(all.train_idx.size() == 49);
    CHECK(all.test_idx.empty());

    Dataset a = split(t, 0.3, 11);
    Dataset b = split(t, 0.3, 11);
    CHECK(a.train_idx == b.train_idx);
    CHECK(a.test_idx == b.test_idx);
    Dataset c = split(t, 0.3, 12);
    CHECK(a.train_idx != c.train_idx);

    // disjoint and covering
    std::set<int> seen(a.train_idx.begin(), a.train_idx.end());
    for (int i : a.test_idx) CHECK(seen.insert(i).second);
    CHECK(seen.size() == 49);

    CHECK_THROWS_AS(split(t, 0.0001, 0), TaskError);
}

TEST_CASE("bernoulli split expected size") {
    auto g = std::make_shared<Group>(make_cyclic(13));
    PairTable t = full_task(g);
    const double p = 0.37;
    const double N = 169;
    double total = 0;
    for (int s = 0; s < 100; ++s) total += static_cast<double>(split(t, p, s, SplitMode::Bernoulli).train_idx.size());
    const double mean = total / 100.0;
    const double sd_of_mean = std::sqrt(N * p * (1 - p) / 100.0);
    CHECK(std::abs(mean - p * N) <= 3.0 * sd_of_mean);
}

TEST_CASE("one-hot encoding") {
    auto g = std::make_shared<Group>(make_cyclic(2));
    Dataset d = split(full_task(g), 1.0, 0);
    EncodedSplit e = encode(d);
    REQUIRE(e.X_train.rows() == 4);
    // locate pair (1,0) -> 1
    for (Eigen::Index i = 0; i < 4; ++i) {
        const PairRow& r = d.table.rows[static_cast<std::size_t>(d.train_idx[static_cast<std::size_t>(i)])];
        if (r.h1 == 1 && r.h2 == 0) {
            CHECK(e.X_train(i, 0) == 0);
            CHECK(e.X_train(i, 1) == 1);
            CHECK(e.X_train(i, 2) == 1);
            CHECK(e.X_train(i, 3) == 0);
            CHECK(e.Y_train(i, 1) == 1);
        }
    }
    CHECK((e.X_train.rowwise().sum().array() == 2.0).all());
    // column sums of Y over the full task equal M
    CHECK((e.Y_train.colwise().sum().array() == 2.0).all());

    auto g5 = std::make_shared<Group>(make_cyclic(5));
    EncodedSplit e5 = encode(split(full_task(g5), 1.0, 0));
    CHECK((e5.Y_train.colwise().sum().array() == 5.0).all());
}

TEST_CASE("exact-projection centering zeroes column sums") {
    auto g = std::make_shared<Group>(make_cyclic(5));
    EncodedSplit e = encode(split(full_task(g), 0.6, 4));
    Mat Ft = center_rows(e.X_train);
    CHECK(Ft.colwise().sum().cwiseAbs().maxCoeff() <= 1e-10);
}

TEST_CASE("single target task") {
    auto g5 = std::make_shared<Group>(make_cyclic(5));
    Vec w5 = Vec::Ones(5);
    WeightedPairs wp = single_target_task(g5, 0, w5);
    for (const auto& r : wp.rows) {
        CHECK(g5->op(r.h1, r.h2) == 0);
        CHECK(r.h2 == (5 - r.h1) % 5);
    }
    CHECK((wp.weights.array() == 0.2).all());

    Vec w2(5);
    w2 << 0.5, 0.3, 0.2, 0.0, 0.0;
    WeightedPairs wp2 = single_target_task(g5, 0, w2);
    CHECK(wp2.rows.size() == 5);  // zero-weight rows retained
    CHECK(wp2.weights.sum() == doctest::Approx(1.0));
    CHECK(wp2.weights[3] == 0.0);

    auto d3 = std::make_shared<Group>(make_dihedral(3));
    WeightedPairs wpd = single_target_task(d3, 4, Vec::Ones(6));  // a reflection target
    for (const auto& r : wpd.rows) CHECK(d3->op(r.h1, r.h2) == 4);

    Vec neg(5);
    neg << 0.5, -0.1, 0.2, 0.2, 0.2;
    CHECK_THROWS_AS(single_target_task(g5, 0, neg), TaskError);
}

TEST_CASE("dataset manifest replays") {
    auto g = std::make_shared<Group>(make_cyclic(5));
    Dataset d = split(full_task(g), 0.4, 9);
    const std::string man = dataset_manifest_json(d, "cyclic 5");
    CHECK(man.find("\"p\": 0.4") != std::string::npos);
    CHECK(man.find("train_indices") != std::string::npos);
}

TEST_SUITE_END();
