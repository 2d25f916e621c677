#include <doctest.h>

#include <sstream>

#include "groklab/group.hpp"
#include "oracles.hpp"

using namespace groklab;

TEST_SUITE_BEGIN("group");

TEST_CASE("cyclic group basics") {
    Group g = make_cyclic(5);
    CHECK(g.order == 5);
    CHECK(g.op(2, 4) == 1);
    CHECK(g.inv(2) == 3);
    CHECK(g.abelian);
    CHECK(g.name == "Z_5");
    validate_group(g);

    Group one = make_cyclic(1);
    validate_group(one);
    CHECK(one.op(0, 0) == 0);

    validate_group(make_cyclic(71));
}

TEST_CASE("product group") {
    Group z4 = make_cyclic(4), z7 = make_cyclic(7);
    Group p = make_product({z4, z7});
    CHECK(p.order == 28);
    CHECK(p.abelian);
    validate_group(p);

    Group single = make_product({make_cyclic(2)});
    CHECK(single.cayley == make_cyclic(2).cayley);

    // Z_2 x Z_3 is isomorphic to Z_6 (exhaustive bijection search).
    Group p6 = make_product({make_cyclic(2), make_cyclic(3)});
    CHECK(oracles::isomorphic(p6, make_cyclic(6)));
    // and not to the only other order-6 group shape we can build
    CHECK_FALSE(oracles::isomorphic(p6, make_dihedral(3)));
}

TEST_CASE("dihedral group") {
    Group d3 = make_dihedral(3);
    CHECK(d3.order == 6);
    CHECK_FALSE(d3.abelian);
    validate_group(d3);
    // reflections are involutions
    for (int r = 3; r < 6; ++r) CHECK(d3.op(r, r) == 0);
    // non-commuting witness
    bool found = false;
    for (int a = 0; a < 6 && !found; ++a)
        for (int b = 0; b < 6 && !found; ++b) found = d3.op(a, b) != d3.op(b, a);
    CHECK(found);

    validate_group(make_dihedral(4));
}

TEST_CASE("regular representation and inverse operator") {
    Group g = make_dihedral(3);
    const int M = g.order;
    for (int h1 = 0; h1 < M; ++h1) {
        Mat R = g.regular_rep(h1);
        for (int h2 = 0; h2 < M; ++h2) {
            Vec e = Vec::Zero(M);
            e[h2] = 1;
            Vec lhs = R * e;
            CHECK(lhs[g.op(h1, h2)] == 1.0);
            CHECK(lhs.sum() == 1.0);
        }
    }
    Mat P = g.inverse_op();
    CHECK((P * P - Mat::Identity(M, M)).norm() == 0.0);
}

TEST_CASE("cayley file round trip") {
    Group g = make_cyclic(3);
    std::string text = to_cayley_text(g);
    std::istringstream in(text);
    Group back = load_cayley(in);
    CHECK(back.cayley == g.cayley);
    CHECK(back.name == g.name);
    // canonical emit of a canonical file is byte-identical
    CHECK(to_cayley_text(back) == text);
}

TEST_CASE("load rejects broken tables") {
    // duplicated entry in a row
    std::istringstream bad("3\n0 1 2\n1 1 0\n2 0 1\n");
    CHECK_THROWS_WITH_AS(load_cayley(bad), doctest::Contains("row not a permutation"), GroupError);

    std::istringstream short_row("2\n0 1\n1\n");
    CHECK_THROWS_AS(load_cayley(short_row), GroupError);

    std::istringstream no_assoc("3\n0 1 2\n1 0 2\n2 1 0\n");  // latin square, not a group
    CHECK_THROWS_AS(load_cayley(no_assoc), GroupError);
}

TEST_CASE("import with comments and identity re-indexing") {
    // Z_3 with elements relabeled so the identity sits at index 2.
    std::istringstream in(
        "# shifted cyclic table\n"
        "3\n"
        "1 2 0\n"
        "2 0 1\n"
        "0 1 2\n"
        "name: shifted\n");
    Group g = load_cayley(in);
    CHECK(g.identity == 0);
    CHECK(g.name == "shifted");
    CHECK(oracles::isomorphic(g, make_cyclic(3)));
}

TEST_CASE("dihedral import equals built-in up to isomorphism") {
    Group d6 = make_dihedral(6);
    std::string text = to_cayley_text(d6);
    std::istringstream in(text);
    Group back = load_cayley(in);
    CHECK_FALSE(back.abelian);
    CHECK(back.order == 12);
    CHECK(back.cayley == d6.cayley);
}

TEST_SUITE_END();
