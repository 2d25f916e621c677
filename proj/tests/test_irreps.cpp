#include <doctest.h>

#include <complex>
#include <set>
#include <sstream>

#include "groklab/irreps.hpp"
#include "oracles.hpp"

using namespace groklab;

TEST_SUITE_BEGIN("irreps");

namespace {

void check_catalog_invariants(const IrrepCatalog& cat, const Group& g) {
    const int M = g.order;
    REQUIRE(cat.group_order == M);

    long dim2 = 0;
    for (const auto& e : cat.entries) dim2 += static_cast<long>(e.dim) * e.dim;
    CHECK(dim2 == M);

    for (const auto& e : cat.entries) {
        for (int h1 = 0; h1 < M; ++h1) {
            // unitarity
            const MatC& A = e.matrices[static_cast<std::size_t>(h1)];
            CHECK((A * A.adjoint() - MatC::Identity(e.dim, e.dim)).norm() <= 1e-10);
            for (int h2 = 0; h2 < M; ++h2) {
                const MatC& B = e.matrices[static_cast<std::size_t>(h2)];
                const MatC& AB = e.matrices[static_cast<std::size_t>(g.op(h1, h2))];
                CHECK((A * B - AB).cwiseAbs().maxCoeff() <= 1e-10);
            }
        }
    }

    // character orthogonality
    for (const auto& e1 : cat.entries)
        for (const auto& e2 : cat.entries) {
            std::complex<double> acc = 0;
            for (int h = 0; h < M; ++h) acc += e1.character(h) * std::conj(e2.character(h));
            acc /= static_cast<double>(M);
            const double want = e1.id == e2.id ? 1.0 : 0.0;
            CHECK(std::abs(acc - want) <= 1e-10);
        }

    // regular character identity: (1/M) sum_k d_k chi_k(h) = [h == e]
    for (int h = 0; h < M; ++h) {
        std::complex<double> acc = 0;
        for (const auto& e : cat.entries) acc += static_cast<double>(e.dim) * e.character(h);
        acc /= static_cast<double>(M);
        CHECK(std::abs(acc - (h == 0 ? 1.0 : 0.0)) <= 1e-10);
    }
}

}  // namespace

TEST_CASE("abelian characters") {
    IrrepCatalog cat = abelian_irreps({5});
    CHECK(cat.entries.size() == 5);
    // chi_2(3) = exp(2 pi i 6/5)
    const auto got = cat.at(2).character(3);
    const auto want = std::polar(1.0, 2.0 * std::numbers::pi * 6.0 / 5.0);
    CHECK(std::abs(got - want) <= 1e-12);
    check_catalog_invariants(cat, make_cyclic(5));

    IrrepCatalog z2 = abelian_irreps({2});
    CHECK(z2.at(1).character(1).real() == doctest::Approx(-1.0));
    CHECK(z2.at(1).kind == Irrep::Real);
    CHECK(z2.at(1).partner == 1);
}

TEST_CASE("product characters satisfy orthogonality") {
    IrrepCatalog cat = abelian_irreps({4, 7});
    CHECK(cat.entries.size() == 28);
    check_catalog_invariants(cat, make_product({make_cyclic(4), make_cyclic(7)}));
}

TEST_CASE("dihedral catalogs") {
    IrrepCatalog d3 = dihedral_irreps(3);
    std::multiset<int> dims3;
    for (const auto& e : d3.entries) dims3.insert(e.dim);
    CHECK(dims3 == std::multiset<int>{1, 1, 2});
    check_catalog_invariants(d3, make_dihedral(3));

    IrrepCatalog d4 = dihedral_irreps(4);
    std::multiset<int> dims4;
    for (const auto& e : d4.entries) dims4.insert(e.dim);
    CHECK(dims4 == std::multiset<int>{1, 1, 1, 1, 2});
    check_catalog_invariants(d4, make_dihedral(4));

    check_catalog_invariants(dihedral_irreps(5), make_dihedral(5));
}

TEST_CASE("isotypic projectors") {
    Group g = make_cyclic(3);
    IrrepCatalog cat = abelian_irreps({3});
    const int M = 3;

    MatC pi0 = isotypic_projector(cat, 0, g);
    CHECK((pi0 - MatC::Constant(M, M, 1.0 / M)).norm() <= 1e-12);

    MatC pi1 = isotypic_projector(cat, 1, g);
    MatC pi2 = isotypic_projector(cat, 2, g);
    CHECK((pi1 + pi2 - (MatC::Identity(M, M) - pi0)).norm() <= 1e-10);

    for (int k = 0; k < 3; ++k) {
        MatC pi = isotypic_projector(cat, k, g);
        CHECK((pi * pi - pi).norm() <= 1e-10);
        CHECK((pi - pi.adjoint()).norm() <= 1e-10);
        CHECK(std::abs(pi.trace().real() - 1.0) <= 1e-10);  // d_k m_k = 1
        // commutes with every regular representation
        for (int h = 0; h < M; ++h) {
            Mat R = g.regular_rep(h);
            CHECK((pi * R - R * pi).norm() <= 1e-10);
        }
    }

    Group d3 = make_dihedral(3);
    IrrepCatalog cat3 = dihedral_irreps(3);
    for (const auto& e : cat3.entries) {
        MatC pi = isotypic_projector(cat3, e.id, d3);
        CHECK((pi * pi - pi).norm() <= 1e-10);
        CHECK(std::abs(pi.trace().real() - e.dim * e.dim) <= 1e-10);  // d_k^2 for the regular rep
        for (int h = 0; h < d3.order; ++h) {
            Mat R = d3.regular_rep(h);
            CHECK((pi * R - R * pi).norm() <= 1e-10);
        }
    }

    // completeness
    MatC total = MatC::Zero(6, 6);
    for (const auto& e : cat3.entries) total += isotypic_projector(cat3, e.id, d3);
    CHECK((total - MatC::Identity(6, 6)).norm() <= 1e-10);
}

TEST_CASE("catalog sidecar json round trip") {
    IrrepCatalog cat = dihedral_irreps(3);
    const std::string text = to_catalog_json(cat);
    std::istringstream in(text);
    IrrepCatalog back = load_catalog_json(in);
    REQUIRE(back.entries.size() == cat.entries.size());
    for (std::size_t i = 0; i < cat.entries.size(); ++i) {
        CHECK(back.entries[i].dim == cat.entries[i].dim);
        CHECK(back.entries[i].kind == cat.entries[i].kind);
        for (int h = 0; h < cat.group_order; ++h)
            CHECK((back.entries[i].matrices[static_cast<std::size_t>(h)] -
                   cat.entries[i].matrices[static_cast<std::size_t>(h)])
                      .norm() <= 1e-12);
    }
}

TEST_CASE("catalog_for follows the recipe") {
    CHECK(catalog_for(make_cyclic(6)).has_value());
    CHECK(catalog_for(make_product({make_cyclic(2), make_cyclic(3)})).has_value());
    CHECK(catalog_for(make_dihedral(4)).has_value());
    std::istringstream in(to_cayley_text(make_cyclic(3)));
    CHECK_FALSE(catalog_for(load_cayley(in)).has_value());
}

TEST_SUITE_END();
