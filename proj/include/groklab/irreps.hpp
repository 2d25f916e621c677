#pragma once

#include <Eigen/Core>
#include <complex>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "groklab/group.hpp"

namespace groklab {

using MatC = Eigen::MatrixXcd;
using VecC = Eigen::VectorXcd;

struct Irrep {
    int id = 0;
    int dim = 1;
    enum Kind { Trivial, Real, ComplexPair } kind = Trivial;
    int partner = 0;                // id of the conjugate irrep (self if not a pair)
    std::vector<MatC> matrices;     // one dim x dim unitary per group element
    std::string label;

    std::complex<double> character(int h) const { return matrices[static_cast<std::size_t>(h)].trace(); }
};

struct IrrepCatalog {
    int group_order = 0;
    std::vector<Irrep> entries;

    const Irrep& at(int id) const;
    // Sum over conjugate-pair partners folded in; lists each pair once.
    std::vector<std::vector<int>> merged_ids() const;
};

// Characters chi_k(h) = exp(2*pi*i * sum_j k_j h_j / M_j) for Z_{M1} x ... x Z_{Mr}.
IrrepCatalog abelian_irreps(const std::vector<int>& cyclic_orders);

// 1-d irreps plus floor((n-1)/2) rotation/reflection 2-d irreps of D_n.
IrrepCatalog dihedral_irreps(int n);

// Central idempotent Pi_k = (d_k/M) * sum_g conj(chi_k(g)) R_g.
MatC isotypic_projector(const IrrepCatalog& cat, int id, const Group& g);

// Catalog for a recipe-built group, or nullopt for imports without a sidecar.
std::optional<IrrepCatalog> catalog_for(const Group& g);

// Sidecar JSON: list of {k, dim, partner, matrices: per h a dim x dim array
// of [re, im] pairs}.
IrrepCatalog load_catalog_json(std::istream& in);
IrrepCatalog load_catalog_file(const std::string& path);
std::string to_catalog_json(const IrrepCatalog& cat);

}  // namespace groklab
