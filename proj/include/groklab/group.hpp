#pragma once

#include <Eigen/Core>
#include <iosfwd>
#include <memory>
#include <string>
#include <vector>

namespace groklab {

struct GroupError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// How a group was built; drives which irrep catalogs are available.
struct GroupRecipe {
    enum Kind { Cyclic, ProductOfCyclics, Dihedral, Imported } kind = Imported;
    std::vector<int> cyclic_orders;  // Cyclic / ProductOfCyclics
    int dihedral_n = 0;
};

// Finite group as a Cayley table over element indices 0..M-1.
// Element 0 is always the identity; imports are re-indexed to enforce this.
struct Group {
    int order = 0;
    Eigen::MatrixXi cayley;       // (a,b) -> index of ab
    std::vector<int> inverse;
    int identity = 0;
    std::string name;
    bool abelian = false;
    GroupRecipe recipe;

    int op(int a, int b) const { return cayley(a, b); }
    int inv(int a) const { return inverse[static_cast<std::size_t>(a)]; }

    // Regular representation: R_h permutes index a to cayley(h, a).
    Eigen::MatrixXd regular_rep(int h) const;
    // Inverse operator P with P e_h = e_{h^-1}; P^2 = I.
    Eigen::MatrixXd inverse_op() const;
};

using GroupPtr = std::shared_ptr<const Group>;

Group make_cyclic(int M);
Group make_product(const std::vector<Group>& factors);
Group make_dihedral(int n);

// Throws GroupError naming the first violated invariant. Associativity is
// checked exhaustively for M <= 64 and on 10*M^2 seeded random triples above.
void validate_group(const Group& g);

// Text format: '#' comment lines, then M, then M rows of M indices,
// then an optional "name: <label>" line.
Group load_cayley(std::istream& in);
Group load_cayley_file(const std::string& path);
std::string to_cayley_text(const Group& g);

}  // namespace groklab
