#include "groklab/group.hpp"

#include <algorithm>
#include <fstream>
#include <numeric>
#include <sstream>

#include "groklab/util.hpp"

namespace groklab {

namespace {

bool is_symmetric(const Eigen::MatrixXi& t) {
    return t == t.transpose();
}

std::vector<int> find_inverses(const Eigen::MatrixXi& t, int e) {
    const int M = static_cast<int>(t.rows());
    std::vector<int> inv(static_cast<std::size_t>(M), -1);
    for (int a = 0; a < M; ++a)
        for (int b = 0; b < M; ++b)
            if (t(a, b) == e && t(b, a) == e) inv[static_cast<std::size_t>(a)] = b;
    return inv;
}

Group finish(Eigen::MatrixXi table, std::string name, GroupRecipe recipe) {
    Group g;
    g.order = static_cast<int>(table.rows());
    g.cayley = std::move(table);
    g.identity = 0;
    g.inverse = find_inverses(g.cayley, 0);
    g.abelian = is_symmetric(g.cayley);
    g.name = std::move(name);
    g.recipe = std::move(recipe);
    return g;
}

}  // namespace

Eigen::MatrixXd Group::regular_rep(int h) const {
    Eigen::MatrixXd R = Eigen::MatrixXd::Zero(order, order);
    for (int a = 0; a < order; ++a) R(cayley(h, a), a) = 1.0;
    return R;
}

Eigen::MatrixXd Group::inverse_op() const {
    Eigen::MatrixXd P = Eigen::MatrixXd::Zero(order, order);
    for (int a = 0; a < order; ++a) P(inverse[static_cast<std::size_t>(a)], a) = 1.0;
    return P;
}

Group make_cyclic(int M) {
    if (M < 1) throw GroupError("make_cyclic: order must be >= 1");
    Eigen::MatrixXi t(M, M);
    for (int a = 0; a < M; ++a)
        for (int b = 0; b < M; ++b) t(a, b) = (a + b) % M;
    GroupRecipe r;
    r.kind = GroupRecipe::Cyclic;
    r.cyclic_orders = {M};
    return finish(std::move(t), "Z_" + std::to_string(M), std::move(r));
}

Group make_product(const std::vector<Group>& factors) {
    if (factors.empty()) throw GroupError("make_product: need at least one factor");
    long total = 1;
    for (const auto& f : factors) total *= f.order;
    const int M = static_cast<int>(total);

    // Row-major tuple index: last factor varies fastest.
    auto decode = [&](int idx, std::vector<int>& out) {
        for (std::size_t i = factors.size(); i-- > 0;) {
            out[i] = idx % factors[i].order;
            idx /= factors[i].order;
        }
    };
    auto encode = [&](const std::vector<int>& tup) {
        int idx = 0;
        for (std::size_t i = 0; i < factors.size(); ++i) idx = idx * factors[i].order + tup[i];
        return idx;
    };

    Eigen::MatrixXi t(M, M);
    std::vector<int> ta(factors.size()), tb(factors.size()), tc(factors.size());
    for (int a = 0; a < M; ++a) {
        decode(a, ta);
        for (int b = 0; b < M; ++b) {
            decode(b, tb);
            for (std::size_t i = 0; i < factors.size(); ++i) tc[i] = factors[i].cayley(ta[i], tb[i]);
            t(a, b) = encode(tc);
        }
    }

    std::string name;
    bool all_cyclic = true;
    GroupRecipe r;
    for (const auto& f : factors) {
        if (!name.empty()) name += "x";
        name += f.name;
        if (f.recipe.kind == GroupRecipe::Cyclic)
            r.cyclic_orders.push_back(f.order);
        else if (f.recipe.kind == GroupRecipe::ProductOfCyclics)
            r.cyclic_orders.insert(r.cyclic_orders.end(), f.recipe.cyclic_orders.begin(),
                                   f.recipe.cyclic_orders.end());
        else
            all_cyclic = false;
    }
    r.kind = all_cyclic ? GroupRecipe::ProductOfCyclics : GroupRecipe::Imported;
    if (!all_cyclic) r.cyclic_orders.clear();
    return finish(std::move(t), std::move(name), std::move(r));
}

Group make_dihedral(int n) {
    if (n < 3) throw GroupError("make_dihedral: need n >= 3");
    const int M = 2 * n;
    // Elements 0..n-1 are rotations r^j, n..2n-1 are reflections s r^j.
    auto mul = [n](int x, int y) {
        const bool xs = x >= n, ys = y >= n;
        const int a = xs ? x - n : x, b = ys ? y - n : y;
        if (!xs && !ys) return (a + b) % n;
        if (!xs && ys) return n + (((b - a) % n) + n) % n;   // r^a s r^b = s r^{b-a}
        if (xs && !ys) return n + (a + b) % n;               // s r^a r^b = s r^{a+b}
        return (((b - a) % n) + n) % n;                      // s r^a s r^b = r^{b-a}
    };
    Eigen::MatrixXi t(M, M);
    for (int x = 0; x < M; ++x)
        for (int y = 0; y < M; ++y) t(x, y) = mul(x, y);
    GroupRecipe r;
    r.kind = GroupRecipe::Dihedral;
    r.dihedral_n = n;
    return finish(std::move(t), "D_" + std::to_string(n), std::move(r));
}

void validate_group(const Group& g) {
    const int M = g.order;
    if (M < 1) throw GroupError("group order must be positive");
    if (g.cayley.rows() != M || g.cayley.cols() != M) throw GroupError("cayley table shape mismatch");
    if (static_cast<int>(g.inverse.size()) != M) throw GroupError("inverse table length mismatch");

    std::vector<char> seen(static_cast<std::size_t>(M));
    for (int a = 0; a < M; ++a) {
        std::fill(seen.begin(), seen.end(), 0);
        for (int b = 0; b < M; ++b) {
            const int v = g.cayley(a, b);
            if (v < 0 || v >= M) throw GroupError("entry out of range at row " + std::to_string(a));
            if (seen[static_cast<std::size_t>(v)]) throw GroupError("row not a permutation: row " + std::to_string(a));
            seen[static_cast<std::size_t>(v)] = 1;
        }
    }
    for (int b = 0; b < M; ++b) {
        std::fill(seen.begin(), seen.end(), 0);
        for (int a = 0; a < M; ++a) {
            const int v = g.cayley(a, b);
            if (seen[static_cast<std::size_t>(v)]) throw GroupError("column not a permutation: column " + std::to_string(b));
            seen[static_cast<std::size_t>(v)] = 1;
        }
    }

    const int e = g.identity;
    if (e != 0) throw GroupError("identity must be element 0");
    for (int a = 0; a < M; ++a) {
        if (g.cayley(e, a) != a || g.cayley(a, e) != a)
            throw GroupError("identity law fails at element " + std::to_string(a));
    }
    for (int a = 0; a < M; ++a) {
        const int ia = g.inverse[static_cast<std::size_t>(a)];
        if (ia < 0 || ia >= M || g.cayley(a, ia) != e || g.cayley(ia, a) != e)
            throw GroupError("inverse law fails at element " + std::to_string(a));
    }

    auto assoc = [&](int a, int b, int c) {
        return g.cayley(g.cayley(a, b), c) == g.cayley(a, g.cayley(b, c));
    };
    if (M <= 64) {
        for (int a = 0; a < M; ++a)
            for (int b = 0; b < M; ++b)
                for (int c = 0; c < M; ++c)
                    if (!assoc(a, b, c))
                        throw GroupError("associativity fails at (" + std::to_string(a) + "," +
                                         std::to_string(b) + "," + std::to_string(c) + ")");
    } else {
        // Seeded from the table contents so the sample is reproducible per group.
        std::uint64_t h = fnv1a(g.cayley.data(), sizeof(int) * static_cast<std::size_t>(M) * M);
        auto rng = make_rng(h);
        std::uniform_int_distribution<int> pick(0, M - 1);
        const long trials = 10L * M * M;
        for (long t = 0; t < trials; ++t) {
            int a = pick(rng), b = pick(rng), c = pick(rng);
            if (!assoc(a, b, c))
                throw GroupError("associativity fails at (" + std::to_string(a) + "," +
                                 std::to_string(b) + "," + std::to_string(c) + ")");
        }
    }

    if (g.abelian != is_symmetric(g.cayley)) throw GroupError("abelian flag inconsistent with table");
}

namespace {

Group from_table(Eigen::MatrixXi table, std::string name) {
    const int M = static_cast<int>(table.rows());
    // Locate the identity, then relabel so it sits at index 0.
    int e = -1;
    for (int cand = 0; cand < M; ++cand) {
        bool ok = true;
        for (int a = 0; a < M && ok; ++a)
            ok = table(cand, a) == a && table(a, cand) == a;
        if (ok) {
            e = cand;
            break;
        }
    }
    if (e < 0) throw GroupError("no identity element found");
    if (e != 0) {
        std::vector<int> perm(static_cast<std::size_t>(M));
        std::iota(perm.begin(), perm.end(), 0);
        std::swap(perm[0], perm[static_cast<std::size_t>(e)]);  // perm maps new index -> old index
        Eigen::MatrixXi t2(M, M);
        std::vector<int> inv_perm(static_cast<std::size_t>(M));
        for (int i = 0; i < M; ++i) inv_perm[static_cast<std::size_t>(perm[static_cast<std::size_t>(i)])] = i;
        for (int a = 0; a < M; ++a)
            for (int b = 0; b < M; ++b)
                t2(a, b) = inv_perm[static_cast<std::size_t>(
                    table(perm[static_cast<std::size_t>(a)], perm[static_cast<std::size_t>(b)]))];
        table = std::move(t2);
    }
    GroupRecipe r;
    r.kind = GroupRecipe::Imported;
    Group g = finish(std::move(table), std::move(name), std::move(r));
    validate_group(g);
    return g;
}

}  // namespace

Group load_cayley(std::istream& in) {
    std::string line;
    std::vector<std::string> body;
    std::string name;
    while (std::getline(in, line)) {
        std::size_t i = line.find_first_not_of(" \t\r");
        if (i == std::string::npos) continue;
        if (line[i] == '#') continue;
        if (line.compare(i, 5, "name:") == 0) {
            name = line.substr(i + 5);
            std::size_t a = name.find_first_not_of(" \t");
            std::size_t b = name.find_last_not_of(" \t\r");
            name = (a == std::string::npos) ? "" : name.substr(a, b - a + 1);
            continue;
        }
        body.push_back(line);
    }
    if (body.empty()) throw GroupError("parse error: empty table file");
    int M = 0;
    {
        std::istringstream ss(body.front());
        if (!(ss >> M) || M < 1) throw GroupError("parse error: bad order line");
        int extra;
        if (ss >> extra) throw GroupError("parse error: order line has trailing tokens");
    }
    if (static_cast<int>(body.size()) != M + 1)
        throw GroupError("parse error: expected " + std::to_string(M) + " table rows, got " +
                         std::to_string(body.size() - 1));
    Eigen::MatrixXi t(M, M);
    for (int a = 0; a < M; ++a) {
        std::istringstream ss(body[static_cast<std::size_t>(a) + 1]);
        for (int b = 0; b < M; ++b) {
            if (!(ss >> t(a, b)))
                throw GroupError("parse error: row " + std::to_string(a) + " has fewer than " +
                                 std::to_string(M) + " entries");
        }
        int extra;
        if (ss >> extra) throw GroupError("parse error: row " + std::to_string(a) + " has trailing tokens");
    }
    if (name.empty()) name = "imported_" + std::to_string(M);
    return from_table(std::move(t), std::move(name));
}

Group load_cayley_file(const std::string& path) {
    std::ifstream f(path);
    if (!f) throw GroupError("cannot open " + path);
    return load_cayley(f);
}

std::string to_cayley_text(const Group& g) {
    std::ostringstream out;
    out << g.order << "\n";
    for (int a = 0; a < g.order; ++a) {
        for (int b = 0; b < g.order; ++b) {
            if (b) out << ' ';
            out << g.cayley(a, b);
        }
        out << "\n";
    }
    out << "name: " << g.name << "\n";
    return out.str();
}

}  // namespace groklab
