#include "groklab/irreps.hpp"

#include <cmath>
#include <fstream>
#include <numbers>
#include <sstream>

#include <nlohmann/json.hpp>

namespace groklab {

using json = nlohmann::json;

const Irrep& IrrepCatalog::at(int id) const {
    if (id < 0 || id >= static_cast<int>(entries.size()))
        throw GroupError("irrep id out of range: " + std::to_string(id));
    return entries[static_cast<std::size_t>(id)];
}

std::vector<std::vector<int>> IrrepCatalog::merged_ids() const {
    std::vector<std::vector<int>> out;
    std::vector<char> used(entries.size(), 0);
    for (const auto& e : entries) {
        if (used[static_cast<std::size_t>(e.id)]) continue;
        used[static_cast<std::size_t>(e.id)] = 1;
        std::vector<int> grp{e.id};
        if (e.partner != e.id) {
            used[static_cast<std::size_t>(e.partner)] = 1;
            grp.push_back(e.partner);
        }
        out.push_back(std::move(grp));
    }
    return out;
}

IrrepCatalog abelian_irreps(const std::vector<int>& cyclic_orders) {
    if (cyclic_orders.empty()) throw GroupError("abelian_irreps: empty recipe");
    long total = 1;
    for (int m : cyclic_orders) {
        if (m < 1) throw GroupError("abelian_irreps: bad cyclic order");
        total *= m;
    }
    const int M = static_cast<int>(total);
    const std::size_t r = cyclic_orders.size();

    auto decode = [&](int idx, std::vector<int>& out) {
        for (std::size_t i = r; i-- > 0;) {
            out[i] = idx % cyclic_orders[i];
            idx /= cyclic_orders[i];
        }
    };
    auto encode = [&](const std::vector<int>& tup) {
        int idx = 0;
        for (std::size_t i = 0; i < r; ++i) idx = idx * cyclic_orders[i] + tup[i];
        return idx;
    };

    IrrepCatalog cat;
    cat.group_order = M;
    cat.entries.resize(static_cast<std::size_t>(M));
    std::vector<int> kt(r), ht(r), nk(r);
    for (int k = 0; k < M; ++k) {
        decode(k, kt);
        Irrep& e = cat.entries[static_cast<std::size_t>(k)];
        e.id = k;
        e.dim = 1;
        e.matrices.resize(static_cast<std::size_t>(M));
        for (int h = 0; h < M; ++h) {
            decode(h, ht);
            double phase = 0.0;
            for (std::size_t i = 0; i < r; ++i)
                phase += static_cast<double>(kt[i]) * ht[i] / cyclic_orders[i];
            MatC m(1, 1);
            m(0, 0) = std::polar(1.0, 2.0 * std::numbers::pi * phase);
            e.matrices[static_cast<std::size_t>(h)] = m;
        }
        bool self_conj = true;
        for (std::size_t i = 0; i < r; ++i) {
            nk[i] = (cyclic_orders[i] - kt[i]) % cyclic_orders[i];
            if (nk[i] != kt[i]) self_conj = false;
        }
        e.partner = self_conj ? k : encode(nk);
        e.kind = (k == 0) ? Irrep::Trivial : (self_conj ? Irrep::Real : Irrep::ComplexPair);
        std::ostringstream lab;
        lab << "k=";
        for (std::size_t i = 0; i < r; ++i) lab << (i ? "," : "") << kt[i];
        e.label = lab.str();
    }
    return cat;
}

IrrepCatalog dihedral_irreps(int n) {
    if (n < 3) throw GroupError("dihedral_irreps: need n >= 3");
    const int M = 2 * n;
    IrrepCatalog cat;
    cat.group_order = M;

    auto add_1d = [&](const std::string& label, auto chi) {
        Irrep e;
        e.id = static_cast<int>(cat.entries.size());
        e.partner = e.id;
        e.dim = 1;
        e.label = label;
        e.matrices.resize(static_cast<std::size_t>(M));
        for (int h = 0; h < M; ++h) {
            MatC m(1, 1);
            m(0, 0) = chi(h);
            e.matrices[static_cast<std::size_t>(h)] = m;
        }
        e.kind = Irrep::Trivial;
        for (int h = 0; h < M; ++h)
            if (std::abs(e.matrices[static_cast<std::size_t>(h)](0, 0) - 1.0) > 1e-14) {
                e.kind = Irrep::Real;
                break;
            }
        cat.entries.push_back(std::move(e));
    };

    add_1d("triv", [](int) { return 1.0; });
    add_1d("sign", [n](int h) { return h < n ? 1.0 : -1.0; });
    if (n % 2 == 0) {
        add_1d("alt", [n](int h) { return (h % n) % 2 == 0 ? 1.0 : -1.0; });
        add_1d("alt_sign", [n](int h) {
            double v = (h % n) % 2 == 0 ? 1.0 : -1.0;
            return h < n ? v : -v;
        });
    }

    // 2-d irrep k: rotations map to Rot(2*pi*k*a/n), reflections s r^a to
    // Ref(-2*pi*k*a/n) with Ref(t) = [[cos t, sin t], [sin t, -cos t]].
    for (int k = 1; k <= (n - 1) / 2; ++k) {
        Irrep e;
        e.id = static_cast<int>(cat.entries.size());
        e.partner = e.id;
        e.dim = 2;
        e.kind = Irrep::Real;
        e.label = "2d:" + std::to_string(k);
        e.matrices.resize(static_cast<std::size_t>(M));
        for (int h = 0; h < M; ++h) {
            const int a = h % n;
            const double t = 2.0 * std::numbers::pi * k * a / n;
            MatC m(2, 2);
            if (h < n)
                m << std::cos(t), -std::sin(t), std::sin(t), std::cos(t);
            else
                m << std::cos(-t), std::sin(-t), std::sin(-t), -std::cos(-t);
            e.matrices[static_cast<std::size_t>(h)] = m;
        }
        cat.entries.push_back(std::move(e));
    }
    return cat;
}

MatC isotypic_projector(const IrrepCatalog& cat, int id, const Group& g) {
    if (cat.group_order != g.order) throw GroupError("catalog/group order mismatch");
    const Irrep& e = cat.at(id);
    const int M = g.order;
    MatC pi = MatC::Zero(M, M);
    for (int h = 0; h < M; ++h) {
        const std::complex<double> c = std::conj(e.character(h));
        if (std::abs(c) < 1e-15) continue;
        // R_h column a has a one at row cayley(h, a).
        for (int a = 0; a < M; ++a) pi(g.cayley(h, a), a) += c;
    }
    pi *= static_cast<double>(e.dim) / M;
    return pi;
}

std::optional<IrrepCatalog> catalog_for(const Group& g) {
    switch (g.recipe.kind) {
        case GroupRecipe::Cyclic:
        case GroupRecipe::ProductOfCyclics:
            return abelian_irreps(g.recipe.cyclic_orders);
        case GroupRecipe::Dihedral:
            return dihedral_irreps(g.recipe.dihedral_n);
        case GroupRecipe::Imported:
        default:
            return std::nullopt;
    }
}

IrrepCatalog load_catalog_json(std::istream& in) {
    json j = json::parse(in);
    IrrepCatalog cat;
    if (!j.is_array() || j.empty()) throw GroupError("catalog sidecar: expected a nonempty list");
    for (const auto& je : j) {
        Irrep e;
        e.id = je.at("k").get<int>();
        e.dim = je.at("dim").get<int>();
        e.partner = je.at("partner").get<int>();
        const auto& mats = je.at("matrices");
        cat.group_order = static_cast<int>(mats.size());
        for (const auto& jm : mats) {
            MatC m(e.dim, e.dim);
            for (int r = 0; r < e.dim; ++r)
                for (int c = 0; c < e.dim; ++c) {
                    const auto& cell = jm.at(static_cast<std::size_t>(r)).at(static_cast<std::size_t>(c));
                    m(r, c) = {cell.at(0).get<double>(), cell.at(1).get<double>()};
                }
            e.matrices.push_back(std::move(m));
        }
        cat.entries.push_back(std::move(e));
    }
    // Derive kinds: identity character everywhere -> trivial; self-partnered -> real.
    for (auto& e : cat.entries) {
        bool triv = true;
        for (int h = 0; h < cat.group_order && triv; ++h)
            triv = std::abs(e.character(h) - std::complex<double>(e.dim, 0)) < 1e-12;
        e.kind = triv ? Irrep::Trivial : (e.partner == e.id ? Irrep::Real : Irrep::ComplexPair);
        if (e.label.empty()) e.label = "k=" + std::to_string(e.id);
    }
    return cat;
}

IrrepCatalog load_catalog_file(const std::string& path) {
    std::ifstream f(path);
    if (!f) throw GroupError("cannot open " + path);
    return load_catalog_json(f);
}

std::string to_catalog_json(const IrrepCatalog& cat) {
    json out = json::array();
    for (const auto& e : cat.entries) {
        json mats = json::array();
        for (const auto& m : e.matrices) {
            json jm = json::array();
            for (int r = 0; r < e.dim; ++r) {
                json row = json::array();
                for (int c = 0; c < e.dim; ++c) row.push_back({m(r, c).real(), m(r, c).imag()});
                jm.push_back(std::move(row));
            }
            mats.push_back(std::move(jm));
        }
        out.push_back({{"k", e.id}, {"dim", e.dim}, {"partner", e.partner}, {"matrices", std::move(mats)}});
    }
    return out.dump(1);
}

}  // namespace groklab
