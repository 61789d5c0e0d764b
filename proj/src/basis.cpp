#include "cavsim/basis.hpp"

#include <cmath>
#include <set>
#include <stdexcept>

namespace cavsim {

void AtomicModeSet::finalize() {
    if (level_names.size() < 1 || modes.size() != level_names.size())
        throw std::invalid_argument("AtomicModeSet: level_names/modes size mismatch");
    if (max_atoms < 0 || max_atoms > 2)
        throw std::invalid_argument("AtomicModeSet: max_atoms must be in 0..2");
    sp.clear();
    for (int l = 0; l < n_levels(); ++l) {
        if (backend == SpatialBackend::ladder) {
            std::set<int> seen;
            for (const auto& m : modes[l])
                if (!seen.insert(m.kappa).second)
                    throw std::invalid_argument("AtomicModeSet: duplicate momentum label on level " +
                                                level_names[l]);
        }
        for (int e = 0; e < static_cast<int>(modes[l].size()); ++e) sp.push_back({l, e});
    }
    if (backend == SpatialBackend::grid) {
        if (grid.empty()) throw std::invalid_argument("AtomicModeSet: grid backend without grid");
        // Profiles must be orthonormal under the quadrature rule.
        for (int l = 0; l < n_levels(); ++l) {
            const auto& lm = modes[l];
            for (size_t i = 0; i < lm.size(); ++i)
                for (size_t j = i; j < lm.size(); ++j) {
                    cplx ip = 0;
                    for (Eigen::Index g = 0; g < grid.points.size(); ++g)
                        ip += std::conj(lm[i].profile(g)) * lm[j].profile(g) * grid.weights(g);
                    const cplx want = (i == j) ? cplx{1, 0} : cplx{0, 0};
                    if (std::abs(ip - want) > 1e-10)
                        throw std::invalid_argument(
                            "AtomicModeSet: profiles not orthonormal under quadrature");
                }
        }
    }
}

int AtomicModeSet::sp_index(int level, int ext) const {
    for (int i = 0; i < n_sp(); ++i)
        if (sp[i].level == level && sp[i].ext == ext) return i;
    return -1;
}

int AtomicModeSet::find_kappa(int level, int kappa) const {
    const auto& lm = modes[level];
    for (int e = 0; e < static_cast<int>(lm.size()); ++e)
        if (lm[e].kappa == kappa) return e;
    return -1;
}

namespace {
void enumerate_sector(int n_modes, int atoms_left, int start, std::vector<int>& occ,
                      std::vector<std::vector<int>>& out) {
    if (atoms_left == 0) {
        out.push_back(occ);
        return;
    }
    for (int m = start; m < n_modes; ++m) {
        occ[m] += 1;
        enumerate_sector(n_modes, atoms_left - 1, m, occ, out);
        occ[m] -= 1;
    }
}
}  // namespace

CompositeBasis CompositeBasis::build(PhotonLadder la, PhotonLadder lb, AtomicModeSet am) {
    if (la.n_max < 1 || lb.n_max < 1)
        throw std::invalid_argument("CompositeBasis: photon n_max must be >= 1");
    CompositeBasis b;
    b.ladder_a = la;
    b.ladder_b = lb;
    b.atoms = std::move(am);
    if (b.atoms.sp.empty() && !b.atoms.level_names.empty()) b.atoms.finalize();
    const int M = b.atoms.n_sp();
    std::vector<int> occ(M, 0);
    for (int sector = 0; sector <= b.atoms.max_atoms; ++sector)
        enumerate_sector(M, sector, 0, occ, b.configs);
    for (int c = 0; c < b.n_configs(); ++c) b.config_lookup[b.configs[c]] = c;
    return b;
}

int CompositeBasis::config_of(const std::vector<int>& occ) const {
    auto it = config_lookup.find(occ);
    return it == config_lookup.end() ? -1 : it->second;
}

int CompositeBasis::atom_count(int config) const {
    int n = 0;
    for (int o : configs[config]) n += o;
    return n;
}

}  // namespace cavsim
