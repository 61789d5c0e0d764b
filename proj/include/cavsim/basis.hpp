#pragma once

#include <map>
#include <string>
#include <vector>

#include "cavsim/types.hpp"

namespace cavsim {

enum class PhotonMode { a = 0, b = 1 };

inline const char* mode_name(PhotonMode m) { return m == PhotonMode::a ? "a" : "b"; }

/** Truncated bosonic Fock ladder for one cavity mode. */
struct PhotonLadder {
    int n_max = 1;
    PhotonMode mode = PhotonMode::a;
    int dim() const { return n_max + 1; }
};

/** Quadrature grid for sampled mode functions (trapezoidal weights). */
struct SpatialGrid {
    RVec points;
    RVec weights;
    bool empty() const { return points.size() == 0; }
};

enum class SpatialBackend { ladder, grid };

/**
 * One external (center-of-mass) single-particle mode attached to an internal level.
 * Ladder backend: integer momentum index kappa (units of base_momentum).
 * Grid backend: sampled profile phi(R_i) on the shared quadrature grid.
 */
struct ExternalMode {
    int kappa = 0;
    Vec profile;
};

/**
 * The full single-particle atomic mode set: per internal level, a finite list of
 * external modes, capped at max_atoms total occupation.
 */
struct AtomicModeSet {
    SpatialBackend backend = SpatialBackend::ladder;
    double base_momentum = 1.0;
    int max_atoms = 1;
    std::vector<std::string> level_names;            // index 0 = a, 1 = b, >=2 ancillas
    std::vector<std::vector<ExternalMode>> modes;    // per level
    SpatialGrid grid;                                // grid backend only

    struct SpMode {
        int level;
        int ext;
    };
    std::vector<SpMode> sp;  // flattened single-particle modes, fixed enumeration order

    /** Build the flattened mode list and check invariants (unique kappas, orthonormal profiles). */
    void finalize();

    int n_levels() const { return static_cast<int>(level_names.size()); }
    int n_sp() const { return static_cast<int>(sp.size()); }
    /** Flattened index of (level, ext position); -1 if absent. */
    int sp_index(int level, int ext) const;
    /** Position of momentum index kappa within a level's mode list; -1 if absent. */
    int find_kappa(int level, int kappa) const;
};

/**
 * Tensor-product basis: atomic occupation configurations (sectors 0..max_atoms)
 * x photon Fock pairs. Linear index = config * photon_dim + n_a*(n_max_b+1) + n_b.
 */
struct CompositeBasis {
    PhotonLadder ladder_a{8, PhotonMode::a};
    PhotonLadder ladder_b{8, PhotonMode::b};
    AtomicModeSet atoms;

    std::vector<std::vector<int>> configs;  // occupation numbers per sp mode
    std::map<std::vector<int>, int> config_lookup;

    static CompositeBasis build(PhotonLadder la, PhotonLadder lb, AtomicModeSet am);

    int photon_dim() const { return ladder_a.dim() * ladder_b.dim(); }
    int n_configs() const { return static_cast<int>(configs.size()); }
    int dim() const { return n_configs() * photon_dim(); }
    int index(int config, int na, int nb) const {
        return config * photon_dim() + na * ladder_b.dim() + nb;
    }
    /** Config index for an occupation vector; -1 if not enumerated. */
    int config_of(const std::vector<int>& occ) const;
    /** Total atom count of a config. */
    int atom_count(int config) const;
    const PhotonLadder& ladder(PhotonMode m) const {
        return m == PhotonMode::a ? ladder_a : ladder_b;
    }
};

}  // namespace cavsim
