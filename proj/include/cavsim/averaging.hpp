#pragma once

#include <vector>

#include "cavsim/operators.hpp"
#include "cavsim/types.hpp"

namespace cavsim {

/** One oscillating term h e^{-i w t} (+ hc_sign * h.c.). */
struct HarmonicTerm {
    Mat op;
    double freq = 0;
};

/**
 * H(t) = H0 + sum_slow [h_n e^{-i w_n t} + s h_n^+ e^{+i w_n t}]
 *           + sum_fast [g_n e^{-i W_n t} + s g_n^+ e^{+i W_n t}],  s = hc_sign.
 * Two separate frequency domains (slow / fast) feed the averaging rules.
 */
struct HarmonicHamiltonian {
    Mat H0;
    std::vector<HarmonicTerm> slow;
    std::vector<HarmonicTerm> fast;
    int hc_sign = +1;

    Mat at_time(double t) const;
    int dim() const { return static_cast<int>(H0.rows()); }
};

struct FilterSpec {
    double cutoff = 1.0;
    enum class Window { ideal, gaussian } window = Window::gaussian;
    double width = 0;  // 0 => default sigma_t = 10 / cutoff

    double sigma_t() const { return width > 0 ? width : 10.0 / cutoff; }
};

/** 1/w_{nm}^(+-) = (1/f1 +- 1/f2) / 2. Throws on zero frequency. */
double inverse_detuning_sum(double f1, double f2, int sign);

/** Low-pass keep/drop decision for a frequency combination. */
bool keep_frequency(double combo, const FilterSpec& filter);

/**
 * Second-order time-averaged Hamiltonian:
 * H_eff(t) = H0 + s * sum_{n,m} { [h_m^+, h_n]/w+_{nm} e^{i(w_m-w_n)t}
 *                               + [g_m^+, g_n]/W+_{nm} e^{i(W_m-W_n)t} }
 * restricted to kept frequency combinations; hermitian at every t.
 */
Mat effective_hamiltonian(const HarmonicHamiltonian& h, const FilterSpec& filter, double t);

struct GeneratorTerm {
    double coeff = 0;  // 1/w-_{nm}
    Mat left;          // h_m^+
    Mat right;         // h_n
    double residual_freq = 0;
};

/** H_eff plus the subleading anticommutator/dissipator term lists (diagnostic only). */
struct SecondOrderGenerator {
    Mat H_eff;
    std::vector<GeneratorTerm> anticommutator_terms;
    std::vector<GeneratorTerm> dissipator_terms;
};

SecondOrderGenerator second_order_generator(const HarmonicHamiltonian& h,
                                            const FilterSpec& filter);

/**
 * Brute-force oracle: integrate i dpsi/dt = H(t) psi with adaptive Dormand-Prince 4(5).
 * Returns psi at each grid time (t_grid strictly increasing; integration starts at
 * t_grid.front()).
 */
std::vector<Vec> exact_evolve(const HarmonicHamiltonian& h, const Vec& psi0,
                              const std::vector<double>& t_grid, double tol = 1e-10);

/**
 * Low-pass filter the expectation series <psi|O|psi>(t) on a uniform grid by discrete
 * convolution with the filter window, edge-truncated and renormalized.
 */
std::vector<double> averaged_observable(const std::vector<Vec>& trace,
                                        const std::vector<double>& t_grid,
                                        const FilterSpec& filter, const Mat& observable);

/** Low-pass filter an already-extracted real series (same convolution). */
std::vector<double> lowpass_series(const std::vector<double>& series,
                                   const std::vector<double>& t_grid,
                                   const FilterSpec& filter);

/**
 * Exact low-pass-filtered expectation value under a static Hamiltonian: the
 * spectral decomposition gives <O>(t) as a finite sum of e^{i(l_i-l_j)t}
 * components, each scaled by the filter's transfer function (Gaussian window:
 * exp(-sigma_t^2 w^2 / 2); ideal window: hard frequency cut).  No sampling or
 * edge effects.
 */
std::vector<double> filtered_expectation_static(const Mat& H, const Vec& psi0, const Mat& O,
                                                const FilterSpec& filter,
                                                const std::vector<double>& times);

}  // namespace cavsim
