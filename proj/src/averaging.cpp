#include "cavsim/averaging.hpp"

#include <cmath>
#include <stdexcept>

#include "cavsim/kernels.hpp"

namespace cavsim {

Mat HarmonicHamiltonian::at_time(double t) const {
    Mat H = H0;
    const double s = static_cast<double>(hc_sign);
    auto add_domain = [&](const std::vector<HarmonicTerm>& terms) {
        for (const auto& term : terms) {
            const cplx ph = std::exp(-I * term.freq * t);
            H += ph * term.op + s * std::conj(ph) * term.op.adjoint();
        }
    };
    add_domain(slow);
    add_domain(fast);
    return H;
}

double inverse_detuning_sum(double f1, double f2, int sign) {
    if (f1 == 0.0 || f2 == 0.0)
        throw std::domain_error("inverse_detuning_sum: zero frequency (singular detuning)");
    return 0.5 * (1.0 / f1 + static_cast<double>(sign) / f2);
}

bool keep_frequency(double combo, const FilterSpec& filter) {
    return std::abs(combo) < filter.cutoff;
}

namespace {

/** Largest |frequency| in either domain (for the resonance tie-break scale). */
double max_abs_freq(const HarmonicHamiltonian& h) {
    double m = 0;
    for (const auto& t : h.slow) m = std::max(m, std::abs(t.freq));
    for (const auto& t : h.fast) m = std::max(m, std::abs(t.freq));
    return m;
}

template <typename Emit>
void for_kept_pairs(const std::vector<HarmonicTerm>& terms, const FilterSpec& filter,
                    double freq_scale, Emit&& emit) {
    const int N = static_cast<int>(terms.size());
    for (int n = 0; n < N; ++n)
        for (int m = 0; m < N; ++m) {
            double combo = terms[m].freq - terms[n].freq;
            if (std::abs(combo) < 1e-12 * freq_scale) combo = 0.0;  // exact resonance
            if (!keep_frequency(combo, filter)) continue;
            emit(n, m, combo);
        }
}

}  // namespace

Mat effective_hamiltonian(const HarmonicHamiltonian& h, const FilterSpec& filter, double t) {
    Mat H = h.H0;
    const double s = static_cast<double>(h.hc_sign);
    const double scale = max_abs_freq(h);
    auto add_domain = [&](const std::vector<HarmonicTerm>& terms) {
        for_kept_pairs(terms, filter, scale, [&](int n, int m, double combo) {
            const double inv = inverse_detuning_sum(terms[n].freq, terms[m].freq, +1);
            const Mat comm = terms[m].op.adjoint() * terms[n].op -
                             terms[n].op * terms[m].op.adjoint();
            H += (s * inv / HBAR) * std::exp(I * combo * t) * comm;
        });
    };
    add_domain(h.slow);
    add_domain(h.fast);
    return H;
}

SecondOrderGenerator second_order_generator(const HarmonicHamiltonian& h,
                                            const FilterSpec& filter) {
    SecondOrderGenerator gen;
    gen.H_eff = effective_hamiltonian(h, filter, 0.0);
    const double scale = max_abs_freq(h);
    auto add_domain = [&](const std::vector<HarmonicTerm>& terms) {
        for_kept_pairs(terms, filter, scale, [&](int n, int m, double combo) {
            const double inv = inverse_detuning_sum(terms[n].freq, terms[m].freq, -1);
            if (inv == 0.0) return;  // n = m (or equal frequencies): exactly zero
            GeneratorTerm term;
            term.coeff = inv;
            term.left = terms[m].op.adjoint();
            term.right = terms[n].op;
            term.residual_freq = combo;
            gen.anticommutator_terms.push_back(term);
            gen.dissipator_terms.push_back(term);
        });
    };
    add_domain(h.slow);
    add_domain(h.fast);
    return gen;
}

namespace {

// Dormand-Prince 5(4) tableau.
constexpr double C2 = 1.0 / 5, C3 = 3.0 / 10, C4 = 4.0 / 5, C5 = 8.0 / 9;
constexpr double A21 = 1.0 / 5;
constexpr double A31 = 3.0 / 40, A32 = 9.0 / 40;
constexpr double A41 = 44.0 / 45, A42 = -56.0 / 15, A43 = 32.0 / 9;
constexpr double A51 = 19372.0 / 6561, A52 = -25360.0 / 2187, A53 = 64448.0 / 6561,
                 A54 = -212.0 / 729;
constexpr double A61 = 9017.0 / 3168, A62 = -355.0 / 33, A63 = 46732.0 / 5247,
                 A64 = 49.0 / 176, A65 = -5103.0 / 18656;
constexpr double B1 = 35.0 / 384, B3 = 500.0 / 1113, B4 = 125.0 / 192, B5 = -2187.0 / 6784,
                 B6 = 11.0 / 84;
// 4th-order embedded weights.
constexpr double E1 = 5179.0 / 57600, E3 = 7571.0 / 16695, E4 = 393.0 / 640,
                 E5 = -92097.0 / 339200, E6 = 187.0 / 2100, E7 = 1.0 / 40;

struct Rhs {
    const HarmonicHamiltonian& h;
    std::vector<Mat> adjoints_slow, adjoints_fast;

    explicit Rhs(const HarmonicHamiltonian& hh) : h(hh) {
        for (const auto& t : h.slow) adjoints_slow.push_back(t.op.adjoint());
        for (const auto& t : h.fast) adjoints_fast.push_back(t.op.adjoint());
    }

    Vec operator()(double t, const Vec& y) const {
        Vec hy = kernels::matvec(h.H0, y);
        const double s = static_cast<double>(h.hc_sign);
        for (size_t k = 0; k < h.slow.size(); ++k) {
            const cplx ph = std::exp(-I * h.slow[k].freq * t);
            hy += ph * kernels::matvec(h.slow[k].op, y) +
                  s * std::conj(ph) * kernels::matvec(adjoints_slow[k], y);
        }
        for (size_t k = 0; k < h.fast.size(); ++k) {
            const cplx ph = std::exp(-I * h.fast[k].freq * t);
            hy += ph * kernels::matvec(h.fast[k].op, y) +
                  s * std::conj(ph) * kernels::matvec(adjoints_fast[k], y);
        }
        return -I * hy;
    }
};

}  // namespace

std::vector<Vec> exact_evolve(const HarmonicHamiltonian& h, const Vec& psi0,
                              const std::vector<double>& t_grid, double tol) {
    if (t_grid.empty()) throw std::invalid_argument("exact_evolve: empty time grid");
    for (size_t i = 1; i < t_grid.size(); ++i)
        if (t_grid[i] <= t_grid[i - 1])
            throw std::invalid_argument("exact_evolve: t_grid must be strictly increasing");

    const Rhs rhs(h);
    std::vector<Vec> out;
    out.reserve(t_grid.size());
    out.push_back(psi0);

    double t = t_grid.front();
    Vec y = psi0;
    Vec k1 = rhs(t, y);

    // Initial step from a crude frequency scale.
    double wmax = 1.0;
    for (const auto& term : h.slow) wmax = std::max(wmax, std::abs(term.freq));
    for (const auto& term : h.fast) wmax = std::max(wmax, std::abs(term.freq));
    double dt = 0.01 / wmax;

    const double t_end = t_grid.back();
    size_t next = 1;
    const double dt_min = 1e-14 * std::max(1.0, std::abs(t_end));

    while (next < t_grid.size()) {
        bool hit_output = false;
        double step = dt;
        if (t + step >= t_grid[next]) {
            step = t_grid[next] - t;
            hit_output = true;
        }

        const Vec k2 = rhs(t + C2 * step, y + step * (A21 * k1));
        const Vec k3 = rhs(t + C3 * step, y + step * (A31 * k1 + A32 * k2));
        const Vec k4 = rhs(t + C4 * step, y + step * (A41 * k1 + A42 * k2 + A43 * k3));
        const Vec k5 =
            rhs(t + C5 * step, y + step * (A51 * k1 + A52 * k2 + A53 * k3 + A54 * k4));
        const Vec k6 = rhs(t + step,
                           y + step * (A61 * k1 + A62 * k2 + A63 * k3 + A64 * k4 + A65 * k5));
        const Vec y5 = y + step * (B1 * k1 + B3 * k3 + B4 * k4 + B5 * k5 + B6 * k6);
        const Vec k7 = rhs(t + step, y5);
        const Vec y4 =
            y + step * (E1 * k1 + E3 * k3 + E4 * k4 + E5 * k5 + E6 * k6 + E7 * k7);

        const double sc = tol * std::max(1.0, y.norm());
        const double err = (y5 - y4).norm() / sc;

        if (err <= 1.0) {
            t += step;
            y = y5;
            k1 = k7;  // FSAL
            if (hit_output) {
                out.push_back(y);
                ++next;
            }
        }

        const double fac = std::clamp(0.9 * std::pow(std::max(err, 1e-10), -0.2), 0.2, 5.0);
        dt = std::min(step * fac, (t_end - t_grid.front()));
        if (dt < dt_min)
            throw std::runtime_error("exact_evolve: step-size underflow (stiffness) at t=" +
                                     std::to_string(t));
    }
    return out;
}

std::vector<double> lowpass_series(const std::vector<double>& series,
                                   const std::vector<double>& t_grid,
                                   const FilterSpec& filter) {
    const size_t N = series.size();
    if (N != t_grid.size() || N < 2)
        throw std::invalid_argument("lowpass_series: insufficient data");
    const double dt = t_grid[1] - t_grid[0];
    for (size_t i = 1; i < N; ++i)
        if (std::abs((t_grid[i] - t_grid[i - 1]) - dt) > 1e-9 * dt)
            throw std::invalid_argument("lowpass_series: grid not uniform");

    // Window half-width and taps.
    double half_t;
    if (filter.window == FilterSpec::Window::gaussian)
        half_t = 5.0 * filter.sigma_t();
    else
        half_t = (filter.width > 0 ? filter.width : 50.0 / filter.cutoff);
    const int K = std::max(1, static_cast<int>(std::floor(half_t / dt)));
    if (static_cast<size_t>(2 * K + 1) > 4 * N)
        throw std::invalid_argument("lowpass_series: trace shorter than filter window");

    std::vector<double> w(2 * K + 1);
    for (int k = -K; k <= K; ++k) {
        const double tau = k * dt;
        if (filter.window == FilterSpec::Window::gaussian) {
            const double s = filter.sigma_t();
            w[k + K] = std::exp(-tau * tau / (2 * s * s));
        } else {
            w[k + K] = (k == 0) ? filter.cutoff / M_PI
                                : std::sin(filter.cutoff * tau) / (M_PI * tau);
        }
    }

    std::vector<double> out(N);
    for (size_t i = 0; i < N; ++i) {
        double acc = 0, wsum = 0;
        for (int k = -K; k <= K; ++k) {
            const long j = static_cast<long>(i) + k;
            if (j < 0 || j >= static_cast<long>(N)) continue;  // edge truncation
            acc += w[k + K] * series[j];
            wsum += w[k + K];
        }
        out[i] = acc / wsum;
    }
    return out;
}

std::vector<double> filtered_expectation_static(const Mat& H, const Vec& psi0, const Mat& O,
                                                const FilterSpec& filter,
                                                const std::vector<double>& times) {
    if (hermiticity_defect(H) > 1e-10)
        throw std::domain_error("filtered_expectation_static: H not hermitian");
    Eigen::SelfAdjointEigenSolver<Mat> es(Mat(0.5 * (H + H.adjoint())));
    const Vec c = es.eigenvectors().adjoint() * psi0;
    const Mat Ot = es.eigenvectors().adjoint() * O * es.eigenvectors();
    const RVec& ev = es.eigenvalues();
    const Eigen::Index n = ev.size();

    // Component weights after the filter transfer function.
    Mat W(n, n);
    for (Eigen::Index i = 0; i < n; ++i)
        for (Eigen::Index j = 0; j < n; ++j) {
            const double w = (ev(i) - ev(j)) / HBAR;
            double gain;
            if (filter.window == FilterSpec::Window::gaussian) {
                const double st = filter.sigma_t();
                gain = std::exp(-0.5 * st * st * w * w);
            } else {
                gain = std::abs(w) < filter.cutoff ? 1.0 : 0.0;
            }
            W(i, j) = gain * std::conj(c(i)) * c(j) * Ot(i, j);
        }

    std::vector<double> out(times.size());
    for (size_t k = 0; k < times.size(); ++k) {
        cplx acc = 0;
        for (Eigen::Index i = 0; i < n; ++i)
            for (Eigen::Index j = 0; j < n; ++j)
                acc += W(i, j) * std::exp(I * ((ev(i) - ev(j)) / HBAR) * times[k]);
        out[k] = acc.real();
    }
    return out;
}

std::vector<double> averaged_observable(const std::vector<Vec>& trace,
                                        const std::vector<double>& t_grid,
                                        const FilterSpec& filter, const Mat& observable) {
    const auto raw = kernels::expectation_series(observable, trace);
    return lowpass_series(raw, t_grid, filter);
}

}  // namespace cavsim
