#include <chrono>
#include <cstdio>
#include <random>
#include <vector>

#include "cavsim/kernels.hpp"

using namespace cavsim;

namespace {

Mat random_matrix(int n, std::mt19937_64& rng) {
    std::normal_distribution<double> dist;
    Mat m(n, n);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) m(i, j) = cplx{dist(rng), dist(rng)};
    return m;
}

Vec random_vector(int n, std::mt19937_64& rng) {
    std::normal_distribution<double> dist;
    Vec v(n);
    for (int i = 0; i < n; ++i) v(i) = cplx{dist(rng), dist(rng)};
    return v;
}

template <typename F>
double time_loop(int reps, F&& f) {
    const auto t0 = std::chrono::steady_clock::now();
    for (int r = 0; r < reps; ++r) f();
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count() / reps;
}

}  // namespace

int main() {
    std::mt19937_64 rng(12345);
    std::printf("threads available: %d\n\n", kernels::max_threads());
    std::printf("%8s %6s %14s %14s %8s\n", "kernel", "dim", "serial [us]", "parallel [us]",
                "speedup");

    for (int n : {64, 256, 512, 1024, 2048}) {
        const Mat M = random_matrix(n, rng);
        const Vec x = random_vector(n, rng);
        const int reps = std::max(3, 2'000'000 / (n * n));

        volatile double sink = 0;
        const double ts = time_loop(reps, [&] { sink += kernels::matvec_serial(M, x)(0).real(); });
        const double tp = time_loop(reps, [&] { sink += kernels::matvec(M, x)(0).real(); });
        std::printf("%8s %6d %14.2f %14.2f %8.2f\n", "matvec", n, ts * 1e6, tp * 1e6, ts / tp);
    }

    std::printf("\n");
    for (int n : {64, 256, 512}) {
        const Mat O = random_matrix(n, rng);
        std::vector<Vec> traj;
        for (int k = 0; k < 256; ++k) traj.push_back(random_vector(n, rng));

        volatile double sink = 0;
        const double ts =
            time_loop(3, [&] { sink += kernels::expectation_series_serial(O, traj)[0]; });
        const double tp = time_loop(3, [&] { sink += kernels::expectation_series(O, traj)[0]; });
        std::printf("%8s %6d %14.2f %14.2f %8.2f\n", "expect", n, ts * 1e6, tp * 1e6, ts / tp);
    }
    return 0;
}
