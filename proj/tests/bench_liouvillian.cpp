// Liouvillian action: OpenMP sparse kernel vs dense serial reference.
#include "combforge/lindblad.hpp"

#include <omp.h>

#include <chrono>
#include <cstdio>
#include <random>

using namespace cf;

int main(int argc, char** argv)
{
    const int reps = argc > 1 ? std::atoi(argv[1]) : 20;
    auto cfg = make_config(2, 200.0, 300.0, {0.0, pi / 2}, 0.0, 0.3, 0.05);
    cfg.detectors = DetectorSpec{1, -1, 5.0};
    std::printf("threads=%d\n", omp_get_max_threads());
    for (int cap : {2, -1}) {
        auto L = build_liouvillian(cfg, true, cap);
        const auto d = static_cast<Eigen::Index>(L.dim());
        std::mt19937 rng(1);
        std::normal_distribution<double> nd;
        ComplexMatrix X(d * d, 8), Y;
        for (Eigen::Index i = 0; i < X.size(); ++i) X.data()[i] = cplx(nd(rng), nd(rng));

        auto t0 = std::chrono::steady_clock::now();
        ComplexMatrix D;
        for (int r = 0; r < reps; ++r) D = L.dense(0.1 * r) * X;
        auto t1 = std::chrono::steady_clock::now();
        for (int r = 0; r < reps; ++r) L.apply(0.1 * r, X, Y);
        auto t2 = std::chrono::steady_clock::now();

        const double dense = std::chrono::duration<double>(t1 - t0).count() / reps;
        const double kern = std::chrono::duration<double>(t2 - t1).count() / reps;
        L.apply(0.1 * (reps - 1), X, Y);
        std::printf("dim=%ld dense=%.3e s kernel=%.3e s speedup=%.1f max|diff|=%.2e\n", static_cast<long>(d), dense,
                    kern, dense / kern, (Y - D).cwiseAbs().maxCoeff());
    }
}
