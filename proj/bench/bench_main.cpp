// Timing comparison between the serial reference kernels and the OpenMP ones.
// Build target: ph1d_bench. Not part of ctest; run manually.

#include <chrono>
#include <cstdio>
#include <functional>
#include <string>

#include "phaseless1d/dataset.hpp"
#include "phaseless1d/forward.hpp"
#include "phaseless1d/inversion.hpp"
#include "phaseless1d/parallel.hpp"
#include "phaseless1d/recovery.hpp"

using namespace ph1d;

namespace {

double time_best_of(int reps, const std::function<void()>& fn) {
    double best = 1e300;
    for (int r = 0; r < reps; ++r) {
        const auto t0 = std::chrono::steady_clock::now();
        fn();
        best = std::min(best,
                        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count());
    }
    return best;
}

void row(const char* name, const std::function<void(Exec)>& kernel, int reps = 3) {
    const double ts = time_best_of(reps, [&] { kernel(Exec::serial); });
    const double tp = time_best_of(reps, [&] { kernel(Exec::parallel); });
    std::printf("%-28s %10.1f ms %10.1f ms %8.2fx\n", name, ts * 1e3, tp * 1e3, ts / tp);
}

}  // namespace

int main() {
    std::printf("threads available: %d\n", hardware_threads());
    std::printf("%-28s %13s %13s %9s\n", "kernel", "serial", "openmp", "speedup");

    const Potential gauss = Potential::truncated_gaussian(1.0, 1.0, 0.25, 2.0);
    const KGrid fwd_grid{0.2, 20.0, 256};
    row("forward sweep (rk45)", [&](Exec e) { sweep_scatter(gauss, fwd_grid, {}, e); });

    const Potential barrier = Potential::square_barrier(1.0, 1.0);
    const KGrid big_grid{0.05, 40.0, 2000};
    row("forward sweep (exact)", [&](Exec e) { sweep_scatter(barrier, big_grid, {}, e); });

    Dataset d;
    d.method = Method::s1;
    d.s1 = build_s1(barrier, -1.0, -2.2, big_grid);
    row("recovery sweep (S1)", [&](Exec e) { sweep_recover(d, {}, nullptr, e); });

    const auto table = ReflectionTable::from_sweep(sweep_scatter(barrier, big_grid));
    InversionOptions opts;
    opts.node_spacing = 0.02;
    row("marchenko reconstruct", [&](Exec e) {
        reconstruct_potential(table, XGrid{-0.5, 2.0, 126}, opts, e);
    }, 2);
    return 0;
}
