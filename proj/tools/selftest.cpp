#include "selftest.hpp"

#include <cmath>
#include <cstdio>
#include <vector>

#include "phaseless1d/dataset.hpp"
#include "phaseless1d/errors.hpp"
#include "phaseless1d/forward.hpp"
#include "phaseless1d/inversion.hpp"
#include "phaseless1d/recovery.hpp"
#include "phaseless1d/rng.hpp"

namespace ph1d {

namespace {

struct Check {
    const char* name;
    double worst;
    double bound;
    bool pass() const { return worst <= bound; }
};

double rand01(std::uint64_t& s) {
    s = splitmix64(s);
    return uniform01(s);
}

}  // namespace

int run_selftest() {
    std::vector<Check> checks;
    std::uint64_t seed = 20240901;

    const std::vector<Potential> presets = {
        Potential::zero(),
        Potential::square_barrier(2.0, 1.0),
        Potential::double_barrier(1.5, 0.5, 0.5),
        Potential::truncated_gaussian(1.0, 1.0, 0.25, 2.0),
    };
    const KGrid kg{0.2, 12.0, 20};

    {  // flux conservation across presets (rk45 forced so the stepper is exercised)
        double worst = 0.0;
        for (const auto& v : presets) {
            ForwardOptions fo;
            fo.method = v.piecewise_constant() ? SolveMethod::exact : SolveMethod::rk45;
            for (const auto& c : sweep_scatter(v, kg, fo))
                worst = std::max(worst, c.unitarity_defect);
            if (v.piecewise_constant()) {
                fo.method = SolveMethod::rk45;
                for (const auto& c : sweep_scatter(v, kg, fo))
                    worst = std::max(worst, c.unitarity_defect);
            }
        }
        checks.push_back({"unitarity |s21|^2+|s22|^2=1", worst, 1e-8});
    }

    {  // rk45 against the exact segment propagator
        double worst = 0.0;
        const auto& v = presets[1];
        ForwardOptions exact, rk;
        exact.method = SolveMethod::exact;
        rk.method = SolveMethod::rk45;
        for (double k : kg.values())
            worst = std::max(worst, std::abs(scatter(v, k, exact).s21 - scatter(v, k, rk).s21));
        checks.push_back({"rk45 vs exact propagator", worst, 1e-8});
    }

    {  // s21 gains e^{2iky} under v(x-y)
        double worst = 0.0;
        const auto& v = presets[1];
        for (double y : {0.35, 1.0}) {
            const auto vy = v.translated(y);
            for (double k : kg.values()) {
                const Complex a = scatter(v, k).s21;
                const Complex b = scatter(vy, k).s21;
                worst = std::max(worst, std::abs(b - std::exp(Complex(0, 2 * k * y)) * a));
            }
        }
        checks.push_back({"translation covariance", worst, 1e-8});
    }

    {  // s21 = e^{ikx} psi - e^{2ikx} on x < 0
        double worst = 0.0;
        for (int t = 0; t < 30; ++t) {
            const auto& v = presets[t % presets.size()];
            const double x = -0.1 - 3.0 * rand01(seed);
            const double k = 0.2 + 10.0 * rand01(seed);
            const Complex psi = psi_plus(v, x, k);
            worst = std::max(worst, std::abs(s21_from_field(psi, x, k) - scatter(v, k).s21));
        }
        checks.push_back({"reduction identity", worst, 1e-10});
    }

    {  // determinant expansion vs product form
        double worst = 0.0;
        for (int t = 0; t < 2000; ++t) {
            const double k = 0.05 + 30.0 * rand01(seed);
            const double x1 = -5.0 * rand01(seed) - 0.01;
            const double x2 = -5.0 * rand01(seed) - 0.01;
            const double x3 = -5.0 * rand01(seed) - 0.01;
            const double sum = std::sin(2 * k * (x3 - x2)) + std::sin(2 * k * (x2 - x1)) +
                               std::sin(2 * k * (x1 - x3));
            const double prod = conditioning(Method::s2, std::vector<double>{x1, x2, x3}, k);
            worst = std::max(worst, std::abs(std::abs(sum) - prod));
        }
        checks.push_back({"determinant identity", worst, 1e-12});
    }

    // recovery maps applied to records synthesized from a known s21
    auto synth_worst = [&](Method m) {
        double worst = 0.0;
        for (int t = 0; t < 200; ++t) {
            const double mod = 0.9 * rand01(seed);
            const double alpha = (2 * rand01(seed) - 1) * 3.14159265358979;
            const Complex s21 = mod * std::exp(Complex(0, alpha));
            const double k = 0.2 + 8.0 * rand01(seed);
            const double x1 = -0.2 - 2.0 * rand01(seed);
            const double x2 = x1 - 0.3 - rand01(seed);
            const double x3 = x2 - 0.4 - rand01(seed);
            try {
                RecoveryResult r;
                if (m == Method::s1) {
                    r = recover_from_s1({k, x1, x2, std::norm(s21), intensity_from_s21(s21, x1, k),
                                         intensity_from_s21(s21, x2, k)});
                } else if (m == Method::s2) {
                    r = recover_from_s2({k, x1, x2, x3, intensity_from_s21(s21, x1, k),
                                         intensity_from_s21(s21, x2, k),
                                         intensity_from_s21(s21, x3, k)});
                } else {
                    r = recover_from_s3({k, x1, intensity_from_s21(s21, x1, k),
                                         intensity_derivative_from_s21(s21, x1, k)});
                }
                const double cond = r.conditioning;
                if (cond > 1e-2) worst = std::max(worst, std::abs(r.s21_est - s21));
            } catch (const DegenerateConfiguration&) {
            }
        }
        return worst;
    };
    checks.push_back({"two-point formula exactness", synth_worst(Method::s1), 1e-10});
    checks.push_back({"three-point formula exactness", synth_worst(Method::s2), 1e-10});
    checks.push_back({"derivative formula exactness", synth_worst(Method::s3), 1e-12});

    {  // (Re+1)^2 + Im^2 = |psi|^2 and the positive branch on synthesized data
        double worst = 0.0;
        for (int t = 0; t < 300; ++t) {
            const Complex s21 = 0.95 * rand01(seed) * std::exp(Complex(0, 6.28 * rand01(seed)));
            const double k = 0.2 + 8.0 * rand01(seed);
            const double x = -0.1 - 3.0 * rand01(seed);
            const Complex z = s21 * std::exp(Complex(0, -2 * k * x));
            const double lhs = (z.real() + 1) * (z.real() + 1) + z.imag() * z.imag();
            worst = std::max(worst, std::abs(lhs - intensity_from_s21(s21, x, k)));
            if (z.real() + 1 <= 0) worst = 1.0;
        }
        checks.push_back({"intensity identity + branch", worst, 1e-12});
    }

    {  // zero reflection table inverts to the zero potential
        ReflectionTable zero;
        for (int i = 0; i < 200; ++i) {
            zero.k.push_back(0.05 + i * 0.1);
            zero.s21.push_back({0.0, 0.0});
        }
        const auto rec = reconstruct_potential(zero, XGrid{-0.5, 1.5, 41});
        double worst = 0.0;
        for (double vv : rec.v) worst = std::max(worst, std::abs(vv));
        checks.push_back({"zero-table inversion", worst, 1e-12});
    }

    bool all = true;
    std::printf("%-34s %12s %10s  result\n", "invariant", "worst", "bound");
    for (const auto& c : checks) {
        all = all && c.pass();
        std::printf("%-34s %12.3e %10.0e  %s\n", c.name, c.worst, c.bound,
                    c.pass() ? "PASS" : "FAIL");
    }
    std::printf("selftest: %s\n", all ? "all invariants hold" : "FAILURES present");
    return all ? 0 : 5;
}

}  // namespace ph1d
