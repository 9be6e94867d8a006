#pragma once

#include <complex>
#include <vector>

#include "phaseless1d/parallel.hpp"
#include "phaseless1d/potential.hpp"

namespace ph1d {

using Complex = std::complex<double>;

// Uniform strictly-positive wavenumber grid, inclusive of both endpoints.
struct KGrid {
    double kmin = 0.1;
    double kmax = 10.0;
    int count = 100;

    std::vector<double> values() const;
    void validate() const;  // throws ConfigError unless 0 < kmin <= kmax, count >= 1
};

enum class SolveMethod {
    automatic,  // exact propagator when piecewise-constant, rk45 otherwise
    rk45,
    exact,  // per-segment analytic propagator; piecewise-constant only
};

struct ForwardOptions {
    double abs_tol = 1e-10;
    double rel_tol = 1e-10;
    SolveMethod method = SolveMethod::automatic;
    double unitarity_tol = 1e-8;  // defect above this flags the result
};

// (s21, s22) at one wavenumber: reflection to the left, transmission to the right.
struct ScatteringCoefficients {
    double k = 0.0;
    Complex s21{0.0, 0.0};
    Complex s22{1.0, 0.0};
    double unitarity_defect = 0.0;
    bool flagged = false;  // defect exceeded ForwardOptions::unitarity_tol
};

// Integrates the solution matching e^{ikx} beyond the support down to x = 0 and
// decomposes it into incident + reflected plane waves.
ScatteringCoefficients scatter(const Potential& v, double k, const ForwardOptions& opts = {});

// Scattering solution: e^{ikx} + s21 e^{-ikx} for x < 0 (exact there),
// g(x)/A on the support, s22 e^{ikx} past it.
Complex psi_plus(const Potential& v, double x, double k, const ForwardOptions& opts = {});

// |psi_plus(x,k)|^2 on x < 0 via 1 + 2 Re(s21 e^{-2ikx}) + |s21|^2.
double intensity(const Potential& v, double x, double k, const ForwardOptions& opts = {});

// d|psi_plus|^2/dx on x < 0 via 4k Im(s21 e^{-2ikx}).
double intensity_derivative(const Potential& v, double x, double k, const ForwardOptions& opts = {});

// Same free-region identities, usable with any s21 (tests feed fabricated values).
double intensity_from_s21(Complex s21, double x, double k);
double intensity_derivative_from_s21(Complex s21, double x, double k);

// | |s21|^2 + |s22|^2 - 1 |
double unitarity_defect(const ScatteringCoefficients& c);

std::vector<ScatteringCoefficients> sweep_scatter(const Potential& v, const KGrid& grid,
                                                  const ForwardOptions& opts = {},
                                                  Exec exec = Exec::parallel);

}  // namespace ph1d
