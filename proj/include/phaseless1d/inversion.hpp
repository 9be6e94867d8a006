#pragma once

#include <vector>

#include "phaseless1d/forward.hpp"
#include "phaseless1d/recovery.hpp"

namespace ph1d {

// Complex reflection coefficient tabulated on a strictly increasing k > 0 grid.
struct ReflectionTable {
    std::vector<double> k;
    std::vector<Complex> s21;

    void validate() const;   // increasing k > 0, |s21| < 1
    double max_spacing() const;

    static ReflectionTable from_sweep(const std::vector<ScatteringCoefficients>& sweep);
    // Keeps only records recovered with status ok.
    static ReflectionTable from_recovery(const std::vector<RecoveryResult>& results);
};

struct InversionOptions {
    // Nystrom node spacing for the integral-equation grid on [-x, x].
    double node_spacing = 0.01;
    // Kaiser taper applied to the truncated band before the Fourier quadrature;
    // 0 disables (plain hard cut). Default from the convergence study.
    double taper_beta = 2.5;
    double rcond_min = 1e-12;
    // t is rejected beyond nyquist_safety * pi / max k-spacing.
    double nyquist_safety = 1.0;
};

struct KernelValue {
    double value = 0.0;
    double imag_residue = 0.0;  // nonzero only through round-off; the symmetric
                                // extension makes the integral real
};

// F(t) = (1/2pi) integral s21(k) e^{-ikt} dk over the symmetric extension
// s21(-k) = conj(s21(k)), trapezoidal in k, with one virtual k=0 node filling
// the [0, kmin) gap. Throws TruncationError past the Nyquist-style bound.
KernelValue marchenko_kernel(const ReflectionTable& table, double t,
                             const InversionOptions& opts = {});

struct InversionDiagnostics {
    double kernel_tail_bound = 0.0;    // |s21(kmax)| * kmax / pi, assuming 1/k^2 tail decay
    double max_imag_residue = 0.0;     // worst |Im F| seen while building kernels
    double max_nystrom_residual = 0.0; // worst ||A K - b||_inf over the per-x solves
    double min_rcond = 1.0;
    int max_nodes = 0;                 // largest Nystrom system solved
    // self-check of the half-line support: mean |vhat| on x < -0.5 over peak
    // |vhat| (0 when the grid has no such points or vhat vanishes)
    double left_support_ratio = 0.0;
};

struct ReconstructedPotential {
    std::vector<double> x;
    std::vector<double> v;  // real by construction; see diagnostics for the residue
    InversionDiagnostics diagnostics;
};

// Uniform reconstruction grid, count >= 5 (the diagonal is differentiated with
// a five-point stencil).
struct XGrid {
    double lo = -1.0;
    double hi = 3.0;
    int count = 401;

    std::vector<double> values() const;
    void validate() const;
};

// Solves the left Marchenko equation
//   K(x,y) + F(x+y) + int_{-x}^{x} K(x,z) F(z+y) dz = 0,   y <= x,
// per grid point x (support of K(x,.) is [-x, x] because v vanishes on x < 0),
// then v(x) = 2 d/dx K(x,x). Valid for bound-state-free tables (v >= 0 presets).
ReconstructedPotential reconstruct_potential(const ReflectionTable& table, const XGrid& xgrid,
                                             const InversionOptions& opts = {},
                                             Exec exec = Exec::parallel);

// Relative L1 distance on the reconstruction grid:
// int |v - vhat| / max(int |v|, 1e-12).
double roundtrip_error(const Potential& v, const ReconstructedPotential& vhat);

}  // namespace ph1d
