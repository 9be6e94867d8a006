#pragma once

#include <optional>
#include <span>
#include <string>
#include <vector>

#include "phaseless1d/dataset.hpp"

namespace ph1d {

// Polar split s21 = modulus * e^{i alpha}, modulus in [0,1), alpha in (-pi, pi].
struct PhaseSplit {
    double modulus = 0.0;
    double alpha = 0.0;
    Complex value() const;
};
PhaseSplit phase_split(Complex s21);

struct RecoveryOptions {
    // Absolute threshold on the |sin| products below which the linear system is
    // treated as degenerate. The theory excludes only exact degeneracy; near
    // degeneracy amplifies measurement error without bound, hence the cutoff.
    double eps_det = 1e-6;
};

enum class RecoveryStatus { ok, degenerate, nonphysical };

struct RecoveryResult {
    double k = 0.0;
    Complex s21_est{0.0, 0.0};
    double conditioning = 0.0;  // |determinant| of the solved system (1 for S3)
    double residual = 0.0;      // S1: | |(c,s)| - sqrt(r2) |, else 0
    Method method = Method::s3;
    RecoveryStatus status = RecoveryStatus::ok;
};

// Two-point formula: solves the 2x2 system for |s21|(cos a, sin a) using the
// measured |s21|^2 and the intensities at x1, x2. Throws DegenerateConfiguration
// when |sin(2k(x2-x1))| <= eps_det. The vector-norm-vs-sqrt(r2) mismatch is
// reported in `residual`; the final modulus is taken from r2 (more robust under
// noise), the phase from the recovered vector.
RecoveryResult recover_from_s1(const S1Record& rec, const RecoveryOptions& opts = {});

// Three-point formula: intensity differences eliminate |s21|^2, so the modulus
// emerges as the norm of the recovered vector.
RecoveryResult recover_from_s2(const S2Record& rec, const RecoveryOptions& opts = {});

// One-point formula from intensity and its spatial derivative. Throws
// NonPhysicalIntensity when the square-root radicand goes negative (possible
// only under noise).
RecoveryResult recover_from_s3(const S3Record& rec, const RecoveryOptions& opts = {});

// Complex-data oracle: s21 = e^{ikx} psi - e^{2ikx} for x < 0.
Complex s21_from_field(Complex psi, double x, double k);

// |sin(2k(x2-x1))| for S1, the 4 sin(k..)sin(k..)sin(k..) determinant for S2, 1 for S3.
double conditioning(Method method, std::span<const double> positions, double k);

struct SweepSummary {
    std::size_t total = 0;
    std::size_t recovered = 0;
    std::size_t degenerate = 0;
    std::size_t nonphysical = 0;
    // versus a reference table, when supplied (aligned with the dataset records)
    bool has_reference = false;
    double max_error = 0.0;
    double median_error = 0.0;
};

struct RecoverySweep {
    std::vector<RecoveryResult> results;
    SweepSummary summary;
};

// Per-record recovery over a homogeneous dataset. Degenerate/non-physical
// records are reported in their result's status instead of aborting the sweep.
RecoverySweep sweep_recover(const Dataset& data, const RecoveryOptions& opts = {},
                            const std::vector<Complex>* reference = nullptr,
                            Exec exec = Exec::parallel);

}  // namespace ph1d
