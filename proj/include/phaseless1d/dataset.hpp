#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "phaseless1d/forward.hpp"

namespace ph1d {

// Multiplicative relative perturbation: value -> value * (1 + sigma * xi),
// xi ~ N(0,1) keyed deterministically by (seed, k, x, channel).
struct NoiseModel {
    double sigma = 0.0;
    std::uint64_t seed = 0;
};

enum class Method { s1, s2, s3 };

std::string method_name(Method m);
Method method_from_name(const std::string& name);

struct S1Record {
    double k, x1, x2;
    double r2;      // |s21|^2
    double i1, i2;  // |psi_plus|^2 at x1, x2
};

struct S2Record {
    double k, x1, x2, x3;
    double i1, i2, i3;
};

struct S3Record {
    double k, x;
    double i;   // |psi_plus|^2 at x
    double di;  // d|psi_plus|^2/dx at x
};

// a(x,k) = |psi_plus(x,k)|^2 - 1.
struct AValue {
    double a;
};
AValue a_of(double intensity);  // requires intensity >= 0

enum class DerivativeMode { analytic, central_difference };

struct S3Options {
    DerivativeMode mode = DerivativeMode::analytic;
    double fd_step = 1e-4;  // for central_difference; noise is applied to the
                            // differenced intensities, not to the derivative
};

std::vector<S1Record> build_s1(const Potential& v, double x1, double x2, const KGrid& grid,
                               const NoiseModel& noise = {}, const ForwardOptions& fwd = {},
                               Exec exec = Exec::parallel);

std::vector<S2Record> build_s2(const Potential& v, double x1, double x2, double x3,
                               const KGrid& grid, const NoiseModel& noise = {},
                               const ForwardOptions& fwd = {}, Exec exec = Exec::parallel);

std::vector<S3Record> build_s3(const Potential& v, double x, const KGrid& grid,
                               const NoiseModel& noise = {}, const S3Options& opts = {},
                               const ForwardOptions& fwd = {}, Exec exec = Exec::parallel);

// One homogeneous dataset plus the metadata needed to reproduce it.
struct Dataset {
    Method method = Method::s3;
    std::vector<S1Record> s1;
    std::vector<S2Record> s2;
    std::vector<S3Record> s3;

    std::size_t size() const;
    double k_at(std::size_t i) const;
};

}  // namespace ph1d
