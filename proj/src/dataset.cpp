#include "phaseless1d/dataset.hpp"

#include <cmath>

#include "phaseless1d/errors.hpp"
#include "phaseless1d/rng.hpp"

namespace ph1d {

namespace {

// channel tags keep the per-record draws independent
enum Channel : std::uint32_t { ch_r2 = 1, ch_intensity = 2, ch_derivative = 3 };

double perturb(double value, const NoiseModel& noise, double k, double x, std::uint32_t channel) {
    if (noise.sigma == 0.0) return value;
    return value * (1.0 + noise.sigma * gaussian_noise(noise.seed, k, x, channel));
}

void require_left_distinct(std::initializer_list<double> xs, const char* who) {
    std::vector<double> v(xs);
    for (double x : v)
        if (!(x < 0) || !std::isfinite(x))
            throw ConfigError(std::string(who) + ": measurement positions must lie in x < 0");
    for (std::size_t i = 0; i < v.size(); ++i)
        for (std::size_t j = i + 1; j < v.size(); ++j)
            if (v[i] == v[j])
                throw DegenerateConfiguration(
                    std::string(who) + ": measurement positions must be pairwise distinct "
                                       "(x_i != x_j), got coincident x = " + std::to_string(v[i]),
                    0.0);
}

}  // namespace

std::string method_name(Method m) {
    switch (m) {
        case Method::s1: return "s1";
        case Method::s2: return "s2";
        case Method::s3: return "s3";
    }
    return "?";
}

Method method_from_name(const std::string& name) {
    if (name == "s1" || name == "S1") return Method::s1;
    if (name == "s2" || name == "S2") return Method::s2;
    if (name == "s3" || name == "S3") return Method::s3;
    throw ConfigError("unknown method \"" + name + "\" (expected s1|s2|s3)");
}

AValue a_of(double intensity) {
    if (!(intensity >= 0))
        throw ConfigError("a_of: intensity must be >= 0, got " + std::to_string(intensity));
    return {intensity - 1.0};
}

std::vector<S1Record> build_s1(const Potential& v, double x1, double x2, const KGrid& grid,
                               const NoiseModel& noise, const ForwardOptions& fwd, Exec exec) {
    require_left_distinct({x1, x2}, "build_s1");
    const auto ks = grid.values();
    std::vector<S1Record> out(ks.size());
    parallel_for(ks.size(), exec, [&](std::size_t i) {
        const double k = ks[i];
        const Complex s21 = scatter(v, k, fwd).s21;
        S1Record r;
        r.k = k;
        r.x1 = x1;
        r.x2 = x2;
        r.r2 = perturb(std::norm(s21), noise, k, 0.0, ch_r2);
        r.i1 = perturb(intensity_from_s21(s21, x1, k), noise, k, x1, ch_intensity);
        r.i2 = perturb(intensity_from_s21(s21, x2, k), noise, k, x2, ch_intensity);
        out[i] = r;
    });
    return out;
}

std::vector<S2Record> build_s2(const Potential& v, double x1, double x2, double x3,
                               const KGrid& grid, const NoiseModel& noise,
                               const ForwardOptions& fwd, Exec exec) {
    require_left_distinct({x1, x2, x3}, "build_s2");
    const auto ks = grid.values();
    std::vector<S2Record> out(ks.size());
    parallel_for(ks.size(), exec, [&](std::size_t i) {
        const double k = ks[i];
        const Complex s21 = scatter(v, k, fwd).s21;
        S2Record r;
        r.k = k;
        r.x1 = x1;
        r.x2 = x2;
        r.x3 = x3;
        r.i1 = perturb(intensity_from_s21(s21, x1, k), noise, k, x1, ch_intensity);
        r.i2 = perturb(intensity_from_s21(s21, x2, k), noise, k, x2, ch_intensity);
        r.i3 = perturb(intensity_from_s21(s21, x3, k), noise, k, x3, ch_intensity);
        out[i] = r;
    });
    return out;
}

std::vector<S3Record> build_s3(const Potential& v, double x, const KGrid& grid,
                               const NoiseModel& noise, const S3Options& opts,
                               const ForwardOptions& fwd, Exec exec) {
    require_left_distinct({x}, "build_s3");
    if (opts.mode == DerivativeMode::central_difference) {
        if (!(opts.fd_step > 0)) throw ConfigError("build_s3: fd_step must be > 0");
        if (!(x + opts.fd_step < 0))
            throw ConfigError("build_s3: x + fd_step must stay in x < 0");
    }
    const auto ks = grid.values();
    std::vector<S3Record> out(ks.size());
    parallel_for(ks.size(), exec, [&](std::size_t i) {
        const double k = ks[i];
        const Complex s21 = scatter(v, k, fwd).s21;
        S3Record r;
        r.k = k;
        r.x = x;
        r.i = perturb(intensity_from_s21(s21, x, k), noise, k, x, ch_intensity);
        if (opts.mode == DerivativeMode::analytic) {
            r.di = perturb(intensity_derivative_from_s21(s21, x, k), noise, k, x, ch_derivative);
        } else {
            // difference the (noisy) intensities a detector would actually see
            const double h = opts.fd_step;
            const double ip = perturb(intensity_from_s21(s21, x + h, k), noise, k, x + h, ch_intensity);
            const double im = perturb(intensity_from_s21(s21, x - h, k), noise, k, x - h, ch_intensity);
            r.di = (ip - im) / (2.0 * h);
        }
        out[i] = r;
    });
    return out;
}

std::size_t Dataset::size() const {
    switch (method) {
        case Method::s1: return s1.size();
        case Method::s2: return s2.size();
        case Method::s3: return s3.size();
    }
    return 0;
}

double Dataset::k_at(std::size_t i) const {
    switch (method) {
        case Method::s1: return s1[i].k;
        case Method::s2: return s2[i].k;
        case Method::s3: return s3[i].k;
    }
    return 0.0;
}

}  // namespace ph1d
