#include "phaseless1d/recovery.hpp"

#include <algorithm>
#include <cmath>

#include "phaseless1d/errors.hpp"

namespace ph1d {

namespace {

constexpr Complex kI{0.0, 1.0};

double median_of(std::vector<double> v) {
    if (v.empty()) return 0.0;
    const std::size_t m = v.size() / 2;
    std::nth_element(v.begin(), v.begin() + static_cast<std::ptrdiff_t>(m), v.end());
    double hi = v[m];
    if (v.size() % 2 == 1) return hi;
    std::nth_element(v.begin(), v.begin() + static_cast<std::ptrdiff_t>(m) - 1, v.end());
    return 0.5 * (hi + v[m - 1]);
}

}  // namespace

Complex PhaseSplit::value() const { return modulus * std::exp(kI * alpha); }

PhaseSplit phase_split(Complex s21) {
    PhaseSplit p;
    p.modulus = std::abs(s21);
    p.alpha = (p.modulus == 0.0) ? 0.0 : std::atan2(s21.imag(), s21.real());
    return p;
}

RecoveryResult recover_from_s1(const S1Record& rec, const RecoveryOptions& opts) {
    const double k = rec.k;
    const double det = std::sin(2.0 * k * (rec.x2 - rec.x1));
    if (!(std::abs(det) > opts.eps_det))
        throw DegenerateConfiguration(
            "recover_from_s1: x1 = x2 mod(pi/(2k)); |sin(2k(x2-x1))| = " + std::to_string(std::abs(det)) +
                " <= eps_det at k = " + std::to_string(k),
            det);

    // |s21| (cos a, sin a) = (2 sin(2k(x2-x1)))^-1 [ sin(2kx2) -sin(2kx1); -cos(2kx2) cos(2kx1) ]
    //                        (a(x1)-|s21|^2, a(x2)-|s21|^2)
    const double rhs1 = (rec.i1 - 1.0) - rec.r2;
    const double rhs2 = (rec.i2 - 1.0) - rec.r2;
    const double c = (std::sin(2 * k * rec.x2) * rhs1 - std::sin(2 * k * rec.x1) * rhs2) / (2 * det);
    const double s = (-std::cos(2 * k * rec.x2) * rhs1 + std::cos(2 * k * rec.x1) * rhs2) / (2 * det);

    const double norm_cs = std::hypot(c, s);
    // phase from the recovered vector, modulus from the supplied r2
    PhaseSplit split;
    split.modulus = std::sqrt(std::max(rec.r2, 0.0));
    split.alpha = (norm_cs == 0.0) ? 0.0 : std::atan2(s, c);
    RecoveryResult out;
    out.k = k;
    out.method = Method::s1;
    out.conditioning = std::abs(det);
    out.residual = std::abs(norm_cs - split.modulus);
    out.s21_est = (norm_cs == 0.0 && split.modulus == 0.0) ? Complex{0.0, 0.0} : split.value();
    return out;
}

RecoveryResult recover_from_s2(const S2Record& rec, const RecoveryOptions& opts) {
    const double k = rec.k;
    const double delta = 4.0 * std::sin(k * (rec.x2 - rec.x3)) * std::sin(k * (rec.x2 - rec.x1)) *
                         std::sin(k * (rec.x1 - rec.x3));
    if (!(std::abs(delta) > opts.eps_det))
        throw DegenerateConfiguration(
            "recover_from_s2: some x_i = x_j mod(pi/k); |determinant| = " + std::to_string(std::abs(delta)) +
                " <= eps_det at k = " + std::to_string(k),
            delta);

    const double a1 = rec.i1 - 1.0, a2 = rec.i2 - 1.0, a3 = rec.i3 - 1.0;
    const double rhs1 = a2 - a1;
    const double rhs2 = a3 - a1;
    const double s1 = std::sin(2 * k * rec.x1), s2 = std::sin(2 * k * rec.x2), s3 = std::sin(2 * k * rec.x3);
    const double c1 = std::cos(2 * k * rec.x1), c2 = std::cos(2 * k * rec.x2), c3 = std::cos(2 * k * rec.x3);
    // (2 delta)^-1 equals the paper's (8 sin sin sin)^-1 prefactor
    const double c = ((s3 - s1) * rhs1 + (s1 - s2) * rhs2) / (2 * delta);
    const double s = ((c1 - c3) * rhs1 + (c2 - c1) * rhs2) / (2 * delta);

    RecoveryResult out;
    out.k = k;
    out.method = Method::s2;
    out.conditioning = std::abs(delta);
    out.s21_est = {c, s};  // modulus = |(c,s)|, no independent r2 supplied
    return out;
}

RecoveryResult recover_from_s3(const S3Record& rec, const RecoveryOptions&) {
    const double k = rec.k;
    // The exponent is -2ikx in both components: expanding |e^{ikx} + s21 e^{-ikx}|^2
    // shows the data determine exactly Re and Im of s21 e^{-2ikx}. (An e^{-ikx}
    // variant circulates but does not close that identity.)
    const double im = rec.di / (4.0 * k);
    const double radicand = rec.i - im * im;
    if (radicand < 0.0)
        throw NonPhysicalIntensity(
            "recover_from_s3: intensity - Im^2 = " + std::to_string(radicand) +
                " < 0 at k = " + std::to_string(k) + " (inconsistent noisy data)",
            radicand);
    const double re = -1.0 + std::sqrt(radicand);  // positive branch: |s21| < 1 forces Re + 1 > 0
    RecoveryResult out;
    out.k = k;
    out.method = Method::s3;
    out.conditioning = 1.0;
    out.s21_est = Complex{re, im} * std::exp(2.0 * kI * k * rec.x);
    return out;
}

Complex s21_from_field(Complex psi, double x, double k) {
    if (!(x < 0))
        throw ConfigError("s21_from_field: x must lie in x < 0, got " + std::to_string(x));
    if (!(k > 0)) throw ConfigError("s21_from_field: k must be > 0");
    return std::exp(kI * k * x) * psi - std::exp(2.0 * kI * k * x);
}

double conditioning(Method method, std::span<const double> positions, double k) {
    switch (method) {
        case Method::s1:
            if (positions.size() != 2) throw ConfigError("conditioning: S1 needs 2 positions");
            return std::abs(std::sin(2.0 * k * (positions[1] - positions[0])));
        case Method::s2: {
            if (positions.size() != 3) throw ConfigError("conditioning: S2 needs 3 positions");
            const double x1 = positions[0], x2 = positions[1], x3 = positions[2];
            return std::abs(4.0 * std::sin(k * (x2 - x3)) * std::sin(k * (x2 - x1)) *
                            std::sin(k * (x1 - x3)));
        }
        case Method::s3:
            return 1.0;
    }
    return 0.0;
}

RecoverySweep sweep_recover(const Dataset& data, const RecoveryOptions& opts,
                            const std::vector<Complex>* reference, Exec exec) {
    const std::size_t n = data.size();
    if (reference && reference->size() != n)
        throw ConfigError("sweep_recover: reference table length does not match dataset");
    RecoverySweep sweep;
    sweep.results.resize(n);
    parallel_for(n, exec, [&](std::size_t i) {
        try {
            switch (data.method) {
                case Method::s1: sweep.results[i] = recover_from_s1(data.s1[i], opts); break;
                case Method::s2: sweep.results[i] = recover_from_s2(data.s2[i], opts); break;
                case Method::s3: sweep.results[i] = recover_from_s3(data.s3[i], opts); break;
            }
        } catch (const DegenerateConfiguration& e) {
            sweep.results[i] = RecoveryResult{data.k_at(i), {0, 0}, std::abs(e.offending), 0.0,
                                              data.method, RecoveryStatus::degenerate};
        } catch (const NonPhysicalIntensity& e) {
            sweep.results[i] = RecoveryResult{data.k_at(i), {0, 0}, 1.0, std::abs(e.radicand),
                                              data.method, RecoveryStatus::nonphysical};
        }
    });

    SweepSummary& s = sweep.summary;
    s.total = n;
    std::vector<double> errs;
    for (std::size_t i = 0; i < n; ++i) {
        switch (sweep.results[i].status) {
            case RecoveryStatus::ok:
                ++s.recovered;
                if (reference) errs.push_back(std::abs(sweep.results[i].s21_est - (*reference)[i]));
                break;
            case RecoveryStatus::degenerate: ++s.degenerate; break;
            case RecoveryStatus::nonphysical: ++s.nonphysical; break;
        }
    }
    if (reference) {
        s.has_reference = true;
        s.max_error = errs.empty() ? 0.0 : *std::max_element(errs.begin(), errs.end());
        s.median_error = median_of(std::move(errs));
    }
    return sweep;
}

}  // namespace ph1d
