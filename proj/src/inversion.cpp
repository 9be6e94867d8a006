#include "phaseless1d/inversion.hpp"

#include <Eigen/Dense>
#include <cmath>

#include "phaseless1d/errors.hpp"

namespace ph1d {

namespace {

constexpr double kPi = 3.141592653589793238462643;

// Symmetric quadrature for F(t): nodes -k_N..-k_1, 0, k_1..k_N with trapezoid
// weights, band taper and the 1/(2pi) prefactor folded into the coefficients.
struct KernelQuad {
    std::vector<double> nodes;
    std::vector<Complex> coeff;
    double t_bound = 0.0;
};

double kaiser(double u, double beta) {
    if (beta <= 0.0) return 1.0;
    const double arg = 1.0 - u * u;
    return std::cyl_bessel_i(0.0, beta * std::sqrt(std::max(arg, 0.0))) / std::cyl_bessel_i(0.0, beta);
}

KernelQuad build_quad(const ReflectionTable& table, const InversionOptions& opts) {
    table.validate();
    const std::size_t n = table.k.size();
    const double kmax = table.k.back();

    // positive half with the virtual k = 0 node: Im s21(0) = 0 by the reality
    // symmetry; Re extrapolated linearly from the first two table entries
    std::vector<double> ks(n + 1);
    std::vector<Complex> ss(n + 1);
    ks[0] = 0.0;
    if (n >= 2) {
        const double k0 = table.k[0], k1 = table.k[1];
        ss[0] = Complex((table.s21[0].real() * k1 - table.s21[1].real() * k0) / (k1 - k0), 0.0);
    } else {
        ss[0] = Complex(table.s21[0].real(), 0.0);
    }
    for (std::size_t i = 0; i < n; ++i) {
        ks[i + 1] = table.k[i];
        ss[i + 1] = table.s21[i];
    }

    const std::size_t m = ks.size();
    KernelQuad q;
    q.nodes.resize(2 * m - 1);
    q.coeff.resize(2 * m - 1);
    auto weight = [&](std::size_t j) {  // trapezoid weight on the symmetric grid
        const double left = (j == 0) ? ks[1] - ks[0] : ks[j] - ks[j - 1];  // j=0 mirrors to -k_1
        const double right = (j + 1 < m) ? ks[j + 1] - ks[j] : 0.0;
        return 0.5 * (left + right);
    };
    for (std::size_t j = 0; j < m; ++j) {
        const Complex c = weight(j) * kaiser(ks[j] / kmax, opts.taper_beta) * ss[j] / (2.0 * kPi);
        q.nodes[m - 1 + j] = ks[j];
        q.coeff[m - 1 + j] = c;
        q.nodes[m - 1 - j] = -ks[j];
        q.coeff[m - 1 - j] = std::conj(c);
    }
    q.t_bound = opts.nyquist_safety * kPi / table.max_spacing();
    return q;
}

// F at t0 + j*dt for j = 0..count-1 via per-node phase recurrence.
void kernel_row(const KernelQuad& q, double t0, double dt, std::size_t count,
                std::vector<Complex>& acc) {
    acc.assign(count, Complex{0.0, 0.0});
    for (std::size_t j = 0; j < q.nodes.size(); ++j) {
        const Complex step = std::exp(Complex(0.0, -q.nodes[j] * dt));
        Complex phase = std::exp(Complex(0.0, -q.nodes[j] * t0));
        const Complex c = q.coeff[j];
        for (std::size_t m = 0; m < count; ++m) {
            acc[m] += c * phase;
            phase *= step;
        }
    }
}

void check_t(const KernelQuad& q, double t) {
    if (std::abs(t) > q.t_bound)
        throw TruncationError("marchenko kernel: |t| = " + std::to_string(std::abs(t)) +
                              " exceeds the k-grid resolution bound " + std::to_string(q.t_bound));
}

struct DiagonalSolve {
    double diag = 0.0;
    double imag_residue = 0.0;
    double nystrom_residual = 0.0;
    double rcond = 1.0;
    int nodes = 0;
};

DiagonalSolve solve_at(const KernelQuad& q, double x, const InversionOptions& opts,
                       std::vector<Complex>& scratch) {
    DiagonalSolve out;
    if (x <= 0.0) {
        check_t(q, 2.0 * x);
        kernel_row(q, 2.0 * x, 1.0, 1, scratch);
        out.diag = -scratch[0].real();
        out.imag_residue = std::abs(scratch[0].imag());
        return out;
    }
    check_t(q, 2.0 * x);
    const int n = std::max(2, static_cast<int>(std::lround(2.0 * x / opts.node_spacing)) + 1);
    const double h = 2.0 * x / (n - 1);
    // all needed arguments sit on {-2x + m h}: F(y_i + y_j) at m = i + j,
    // F(x + y_i) at m = n - 1 + i
    kernel_row(q, -2.0 * x, h, static_cast<std::size_t>(2 * n - 1), scratch);
    double imag = 0.0;
    for (const Complex& c : scratch) imag = std::max(imag, std::abs(c.imag()));
    out.imag_residue = imag;
    out.nodes = n;

    Eigen::MatrixXd A(n, n);
    Eigen::VectorXd b(n);
    for (int i = 0; i < n; ++i) {
        for (int j = 0; j < n; ++j) {
            const double w = (j == 0 || j == n - 1) ? 0.5 * h : h;
            A(i, j) = (i == j ? 1.0 : 0.0) + scratch[static_cast<std::size_t>(i + j)].real() * w;
        }
        b(i) = -scratch[static_cast<std::size_t>(n - 1 + i)].real();
    }
    Eigen::PartialPivLU<Eigen::MatrixXd> lu(A);
    out.rcond = lu.rcond();
    if (!(out.rcond > opts.rcond_min))
        throw IllConditioned("reconstruct: Nystrom system rcond = " + std::to_string(out.rcond) +
                             " at x = " + std::to_string(x));
    const Eigen::VectorXd sol = lu.solve(b);
    out.nystrom_residual = (A * sol - b).lpNorm<Eigen::Infinity>();
    out.diag = sol(n - 1);
    return out;
}

}  // namespace

void ReflectionTable::validate() const {
    if (k.size() != s21.size() || k.empty())
        throw ConfigError("reflection table: need matching non-empty k and s21 columns");
    for (std::size_t i = 0; i < k.size(); ++i) {
        if (!(k[i] > 0)) throw ConfigError("reflection table: k must be > 0");
        if (i > 0 && !(k[i] > k[i - 1]))
            throw ConfigError("reflection table: k must be strictly increasing");
        if (!(std::abs(s21[i]) < 1.0))
            throw ConfigError("reflection table: |s21| must be < 1 (violated at k = " +
                              std::to_string(k[i]) + ")");
    }
}

double ReflectionTable::max_spacing() const {
    double dk = k.front();  // gap to the virtual k = 0 node
    for (std::size_t i = 1; i < k.size(); ++i) dk = std::max(dk, k[i] - k[i - 1]);
    return dk;
}

ReflectionTable ReflectionTable::from_sweep(const std::vector<ScatteringCoefficients>& sweep) {
    ReflectionTable t;
    for (const auto& c : sweep) {
        t.k.push_back(c.k);
        t.s21.push_back(c.s21);
    }
    t.validate();
    return t;
}

ReflectionTable ReflectionTable::from_recovery(const std::vector<RecoveryResult>& results) {
    ReflectionTable t;
    for (const auto& r : results) {
        if (r.status != RecoveryStatus::ok) continue;
        t.k.push_back(r.k);
        t.s21.push_back(r.s21_est);
    }
    t.validate();
    return t;
}

KernelValue marchenko_kernel(const ReflectionTable& table, double t, const InversionOptions& opts) {
    const KernelQuad q = build_quad(table, opts);
    check_t(q, t);
    std::vector<Complex> acc;
    kernel_row(q, t, 1.0, 1, acc);
    return {acc[0].real(), std::abs(acc[0].imag())};
}

std::vector<double> XGrid::values() const {
    validate();
    std::vector<double> xs(static_cast<std::size_t>(count));
    const double dx = (hi - lo) / (count - 1);
    for (int i = 0; i < count; ++i) xs[static_cast<std::size_t>(i)] = lo + dx * i;
    return xs;
}

void XGrid::validate() const {
    if (!(hi > lo) || count < 5)
        throw ConfigError("x-grid must satisfy hi > lo with count >= 5");
}

ReconstructedPotential reconstruct_potential(const ReflectionTable& table, const XGrid& xgrid,
                                             const InversionOptions& opts, Exec exec) {
    const KernelQuad quad = build_quad(table, opts);
    const auto xs = xgrid.values();
    const std::size_t m = xs.size();
    std::vector<DiagonalSolve> solves(m);
    parallel_for(m, exec, [&](std::size_t i) {
        std::vector<Complex> scratch;
        solves[i] = solve_at(quad, xs[i], opts, scratch);
    });

    ReconstructedPotential rec;
    rec.x = xs;
    rec.v.resize(m);
    const double hx = (xgrid.hi - xgrid.lo) / (xgrid.count - 1);
    // v = 2 dK(x,x)/dx, five-point fourth-order stencils
    auto diag = [&](std::size_t i) { return solves[i].diag; };
    for (std::size_t j = 0; j < m; ++j) {
        double d;
        if (j >= 2 && j + 2 < m) {
            d = (diag(j - 2) - 8 * diag(j - 1) + 8 * diag(j + 1) - diag(j + 2)) / (12 * hx);
        } else if (j < 2) {
            d = (-25 * diag(j) + 48 * diag(j + 1) - 36 * diag(j + 2) + 16 * diag(j + 3) -
                 3 * diag(j + 4)) /
                (12 * hx);
        } else {
            d = (25 * diag(j) - 48 * diag(j - 1) + 36 * diag(j - 2) - 16 * diag(j - 3) +
                 3 * diag(j - 4)) /
                (12 * hx);
        }
        rec.v[j] = 2.0 * d;
    }

    InversionDiagnostics& dg = rec.diagnostics;
    dg.kernel_tail_bound = std::abs(table.s21.back()) * table.k.back() / kPi;
    for (const auto& s : solves) {
        dg.max_imag_residue = std::max(dg.max_imag_residue, s.imag_residue);
        dg.max_nystrom_residual = std::max(dg.max_nystrom_residual, s.nystrom_residual);
        dg.min_rcond = std::min(dg.min_rcond, s.rcond);
        dg.max_nodes = std::max(dg.max_nodes, s.nodes);
    }
    double left_sum = 0.0, peak = 0.0;
    std::size_t left_count = 0;
    for (std::size_t i = 0; i < m; ++i) {
        peak = std::max(peak, std::abs(rec.v[i]));
        if (xs[i] < -0.5) {
            left_sum += std::abs(rec.v[i]);
            ++left_count;
        }
    }
    if (left_count > 0 && peak > 0.0) dg.left_support_ratio = left_sum / left_count / peak;
    return rec;
}

double roundtrip_error(const Potential& v, const ReconstructedPotential& vhat) {
    if (vhat.x.size() < 2 || vhat.x.size() != vhat.v.size())
        throw ConfigError("roundtrip_error: reconstruction grid too small");
    double num = 0.0, den = 0.0;
    for (std::size_t i = 1; i < vhat.x.size(); ++i) {
        const double h = vhat.x[i] - vhat.x[i - 1];
        const double e0 = std::abs(v(vhat.x[i - 1]) - vhat.v[i - 1]);
        const double e1 = std::abs(v(vhat.x[i]) - vhat.v[i]);
        const double v0 = std::abs(v(vhat.x[i - 1]));
        const double v1 = std::abs(v(vhat.x[i]));
        num += 0.5 * h * (e0 + e1);
        den += 0.5 * h * (v0 + v1);
    }
    return num / std::max(den, 1e-12);
}

}  // namespace ph1d
