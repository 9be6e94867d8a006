#include "phaseless1d/forward.hpp"

#include <cmath>

#include "phaseless1d/errors.hpp"

namespace ph1d {

namespace {

constexpr Complex kI{0.0, 1.0};

struct State {
    Complex g;   // solution value
    Complex gp;  // derivative
};

// ---- exact propagator for constant pieces ---------------------------------
//
// On a piece of constant v0 the solution is a combination of cos(q s), sin(q s)
// with q = sqrt(k^2 - v0); complex q covers the tunneling branch (q = i*kappa)
// through the same formulas.

Complex sinc_q(Complex q, double w) {
    const Complex qw = q * w;
    if (std::abs(qw) < 1e-6) {
        // sin(qw)/q = w (1 - (qw)^2/6 + (qw)^4/120)
        const Complex z2 = qw * qw;
        return w * (1.0 - z2 / 6.0 + z2 * z2 / 120.0);
    }
    return std::sin(qw) / q;
}

// Propagate (g, g') from the right edge b to the left edge a of one piece.
State propagate_piece(const State& at_b, double v0, double k, double width) {
    const Complex q = std::sqrt(Complex(k * k - v0, 0.0));
    const Complex c = std::cos(q * width);
    const Complex snc = sinc_q(q, width);
    // g(a)  = cos(qw) g(b) - sin(qw)/q g'(b)
    // g'(a) = q^2 sin(qw)/q g(b) + cos(qw) g'(b)
    return {c * at_b.g - snc * at_b.gp, q * q * snc * at_b.g + c * at_b.gp};
}

State exact_integrate_to_zero(const Potential& v, double k) {
    State s{std::exp(kI * k * v.support_end()), kI * k * std::exp(kI * k * v.support_end())};
    const auto pieces = v.constant_partition();
    for (auto it = pieces.rbegin(); it != pieces.rend(); ++it)
        s = propagate_piece(s, it->v, k, it->x1 - it->x0);
    return s;
}

// ---- adaptive Dormand-Prince 5(4) ------------------------------------------

struct Rhs {
    const Potential& v;
    double k2;
    State operator()(double x, const State& y) const { return {y.gp, (v(x) - k2) * y.g}; }
};

double error_norm(const State& err, const State& y0, const State& y1, double atol, double rtol) {
    auto comp = [&](Complex e, Complex a, Complex b) {
        const double sc = atol + rtol * std::max(std::abs(a), std::abs(b));
        return std::norm(e) / (sc * sc);
    };
    return std::sqrt(0.5 * (comp(err.g, y0.g, y1.g) + comp(err.gp, y0.gp, y1.gp)));
}

// Integrates from x0 to x1 (either direction). If record_at is inside the span,
// *recorded is filled with the solution there (integration restarts from it, so
// the value is on the exact trajectory).
State rk45_integrate(const Potential& v, double k, double x0, double x1,
                     const ForwardOptions& opts, const double* record_at = nullptr,
                     State* recorded = nullptr) {
    const Rhs rhs{v, k * k};
    State y{std::exp(kI * k * x0), kI * k * std::exp(kI * k * x0)};
    if (x0 == x1) return y;

    auto run = [&](State start, double a, double b) {
        State yy = start;
        const double dir = (b > a) ? 1.0 : -1.0;
        double x = a;
        double h = dir * std::max(1e-8, std::abs(b - a) / 256.0);
        State k1 = rhs(x, yy);
        long steps = 0;
        while (dir * (b - x) > 0) {
            if (++steps > 2'000'000)
                throw IntegratorError("rk45: step limit exceeded at k=" + std::to_string(k));
            if (dir * (x + h - b) > 0) h = b - x;

            auto axpy = [&](std::initializer_list<std::pair<double, const State*>> terms) {
                State out = yy;
                for (auto [c, s] : terms) {
                    out.g += h * c * s->g;
                    out.gp += h * c * s->gp;
                }
                return out;
            };
            const State k2 = rhs(x + h / 5, axpy({{1.0 / 5, &k1}}));
            const State k3 = rhs(x + 3 * h / 10, axpy({{3.0 / 40, &k1}, {9.0 / 40, &k2}}));
            const State k4 = rhs(x + 4 * h / 5, axpy({{44.0 / 45, &k1}, {-56.0 / 15, &k2}, {32.0 / 9, &k3}}));
            const State k5 = rhs(x + 8 * h / 9, axpy({{19372.0 / 6561, &k1},
                                                      {-25360.0 / 2187, &k2},
                                                      {64448.0 / 6561, &k3},
                                                      {-212.0 / 729, &k4}}));
            const State k6 = rhs(x + h, axpy({{9017.0 / 3168, &k1},
                                              {-355.0 / 33, &k2},
                                              {46732.0 / 5247, &k3},
                                              {49.0 / 176, &k4},
                                              {-5103.0 / 18656, &k5}}));
            const State y5 = axpy({{35.0 / 384, &k1},
                                   {500.0 / 1113, &k3},
                                   {125.0 / 192, &k4},
                                   {-2187.0 / 6784, &k5},
                                   {11.0 / 84, &k6}});
            const State k7 = rhs(x + h, y5);
            // difference between 5th and embedded 4th order solutions
            const State err{h * (71.0 / 57600 * k1.g - 71.0 / 16695 * k3.g + 71.0 / 1920 * k4.g -
                                 17253.0 / 339200 * k5.g + 22.0 / 525 * k6.g - 1.0 / 40 * k7.g),
                            h * (71.0 / 57600 * k1.gp - 71.0 / 16695 * k3.gp + 71.0 / 1920 * k4.gp -
                                 17253.0 / 339200 * k5.gp + 22.0 / 525 * k6.gp - 1.0 / 40 * k7.gp)};
            const double en = error_norm(err, yy, y5, opts.abs_tol, opts.rel_tol);
            if (en <= 1.0) {
                x += h;
                yy = y5;
                k1 = k7;  // FSAL
            }
            const double factor = (en > 0) ? 0.9 * std::pow(en, -0.2) : 5.0;
            h *= std::clamp(factor, 0.2, 5.0);
            if (std::abs(h) < 1e-14 * std::max(1.0, std::abs(b - a)))
                throw IntegratorError("rk45: step underflow at k=" + std::to_string(k));
        }
        return yy;
    };

    // waypoints: known kinks/jumps of v plus the optional recording point, so
    // every sub-integration sees a smooth right-hand side
    std::vector<double> stops;
    const double lo = std::min(x0, x1), hi = std::max(x0, x1);
    for (double b : v.breakpoints())
        if (b > lo && b < hi) stops.push_back(b);
    if (record_at && *record_at > lo && *record_at < hi) stops.push_back(*record_at);
    std::sort(stops.begin(), stops.end());
    if (x1 < x0) std::reverse(stops.begin(), stops.end());
    stops.push_back(x1);

    State y_cur = y;
    if (record_at && recorded && *record_at == x0) *recorded = y_cur;
    double from = x0;
    for (double to : stops) {
        if (to != from) y_cur = run(y_cur, from, to);
        if (record_at && recorded && *record_at == to) *recorded = y_cur;
        from = to;
    }
    return y_cur;
}

bool use_exact(const Potential& v, const ForwardOptions& opts) {
    if (opts.method == SolveMethod::exact) {
        if (!v.piecewise_constant())
            throw ConfigError("scatter: exact propagator requires a piecewise-constant potential");
        return true;
    }
    return opts.method == SolveMethod::automatic && v.piecewise_constant();
}

struct Decomposition {
    Complex A;  // coefficient of e^{ikx} at x = 0
    Complex B;  // coefficient of e^{-ikx}
};

Decomposition decompose(const State& at_zero, double k) {
    const Complex t = at_zero.gp / (kI * k);
    return {0.5 * (at_zero.g + t), 0.5 * (at_zero.g - t)};
}

void require_positive_k(double k) {
    if (!(k > 0) || !std::isfinite(k))
        throw ConfigError("wavenumber must satisfy k > 0 (got " + std::to_string(k) + ")");
}

void require_left(double x, const char* who) {
    if (!(x < 0))
        throw ConfigError(std::string(who) + ": measurement position must lie in x < 0 (got " +
                          std::to_string(x) + ")");
}

}  // namespace

std::vector<double> KGrid::values() const {
    validate();
    std::vector<double> ks(static_cast<std::size_t>(count));
    if (count == 1) {
        ks[0] = kmin;
        return ks;
    }
    const double dk = (kmax - kmin) / (count - 1);
    for (int i = 0; i < count; ++i) ks[static_cast<std::size_t>(i)] = kmin + dk * i;
    return ks;
}

void KGrid::validate() const {
    if (!(kmin > 0) || !(kmax >= kmin) || count < 1)
        throw ConfigError("k-grid must satisfy 0 < kmin <= kmax, count >= 1");
    if (count > 1 && !(kmax > kmin))
        throw ConfigError("k-grid with count > 1 needs kmax > kmin");
}

ScatteringCoefficients scatter(const Potential& v, double k, const ForwardOptions& opts) {
    require_positive_k(k);
    const State at_zero = use_exact(v, opts) ? exact_integrate_to_zero(v, k)
                                             : rk45_integrate(v, k, v.support_end(), 0.0, opts);
    const auto [A, B] = decompose(at_zero, k);
    ScatteringCoefficients c;
    c.k = k;
    c.s21 = B / A;
    c.s22 = 1.0 / A;
    c.unitarity_defect = unitarity_defect(c);
    c.flagged = !(c.unitarity_defect <= opts.unitarity_tol);
    return c;
}

Complex psi_plus(const Potential& v, double x, double k, const ForwardOptions& opts) {
    require_positive_k(k);
    if (!std::isfinite(x)) throw ConfigError("psi_plus: x must be finite");
    const double L = v.support_end();
    if (x < 0.0) {
        const auto c = scatter(v, k, opts);
        return std::exp(kI * k * x) + c.s21 * std::exp(-kI * k * x);
    }
    if (x >= L) {
        const auto c = scatter(v, k, opts);
        return c.s22 * std::exp(kI * k * x);
    }
    State at_x{};
    State at_zero{};
    if (use_exact(v, opts)) {
        // propagate exactly from L to x, then on to 0
        State s{std::exp(kI * k * L), kI * k * std::exp(kI * k * L)};
        const auto pieces = v.constant_partition();
        for (auto it = pieces.rbegin(); it != pieces.rend(); ++it) {
            if (x >= it->x1) break;
            const double lo = std::max(it->x0, x);
            s = propagate_piece(s, it->v, k, it->x1 - lo);
            if (lo == x) break;
        }
        at_x = s;
        // continue downward from x to 0
        State t = at_x;
        for (auto it = pieces.rbegin(); it != pieces.rend(); ++it) {
            if (it->x0 >= x) continue;
            const double hi = std::min(it->x1, x);
            t = propagate_piece(t, it->v, k, hi - it->x0);
        }
        at_zero = t;
    } else {
        at_zero = rk45_integrate(v, k, L, 0.0, opts, &x, &at_x);
    }
    const auto [A, B] = decompose(at_zero, k);
    return at_x.g / A;
}

double intensity_from_s21(Complex s21, double x, double k) {
    return 1.0 + 2.0 * std::real(s21 * std::exp(-2.0 * kI * k * x)) + std::norm(s21);
}

double intensity_derivative_from_s21(Complex s21, double x, double k) {
    return 4.0 * k * std::imag(s21 * std::exp(-2.0 * kI * k * x));
}

double intensity(const Potential& v, double x, double k, const ForwardOptions& opts) {
    require_left(x, "intensity");
    return intensity_from_s21(scatter(v, k, opts).s21, x, k);
}

double intensity_derivative(const Potential& v, double x, double k, const ForwardOptions& opts) {
    require_left(x, "intensity_derivative");
    return intensity_derivative_from_s21(scatter(v, k, opts).s21, x, k);
}

double unitarity_defect(const ScatteringCoefficients& c) {
    return std::abs(std::norm(c.s21) + std::norm(c.s22) - 1.0);
}

std::vector<ScatteringCoefficients> sweep_scatter(const Potential& v, const KGrid& grid,
                                                  const ForwardOptions& opts, Exec exec) {
    const auto ks = grid.values();
    std::vector<ScatteringCoefficients> out(ks.size());
    parallel_for(ks.size(), exec, [&](std::size_t i) { out[i] = scatter(v, ks[i], opts); });
    return out;
}

}  // namespace ph1d
