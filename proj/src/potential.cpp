#include "phaseless1d/potential.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <functional>
#include <sstream>

#include "phaseless1d/errors.hpp"

namespace ph1d {

namespace {

bool finite(double x) { return std::isfinite(x); }

std::string fmt(double x) {
    std::ostringstream os;
    os.precision(10);
    os << x;
    return os.str();
}

// Adaptive Simpson, only needed for the gaussian L^1_1 weight.
double adaptive_simpson(const std::function<double(double)>& f, double a, double b, double fa,
                        double fm, double fb, double whole, double tol, int depth) {
    const double m = 0.5 * (a + b);
    const double lm = 0.5 * (a + m), rm = 0.5 * (m + b);
    const double flm = f(lm), frm = f(rm);
    const double left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
    const double right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
    if (depth <= 0 || std::abs(left + right - whole) < 15.0 * tol)
        return left + right + (left + right - whole) / 15.0;
    return adaptive_simpson(f, a, m, fa, flm, fm, left, tol / 2, depth - 1) +
           adaptive_simpson(f, m, b, fm, frm, fb, right, tol / 2, depth - 1);
}

double integrate(const std::function<double(double)>& f, double a, double b, double tol) {
    if (b <= a) return 0.0;
    const double m = 0.5 * (a + b);
    const double fa = f(a), fm = f(m), fb = f(b);
    const double whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
    return adaptive_simpson(f, a, b, fa, fm, fb, whole, tol, 48);
}

// Exact integral of (1 + x)|v(x)| when v is linear on [a, b], splitting at the
// zero crossing so |v| stays polynomial on each side.
double weighted_abs_linear(double a, double b, double va, double vb) {
    if (b <= a) return 0.0;
    auto piece = [](double a_, double b_, double va_, double vb_) {
        // v(x) = va + (x-a)(vb-va)/(b-a), single sign on [a_, b_]
        const double w = b_ - a_;
        if (w <= 0) return 0.0;
        // integrate (1+x) v(x) dx with v linear, then take |.|
        const double c1 = va_, c2 = (vb_ - va_) / w;  // v = c1 + c2 (x - a_)
        // (1+x)(c1 + c2 (x-a_)) expanded around t = x - a_:
        // (1 + a_ + t)(c1 + c2 t) = c1(1+a_) + (c2(1+a_) + c1) t + c2 t^2
        const double A = c1 * (1 + a_), B = c2 * (1 + a_) + c1, C = c2;
        return std::abs(A * w + B * w * w / 2 + C * w * w * w / 3);
    };
    if (va * vb >= 0.0) return piece(a, b, va, vb);
    const double xr = a + (b - a) * va / (va - vb);  // zero crossing
    return piece(a, xr, va, 0.0) + piece(xr, b, 0.0, vb);
}

}  // namespace

void Potential::validate() const {
    if (!finite(support_end_) || support_end_ < 0)
        throw ConfigError("potential: support_end must be finite and >= 0");
    if (kind_ == Kind::piecewise_constant) {
        double prev = 0.0;
        for (const Segment& s : segments_) {
            if (!finite(s.v)) throw ConfigError("potential: non-finite segment value");
            if (!finite(s.x0) || !finite(s.x1)) throw ConfigError("potential: non-finite segment endpoint");
            if (s.x0 < 0) throw ConfigError("potential: support violates x >= 0 (segment starts at " + fmt(s.x0) + ")");
            if (s.x1 <= s.x0) throw ConfigError("potential: segment must have x_end > x_start");
            if (s.x0 < prev) throw ConfigError("potential: segments overlap or are unsorted");
            prev = s.x1;
        }
        if (!segments_.empty() && segments_.back().x1 > support_end_)
            throw ConfigError("potential: segment extends past support_end");
    } else if (kind_ == Kind::grid) {
        if (grid_x_.size() != grid_v_.size() || grid_x_.size() < 2)
            throw ConfigError("potential: grid needs >= 2 matching (x, v) nodes");
        if (grid_x_.front() < 0) throw ConfigError("potential: support violates x >= 0 (grid starts at " + fmt(grid_x_.front()) + ")");
        for (std::size_t i = 0; i < grid_x_.size(); ++i) {
            if (!finite(grid_x_[i]) || !finite(grid_v_[i])) throw ConfigError("potential: non-finite grid node");
            if (i > 0 && grid_x_[i] <= grid_x_[i - 1]) throw ConfigError("potential: grid x must be strictly increasing");
        }
    } else {
        if (!finite(amp_) || !finite(center_) || !finite(sigma_) || sigma_ <= 0)
            throw ConfigError("potential: gaussian needs finite amp/center and sigma > 0");
        if (win_lo_ < 0 || win_hi_ < win_lo_) throw ConfigError("potential: gaussian window must satisfy 0 <= lo <= hi");
    }
}

Potential Potential::zero() {
    Potential p;
    p.kind_ = Kind::piecewise_constant;
    p.support_end_ = 0.0;
    p.label_ = "zero";
    p.validate();
    return p;
}

Potential Potential::square_barrier(double v0, double width) {
    Potential p;
    p.kind_ = Kind::piecewise_constant;
    p.segments_ = {{0.0, width, v0}};
    p.support_end_ = width;
    p.label_ = "square-barrier(" + fmt(v0) + "," + fmt(width) + ")";
    p.validate();
    return p;
}

Potential Potential::double_barrier(double v0, double width, double gap) {
    if (!(gap >= 0)) throw ConfigError("potential: double-barrier gap must be >= 0");
    Potential p;
    p.kind_ = Kind::piecewise_constant;
    p.segments_ = {{0.0, width, v0}, {width + gap, 2 * width + gap, v0}};
    p.support_end_ = 2 * width + gap;
    p.label_ = "double-barrier(" + fmt(v0) + "," + fmt(width) + "," + fmt(gap) + ")";
    p.validate();
    return p;
}

Potential Potential::truncated_gaussian(double amp, double center, double sigma, double support_end) {
    Potential p;
    p.kind_ = Kind::gaussian;
    p.amp_ = amp;
    p.center_ = center;
    p.sigma_ = sigma;
    p.win_lo_ = 0.0;
    p.win_hi_ = support_end;
    p.support_end_ = support_end;
    p.label_ = "truncated-gaussian(" + fmt(amp) + "," + fmt(center) + "," + fmt(sigma) + "," + fmt(support_end) + ")";
    p.validate();
    return p;
}

Potential Potential::truncated_gaussian(double amp, double center, double sigma) {
    // half-width where |v| drops to 1e-12
    const double half = sigma * std::sqrt(2.0 * std::log(std::max(std::abs(amp), 1e-12) / 1e-12));
    const double hi = std::max(center + half, 0.0);
    return truncated_gaussian(amp, center, sigma, hi);
}

Potential Potential::piecewise(std::vector<Segment> segments) {
    std::sort(segments.begin(), segments.end(), [](const Segment& a, const Segment& b) { return a.x0 < b.x0; });
    Potential p;
    p.kind_ = Kind::piecewise_constant;
    p.support_end_ = segments.empty() ? 0.0 : segments.back().x1;
    p.segments_ = std::move(segments);
    p.label_ = "piecewise(" + std::to_string(p.segments_.size()) + " segments)";
    p.validate();
    return p;
}

Potential Potential::from_grid(std::vector<double> x, std::vector<double> v) {
    Potential p;
    p.kind_ = Kind::grid;
    p.support_end_ = x.empty() ? 0.0 : x.back();
    p.grid_x_ = std::move(x);
    p.grid_v_ = std::move(v);
    p.label_ = "grid(" + std::to_string(p.grid_x_.size()) + " nodes)";
    p.validate();
    return p;
}

double Potential::operator()(double x) const {
    if (!std::isfinite(x)) throw ConfigError("potential: evaluate at non-finite x");
    if (x < 0.0 || x > support_end_) return 0.0;
    switch (kind_) {
        case Kind::piecewise_constant: {
            for (const Segment& s : segments_)
                if (x >= s.x0 && x < s.x1) return s.v;
            // right endpoint of the last segment counts as inside
            if (!segments_.empty() && x == segments_.back().x1) return segments_.back().v;
            return 0.0;
        }
        case Kind::grid: {
            if (x < grid_x_.front() || x > grid_x_.back()) return 0.0;
            auto it = std::upper_bound(grid_x_.begin(), grid_x_.end(), x);
            if (it == grid_x_.begin()) return grid_v_.front();
            if (it == grid_x_.end()) return grid_v_.back();
            const std::size_t i = static_cast<std::size_t>(it - grid_x_.begin());
            const double t = (x - grid_x_[i - 1]) / (grid_x_[i] - grid_x_[i - 1]);
            return (1.0 - t) * grid_v_[i - 1] + t * grid_v_[i];
        }
        case Kind::gaussian: {
            if (x < win_lo_ || x > win_hi_) return 0.0;
            const double u = (x - center_) / sigma_;
            return amp_ * std::exp(-0.5 * u * u);
        }
    }
    return 0.0;
}

Potential Potential::translated(double y) const {
    if (!(y >= 0)) throw ConfigError("potential: translate requires y >= 0 (support must stay in x >= 0)");
    Potential p = *this;
    p.support_end_ += y;
    switch (kind_) {
        case Kind::piecewise_constant:
            for (Segment& s : p.segments_) {
                s.x0 += y;
                s.x1 += y;
            }
            break;
        case Kind::grid:
            for (double& gx : p.grid_x_) gx += y;
            break;
        case Kind::gaussian:
            p.center_ += y;
            p.win_lo_ += y;
            p.win_hi_ += y;
            break;
    }
    if (y != 0.0) p.label_ = label_ + "+shift(" + fmt(y) + ")";
    p.validate();
    return p;
}

double Potential::l11_norm() const {
    switch (kind_) {
        case Kind::piecewise_constant: {
            double total = 0.0;
            for (const Segment& s : segments_) {
                const double w = s.x1 - s.x0;
                total += std::abs(s.v) * (w + 0.5 * (s.x1 * s.x1 - s.x0 * s.x0));
            }
            return total;
        }
        case Kind::grid: {
            double total = 0.0;
            for (std::size_t i = 1; i < grid_x_.size(); ++i)
                total += weighted_abs_linear(grid_x_[i - 1], grid_x_[i], grid_v_[i - 1], grid_v_[i]);
            return total;
        }
        case Kind::gaussian: {
            auto f = [this](double x) { return (1.0 + x) * std::abs((*this)(x)); };
            return integrate(f, win_lo_, win_hi_, 1e-12);
        }
    }
    return 0.0;
}

double Potential::truncation_bound() const {
    if (kind_ != Kind::gaussian) return 0.0;
    return std::max(std::abs((*this)(win_lo_)), std::abs((*this)(win_hi_)));
}

std::vector<Segment> Potential::constant_partition() const {
    if (kind_ != Kind::piecewise_constant)
        throw ConfigError("potential: constant_partition requires a piecewise-constant potential");
    std::vector<Segment> pieces;
    double prev = 0.0;
    for (const Segment& s : segments_) {
        if (s.x0 > prev) pieces.push_back({prev, s.x0, 0.0});
        pieces.push_back(s);
        prev = s.x1;
    }
    if (prev < support_end_) pieces.push_back({prev, support_end_, 0.0});
    return pieces;
}

std::vector<double> Potential::breakpoints() const {
    std::vector<double> pts;
    auto add = [&](double x) {
        if (x > 0.0 && x < support_end_) pts.push_back(x);
    };
    switch (kind_) {
        case Kind::piecewise_constant:
            for (const Segment& s : segments_) {
                add(s.x0);
                add(s.x1);
            }
            break;
        case Kind::grid:
            for (double x : grid_x_) add(x);
            break;
        case Kind::gaussian:
            add(win_lo_);
            add(win_hi_);
            break;
    }
    std::sort(pts.begin(), pts.end());
    pts.erase(std::unique(pts.begin(), pts.end()), pts.end());
    return pts;
}

nlohmann::json Potential::to_json() const {
    nlohmann::json j;
    j["label"] = label_;
    j["l11_norm"] = l11_norm();
    if (kind_ == Kind::gaussian) j["truncation_bound"] = truncation_bound();
    switch (kind_) {
        case Kind::piecewise_constant: {
            j["kind"] = "piecewise";
            auto segs = nlohmann::json::array();
            for (const Segment& s : segments_) segs.push_back({s.x0, s.x1, s.v});
            j["params"] = {{"segments", segs}, {"support_end", support_end_}};
            break;
        }
        case Kind::grid:
            j["kind"] = "grid";
            j["params"] = {{"x", grid_x_}, {"v", grid_v_}};
            break;
        case Kind::gaussian:
            j["kind"] = "truncated-gaussian";
            j["params"] = {{"amp", amp_}, {"center", center_}, {"sigma", sigma_}, {"support_end", win_hi_}, {"window_lo", win_lo_}};
            break;
    }
    return j;
}

Potential Potential::from_json(const nlohmann::json& desc) {
    if (!desc.is_object() || !desc.contains("kind"))
        throw ConfigError("potential: JSON description needs a \"kind\" field");
    std::string kind = desc.at("kind").get<std::string>();
    nlohmann::json params = desc.value("params", nlohmann::json::object());
    if (kind == "preset") {
        kind = params.at("name").get<std::string>();
    }
    try {
        if (kind == "zero") return zero();
        if (kind == "square-barrier")
            return square_barrier(params.at("v0").get<double>(), params.at("width").get<double>());
        if (kind == "double-barrier")
            return double_barrier(params.at("v0").get<double>(), params.at("width").get<double>(),
                                  params.at("gap").get<double>());
        if (kind == "truncated-gaussian") {
            const double amp = params.at("amp").get<double>();
            const double center = params.at("center").get<double>();
            const double sigma = params.at("sigma").get<double>();
            if (params.contains("support_end"))
                return truncated_gaussian(amp, center, sigma, params.at("support_end").get<double>());
            return truncated_gaussian(amp, center, sigma);
        }
        if (kind == "piecewise" || kind == "piecewise-constant") {
            std::vector<Segment> segs;
            for (const auto& row : params.at("segments"))
                segs.push_back({row.at(0).get<double>(), row.at(1).get<double>(), row.at(2).get<double>()});
            return piecewise(std::move(segs));
        }
        if (kind == "grid" || kind == "grid-sampled") {
            if (params.contains("file")) return from_file(params.at("file").get<std::string>());
            return from_grid(params.at("x").get<std::vector<double>>(), params.at("v").get<std::vector<double>>());
        }
    } catch (const nlohmann::json::exception& e) {
        throw ConfigError(std::string("potential: bad parameters for kind \"") + kind + "\": " + e.what());
    }
    throw ConfigError("potential: unknown kind \"" + kind + "\"");
}

Potential Potential::from_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("potential: cannot open \"" + path + "\"");
    if (path.size() >= 5 && path.substr(path.size() - 5) == ".json") {
        nlohmann::json j;
        try {
            in >> j;
        } catch (const nlohmann::json::exception& e) {
            throw ConfigError("potential: bad JSON in \"" + path + "\": " + e.what());
        }
        return from_json(j);
    }
    // two-column CSV: x, v
    std::vector<double> xs, vs;
    std::string line;
    while (std::getline(in, line)) {
        if (line.empty() || line[0] == '#') continue;
        if (line.find_first_of("0123456789+-.") != 0) continue;  // header row
        std::istringstream row(line);
        double x, v;
        char comma;
        if (row >> x >> comma >> v) {
            xs.push_back(x);
            vs.push_back(v);
        }
    }
    return from_grid(std::move(xs), std::move(vs));
}

}  // namespace ph1d
