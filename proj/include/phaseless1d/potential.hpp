#pragma once

#include <string>
#include <vector>

#include "json.hpp"

namespace ph1d {

// One constant piece [x0, x1) of a piecewise-constant potential.
struct Segment {
    double x0 = 0.0;
    double x1 = 0.0;
    double v = 0.0;
};

// Real-valued potential supported on [0, L]. Immutable after construction;
// every factory validates the support and value invariants (v real and finite,
// v(x) = 0 for x < 0) and throws ConfigError on violation.
class Potential {
public:
    enum class Kind { piecewise_constant, grid, gaussian };

    static Potential zero();
    static Potential square_barrier(double v0, double width);
    // Two barriers of height v0 and width `width` separated by a zero-potential gap.
    static Potential double_barrier(double v0, double width, double gap);
    // amp * exp(-(x-center)^2 / (2 sigma^2)) restricted to [0, support_end].
    static Potential truncated_gaussian(double amp, double center, double sigma, double support_end);
    // Window chosen so the discarded tail satisfies |v| < 1e-12.
    static Potential truncated_gaussian(double amp, double center, double sigma);
    static Potential piecewise(std::vector<Segment> segments);
    // Uniform nodes x (ascending, x.front() >= 0) with linear interpolation between them.
    static Potential from_grid(std::vector<double> x, std::vector<double> v);
    static Potential from_json(const nlohmann::json& desc);
    // .json potential description or two-column (x, v) CSV.
    static Potential from_file(const std::string& path);

    Kind kind() const { return kind_; }
    bool piecewise_constant() const { return kind_ == Kind::piecewise_constant; }
    double support_end() const { return support_end_; }

    // v(x); exactly 0 for x < 0 and x > support_end().
    double operator()(double x) const;

    // v_y(x) = v(x - y), y >= 0 so the support stays in x >= 0.
    Potential translated(double y) const;

    // int_0^L (1 + x) |v(x)| dx (the L^1_1 weight; finite by compact support).
    double l11_norm() const;

    // For the gaussian preset: largest |v| discarded at the window edges. 0 otherwise.
    double truncation_bound() const;

    // Partition of [0, support_end] into constant pieces (segments plus the zero
    // gaps between them). Only valid for piecewise-constant potentials.
    std::vector<Segment> constant_partition() const;

    // Interior points of (0, support_end) where v jumps or kinks; ODE steppers
    // restart there so the smooth-error model stays valid.
    std::vector<double> breakpoints() const;

    const std::vector<Segment>& segments() const { return segments_; }
    const std::vector<double>& grid_x() const { return grid_x_; }
    const std::vector<double>& grid_v() const { return grid_v_; }

    nlohmann::json to_json() const;
    const std::string& label() const { return label_; }

private:
    Potential() = default;
    void validate() const;

    Kind kind_ = Kind::piecewise_constant;
    std::vector<Segment> segments_;          // piecewise_constant
    std::vector<double> grid_x_, grid_v_;    // grid
    double amp_ = 0, center_ = 0, sigma_ = 1, win_lo_ = 0, win_hi_ = 0;  // gaussian
    double support_end_ = 0.0;
    std::string label_ = "zero";
};

}  // namespace ph1d
