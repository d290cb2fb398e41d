#pragma once

#include <cstddef>
#include <functional>
#include <span>
#include <vector>

namespace circulaw::quad {

/// Gauss-Legendre rule on [-1, 1].
class GaussLegendre {
public:
    explicit GaussLegendre(int order);

    int order() const noexcept { return static_cast<int>(nodes_.size()); }
    const std::vector<double>& nodes() const noexcept { return nodes_; }
    const std::vector<double>& weights() const noexcept { return weights_; }

    template <typename F>
    double integrate(F&& f, double a, double b) const {
        const double half = 0.5 * (b - a);
        const double mid = 0.5 * (a + b);
        double acc = 0.0;
        for (std::size_t i = 0; i < nodes_.size(); ++i) acc += weights_[i] * f(mid + half * nodes_[i]);
        return half * acc;
    }

private:
    std::vector<double> nodes_;
    std::vector<double> weights_;
};

struct Result {
    double value = 0.0;
    /// |high-order - low-order| summed over panels.
    double error = 0.0;
};

/// Breakpoints on [a, b]: `uniform` equal panels in the middle plus
/// `levels` geometrically shrinking panels (ratio `ratio`) at each graded end.
std::vector<double> graded_breakpoints(double a, double b, int uniform, int levels, double ratio, bool grade_left,
                                       bool grade_right);

/// Composite rule over consecutive breakpoints, 24-point Gauss-Legendre per
/// panel with a 16-point companion for the error estimate.
Result composite(const std::function<double(double)>& f, std::span<const double> breakpoints);

/// Per-panel integrals (24-point rule) over consecutive breakpoints.
std::vector<double> panel_integrals(const std::function<double(double)>& f, std::span<const double> breakpoints);

/// The 24-point rule used by `composite`.
const GaussLegendre& fine_rule();

}  // namespace circulaw::quad
