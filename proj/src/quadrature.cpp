#include "circulaw/quadrature.hpp"

#include <cmath>
#include <numbers>

#include "circulaw/errors.hpp"

namespace circulaw::quad {

GaussLegendre::GaussLegendre(int order) {
    if (order < 1) throw UsageError("GaussLegendre: order must be positive");
    const auto n = static_cast<std::size_t>(order);
    nodes_.resize(n);
    weights_.resize(n);
    // Newton on P_n from the Chebyshev-like initial guess; symmetric pairs.
    for (std::size_t i = 0; i < (n + 1) / 2; ++i) {
        double x = std::cos(std::numbers::pi * (static_cast<double>(i) + 0.75) / (static_cast<double>(n) + 0.5));
        double dp = 0.0;
        for (int iter = 0; iter < 100; ++iter) {
            double p0 = 1.0;
            double p1 = x;
            for (std::size_t k = 2; k <= n; ++k) {
                const double pk = ((2.0 * static_cast<double>(k) - 1.0) * x * p1 - (static_cast<double>(k) - 1.0) * p0) /
                                  static_cast<double>(k);
                p0 = p1;
                p1 = pk;
            }
            dp = static_cast<double>(n) * (x * p1 - p0) / (x * x - 1.0);
            const double dx = p1 / dp;
            x -= dx;
            if (std::abs(dx) < 1e-16) break;
        }
        const double w = 2.0 / ((1.0 - x * x) * dp * dp);
        nodes_[i] = -x;
        weights_[i] = w;
        nodes_[n - 1 - i] = x;
        weights_[n - 1 - i] = w;
    }
}

std::vector<double> graded_breakpoints(double a, double b, int uniform, int levels, double ratio, bool grade_left,
                                       bool grade_right) {
    if (!(b > a) || uniform < 1 || levels < 0 || !(ratio > 0.0 && ratio < 1.0)) {
        throw UsageError("graded_breakpoints: invalid arguments");
    }
    const double h = (b - a) / static_cast<double>(uniform + (grade_left ? 1 : 0) + (grade_right ? 1 : 0));
    std::vector<double> pts;
    if (grade_left) {
        pts.push_back(a);
        for (int k = levels; k >= 1; --k) pts.push_back(a + h * std::pow(ratio, k));
    }
    const double lo = grade_left ? a + h : a;
    const double hi = grade_right ? b - h : b;
    for (int k = 0; k <= uniform; ++k) {
        pts.push_back(k == uniform ? hi : lo + (hi - lo) * static_cast<double>(k) / static_cast<double>(uniform));
    }
    if (grade_right) {
        for (int k = 1; k <= levels; ++k) pts.push_back(b - h * std::pow(ratio, k));
        pts.push_back(b);
    }
    return pts;
}

const GaussLegendre& fine_rule() {
    static const GaussLegendre rule(24);
    return rule;
}

namespace {
const GaussLegendre& coarse_rule() {
    static const GaussLegendre rule(16);
    return rule;
}
}  // namespace

Result composite(const std::function<double(double)>& f, std::span<const double> breakpoints) {
    Result r;
    for (std::size_t i = 0; i + 1 < breakpoints.size(); ++i) {
        const double fine = fine_rule().integrate(f, breakpoints[i], breakpoints[i + 1]);
        const double coarse = coarse_rule().integrate(f, breakpoints[i], breakpoints[i + 1]);
        r.value += fine;
        r.error += std::abs(fine - coarse);
    }
    return r;
}

std::vector<double> panel_integrals(const std::function<double(double)>& f, std::span<const double> breakpoints) {
    std::vector<double> out;
    out.reserve(breakpoints.size());
    for (std::size_t i = 0; i + 1 < breakpoints.size(); ++i) {
        out.push_back(fine_rule().integrate(f, breakpoints[i], breakpoints[i + 1]));
    }
    return out;
}

}  // namespace circulaw::quad
