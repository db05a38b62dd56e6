#include "setmarkov/quadrature.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <mutex>
#include <numbers>

#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <boost/math/quadrature/tanh_sinh.hpp>

namespace setmarkov {

namespace {

// P_n(x) and P_n'(x) by the three-term recurrence.
std::pair<double, double> legendre(std::size_t n, double x) {
    double p0 = 1.0;
    double p1 = x;
    for (std::size_t k = 2; k <= n; ++k) {
        double pk = ((2.0 * static_cast<double>(k) - 1.0) * x * p1 - (static_cast<double>(k) - 1.0) * p0) /
                    static_cast<double>(k);
        p0 = p1;
        p1 = pk;
    }
    return {p1, static_cast<double>(n) * (x * p1 - p0) / (x * x - 1.0)};
}

QuadratureRule buildGaussLegendre(std::size_t n) {
    QuadratureRule rule;
    rule.nodes.resize(n);
    rule.weights.resize(n);
    for (std::size_t i = 0; i < (n + 1) / 2; ++i) {
        double x = std::cos(std::numbers::pi * (static_cast<double>(i) + 0.75) / (static_cast<double>(n) + 0.5));
        for (int iter = 0; iter < 100; ++iter) {
            auto [p, dp] = legendre(n, x);
            double dx = p / dp;
            x -= dx;
            if (std::abs(dx) < 1e-16) {
                break;
            }
        }
        auto [p, dp] = legendre(n, x);
        double w = 2.0 / ((1.0 - x * x) * dp * dp);
        rule.nodes[i] = -x;
        rule.nodes[n - 1 - i] = x;
        rule.weights[i] = w;
        rule.weights[n - 1 - i] = w;
    }
    if (n % 2 == 1) {
        rule.nodes[n / 2] = 0.0;
    }
    return rule;
}

} // namespace

const QuadratureRule& gaussLegendre(std::size_t n) {
    static std::mutex mutex;
    static std::map<std::size_t, QuadratureRule> cache;
    std::lock_guard lock(mutex);
    auto it = cache.find(n);
    if (it == cache.end()) {
        it = cache.emplace(n, n == 1 ? QuadratureRule{{0.0}, {2.0}} : buildGaussLegendre(n)).first;
    }
    return it->second;
}

double integrateGauss(const std::function<double(double)>& f, double a, double b, std::size_t order,
                      std::size_t panels) {
    if (a == b) {
        return 0.0;
    }
    const QuadratureRule& rule = gaussLegendre(order);
    double width = (b - a) / static_cast<double>(panels);
    double total = 0.0;
    for (std::size_t p = 0; p < panels; ++p) {
        double lo = a + width * static_cast<double>(p);
        double half = 0.5 * width;
        double mid = lo + half;
        double panel = 0.0;
        for (std::size_t k = 0; k < rule.nodes.size(); ++k) {
            panel += rule.weights[k] * f(mid + half * rule.nodes[k]);
        }
        total += half * panel;
    }
    return total;
}

double integrateEndpointSingular(const std::function<double(double)>& f, double a, double b,
                                 std::span<const double> breakpoints, double tolerance) {
    if (!(b > a)) {
        return 0.0;
    }
    std::vector<double> cuts{a};
    for (double c : breakpoints) {
        if (c > a && c < b) {
            cuts.push_back(c);
        }
    }
    cuts.push_back(b);
    std::sort(cuts.begin(), cuts.end());
    cuts.erase(std::unique(cuts.begin(), cuts.end()), cuts.end());

    thread_local boost::math::quadrature::tanh_sinh<double> integrator(15);
    double total = 0.0;
    for (std::size_t k = 0; k + 1 < cuts.size(); ++k) {
        total += integrator.integrate(f, cuts[k], cuts[k + 1], tolerance);
    }
    return total;
}

double integrateSmooth(const std::function<double(double)>& f, double a, double b, double tolerance) {
    if (a == b) {
        return 0.0;
    }
    return boost::math::quadrature::gauss_kronrod<double, 31>::integrate(f, a, b, 15, tolerance);
}

} // namespace setmarkov
