#pragma once

#include <cstddef>
#include <functional>
#include <span>
#include <vector>

namespace setmarkov {

struct QuadratureRule {
    std::vector<double> nodes;
    std::vector<double> weights;
};

/// n-point Gauss-Legendre rule on [-1, 1]; cached per n.
const QuadratureRule& gaussLegendre(std::size_t n);

/// Composite Gauss-Legendre with `panels` equal panels of `order` nodes each.
double integrateGauss(const std::function<double(double)>& f, double a, double b, std::size_t order = 32,
                      std::size_t panels = 1);

/// Integral over [a, b] of a function that may be singular at either endpoint, split at the
/// interior breakpoints. Uses double-exponential quadrature.
double integrateEndpointSingular(const std::function<double(double)>& f, double a, double b,
                                 std::span<const double> breakpoints = {}, double tolerance = 1e-13);

/// Adaptive Gauss-Kronrod on [a, b] for smooth integrands.
double integrateSmooth(const std::function<double(double)>& f, double a, double b, double tolerance = 1e-13);

} // namespace setmarkov
