#pragma once

#include <functional>
#include <memory>
#include <span>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include "setmarkov/rng.hpp"

namespace setmarkov {

/// A law on the real line: an exact finite pmf or a closed-form family, optionally mapped
/// through y -> offset + scale * y. Compound laws draw the inner law's parameter from an outer law.
class Distribution {
public:
    struct Finite {
        std::vector<double> values;
        std::vector<double> probs;
    };
    struct Binomial {
        long trials;
        double p;
    };
    struct Poisson {
        double lambda;
    };
    struct Normal {
        double mean;
        double variance;
    };
    struct Beta {
        double a;
        double b;
    };
    struct PointMass {
        double value;
    };
    struct Compound {
        std::shared_ptr<const Distribution> outer;
        std::function<Distribution(double)> inner;
    };
    using Repr = std::variant<Finite, Binomial, Poisson, Normal, Beta, PointMass, Compound>;

    static Distribution pointMass(double value);
    /// Values are sorted and coincident values merged; probabilities must sum to 1 within 1e-12.
    static Distribution finite(std::vector<double> values, std::vector<double> probs);
    static Distribution binomial(long trials, double p);
    static Distribution poisson(double lambda);
    static Distribution normal(double mean, double variance);
    /// beta(a, 0) is the point mass at 1, beta(0, b) the point mass at 0.
    static Distribution beta(double a, double b);
    static Distribution compound(Distribution outer, std::function<Distribution(double)> inner);

    /// Law of offset + scale * Y.
    Distribution affine(double offset, double scale) const;

    const Repr& repr() const { return repr_; }
    double offset() const { return offset_; }
    double scale() const { return scale_; }
    std::string describe() const;

    bool isPointMass() const;
    /// Finite, binomial, Poisson and point-mass laws.
    bool isDiscrete() const;

    double cdf(double z) const;
    double sample(StreamRng& rng) const;
    /// E[g(Y)]. Breakpoints mark discontinuities of g for the continuous families.
    double expectation(const std::function<double(double)>& g, std::span<const double> breakpoints = {}) const;
    double mean() const;

    /// Atoms of a discrete law; Poisson laws are truncated once the remaining tail is below 1e-16.
    std::vector<std::pair<double, double>> atoms() const;

private:
    explicit Distribution(Repr repr) : repr_(std::move(repr)) {}

    double baseCdf(double y) const;
    double baseSample(StreamRng& rng) const;
    double baseExpectation(const std::function<double(double)>& g, std::span<const double> breakpoints) const;

    Repr repr_;
    double offset_ = 0.0;
    double scale_ = 1.0;
};

/// Atoms of a standard Poisson law with the tail beyond the last atom below 1e-16.
std::vector<std::pair<long, double>> poissonAtoms(double lambda);

} // namespace setmarkov
