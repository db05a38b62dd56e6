#include "setmarkov/distribution.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>

#include <boost/math/distributions/binomial.hpp>
#include <boost/math/distributions/poisson.hpp>
#include <boost/math/special_functions/beta.hpp>
#include <boost/math/special_functions/erf.hpp>

#include "setmarkov/error.hpp"
#include "setmarkov/quadrature.hpp"

namespace setmarkov {

namespace {

constexpr double kAtomSlack = 1e-9;

template <class... Ts>
struct Overloaded : Ts... {
    using Ts::operator()...;
};
template <class... Ts>
Overloaded(Ts...) -> Overloaded<Ts...>;

double slackAbove(double y) { return y + kAtomSlack * std::max(1.0, std::abs(y)); }

double betaPdf(double a, double b, double y) {
    double v = boost::math::ibeta_derivative(a, b, y);
    return std::isfinite(v) ? v : 0.0;
}

} // namespace

std::vector<std::pair<long, double>> poissonAtoms(double lambda) {
    if (lambda < 0.0 || !std::isfinite(lambda)) {
        throw ConfigurationError("poisson mean must be finite and nonnegative");
    }
    if (lambda == 0.0) {
        return {{0, 1.0}};
    }
    boost::math::poisson_distribution<double> law(lambda);
    long lo = 0;
    if (lambda > 50.0) {
        lo = static_cast<long>(std::floor(lambda - 12.0 * std::sqrt(lambda)));
    }
    std::vector<std::pair<long, double>> out;
    for (long k = lo;; ++k) {
        double p = boost::math::pdf(law, static_cast<double>(k));
        if (p > 0.0) {
            out.emplace_back(k, p);
        }
        if (static_cast<double>(k) > lambda && boost::math::cdf(boost::math::complement(law, static_cast<double>(k))) < 1e-16) {
            break;
        }
    }
    return out;
}

Distribution Distribution::pointMass(double value) { return Distribution(PointMass{value}); }

Distribution Distribution::finite(std::vector<double> values, std::vector<double> probs) {
    if (values.size() != probs.size() || values.empty()) {
        throw ConfigurationError("finite law needs matching nonempty value and probability lists");
    }
    std::vector<std::size_t> idx(values.size());
    std::iota(idx.begin(), idx.end(), 0);
    std::sort(idx.begin(), idx.end(), [&](std::size_t i, std::size_t j) { return values[i] < values[j]; });
    Finite f;
    double total = 0.0;
    for (std::size_t i : idx) {
        if (probs[i] < 0.0 || !std::isfinite(probs[i])) {
            throw ConfigurationError("finite law has a negative or non-finite probability");
        }
        total += probs[i];
        if (!f.values.empty() && std::abs(values[i] - f.values.back()) <= 1e-12 * std::max(1.0, std::abs(values[i]))) {
            f.probs.back() += probs[i];
        } else {
            f.values.push_back(values[i]);
            f.probs.push_back(probs[i]);
        }
    }
    if (std::abs(total - 1.0) > 1e-12) {
        throw ConfigurationError("finite law probabilities sum to " + std::to_string(total));
    }
    if (f.values.size() == 1) {
        return pointMass(f.values.front());
    }
    return Distribution(std::move(f));
}

Distribution Distribution::binomial(long trials, double p) {
    if (trials < 0 || !(p >= -1e-15 && p <= 1.0 + 1e-15)) {
        throw ConfigurationError("binomial parameters out of range");
    }
    p = std::clamp(p, 0.0, 1.0);
    if (trials == 0 || p == 0.0) {
        return pointMass(0.0);
    }
    if (p == 1.0) {
        return pointMass(static_cast<double>(trials));
    }
    return Distribution(Binomial{trials, p});
}

Distribution Distribution::poisson(double lambda) {
    if (!(lambda >= 0.0) || !std::isfinite(lambda)) {
        throw ConfigurationError("poisson mean must be finite and nonnegative");
    }
    if (lambda == 0.0) {
        return pointMass(0.0);
    }
    return Distribution(Poisson{lambda});
}

Distribution Distribution::normal(double mean, double variance) {
    if (!(variance >= 0.0) || !std::isfinite(variance) || !std::isfinite(mean)) {
        throw ConfigurationError("normal parameters out of range");
    }
    if (variance == 0.0) {
        return pointMass(mean);
    }
    return Distribution(Normal{mean, variance});
}

Distribution Distribution::beta(double a, double b) {
    if (!(a >= 0.0) || !(b >= 0.0) || !std::isfinite(a) || !std::isfinite(b) || (a == 0.0 && b == 0.0)) {
        throw ConfigurationError("beta parameters out of range");
    }
    if (b == 0.0) {
        return pointMass(1.0);
    }
    if (a == 0.0) {
        return pointMass(0.0);
    }
    return Distribution(Beta{a, b});
}

Distribution Distribution::compound(Distribution outer, std::function<Distribution(double)> inner) {
    return Distribution(Compound{std::make_shared<const Distribution>(std::move(outer)), std::move(inner)});
}

Distribution Distribution::affine(double offset, double scale) const {
    if (!(scale >= 0.0)) {
        throw ConfigurationError("affine map needs a nonnegative scale");
    }
    if (scale == 0.0) {
        return pointMass(offset);
    }
    Distribution out = *this;
    out.offset_ = offset + scale * offset_;
    out.scale_ = scale * scale_;
    return out;
}

bool Distribution::isPointMass() const { return std::holds_alternative<PointMass>(repr_); }

bool Distribution::isDiscrete() const {
    return std::holds_alternative<Finite>(repr_) || std::holds_alternative<Binomial>(repr_) ||
           std::holds_alternative<Poisson>(repr_) || std::holds_alternative<PointMass>(repr_);
}

std::string Distribution::describe() const {
    std::ostringstream os;
    os.precision(12);
    std::visit(Overloaded{
                   [&](const Finite& f) { os << "finite(" << f.values.size() << " atoms)"; },
                   [&](const Binomial& b) { os << "binomial(" << b.trials << ", " << b.p << ")"; },
                   [&](const Poisson& p) { os << "poisson(" << p.lambda << ")"; },
                   [&](const Normal& n) { os << "normal(" << n.mean << ", " << n.variance << ")"; },
                   [&](const Beta& b) { os << "beta(" << b.a << ", " << b.b << ")"; },
                   [&](const PointMass& p) { os << "pointMass(" << p.value << ")"; },
                   [&](const Compound& c) { os << "compound(" << c.outer->describe() << ")"; },
               },
               repr_);
    if (scale_ != 1.0) {
        os << " * " << scale_;
    }
    if (offset_ != 0.0) {
        os << " + " << offset_;
    }
    return os.str();
}

double Distribution::baseCdf(double y) const {
    return std::visit(
        Overloaded{
            [&](const Finite& f) {
                double acc = 0.0;
                double lim = slackAbove(y);
                for (std::size_t i = 0; i < f.values.size() && f.values[i] <= lim; ++i) {
                    acc += f.probs[i];
                }
                return std::min(acc, 1.0);
            },
            [&](const Binomial& b) {
                double k = std::floor(slackAbove(y));
                if (k < 0.0) {
                    return 0.0;
                }
                if (k >= static_cast<double>(b.trials)) {
                    return 1.0;
                }
                return boost::math::cdf(boost::math::binomial_distribution<double>(static_cast<double>(b.trials), b.p), k);
            },
            [&](const Poisson& p) {
                double k = std::floor(slackAbove(y));
                if (k < 0.0) {
                    return 0.0;
                }
                return boost::math::cdf(boost::math::poisson_distribution<double>(p.lambda), k);
            },
            [&](const Normal& n) { return 0.5 * boost::math::erfc(-(y - n.mean) / std::sqrt(2.0 * n.variance)); },
            [&](const Beta& b) {
                if (y <= 0.0) {
                    return 0.0;
                }
                if (y >= 1.0) {
                    return 1.0;
                }
                return boost::math::ibeta(b.a, b.b, y);
            },
            [&](const PointMass& p) { return p.value <= slackAbove(y) ? 1.0 : 0.0; },
            [&](const Compound& c) {
                std::vector<double> breaks{y};
                return c.outer->expectation([&](double o) { return c.inner(o).cdf(y); }, breaks);
            },
        },
        repr_);
}

double Distribution::cdf(double z) const { return baseCdf((z - offset_) / scale_); }

double Distribution::baseSample(StreamRng& rng) const {
    return std::visit(
        Overloaded{
            [&](const Finite& f) {
                double u = rng.uniform();
                double acc = 0.0;
                for (std::size_t i = 0; i < f.values.size(); ++i) {
                    acc += f.probs[i];
                    if (u <= acc) {
                        return f.values[i];
                    }
                }
                return f.values.back();
            },
            [&](const Binomial& b) {
                double u = rng.uniform();
                boost::math::binomial_distribution<double> law(static_cast<double>(b.trials), b.p);
                double acc = 0.0;
                for (long k = 0; k < b.trials; ++k) {
                    acc += boost::math::pdf(law, static_cast<double>(k));
                    if (u <= acc) {
                        return static_cast<double>(k);
                    }
                }
                return static_cast<double>(b.trials);
            },
            [&](const Poisson& p) {
                double u = rng.uniform();
                boost::math::poisson_distribution<double> law(p.lambda);
                double acc = 0.0;
                for (long k = 0;; ++k) {
                    acc += boost::math::pdf(law, static_cast<double>(k));
                    if (u <= acc || (static_cast<double>(k) > p.lambda && 1.0 - acc < 1e-17)) {
                        return static_cast<double>(k);
                    }
                }
            },
            [&](const Normal& n) {
                double u = rng.uniform();
                return n.mean - std::sqrt(2.0 * n.variance) * boost::math::erfc_inv(2.0 * u);
            },
            [&](const Beta& b) { return boost::math::ibeta_inv(b.a, b.b, rng.uniform()); },
            [&](const PointMass& p) { return p.value; },
            [&](const Compound& c) {
                double o = c.outer->sample(rng);
                return c.inner(o).sample(rng);
            },
        },
        repr_);
}

double Distribution::sample(StreamRng& rng) const { return offset_ + scale_ * baseSample(rng); }

double Distribution::baseExpectation(const std::function<double(double)>& g,
                                     std::span<const double> breakpoints) const {
    return std::visit(
        Overloaded{
            [&](const Finite& f) {
                double acc = 0.0;
                for (std::size_t i = 0; i < f.values.size(); ++i) {
                    acc += f.probs[i] * g(f.values[i]);
                }
                return acc;
            },
            [&](const Binomial& b) {
                boost::math::binomial_distribution<double> law(static_cast<double>(b.trials), b.p);
                double acc = 0.0;
                for (long k = 0; k <= b.trials; ++k) {
                    double p = boost::math::pdf(law, static_cast<double>(k));
                    if (p > 0.0) {
                        acc += p * g(static_cast<double>(k));
                    }
                }
                return acc;
            },
            [&](const Poisson& p) {
                double acc = 0.0;
                for (auto [k, w] : poissonAtoms(p.lambda)) {
                    acc += w * g(static_cast<double>(k));
                }
                return acc;
            },
            [&](const Normal& n) {
                double sd = std::sqrt(n.variance);
                constexpr double invSqrt2Pi = 0.39894228040143267794;
                return integrateGauss(
                    [&](double z) { return invSqrt2Pi * std::exp(-0.5 * z * z) * g(n.mean + sd * z); }, -12.0, 12.0,
                    20, 48);
            },
            [&](const Beta& b) {
                double g0 = g(0.0);
                std::vector<double> cuts;
                for (double c : breakpoints) {
                    if (c > 0.0 && c < 1.0) {
                        cuts.push_back(c);
                    }
                }
                double rest = integrateEndpointSingular(
                    [&](double y) {
                        double diff = g(y) - g0;
                        return diff == 0.0 ? 0.0 : diff * betaPdf(b.a, b.b, y);
                    },
                    0.0, 1.0, cuts, 1e-11);
                return g0 + rest;
            },
            [&](const PointMass& p) { return g(p.value); },
            [&](const Compound& c) {
                return c.outer->expectation([&](double o) { return c.inner(o).expectation(g, breakpoints); },
                                            breakpoints);
            },
        },
        repr_);
}

double Distribution::expectation(const std::function<double(double)>& g, std::span<const double> breakpoints) const {
    if (offset_ == 0.0 && scale_ == 1.0) {
        return baseExpectation(g, breakpoints);
    }
    std::vector<double> mapped;
    mapped.reserve(breakpoints.size());
    for (double b : breakpoints) {
        mapped.push_back((b - offset_) / scale_);
    }
    return baseExpectation([&](double y) { return g(offset_ + scale_ * y); }, mapped);
}

double Distribution::mean() const {
    double m = std::visit(Overloaded{
                              [](const Finite& f) {
                                  double acc = 0.0;
                                  for (std::size_t i = 0; i < f.values.size(); ++i) {
                                      acc += f.values[i] * f.probs[i];
                                  }
                                  return acc;
                              },
                              [](const Binomial& b) { return static_cast<double>(b.trials) * b.p; },
                              [](const Poisson& p) { return p.lambda; },
                              [](const Normal& n) { return n.mean; },
                              [](const Beta& b) { return b.a / (b.a + b.b); },
                              [](const PointMass& p) { return p.value; },
                              [](const Compound& c) {
                                  return c.outer->expectation([&](double o) { return c.inner(o).mean(); });
                              },
                          },
                          repr_);
    return offset_ + scale_ * m;
}

std::vector<std::pair<double, double>> Distribution::atoms() const {
    std::vector<std::pair<double, double>> out;
    std::visit(Overloaded{
                   [&](const Finite& f) {
                       for (std::size_t i = 0; i < f.values.size(); ++i) {
                           out.emplace_back(f.values[i], f.probs[i]);
                       }
                   },
                   [&](const Binomial& b) {
                       boost::math::binomial_distribution<double> law(static_cast<double>(b.trials), b.p);
                       for (long k = 0; k <= b.trials; ++k) {
                           double p = boost::math::pdf(law, static_cast<double>(k));
                           if (p > 0.0) {
                               out.emplace_back(static_cast<double>(k), p);
                           }
                       }
                   },
                   [&](const Poisson& p) {
                       for (auto [k, w] : poissonAtoms(p.lambda)) {
                           out.emplace_back(static_cast<double>(k), w);
                       }
                   },
                   [&](const PointMass& p) { out.emplace_back(p.value, 1.0); },
                   [&](const auto&) { throw UnsupportedError("law " + describe() + " has no finite atom list"); },
               },
               repr_);
    for (auto& [v, p] : out) {
        v = offset_ + scale_ * v;
    }
    return out;
}

} // namespace setmarkov
