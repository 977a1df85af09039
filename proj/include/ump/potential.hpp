#pragma once

#include <cmath>
#include <sstream>
#include <string>
#include <vector>

#include "ump/errors.hpp"
#include "ump/grid.hpp"

namespace ump {

enum class PrecisionMode { Double, Extended };

inline const char* to_string(PrecisionMode m) {
    return m == PrecisionMode::Double ? "double" : "extended";
}

// Even 2*pi-periodic potential V(lambda), understood as V(cos lambda):
//   Zero:           V = 0
//   Cosine(t):      V = -t cos(lambda)        (weight e^{n t cos lambda})
//   FourierCos(a):  V = sum_j a_j cos(j lambda)
// Evenness and periodicity hold by construction; derivatives up to order 3
// are analytic.
class Potential {
public:
    enum class Kind { Zero, Cosine, FourierCos };

    static Potential zero() { return Potential(Kind::Zero, 0.0, {}); }
    static Potential cosine(double t) { return Potential(Kind::Cosine, t, {}); }
    static Potential fourier_cos(std::vector<double> coeffs) {
        return Potential(Kind::FourierCos, 0.0, std::move(coeffs));
    }

    Kind kind() const { return kind_; }
    double coupling() const { return t_; }
    const std::vector<double>& coeffs() const { return coeffs_; }

    // d^order V / dlambda^order, order in 0..3.
    double eval(double lambda, int order = 0) const {
        if (order < 0 || order > 3)
            throw ConfigInvalid("potential derivative order must be 0..3");
        switch (kind_) {
            case Kind::Zero:
                return 0.0;
            case Kind::Cosine:
                // V = -t cos, V' = t sin, V'' = t cos, V''' = -t sin
                switch (order) {
                    case 0: return -t_ * std::cos(lambda);
                    case 1: return t_ * std::sin(lambda);
                    case 2: return t_ * std::cos(lambda);
                    default: return -t_ * std::sin(lambda);
                }
            case Kind::FourierCos: {
                double acc = 0.0;
                for (std::size_t i = 0; i < coeffs_.size(); ++i) {
                    const double j = static_cast<double>(i + 1);
                    const double a = coeffs_[i];
                    switch (order) {
                        case 0: acc += a * std::cos(j * lambda); break;
                        case 1: acc += -a * j * std::sin(j * lambda); break;
                        case 2: acc += -a * j * j * std::cos(j * lambda); break;
                        default: acc += a * j * j * j * std::sin(j * lambda); break;
                    }
                }
                return acc;
            }
        }
        return 0.0;
    }

    // Exact range of V for the closed-form kinds; dense scan with local
    // refinement for FourierCos.
    double min_value() const { return extrema().first; }
    double max_value() const { return extrema().second; }

    // Stable textual key for caches and manifests.
    std::string descriptor() const {
        std::ostringstream os;
        os.precision(17);
        switch (kind_) {
            case Kind::Zero: os << "zero"; break;
            case Kind::Cosine: os << "cosine(t=" << t_ << ")"; break;
            case Kind::FourierCos:
                os << "fourier_cos(";
                for (std::size_t i = 0; i < coeffs_.size(); ++i) {
                    if (i) os << ",";
                    os << coeffs_[i];
                }
                os << ")";
                break;
        }
        return os.str();
    }

private:
    Potential(Kind k, double t, std::vector<double> c) : kind_(k), t_(t), coeffs_(std::move(c)) {}

    std::pair<double, double> extrema() const {
        switch (kind_) {
            case Kind::Zero:
                return {0.0, 0.0};
            case Kind::Cosine:
                return {-std::abs(t_), std::abs(t_)};
            case Kind::FourierCos: {
                // Dense scan, then a few ternary-refinement sweeps around each
                // candidate; adequate for smooth low-order trig polynomials.
                const int scan = 8192;
                double lo = eval(0.0), hi = lo, arg_lo = 0.0, arg_hi = 0.0;
                for (int j = 1; j < scan; ++j) {
                    double x = -kPi + kTwoPi * j / scan;
                    double v = eval(x);
                    if (v < lo) { lo = v; arg_lo = x; }
                    if (v > hi) { hi = v; arg_hi = x; }
                }
                auto refine = [&](double x0, int sign) {
                    double a = x0 - kTwoPi / scan, b = x0 + kTwoPi / scan;
                    for (int it = 0; it < 200; ++it) {
                        double m1 = a + (b - a) / 3.0, m2 = b - (b - a) / 3.0;
                        if (sign * eval(m1) < sign * eval(m2)) b = m2;
                        else a = m1;
                    }
                    return eval(0.5 * (a + b));
                };
                lo = std::min(lo, refine(arg_lo, +1));
                hi = std::max(hi, refine(arg_hi, -1));
                return {lo, hi};
            }
        }
        return {0.0, 0.0};
    }

    Kind kind_;
    double t_;
    std::vector<double> coeffs_;
};

// Weight w(lambda) = exp(-n V(lambda)) sampled on a grid, plus the
// dynamic-range diagnostic exp(n (max V - min V)).
struct WeightProfile {
    int n = 0;
    std::vector<double> samples;
    double dynamic_range = 1.0;
};

// The effective conditioning of the Gram-Schmidt problem scales like
// sqrt(dynamic_range) (the basis is built from the square root of the
// weight); that square root is what must stay within the arithmetic's
// digit budget.
inline double precision_budget(PrecisionMode mode) {
    return mode == PrecisionMode::Double ? 1e12 : 1e24;
}

inline double dynamic_range(const Potential& p, int n) {
    return std::exp(static_cast<double>(n) * (p.max_value() - p.min_value()));
}

inline void check_precision(const Potential& p, int n, PrecisionMode mode) {
    const double range = dynamic_range(p, n);
    if (std::sqrt(range) > precision_budget(mode)) {
        std::ostringstream os;
        os << "weight dynamic range " << range << " (n=" << n << ", " << p.descriptor()
           << ") exceeds " << to_string(mode) << " budget";
        throw PrecisionExceeded(os.str());
    }
}

inline WeightProfile weight_profile(const Potential& p, int n, const PeriodicGrid& g,
                                    PrecisionMode mode = PrecisionMode::Double) {
    if (n < 1) throw ConfigInvalid("weight profile needs n >= 1");
    check_precision(p, n, mode);
    WeightProfile w;
    w.n = n;
    w.dynamic_range = dynamic_range(p, n);
    w.samples.resize(g.size());
    for (int j = 0; j < g.size(); ++j)
        w.samples[j] = std::exp(-static_cast<double>(n) * p.eval(g.node(j)));
    return w;
}

} // namespace ump
