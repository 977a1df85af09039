#pragma once

#include <cmath>
#include <vector>

#include "ump/errors.hpp"

namespace ump {

inline constexpr double kPi = 3.141592653589793238462643383279502884;
inline constexpr double kTwoPi = 2.0 * kPi;

// Uniform periodic grid on [-pi, pi): nodes lambda_j = -pi + 2*pi*j/M.
// All integrals in the library are rectangle sums on this grid, which are
// spectrally accurate for smooth 2*pi-periodic integrands.
class PeriodicGrid {
public:
    explicit PeriodicGrid(int m) : m_(m), h_(kTwoPi / m) {
        if (m < 256 || m % 2 != 0)
            throw ConfigInvalid("grid size must be even and >= 256, got " + std::to_string(m));
        nodes_.resize(m);
        for (int j = 0; j < m; ++j) nodes_[j] = -kPi + h_ * j;
    }

    int size() const { return m_; }
    double step() const { return h_; }
    double node(int j) const { return nodes_[j]; }
    const std::vector<double>& nodes() const { return nodes_; }

    // Index wrapped into [0, M).
    int wrap(int j) const {
        int r = j % m_;
        return r < 0 ? r + m_ : r;
    }

    // Index of the grid node nearest to angle x (x reduced mod 2*pi).
    int nearest_index(double x) const {
        double u = (x + kPi) / h_;
        u -= std::floor(u / m_) * m_;
        int j = static_cast<int>(std::lround(u));
        return wrap(j);
    }

    // Exact-node lookup: throws unless x coincides with a node to within
    // 1e-9 of the step (principal-value rules are defined on nodes only).
    int node_index(double x) const {
        int j = nearest_index(x);
        double d = std::remainder(x - nodes_[j], kTwoPi);
        if (std::abs(d) > 1e-9 * h_)
            throw NodeMismatch("angle " + std::to_string(x) + " is not a grid node");
        return j;
    }

    // Default grid size for an order-n basis: at least 16 points per
    // oscillation of psi_n, rounded up to a power of two, floor 4096.
    static int default_size(int n) {
        int need = 16 * (n + 1);
        int m = 4096;
        while (m < need) m *= 2;
        return m;
    }

private:
    int m_;
    double h_;
    std::vector<double> nodes_;
};

} // namespace ump
