#pragma once

// Exact sampling from the rank-n projection determinantal process and the
// empirical statistics used to cross-check rho_n and the pair correlation.
//
// The chain is the sequential conditional method: the first angle comes from
// rho_n, and after each accepted angle the kernel's feature vectors are
// Gram-Schmidt-reduced against the accepted directions, which yields the
// next conditional density in closed form on the grid.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <vector>

#include "ump/errors.hpp"
#include "ump/kernel.hpp"
#include "ump/rng.hpp"

namespace ump {

struct EigenvalueSample {
    std::vector<double> angles; // exactly n points in [-pi, pi)
    std::uint64_t seed = 0;
    std::uint64_t sample_index = 0;
    int n = 0;
    double min_conditional = 0.0; // most negative conditional value seen pre-clamp
};

inline EigenvalueSample sample_eigenvalues(const KernelEvaluator& ev, std::uint64_t seed,
                                           std::uint64_t sample_index = 0) {
    const int n = ev.n();
    const PeriodicGrid& g = ev.grid();
    const int m = g.size();
    const double h = g.step();

    PhiloxRng rng(seed, sample_index);

    // Unnormalized conditional density on the grid, starts at K(l,l) = n rho_n.
    std::vector<double> dens(m);
    for (int j = 0; j < m; ++j) dens[j] = n * ev.rho()[j];

    std::vector<std::vector<cdouble>> dirs; // accepted, orthonormalized feature directions
    EigenvalueSample out;
    out.seed = seed;
    out.sample_index = sample_index;
    out.n = n;

    for (int step = 0; step < n; ++step) {
        const double expected = static_cast<double>(n - step);
        double mass = 0.0, low = 0.0;
        for (int j = 0; j < m; ++j) {
            low = std::min(low, dens[j]);
            mass += std::max(dens[j], 0.0);
        }
        mass *= h;
        out.min_conditional = std::min(out.min_conditional, low);
        if (mass < 1e-12 * expected)
            throw NumericalBreakdown("conditional density mass collapsed");

        // Inverse CDF over grid bins [node_j, node_j + h), uniform within a bin.
        const double u = rng.uniform() * mass;
        double acc = 0.0;
        double x = g.node(m - 1);
        for (int j = 0; j < m; ++j) {
            const double cell = std::max(dens[j], 0.0) * h;
            if (acc + cell >= u && cell > 0.0) {
                x = g.node(j) + h * (u - acc) / cell;
                break;
            }
            acc += cell;
        }
        x = std::min(x, std::nextafter(kPi, 0.0));
        out.angles.push_back(x);

        if (step == n - 1) break;

        // New direction: feature vector at x, reduced against accepted ones.
        std::vector<cdouble> f = ev.features(x);
        std::vector<cdouble> v(f.begin(), f.begin() + n);
        for (int pass = 0; pass < 2; ++pass) {
            for (const auto& e : dirs) {
                cdouble c(0.0, 0.0);
                for (int k = 0; k < n; ++k) c += v[k] * std::conj(e[k]);
                for (int k = 0; k < n; ++k) v[k] -= c * e[k];
            }
        }
        double nrm2 = 0.0;
        for (int k = 0; k < n; ++k) nrm2 += std::norm(v[k]);
        if (nrm2 < 1e-24) throw NumericalBreakdown("degenerate direction at accepted point");
        const double inv = 1.0 / std::sqrt(nrm2);
        for (int k = 0; k < n; ++k) v[k] *= inv;

        // dens -= |<phi(node), v>|^2 on the whole grid.
        const auto& psi = ev.basis().psi;
        for (int j = 0; j < m; ++j) {
            cdouble c(0.0, 0.0);
            for (int k = 0; k < n; ++k) c += psi[k][j] * std::conj(v[k]);
            dens[j] -= std::norm(c);
        }
        dirs.push_back(std::move(v));
    }
    return out;
}

struct EmpiricalStats {
    std::vector<double> edges;      // one-point bin edges over [-pi, pi]
    std::vector<double> one_point;  // density estimate per bin (integrates to 1)
    std::vector<double> one_point_se;
    std::vector<double> pair_edges; // pairwise circular-distance bin edges over [0, pi]
    std::vector<double> pair_rel;   // pair histogram relative to the flat reference
    std::size_t count = 0;

    double one_point_mass() const {
        double s = 0.0;
        for (std::size_t b = 0; b < one_point.size(); ++b)
            s += one_point[b] * (edges[b + 1] - edges[b]);
        return s;
    }
};

inline double circular_distance(double a, double b) {
    double d = std::abs(a - b);
    return d > kPi ? kTwoPi - d : d;
}

inline EmpiricalStats empirical_stats(const std::vector<EigenvalueSample>& samples, int bins) {
    if (samples.size() < 100) throw TooFewSamples("need at least 100 samples");
    if (bins < 2) throw ConfigInvalid("empirical_stats: need at least 2 bins");

    const std::size_t ns = samples.size();
    const int n = samples.front().n;
    const double width = kTwoPi / bins;
    const double pwidth = kPi / bins;

    EmpiricalStats st;
    st.count = ns;
    st.edges.resize(bins + 1);
    for (int b = 0; b <= bins; ++b) st.edges[b] = -kPi + width * b;
    st.pair_edges.resize(bins + 1);
    for (int b = 0; b <= bins; ++b) st.pair_edges[b] = pwidth * b;

    // Per-sample bin counts so the standard error reflects the within-sample
    // correlations of the point process, not a false iid-point assumption.
    std::vector<double> mean(bins, 0.0), m2(bins, 0.0);
    std::vector<double> pair_counts(bins, 0.0);
    std::vector<int> cnt(bins);
    for (std::size_t s = 0; s < ns; ++s) {
        std::fill(cnt.begin(), cnt.end(), 0);
        const auto& a = samples[s].angles;
        for (double x : a) {
            int b = static_cast<int>((x + kPi) / width);
            b = std::max(0, std::min(bins - 1, b));
            ++cnt[b];
        }
        for (int b = 0; b < bins; ++b) {
            const double d = cnt[b] - mean[b];
            mean[b] += d / (s + 1);
            m2[b] += d * (cnt[b] - mean[b]);
        }
        for (std::size_t i = 0; i < a.size(); ++i) {
            for (std::size_t j = i + 1; j < a.size(); ++j) {
                int b = static_cast<int>(circular_distance(a[i], a[j]) / pwidth);
                b = std::max(0, std::min(bins - 1, b));
                pair_counts[b] += 1.0;
            }
        }
    }

    st.one_point.resize(bins);
    st.one_point_se.resize(bins);
    for (int b = 0; b < bins; ++b) {
        st.one_point[b] = mean[b] / (n * width);
        const double var = ns > 1 ? m2[b] / (ns - 1) : 0.0;
        st.one_point_se[b] = std::sqrt(var / ns) / (n * width);
    }

    const double pairs_per_sample = 0.5 * n * (n - 1);
    st.pair_rel.resize(bins);
    for (int b = 0; b < bins; ++b) {
        const double dens = pair_counts[b] / (ns * pairs_per_sample * pwidth);
        st.pair_rel[b] = dens * kPi; // flat circular-distance reference is 1/pi
    }
    return st;
}

} // namespace ump
