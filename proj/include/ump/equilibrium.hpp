#pragma once

// Limiting spectral density as the fixed point of
//   rho = (1/2pi) sqrt( max(0, 2iQ[rho] + 1 - V'^2) ),
// where 2iQ[rho](mu) = 2 ( H[V' rho](mu) - V'(mu) H[rho](mu) ) and H is the
// periodic principal-value cotangent transform. The boundary Herglotz kernel
// (e^{il}+e^{im})/(e^{il}-e^{im}) equals -i cot((l-m)/2), which makes Q purely
// imaginary and 2iQ real for even V.
//
// The iteration is damped Picard. A fixed damping factor of 0.5 has an exact
// period-2 limit cycle near the edge of the one-cut regime (coupling ~0.99),
// so the solver halves the damping whenever the update stalls; away from the
// edge it keeps the plain 0.5 path.

#include <cmath>
#include <complex>
#include <vector>

#include "ump/errors.hpp"
#include "ump/grid.hpp"
#include "ump/kernel.hpp"
#include "ump/potential.hpp"
#include "ump/quadrature.hpp"

namespace ump {

struct ConvergenceRecord {
    int iterations = 0;
    double final_update = 0.0;
    double clamp_ratio = 0.0; // fraction of nodes where the sqrt argument was clamped
    double omega_final = 0.5;
    bool converged = false;
};

struct EquilibriumDensity {
    PeriodicGrid grid{256};
    std::vector<double> rho;
    std::vector<char> bulk;     // rho > threshold
    double bulk_threshold = 0.01;
    std::vector<double> two_i_q; // 2iQ[rho] at the final iterate
    ConvergenceRecord record;

    double at_node(int j) const { return rho[j]; }
};

// 2iQ[rho] on the whole grid (a real vector for even V).
inline std::vector<double> two_i_q_transform(const Potential& p, const PeriodicGrid& g,
                                             const std::vector<double>& rho,
                                             const HilbertOperator& hilbert) {
    const int m = g.size();
    std::vector<double> vpr(m);
    std::vector<double> vp(m);
    for (int j = 0; j < m; ++j) {
        vp[j] = p.eval(g.node(j), 1);
        vpr[j] = vp[j] * rho[j];
    }
    std::vector<double> h1 = hilbert.apply(vpr);
    std::vector<double> h2 = hilbert.apply(rho);
    std::vector<double> out(m);
    for (int j = 0; j < m; ++j) out[j] = 2.0 * (h1[j] - vp[j] * h2[j]);
    return out;
}

// Q(mu) at a single node through the direct principal-value rule:
// Q = -i * pv_cot[(V'(.) - V'(mu)) rho(.)](mu). Returned as a complex number
// (purely imaginary up to roundoff) for the purity diagnostics.
inline cdouble q_transform_at(const Potential& p, const PeriodicGrid& g,
                              const std::vector<double>& rho, int node) {
    const int m = g.size();
    const double vmu = p.eval(g.node(node), 1);
    std::vector<double> f(m);
    for (int j = 0; j < m; ++j) f[j] = (p.eval(g.node(j), 1) - vmu) * rho[j];
    return cdouble(0.0, -1.0) * pv_cot(g, f, node);
}

inline EquilibriumDensity solve_density(const Potential& p, const PeriodicGrid& g,
                                        double tol = 1e-9, int max_iter = 2000,
                                        double bulk_threshold = 0.01) {
    if (tol <= 0.0) throw ConfigInvalid("equilibrium tolerance must be > 0");
    const int m = g.size();
    const double inv2pi = 1.0 / kTwoPi;
    HilbertOperator hilbert(g);

    std::vector<double> vp(m), vp2(m);
    for (int j = 0; j < m; ++j) {
        vp[j] = p.eval(g.node(j), 1);
        vp2[j] = vp[j] * vp[j];
    }

    EquilibriumDensity eq;
    eq.grid = g;
    eq.bulk_threshold = bulk_threshold;
    eq.rho.assign(m, inv2pi);

    double omega = 0.5;
    double best_update = 1e300;
    int since_improve = 0;
    std::vector<double> cand(m);

    for (int it = 1; it <= max_iter; ++it) {
        std::vector<double> q2i = two_i_q_transform(p, g, eq.rho, hilbert);
        int clamped = 0;
        for (int j = 0; j < m; ++j) {
            double expr = q2i[j] + 1.0 - vp2[j];
            if (expr < 0.0) {
                expr = 0.0;
                ++clamped;
            }
            cand[j] = inv2pi * std::sqrt(expr);
        }
        const double mass = integrate(g, cand);
        if (mass <= 0.0) throw NoConvergence("equilibrium candidate lost all mass");
        for (double& v : cand) v /= mass;

        double update = 0.0;
        for (int j = 0; j < m; ++j) update = std::max(update, std::abs(cand[j] - eq.rho[j]));
        for (int j = 0; j < m; ++j) eq.rho[j] = (1.0 - omega) * eq.rho[j] + omega * cand[j];

        eq.record.iterations = it;
        eq.record.final_update = update;
        eq.record.clamp_ratio = static_cast<double>(clamped) / m;
        eq.record.omega_final = omega;

        if (update <= tol) {
            eq.record.converged = true;
            break;
        }
        // Stall control: if the undamped update has not improved for a while,
        // the iteration is cycling; halve the damping.
        if (update < 0.95 * best_update) {
            best_update = update;
            since_improve = 0;
        } else if (++since_improve >= 40) {
            omega = std::max(omega * 0.5, 1.0 / 32.0);
            since_improve = 0;
            best_update = update;
        }
    }

    if (!eq.record.converged)
        throw NoConvergence("equilibrium fixed point: " + std::to_string(max_iter) +
                            " iterations, update " + std::to_string(eq.record.final_update));

    eq.two_i_q = two_i_q_transform(p, g, eq.rho, hilbert);
    eq.bulk.resize(m);
    for (int j = 0; j < m; ++j) eq.bulk[j] = eq.rho[j] > bulk_threshold ? 1 : 0;
    return eq;
}

struct ResolventSample {
    cdouble z{0.0, 0.0};
    cdouble f_n{0.0, 0.0};
    cdouble q_n{0.0, 0.0};
    cdouble square_residual{0.0, 0.0};
};

// Finite-n Herglotz transform f_n of rho_n at z, the finite-n Q transform,
// and the residual of the square equation evaluated against the solved
// equilibrium Q at Re z (snapped to the nearest grid node).
inline ResolventSample finite_n_resolvent(const KernelEvaluator& ev, const Potential& p,
                                          const EquilibriumDensity& eq, cdouble z) {
    const PeriodicGrid& g = ev.grid();
    const double mu = z.real();
    const double vpm = p.eval(mu, 1);

    ResolventSample out;
    out.z = z;
    out.f_n = herglotz(g, ev.rho(), z);

    std::vector<double> weighted(g.size());
    for (int j = 0; j < g.size(); ++j)
        weighted[j] = (p.eval(g.node(j), 1) - vpm) * ev.rho()[j];
    out.q_n = herglotz(g, weighted, z);

    const double q2i_eq = eq.two_i_q[eq.grid.nearest_index(mu)];
    const cdouble i(0.0, 1.0);
    out.square_residual = out.f_n * out.f_n - 2.0 * i * vpm * out.f_n - q2i_eq - 1.0;
    return out;
}

// D(lambda) = V'(lambda) + v.p. int cot(s/2) rho_n(lambda + s) ds.
// Identically zero at the equilibrium density; decays with n at bulk nodes
// (except at symmetry-forced zeros lambda = 0, +-pi where it vanishes for
// every n and only noise remains).
inline double vp_diagnostic(const KernelEvaluator& ev, const Potential& p, double lambda) {
    const int node = ev.grid().node_index(lambda);
    return p.eval(lambda, 1) + pv_cot(ev.grid(), ev.rho(), node);
}

} // namespace ump
