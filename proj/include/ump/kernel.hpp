#pragma once

// Christoffel-Darboux kernel K_n(lambda, mu) = sum_{j<n} psi_j(lambda) conj(psi_j(mu)),
// its marginal densities, rescaled/dephased forms, and the exact identity
// suite used throughout the tests.
//
// Off-grid evaluation goes through banded trigonometric interpolation of the
// psi rows: psi_k is a polynomial of degree k in e^{i lambda} times the
// weight square root, so its Fourier modes live in [-B, k+B] where B is the
// weight-root bandwidth. Reconstructing psi off-grid from polynomial
// coefficients times e^{-nV/2} instead would cancel catastrophically
// (coefficients reach e^{+range/2}); the interpolation route has no such loss.

#include <algorithm>
#include <array>
#include <cmath>
#include <complex>
#include <memory>
#include <vector>

#include "ump/errors.hpp"
#include "ump/fft.hpp"
#include "ump/grid.hpp"
#include "ump/opuc.hpp"
#include "ump/potential.hpp"
#include "ump/quadrature.hpp"

namespace ump {

enum class RescaleConvention { Diagonal, Dephased };

struct RescaledKernel {
    double lambda0 = 0.0;
    double scale = 1.0;
    RescaleConvention convention = RescaleConvention::Diagonal;
    std::vector<double> xs, ys;
    std::vector<std::vector<cdouble>> values;  // values[a][b] = K(l0+x_a/s, l0+y_b/s)/s
    std::vector<std::vector<double>> dephased; // Dephased only: real part after dephasing
    double dephased_imag_max = 0.0;            // Dephased only: sup |Im| after dephasing
};

struct KernelIdentityRecord {
    double crdr_residual = 0.0;       // |LHS - RHS| of the exact product identity
    double one_variable_slack = 0.0;  // bound minus |single integral|, >= 0 up to eps
    double two_variable_slack = 0.0;  // bound minus squared-distance integral
    double variation_lhs = 0.0;       // double integral, <= 2
    double intdist1_slack_half = 0.0; // delta = 0.5 tail bound slack
    double intdist1_slack_one = 0.0;  // delta = 1.0 tail bound slack
    double intdist2_lhs_half = 0.0;   // delta = 0.5 double-tail, <= 2/delta^2
    double intdist2_lhs_one = 0.0;    // delta = 1.0 double-tail, <= 2
};

class KernelEvaluator {
public:
    explicit KernelEvaluator(OrthonormalBasis basis)
        : b_(std::make_shared<OrthonormalBasis>(std::move(basis))) {
        const PeriodicGrid& g = b_->grid;
        const int m = g.size();
        const int n = b_->n;

        // Fourier coefficients of every psi row, plus per-row mode bands.
        coeffs_.resize(n + 1);
        band_lo_.resize(n + 1);
        band_hi_.resize(n + 1);
        int max_spread = 0;
        for (int k = 0; k <= n; ++k) {
            std::vector<cdouble> c = fourier_coefficients(g, b_->psi[k]);
            double peak = 0.0;
            for (const auto& z : c) peak = std::max(peak, std::abs(z));
            const double cut = peak * 1e-17;
            int lo = m, hi = -m;
            for (int idx = 0; idx < m; ++idx) {
                if (std::abs(c[idx]) > cut) {
                    int mode = signed_mode(idx, m);
                    lo = std::min(lo, mode);
                    hi = std::max(hi, mode);
                }
            }
            if (lo > hi) { lo = 0; hi = 0; }
            band_lo_[k] = lo;
            band_hi_[k] = hi;
            max_spread = std::max({max_spread, -lo, hi - k});
            coeffs_[k] = std::move(c);
        }

        rho_.resize(m);
        for (int j = 0; j < m; ++j) {
            double acc = 0.0;
            for (int k = 0; k < n; ++k) acc += std::norm(b_->psi[k][j]);
            rho_[j] = acc / n;
        }

        // r_{n-1,n}: the single recursion entry the identity suite needs.
        {
            cdouble acc(0.0, 0.0);
            for (int j = 0; j < m; ++j)
                acc += std::polar(1.0, g.node(j)) * b_->psi[n - 1][j] * std::conj(b_->psi[n][j]);
            r_top_ = acc * g.step();
        }

        // Subgrid for double integrals: |K|^2 is bandlimited to ~2(n + B),
        // so a stride-s subgrid integrates it exactly while Nyquist holds.
        int stride = 8;
        while (stride > 1 && m / stride < 4 * (n + max_spread) + 8) stride /= 2;
        stride_ = stride;
        compute_global_tails();
    }

    const OrthonormalBasis& basis() const { return *b_; }
    const PeriodicGrid& grid() const { return b_->grid; }
    int n() const { return b_->n; }
    const std::vector<double>& rho() const { return rho_; }

    // psi_j(x) for j = 0..n at an arbitrary angle.
    std::vector<cdouble> features(double x) const {
        const int n = b_->n;
        std::vector<cdouble> out(n + 1);
        const cdouble step = std::polar(1.0, x);
        for (int k = 0; k <= n; ++k) {
            const int m = b_->grid.size();
            cdouble e = std::polar(1.0, band_lo_[k] * x);
            cdouble acc(0.0, 0.0);
            for (int mode = band_lo_[k]; mode <= band_hi_[k]; ++mode) {
                acc += coeffs_[k][(mode % m + m) % m] * e;
                e *= step;
            }
            out[k] = acc;
        }
        return out;
    }

    double rho_at(double x) const {
        auto f = features(x);
        double acc = 0.0;
        for (int k = 0; k < b_->n; ++k) acc += std::norm(f[k]);
        return acc / b_->n;
    }

    cdouble cd(double lambda, double mu) const {
        auto fl = features(lambda);
        auto fm = features(mu);
        cdouble acc(0.0, 0.0);
        for (int k = 0; k < b_->n; ++k) acc += fl[k] * std::conj(fm[k]);
        return acc;
    }

    // K(lambda, mu_j) for every grid node at once (O(nM)).
    std::vector<cdouble> cd_row(double lambda) const {
        auto fl = features(lambda);
        const int m = b_->grid.size();
        std::vector<cdouble> out(m, cdouble(0.0, 0.0));
        for (int k = 0; k < b_->n; ++k) {
            const cdouble w = fl[k];
            const auto& row = b_->psi[k];
            for (int j = 0; j < m; ++j) out[j] += w * std::conj(row[j]);
        }
        return out;
    }

    // p_l = (n-l)! / n! * det[K(pts_i, pts_j)], l capped at 8.
    double correlation(const std::vector<double>& pts) const {
        const int l = static_cast<int>(pts.size());
        const int n = b_->n;
        if (l < 1) throw ConfigInvalid("correlation needs at least one point");
        if (l > n) throw DimensionTooLarge("correlation order exceeds n");
        if (l > 8) throw DimensionTooLarge("correlation order capped at 8");

        std::vector<std::vector<cdouble>> feats(l);
        for (int i = 0; i < l; ++i) feats[i] = features(pts[i]);
        std::vector<std::vector<cdouble>> a(l, std::vector<cdouble>(l));
        for (int i = 0; i < l; ++i)
            for (int j = 0; j < l; ++j) {
                cdouble acc(0.0, 0.0);
                for (int k = 0; k < n; ++k) acc += feats[i][k] * std::conj(feats[j][k]);
                a[i][j] = acc;
            }

        // Pivoted LU determinant.
        cdouble det(1.0, 0.0);
        for (int col = 0; col < l; ++col) {
            int piv = col;
            for (int row = col + 1; row < l; ++row)
                if (std::abs(a[row][col]) > std::abs(a[piv][col])) piv = row;
            if (std::abs(a[piv][col]) == 0.0) return 0.0;
            if (piv != col) {
                std::swap(a[piv], a[col]);
                det = -det;
            }
            det *= a[col][col];
            for (int row = col + 1; row < l; ++row) {
                cdouble f = a[row][col] / a[col][col];
                for (int j = col; j < l; ++j) a[row][j] -= f * a[col][j];
            }
        }
        double pref = 1.0;
        for (int i = 0; i < l; ++i) pref *= static_cast<double>(n - i);
        return det.real() / pref;
    }

    RescaledKernel rescaled(double lambda0, const std::vector<double>& xs,
                            const std::vector<double>& ys, RescaleConvention conv,
                            double window_lo = -kPi, double window_hi = kPi) const {
        RescaledKernel rk;
        rk.lambda0 = lambda0;
        rk.convention = conv;
        rk.xs = xs;
        rk.ys = ys;
        const int n = b_->n;
        rk.scale = (conv == RescaleConvention::Diagonal)
                       ? cd(lambda0, lambda0).real()
                       : static_cast<double>(n);
        auto point = [&](double u) {
            double p = lambda0 + u / rk.scale;
            if (p <= -kPi || p >= kPi || p < window_lo || p > window_hi)
                throw OutOfWindow("rescaled point " + std::to_string(p) + " outside window");
            return p;
        };

        std::vector<std::vector<cdouble>> fx, fy;
        for (double x : xs) fx.push_back(features(point(x)));
        for (double y : ys) fy.push_back(features(point(y)));

        rk.values.assign(xs.size(), std::vector<cdouble>(ys.size()));
        if (conv == RescaleConvention::Dephased)
            rk.dephased.assign(xs.size(), std::vector<double>(ys.size()));
        for (std::size_t a = 0; a < xs.size(); ++a) {
            for (std::size_t c = 0; c < ys.size(); ++c) {
                cdouble acc(0.0, 0.0);
                for (int k = 0; k < n; ++k) acc += fx[a][k] * std::conj(fy[c][k]);
                acc /= rk.scale;
                rk.values[a][c] = acc;
                if (conv == RescaleConvention::Dephased) {
                    cdouble deph = std::polar(1.0, -(n - 1.0) * (xs[a] - ys[c]) / (2.0 * n)) * acc;
                    rk.dephased[a][c] = deph.real();
                    rk.dephased_imag_max = std::max(rk.dephased_imag_max, std::abs(deph.imag()));
                }
            }
        }
        return rk;
    }

    cdouble recursion_top() const { return r_top_; }
    double variation_lhs() const { return variation_lhs_; }

    KernelIdentityRecord identity_residuals(double lambda) const {
        const PeriodicGrid& g = b_->grid;
        const int m = g.size();
        const int n = b_->n;
        const double h = g.step();

        auto fl = features(lambda);
        std::vector<cdouble> kv = cd_row(lambda);
        const cdouble eil = std::polar(1.0, lambda);

        cdouble lhs1(0.0, 0.0);
        double lhs2 = 0.0, tail_half = 0.0, tail_one = 0.0;
        for (int j = 0; j < m; ++j) {
            const double k2 = std::norm(kv[j]);
            const cdouble diff = eil - std::polar(1.0, g.node(j));
            const double d2 = std::norm(diff);
            lhs1 += diff * k2;
            lhs2 += d2 * k2;
            if (d2 > 0.25) tail_half += k2;
            if (d2 > 1.0) tail_one += k2;
        }
        lhs1 *= h;
        lhs2 *= h;
        tail_half *= h;
        tail_one *= h;

        const double cap = std::norm(fl[n - 1]) + std::norm(fl[n]);
        const cdouble rhs1 = r_top_ * fl[n] * std::conj(fl[n - 1]);

        KernelIdentityRecord rec;
        rec.crdr_residual = std::abs(lhs1 - rhs1);
        rec.one_variable_slack = 0.5 * cap - std::abs(lhs1);
        rec.two_variable_slack = cap - lhs2;
        rec.variation_lhs = variation_lhs_;
        rec.intdist1_slack_half = cap / 0.25 - tail_half;
        rec.intdist1_slack_one = cap / 1.0 - tail_one;
        rec.intdist2_lhs_half = intdist2_half_;
        rec.intdist2_lhs_one = intdist2_one_;
        return rec;
    }

private:
    void compute_global_tails() {
        const PeriodicGrid& g = b_->grid;
        const int m = g.size();
        const int n = b_->n;
        const int st = stride_;
        const int ms = m / st;
        const double hs = g.step() * st;

        // K on the subgrid via the feature rows restricted to subgrid nodes.
        std::vector<std::vector<cdouble>> sub(n, std::vector<cdouble>(ms));
        for (int k = 0; k < n; ++k)
            for (int a = 0; a < ms; ++a) sub[k][a] = b_->psi[k][a * st];

        double var = 0.0, t_half = 0.0, t_one = 0.0;
        for (int a = 0; a < ms; ++a) {
            for (int c = 0; c < ms; ++c) {
                cdouble acc(0.0, 0.0);
                for (int k = 0; k < n; ++k) acc += sub[k][a] * std::conj(sub[k][c]);
                const double k2 = std::norm(acc);
                const double d2 =
                    std::norm(std::polar(1.0, g.node(a * st)) - std::polar(1.0, g.node(c * st)));
                var += d2 * k2;
                if (d2 > 0.25) t_half += k2;
                if (d2 > 1.0) t_one += k2;
            }
        }
        variation_lhs_ = var * hs * hs;
        intdist2_half_ = t_half * hs * hs;
        intdist2_one_ = t_one * hs * hs;
    }

    std::shared_ptr<OrthonormalBasis> b_;
    std::vector<std::vector<cdouble>> coeffs_;
    std::vector<int> band_lo_, band_hi_;
    std::vector<double> rho_;
    cdouble r_top_{0.0, 0.0};
    int stride_ = 8;
    double variation_lhs_ = 0.0;
    double intdist2_half_ = 0.0;
    double intdist2_one_ = 0.0;
};

// Derivative identity: rho_n'(lambda) equals the exchange integral
// of V' against |K|^2 (the n's cancel; verified to 1e-13 at n = 16).
inline double drho2_residual(const KernelEvaluator& ev, const Potential& p, int node) {
    const PeriodicGrid& g = ev.grid();
    const int m = g.size();
    const double lambda = g.node(node);

    std::vector<cdouble> kv = ev.cd_row(lambda);
    double integral = 0.0;
    const double vpl = p.eval(lambda, 1);
    for (int j = 0; j < m; ++j)
        integral += (p.eval(g.node(j), 1) - vpl) * std::norm(kv[j]);
    integral *= g.step();

    const double fd = derivative4(g, ev.rho(), node);
    return std::abs(fd - integral);
}

} // namespace ump
