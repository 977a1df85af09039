#pragma once

// Orthonormal system psi_0..psi_n on the circle under the varying weight
// e^{-n V(lambda)}: modified Gram-Schmidt on the family {e^{ik lambda} w^{1/2}}
// with exactly one re-orthogonalization pass, in double or double-double.
//
// Two structural facts are enforced rather than hoped for:
//  * For even V the projection coefficients are mathematically real, and the
//    mirrored grid satisfies lambda_{M-j} = -lambda_j. Taking the real part
//    of each projection and mirror-symmetrizing the weight samples keeps
//    psi_k(-lambda) = conj(psi_k(lambda)) at machine precision at any
//    conditioning. A plain complex MGS loses this symmetry at the rate
//    (conditioning x epsilon), which is ~1e-6 at the largest accepted sizes.
//  * The leading polynomial coefficient stays exactly 1 through projections
//    (only lower-degree rows are subtracted), so the normalization constant
//    *is* the leading coefficient: gamma_k = 1/||v||. Extracting gamma by
//    Fourier projection instead loses ~5 digits through cancellation against
//    e^{+nV/2}; that route survives only as a cross-check.

#include <complex>
#include <vector>

#include "ump/dd.hpp"
#include "ump/errors.hpp"
#include "ump/fft.hpp"
#include "ump/grid.hpp"
#include "ump/potential.hpp"
#include "ump/quadrature.hpp"

namespace ump {

struct OrthonormalBasis {
    int n = 0;
    PeriodicGrid grid{256};
    PrecisionMode mode = PrecisionMode::Double;
    double dynamic_range = 1.0;
    std::vector<std::vector<cdouble>> psi; // rows k = 0..n, M samples each
    std::vector<double> gamma;             // leading coefficients, all > 0
    std::vector<double> weight_sqrt;       // symmetrized e^{-nV/2} samples
    double orthonormality_residual = 0.0;
};

namespace detail {

inline void build_double(const Potential& p, int n, OrthonormalBasis& b) {
    const PeriodicGrid& g = b.grid;
    const int m = g.size();
    const double h = g.step();

    std::vector<double> sqw(m);
    for (int j = 0; j < m; ++j)
        sqw[j] = std::exp(-0.5 * n * p.eval(g.node(j)));
    for (int j = 1; j < m / 2; ++j) {
        double s = 0.5 * (sqw[j] + sqw[m - j]);
        sqw[j] = sqw[m - j] = s;
    }
    b.weight_sqrt = sqw;

    b.psi.assign(n + 1, std::vector<cdouble>(m));
    b.gamma.assign(n + 1, 0.0);

    std::vector<cdouble> v(m);
    for (int k = 0; k <= n; ++k) {
        for (int j = 0; j < m; ++j) {
            double a = k * g.node(j);
            v[j] = cdouble(std::cos(a) * sqw[j], std::sin(a) * sqw[j]);
        }
        for (int pass = 0; pass < 2; ++pass) {
            for (int l = 0; l < k; ++l) {
                const auto& pl = b.psi[l];
                double cr = 0.0;
                for (int j = 0; j < m; ++j)
                    cr += pl[j].real() * v[j].real() + pl[j].imag() * v[j].imag();
                cr *= h; // real part of <psi_l, v>; imaginary part is pure noise
                for (int j = 0; j < m; ++j) v[j] -= cr * pl[j];
            }
        }
        double nrm2 = 0.0;
        for (int j = 0; j < m; ++j) nrm2 += std::norm(v[j]);
        const double nrm = std::sqrt(h * nrm2);
        b.gamma[k] = 1.0 / nrm;
        auto& row = b.psi[k];
        for (int j = 0; j < m; ++j) row[j] = v[j] / nrm;
    }

    double res = 0.0;
    for (int k = 0; k <= n; ++k) {
        for (int l = 0; l <= k; ++l) {
            cdouble acc(0.0, 0.0);
            for (int j = 0; j < m; ++j) acc += b.psi[k][j] * std::conj(b.psi[l][j]);
            acc *= h;
            double d = std::abs(acc - (k == l ? cdouble(1.0, 0.0) : cdouble(0.0, 0.0)));
            if (d > res) res = d;
        }
    }
    b.orthonormality_residual = res;
}

inline dd eval_potential_dd(const Potential& p, dd lambda) {
    switch (p.kind()) {
        case Potential::Kind::Zero:
            return dd(0.0);
        case Potential::Kind::Cosine:
            return -dd(p.coupling()) * dd_cos(lambda);
        case Potential::Kind::FourierCos: {
            dd acc(0.0);
            for (std::size_t i = 0; i < p.coeffs().size(); ++i)
                acc += dd(p.coeffs()[i]) * dd_cos(dd(static_cast<double>(i + 1)) * lambda);
            return acc;
        }
    }
    return dd(0.0);
}

inline void build_extended(const Potential& p, int n, OrthonormalBasis& b) {
    const PeriodicGrid& g = b.grid;
    const int m = g.size();
    const dd h = ddconst::two_pi / dd(static_cast<double>(m));

    std::vector<dd> lam(m);
    for (int j = 0; j < m; ++j) lam[j] = -ddconst::pi + dd(static_cast<double>(j)) * h;

    std::vector<dd> sqw(m);
    for (int j = 0; j < m; ++j)
        sqw[j] = dd_exp(dd(-0.5 * n) * eval_potential_dd(p, lam[j]));
    for (int j = 1; j < m / 2; ++j) {
        dd s = dd(0.5) * (sqw[j] + sqw[m - j]);
        sqw[j] = sqw[m - j] = s;
    }
    b.weight_sqrt.resize(m);
    for (int j = 0; j < m; ++j) b.weight_sqrt[j] = sqw[j].to_double();

    // e^{i k lambda_j} by multiplicative recurrence over k.
    std::vector<ddc> unit(m), mode_k(m);
    for (int j = 0; j < m; ++j) {
        dd s, c;
        dd_sincos(lam[j], s, c);
        unit[j] = ddc(c, s);
        mode_k[j] = ddc(dd(1.0), dd(0.0));
    }

    std::vector<std::vector<ddc>> rows(n + 1, std::vector<ddc>(m));
    b.psi.assign(n + 1, std::vector<cdouble>(m));
    b.gamma.assign(n + 1, 0.0);

    std::vector<ddc> v(m);
    for (int k = 0; k <= n; ++k) {
        for (int j = 0; j < m; ++j) v[j] = sqw[j] * mode_k[j];
        for (int pass = 0; pass < 2; ++pass) {
            for (int l = 0; l < k; ++l) {
                const auto& pl = rows[l];
                dd cr(0.0);
                for (int j = 0; j < m; ++j)
                    cr += pl[j].re * v[j].re + pl[j].im * v[j].im;
                cr = cr * h;
                for (int j = 0; j < m; ++j)
                    v[j] = v[j] - cr * pl[j];
            }
        }
        dd nrm2(0.0);
        for (int j = 0; j < m; ++j) nrm2 += norm2(v[j]);
        const dd nrm = dd_sqrt(h * nrm2);
        b.gamma[k] = (dd(1.0) / nrm).to_double();
        auto& row = rows[k];
        auto& out = b.psi[k];
        for (int j = 0; j < m; ++j) {
            row[j] = ddc(v[j].re / nrm, v[j].im / nrm);
            out[j] = cdouble(row[j].re.to_double(), row[j].im.to_double());
        }
        for (int j = 0; j < m; ++j) mode_k[j] = mode_k[j] * unit[j];
    }

    dd res(0.0);
    for (int k = 0; k <= n; ++k) {
        for (int l = 0; l <= k; ++l) {
            ddc acc(dd(0.0), dd(0.0));
            for (int j = 0; j < m; ++j) acc = acc + conj(rows[l][j]) * rows[k][j];
            acc = ddc(acc.re * h, acc.im * h);
            if (k == l) acc.re -= dd(1.0);
            dd d = dd_sqrt(norm2(acc));
            if (d > res) res = d;
        }
    }
    b.orthonormality_residual = res.to_double();
}

} // namespace detail

inline OrthonormalBasis build_basis(const Potential& p, int n, const PeriodicGrid& grid,
                                    PrecisionMode mode = PrecisionMode::Double) {
    if (n < 1) throw ConfigInvalid("basis order n must be >= 1");
    if (grid.size() < 16 * (n + 1))
        throw ConfigInvalid("grid too coarse: M=" + std::to_string(grid.size()) +
                            " < 16*(n+1) for n=" + std::to_string(n));
    check_precision(p, n, mode);

    OrthonormalBasis b;
    b.n = n;
    b.grid = grid;
    b.mode = mode;
    b.dynamic_range = dynamic_range(p, n);

    if (mode == PrecisionMode::Double) detail::build_double(p, n, b);
    else detail::build_extended(p, n, b);

    if (b.orthonormality_residual > 1e-8)
        throw OrthogonalityLoss("Gram residual " + std::to_string(b.orthonormality_residual) +
                                " after re-orthogonalization (n=" + std::to_string(n) + ")");
    return b;
}

// r_{k,j} = integral of e^{i lambda} psi_k conj(psi_j); upper Hessenberg with
// unit row norms (multiplication by e^{i lambda} is an isometry).
struct RecursionMatrix {
    int n = 0;                             // rows k = 0..n-1, columns j = 0..n
    std::vector<std::vector<cdouble>> r;

    cdouble at(int k, int j) const { return r[k][j]; }
};

inline RecursionMatrix recursion_matrix(const OrthonormalBasis& b) {
    const PeriodicGrid& g = b.grid;
    const int m = g.size();
    const int n = b.n;
    RecursionMatrix rm;
    rm.n = n;
    rm.r.assign(n, std::vector<cdouble>(n + 1));

    std::vector<cdouble> phase(m);
    for (int j = 0; j < m; ++j) phase[j] = std::polar(1.0, g.node(j));

    for (int k = 0; k < n; ++k) {
        std::vector<cdouble> shifted(m);
        for (int j = 0; j < m; ++j) shifted[j] = phase[j] * b.psi[k][j];
        for (int l = 0; l <= n; ++l) {
            cdouble acc(0.0, 0.0);
            for (int j = 0; j < m; ++j) acc += shifted[j] * std::conj(b.psi[l][j]);
            rm.r[k][l] = acc * g.step();
        }
    }
    return rm;
}

// Loose cross-check route for the leading coefficient: the k-th Fourier
// coefficient of psi_k e^{+nV/2}. Cancellation-limited; keep tolerances wide.
inline double gamma_via_fourier(const OrthonormalBasis& b, int k) {
    const PeriodicGrid& g = b.grid;
    const int m = g.size();
    cdouble acc(0.0, 0.0);
    for (int j = 0; j < m; ++j) {
        const double inv_w = 1.0 / b.weight_sqrt[j];
        acc += b.psi[k][j] * inv_w * std::polar(1.0, -k * g.node(j));
    }
    return (acc * g.step()).real() / kTwoPi;
}

} // namespace ump
