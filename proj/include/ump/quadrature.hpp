#pragma once

#include <cmath>
#include <complex>
#include <vector>

#include "ump/fft.hpp"
#include "ump/grid.hpp"

namespace ump {

// h * sum f_j: the rectangle rule, spectrally accurate on periodic data.
inline cdouble integrate(const PeriodicGrid& g, const std::vector<cdouble>& f) {
    cdouble s(0.0, 0.0);
    for (const auto& v : f) s += v;
    return s * g.step();
}

inline double integrate(const PeriodicGrid& g, const std::vector<double>& f) {
    double s = 0.0;
    for (double v : f) s += v;
    return s * g.step();
}

// Fourth-order centered first derivative of periodic samples at node j.
inline double derivative4(const PeriodicGrid& g, const std::vector<double>& f, int j) {
    const int m = g.size();
    auto at = [&](int k) { return f[g.wrap(k)]; };
    (void)m;
    return (8.0 * (at(j + 1) - at(j - 1)) - (at(j + 2) - at(j - 2))) / (12.0 * g.step());
}

// Principal value of int cot(s/2) f(mu + s) ds over one period, mu = node j0.
//
// Singularity subtraction: v.p. int cot(s/2) (f(mu+s) - f(mu)) ds, where the
// subtracted constant contributes nothing because sum_{k!=0} cot(k h/2) = 0
// exactly on an even grid (cot is odd around both 0 and pi). The s = 0 node
// carries the integrand's limit 2 f'(mu), with f' from a 4th-order stencil
// (a 2nd-order stencil leaves ~1e-7 errors against the Hilbert table at
// M = 4096; 4th order reaches ~1e-12).
inline double pv_cot(const PeriodicGrid& g, const std::vector<double>& f, int j0) {
    const int m = g.size();
    const double h = g.step();
    double acc = 0.0;
    for (int k = 1; k < m; ++k) {
        double cot = 1.0 / std::tan(0.5 * k * h);
        if (k == m / 2) cot = 0.0; // cot(pi/2) exactly
        acc += cot * f[g.wrap(j0 + k)];
    }
    return h * acc + 2.0 * h * derivative4(g, f, j0);
}

inline double pv_cot(const PeriodicGrid& g, const std::vector<double>& f, double mu) {
    return pv_cot(g, f, g.node_index(mu));
}

// The same principal-value operator applied at every node at once, evaluated
// as a circular correlation through the FFT of the discrete scheme's own
// kernel. This is algebraically identical to pv_cot node by node (agreement
// ~1e-14) and, unlike the bandlimited multiplier 2*pi*i*sign(m), is stable
// inside fixed-point loops: the exact symbol keeps the discrete commutator
// cancellations of the scheme intact at the Nyquist edge.
class HilbertOperator {
public:
    explicit HilbertOperator(const PeriodicGrid& g) : m_(g.size()) {
        const double h = g.step();
        std::vector<cdouble> c(m_, cdouble(0.0, 0.0));
        for (int k = 1; k < m_; ++k) {
            double cot = (k == m_ / 2) ? 0.0 : 1.0 / std::tan(0.5 * k * h);
            c[k] = cdouble(h * cot, 0.0);
        }
        // Fold the 2h f'(mu) term (4th-order stencil) into the kernel.
        c[1] += 16.0 / 12.0;
        c[m_ - 1] -= 16.0 / 12.0;
        c[2] -= 2.0 / 12.0;
        c[m_ - 2] += 2.0 / 12.0;
        fft(c);
        symbol_.resize(m_);
        for (int k = 0; k < m_; ++k) symbol_[k] = std::conj(c[k]);
    }

    std::vector<double> apply(const std::vector<double>& f) const {
        std::vector<cdouble> a(m_);
        for (int j = 0; j < m_; ++j) a[j] = cdouble(f[j], 0.0);
        fft(a);
        for (int k = 0; k < m_; ++k) a[k] *= symbol_[k];
        ifft(a);
        std::vector<double> out(m_);
        for (int j = 0; j < m_; ++j) out[j] = a[j].real();
        return out;
    }

private:
    int m_;
    std::vector<cdouble> symbol_;
};

// Herglotz transform F[g](z) = int (e^{i*lambda} + e^{i*z}) / (e^{i*lambda} - e^{i*z}) g dlambda.
// Requires |Im z| >= 10h so the kernel is resolved by the grid.
inline cdouble herglotz(const PeriodicGrid& g, const std::vector<double>& samples, cdouble z) {
    if (std::abs(z.imag()) < 10.0 * g.step())
        throw TooCloseToAxis("herglotz needs |Im z| >= 10*h = " + std::to_string(10.0 * g.step()));
    const cdouble eiz = std::exp(cdouble(0.0, 1.0) * z);
    cdouble acc(0.0, 0.0);
    for (int j = 0; j < g.size(); ++j) {
        const cdouble eil = std::polar(1.0, g.node(j));
        acc += (eil + eiz) / (eil - eiz) * samples[j];
    }
    return acc * g.step();
}

} // namespace ump
