#include <catch2/catch_amalgamated.hpp>

#include <algorithm>
#include <cmath>
#include <vector>

#include "ump/universality.hpp"

using namespace ump;

TEST_CASE("rate fitting recovers exact power laws and rejects noise") {
    REQUIRE(fit_rate({1e-2, 2.5e-3, 6.25e-4}, {10, 20, 40}) == Catch::Approx(-2.0).margin(1e-12));
    REQUIRE(fit_rate({1e-1, 1e-2}, {10, 100}) == Catch::Approx(-1.0).margin(1e-12));
    REQUIRE_THROWS_AS(fit_rate({1e-2, 1e-12}, {10, 20}), DegenerateFit);
    REQUIRE_THROWS_AS(fit_rate({1e-2}, {10}), DegenerateFit);
    REQUIRE_THROWS_AS(fit_rate({1e-2, 1e-3}, {10}), ConfigInvalid);
    REQUIRE_THROWS_AS(fit_rate({1e-2, 1e-3}, {10, 10}), DegenerateFit);
}

TEST_CASE("flat-weight density errors sit on the floor and the rate is undefined") {
    ExperimentRecord rec =
        density_convergence(Potential::zero(), {8, 16}, -kPi / 2, kPi / 2);
    for (double e : rec.errors) REQUIRE(e <= 1e-10);
    REQUIRE_FALSE(rec.rate_defined);
    REQUIRE(rec.metric == "density_sup_error");
}

TEST_CASE("cosine density errors shrink fast with n") {
    ExperimentRecord rec =
        density_convergence(Potential::cosine(0.5), {12, 24}, -kPi / 2, kPi / 2);
    REQUIRE(rec.errors.size() == 2);
    // frozen magnitudes from an independent high-resolution run
    REQUIRE(rec.errors[0] == Catch::Approx(3.78e-6).epsilon(0.25));
    REQUIRE(rec.errors[1] == Catch::Approx(6.77e-9).epsilon(0.25));
    REQUIRE(rec.errors[1] < rec.errors[0]);
    REQUIRE(rec.rate_defined);
    REQUIRE(rec.fitted_rate <= -0.15);
}

TEST_CASE("density sweep validates its n list") {
    REQUIRE_THROWS_AS(density_convergence(Potential::zero(), {}, -1.0, 1.0), ConfigInvalid);
    REQUIRE_THROWS_AS(density_convergence(Potential::zero(), {16, 8}, -1.0, 1.0),
                      ConfigInvalid);
}

TEST_CASE("experiment records survive a JSON round trip losslessly") {
    ExperimentRecord rec;
    rec.potential = "cosine(t=0.5)";
    rec.n_values = {12, 24, 48};
    rec.lambda0 = 0.1 + 0.2; // deliberately non-representable sum
    rec.metric = "sine_sup";
    rec.errors = {3.7813e-6, 6.77e-9, 1.0 / 3.0};
    rec.fitted_rate = -9.1234567890123456;
    rec.rate_defined = true;
    rec.grid_m = 4096;
    rec.precision = "double";
    rec.timestamp = "2026-01-01T00:00:00Z";

    const std::string blob = rec.to_json().dump();
    ExperimentRecord back = ExperimentRecord::from_json(nlohmann::json::parse(blob));
    REQUIRE(back.potential == rec.potential);
    REQUIRE(back.n_values == rec.n_values);
    REQUIRE(back.lambda0 == rec.lambda0);
    REQUIRE(back.errors == rec.errors);
    REQUIRE(back.fitted_rate == rec.fitted_rate);
    REQUIRE(back.rate_defined == rec.rate_defined);
    REQUIRE(back.grid_m == rec.grid_m);
}

TEST_CASE("flat-weight rescaled kernel is near the sine kernel") {
    PeriodicGrid g(4096);
    Potential p = Potential::zero();
    EquilibriumDensity eq = solve_density(p, g);
    KernelEvaluator ev(build_basis(p, 50, g));
    SineErrorRecord rec = sine_kernel_error(ev, eq, 0.0, 2.0, 21);
    REQUIRE(rec.sup_error <= 0.05);
    REQUIRE(rec.diagonal_error <= 1e-12);
    REQUIRE(rec.dephased_imag_max <= 1e-8);
}

TEST_CASE("sine error is symmetric under reflection of the center") {
    PeriodicGrid g(4096);
    Potential p = Potential::cosine(0.5);
    EquilibriumDensity eq = solve_density(p, g);
    KernelEvaluator ev(build_basis(p, 24, g));
    SineErrorRecord a = sine_kernel_error(ev, eq, kPi / 2, 2.0, 15);
    SineErrorRecord b = sine_kernel_error(ev, eq, -kPi / 2, 2.0, 15);
    REQUIRE(a.sup_error == Catch::Approx(b.sup_error).margin(1e-10));
    // frozen band for the n = 24 error at this center
    REQUIRE(a.sup_error > 0.2);
    REQUIRE(a.sup_error < 0.3);
}

TEST_CASE("sine error refuses centers outside the bulk") {
    PeriodicGrid g(4096);
    Potential p = Potential::cosine(0.99);
    EquilibriumDensity eq = solve_density(p, g, 1e-9, 4000);
    KernelEvaluator ev(build_basis(p, 24, g));
    REQUIRE_THROWS_AS(sine_kernel_error(ev, eq, kPi, 2.0, 11), OutOfWindow);
}

TEST_CASE("rescaled kernel equation holds to the window error budget") {
    PeriodicGrid g(4096);
    KernelEvaluator ev(build_basis(Potential::zero(), 25, g));
    const double L = std::log(25.0);
    REQUIRE(kernel_equation_residual(ev, 0.0, {0.0}, 0.0, L) <= 0.1);
    REQUIRE(kernel_equation_residual(ev, 0.0, {0.0, 1.0, -1.0, 2.5}, 0.0, L) <= 0.5);
    REQUIRE_THROWS_AS(kernel_equation_residual(ev, 0.0, {L + 1.0}, 0.0, L), OutOfWindow);
    REQUIRE_THROWS_AS(kernel_equation_residual(ev, 0.0, {0.0}, 0.0, 2.0 * L), ConfigInvalid);
}

TEST_CASE("kernel-equation residual median improves near the window edge") {
    PeriodicGrid g(4096);
    KernelEvaluator a(build_basis(Potential::zero(), 25, g));
    KernelEvaluator b(build_basis(Potential::zero(), 50, g));
    const std::vector<double> xs{0.0, 2.5, -2.5, 2.75, -2.75, 3.0, -3.0};
    auto median_of = [&xs](const KernelEvaluator& ev, double L) {
        std::vector<double> vals;
        for (double x : xs) vals.push_back(kernel_equation_residual(ev, 0.0, {x}, 0.0, L));
        std::sort(vals.begin(), vals.end());
        return vals[vals.size() / 2];
    };
    const double med_a = median_of(a, std::log(25.0));
    const double med_b = median_of(b, std::log(50.0));
    REQUIRE(med_b < med_a);
}

TEST_CASE("fourier profile of the flat model approaches the clip shape") {
    PeriodicGrid g(4096);
    KernelEvaluator ev(build_basis(Potential::zero(), 64, g));
    FourierProfile fp = fourier_profile(ev, 0.0, std::log(64.0));
    REQUIRE(fp.p0 == Catch::Approx(0.5).margin(1e-10)); // pi * (1/2pi)
    REQUIRE(fp.clip_error() <= 0.15 * fp.p0);
    REQUIRE(fp.antisymmetry_defect() <= 0.1 * fp.p0);
    REQUIRE(fp.khat_integral() == Catch::Approx(kTwoPi * ev.rho_at(0.0)).epsilon(0.10));
    REQUIRE(fp.monotonicity_defect() <= 5e-3);
}

TEST_CASE("determinant correlations approach sine-kernel determinants") {
    PeriodicGrid g(4096);
    Potential p = Potential::cosine(0.5);
    KernelEvaluator e24(build_basis(p, 24, g));
    KernelEvaluator e48(build_basis(p, 48, g));
    const double d2_24 = determinant_correlation_error(e24, kPi / 2, {0.0, 0.7});
    const double d2_48 = determinant_correlation_error(e48, kPi / 2, {0.0, 0.7});
    const double d3_24 = determinant_correlation_error(e24, kPi / 2, {0.0, 0.4, 0.9});
    const double d3_48 = determinant_correlation_error(e48, kPi / 2, {0.0, 0.4, 0.9});
    REQUIRE(d2_48 < d2_24);
    REQUIRE(d3_48 < d3_24);
    REQUIRE(d2_24 <= 0.2);
    REQUIRE(d3_24 <= 0.1);
}

TEST_CASE("dephased kernel depends mainly on the coordinate difference") {
    PeriodicGrid g(4096);
    // flat weight: exactly translation invariant after dephasing
    KernelEvaluator flat(build_basis(Potential::zero(), 32, g));
    REQUIRE(difference_kernel_defect(flat, 0.0) <= 1e-10);
    // interacting weight: the defect shrinks with n
    Potential p = Potential::cosine(0.5);
    KernelEvaluator e24(build_basis(p, 24, g));
    KernelEvaluator e48(build_basis(p, 48, g));
    REQUIRE(difference_kernel_defect(e48, kPi / 2) < difference_kernel_defect(e24, kPi / 2));
}
