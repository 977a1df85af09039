// Acceptance gate: nine end-to-end checks combining exact identities,
// closed-form oracles, convergence trends, sampler statistics, and the CLI
// contract. Each check prints exactly one PASS/FAIL line; the process exits
// nonzero if any check fails.

#include <cmath>
#include <complex>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <string>
#include <sys/wait.h>
#include <vector>

#include <json.hpp>

#include "ump/cache.hpp"
#include "ump/sampler.hpp"
#include "ump/universality.hpp"

using namespace ump;
namespace fs = std::filesystem;

namespace {

int g_failures = 0;

void report(int idx, const char* title, bool ok, const std::string& detail) {
    std::printf("%s  [%d] %s: %s\n", ok ? "PASS" : "FAIL", idx, title, detail.c_str());
    std::fflush(stdout);
    if (!ok) ++g_failures;
}

std::string fmt(double x) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.3g", x);
    return buf;
}

// ---- 1: exact identity suite ---------------------------------------------

void criterion_identities() {
    bool ok = true;
    std::string msg;
    const std::vector<double> probe{-2.4, -1.1, 0.4, 1.3, 2.0};
    PeriodicGrid g(4096);
    for (const Potential& p : {Potential::zero(), Potential::cosine(0.5)}) {
        for (int n : {16, 32}) {
            OrthonormalBasis b = build_basis(p, n, g);
            const double kort = detail::gram_residual(b);
            KernelEvaluator ev(std::move(b));

            double kcb = 0.0;
            for (int a = 0; a < 10; ++a)
                for (int c = 0; c < 10; ++c) {
                    const double la = -kPi + kTwoPi * (a + 0.13) / 10.0;
                    const double mu = -kPi + kTwoPi * (c + 0.57) / 10.0;
                    kcb = std::max(kcb, std::norm(ev.cd(la, mu)) -
                                            ev.cd(la, la).real() * ev.cd(mu, mu).real());
                }

            double crdr = 0.0, variation = 0.0, id2_half = 0.0, id2_one = 0.0;
            for (double lam : probe) {
                KernelIdentityRecord r = ev.identity_residuals(lam);
                crdr = std::max(crdr, r.crdr_residual);
                variation = std::max(variation, r.variation_lhs);
                id2_half = std::max(id2_half, r.intdist2_lhs_half);
                id2_one = std::max(id2_one, r.intdist2_lhs_one);
            }

            RecursionMatrix rm = recursion_matrix(ev.basis());
            double hess = 0.0, row_dev = 0.0;
            for (int k = 0; k < rm.n; ++k) {
                double rn = 0.0;
                for (int j = 0; j <= rm.n; ++j) {
                    rn += std::norm(rm.r[k][j]);
                    if (j > k + 1) hess = std::max(hess, std::abs(rm.r[k][j]));
                }
                row_dev = std::max(row_dev, std::abs(rn - 1.0));
            }

            double dr = 0.0;
            for (double lam : probe)
                dr = std::max(dr, std::abs(drho2_residual(ev, p, g.nearest_index(lam))));

            const bool here = kort <= 1e-7 * n && kcb <= 1e-10 && crdr <= 1e-9 &&
                              variation <= 2.0 + 1e-9 && id2_half <= 8.0 + 1e-9 &&
                              id2_one <= 2.0 + 1e-9 && hess <= 1e-10 &&
                              row_dev <= 1e-10 && dr <= std::max(1e-6 * n * n, 1e-4);
            ok = ok && here;
            if (!here)
                msg += p.descriptor() + " n=" + std::to_string(n) + " kort=" + fmt(kort) +
                          " kcb=" + fmt(kcb) + " crdr=" + fmt(crdr) + " var=" + fmt(variation) +
                          " hess=" + fmt(hess) + " dr=" + fmt(dr) + "; ";
            else
                msg = "worst crdr=" + fmt(crdr) + " kcb=" + fmt(kcb) + " dr=" + fmt(dr);
        }
    }
    report(1, "reproducing-kernel identity suite", ok, msg);
}

// ---- 2: flat-weight closed forms ------------------------------------------

void criterion_flat_forms() {
    const int n = 50;
    PeriodicGrid g(4096);
    OrthonormalBasis b = build_basis(Potential::zero(), n, g);
    const double inv = 1.0 / std::sqrt(kTwoPi);

    double psi_err = 0.0;
    for (int k = 0; k <= n; ++k)
        for (int j = 0; j < g.size(); ++j) {
            const double lam = g.node(j);
            psi_err = std::max(psi_err,
                               std::abs(b.psi[k][j] - inv * cdouble(std::cos(k * lam),
                                                                    std::sin(k * lam))));
        }

    KernelEvaluator ev(std::move(b));
    double rho_err = 0.0;
    for (int j = 0; j < g.size(); ++j)
        rho_err = std::max(rho_err, std::abs(ev.rho_at(g.node(j)) - 1.0 / kTwoPi));

    auto dirichlet = [n](double lam, double mu) -> cdouble {
        const double u = lam - mu;
        if (std::abs(std::sin(0.5 * u)) < 1e-12) return cdouble(n / kTwoPi, 0.0);
        const cdouble phase(std::cos(0.5 * (n - 1) * u), std::sin(0.5 * (n - 1) * u));
        return phase * (std::sin(0.5 * n * u) / (kTwoPi * std::sin(0.5 * u)));
    };
    double cd_err = 0.0;
    for (int a = 0; a < 4; ++a)
        for (int c = 0; c < 3; ++c) {
            const double lam = -2.9 + 1.7 * a + 0.0091;
            const double mu = -2.3 + 1.9 * c + 0.0047;
            cd_err = std::max(cd_err, std::abs(ev.cd(lam, mu) - dirichlet(lam, mu)));
        }
    cd_err = std::max(cd_err, std::abs(ev.cd(0.7, 0.7) - dirichlet(0.7, 0.7)));

    EquilibriumDensity eq = solve_density(Potential::zero(), g);
    SineErrorRecord sine = sine_kernel_error(ev, eq, 0.5, 2.0, 21);

    const bool ok = psi_err <= 1e-13 && rho_err <= 1e-10 && cd_err <= 1e-10 &&
                    sine.sup_error <= 0.05;
    report(2, "flat-weight closed forms", ok,
           "psi=" + fmt(psi_err) + " rho=" + fmt(rho_err) + " kernel=" + fmt(cd_err) +
               " sine=" + fmt(sine.sup_error));
}

// ---- 3: equilibrium oracle -------------------------------------------------

void criterion_equilibrium() {
    PeriodicGrid g(4096);
    double sup = 0.0;
    for (double t : {0.25, 0.5, 0.9}) {
        EquilibriumDensity eq = solve_density(Potential::cosine(t), g);
        for (int j = 0; j < g.size(); ++j) {
            const double exact = (1.0 + t * std::cos(g.node(j))) / kTwoPi;
            sup = std::max(sup, std::abs(eq.rho[j] - exact));
        }
    }
    EquilibriumDensity eq = solve_density(Potential::cosine(0.5), g);
    const double spot0 = std::abs(eq.two_i_q[g.size() / 2] - 1.25); // mu = 0
    const double spot_pi = std::abs(eq.two_i_q[0] + 0.75);          // mu = -pi == pi

    const bool ok = sup <= 1e-6 && spot0 <= 1e-8 && spot_pi <= 1e-8;
    report(3, "equilibrium density oracle", ok,
           "sup=" + fmt(sup) + " spot0=" + fmt(spot0) + " spot_pi=" + fmt(spot_pi));
}

// ---- 4: density convergence trend ------------------------------------------

void criterion_density_trend() {
    ExperimentRecord rec =
        density_convergence(Potential::cosine(0.5), {12, 24, 48}, -kPi / 2, kPi / 2,
                            PrecisionMode::Extended);
    const bool decreasing = rec.errors[0] > rec.errors[1] && rec.errors[1] > rec.errors[2];
    const bool ok = decreasing && rec.rate_defined && rec.fitted_rate <= -0.15;
    report(4, "density convergence trend", ok,
           "errors=" + fmt(rec.errors[0]) + "," + fmt(rec.errors[1]) + "," +
               fmt(rec.errors[2]) + " rate=" + fmt(rec.fitted_rate));
}

// ---- 5: kernel universality trend ------------------------------------------

void criterion_kernel_trend(const KernelEvaluator& ev24, const KernelEvaluator& ev48,
                            const EquilibriumDensity& eq) {
    const double lam0 = kPi / 2;
    SineErrorRecord s24 = sine_kernel_error(ev24, eq, lam0, 2.0, 21);
    SineErrorRecord s48 = sine_kernel_error(ev48, eq, lam0, 2.0, 21);

    const std::vector<double> xs2{0.0, 0.7};
    const std::vector<double> xs3{0.0, 0.4, 0.9};
    const double d2_24 = determinant_correlation_error(ev24, lam0, xs2);
    const double d2_48 = determinant_correlation_error(ev48, lam0, xs2);
    const double d3_24 = determinant_correlation_error(ev24, lam0, xs3);
    const double d3_48 = determinant_correlation_error(ev48, lam0, xs3);

    const bool ok = s48.sup_error < s24.sup_error && s24.dephased_imag_max <= 1e-8 &&
                    s48.dephased_imag_max <= 1e-8 && d2_48 < d2_24 && d3_48 < d3_24;
    report(5, "sine-kernel and determinant trend", ok,
           "sine " + fmt(s24.sup_error) + "->" + fmt(s48.sup_error) + " imag=" +
               fmt(std::max(s24.dephased_imag_max, s48.dephased_imag_max)) + " det2 " +
               fmt(d2_24) + "->" + fmt(d2_48) + " det3 " + fmt(d3_24) + "->" + fmt(d3_48));
}

// ---- 6: Fourier profile ------------------------------------------------------

void criterion_fourier() {
    PeriodicGrid g(4096);
    bool ok = true;
    std::string detail;
    struct Case {
        Potential p;
        PrecisionMode mode;
        double lam0;
    };
    for (const Case& c : {Case{Potential::zero(), PrecisionMode::Double, 0.0},
                          Case{Potential::cosine(0.5), PrecisionMode::Extended, kPi / 2}}) {
        KernelEvaluator ev(build_basis(c.p, 64, g, c.mode));
        EquilibriumDensity eq = solve_density(c.p, g);
        FourierProfile fp = fourier_profile(ev, c.lam0, std::log(64.0));
        const double target = kTwoPi * eq.rho[g.nearest_index(c.lam0)];
        const double integral_err = std::abs(fp.khat_integral() - target) / target;
        const bool here = fp.clip_error() <= 0.15 * fp.p0 && integral_err <= 0.10 &&
                          fp.antisymmetry_defect() <= 0.1 * fp.p0;
        ok = ok && here;
        detail += c.p.descriptor() + " clip=" + fmt(fp.clip_error() / fp.p0) +
                  "p0 int_err=" + fmt(integral_err) + " asym=" +
                  fmt(fp.antisymmetry_defect() / fp.p0) + "p0; ";
    }
    report(6, "Fourier profile of the rescaled kernel", ok, detail);
}

// ---- 7: resolvent diagnostics decay -----------------------------------------

void criterion_diagnostics(const KernelEvaluator& ev48, const EquilibriumDensity& eq) {
    const Potential p = Potential::cosine(0.5);
    PeriodicGrid g(4096);
    KernelEvaluator ev12(build_basis(p, 12, g));

    bool ok = true;
    std::string detail;
    for (int j : {1024, 1536, 2560, 2816, 3072}) { // +-pi/2, +-pi/4, 3pi/8
        const double lam = g.node(j);
        const cdouble z12(lam, std::pow(12.0, -4.0 / 9.0));
        const cdouble z48(lam, std::pow(48.0, -4.0 / 9.0));
        const double sq12 = std::abs(finite_n_resolvent(ev12, p, eq, z12).square_residual);
        const double sq48 = std::abs(finite_n_resolvent(ev48, p, eq, z48).square_residual);
        const double d12 = std::abs(vp_diagnostic(ev12, p, lam));
        const double d48 = std::abs(vp_diagnostic(ev48, p, lam));
        const bool here = sq48 < sq12 && d48 < d12;
        ok = ok && here;
        if (!here)
            detail += "node " + std::to_string(j) + " sq " + fmt(sq12) + "->" + fmt(sq48) +
                      " D " + fmt(d12) + "->" + fmt(d48) + "; ";
        else if (j == 3072)
            detail = "at pi/2: sq " + fmt(sq12) + "->" + fmt(sq48) + ", D " + fmt(d12) +
                     "->" + fmt(d48);
    }
    report(7, "resolvent diagnostics decay", ok, detail);
}

// ---- 8: sampler validation ----------------------------------------------------

void criterion_sampler() {
    PeriodicGrid g(4096);
    const int n = 16, trials = 10000, bins = 32;
    bool ok = true;
    std::string detail;
    for (const Potential& p : {Potential::zero(), Potential::cosine(0.5)}) {
        KernelEvaluator ev(build_basis(p, n, g));

        std::vector<EigenvalueSample> batch;
        batch.reserve(trials);
        bool sized = true;
        for (int i = 0; i < trials; ++i) {
            batch.push_back(sample_eigenvalues(ev, 20260825, i));
            sized = sized && static_cast<int>(batch.back().angles.size()) == n;
        }

        EmpiricalStats st = empirical_stats(batch, bins);
        double worst_dev = 0.0;
        for (int b = 0; b < bins; ++b) {
            const double lo = st.edges[b], hi = st.edges[b + 1];
            double avg = 0.0;
            for (int q = 0; q < 8; ++q) avg += ev.rho_at(lo + (hi - lo) * (q + 0.5) / 8.0);
            avg /= 8.0;
            worst_dev = std::max(worst_dev, std::abs(st.one_point[b] - avg) /
                                                st.one_point_se[b]);
        }

        EigenvalueSample a = sample_eigenvalues(ev, 20260825, 7);
        EigenvalueSample b2 = sample_eigenvalues(ev, 20260825, 7);
        const bool deterministic = a.angles == b2.angles && a.angles == batch[7].angles;

        const bool here = sized && worst_dev <= 4.0 && deterministic;
        ok = ok && here;
        detail += p.descriptor() + " max_dev=" + fmt(worst_dev) + "se" +
                  (deterministic ? "" : " NONDETERMINISTIC") + (sized ? "" : " BAD_SIZE") +
                  "; ";
    }
    report(8, "determinantal sampler statistics", ok, detail);
}

// ---- 9: CLI contract -----------------------------------------------------------

int run_cli(const std::string& bin, const fs::path& cfg) {
    const std::string cmd = "'" + bin + "' '" + cfg.string() + "' >/dev/null 2>&1";
    const int status = std::system(cmd.c_str());
    if (status == -1 || !WIFEXITED(status)) return -1;
    return WEXITSTATUS(status);
}

fs::path write_json(const fs::path& dir, const std::string& name, const nlohmann::json& doc) {
    fs::path p = dir / name;
    std::ofstream out(p, std::ios::trunc);
    out << doc.dump(2);
    return p;
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    return std::string(std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>());
}

void criterion_cli() {
    std::string bin;
    if (const char* env = std::getenv("UMP_CLI_PATH"); env && *env) bin = env;
#ifdef UMP_CLI_BIN
    if (bin.empty()) bin = UMP_CLI_BIN;
#endif
    if (bin.empty()) {
        report(9, "command-line contract", false, "no CLI binary configured");
        return;
    }
    fs::path dir = fs::temp_directory_path() / "ump_acceptance_cli";
    fs::remove_all(dir);
    fs::create_directories(dir);
    auto cosine = nlohmann::json{{"kind", "cosine"}, {"t", 0.5}};

    nlohmann::json ok_cfg{{"command", "density"},
                          {"potential", cosine},
                          {"n_values", {8}},
                          {"out_dir", (dir / "out").string()}};
    const int c0a = run_cli(bin, write_json(dir, "ok.json", ok_cfg));
    const std::string csv1 = slurp(dir / "out" / "density_n8.csv");
    const int c0b = run_cli(bin, write_json(dir, "ok.json", ok_cfg));
    const std::string csv2 = slurp(dir / "out" / "density_n8.csv");
    const bool idempotent = !csv1.empty() && csv1 == csv2;

    nlohmann::json bad = ok_cfg;
    bad["command"] = "explode";
    const int c2 = run_cli(bin, write_json(dir, "bad.json", bad));

    nlohmann::json prec{{"command", "basis"},
                        {"potential", cosine},
                        {"n_values", {64}},
                        {"precision", "double"},
                        {"out_dir", (dir / "o3").string()}};
    const int c3 = run_cli(bin, write_json(dir, "prec.json", prec));

    nlohmann::json clamp{{"command", "equilibrium"},
                         {"potential", {{"kind", "cosine"}, {"t", 1.5}}},
                         {"n_values", {8}},
                         {"out_dir", (dir / "o4").string()}};
    const int c4 = run_cli(bin, write_json(dir, "clamp.json", clamp));

    nlohmann::json vid_bad{{"command", "verify-identities"},
                           {"potential", cosine},
                           {"n_values", {8}},
                           {"perturb", 1e-6},
                           {"out_dir", (dir / "o5").string()}};
    const int c5 = run_cli(bin, write_json(dir, "vid_bad.json", vid_bad));

    nlohmann::json vid_zero{{"command", "verify-identities"},
                            {"potential", {{"kind", "zero"}}},
                            {"n_values", {24}},
                            {"out_dir", (dir / "o6").string()}};
    const int v0 = run_cli(bin, write_json(dir, "vid_zero.json", vid_zero));

    nlohmann::json vid_cos = vid_zero;
    vid_cos["potential"] = cosine;
    vid_cos["out_dir"] = (dir / "o7").string();
    const int v1 = run_cli(bin, write_json(dir, "vid_cos.json", vid_cos));

    const bool ok = c0a == 0 && c0b == 0 && idempotent && c2 == 2 && c3 == 3 && c4 == 4 &&
                    c5 == 5 && v0 == 0 && v1 == 0;
    report(9, "command-line contract", ok,
           "codes " + std::to_string(c0a) + "/" + std::to_string(c2) + "/" +
               std::to_string(c3) + "/" + std::to_string(c4) + "/" + std::to_string(c5) +
               " idempotent=" + (idempotent ? "yes" : "NO") + " verify n=24: " +
               std::to_string(v0) + "," + std::to_string(v1));
}

} // namespace

int main() {
    std::printf("acceptance suite\n");
    try {
        criterion_identities();
        criterion_flat_forms();
        criterion_equilibrium();
        criterion_density_trend();

        // shared heavy artifacts for checks 5 and 7
        PeriodicGrid g(4096);
        const Potential cos05 = Potential::cosine(0.5);
        EquilibriumDensity eq = solve_density(cos05, g);
        KernelEvaluator ev24(build_basis(cos05, 24, g, PrecisionMode::Extended));
        KernelEvaluator ev48(build_basis(cos05, 48, g, PrecisionMode::Extended));
        criterion_kernel_trend(ev24, ev48, eq);
        criterion_fourier();
        criterion_diagnostics(ev48, eq);

        criterion_sampler();
        criterion_cli();
    } catch (const std::exception& e) {
        std::printf("FAIL  [fatal] unhandled exception: %s\n", e.what());
        return 99;
    }
    std::printf("%d of 9 criteria passed\n", 9 - g_failures);
    return g_failures == 0 ? 0 : 1;
}
