// Acceptance suite: one pass/fail line per criterion, nonzero exit on any
// failure. Every quantitative target comes from an in-repo oracle or a pinned
// formula; tolerances are fixed here, not tuned at runtime.

#include <chrono>
#include <cmath>
#include <cstdarg>
#include <cstdio>
#include <random>
#include <vector>

#include "landau/commands.hpp"
#include "landau/diagnostics.hpp"
#include "landau/solver.hpp"
#include "landau/verification.hpp"

#include "equality_branch.hpp"

using namespace landau;
using Clock = std::chrono::steady_clock;

namespace {

int g_failures = 0;

void report(int id, const char* label, bool pass, const std::string& detail) {
    std::printf("[%s] C%02d %-34s %s\n", pass ? "PASS" : "FAIL", id, label, detail.c_str());
    std::fflush(stdout);
    if (!pass) ++g_failures;
}

std::string fmt(const char* f, ...) {
    char buf[512];
    va_list args;
    va_start(args, f);
    std::vsnprintf(buf, sizeof(buf), f, args);
    va_end(args);
    return buf;
}

double seconds_since(Clock::time_point t0) {
    return std::chrono::duration<double>(Clock::now() - t0).count();
}

PhaseGrid homogeneous(int n, double l) { return {SpatialGrid(0, 1, 1.0), VelocityGrid(n, l)}; }

DistributionField two_bumps(const PhaseGrid& g, double speed = 1.5, double width = 0.8) {
    DistributionField f(g);
    for (std::size_t ix = 0; ix < g.space.cells(); ++ix)
        for (std::size_t iv = 0; iv < g.velocity.size(); ++iv) {
            Vec3 v = g.velocity.velocity(iv);
            f.at(ix, iv) = std::exp(-norm2(v - Vec3{speed, 0, 0}) / (width * width)) +
                           std::exp(-norm2(v + Vec3{speed, 0, 0}) / (width * width));
        }
    return f;
}

SolverConfig quiet_config(double gamma) {
    SolverConfig cfg;
    cfg.gamma = gamma;
    cfg.diag_holder = false;
    cfg.diag_ellipticity = false;
    cfg.positivity = PositivityMode::off;
    return cfg;
}

// --------------------------------------------------------------------------
// C1: fast convolution against the direct-summation oracle
// --------------------------------------------------------------------------
void criterion_1() {
    auto t0 = Clock::now();
    VelocityGrid grid(16, 4.0);
    std::mt19937_64 rng(20240501);
    std::uniform_real_distribution<double> uni(0.0, 1.0);
    double worst = 0;
    for (double gamma : {-3.0, -2.5, -2.0, -1.0, -0.5}) {
        auto kernel = CollisionKernel::standard(gamma);
        auto table = build_kernel_table(grid, kernel);
        auto engine = shared_convolution_engine(grid, kernel);
        auto ws = engine->make_workspace();
        CoefficientField fast(grid, gamma);
        for (int trial = 0; trial < 50; ++trial) {
            std::vector<double> f(grid.size());
            for (auto& v : f) v = uni(rng);
            auto direct = compute_coefficients_direct(f, table);
            engine->compute(f, fast, ws);
            auto cmp = [&](const std::vector<double>& a, const std::vector<double>& b) {
                double s = 0;
                for (double v : b) s = std::max(s, std::abs(v));
                if (s == 0) s = 1;
                for (std::size_t i = 0; i < a.size(); ++i)
                    worst = std::max(worst, std::abs(a[i] - b[i]) / s);
            };
            for (int c = 0; c < 6; ++c) cmp(fast.a[c], direct.a[c]);
            for (int c = 0; c < 3; ++c) cmp(fast.b[c], direct.b[c]);
            cmp(fast.c, direct.c);
        }
    }
    double wall = seconds_since(t0);
    bool pass = worst <= 1e-10 && wall <= 60.0;
    report(1, "kernel oracle equivalence", pass,
           fmt("max scaled error %.2e (<= 1e-10), wall %.1f s (<= 60)", worst, wall));
}

// --------------------------------------------------------------------------
// C2: divergence identities shrink at least 3x from n = 16 to 32
// --------------------------------------------------------------------------
void criterion_2() {
    auto residual_at = [](int n) {
        PhaseGrid pg = homogeneous(n, 4.0);
        auto f = make_maxwellian(pg, 1.0, 1.0);
        auto coeff =
            compute_coefficients_fast(f.slice(0), pg.velocity, CollisionKernel::standard(-1.0));
        return divergence_identity_residuals(coeff);
    };
    auto coarse = residual_at(16);
    auto fine = residual_at(32);
    double rb = coarse.res_b / fine.res_b;
    double rc = coarse.res_c / fine.res_c;
    bool pass = rb >= 3.0 && rc >= 3.0;
    report(2, "divergence identities", pass,
           fmt("ratios b %.2f, c %.2f (>= 3) at n 16->32", rb, rc));
}

// --------------------------------------------------------------------------
// C3: maxwellian stationarity residual shrinks at least 3x under refinement
// --------------------------------------------------------------------------
void criterion_3() {
    auto rate_at = [](int n) {
        PhaseGrid pg = homogeneous(n, 4.0);
        auto f = make_maxwellian(pg, 1.0, 1.0);
        auto cfg = quiet_config(-1.0);
        LandauStepper stepper(pg, cfg);
        auto coeffs = stepper.coefficients(f);
        double dt = 1e-6;
        auto f1 = collision_step(f, coeffs, dt, cfg, f.max_abs());
        double worst = 0;
        for (std::size_t i = 0; i < f.values.size(); ++i)
            worst = std::max(worst, std::abs(f1.values[i] - f.values[i]) / dt);
        return worst;
    };
    double coarse = rate_at(16), fine = rate_at(32);
    bool pass = coarse / fine >= 3.0;
    report(3, "maxwellian stationarity", pass,
           fmt("rate %.3e -> %.3e, ratio %.2f (>= 3)", coarse, fine, coarse / fine));
}

// --------------------------------------------------------------------------
// C4: conservation and entropy monotonicity, 100 divergence-form steps
// --------------------------------------------------------------------------
void criterion_4() {
    auto run_at = [](int n) {
        PhaseGrid pg = homogeneous(n, 4.0);
        auto f = two_bumps(pg);
        auto cfg = quiet_config(-1.0);
        cfg.dt = 4e-5;
        cfg.t_end = 100 * cfg.dt;
        cfg.diag_every = 1;
        return run_simulation(f, cfg);
    };
    auto measure = [](const TrajectoryRecord& traj) {
        double m0 = traj.rows.front().mass_max_x;
        double e0 = traj.rows.front().energy_max_x;
        double mass = 0, energy = 0, dH = -1e300;
        for (std::size_t j = 0; j < traj.rows.size(); ++j) {
            mass = std::max(mass, std::abs(traj.rows[j].mass_max_x - m0) / m0);
            energy = std::max(energy, std::abs(traj.rows[j].energy_max_x - e0) / e0);
            if (j > 0) dH = std::max(dH, traj.rows[j].entropy_max_x - traj.rows[j - 1].entropy_max_x);
        }
        return std::array<double, 3>{mass, energy, dH};
    };
    auto coarse = measure(run_at(16));
    auto fine = measure(run_at(32));
    bool pass = fine[0] <= 1e-12 && fine[2] <= 1e-8 && fine[1] <= 1e-3 && fine[1] < coarse[1];
    report(4, "conservation / entropy", pass,
           fmt("mass %.1e (<= 1e-12), dH/step %.2e (<= 1e-8), energy %.2e (<= 1e-3, was %.2e)",
               fine[0], fine[2], fine[1], coarse[1]));
}

// --------------------------------------------------------------------------
// C5: barrier bisection, fitted constant stability, run-norm domination
// --------------------------------------------------------------------------
void criterion_5() {
    bool pass = true;
    std::string detail;
    for (double gamma : {-2.0, -1.0}) {
        auto fit_at = [&](int n) {
            PhaseGrid pg = homogeneous(n, 4.0);
            auto f = make_maxwellian(pg, 1.0, 1.0);
            LandauStepper stepper(pg, quiet_config(gamma));
            auto coeffs = stepper.coefficients(f);
            double beta = find_supersolution_beta(coeffs, pg, 6.0);
            double K = measured_coefficient_bound(coeffs);
            BarrierSpec spec;
            spec.kind = BarrierSpec::Kind::decay;
            spec.k = 6.0;
            spec.beta = beta;
            double res = barrier_residual(coeffs, spec, pg, 0.0);
            return std::array<double, 3>{beta, K, res};
        };
        auto coarse = fit_at(16);
        auto fine = fit_at(32);
        double c0_coarse = coarse[0] / coarse[1];
        double c0_fine = fine[0] / fine[1];
        double rel = std::abs(c0_fine - c0_coarse) / c0_coarse;
        bool finite = std::isfinite(fine[0]) && fine[0] > 0 && fine[2] >= -1e-9;
        bool stable = rel <= 0.2;

        // measured run norm stays below ||f_in|| e^{beta t} on [0, 0.2]
        PhaseGrid pg = homogeneous(16, 4.0);
        auto f = make_maxwellian(pg, 1.0, 1.0);
        auto cfg = quiet_config(gamma);
        cfg.dt = 2e-4;
        cfg.t_end = 0.2;
        cfg.diag_every = 50;
        auto traj = run_simulation(f, cfg);
        double n0 = weighted_sup_norm(f, 6.0);
        bool dominated = traj.status == RunStatus::completed;
        for (std::size_t j = 0; j < traj.snapshot_times.size(); ++j) {
            double nt = weighted_sup_norm(traj.field_at(j), 6.0);
            if (nt > n0 * std::exp(coarse[0] * traj.snapshot_times[j]) * (1.0 + 1e-12))
                dominated = false;
        }
        pass = pass && finite && stable && dominated;
        detail += fmt("g=%.0f: beta*=%.2f C0 drift %.1f%% dom=%d  ", gamma, fine[0], 100 * rel,
                      static_cast<int>(dominated));
    }
    report(5, "decay barrier bound", pass, detail);
}

// --------------------------------------------------------------------------
// C6: Gronwall threshold over 200 random draws
// --------------------------------------------------------------------------
void criterion_6() {
    auto t0 = Clock::now();
    std::mt19937_64 rng(7771);
    std::uniform_real_distribution<double> uni(0.1, 10.0);
    double worst = -1e300;
    bool all = true;
    for (int trial = 0; trial < 200; ++trial) {
        double A = uni(rng), B = uni(rng);
        double t_star = 1.0 / (std::exp(1.0) * A * B);
        std::vector<double> times, H;
        for (int i = 0; i <= 40; ++i) {
            double t = t_star * i / 40.0;
            times.push_back(t);
            H.push_back(equality_branch_solution(A, B, t));
        }
        auto res = gronwall_threshold(A, B, times, H);
        all = all && res.precondition_ok && res.pass;
        worst = std::max(worst, res.max_violation);
    }
    double wall = seconds_since(t0);
    bool pass = all && wall <= 5.0;
    report(6, "gronwall threshold", pass,
           fmt("200 draws, max violation %.2e (<= 1e-9), wall %.2f s (<= 5)", worst, wall));
}

// --------------------------------------------------------------------------
// C7: schauder exponent formulas
// --------------------------------------------------------------------------
void criterion_7() {
    auto e1 = schauder_exponents(0.5, -1.0, 30.0, 10.0);
    auto e2 = schauder_exponents(0.5, -2.0, 30.0, 10.0);
    bool exact = std::abs(e1.p_alpha - 28.0 / 3.0) <= 1e-14 &&
                 std::abs(e1.time_exponent - 1.0 / 22.0) <= 1e-16;
    // independent re-derivation of the worked value in long double
    long double p = 3.0L + 2.0L * 0.5L / 3.0L + 3.0L / 0.5L;
    long double tilde = std::max(-2.0L - 20.0L / 3.0L, (2.0L + 0.5L / 3.0L) * p - 20.0L);
    long double q_ref = 2.0L + (1.0L - 0.25L / 5.5L) * tilde;
    bool q_ok = std::abs(e2.q - static_cast<double>(q_ref)) <= 1e-12 &&
                std::abs(e2.q - 73.0 / 33.0) <= 1e-12;
    bool integrable = true;
    std::mt19937_64 rng(4);
    std::uniform_real_distribution<double> ua(1e-3, 1.0 - 1e-3);
    for (int i = 0; i < 1000; ++i) {
        double alpha = ua(rng);
        double te = alpha * alpha / (6.0 - alpha);
        if (!(te < alpha) || !(te > 0.0) || !(te < 0.2)) integrable = false;
    }
    bool pass = exact && q_ok && integrable;
    report(7, "schauder exponents", pass,
           fmt("p(1/2)=%.12f, t-exp=%.12f, q=%.12f (ref %.12f)", e1.p_alpha, e1.time_exponent,
               e2.q, static_cast<double>(q_ref)));
}

// --------------------------------------------------------------------------
// C8: pointwise initial matching on a resolved maxwellian run
// --------------------------------------------------------------------------
void criterion_8() {
    PhaseGrid pg = homogeneous(24, 4.0);
    auto f = make_maxwellian(pg, 1.0, 1.0);
    auto cfg = quiet_config(-1.0);
    cfg.dt = 1e-4;
    cfg.t_end = 10 * cfg.dt;
    cfg.diag_every = 1;
    auto traj = run_simulation(f, cfg);
    auto m = initial_matching_check(traj, f, 2.0, true);
    bool linear = true;
    for (std::size_t j = 1; j < m.deviation.size(); ++j) {
        double ratio = m.deviation[j] / (m.fitted_C * m.times[j]);
        if (ratio < 0.5 || ratio > 1.0 + 1e-12) linear = false;
    }
    bool pass = std::isfinite(m.fitted_C) && m.fitted_C > 0 && m.monotone && linear;
    report(8, "initial-data matching", pass,
           fmt("fitted C %.4f, monotone %d, s(t) within [0.5, 1.0] C t", m.fitted_C,
               static_cast<int>(m.monotone)));
}

// --------------------------------------------------------------------------
// C9: weak-form residual
// --------------------------------------------------------------------------
void criterion_9() {
    auto kernel = CollisionKernel::standard(-1.0);
    // mass branch
    PhaseGrid pg = homogeneous(16, 4.0);
    auto f = make_maxwellian(pg, 1.0, 1.0);
    auto cfg = quiet_config(-1.0);
    cfg.dt = 2e-4;
    cfg.t_end = 40 * cfg.dt;
    cfg.diag_every = 2;
    auto traj = run_simulation(f, cfg);
    WeakTestFunction mass_fn;
    mass_fn.t_cut = 0.6 * traj.final_time;
    double mass_res = weak_form_residual(traj, mass_fn, kernel);

    // gaussian branch under joint (dt, h) refinement
    WeakTestFunction gauss_fn;
    gauss_fn.v_kind = WeakTestFunction::VKind::gaussian;
    gauss_fn.v_center = {0.5, 0, 0};
    gauss_fn.v_width = 1.0;
    gauss_fn.cutoff_start = 2.2;
    gauss_fn.cutoff_end = 3.5;
    gauss_fn.t_cut = 0.6 * traj.final_time;
    double coarse = weak_form_residual(traj, gauss_fn, kernel);

    PhaseGrid pg2 = homogeneous(24, 4.0);
    auto cfg2 = cfg;
    cfg2.dt = 1e-4;
    cfg2.diag_every = 4;
    auto traj2 = run_simulation(make_maxwellian(pg2, 1.0, 1.0), cfg2);
    double fine = weak_form_residual(traj2, gauss_fn, kernel);
    double ratio = coarse / fine;
    bool pass = mass_res <= 1e-10 && ratio >= 2.0;
    report(9, "weak-form residual", pass,
           fmt("mass %.2e (<= 1e-10); gaussian %.2e -> %.2e, order %.2f (>= 1)", mass_res,
               coarse, fine, std::log2(ratio)));
}

// --------------------------------------------------------------------------
// C10: holder supersolution machinery
// --------------------------------------------------------------------------
void criterion_10() {
    auto curve = integrate_supersolution(1.0, 0.5, 2.0, {});
    double r = 0.25 / 5.5;
    double P = 0.5 * (28.0 / 3.0 + 1.0);
    double u_star = r * std::pow(3.0, 1.0 - P) / (P - 1.0);
    double log_t_ref = std::log(u_star) / r;
    double rel = std::abs(curve.log_blow_up_time - log_t_ref) / std::abs(log_t_ref);

    PhaseGrid pg = homogeneous(14, 4.0);
    DistributionField f(pg);
    for (std::size_t iv = 0; iv < pg.velocity.size(); ++iv) {
        Vec3 v = pg.velocity.velocity(iv);
        f.at(0, iv) = std::exp(-norm2(v)) + 0.5 * std::exp(-norm2(v - Vec3{1, 0, 0}) / 0.25);
    }
    auto cfg = quiet_config(-1.0);
    cfg.dt = 1e-4;
    cfg.t_end = 60 * cfg.dt;
    cfg.diag_every = 10;
    auto traj = run_simulation(f, cfg);
    HolderSampler sampler;
    sampler.seed = 42;
    sampler.pairs = 20000;
    auto res = holder_propagation_check(traj, 0.5, 5.0, 64.0, sampler);
    bool pass = rel <= 1e-6 && res.found && res.N <= 64.0 && res.T_H > 0.0;
    report(10, "holder supersolution", pass,
           fmt("blow-up dual-route rel %.1e (<= 1e-6); run passes at N=%.0f, T_H=%.1e", rel,
               res.N, res.T_H));
}

// --------------------------------------------------------------------------
// C11: uniqueness contraction functional
// --------------------------------------------------------------------------
void criterion_11() {
    PhaseGrid pg = homogeneous(16, 4.0);
    auto f = two_bumps(pg, 1.2, 0.8);
    auto run_dt = [&](double dt, int every) {
        auto cfg = quiet_config(-1.0);
        cfg.dt = dt;
        cfg.t_end = 0.02;
        cfg.diag_every = every;
        return run_simulation(f, cfg);
    };
    auto a = run_dt(1e-4, 10);
    auto b = run_dt(5e-5, 20);
    auto c = run_dt(2.5e-5, 40);
    auto self = uniqueness_contraction_check(a, a, 0.5, 1.0);
    auto s1 = uniqueness_contraction_check(a, b, 0.5, 1.0);
    auto s2 = uniqueness_contraction_check(b, c, 0.5, 1.0);
    double C1 = s1.max_W / 1e-4;
    double C2 = s2.max_W / 5e-5;
    bool pass = self.max_W == 0.0 && C2 <= 1.5 * C1;
    report(11, "uniqueness contraction", pass,
           fmt("self W = %.1e (exact 0); sup W/dt %.2e -> %.2e (uniform C)", self.max_W, C1, C2));
}

// --------------------------------------------------------------------------
// C12: appendix interpolation inequalities on the analytic corpus
// --------------------------------------------------------------------------
void criterion_12() {
    auto t0 = Clock::now();
    auto checks = interpolation_inequality_checks(analytic_corpus(), 0.5, 0.25);
    bool all = checks.size() == 12;
    std::string failures;
    for (const auto& chk : checks) {
        if (!chk.pass_d2 || !chk.pass_decay) {
            all = false;
            failures += chk.name + " ";
        }
    }
    double wall = seconds_since(t0);
    bool pass = all && wall <= 30.0;
    report(12, "interpolation inequalities", pass,
           fmt("12 functions, C=10 and C=4, wall %.1f s (<= 30)%s%s", wall,
               failures.empty() ? "" : "; failing: ", failures.c_str()));
}

// --------------------------------------------------------------------------
// C13: desk-scale performance
// --------------------------------------------------------------------------
void criterion_13() {
    auto t0 = Clock::now();
    {
        PhaseGrid pg = homogeneous(32, 4.0);
        auto f = make_maxwellian(pg, 1.0, 1.0);
        auto cfg = quiet_config(-1.0);
        LandauStepper stepper(pg, cfg);
        DistributionField cur = f;
        for (int s = 0; s < 1000; ++s) cur = stepper.step(cur, 2e-5);
        if (!cur.finite()) {
            report(13, "desk-scale performance", false, "homogeneous run went non-finite");
            return;
        }
    }
    double homogeneous_wall = seconds_since(t0);

    auto t1 = Clock::now();
    {
        PhaseGrid pg{SpatialGrid(1, 16, 4.0), VelocityGrid(24, 4.0)};
        DistributionField f(pg);
        for (std::size_t ix = 0; ix < pg.space.cells(); ++ix) {
            double x = pg.space.center(static_cast<int>(ix));
            double mod = 1.0 + 0.3 * std::cos(2 * M_PI * x / pg.space.period);
            for (std::size_t iv = 0; iv < pg.velocity.size(); ++iv)
                f.at(ix, iv) = mod * std::exp(-norm2(pg.velocity.velocity(iv)));
        }
        auto cfg = quiet_config(-1.0);
        LandauStepper stepper(pg, cfg);
        DistributionField cur = f;
        for (int s = 0; s < 200; ++s) cur = stepper.step(cur, 5e-5);
        if (!cur.finite()) {
            report(13, "desk-scale performance", false, "inhomogeneous run went non-finite");
            return;
        }
    }
    double inhomogeneous_wall = seconds_since(t1);
    bool pass = homogeneous_wall <= 300.0 && inhomogeneous_wall <= 600.0;
    report(13, "desk-scale performance", pass,
           fmt("n_v=32 x 1000 steps: %.0f s (<= 300); dim_x=1 16x24 x 200: %.0f s (<= 600)",
               homogeneous_wall, inhomogeneous_wall));
}

}  // namespace

int main() {
    std::printf("acceptance suite\n");
    criterion_1();
    criterion_2();
    criterion_3();
    criterion_4();
    criterion_5();
    criterion_6();
    criterion_7();
    criterion_8();
    criterion_9();
    criterion_10();
    criterion_11();
    criterion_12();
    criterion_13();
    std::printf("%d of 13 criteria passed\n", 13 - g_failures);
    return g_failures == 0 ? 0 : 1;
}
