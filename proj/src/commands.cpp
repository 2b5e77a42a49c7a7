#include "landau/commands.hpp"

#include <algorithm>
#include <chrono>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <random>

#include "landau/diagnostics.hpp"
#include "landau/snapshot_io.hpp"

namespace landau {

namespace fs = std::filesystem;
using Clock = std::chrono::steady_clock;

namespace {

double ms_since(Clock::time_point t0) {
    return std::chrono::duration<double, std::milli>(Clock::now() - t0).count();
}

std::string fmt_g17(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

}  // namespace

std::string diagnostics_csv_header() {
    return "t,mass_min_x,mass_max_x,energy_max_x,entropy_max_x,psi,psi_tilde,linfty_k,"
           "ellipticity_min,ellipticity_aniso_par,ellipticity_aniso_perp,holder_est_alpha,"
           "holder_g_sup,d2v_weighted_sup,clamped_mass,seed";
}

std::string diagnostics_csv_row(const DiagnosticsRow& r) {
    std::string out;
    for (double v : {r.t, r.mass_min_x, r.mass_max_x, r.energy_max_x, r.entropy_max_x, r.psi,
                     r.psi_tilde, r.linfty_k, r.ellipticity_min, r.ellipticity_aniso_par,
                     r.ellipticity_aniso_perp, r.holder_est_alpha, r.holder_g_sup,
                     r.d2v_weighted_sup, r.clamped_mass}) {
        out += fmt_g17(v);
        out += ',';
    }
    out += std::to_string(r.seed);
    return out;
}

namespace {

void write_diagnostics_csv(const std::string& path, const std::vector<DiagnosticsRow>& rows) {
    std::ofstream os(path);
    os << diagnostics_csv_header() << "\n";
    for (const auto& r : rows) os << diagnostics_csv_row(r) << "\n";
}

std::string status_name(RunStatus s) {
    switch (s) {
        case RunStatus::completed: return "completed";
        case RunStatus::continuation_abort: return "continuation-abort";
        case RunStatus::instability: return "instability";
    }
    return "unknown";
}

int status_exit_code(RunStatus s) {
    switch (s) {
        case RunStatus::completed: return kExitOk;
        case RunStatus::continuation_abort: return kExitContinuationAbort;
        case RunStatus::instability: return kExitInstability;
    }
    return kExitOk;
}

}  // namespace

int cmd_run(const RunConfig& config) {
    fs::create_directories(config.out_dir);
    auto t0 = Clock::now();
    DistributionField f_in = config.initial_data();
    TrajectoryRecord traj = run_simulation(f_in, config.solver);
    double wall_s = ms_since(t0) / 1000.0;

    for (std::size_t j = 0; j < traj.snapshot_times.size(); ++j) {
        char name[32];
        std::snprintf(name, sizeof(name), "snap_%06zu.lndf", j);
        write_snapshot((fs::path(config.out_dir) / name).string(), traj.field_at(j));
    }
    write_diagnostics_csv((fs::path(config.out_dir) / "diagnostics.csv").string(), traj.rows);

    double peak_psi = 0, peak_norm = 0;
    for (const auto& r : traj.rows) {
        peak_psi = std::max(peak_psi, r.psi);
        peak_norm = std::max(peak_norm, r.linfty_k);
    }
    nlohmann::json summary{{"final_time", traj.final_time},
                           {"status", status_name(traj.status)},
                           {"peak_psi", peak_psi},
                           {"peak_linfty_k", peak_norm},
                           {"wall_time_s", wall_s},
                           {"snapshots", traj.snapshot_times.size()},
                           {"clamped_mass_total", traj.clamped_mass_total},
                           {"seed", config.solver.seed}};
    std::ofstream os(fs::path(config.out_dir) / "summary.json");
    os << summary.dump(2) << "\n";
    std::cout << summary.dump(2) << std::endl;
    return status_exit_code(traj.status);
}

TrajectoryRecord load_run_directory(const std::string& dir) {
    std::vector<std::string> paths;
    for (const auto& entry : fs::directory_iterator(dir)) {
        auto name = entry.path().filename().string();
        if (name.rfind("snap_", 0) == 0 && entry.path().extension() == ".lndf")
            paths.push_back(entry.path().string());
    }
    if (paths.empty()) throw std::runtime_error("no snap_*.lndf files in " + dir);
    std::vector<DistributionField> fields;
    fields.reserve(paths.size());
    for (const auto& p : paths) fields.push_back(read_snapshot(p));
    std::sort(fields.begin(), fields.end(),
              [](const auto& a, const auto& b) { return a.time < b.time; });
    TrajectoryRecord traj;
    traj.grid = fields.front().grid;
    for (auto& f : fields) {
        if (!(f.grid == traj.grid)) throw std::runtime_error("mismatched grids in " + dir);
        traj.snapshot_times.push_back(f.time);
        traj.snapshots.push_back(std::move(f.values));
    }
    traj.final_time = traj.snapshot_times.back();
    return traj;
}

int cmd_diagnose(const RunConfig& config, const std::vector<std::string>& snapshot_paths) {
    std::vector<DistributionField> fields;
    for (const auto& p : snapshot_paths) fields.push_back(read_snapshot(p));
    std::sort(fields.begin(), fields.end(),
              [](const auto& a, const auto& b) { return a.time < b.time; });

    const auto& cfg = config.solver;
    double p_choice = cfg.effective_psi_p();
    double ell_choice = cfg.effective_psi_tilde_ell();
    auto kernel = CollisionKernel::standard(cfg.gamma);

    std::vector<DiagnosticsRow> rows;
    double psi_running = 0, psi_tilde_running = 0;
    std::uint64_t step = 0;
    for (const auto& f : fields) {
        DiagnosticsRow row;
        row.t = f.time;
        auto hydro = hydrodynamic_fields(f);
        auto [mn, mx] = std::minmax_element(hydro.mass.begin(), hydro.mass.end());
        row.mass_min_x = *mn;
        row.mass_max_x = *mx;
        row.energy_max_x = *std::max_element(hydro.energy.begin(), hydro.energy.end());
        row.entropy_max_x = *std::max_element(hydro.entropy.begin(), hydro.entropy.end());
        psi_running = std::max(psi_running, psi_instant(f, cfg.gamma, p_choice));
        psi_tilde_running = std::max(psi_tilde_running, psi_tilde_instant(f, cfg.gamma, ell_choice));
        row.psi = psi_running;
        row.psi_tilde = psi_tilde_running;
        row.linfty_k = weighted_sup_norm(f, cfg.k_decay);
        if (cfg.diag_ellipticity) {
            auto engine = shared_convolution_engine(f.grid.velocity, kernel);
            auto ws = engine->make_workspace();
            CoefficientField coeff(f.grid.velocity, cfg.gamma);
            double lmin = std::numeric_limits<double>::infinity(), par = 0, perp = 0;
            for (std::size_t ix = 0; ix < f.grid.space.cells(); ++ix) {
                engine->compute(nonnegative_part(f.slice(ix)), coeff, ws);
                auto spec = ellipticity_spectrum(coeff);
                lmin = std::min(lmin, spec.worst_lambda_min);
                for (std::size_t iv = 0; iv < spec.lambda_par.size(); ++iv) {
                    par = std::max(par, spec.lambda_par[iv]);
                    perp = std::max(perp, spec.lambda_perp[iv]);
                }
            }
            row.ellipticity_min = lmin;
            row.ellipticity_aniso_par = par;
            row.ellipticity_aniso_perp = perp;
        }
        row.holder_est_alpha = cfg.holder_alpha;
        if (cfg.diag_holder) {
            HolderSampler sampler;
            sampler.seed = cfg.seed ^ (0x9e3779b97f4a7c15ull * (step + 1));
            sampler.pairs = static_cast<std::size_t>(cfg.holder_pairs);
            auto est = holder_seminorm(FieldWindow::of(f), cfg.holder_alpha, cfg.holder_m,
                                       HolderMetric::euclidean, sampler);
            row.holder_g_sup = est.g_sup;
        }
        row.d2v_weighted_sup = d2v_weighted_sup(f, cfg.holder_m + pos_part(cfg.gamma + 2.0));
        row.seed = cfg.seed;
        rows.push_back(row);
        ++step;
    }
    fs::create_directories(config.out_dir);
    auto path = (fs::path(config.out_dir) / "diagnostics.csv").string();
    write_diagnostics_csv(path, rows);
    std::cout << path << std::endl;
    return kExitOk;
}

// ---------------------------------------------------------------------------
// Verification suites
// ---------------------------------------------------------------------------

namespace {

DistributionField random_field(const PhaseGrid& grid, std::uint64_t seed) {
    DistributionField f(grid);
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> uni(0.0, 1.0);
    for (auto& v : f.values) v = uni(rng);
    return f;
}

double component_scaled_error(const CoefficientField& a, const CoefficientField& b) {
    double worst = 0;
    auto compare = [&](const std::vector<double>& x, const std::vector<double>& y) {
        double scale = 0;
        for (double v : y) scale = std::max(scale, std::abs(v));
        if (scale == 0.0) scale = 1.0;
        for (std::size_t i = 0; i < x.size(); ++i)
            worst = std::max(worst, std::abs(x[i] - y[i]) / scale);
    };
    for (int comp = 0; comp < 6; ++comp) compare(a.a[comp], b.a[comp]);
    for (int comp = 0; comp < 3; ++comp) compare(a.b[comp], b.b[comp]);
    compare(a.c, b.c);
    return worst;
}

CheckResult check_kernel_oracle(std::uint64_t seed) {
    auto t0 = Clock::now();
    CheckResult res;
    res.name = "kernel_oracle_equivalence";
    res.seed = seed;
    VelocityGrid grid(12, 4.0);
    PhaseGrid pg{SpatialGrid(0, 1, 1.0), grid};
    double worst = 0;
    for (double gamma : {-3.0, -2.5, -2.0, -1.0, -0.5}) {
        auto kernel = CollisionKernel::standard(gamma);
        auto table = build_kernel_table(grid, kernel);
        auto engine = shared_convolution_engine(grid, kernel);
        auto ws = engine->make_workspace();
        for (int trial = 0; trial < 5; ++trial) {
            auto f = random_field(pg, seed + trial);
            auto direct = compute_coefficients_direct(f.slice(0), table);
            CoefficientField fast(grid, gamma);
            engine->compute(f.slice(0), fast, ws);
            worst = std::max(worst, component_scaled_error(fast, direct));
        }
    }
    res.params = {{"grid", 12}, {"fields", 5}, {"gammas", 5}};
    res.margin = 1e-10 - worst;
    res.pass = worst <= 1e-10;
    res.witness = {{"max_scaled_error", worst}};
    res.runtime_ms = ms_since(t0);
    return res;
}

CheckResult check_divergence_identities() {
    auto t0 = Clock::now();
    CheckResult res;
    res.name = "divergence_identities";
    auto residuals_at = [&](int n) {
        PhaseGrid pg{SpatialGrid(0, 1, 1.0), VelocityGrid(n, 4.0)};
        auto f = make_maxwellian(pg, 1.0, 1.0);
        auto coeff =
            compute_coefficients_fast(f.slice(0), pg.velocity, CollisionKernel::standard(-1.0));
        return divergence_identity_residuals(coeff);
    };
    auto coarse = residuals_at(12);
    auto fine = residuals_at(24);
    double ratio_b = coarse.res_b / fine.res_b;
    double ratio_c = coarse.res_c / fine.res_c;
    res.params = {{"gamma", -1.0}, {"n_coarse", 12}, {"n_fine", 24}};
    res.witness = {{"ratio_b", ratio_b}, {"ratio_c", ratio_c},
                   {"res_b_fine", fine.res_b}, {"res_c_fine", fine.res_c}};
    res.pass = ratio_b >= 3.0 && ratio_c >= 3.0;
    res.margin = std::min(ratio_b, ratio_c) - 3.0;
    res.runtime_ms = ms_since(t0);
    return res;
}

CheckResult check_coefficient_structure(std::uint64_t seed) {
    auto t0 = Clock::now();
    CheckResult res;
    res.name = "coefficient_structure";
    res.seed = seed;
    PhaseGrid pg{SpatialGrid(0, 1, 1.0), VelocityGrid(10, 3.0)};
    auto f = random_field(pg, seed);
    auto kernel = CollisionKernel::standard(-2.0);
    auto coeff = compute_coefficients_fast(f.slice(0), pg.velocity, kernel);
    auto spec = ellipticity_spectrum(coeff);
    double scale = 0;
    for (std::size_t iv = 0; iv < pg.velocity.size(); ++iv)
        scale = std::max(scale, spec.lambda_max[iv]);
    bool psd_ok = spec.worst_lambda_min >= -1e-12 * scale;
    // scaling by 2 must commute exactly with the quadrature
    DistributionField f2 = f;
    for (auto& v : f2.values) v *= 2.0;
    auto coeff2 = compute_coefficients_fast(f2.slice(0), pg.velocity, kernel);
    double scale_err = 0;
    for (int comp = 0; comp < 6; ++comp)
        for (std::size_t iv = 0; iv < pg.velocity.size(); ++iv)
            scale_err = std::max(scale_err,
                                 std::abs(coeff2.a[comp][iv] - 2.0 * coeff.a[comp][iv]));
    res.pass = psd_ok && scale_err == 0.0;
    res.margin = psd_ok ? -scale_err : spec.worst_lambda_min;
    res.witness = {{"worst_lambda_min", spec.worst_lambda_min}, {"scaling_error", scale_err}};
    res.runtime_ms = ms_since(t0);
    return res;
}

CheckResult check_mass_conservation() {
    auto t0 = Clock::now();
    CheckResult res;
    res.name = "mass_conservation";
    PhaseGrid pg{SpatialGrid(0, 1, 1.0), VelocityGrid(16, 4.0)};
    SolverConfig cfg;
    cfg.gamma = -1.0;
    cfg.dt = 2e-4;
    cfg.t_end = 50 * cfg.dt;
    cfg.diag_every = 10;
    cfg.diag_holder = false;
    cfg.diag_ellipticity = false;
    cfg.positivity = PositivityMode::off;
    auto traj = run_simulation(make_maxwellian(pg, 1.0, 1.0), cfg);
    double m0 = traj.rows.front().mass_max_x;
    double drift = 0;
    for (const auto& r : traj.rows) drift = std::max(drift, std::abs(r.mass_max_x - m0) / m0);
    res.params = {{"steps", 50}, {"gamma", -1.0}};
    res.pass = traj.status == RunStatus::completed && drift <= 1e-12;
    res.margin = 1e-12 - drift;
    res.witness = {{"relative_mass_drift", drift}};
    res.runtime_ms = ms_since(t0);
    return res;
}

CheckResult check_transport_exactness() {
    auto t0 = Clock::now();
    CheckResult res;
    res.name = "transport_exactness";
    PhaseGrid pg{SpatialGrid(1, 8, 2.0), VelocityGrid(8, 2.0)};
    auto f = random_field(pg, 99);
    // dyadic combination: v = 0.25, h_x = 0.25, dt = 1 shifts exactly one cell
    double dt = 1.0;
    auto once = transport_step(f, dt);
    auto twice = transport_step(transport_step(f, 0.5 * dt), 0.5 * dt);
    double worst = 0;
    int sheet = 4; // velocity 0.25 along the first axis
    for (int ix = 0; ix < pg.space.n; ++ix)
        for (int j = 0; j < pg.velocity.n; ++j)
            for (int k = 0; k < pg.velocity.n; ++k) {
                std::size_t iv = pg.velocity.index(sheet, j, k);
                int src = (ix - 1 + pg.space.n) % pg.space.n;
                worst = std::max(worst, std::abs(once.at(ix, iv) - f.at(src, iv)));
            }
    double mass0 = 0, mass1 = 0;
    for (double v : f.values) mass0 += v;
    for (double v : twice.values) mass1 += v;
    double mass_err = std::abs(mass1 - mass0) / mass0;
    res.pass = worst == 0.0 && mass_err < 1e-14;
    res.margin = -(worst + mass_err);
    res.witness = {{"aligned_shift_error", worst}, {"split_mass_error", mass_err}};
    res.runtime_ms = ms_since(t0);
    return res;
}

CheckResult check_maxwellian_stationarity() {
    auto t0 = Clock::now();
    CheckResult res;
    res.name = "maxwellian_stationarity";
    auto rate_at = [&](int n) {
        PhaseGrid pg{SpatialGrid(0, 1, 1.0), VelocityGrid(n, 4.0)};
        auto f = make_maxwellian(pg, 1.0, 1.0);
        SolverConfig cfg;
        cfg.gamma = -1.0;
        cfg.positivity = PositivityMode::off;
        LandauStepper stepper(pg, cfg);
        auto coeffs = stepper.coefficients(f);
        double dt = 1e-5;
        auto f1 = collision_step(f, coeffs, dt, cfg, f.max_abs());
        double worst = 0;
        for (std::size_t i = 0; i < f.values.size(); ++i)
            worst = std::max(worst, std::abs(f1.values[i] - f.values[i]) / dt);
        return worst;
    };
    double coarse = rate_at(16), fine = rate_at(32);
    double ratio = coarse / fine;
    res.params = {{"gamma", -1.0}, {"n_coarse", 16}, {"n_fine", 32}};
    res.pass = ratio >= 3.0;
    res.margin = ratio - 3.0;
    res.witness = {{"rate_coarse", coarse}, {"rate_fine", fine}, {"ratio", ratio}};
    res.runtime_ms = ms_since(t0);
    return res;
}

CheckResult check_determinism(std::uint64_t seed) {
    auto t0 = Clock::now();
    CheckResult res;
    res.name = "determinism";
    res.seed = seed;
    PhaseGrid pg{SpatialGrid(1, 4, 2.0), VelocityGrid(8, 3.0)};
    SolverConfig cfg;
    cfg.gamma = -1.5;
    cfg.dt = 1e-4;
    cfg.t_end = 10 * cfg.dt;
    cfg.seed = seed;
    cfg.diag_holder = false;
    cfg.diag_ellipticity = false;
    auto f = make_maxwellian(pg, 1.0, 1.0);
    auto a = run_simulation(f, cfg);
    auto b = run_simulation(f, cfg);
    bool identical = a.snapshots == b.snapshots && a.snapshot_times == b.snapshot_times;
    res.pass = identical;
    res.margin = identical ? 1 : -1;
    res.witness = {{"bit_identical", identical}};
    res.runtime_ms = ms_since(t0);
    return res;
}

// maximal solution of H = A exp(B t H) through the principal Lambert branch,
// with the branch-point series where iteration would stall on the double root
double equality_branch_h(double A, double B, double t) {
    if (t <= 0.0) return A;
    double x = -A * B * t;
    double eps = x + std::exp(-1.0);
    if (eps <= 0.0) return std::exp(1.0) * A;
    double p = std::sqrt(2.0 * std::exp(1.0) * eps);
    double w = -1.0 + p - p * p / 3.0 + (11.0 / 72.0) * p * p * p;
    if (p >= 1e-3) {
        for (int it = 0; it < 50; ++it) {
            double ew = std::exp(w);
            double f = w * ew - x;
            double d = ew * (w + 1.0) - f * (w + 2.0) / (2.0 * (w + 1.0));
            double step = f / d;
            w -= step;
            if (std::abs(step) <= 1e-15 * std::max(1.0, std::abs(w))) break;
        }
    }
    return -w / (B * t);
}

CheckResult check_gronwall(std::uint64_t seed) {
    auto t0 = Clock::now();
    CheckResult res;
    res.name = "gronwall_threshold";
    res.seed = seed;
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> uni(0.1, 10.0);
    double worst = -std::numeric_limits<double>::infinity();
    bool all_pass = true;
    for (int trial = 0; trial < 50; ++trial) {
        double A = uni(rng), B = uni(rng);
        double t_star = 1.0 / (std::exp(1.0) * A * B);
        std::vector<double> times, H;
        for (int i = 0; i <= 40; ++i) {
            double t = t_star * i / 40.0;
            times.push_back(t);
            H.push_back(equality_branch_h(A, B, t));
        }
        auto g = gronwall_threshold(A, B, times, H);
        all_pass = all_pass && g.precondition_ok && g.pass;
        worst = std::max(worst, g.max_violation);
    }
    res.params = {{"draws", 50}};
    res.pass = all_pass;
    res.margin = 1e-9 - worst;
    res.witness = {{"max_violation", worst}};
    res.runtime_ms = ms_since(t0);
    return res;
}

CheckResult check_schauder() {
    auto t0 = Clock::now();
    CheckResult res;
    res.name = "schauder_exponents";
    auto e1 = schauder_exponents(0.5, -1.0, 30.0, 10.0);
    auto e2 = schauder_exponents(0.5, -2.0, 30.0, 10.0);
    double err = std::abs(e1.p_alpha - 28.0 / 3.0) + std::abs(e1.time_exponent - 1.0 / 22.0) +
                 std::abs(e2.q - 73.0 / 33.0);
    bool integrable = true;
    for (int i = 1; i <= 1000; ++i) {
        double alpha = i / 1001.0;
        if (!(alpha * alpha / (6.0 - alpha) < alpha)) integrable = false;
    }
    res.pass = err <= 1e-12 && integrable;
    res.margin = 1e-12 - err;
    res.witness = {{"p_half", e1.p_alpha}, {"time_exponent_half", e1.time_exponent},
                   {"q_example", e2.q}};
    res.runtime_ms = ms_since(t0);
    return res;
}

CheckResult check_barrier() {
    auto t0 = Clock::now();
    CheckResult res;
    res.name = "barrier_bisection";
    auto beta_at = [&](int n) {
        PhaseGrid pg{SpatialGrid(0, 1, 1.0), VelocityGrid(n, 4.0)};
        auto f = make_maxwellian(pg, 1.0, 1.0);
        SolverConfig cfg;
        cfg.gamma = -1.0;
        LandauStepper stepper(pg, cfg);
        auto coeffs = stepper.coefficients(f);
        double beta = find_supersolution_beta(coeffs, pg, 6.0);
        double K = measured_coefficient_bound(coeffs);
        return std::pair<double, double>{beta, K};
    };
    auto [beta_c, K_c] = beta_at(12);
    auto [beta_f, K_f] = beta_at(20);
    double c0_c = beta_c / K_c, c0_f = beta_f / K_f;
    double rel = std::abs(c0_f - c0_c) / c0_c;
    res.pass = std::isfinite(beta_f) && beta_f > 0 && rel <= 0.2;
    res.margin = 0.2 - rel;
    res.witness = {{"beta_coarse", beta_c}, {"beta_fine", beta_f}, {"C0_rel_change", rel}};
    res.runtime_ms = ms_since(t0);
    return res;
}

CheckResult check_interpolation() {
    auto t0 = Clock::now();
    CheckResult res;
    res.name = "interpolation_corpus";
    auto checks = interpolation_inequality_checks(analytic_corpus(), 0.5, 0.25);
    bool all = true;
    double min_margin = std::numeric_limits<double>::infinity();
    nlohmann::json names = nlohmann::json::array();
    for (const auto& chk : checks) {
        all = all && chk.pass_d2 && chk.pass_decay;
        if (chk.lhs_d2 > 0) min_margin = std::min(min_margin, chk.rhs_d2 / std::max(chk.lhs_d2, 1e-300));
        if (!chk.pass_d2 || !chk.pass_decay) names.push_back(chk.name);
    }
    res.params = {{"functions", checks.size()}, {"alpha", 0.5}, {"beta", 0.25}};
    res.pass = all;
    res.margin = min_margin;
    res.witness = {{"failures", names}};
    res.runtime_ms = ms_since(t0);
    return res;
}

CheckResult check_supersolution() {
    auto t0 = Clock::now();
    CheckResult res;
    res.name = "supersolution_dual_route";
    auto curve = integrate_supersolution(1.0, 0.5, 2.0, {});
    // closed-form blow-up of the separable equation
    double r = 0.25 / 5.5;
    double P = 0.5 * (28.0 / 3.0 + 1.0);
    double u_star = r * std::pow(3.0, 1.0 - P) / (P - 1.0);
    double log_t = std::log(u_star) / r;
    double rel = std::abs(curve.log_blow_up_time - log_t) / std::abs(log_t);
    res.pass = rel <= 1e-6;
    res.margin = 1e-6 - rel;
    res.witness = {{"log_t_blow_integrated", curve.log_blow_up_time},
                   {"log_t_blow_closed_form", log_t}};
    res.runtime_ms = ms_since(t0);
    return res;
}

CheckResult check_envelope() {
    auto t0 = Clock::now();
    CheckResult res;
    res.name = "envelope_self_consistency";
    VelocityGrid vg(16, 4.0);
    double c_true = 0.7, gamma = -2.0;
    std::vector<double> slice(vg.size());
    for (std::size_t iv = 0; iv < vg.size(); ++iv)
        slice[iv] = c_true * std::exp(-std::pow(norm(vg.velocity(iv)), 2.0 - gamma) / c_true);
    auto fit = lower_bound_envelope_fit(slice, vg, gamma, 1e-12);
    double rel = std::abs(fit.c1 - c_true) / c_true;
    res.pass = rel <= 1e-6;
    res.margin = 1e-6 - rel;
    res.witness = {{"fit", fit.c1}, {"true", c_true}};
    res.runtime_ms = ms_since(t0);
    return res;
}

}  // namespace

int cmd_verify(const RunConfig& config, const std::string& suite) {
    std::vector<CheckResult> results;
    std::uint64_t seed = config.solver.seed;
    bool kernel = suite == "kernel" || suite == "all";
    bool solver = suite == "solver" || suite == "all";
    bool estimates = suite == "estimates" || suite == "all";
    if (!kernel && !solver && !estimates) {
        std::cerr << "unknown suite '" << suite << "' (kernel|solver|estimates|all)" << std::endl;
        return kExitConfigError;
    }
    if (kernel) {
        results.push_back(check_kernel_oracle(seed));
        results.push_back(check_divergence_identities());
        results.push_back(check_coefficient_structure(seed + 1));
    }
    if (solver) {
        results.push_back(check_mass_conservation());
        results.push_back(check_transport_exactness());
        results.push_back(check_maxwellian_stationarity());
        results.push_back(check_determinism(seed + 2));
    }
    if (estimates) {
        results.push_back(check_gronwall(seed + 3));
        results.push_back(check_schauder());
        results.push_back(check_barrier());
        results.push_back(check_interpolation());
        results.push_back(check_supersolution());
        results.push_back(check_envelope());
    }

    nlohmann::json report = nlohmann::json::array();
    bool all_pass = true;
    for (const auto& r : results) {
        report.push_back(r.to_json());
        all_pass = all_pass && r.pass;
    }
    fs::create_directories(config.out_dir);
    std::ofstream os(fs::path(config.out_dir) / "verify.json");
    os << report.dump(2) << "\n";
    std::cout << report.dump(2) << std::endl;
    return all_pass ? kExitOk : kExitCheckFailed;
}

int cmd_compare(const std::string& dir_a, const std::string& dir_b, const RunConfig& config) {
    auto a = load_run_directory(dir_a);
    auto b = load_run_directory(dir_b);
    auto series = uniqueness_contraction_check(a, b, config.solver.holder_alpha, 1.0);
    nlohmann::json report{{"times", series.times},
                          {"sup_W", series.sup_W},
                          {"max_W", series.max_W},
                          {"increase_violations", series.increase_violations},
                          {"alpha", config.solver.holder_alpha}};
    fs::create_directories(config.out_dir);
    std::ofstream os(fs::path(config.out_dir) / "contraction.json");
    os << report.dump(2) << "\n";
    std::cout << report.dump(2) << std::endl;
    return kExitOk;
}

}  // namespace landau
