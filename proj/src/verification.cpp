#include "landau/verification.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <stdexcept>

namespace landau {

nlohmann::json CheckResult::to_json() const {
    return nlohmann::json{{"name", name},       {"params", params}, {"pass", pass},
                          {"margin", margin},   {"witness", witness}, {"seed", seed},
                          {"runtime_ms", runtime_ms}};
}

// ---------------------------------------------------------------------------
// Barriers
// ---------------------------------------------------------------------------

double barrier_value(const BarrierSpec& spec, double t, const Vec3& x, const Vec3& v) {
    switch (spec.kind) {
        case BarrierSpec::Kind::decay:
            return std::exp(spec.beta * t) * std::pow(bracket2(v), -0.5 * spec.k);
        case BarrierSpec::Kind::matching_upper: {
            Vec3 y = x - spec.x0 - v * t;
            double quad = norm2(y) + norm2(v - spec.v0);
            return std::exp(spec.beta * t) *
                   (spec.M * quad + spec.eta + spec.f_center + spec.rho * t);
        }
        case BarrierSpec::Kind::matching_lower: {
            Vec3 y = x - spec.x0 - v * t;
            double quad = norm2(y) + norm2(v - spec.v0);
            return std::exp(-spec.beta * t) *
                   (spec.f_center - spec.M * quad - spec.eta - spec.rho * t);
        }
    }
    return 0;
}

double barrier_residual(const std::vector<CoefficientField>& coeffs, const BarrierSpec& spec,
                        const PhaseGrid& grid, double t) {
    const auto& vg = grid.velocity;
    double min_res = std::numeric_limits<double>::infinity();
    for (std::size_t ix = 0; ix < grid.space.cells(); ++ix) {
        const auto& coeff = coeffs.at(ix);
        Vec3 x = grid.space.position(ix);
        for (std::size_t iv = 0; iv < vg.size(); ++iv) {
            Vec3 v = vg.velocity(iv);
            SymMat3 A = coeff.a_at(iv);
            double c = coeff.c[iv];
            double res;
            if (spec.kind == BarrierSpec::Kind::decay) {
                double br2 = bracket2(v);
                double phi = std::exp(spec.beta * t) * std::pow(br2, -0.5 * spec.k);
                // D^2 <v>^{-k} = k(k+2) <v>^{-k-4} v v^T - k <v>^{-k-2} I
                double tr_aD2 = std::exp(spec.beta * t) *
                                (spec.k * (spec.k + 2.0) * std::pow(br2, -0.5 * spec.k - 2.0) *
                                     A.quad(v) -
                                 spec.k * std::pow(br2, -0.5 * spec.k - 1.0) * A.trace());
                res = spec.beta * phi - tr_aD2 - c * phi;
            } else if (spec.kind == BarrierSpec::Kind::matching_upper) {
                double h = barrier_value(spec, t, x, v);
                double e_bt = std::exp(spec.beta * t);
                double tr_aD2 = 2.0 * spec.M * (1.0 + t * t) * e_bt * A.trace();
                res = spec.beta * h + spec.rho * e_bt - tr_aD2 - c * h;
            } else {
                double h = barrier_value(spec, t, x, v);
                double e_bt = std::exp(-spec.beta * t);
                double tr_aD2 = -2.0 * spec.M * (1.0 + t * t) * e_bt * A.trace();
                double Lh = -spec.beta * h - spec.rho * e_bt - tr_aD2 - c * h;
                res = -Lh; // subsolution: want L h <= 0
            }
            min_res = std::min(min_res, res);
        }
    }
    return min_res;
}

double find_supersolution_beta(const std::vector<CoefficientField>& coeffs, const PhaseGrid& grid,
                               double k, double tol) {
    BarrierSpec spec;
    spec.kind = BarrierSpec::Kind::decay;
    spec.k = k;
    auto residual = [&](double beta) {
        spec.beta = beta;
        return barrier_residual(coeffs, spec, grid, 0.0);
    };
    double lo = 0, hi = 1;
    if (residual(lo) >= 0) return 0;
    while (residual(hi) < 0) {
        hi *= 2;
        if (hi > 1e12) throw std::runtime_error("find_supersolution_beta: no finite beta found");
    }
    while (hi - lo > tol * std::max(1.0, hi)) {
        double mid = 0.5 * (lo + hi);
        (residual(mid) >= 0 ? hi : lo) = mid;
    }
    return hi;
}

double measured_coefficient_bound(const std::vector<CoefficientField>& coeffs) {
    double K = 0;
    for (const auto& coeff : coeffs) {
        for (std::size_t iv = 0; iv < coeff.grid.size(); ++iv) {
            Vec3 v = coeff.grid.velocity(iv);
            double env = std::pow(bracket2(v), 0.5 * pos_part(coeff.gamma + 2.0));
            K = std::max(K, sym3_eigenvalues(coeff.a_at(iv))[2] / env);
            K = std::max(K, std::abs(coeff.c[iv]));
        }
    }
    return K;
}

// ---------------------------------------------------------------------------
// Gronwall threshold
// ---------------------------------------------------------------------------

GronwallResult gronwall_threshold(double A, double B, const std::vector<double>& times,
                                  const std::vector<double>& H, double tol) {
    if (times.size() != H.size() || times.empty())
        throw std::invalid_argument("gronwall_threshold: mismatched samples");
    GronwallResult out;
    out.t_star = 1.0 / (std::exp(1.0) * A * B);
    out.precondition_ok = true;
    for (std::size_t i = 0; i < H.size(); ++i) {
        if (i > 0 && H[i] < H[i - 1] - 1e-12 * std::abs(H[i - 1])) out.precondition_ok = false;
        double bound = A * std::exp(B * times[i] * H[i]);
        if (H[i] > bound * (1.0 + 1e-9) + 1e-300) out.precondition_ok = false;
    }
    if (!out.precondition_ok) return out;
    double eA = std::exp(1.0) * A;
    out.max_violation = -std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < H.size(); ++i) {
        if (times[i] > out.t_star * (1.0 + 1e-12)) continue;
        out.max_violation = std::max(out.max_violation, H[i] - eA);
    }
    out.pass = out.max_violation <= tol;
    return out;
}

// ---------------------------------------------------------------------------
// Initial matching
// ---------------------------------------------------------------------------

MatchingResult initial_matching_check(const TrajectoryRecord& traj, const DistributionField& f_in,
                                      double v_radius, bool continuous_data,
                                      std::size_t first_rows) {
    if (!(traj.grid == f_in.grid))
        throw std::invalid_argument("initial_matching_check: grid mismatch");
    const auto& vg = traj.grid.velocity;
    std::vector<std::size_t> region;
    for (std::size_t iv = 0; iv < vg.size(); ++iv)
        if (norm(vg.velocity(iv)) <= v_radius) region.push_back(iv);

    MatchingResult out;
    out.claim_scope = continuous_data ? "continuous data" : "claim scope: continuous data";
    out.asserted = continuous_data;
    std::size_t count = std::min(first_rows + 1, traj.snapshot_times.size());
    for (std::size_t j = 0; j < count; ++j) {
        double s = 0;
        auto f = traj.field_at(j);
        for (std::size_t ix = 0; ix < traj.grid.space.cells(); ++ix) {
            auto a = f.slice(ix);
            auto b = f_in.slice(ix);
            for (std::size_t iv : region) s = std::max(s, std::abs(a[iv] - b[iv]));
        }
        out.times.push_back(traj.snapshot_times[j]);
        out.deviation.push_back(s);
    }
    out.monotone = true;
    for (std::size_t j = 1; j < out.deviation.size(); ++j) {
        if (out.deviation[j] + 1e-14 < out.deviation[j - 1]) out.monotone = false;
        if (out.times[j] > 0) out.fitted_C = std::max(out.fitted_C, out.deviation[j] / out.times[j]);
    }
    return out;
}

// ---------------------------------------------------------------------------
// Weak form
// ---------------------------------------------------------------------------

double WeakTestFunction::chi(double t) const {
    if (t >= t_cut) return 0.0;
    return smoothstep(1.0 - t / t_cut);
}

double WeakTestFunction::chi_prime(double t) const {
    if (t >= t_cut || t < 0) return 0.0;
    double u = 1.0 - t / t_cut;
    double ds = 30.0 * u * u * (1.0 - u) * (1.0 - u); // d/du of the quintic step
    return -ds / t_cut;
}

namespace {

double v_factor(const WeakTestFunction& fn, const Vec3& v) {
    switch (fn.v_kind) {
        case WeakTestFunction::VKind::constant:
            return 1.0;
        case WeakTestFunction::VKind::bump: {
            double prod = 1.0;
            for (int d = 0; d < 3; ++d) {
                double u = (v[d] - fn.v_center[d]) / fn.v_width;
                double s = 1.0 - u * u;
                if (s <= 0.0) return 0.0;
                prod *= s * s * s;
            }
            return prod;
        }
        case WeakTestFunction::VKind::gaussian: {
            double g = std::exp(-norm2(v - fn.v_center) / (fn.v_width * fn.v_width));
            double rr = norm(v);
            double zeta = smoothstep((fn.cutoff_end - rr) / (fn.cutoff_end - fn.cutoff_start));
            return g * zeta;
        }
    }
    return 0;
}

Vec3 v_factor_grad(const WeakTestFunction& fn, const Vec3& v) {
    switch (fn.v_kind) {
        case WeakTestFunction::VKind::constant:
            return {};
        case WeakTestFunction::VKind::bump: {
            double s[3], val = 1.0;
            for (int d = 0; d < 3; ++d) {
                double u = (v[d] - fn.v_center[d]) / fn.v_width;
                s[d] = 1.0 - u * u;
                if (s[d] <= 0.0) return {};
                val *= s[d] * s[d] * s[d];
            }
            Vec3 g;
            for (int d = 0; d < 3; ++d) {
                double u = (v[d] - fn.v_center[d]) / fn.v_width;
                g[d] = val / s[d] * 3.0 * s[d] * s[d] * (-2.0 * u / fn.v_width);
            }
            return g;
        }
        case WeakTestFunction::VKind::gaussian: {
            double g = std::exp(-norm2(v - fn.v_center) / (fn.v_width * fn.v_width));
            double rr = norm(v);
            double ramp = fn.cutoff_end - fn.cutoff_start;
            double u = (fn.cutoff_end - rr) / ramp;
            double zeta = smoothstep(u);
            Vec3 grad = (v - fn.v_center) * (-2.0 / (fn.v_width * fn.v_width)) * g * zeta;
            if (u > 0.0 && u < 1.0 && rr > 0.0) {
                double ds = 30.0 * u * u * (1.0 - u) * (1.0 - u);
                grad = grad + v * (1.0 / rr) * (-ds / ramp) * g;
            }
            return grad;
        }
    }
    return {};
}

}  // namespace

double WeakTestFunction::value(double t, const Vec3& x, const Vec3& v,
                               const SpatialGrid& sg) const {
    double X = sg.dim >= 1 ? 1.0 + x_amp * std::cos(2.0 * M_PI * x.x / sg.period) : 1.0;
    return chi(t) * X * v_factor(*this, v);
}

Vec3 WeakTestFunction::grad_v(double t, const Vec3& x, const Vec3& v,
                              const SpatialGrid& sg) const {
    double X = sg.dim >= 1 ? 1.0 + x_amp * std::cos(2.0 * M_PI * x.x / sg.period) : 1.0;
    return v_factor_grad(*this, v) * (chi(t) * X);
}

double WeakTestFunction::kinetic_derivative(double t, const Vec3& x, const Vec3& v,
                                            const SpatialGrid& sg) const {
    double X = 1.0, dX = 0.0;
    if (sg.dim >= 1 && x_amp != 0.0) {
        X = 1.0 + x_amp * std::cos(2.0 * M_PI * x.x / sg.period);
        dX = -x_amp * 2.0 * M_PI / sg.period * std::sin(2.0 * M_PI * x.x / sg.period);
    }
    double V = v_factor(*this, v);
    return chi_prime(t) * X * V + chi(t) * v.x * dX * V;
}

double weak_form_pairing(const TrajectoryRecord& traj,
                         const std::vector<WeakTestFunction>& phis,
                         const CollisionKernel& kernel) {
    if (traj.snapshot_times.size() < 2)
        throw std::invalid_argument("weak_form_residual: need at least two snapshots");
    if (phis.empty()) throw std::invalid_argument("weak_form_residual: no test function");
    const double T = traj.snapshot_times.back();
    const auto& vg = traj.grid.velocity;
    const auto& sg = traj.grid.space;
    bool v_dependent = false;
    double max_t_cut = 0;
    for (const auto& phi : phis) {
        if (!(phi.t_cut < T) || phi.t_cut <= 0)
            throw std::invalid_argument("weak_form_residual: test function touches t = T");
        max_t_cut = std::max(max_t_cut, phi.t_cut);
        if (phi.v_kind != WeakTestFunction::VKind::constant) {
            v_dependent = true;
            double reach = phi.v_kind == WeakTestFunction::VKind::bump
                               ? norm(phi.v_center) + std::sqrt(3.0) * phi.v_width
                               : phi.cutoff_end;
            if (!(reach < vg.half_width))
                throw std::invalid_argument(
                    "weak_form_residual: test function touches the v boundary");
        }
    }

    const double hv3 = vg.cell_volume();
    const double hx = sg.dim == 0 ? 1.0 : sg.spacing();
    const double cell_x = sg.dim == 3 ? hx * hx * hx : (sg.dim == 1 ? hx : 1.0);

    // phase-space integral of the weak-form integrand for a field with frozen
    // coefficients at time t
    auto space_integral = [&](const DistributionField& f,
                              const std::vector<CoefficientField>& coeffs, double t) {
        double acc = 0;
        const double inv2h = 1.0 / (2.0 * vg.spacing());
        for (std::size_t ix = 0; ix < sg.cells(); ++ix) {
            Vec3 x = sg.position(ix);
            auto slice = f.slice(ix);
            for (std::size_t iv = 0; iv < vg.size(); ++iv) {
                Vec3 v = vg.velocity(iv);
                double fv = slice[iv];
                double kin = 0;
                Vec3 gphi{};
                for (const auto& phi : phis) {
                    kin += phi.kinetic_derivative(t, x, v, sg);
                    gphi = gphi + phi.grad_v(t, x, v, sg);
                }
                double term = fv * kin;
                if (v_dependent && (gphi.x != 0 || gphi.y != 0 || gphi.z != 0)) {
                    int i = static_cast<int>(iv / (vg.n * vg.n));
                    int j = static_cast<int>((iv / vg.n) % vg.n);
                    int k = static_cast<int>(iv % vg.n);
                    auto fval = [&](int a, int b, int c) {
                        if (a < 0 || a >= vg.n || b < 0 || b >= vg.n || c < 0 || c >= vg.n)
                            return 0.0;
                        return slice[vg.index(a, b, c)];
                    };
                    Vec3 gf{(fval(i + 1, j, k) - fval(i - 1, j, k)) * inv2h,
                            (fval(i, j + 1, k) - fval(i, j - 1, k)) * inv2h,
                            (fval(i, j, k + 1) - fval(i, j, k - 1)) * inv2h};
                    const auto& coeff = coeffs[ix];
                    term -= dot(gphi, coeff.a_at(iv).apply(gf));
                    term -= fv * dot(coeff.b_at(iv), gphi);
                }
                acc += term;
            }
        }
        return acc * hv3 * cell_x;
    };

    // coefficients per snapshot (linear in f, so interpolation commutes)
    std::vector<std::vector<CoefficientField>> coeffs(traj.snapshots.size());
    if (v_dependent) {
        auto engine = shared_convolution_engine(vg, kernel);
        auto ws = engine->make_workspace();
        for (std::size_t j = 0; j < traj.snapshots.size(); ++j) {
            coeffs[j].resize(sg.cells());
            auto f = traj.field_at(j);
            for (std::size_t ix = 0; ix < sg.cells(); ++ix)
                engine->compute(nonnegative_part(f.slice(ix)), coeffs[j][ix], ws);
        }
    } else {
        for (auto& cj : coeffs) cj.resize(sg.cells());
        for (auto& cj : coeffs)
            for (auto& c : cj) c = CoefficientField(vg, kernel.gamma);
    }

    auto interp_coeffs = [&](std::size_t lo, double w) {
        std::vector<CoefficientField> out = coeffs[lo];
        if (w == 0.0) return out;
        for (std::size_t ix = 0; ix < out.size(); ++ix) {
            for (int comp = 0; comp < 6; ++comp)
                for (std::size_t iv = 0; iv < vg.size(); ++iv)
                    out[ix].a[comp][iv] =
                        (1 - w) * coeffs[lo][ix].a[comp][iv] + w * coeffs[lo + 1][ix].a[comp][iv];
            for (int comp = 0; comp < 3; ++comp)
                for (std::size_t iv = 0; iv < vg.size(); ++iv)
                    out[ix].b[comp][iv] =
                        (1 - w) * coeffs[lo][ix].b[comp][iv] + w * coeffs[lo + 1][ix].b[comp][iv];
            for (std::size_t iv = 0; iv < vg.size(); ++iv)
                out[ix].c[iv] = (1 - w) * coeffs[lo][ix].c[iv] + w * coeffs[lo + 1][ix].c[iv];
        }
        return out;
    };

    // initial term
    DistributionField f0 = traj.field_at(0);
    double residual = 0;
    for (std::size_t ix = 0; ix < sg.cells(); ++ix) {
        Vec3 x = sg.position(ix);
        auto slice = f0.slice(ix);
        for (std::size_t iv = 0; iv < vg.size(); ++iv) {
            double phi0 = 0;
            for (const auto& phi : phis) phi0 += phi.value(0.0, x, vg.velocity(iv), sg);
            residual += slice[iv] * phi0;
        }
    }
    residual *= hv3 * cell_x;

    // time quadrature: Gauss-Legendre per snapshot interval, split at t_cut so
    // each piece of the piecewise-polynomial chi is integrated exactly
    static const Quadrature gl = gauss_legendre(8);
    for (std::size_t j = 0; j + 1 < traj.snapshot_times.size(); ++j) {
        double ta = traj.snapshot_times[j];
        double tb = traj.snapshot_times[j + 1];
        if (ta >= max_t_cut) break;
        // split at every interior support edge so each polynomial piece of
        // every chi is integrated exactly
        std::vector<double> knots{ta, std::min(tb, max_t_cut)};
        for (const auto& phi : phis)
            if (phi.t_cut > ta && phi.t_cut < tb) knots.push_back(phi.t_cut);
        std::sort(knots.begin(), knots.end());
        std::vector<std::pair<double, double>> pieces;
        for (std::size_t q = 0; q + 1 < knots.size(); ++q)
            if (knots[q + 1] > knots[q]) pieces.emplace_back(knots[q], knots[q + 1]);
        for (auto [lo_t, hi_t] : pieces) {
            for (std::size_t q = 0; q < gl.nodes.size(); ++q) {
                double t = lo_t + 0.5 * (hi_t - lo_t) * (gl.nodes[q] + 1.0);
                double w = (t - ta) / (tb - ta);
                DistributionField ft(traj.grid, t);
                for (std::size_t i = 0; i < ft.values.size(); ++i)
                    ft.values[i] = (1 - w) * traj.snapshots[j][i] + w * traj.snapshots[j + 1][i];
                auto cj = interp_coeffs(j, w);
                residual += 0.5 * (hi_t - lo_t) * gl.weights[q] * space_integral(ft, cj, t);
            }
        }
    }
    return residual;
}

double weak_form_residual(const TrajectoryRecord& traj, const WeakTestFunction& phi,
                          const CollisionKernel& kernel) {
    return std::abs(weak_form_pairing(traj, {phi}, kernel));
}

// ---------------------------------------------------------------------------
// Decay-norm propagation
// ---------------------------------------------------------------------------

PropagationFit linftyk_propagation_check(const TrajectoryRecord& traj, double k,
                                         const CollisionKernel& kernel) {
    PropagationFit fit;
    const auto& sg = traj.grid.space;
    auto engine = shared_convolution_engine(traj.grid.velocity, kernel);
    auto ws = engine->make_workspace();
    double psi_sup = 0, lp_sup = 0;
    double p_choice = kernel.gamma <= -2.0
                          ? (kernel.gamma == -3.0 ? std::numeric_limits<double>::infinity()
                                                  : 3.0 / (3.0 + kernel.gamma) + 0.5)
                          : 2.0;
    for (std::size_t j = 0; j < traj.snapshot_times.size(); ++j) {
        auto f = traj.field_at(j);
        fit.times.push_back(traj.snapshot_times[j]);
        fit.norms.push_back(weighted_sup_norm(f, k));
        std::vector<CoefficientField> coeffs(sg.cells());
        for (std::size_t ix = 0; ix < sg.cells(); ++ix)
            engine->compute(nonnegative_part(f.slice(ix)), coeffs[ix], ws);
        fit.K_decay = std::max(fit.K_decay, measured_coefficient_bound(coeffs));
        psi_sup = std::max(psi_sup, psi_instant(f, kernel.gamma,
                                                kernel.gamma <= -2.0 ? p_choice : 0.0));
        for (std::size_t ix = 0; ix < sg.cells(); ++ix)
            lp_sup = std::max(lp_sup, weighted_lp_norm_slice(f.slice(ix), traj.grid.velocity,
                                                             p_choice, 0.0));
    }
    fit.K_psi = psi_sup + lp_sup;
    double n0 = fit.norms.front();
    if (n0 > 0) {
        for (std::size_t j = 1; j < fit.norms.size(); ++j) {
            double t = fit.times[j];
            if (t <= 0) continue;
            double growth = std::log(std::max(fit.norms[j] / n0, 1e-300));
            if (growth > 0) {
                if (fit.K_decay > 0) fit.C_decay = std::max(fit.C_decay, growth / (fit.K_decay * t));
                if (fit.K_psi > 0) fit.C_psi = std::max(fit.C_psi, growth / (fit.K_psi * t));
            }
        }
    }
    return fit;
}

// ---------------------------------------------------------------------------
// Supersolution ODE
// ---------------------------------------------------------------------------

SupersolutionCurve integrate_supersolution(double N, double alpha, double G0,
                                           const std::vector<double>& sample_times,
                                           double rel_tol) {
    if (!(alpha > 0 && alpha < 1)) throw std::invalid_argument("supersolution: alpha in (0,1)");
    if (!(N > 0) || !(G0 >= 0)) throw std::invalid_argument("supersolution: N > 0, G0 >= 0");
    SupersolutionCurve out;
    out.N = N;
    out.alpha = alpha;
    out.G0 = G0;
    out.r = alpha * alpha / (6.0 - alpha);
    double p = 3.0 + 2.0 * alpha / 3.0 + 3.0 / alpha;
    out.power = 0.5 * (p + 1.0);

    // In u = t^r the equation is autonomous: dG/du = (N/r) (1+G)^P.
    const double rate = N / out.r;
    const double P = out.power;
    auto rhs = [&](double g) { return rate * std::pow(1.0 + g, P); };
    const double g_cap = 1e12;

    // adaptive RK4 with step halving; integrate until the cap, then close the
    // remaining (exactly solvable) tail analytically
    double u = 0, g = G0;
    double du = 1e-4 / rhs(G0);
    std::vector<std::pair<double, double>> path{{u, g}};
    auto rk4 = [&](double g_in, double h) {
        double k1 = rhs(g_in);
        double k2 = rhs(g_in + 0.5 * h * k1);
        double k3 = rhs(g_in + 0.5 * h * k2);
        double k4 = rhs(g_in + h * k3);
        return g_in + h / 6.0 * (k1 + 2 * k2 + 2 * k3 + k4);
    };
    while (g < g_cap) {
        double full = rk4(g, du);
        double half = rk4(rk4(g, 0.5 * du), 0.5 * du);
        double err = std::abs(full - half) / std::max(1.0, std::abs(half));
        if (err > rel_tol && du > 1e-300) {
            du *= 0.5;
            continue;
        }
        g = half;
        u += du;
        path.emplace_back(u, g);
        if (err < rel_tol / 64.0) du *= 2.0;
        if (!std::isfinite(g)) break;
    }
    double u_star = u + out.r * std::pow(1.0 + g, 1.0 - P) / (N * (P - 1.0));
    out.log_blow_up_time = std::log(u_star) / out.r;
    out.blow_up_time = std::exp(out.log_blow_up_time);
    if (out.blow_up_time == 0.0) out.blow_up_time = std::numeric_limits<double>::denorm_min();

    for (double t : sample_times) {
        out.times.push_back(t);
        if (t <= 0) {
            out.values.push_back(G0);
            continue;
        }
        double ut = std::pow(t, out.r);
        if (ut >= u_star) {
            out.values.push_back(std::numeric_limits<double>::infinity());
            continue;
        }
        // locate in the stored path and close the gap analytically:
        // (1+G(u2))^{1-P} = (1+G(u1))^{1-P} - (P-1)(N/r)(u2-u1)
        auto it = std::lower_bound(path.begin(), path.end(), ut,
                                   [](const auto& a, double b) { return a.first < b; });
        if (it == path.begin()) {
            out.values.push_back(G0);
            continue;
        }
        --it;
        double base = std::pow(1.0 + it->second, 1.0 - P) - (P - 1.0) * rate * (ut - it->first);
        out.values.push_back(base > 0 ? std::pow(base, 1.0 / (1.0 - P)) - 1.0
                                      : std::numeric_limits<double>::infinity());
    }
    return out;
}

HolderPropagationResult holder_propagation_check(const TrajectoryRecord& traj, double alpha,
                                                 double m, double N_max,
                                                 const HolderSampler& sampler) {
    HolderPropagationResult out;
    double f_norm = 0;
    for (std::size_t j = 0; j < traj.snapshot_times.size(); ++j)
        f_norm = std::max(f_norm, weighted_sup_norm(traj.field_at(j), m));
    for (std::size_t j = 0; j < traj.snapshot_times.size(); ++j) {
        HolderSampler s = sampler;
        s.seed = sampler.seed + j;
        auto f = traj.field_at(j);
        auto est = holder_seminorm(FieldWindow::of(f), alpha, m, HolderMetric::euclidean, s);
        out.g_sup.push_back(est.g_sup);
    }
    for (double N = 1; N <= N_max; N *= 2) {
        double G0 = 1.0 + out.g_sup.front() + N * f_norm * f_norm;
        auto curve = integrate_supersolution(N, alpha, G0, traj.snapshot_times);
        out.tried_N.push_back(N);
        out.blow_up_times.push_back(curve.blow_up_time);
        bool ok = true;
        for (std::size_t j = 0; j < traj.snapshot_times.size(); ++j) {
            if (traj.snapshot_times[j] > curve.blow_up_time) break;
            if (out.g_sup[j] > curve.values[j]) {
                ok = false;
                break;
            }
        }
        if (ok && !out.found) {
            out.found = true;
            out.N = N;
            out.T_H = std::min(curve.blow_up_time, traj.snapshot_times.back());
        }
    }
    return out;
}

// ---------------------------------------------------------------------------
// D^2_v decay fit
// ---------------------------------------------------------------------------

DecayFit d2v_decay_check(const TrajectoryRecord& traj, double alpha, double weight, double gamma,
                         double t_min, double t_max, double slack) {
    (void)gamma;
    DecayFit fit;
    fit.threshold = -1.0 + alpha * alpha / (6.0 - alpha) - slack;
    std::vector<double> lt, lv;
    for (std::size_t j = 0; j < traj.snapshot_times.size(); ++j) {
        double t = traj.snapshot_times[j];
        if (j < 3 || t < t_min || t > t_max || t <= 0) continue;
        double val = d2v_weighted_sup(traj.field_at(j), weight);
        if (val <= 0) continue;
        fit.times.push_back(t);
        fit.values.push_back(val);
        lt.push_back(std::log(t));
        lv.push_back(std::log(val));
    }
    if (lt.size() < 2) throw std::invalid_argument("d2v_decay_check: too few samples in window");
    fit.slope = fit_slope(lt, lv);
    fit.pass = fit.slope >= fit.threshold;
    return fit;
}

// ---------------------------------------------------------------------------
// Uniqueness contraction
// ---------------------------------------------------------------------------

ContractionSeries uniqueness_contraction_check(const TrajectoryRecord& a,
                                               const TrajectoryRecord& b, double alpha,
                                               double C_weight, double tolerance) {
    if (!(a.grid == b.grid)) throw std::invalid_argument("contraction: mismatched grids");
    if (a.snapshot_times.size() != b.snapshot_times.size())
        throw std::invalid_argument("contraction: mismatched snapshot times");
    const auto& vg = a.grid.velocity;
    double r0 = alpha * alpha / (6.0 - alpha);
    ContractionSeries out;
    for (std::size_t j = 0; j < a.snapshot_times.size(); ++j) {
        double t = a.snapshot_times[j];
        if (std::abs(t - b.snapshot_times[j]) > 1e-12 * std::max(1.0, std::abs(t)))
            throw std::invalid_argument("contraction: mismatched snapshot times");
        double int_r = C_weight * (2.0 * t + (t > 0 ? std::pow(t, r0) / r0 : 0.0));
        double damp = std::exp(-int_r);
        double sup_w = 0;
        const auto& fa = a.snapshots[j];
        const auto& fb = b.snapshots[j];
        const std::size_t V = vg.size();
        for (std::size_t i = 0; i < fa.size(); ++i) {
            double w = damp * (fb[i] - fa[i]);
            double br2 = bracket2(vg.velocity(i % V));
            double W = 0.5 * std::pow(br2, 5.0) * w * w;
            sup_w = std::max(sup_w, W);
        }
        out.times.push_back(t);
        out.sup_W.push_back(sup_w);
        out.max_W = std::max(out.max_W, sup_w);
        if (j > 0 && out.sup_W[j] > out.sup_W[j - 1] + tolerance) ++out.increase_violations;
    }
    return out;
}

// ---------------------------------------------------------------------------
// Analytic corpus
// ---------------------------------------------------------------------------

std::vector<CorpusFunction> analytic_corpus() {
    std::vector<CorpusFunction> c;
    auto gauss = [](double s) {
        return [s](const Vec3& v) { return std::exp(-s * norm2(v)); };
    };
    auto gauss_hess = [](double s) {
        return [s](const Vec3& v) {
            double g = std::exp(-s * norm2(v));
            SymMat3 h = SymMat3::scaled_identity(-2.0 * s * g);
            double f = 4.0 * s * s * g;
            h.xx += f * v.x * v.x;
            h.xy += f * v.x * v.y;
            h.xz += f * v.x * v.z;
            h.yy += f * v.y * v.y;
            h.yz += f * v.y * v.z;
            h.zz += f * v.z * v.z;
            return h;
        };
    };
    c.push_back({"constant", 3.0, 9, [](const Vec3&) { return 1.0; },
                 [](const Vec3&) { return SymMat3{}; }});
    c.push_back({"linear_v1", 3.0, 9, [](const Vec3& v) { return v.x; },
                 [](const Vec3&) { return SymMat3{}; }});
    c.push_back({"half_v1_sq", 3.0, 9, [](const Vec3& v) { return 0.5 * v.x * v.x; },
                 [](const Vec3&) { return SymMat3{1, 0, 0, 0, 0, 0}; }});
    c.push_back({"cross_v1v2", 3.0, 9, [](const Vec3& v) { return v.x * v.y; },
                 [](const Vec3&) { return SymMat3{0, 1, 0, 0, 0, 0}; }});
    c.push_back({"gaussian", 3.0, 9, gauss(1.0), gauss_hess(1.0)});
    c.push_back({"wide_gaussian", 3.0, 9, gauss(0.25), gauss_hess(0.25)});
    c.push_back({"narrow_gaussian", 2.0, 11, gauss(4.0), gauss_hess(4.0)});
    c.push_back({"v1_gaussian", 3.0, 9,
                 [](const Vec3& v) { return v.x * std::exp(-norm2(v)); },
                 [](const Vec3& v) {
                     double g = std::exp(-norm2(v));
                     // D^2 (x g) = x D^2 g + e1 (grad g)^T + grad g e1^T
                     SymMat3 h = SymMat3::scaled_identity(-2.0 * g * v.x);
                     double f = 4.0 * g * v.x;
                     h.xx += f * v.x * v.x;
                     h.xy += f * v.x * v.y;
                     h.xz += f * v.x * v.z;
                     h.yy += f * v.y * v.y;
                     h.yz += f * v.y * v.z;
                     h.zz += f * v.z * v.z;
                     h.xx += 2.0 * (-2.0 * v.x * g);
                     h.xy += -2.0 * v.y * g;
                     h.xz += -2.0 * v.z * g;
                     return h;
                 }});
    c.push_back({"energy_gaussian", 3.0, 9,
                 [](const Vec3& v) { return norm2(v) * std::exp(-norm2(v)); },
                 [](const Vec3& v) {
                     double r2 = norm2(v);
                     double g = std::exp(-r2);
                     // D^2 (r2 g) = (2 - 10 r2 ... ) assembled from parts
                     SymMat3 h = SymMat3::scaled_identity((2.0 - 2.0 * r2) * g);
                     double f = (4.0 * r2 - 8.0) * g;
                     h.xx += f * v.x * v.x;
                     h.xy += f * v.x * v.y;
                     h.xz += f * v.x * v.z;
                     h.yy += f * v.y * v.y;
                     h.yz += f * v.y * v.z;
                     h.zz += f * v.z * v.z;
                     return h;
                 }});
    c.push_back({"shifted_gaussian", 3.0, 9,
                 [](const Vec3& v) { return std::exp(-norm2(v - Vec3{1, 0, 0})); },
                 [](const Vec3& v) {
                     Vec3 u = v - Vec3{1, 0, 0};
                     double g = std::exp(-norm2(u));
                     SymMat3 h = SymMat3::scaled_identity(-2.0 * g);
                     double f = 4.0 * g;
                     h.xx += f * u.x * u.x;
                     h.xy += f * u.x * u.y;
                     h.xz += f * u.x * u.z;
                     h.yy += f * u.y * u.y;
                     h.yz += f * u.y * u.z;
                     h.zz += f * u.z * u.z;
                     return h;
                 }});
    c.push_back({"sin_v1", M_PI, 13, [](const Vec3& v) { return std::sin(v.x); },
                 [](const Vec3& v) { return SymMat3{-std::sin(v.x), 0, 0, 0, 0, 0}; }});
    c.push_back({"sin_10v1", M_PI, 17, [](const Vec3& v) { return std::sin(10.0 * v.x); },
                 [](const Vec3& v) {
                     return SymMat3{-100.0 * std::sin(10.0 * v.x), 0, 0, 0, 0, 0};
                 }});
    return c;
}

std::vector<InterpolationCheck> interpolation_inequality_checks(
    const std::vector<CorpusFunction>& corpus, double alpha, double beta, double C_d2,
    double C_decay) {
    if (!(beta > 0 && beta < alpha && alpha < 1))
        throw std::invalid_argument("interpolation checks: need 0 < beta < alpha < 1");
    std::vector<InterpolationCheck> out;
    for (const auto& fn : corpus) {
        InterpolationCheck chk;
        chk.name = fn.name;
        const int n = fn.samples_per_axis;
        std::vector<Vec3> pts;
        pts.reserve(static_cast<std::size_t>(n) * n * n);
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j)
                for (int k = 0; k < n; ++k) {
                    auto lin = [&](int q) { return -fn.box + 2.0 * fn.box * q / (n - 1.0); };
                    pts.push_back({lin(i), lin(j), lin(k)});
                }
        const std::size_t np = pts.size();
        std::vector<double> vals(np);
        std::vector<SymMat3> hess(np);
        double sup_d2 = 0, sup_val = 0;
        for (std::size_t i = 0; i < np; ++i) {
            vals[i] = fn.value(pts[i]);
            hess[i] = fn.hessian(pts[i]);
            sup_d2 = std::max(sup_d2, hess[i].max_abs_entry());
            sup_val = std::max(sup_val, std::abs(vals[i]));
        }
        double semi_alpha = 0, semi_hess_beta = 0, semi_val_beta = 0;
        for (std::size_t i = 0; i < np; ++i)
            for (std::size_t j = i + 1; j < np; ++j) {
                double d2 = norm2(pts[i] - pts[j]);
                double logd = 0.5 * std::log(d2);
                double da = std::exp(alpha * logd);
                double db = std::exp(beta * logd);
                double dv = std::abs(vals[i] - vals[j]);
                semi_alpha = std::max(semi_alpha, dv / da);
                semi_hess_beta =
                    std::max(semi_hess_beta, (hess[i] - hess[j]).max_abs_entry() / db);
                semi_val_beta = std::max(semi_val_beta, dv / db);
                ++chk.pairs;
            }
        double theta = beta / (2.0 + beta - alpha);
        chk.lhs_d2 = sup_d2;
        chk.rhs_d2 = C_d2 * (semi_alpha + std::pow(semi_alpha, theta) *
                                              std::pow(semi_hess_beta, 1.0 - theta));
        chk.pass_d2 = chk.lhs_d2 <= chk.rhs_d2 + 1e-12;
        chk.lhs_decay = semi_val_beta;
        chk.rhs_decay = C_decay * std::pow(semi_alpha, beta / alpha) *
                        std::pow(sup_val, 1.0 - beta / alpha);
        chk.pass_decay = chk.lhs_decay <= chk.rhs_decay + 1e-12;
        out.push_back(chk);
    }
    return out;
}

// ---------------------------------------------------------------------------
// Kinetic-in-t Holder control
// ---------------------------------------------------------------------------

namespace {

struct CellRefLocal {
    std::size_t time = 0;
    std::array<int, 3> x{0, 0, 0};
    std::array<int, 3> v{0, 0, 0};
};

PhasePoint local_point(const FieldWindow& w, const CellRefLocal& c) {
    const auto& sg = w.grid->space;
    const auto& vg = w.grid->velocity;
    PhasePoint z;
    z.t = w.times[c.time];
    if (sg.dim >= 1) z.x.x = sg.center(c.x[0]);
    if (sg.dim == 3) {
        z.x.y = sg.center(c.x[1]);
        z.x.z = sg.center(c.x[2]);
    }
    z.v = vg.velocity(c.v[0], c.v[1], c.v[2]);
    return z;
}

double local_value(const FieldWindow& w, const CellRefLocal& c) {
    const auto& sg = w.grid->space;
    const auto& vg = w.grid->velocity;
    std::size_t ix = 0;
    if (sg.dim == 1) ix = static_cast<std::size_t>(c.x[0]);
    if (sg.dim == 3) ix = (static_cast<std::size_t>(c.x[0]) * sg.n + c.x[1]) * sg.n + c.x[2];
    return w.fields[c.time][ix * vg.size() + vg.index(c.v[0], c.v[1], c.v[2])];
}

}  // namespace

HolderTfromXVResult holder_t_from_xv_check(const TrajectoryRecord& traj, double alpha,
                                           double gamma, int n_centers, std::size_t pair_budget,
                                           std::uint64_t seed, double corpus_constant) {
    if (traj.snapshot_times.size() < 2)
        throw std::invalid_argument("holder_t_from_xv_check: need a time window");
    const auto& vg = traj.grid.velocity;
    const auto& sg = traj.grid.space;
    auto window = FieldWindow::of(traj);

    double sup_f = 0;
    for (const auto& s : traj.snapshots)
        for (double x : s) sup_f = std::max(sup_f, std::abs(x));

    std::mt19937_64 rng(seed);
    auto rnd_int = [&](int lo, int hi) {
        return lo + static_cast<int>(rng() % static_cast<std::uint64_t>(hi - lo + 1));
    };

    HolderTfromXVResult out;
    const double t0 = traj.snapshot_times.back();
    for (int c = 0; c < n_centers; ++c) {
        // spread center speeds from 0 to the box diagonal
        double target = vg.half_width * c / std::max(1, n_centers - 1);
        int axis_cell = static_cast<int>((target + vg.half_width) / vg.spacing());
        axis_cell = std::clamp(axis_cell, 0, vg.n - 1);
        PhasePoint z0;
        z0.t = t0;
        z0.x = sg.position(rng() % sg.cells());
        z0.v = vg.velocity(axis_cell, vg.n / 2, vg.n / 2);

        auto sample_in_cylinder = [&](double radius, bool same_time, std::size_t budget,
                                      double& quot_max) {
            quot_max = 0;
            std::size_t got = 0;
            for (std::size_t s = 0; s < budget; ++s) {
                // candidate pair near the characteristic through z0
                auto pick = [&](std::size_t time_idx) {
                    CellRefLocal ref;
                    ref.time = time_idx;
                    double dt = window.times[time_idx] - z0.t;
                    for (int d = 0; d < (sg.dim == 3 ? 3 : (sg.dim == 1 ? 1 : 0)); ++d) {
                        double xc = z0.x[d] + dt * z0.v[d];
                        int cell = static_cast<int>(std::floor(xc / sg.spacing()));
                        int span = std::max(1, static_cast<int>(radius / sg.spacing()));
                        ref.x[d] = ((cell + rnd_int(-span, span)) % sg.n + sg.n) % sg.n;
                    }
                    for (int d = 0; d < 3; ++d) {
                        int cell = static_cast<int>((z0.v[d] + vg.half_width) / vg.spacing());
                        int span = std::max(1, static_cast<int>(radius / vg.spacing()));
                        ref.v[d] = std::clamp(cell + rnd_int(-span, span), 0, vg.n - 1);
                    }
                    return ref;
                };
                std::size_t ta = rng() % window.times.size();
                std::size_t tb = same_time ? ta : rng() % window.times.size();
                auto a = pick(ta);
                auto b = pick(tb);
                PhasePoint za = local_point(window, a);
                PhasePoint zb = local_point(window, b);
                if (kinetic_distance(z0, za, sg) >= radius ||
                    kinetic_distance(z0, zb, sg) >= radius)
                    continue;
                double dist;
                if (same_time) {
                    Vec3 dx{sg.wrap(zb.x.x - za.x.x),
                            sg.dim == 3 ? sg.wrap(zb.x.y - za.x.y) : 0.0,
                            sg.dim == 3 ? sg.wrap(zb.x.z - za.x.z) : 0.0};
                    dist = kinetic_xv_distance(dx, zb.v - za.v);
                } else {
                    dist = kinetic_distance(za, zb, sg);
                }
                if (dist <= 0) continue;
                double df = std::abs(local_value(window, b) - local_value(window, a));
                quot_max = std::max(quot_max, df / std::pow(dist, alpha));
                ++got;
            }
            return got;
        };

        double num = 0, den_semi = 0;
        sample_in_cylinder(1.0, false, pair_budget, num);
        sample_in_cylinder(2.0, true, pair_budget, den_semi);
        double weight = std::pow(bracket2(z0.v), 0.5 * alpha * pos_part(1.0 + 0.5 * gamma));
        double den = weight * (sup_f + den_semi);
        if (den <= 0) continue;
        out.center_speed.push_back(norm(z0.v));
        out.ratio.push_back(num / den);
        out.max_ratio = std::max(out.max_ratio, num / den);
    }
    out.pass = out.max_ratio <= corpus_constant;
    return out;
}

}  // namespace landau
