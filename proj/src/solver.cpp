#include "landau/solver.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "landau/diagnostics.hpp"
#include "landau/parallel.hpp"

namespace landau {

std::vector<std::string> SolverConfig::validate() const {
    std::vector<std::string> errs;
    if (!(gamma >= -3.0 && gamma < 0.0)) errs.push_back("gamma must lie in [-3, 0)");
    if (!(dt > 0.0)) errs.push_back("dt must be > 0");
    if (!(t_end > 0.0)) errs.push_back("t_end must be > 0");
    if (gamma >= -3.0 && gamma < 0.0) {
        double k_min = std::max(5.0, 15.0 / (5.0 + gamma));
        if (!(k_decay > k_min))
            errs.push_back("k_decay must exceed max{5, 15/(5+gamma)} = " + std::to_string(k_min));
        if (gamma <= -2.0 && psi_p != 0.0) {
            double p_min = gamma == -3.0 ? std::numeric_limits<double>::infinity()
                                         : 3.0 / (3.0 + gamma);
            if (!(psi_p > p_min) && !(std::isinf(psi_p) && std::isinf(p_min)))
                errs.push_back("psi_p must exceed 3/(3+gamma) (infinity at gamma = -3)");
        }
        if (gamma <= -2.0 && psi_tilde_ell != 0.0) {
            if (!(psi_tilde_ell > 3.0 * std::abs(gamma) / (5.0 + gamma)))
                errs.push_back("psi_tilde_ell must exceed 3|gamma|/(5+gamma)");
        }
    }
    if (!(psi_threshold > 0.0)) errs.push_back("psi_threshold must be > 0");
    if (mollify_eps < 0.0) errs.push_back("mollify_eps must be >= 0");
    if (diag_every < 1) errs.push_back("diag_every must be >= 1");
    if (!(holder_alpha > 0.0 && holder_alpha < 1.0)) errs.push_back("holder_alpha must lie in (0,1)");
    if (holder_pairs < 1) errs.push_back("holder_pairs must be >= 1");
    return errs;
}

double SolverConfig::effective_psi_p() const {
    if (psi_p != 0.0) return psi_p;
    if (gamma == -3.0) return std::numeric_limits<double>::infinity();
    if (gamma <= -2.0) return 3.0 / (3.0 + gamma) + 0.5;
    return 0.0; // unused on the (-2,0) branch
}

double SolverConfig::effective_psi_tilde_ell() const {
    if (psi_tilde_ell != 0.0) return psi_tilde_ell;
    if (gamma <= -2.0) return 3.0 * std::abs(gamma) / (5.0 + gamma) + 0.5;
    return 2.0;
}

DistributionField TrajectoryRecord::field_at(std::size_t j) const {
    DistributionField f(grid, snapshot_times.at(j));
    f.values = snapshots.at(j);
    return f;
}

DistributionField TrajectoryRecord::interpolate(double t) const {
    if (snapshot_times.empty()) throw std::runtime_error("TrajectoryRecord: empty");
    if (t <= snapshot_times.front()) return field_at(0);
    if (t >= snapshot_times.back()) return field_at(snapshot_times.size() - 1);
    auto it = std::upper_bound(snapshot_times.begin(), snapshot_times.end(), t);
    std::size_t hi = static_cast<std::size_t>(it - snapshot_times.begin());
    std::size_t lo = hi - 1;
    double w = (t - snapshot_times[lo]) / (snapshot_times[hi] - snapshot_times[lo]);
    DistributionField f(grid, t);
    for (std::size_t i = 0; i < f.values.size(); ++i)
        f.values[i] = (1.0 - w) * snapshots[lo][i] + w * snapshots[hi][i];
    return f;
}

// ---------------------------------------------------------------------------
// Mollification
// ---------------------------------------------------------------------------

namespace {

std::vector<double> gaussian_stencil(double eps, double h) {
    int radius = std::max(1, static_cast<int>(std::ceil(4.0 * eps / h)));
    std::vector<double> w(2 * radius + 1);
    double sum = 0;
    for (int j = -radius; j <= radius; ++j) {
        double x = j * h;
        w[j + radius] = std::exp(-x * x / (2.0 * eps * eps));
        sum += w[j + radius];
    }
    for (double& x : w) x /= sum;
    return w;
}

// 1-D convolution along a strided line; zero extension or periodic wrap.
void convolve_line(const double* in, double* out, int n, std::ptrdiff_t stride,
                   const std::vector<double>& w, bool periodic) {
    int radius = static_cast<int>(w.size()) / 2;
    for (int i = 0; i < n; ++i) {
        double acc = 0;
        for (int j = -radius; j <= radius; ++j) {
            int s = i + j;
            if (periodic) {
                s = ((s % n) + n) % n;
            } else if (s < 0 || s >= n) {
                continue;
            }
            acc += w[j + radius] * in[s * stride];
        }
        out[i * stride] = acc;
    }
}

}  // namespace

DistributionField mollify_initial_data(const DistributionField& f_in, double eps) {
    if (eps < 0.0) throw std::invalid_argument("mollify_initial_data: eps must be >= 0");
    if (eps == 0.0) return f_in;
    const auto& vg = f_in.grid.velocity;
    const auto& sg = f_in.grid.space;
    if (1.0 / eps < vg.spacing())
        throw std::invalid_argument("mollify_initial_data: cutoff support 1/eps below h_v");

    DistributionField out = f_in;
    std::vector<double> scratch(out.values.size());
    const int nv = vg.n;
    const std::size_t V = vg.size();

    // velocity axes, zero extension
    auto wv = gaussian_stencil(eps, vg.spacing());
    for (int axis = 0; axis < 3; ++axis) {
        const std::ptrdiff_t stride = axis == 0 ? nv * nv : (axis == 1 ? nv : 1);
        for (std::size_t ix = 0; ix < sg.cells(); ++ix) {
            double* base = out.values.data() + ix * V;
            for (int a = 0; a < nv; ++a)
                for (int b = 0; b < nv; ++b) {
                    // line origin with the axis coordinate zeroed
                    std::size_t origin;
                    if (axis == 0) origin = static_cast<std::size_t>(a) * nv + b;
                    else if (axis == 1) origin = static_cast<std::size_t>(a) * nv * nv + b;
                    else origin = (static_cast<std::size_t>(a) * nv + b) * nv;
                    convolve_line(base + origin, scratch.data() + ix * V + origin, nv, stride, wv,
                                  false);
                }
        }
        std::swap(out.values, scratch);
    }

    // spatial axes, periodic
    if (sg.dim >= 1) {
        auto wx = gaussian_stencil(eps, sg.spacing());
        const int nx = sg.n;
        const int n_axes = sg.dim == 1 ? 1 : 3;
        for (int axis = 0; axis < n_axes; ++axis) {
            std::ptrdiff_t stride_cells = 1;
            for (int a = axis + 1; a < n_axes; ++a) stride_cells *= nx;
            const std::ptrdiff_t stride = stride_cells * static_cast<std::ptrdiff_t>(V);
            // enumerate lines by iterating all cells and keeping axis index 0
            for (std::size_t flat = 0; flat < sg.cells(); ++flat) {
                std::size_t axis_index = (flat / stride_cells) % nx;
                if (axis_index != 0) continue;
                for (std::size_t iv = 0; iv < V; ++iv) {
                    std::size_t origin = flat * V + iv;
                    convolve_line(out.values.data() + origin, scratch.data() + origin, nx, stride,
                                  wx, true);
                }
            }
            std::swap(out.values, scratch);
        }
    }

    // velocity cutoff, 1 on |v| <= 1/eps, 0 beyond 1/eps + 1
    for (std::size_t iv = 0; iv < V; ++iv) {
        double zeta = smoothstep(1.0 / eps + 1.0 - norm(vg.velocity(iv)));
        if (zeta == 1.0) continue;
        for (std::size_t ix = 0; ix < sg.cells(); ++ix) out.at(ix, iv) *= zeta;
    }
    return out;
}

// ---------------------------------------------------------------------------
// Transport
// ---------------------------------------------------------------------------

namespace {

// Periodic cubic Lagrange shift of a strided line by sigma cells.
void shift_line(const double* in, double* out, int n, std::ptrdiff_t stride, double sigma) {
    double p0 = -sigma; // continuous source coordinate for output index 0
    double q = std::floor(p0);
    double theta = p0 - q;
    int base = static_cast<int>(q);
    if (theta == 0.0) {
        for (int i = 0; i < n; ++i) {
            int s = ((i + base) % n + n) % n;
            out[i * stride] = in[s * stride];
        }
        return;
    }
    double wm1 = -theta * (theta - 1.0) * (theta - 2.0) / 6.0;
    double w0 = (theta * theta - 1.0) * (theta - 2.0) / 2.0;
    double w1 = -theta * (theta + 1.0) * (theta - 2.0) / 2.0;
    double w2 = theta * (theta * theta - 1.0) / 6.0;
    for (int i = 0; i < n; ++i) {
        int j0 = i + base;
        int sm1 = ((j0 - 1) % n + n) % n;
        int s0 = (sm1 + 1) % n;
        int s1 = (s0 + 1) % n;
        int s2 = (s1 + 1) % n;
        out[i * stride] = wm1 * in[sm1 * stride] + w0 * in[s0 * stride] + w1 * in[s1 * stride] +
                          w2 * in[s2 * stride];
    }
}

}  // namespace

DistributionField transport_step(const DistributionField& f, double dt) {
    const auto& sg = f.grid.space;
    if (sg.dim == 0 || dt == 0.0) return f;
    const auto& vg = f.grid.velocity;
    const std::size_t V = vg.size();
    const int nx = sg.n;
    const double hx = sg.spacing();

    DistributionField out = f; // caller owns the clock
    std::vector<double> scratch(out.values.size());
    const int n_axes = sg.dim == 1 ? 1 : 3;
    for (int axis = 0; axis < n_axes; ++axis) {
        std::ptrdiff_t stride_cells = 1;
        for (int a = axis + 1; a < n_axes; ++a) stride_cells *= nx;
        const std::ptrdiff_t stride = stride_cells * static_cast<std::ptrdiff_t>(V);
        parallel_for(V, [&](std::size_t iv, int) {
            double sigma = vg.velocity(iv)[axis] * dt / hx;
            for (std::size_t flat = 0; flat < sg.cells(); ++flat) {
                std::size_t axis_index = (flat / stride_cells) % nx;
                if (axis_index != 0) continue;
                std::size_t origin = flat * V + iv;
                shift_line(out.values.data() + origin, scratch.data() + origin, nx, stride, sigma);
            }
        });
        std::swap(out.values, scratch);
    }
    return out;
}

// ---------------------------------------------------------------------------
// Collision stage
// ---------------------------------------------------------------------------

namespace {

struct SliceOperator {
    const VelocityGrid& vg;
    const CoefficientField& coeff;
    std::span<const double> f;

    double fval(int i, int j, int k) const {
        if (i < 0 || i >= vg.n || j < 0 || j >= vg.n || k < 0 || k >= vg.n) return 0.0;
        return f[vg.index(i, j, k)];
    }
};

// Conservative flux divergence of F = a grad f + b f, zero flux outside the
// box. Tangential derivatives at a face average the adjacent central
// differences (ghost cells at zero).
void divergence_form_rhs(const SliceOperator& op, std::span<double> rhs) {
    const int n = op.vg.n;
    const double h = op.vg.spacing();
    const double inv_h = 1.0 / h;
    std::fill(rhs.begin(), rhs.end(), 0.0);
    static const int row_comp[3][3] = {{0, 1, 2}, {1, 3, 4}, {2, 4, 5}};

    for (int axis = 0; axis < 3; ++axis) {
        const int t1 = (axis + 1) % 3, t2 = (axis + 2) % 3;
        auto cell = [&](int a, int b, int c) {
            int ijk[3];
            ijk[axis] = a;
            ijk[t1] = b;
            ijk[t2] = c;
            return std::array<int, 3>{ijk[0], ijk[1], ijk[2]};
        };
        for (int a = 0; a < n - 1; ++a)
            for (int b = 0; b < n; ++b)
                for (int c = 0; c < n; ++c) {
                    auto L = cell(a, b, c);
                    auto R = cell(a + 1, b, c);
                    std::size_t li = op.vg.index(L[0], L[1], L[2]);
                    std::size_t ri = op.vg.index(R[0], R[1], R[2]);
                    double fL = op.f[li], fR = op.f[ri];
                    // normal derivative and face states
                    double df_n = (fR - fL) * inv_h;
                    double f_face = 0.5 * (fL + fR);
                    double flux = 0.0;
                    // a_axis,axis
                    double a_nn = 0.5 * (op.coeff.a[row_comp[axis][axis]][li] +
                                         op.coeff.a[row_comp[axis][axis]][ri]);
                    flux += a_nn * df_n;
                    // tangential parts
                    for (int tdir : {t1, t2}) {
                        double a_nt = 0.5 * (op.coeff.a[row_comp[axis][tdir]][li] +
                                             op.coeff.a[row_comp[axis][tdir]][ri]);
                        int dijk[3] = {0, 0, 0};
                        dijk[tdir] = 1;
                        double gL = (op.fval(L[0] + dijk[0], L[1] + dijk[1], L[2] + dijk[2]) -
                                     op.fval(L[0] - dijk[0], L[1] - dijk[1], L[2] - dijk[2])) *
                                    (0.5 * inv_h);
                        double gR = (op.fval(R[0] + dijk[0], R[1] + dijk[1], R[2] + dijk[2]) -
                                     op.fval(R[0] - dijk[0], R[1] - dijk[1], R[2] - dijk[2])) *
                                    (0.5 * inv_h);
                        flux += a_nt * 0.5 * (gL + gR);
                    }
                    double b_face = 0.5 * (op.coeff.b[axis][li] + op.coeff.b[axis][ri]);
                    flux += b_face * f_face;
                    rhs[li] += flux * inv_h;
                    rhs[ri] -= flux * inv_h;
                }
    }
}

// tr(a D^2 f) + c f with central differences; stencils shift inward at the
// boundary (one-sided second differences).
void nondivergence_form_rhs(const SliceOperator& op, std::span<double> rhs) {
    const int n = op.vg.n;
    const double h = op.vg.spacing();
    const double inv_h2 = 1.0 / (h * h);
    static const int row_comp[3][3] = {{0, 1, 2}, {1, 3, 4}, {2, 4, 5}};

    auto clamp_center = [&](int i) { return std::min(std::max(i, 1), n - 2); };
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j)
            for (int k = 0; k < n; ++k) {
                std::size_t iv = op.vg.index(i, j, k);
                int ci = clamp_center(i), cj = clamp_center(j), ck = clamp_center(k);
                double acc = 0.0;
                // diagonal second differences
                acc += op.coeff.a[row_comp[0][0]][iv] *
                       (op.fval(ci + 1, j, k) - 2.0 * op.fval(ci, j, k) + op.fval(ci - 1, j, k));
                acc += op.coeff.a[row_comp[1][1]][iv] *
                       (op.fval(i, cj + 1, k) - 2.0 * op.fval(i, cj, k) + op.fval(i, cj - 1, k));
                acc += op.coeff.a[row_comp[2][2]][iv] *
                       (op.fval(i, j, ck + 1) - 2.0 * op.fval(i, j, ck) + op.fval(i, j, ck - 1));
                // cross terms, centered at the clamped point
                double dxy = 0.25 * (op.fval(ci + 1, cj + 1, k) - op.fval(ci + 1, cj - 1, k) -
                                     op.fval(ci - 1, cj + 1, k) + op.fval(ci - 1, cj - 1, k));
                double dxz = 0.25 * (op.fval(ci + 1, j, ck + 1) - op.fval(ci + 1, j, ck - 1) -
                                     op.fval(ci - 1, j, ck + 1) + op.fval(ci - 1, j, ck - 1));
                double dyz = 0.25 * (op.fval(i, cj + 1, ck + 1) - op.fval(i, cj + 1, ck - 1) -
                                     op.fval(i, cj - 1, ck + 1) + op.fval(i, cj - 1, ck - 1));
                acc += 2.0 * (op.coeff.a[1][iv] * dxy + op.coeff.a[2][iv] * dxz +
                              op.coeff.a[4][iv] * dyz);
                rhs[iv] = acc * inv_h2 + op.coeff.c[iv] * op.f[iv];
            }
}

// Thomas solve of (I - dt A_axis) x = rhs along every line of one axis, where
// A_axis is the diagonal diffusion part (flux form with face-averaged a_nn for
// the divergence form, cell-centered a_nn D^2 otherwise).
void implicit_axis_sweep(const VelocityGrid& vg, const CoefficientField& coeff, int axis,
                         double dt, CollisionForm form, std::vector<double>& values,
                         std::vector<double>& lower, std::vector<double>& diag,
                         std::vector<double>& upper, std::vector<double>& rhs_line) {
    const int n = vg.n;
    const double h = vg.spacing();
    const double r = dt / (h * h);
    static const int diag_comp[3] = {0, 3, 5};
    const auto& a_nn = coeff.a[diag_comp[axis]];
    const int t1 = (axis + 1) % 3, t2 = (axis + 2) % 3;

    for (int b = 0; b < n; ++b)
        for (int c = 0; c < n; ++c) {
            auto idx = [&](int a) {
                int ijk[3];
                ijk[axis] = a;
                ijk[t1] = b;
                ijk[t2] = c;
                return vg.index(ijk[0], ijk[1], ijk[2]);
            };
            for (int a = 0; a < n; ++a) {
                double am = 0, ap = 0;
                if (form == CollisionForm::divergence) {
                    if (a > 0) am = 0.5 * (a_nn[idx(a)] + a_nn[idx(a - 1)]);
                    if (a < n - 1) ap = 0.5 * (a_nn[idx(a)] + a_nn[idx(a + 1)]);
                } else {
                    // one-sided stencils at the ends mirror the explicit operator
                    am = ap = a_nn[idx(std::min(std::max(a, 1), n - 2))];
                    if (a == 0) am = 0;
                    if (a == n - 1) ap = 0;
                }
                lower[a] = -r * am;
                upper[a] = -r * ap;
                diag[a] = 1.0 + r * (am + ap);
                rhs_line[a] = values[idx(a)];
            }
            // forward elimination
            for (int a = 1; a < n; ++a) {
                double m = lower[a] / diag[a - 1];
                diag[a] -= m * upper[a - 1];
                rhs_line[a] -= m * rhs_line[a - 1];
            }
            double xn = rhs_line[n - 1] / diag[n - 1];
            values[idx(n - 1)] = xn;
            for (int a = n - 2; a >= 0; --a) {
                xn = (rhs_line[a] - upper[a] * xn) / diag[a];
                values[idx(a)] = xn;
            }
        }
}

// Explicit diagonal diffusion part matching implicit_axis_sweep, used to
// subtract the implicit piece from the full operator.
void diagonal_diffusion_rhs(const SliceOperator& op, CollisionForm form, std::span<double> rhs) {
    const int n = op.vg.n;
    const double h = op.vg.spacing();
    const double inv_h2 = 1.0 / (h * h);
    static const int diag_comp[3] = {0, 3, 5};
    std::fill(rhs.begin(), rhs.end(), 0.0);
    for (int axis = 0; axis < 3; ++axis) {
        const auto& a_nn = op.coeff.a[diag_comp[axis]];
        const int t1 = (axis + 1) % 3, t2 = (axis + 2) % 3;
        for (int a = 0; a < n; ++a)
            for (int b = 0; b < n; ++b)
                for (int c = 0; c < n; ++c) {
                    int ijk[3];
                    ijk[axis] = a;
                    ijk[t1] = b;
                    ijk[t2] = c;
                    std::size_t iv = op.vg.index(ijk[0], ijk[1], ijk[2]);
                    auto at = [&](int s) {
                        int p[3] = {ijk[0], ijk[1], ijk[2]};
                        p[axis] = s;
                        if (p[axis] < 0 || p[axis] >= n) return 0.0;
                        return op.f[op.vg.index(p[0], p[1], p[2])];
                    };
                    double am = 0, ap = 0;
                    if (form == CollisionForm::divergence) {
                        auto ann_at = [&](int s) {
                            int p[3] = {ijk[0], ijk[1], ijk[2]};
                            p[axis] = s;
                            return a_nn[op.vg.index(p[0], p[1], p[2])];
                        };
                        if (a > 0) am = 0.5 * (ann_at(a) + ann_at(a - 1));
                        if (a < n - 1) ap = 0.5 * (ann_at(a) + ann_at(a + 1));
                    } else {
                        int cc = std::min(std::max(a, 1), n - 2);
                        int p[3] = {ijk[0], ijk[1], ijk[2]};
                        p[axis] = cc;
                        am = ap = a_nn[op.vg.index(p[0], p[1], p[2])];
                        if (a == 0) am = 0;
                        if (a == n - 1) ap = 0;
                    }
                    rhs[iv] += (ap * (at(a + 1) - at(a)) - am * (at(a) - at(a - 1))) * inv_h2;
                }
    }
}

double explicit_dt_limit(const std::vector<CoefficientField>& coeffs, const VelocityGrid& vg) {
    double max_a = 0, max_c = 0;
    for (const auto& coeff : coeffs) {
        for (std::size_t iv = 0; iv < vg.size(); ++iv) {
            max_a = std::max(max_a, coeff.a_at(iv).max_abs_entry());
            max_c = std::max(max_c, std::abs(coeff.c[iv]));
        }
    }
    double h = vg.spacing();
    double limit = std::numeric_limits<double>::infinity();
    if (max_a > 0) limit = 0.4 * h * h / (6.0 * max_a);
    if (max_c > 0) limit = std::min(limit, 0.5 / max_c);
    return limit;
}

}  // namespace

DistributionField collision_step(const DistributionField& f,
                                 const std::vector<CoefficientField>& coeffs, double dt,
                                 const SolverConfig& config, double reference_sup,
                                 double* clamped_mass) {
    const auto& vg = f.grid.velocity;
    const std::size_t nx = f.grid.space.cells();
    if (coeffs.size() != nx)
        throw std::invalid_argument("collision_step: one CoefficientField per x slice required");
    if (dt == 0.0) return f;

    const bool implicit = config.collision_integrator == CollisionIntegrator::semi_implicit_diffusion;
    int substeps = 1;
    if (!implicit) {
        double limit = explicit_dt_limit(coeffs, vg);
        if (dt > limit) {
            if (!config.auto_halve_dt)
                throw std::runtime_error("collision_step: dt exceeds the explicit stability limit");
            substeps = static_cast<int>(std::ceil(dt / limit));
        }
    }
    const double sub_dt = dt / substeps;

    DistributionField out = f;
    std::vector<double> clamped_per_slice(nx, 0.0);
    parallel_for(nx, [&](std::size_t ix, int) {
        auto slice = out.slice(ix);
        std::vector<double> rhs(vg.size());
        std::vector<double> diag_part(vg.size());
        std::vector<double> lower(vg.n), diagv(vg.n), upper(vg.n), line(vg.n);
        for (int s = 0; s < substeps; ++s) {
            SliceOperator op{vg, coeffs[ix], slice};
            if (config.collision_form == CollisionForm::divergence)
                divergence_form_rhs(op, rhs);
            else
                nondivergence_form_rhs(op, rhs);
            if (implicit) {
                diagonal_diffusion_rhs(op, config.collision_form, diag_part);
                for (std::size_t iv = 0; iv < vg.size(); ++iv)
                    slice[iv] += sub_dt * (rhs[iv] - diag_part[iv]);
                std::vector<double> work(slice.begin(), slice.end());
                for (int axis = 0; axis < 3; ++axis)
                    implicit_axis_sweep(vg, coeffs[ix], axis, sub_dt, config.collision_form, work,
                                        lower, diagv, upper, line);
                std::copy(work.begin(), work.end(), slice.begin());
            } else {
                for (std::size_t iv = 0; iv < vg.size(); ++iv) slice[iv] += sub_dt * rhs[iv];
            }
            if (config.positivity == PositivityMode::clamp) {
                double removed = 0;
                for (auto& x : slice)
                    if (x < 0.0) {
                        removed -= x;
                        x = 0.0;
                    }
                clamped_per_slice[ix] += removed * vg.cell_volume();
            }
        }
    });
    if (clamped_mass)
        for (double m : clamped_per_slice) *clamped_mass += m;

    double bound = 1e3 * std::max(reference_sup, 1e-300);
    for (double x : out.values)
        if (!std::isfinite(x) || std::abs(x) > bound)
            throw std::runtime_error("collision_step: numerical instability detected");
    return out;
}

// ---------------------------------------------------------------------------
// Stepper
// ---------------------------------------------------------------------------

LandauStepper::LandauStepper(const PhaseGrid& grid, const SolverConfig& config)
    : grid_(grid), config_(config), kernel_(CollisionKernel::standard(config.gamma)) {
    auto errs = config.validate();
    if (!errs.empty()) throw std::invalid_argument("SolverConfig: " + errs.front());
    engine_ = shared_convolution_engine(grid.velocity, kernel_);
}

std::vector<CoefficientField> LandauStepper::coefficients(const DistributionField& f) const {
    const std::size_t nx = grid_.space.cells();
    const std::size_t V = grid_.velocity.size();
    std::vector<CoefficientField> coeffs(nx);
    int workers = worker_count();
    std::vector<ConvolutionEngine::Workspace> ws;
    ws.reserve(workers);
    for (int w = 0; w < workers; ++w) ws.push_back(engine_->make_workspace());
    // the convolutions see the nonnegative part; in clamp-off mode the state
    // may carry tiny negative excursions that are reported, not evolved into
    // the (positive semidefinite) coefficients
    std::vector<std::vector<double>> clipped(workers, std::vector<double>(V));
    parallel_for(nx, [&](std::size_t ix, int w) {
        auto slice = f.slice(ix);
        auto& buf = clipped[w];
        for (std::size_t iv = 0; iv < V; ++iv) buf[iv] = std::max(slice[iv], 0.0);
        engine_->compute(buf, coeffs[ix], ws[w]);
        coeffs[ix].time = f.time;
        coeffs[ix].x_index = static_cast<std::int64_t>(ix);
    });
    return coeffs;
}

DistributionField LandauStepper::collision_stage(const DistributionField& f, double dt) {
    if (reference_sup_ == 0.0) reference_sup_ = f.max_abs();
    auto coeffs = coefficients(f);
    if (config_.collision_integrator == CollisionIntegrator::heun) {
        // explicit trapezoid with coefficient refresh at the predictor
        SolverConfig euler_cfg = config_;
        euler_cfg.collision_integrator = CollisionIntegrator::explicit_euler;
        euler_cfg.positivity = PositivityMode::off;
        DistributionField predictor = collision_step(f, coeffs, dt, euler_cfg, reference_sup_);
        auto coeffs2 = coefficients(predictor);
        DistributionField half_a = collision_step(f, coeffs, 0.5 * dt, euler_cfg, reference_sup_);
        DistributionField half_b =
            collision_step(predictor, coeffs2, 0.5 * dt, euler_cfg, reference_sup_);
        // out = f + dt/2 (Q(f) + Q(f*)) assembled from the Euler half steps:
        // half_a = f + dt/2 Q(f), half_b = f* + dt/2 Q(f*), f* = f + dt Q(f)
        DistributionField out = f;
        for (std::size_t i = 0; i < out.values.size(); ++i)
            out.values[i] = half_a.values[i] + (half_b.values[i] - predictor.values[i]);
        if (config_.positivity == PositivityMode::clamp) {
            double removed = 0;
            for (auto& x : out.values)
                if (x < 0.0) {
                    removed -= x;
                    x = 0.0;
                }
            clamped_mass_ += removed * grid_.velocity.cell_volume();
        }
        return out;
    }
    return collision_step(f, coeffs, dt, config_, reference_sup_, &clamped_mass_);
}

DistributionField LandauStepper::step(const DistributionField& f, double dt) {
    if (dt == 0.0) return f;
    if (grid_.space.dim == 0) {
        DistributionField out = collision_stage(f, dt);
        out.time = f.time + dt;
        return out;
    }
    DistributionField out;
    if (config_.splitting == SplittingScheme::strang) {
        out = transport_step(f, 0.5 * dt);
        out = collision_stage(out, dt);
        out = transport_step(out, 0.5 * dt);
    } else {
        out = transport_step(f, dt);
        out = collision_stage(out, dt);
    }
    out.time = f.time + dt;
    return out;
}

DistributionField strang_step(const DistributionField& f, double dt, const SolverConfig& config) {
    LandauStepper stepper(f.grid, config);
    return stepper.step(f, dt);
}

// ---------------------------------------------------------------------------
// Full run
// ---------------------------------------------------------------------------

namespace {

DiagnosticsRow make_diag_row(const DistributionField& f, const SolverConfig& config,
                             const LandauStepper& stepper, double psi_running,
                             double psi_tilde_running, double clamped_total, std::uint64_t step) {
    DiagnosticsRow row;
    row.t = f.time;
    auto hydro = hydrodynamic_fields(f);
    auto [mn, mx] = std::minmax_element(hydro.mass.begin(), hydro.mass.end());
    row.mass_min_x = *mn;
    row.mass_max_x = *mx;
    row.energy_max_x = *std::max_element(hydro.energy.begin(), hydro.energy.end());
    row.entropy_max_x = *std::max_element(hydro.entropy.begin(), hydro.entropy.end());
    row.psi = psi_running;
    row.psi_tilde = psi_tilde_running;
    row.linfty_k = weighted_sup_norm(f, config.k_decay);
    if (config.diag_ellipticity) {
        double lmin = std::numeric_limits<double>::infinity();
        double par = 0, perp = 0;
        auto coeffs = stepper.coefficients(f);
        for (const auto& coeff : coeffs) {
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
    } else {
        row.ellipticity_min = row.ellipticity_aniso_par = row.ellipticity_aniso_perp =
            std::numeric_limits<double>::quiet_NaN();
    }
    row.holder_est_alpha = config.holder_alpha;
    if (config.diag_holder) {
        HolderSampler sampler;
        sampler.seed = config.seed ^ (0x9e3779b97f4a7c15ull * (step + 1));
        sampler.pairs = static_cast<std::size_t>(config.holder_pairs);
        auto est = holder_seminorm(FieldWindow::of(f), config.holder_alpha, config.holder_m,
                                   HolderMetric::euclidean, sampler);
        row.holder_g_sup = est.g_sup;
    } else {
        row.holder_g_sup = std::numeric_limits<double>::quiet_NaN();
    }
    row.d2v_weighted_sup =
        d2v_weighted_sup(f, config.holder_m + pos_part(config.gamma + 2.0));
    row.clamped_mass = clamped_total;
    row.seed = config.seed;
    return row;
}

}  // namespace

TrajectoryRecord run_simulation(const DistributionField& f_in, const SolverConfig& config) {
    auto errs = config.validate();
    if (!errs.empty()) throw std::invalid_argument("run_simulation: " + errs.front());
    f_in.validate();

    TrajectoryRecord traj;
    traj.grid = f_in.grid;
    LandauStepper stepper(f_in.grid, config);

    DistributionField f = mollify_initial_data(f_in, config.mollify_eps);
    f.time = 0;
    stepper.reference_sup_ = std::max(f.max_abs(), 1e-300);

    const double p_choice = config.effective_psi_p();
    const double ell_choice = config.effective_psi_tilde_ell();
    double psi_running = 0, psi_tilde_running = 0;

    auto emit = [&](const DistributionField& state, std::uint64_t step) {
        psi_running = std::max(psi_running, psi_instant(state, config.gamma, p_choice));
        psi_tilde_running =
            std::max(psi_tilde_running, psi_tilde_instant(state, config.gamma, ell_choice));
        traj.rows.push_back(make_diag_row(state, config, stepper, psi_running, psi_tilde_running,
                                          stepper.clamped_mass(), step));
        traj.snapshot_times.push_back(state.time);
        traj.snapshots.push_back(state.values);
    };

    emit(f, 0);
    traj.final_time = 0;
    if (psi_running > config.psi_threshold) {
        traj.status = RunStatus::continuation_abort;
        traj.clamped_mass_total = stepper.clamped_mass();
        return traj;
    }

    const double t_end = config.t_end;
    std::uint64_t step = 0;
    double t = 0;
    while (t < t_end - 1e-12 * t_end) {
        double dt = std::min(config.dt, t_end - t);
        DistributionField next;
        try {
            next = stepper.step(f, dt);
        } catch (const std::runtime_error&) {
            traj.status = RunStatus::instability;
            break;
        }
        if (!next.finite()) {
            traj.status = RunStatus::instability;
            break;
        }
        f = std::move(next);
        t = f.time;
        ++step;
        bool last = !(t < t_end - 1e-12 * t_end);
        if (step % static_cast<std::uint64_t>(config.diag_every) == 0 || last) {
            emit(f, step);
            traj.final_time = t;
            if (psi_running > config.psi_threshold) {
                traj.status = RunStatus::continuation_abort;
                break;
            }
        }
        traj.final_time = t;
    }
    traj.clamped_mass_total = stepper.clamped_mass();
    return traj;
}

}  // namespace landau
