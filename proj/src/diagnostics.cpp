#include "landau/diagnostics.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <stdexcept>

namespace landau {

HydroFields hydrodynamic_fields(const DistributionField& f) {
    const auto& vg = f.grid.velocity;
    const double hv3 = vg.cell_volume();
    HydroFields out;
    const std::size_t nx = f.grid.space.cells();
    out.mass.resize(nx);
    out.energy.resize(nx);
    out.entropy.resize(nx);
    for (std::size_t ix = 0; ix < nx; ++ix) {
        auto slice = f.slice(ix);
        double m = 0, e = 0, h = 0;
        for (std::size_t iv = 0; iv < vg.size(); ++iv) {
            double val = slice[iv];
            m += val;
            e += val * norm2(vg.velocity(iv));
            if (val > 0.0) h += val * std::log(std::max(val, 1e-300));
        }
        out.mass[ix] = m * hv3;
        out.energy[ix] = e * hv3;
        out.entropy[ix] = h * hv3;
    }
    return out;
}

namespace {

void check_psi_exponent(double gamma, double p_choice) {
    if (gamma > -2.0) return;
    if (gamma == -3.0) {
        if (!std::isinf(p_choice))
            throw std::invalid_argument("psi: p must be infinity at gamma = -3");
        return;
    }
    if (!(p_choice > 3.0 / (3.0 + gamma)))
        throw std::invalid_argument("psi: p must exceed 3/(3+gamma)");
}

}  // namespace

double psi_instant(const DistributionField& f, double gamma, double p_choice) {
    check_psi_exponent(gamma, p_choice);
    const std::size_t nx = f.grid.space.cells();
    if (gamma > -2.0) {
        double m = 0;
        for (std::size_t ix = 0; ix < nx; ++ix)
            m = std::max(m, weighted_lp_norm_slice(f.slice(ix), f.grid.velocity, 1.0, 2.0));
        return m;
    }
    double m1 = 0, mp = 0;
    for (std::size_t ix = 0; ix < nx; ++ix) {
        m1 = std::max(m1, weighted_lp_norm_slice(f.slice(ix), f.grid.velocity, 1.0, 0.0));
        mp = std::max(mp, weighted_lp_norm_slice(f.slice(ix), f.grid.velocity, p_choice, 0.0));
    }
    return m1 + mp;
}

std::vector<double> psi_series(const TrajectoryRecord& traj, double gamma, double p_choice) {
    std::vector<double> out;
    out.reserve(traj.snapshot_times.size());
    double running = 0;
    for (std::size_t j = 0; j < traj.snapshot_times.size(); ++j) {
        running = std::max(running, psi_instant(traj.field_at(j), gamma, p_choice));
        out.push_back(running);
    }
    return out;
}

double psi_tilde_instant(const DistributionField& f, double gamma, double ell_choice) {
    if (gamma > -2.0) return psi_instant(f, gamma, 0.0);
    if (!(ell_choice > 3.0 * std::abs(gamma) / (5.0 + gamma)))
        throw std::invalid_argument("psi_tilde: ell must exceed 3|gamma|/(5+gamma)");
    const std::size_t nx = f.grid.space.cells();
    double m1 = 0;
    for (std::size_t ix = 0; ix < nx; ++ix)
        m1 = std::max(m1, weighted_lp_norm_slice(f.slice(ix), f.grid.velocity, 1.0, ell_choice));
    return m1 + weighted_sup_norm(f, 0.0);
}

std::vector<double> psi_tilde_series(const TrajectoryRecord& traj, double gamma,
                                     double ell_choice) {
    std::vector<double> out;
    out.reserve(traj.snapshot_times.size());
    double running = 0;
    for (std::size_t j = 0; j < traj.snapshot_times.size(); ++j) {
        running = std::max(running, psi_tilde_instant(traj.field_at(j), gamma, ell_choice));
        out.push_back(running);
    }
    return out;
}

// ---------------------------------------------------------------------------
// Field windows and Holder estimation
// ---------------------------------------------------------------------------

FieldWindow FieldWindow::of(const DistributionField& f) {
    FieldWindow w;
    w.grid = &f.grid;
    w.times = {f.time};
    w.fields = {std::span<const double>(f.values)};
    return w;
}

FieldWindow FieldWindow::of(const TrajectoryRecord& traj) {
    FieldWindow w;
    w.grid = &traj.grid;
    w.times = traj.snapshot_times;
    for (const auto& s : traj.snapshots) w.fields.emplace_back(s);
    return w;
}

FieldWindow FieldWindow::of(const TrajectoryRecord& traj, double t_min, double t_max) {
    FieldWindow w;
    w.grid = &traj.grid;
    for (std::size_t j = 0; j < traj.snapshot_times.size(); ++j) {
        double t = traj.snapshot_times[j];
        if (t < t_min || t > t_max) continue;
        w.times.push_back(t);
        w.fields.emplace_back(traj.snapshots[j]);
    }
    return w;
}

namespace {

struct CellRef {
    std::size_t time = 0;
    std::array<int, 3> x{0, 0, 0};
    std::array<int, 3> v{0, 0, 0};
};

double window_value(const FieldWindow& w, const CellRef& c) {
    const auto& sg = w.grid->space;
    const auto& vg = w.grid->velocity;
    std::size_t ix = 0;
    if (sg.dim == 1) ix = static_cast<std::size_t>(c.x[0]);
    if (sg.dim == 3)
        ix = (static_cast<std::size_t>(c.x[0]) * sg.n + c.x[1]) * sg.n + c.x[2];
    std::size_t iv = vg.index(c.v[0], c.v[1], c.v[2]);
    return w.fields[c.time][ix * vg.size() + iv];
}

PhasePoint cell_point(const FieldWindow& w, const CellRef& c) {
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

int wrap_index(int i, int n) { return ((i % n) + n) % n; }

}  // namespace

HolderEstimate holder_seminorm(const FieldWindow& window, double alpha, double weight_m,
                               HolderMetric metric, const HolderSampler& sampler) {
    if (!(alpha > 0.0 && alpha < 1.0))
        throw std::invalid_argument("holder_seminorm: alpha must lie in (0,1)");
    if (window.fields.empty()) throw std::invalid_argument("holder_seminorm: empty window");
    const auto& sg = window.grid->space;
    const auto& vg = window.grid->velocity;

    HolderEstimate est;
    est.alpha = alpha;
    est.weight_m = weight_m;
    est.metric = metric;
    est.region = "full-grid";

    const int mv = std::max(1, static_cast<int>(std::floor(sampler.max_offset / vg.spacing())));
    const int mx = sg.dim == 0
                       ? 0
                       : std::max(1, static_cast<int>(std::floor(sampler.max_offset / sg.spacing())));

    double best = 0;
    std::size_t count = 0;

    auto consider = [&](const CellRef& a, const CellRef& b) {
        PhasePoint za = cell_point(window, a);
        PhasePoint zb = cell_point(window, b);
        double dist;
        if (metric == HolderMetric::kinetic) {
            dist = kinetic_distance(za, zb, sg);
        } else {
            Vec3 dx{sg.wrap(zb.x.x - za.x.x), sg.dim == 3 ? sg.wrap(zb.x.y - za.x.y) : 0.0,
                    sg.dim == 3 ? sg.wrap(zb.x.z - za.x.z) : 0.0};
            dist = std::sqrt(norm2(dx) + norm2(zb.v - za.v));
        }
        if (dist == 0.0) return;
        double df = window_value(window, b) - window_value(window, a);
        double q = std::pow(bracket2(za.v), 0.5 * weight_m) * std::abs(df) / std::pow(dist, alpha);
        best = std::max(best, q);
        ++count;
    };

    if (sampler.exhaustive) {
        if (window.grid->cells() > 262144)
            throw std::invalid_argument("holder_seminorm: grid too large for exhaustive pairs");
        for (std::size_t tj = 0; tj < window.fields.size(); ++tj)
            for (int i = 0; i < vg.n; ++i)
                for (int j = 0; j < vg.n; ++j)
                    for (int k = 0; k < vg.n; ++k)
                        for (int di = -mv; di <= mv; ++di)
                            for (int dj = -mv; dj <= mv; ++dj)
                                for (int dk = 0; dk <= mv; ++dk) {
                                    if (dk == 0 && (di < 0 || (di == 0 && dj <= 0))) continue;
                                    int i2 = i + di, j2 = j + dj, k2 = k + dk;
                                    if (i2 < 0 || i2 >= vg.n || j2 < 0 || j2 >= vg.n || k2 >= vg.n)
                                        continue;
                                    CellRef a{tj, {0, 0, 0}, {i, j, k}};
                                    CellRef b{tj, {0, 0, 0}, {i2, j2, k2}};
                                    consider(a, b);
                                }
    } else {
        std::mt19937_64 rng(sampler.seed);
        auto rnd_int = [&](int lo, int hi) {
            return lo + static_cast<int>(rng() % static_cast<std::uint64_t>(hi - lo + 1));
        };
        for (std::size_t s = 0; s < sampler.pairs; ++s) {
            CellRef a;
            a.time = window.fields.size() > 1 ? rng() % window.fields.size() : 0;
            for (int d = 0; d < (sg.dim == 3 ? 3 : (sg.dim == 1 ? 1 : 0)); ++d)
                a.x[d] = rnd_int(0, sg.n - 1);
            for (int d = 0; d < 3; ++d) a.v[d] = rnd_int(0, vg.n - 1);

            CellRef b = a;
            if (metric == HolderMetric::kinetic && window.fields.size() > 1)
                b.time = rng() % window.fields.size();
            bool moved = b.time != a.time;
            for (int d = 0; d < (sg.dim == 3 ? 3 : (sg.dim == 1 ? 1 : 0)); ++d) {
                int off = rnd_int(-mx, mx);
                if (metric == HolderMetric::kinetic) {
                    // recenter near the characteristic so the transported
                    // difference stays within the sampling window
                    double dt = window.times[b.time] - window.times[a.time];
                    off += static_cast<int>(std::lround(cell_point(window, a).v[d] * dt / sg.spacing()));
                }
                if (off != 0) moved = true;
                b.x[d] = wrap_index(a.x[d] + off, sg.n);
            }
            for (int d = 0; d < 3; ++d) {
                int off = rnd_int(-mv, mv);
                int t = a.v[d] + off;
                if (t < 0 || t >= vg.n) t = a.v[d];
                if (t != a.v[d]) moved = true;
                b.v[d] = t;
            }
            if (!moved) continue;
            consider(a, b);
        }
    }
    if (count == 0) throw std::runtime_error("holder_seminorm: empty sample set");
    est.seminorm_value = best;
    est.g_sup = best * best;
    est.sample_count = count;
    return est;
}

// ---------------------------------------------------------------------------
// Schauder exponents
// ---------------------------------------------------------------------------

SchauderExponents schauder_exponents(double alpha, double gamma, double k, double m) {
    if (!(alpha > 0.0 && alpha < 1.0))
        throw std::invalid_argument("schauder_exponents: alpha must lie in (0,1)");
    double m_floor = std::max(3.0, 5.0 + gamma + alpha / 3.0);
    if (!(m > m_floor && m <= k))
        throw std::invalid_argument("schauder_exponents: need m in (max{3, 5+gamma+alpha/3}, k]");

    auto q_of = [&](double mm) {
        double p = 3.0 + 2.0 * alpha / 3.0 + 3.0 / alpha;
        double te = alpha * alpha / (6.0 - alpha);
        double tilde = std::max(-pos_part(2.0 + gamma) + gamma - (k - mm) / 3.0,
                                (2.0 + alpha / 3.0) * p - (k - mm));
        return pos_part(2.0 + gamma) - gamma + (1.0 - te) * tilde;
    };

    SchauderExponents e;
    e.alpha = alpha;
    e.gamma = gamma;
    e.k = k;
    e.m = m;
    e.p_alpha = 3.0 + 2.0 * alpha / 3.0 + 3.0 / alpha;
    e.time_exponent = alpha * alpha / (6.0 - alpha);
    e.q = q_of(m);
    double shift = alpha * pos_part(1.0 + gamma / 2.0);
    double m_shifted = m - shift;
    e.q_prime = m_shifted > m_floor ? q_of(m_shifted) + shift
                                    : std::numeric_limits<double>::quiet_NaN();
    return e;
}

// ---------------------------------------------------------------------------
// Kinetic change of variables
// ---------------------------------------------------------------------------

KineticTransform build_kinetic_transform(const PhasePoint& z0, double gamma) {
    if (!(z0.t > 0.0)) throw std::invalid_argument("build_kinetic_transform: t0 must be > 0");
    KineticTransform T;
    T.z0 = z0;
    T.gamma = gamma;
    double br = bracket(z0.v);
    double par = std::pow(br, 0.5 * gamma);        // along v0
    double perp = std::pow(br, 1.0 + 0.5 * gamma); // transverse
    double nv = norm(z0.v);
    if (nv == 0.0) {
        T.S = SymMat3::scaled_identity(1.0);
        T.S_inv = SymMat3::scaled_identity(1.0);
    } else {
        Vec3 u = z0.v * (1.0 / nv);
        auto rank_one = [&](double s_par, double s_perp) {
            SymMat3 m = SymMat3::scaled_identity(s_perp);
            double d = s_par - s_perp;
            m.xx += d * u.x * u.x;
            m.xy += d * u.x * u.y;
            m.xz += d * u.x * u.z;
            m.yy += d * u.y * u.y;
            m.yz += d * u.y * u.z;
            m.zz += d * u.z * u.z;
            return m;
        };
        T.S = rank_one(par, perp);
        T.S_inv = rank_one(1.0 / par, 1.0 / perp);
    }
    T.r1 = std::pow(br, -pos_part(1.0 + 0.5 * gamma)) * std::min(1.0, std::sqrt(0.5 * z0.t));
    return T;
}

PhasePoint KineticTransform::forward(const PhasePoint& z) const {
    double ts = r1 * r1 * z.t;
    PhasePoint out;
    out.t = z0.t + ts;
    out.x = z0.x + S.apply(z.x * (r1 * r1 * r1)) + z0.v * ts;
    out.v = z0.v + S.apply(z.v * r1);
    return out;
}

PhasePoint KineticTransform::inverse(const PhasePoint& z) const {
    double dt = z.t - z0.t;
    PhasePoint out;
    out.t = dt / (r1 * r1);
    out.v = S_inv.apply(z.v - z0.v) * (1.0 / r1);
    out.x = S_inv.apply(z.x - z0.x - z0.v * dt) * (1.0 / (r1 * r1 * r1));
    return out;
}

namespace {

// Multilinear interpolation of a stored field at (x, v), zero-extended in v,
// periodic in x.
double interp_slice_xv(const FieldWindow& w, std::size_t tj, const Vec3& x, const Vec3& v) {
    const auto& sg = w.grid->space;
    const auto& vg = w.grid->velocity;
    const int n_xaxes = sg.dim == 3 ? 3 : (sg.dim == 1 ? 1 : 0);

    // velocity weights
    double hv = vg.spacing();
    int base_v[3];
    double wv[3];
    for (int d = 0; d < 3; ++d) {
        double u = (v[d] + vg.half_width) / hv - 0.5;
        double fl = std::floor(u);
        base_v[d] = static_cast<int>(fl);
        wv[d] = u - fl;
    }
    int base_x[3] = {0, 0, 0};
    double wx[3] = {0, 0, 0};
    for (int d = 0; d < n_xaxes; ++d) {
        double u = x[d] / sg.spacing() - 0.5;
        double fl = std::floor(u);
        base_x[d] = static_cast<int>(fl);
        wx[d] = u - fl;
    }

    double acc = 0;
    const int x_corners = 1 << n_xaxes;
    for (int cx = 0; cx < x_corners; ++cx) {
        double weight_x = 1.0;
        std::array<int, 3> ix{0, 0, 0};
        for (int d = 0; d < n_xaxes; ++d) {
            int bit = (cx >> d) & 1;
            weight_x *= bit ? wx[d] : 1.0 - wx[d];
            ix[d] = wrap_index(base_x[d] + bit, sg.n);
        }
        std::size_t flat_x = 0;
        if (sg.dim == 1) flat_x = static_cast<std::size_t>(ix[0]);
        if (sg.dim == 3)
            flat_x = (static_cast<std::size_t>(ix[0]) * sg.n + ix[1]) * sg.n + ix[2];
        for (int cv = 0; cv < 8; ++cv) {
            double weight = weight_x;
            std::array<int, 3> iv{};
            bool outside = false;
            for (int d = 0; d < 3; ++d) {
                int bit = (cv >> d) & 1;
                weight *= bit ? wv[d] : 1.0 - wv[d];
                iv[d] = base_v[d] + bit;
                if (iv[d] < 0 || iv[d] >= vg.n) outside = true;
            }
            if (outside || weight == 0.0) continue;
            acc += weight *
                   w.fields[tj][flat_x * vg.size() + vg.index(iv[0], iv[1], iv[2])];
        }
    }
    return acc;
}

double interp_window(const FieldWindow& w, const PhasePoint& z) {
    if (w.times.size() == 1) return interp_slice_xv(w, 0, z.x, z.v);
    auto it = std::upper_bound(w.times.begin(), w.times.end(), z.t);
    if (it == w.times.begin()) return interp_slice_xv(w, 0, z.x, z.v);
    if (it == w.times.end()) return interp_slice_xv(w, w.times.size() - 1, z.x, z.v);
    std::size_t hi = static_cast<std::size_t>(it - w.times.begin());
    std::size_t lo = hi - 1;
    double wt = (z.t - w.times[lo]) / (w.times[hi] - w.times[lo]);
    return (1.0 - wt) * interp_slice_xv(w, lo, z.x, z.v) +
           wt * interp_slice_xv(w, hi, z.x, z.v);
}

}  // namespace

TransformedField transform_field(const FieldWindow& window, const KineticTransform& T, int nt,
                                 int nx, int nv) {
    if (window.fields.empty()) throw std::invalid_argument("transform_field: empty window");
    double t_earliest = T.z0.t - T.r1 * T.r1;
    if (t_earliest < window.times.front() - 1e-12)
        throw std::invalid_argument("transform_field: stored window does not cover the cylinder");

    TransformedField out;
    out.transform = T;
    out.nt = nt;
    out.nx = nx;
    out.nv = nv;
    out.points.reserve(static_cast<std::size_t>(nt) * nx * nx * nx * nv * nv * nv);
    auto lin = [](int i, int n, double lo, double hi) {
        return n == 1 ? 0.5 * (lo + hi) : lo + (hi - lo) * i / (n - 1.0);
    };
    for (int it = 0; it < nt; ++it)
        for (int i = 0; i < nx; ++i)
            for (int j = 0; j < nx; ++j)
                for (int k = 0; k < nx; ++k)
                    for (int a = 0; a < nv; ++a)
                        for (int b = 0; b < nv; ++b)
                            for (int c = 0; c < nv; ++c) {
                                PhasePoint z;
                                z.t = lin(it, nt, -1.0, 0.0);
                                z.x = {lin(i, nx, -1, 1), lin(j, nx, -1, 1), lin(k, nx, -1, 1)};
                                z.v = {lin(a, nv, -1, 1), lin(b, nv, -1, 1), lin(c, nv, -1, 1)};
                                out.points.push_back(z);
                                out.values.push_back(interp_window(window, T.forward(z)));
                            }
    return out;
}

TransformedCoefficients transform_coefficients(const CoefficientField& coeff,
                                               const KineticTransform& T,
                                               const PhasePoint& z_cyl) {
    PhasePoint pre = T.forward(z_cyl);
    const auto& vg = coeff.grid;
    // trilinear sample of each component at the preimage velocity
    double hv = vg.spacing();
    int base[3];
    double w[3];
    for (int d = 0; d < 3; ++d) {
        double u = (pre.v[d] + vg.half_width) / hv - 0.5;
        double fl = std::floor(u);
        base[d] = static_cast<int>(fl);
        w[d] = u - fl;
    }
    auto sample = [&](const std::vector<double>& comp) {
        double acc = 0;
        for (int c = 0; c < 8; ++c) {
            double weight = 1.0;
            int iv[3];
            bool outside = false;
            for (int d = 0; d < 3; ++d) {
                int bit = (c >> d) & 1;
                weight *= bit ? w[d] : 1.0 - w[d];
                iv[d] = base[d] + bit;
                if (iv[d] < 0 || iv[d] >= vg.n) outside = true;
            }
            if (!outside && weight != 0.0) acc += weight * comp[vg.index(iv[0], iv[1], iv[2])];
        }
        return acc;
    };
    SymMat3 abar{sample(coeff.a[0]), sample(coeff.a[1]), sample(coeff.a[2]),
                 sample(coeff.a[3]), sample(coeff.a[4]), sample(coeff.a[5])};
    Vec3 bbar{sample(coeff.b[0]), sample(coeff.b[1]), sample(coeff.b[2])};
    TransformedCoefficients out;
    out.A = sandwich(T.S_inv, abar);
    out.B = T.S_inv.apply(bbar) * T.r1;
    out.C = T.r1 * T.r1 * sample(coeff.c);
    return out;
}

// ---------------------------------------------------------------------------
// Lower-bound envelope and velocity Hessian
// ---------------------------------------------------------------------------

EnvelopeFit lower_bound_envelope_fit(std::span<const double> f_slice, const VelocityGrid& grid,
                                     double gamma, double tol) {
    const double r_max = 0.5 * grid.half_width;
    std::vector<std::size_t> cells;
    for (std::size_t iv = 0; iv < grid.size(); ++iv)
        if (norm(grid.velocity(iv)) <= r_max) cells.push_back(iv);
    if (cells.empty()) throw std::invalid_argument("lower_bound_envelope_fit: empty region");

    EnvelopeFit fit;
    for (std::size_t iv : cells)
        if (f_slice[iv] <= 0.0) return fit; // interior zero: no positive envelope fits

    auto envelope_ok = [&](double c1) {
        for (std::size_t iv : cells) {
            double e = c1 * std::exp(-std::pow(norm(grid.velocity(iv)), 2.0 - gamma) / c1);
            if (e > f_slice[iv]) return false;
        }
        return true;
    };

    double hi = 1.0;
    for (std::size_t iv : cells) hi = std::max(hi, f_slice[iv]);
    hi *= 2.0;
    if (!envelope_ok(tol)) return fit;
    double lo = tol;
    while (envelope_ok(hi)) {
        lo = hi;
        hi *= 2.0;
        if (hi > 1e300) break;
    }
    while (hi - lo > tol * std::max(1.0, hi)) {
        double mid = 0.5 * (lo + hi);
        if (envelope_ok(mid))
            lo = mid;
        else
            hi = mid;
    }
    fit.c1 = lo;
    fit.residual = std::numeric_limits<double>::infinity();
    for (std::size_t iv : cells) {
        double e = fit.c1 * std::exp(-std::pow(norm(grid.velocity(iv)), 2.0 - gamma) / fit.c1);
        double gap = f_slice[iv] - e;
        if (gap < fit.residual) {
            fit.residual = gap;
            fit.argmin = static_cast<std::int64_t>(iv);
        }
    }
    return fit;
}

EnvelopeFit lower_bound_envelope_fit(const DistributionField& f, double gamma, double tol) {
    EnvelopeFit worst;
    worst.c1 = std::numeric_limits<double>::infinity();
    for (std::size_t ix = 0; ix < f.grid.space.cells(); ++ix) {
        auto fit = lower_bound_envelope_fit(f.slice(ix), f.grid.velocity, gamma, tol);
        if (fit.c1 < worst.c1) worst = fit;
    }
    return worst;
}

double d2v_weighted_sup(std::span<const double> f_slice, const VelocityGrid& grid, double weight) {
    if (grid.n < 8) throw std::invalid_argument("d2v_weighted_sup: need n_v >= 8");
    const int n = grid.n;
    const double inv_h2 = 1.0 / (grid.spacing() * grid.spacing());
    double best = 0;
    for (int i = 1; i < n - 1; ++i)
        for (int j = 1; j < n - 1; ++j)
            for (int k = 1; k < n - 1; ++k) {
                auto f = [&](int a, int b, int c) { return f_slice[grid.index(a, b, c)]; };
                double hxx = f(i + 1, j, k) - 2 * f(i, j, k) + f(i - 1, j, k);
                double hyy = f(i, j + 1, k) - 2 * f(i, j, k) + f(i, j - 1, k);
                double hzz = f(i, j, k + 1) - 2 * f(i, j, k) + f(i, j, k - 1);
                double hxy = 0.25 * (f(i + 1, j + 1, k) - f(i + 1, j - 1, k) -
                                     f(i - 1, j + 1, k) + f(i - 1, j - 1, k));
                double hxz = 0.25 * (f(i + 1, j, k + 1) - f(i + 1, j, k - 1) -
                                     f(i - 1, j, k + 1) + f(i - 1, j, k - 1));
                double hyz = 0.25 * (f(i, j + 1, k + 1) - f(i, j + 1, k - 1) -
                                     f(i, j - 1, k + 1) + f(i, j - 1, k - 1));
                double m = 0;
                for (double t : {hxx, hyy, hzz, hxy, hxz, hyz}) m = std::max(m, std::abs(t));
                double w = std::pow(bracket2(grid.velocity(i, j, k)), 0.5 * weight);
                best = std::max(best, w * m * inv_h2);
            }
    return best;
}

double d2v_weighted_sup(const DistributionField& f, double weight) {
    double best = 0;
    for (std::size_t ix = 0; ix < f.grid.space.cells(); ++ix)
        best = std::max(best, d2v_weighted_sup(f.slice(ix), f.grid.velocity, weight));
    return best;
}

}  // namespace landau
