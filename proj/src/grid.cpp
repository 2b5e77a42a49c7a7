#include "landau/grid.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace landau {

VelocityGrid::VelocityGrid(int n_, double half_width_) : n(n_), half_width(half_width_) {
    if (n < 4) throw std::invalid_argument("VelocityGrid: need n >= 4 points per axis");
    if (!(half_width > 0.0)) throw std::invalid_argument("VelocityGrid: half_width must be > 0");
}

SpatialGrid::SpatialGrid(int dim_, int n_, double period_) : dim(dim_), n(n_), period(period_) {
    if (dim != 0 && dim != 1 && dim != 3) throw std::invalid_argument("SpatialGrid: dim must be 0, 1 or 3");
    if (dim == 0) n = 1;
    if (n < 1) throw std::invalid_argument("SpatialGrid: need n >= 1");
    if (!(period > 0.0)) throw std::invalid_argument("SpatialGrid: period must be > 0");
}

Vec3 SpatialGrid::position(std::size_t flat) const {
    if (dim == 0) return {0, 0, 0};
    if (dim == 1) return {center(static_cast<int>(flat)), 0, 0};
    int k = static_cast<int>(flat % n);
    int j = static_cast<int>((flat / n) % n);
    int i = static_cast<int>(flat / (static_cast<std::size_t>(n) * n));
    return {center(i), center(j), center(k)};
}

double DistributionField::max_abs() const {
    double m = 0;
    for (double x : values) m = std::max(m, std::abs(x));
    return m;
}

bool DistributionField::finite() const {
    for (double x : values)
        if (!std::isfinite(x)) return false;
    return true;
}

void DistributionField::validate(double tol) const {
    for (double x : values) {
        if (!std::isfinite(x)) throw std::runtime_error("DistributionField: non-finite value");
        if (x < -tol) throw std::runtime_error("DistributionField: negative density");
    }
}

DistributionField make_maxwellian(const PhaseGrid& grid, double c1, double c2) {
    if (!(c1 > 0.0)) throw std::invalid_argument("make_maxwellian: c1 must be > 0");
    if (!(c2 > 0.0)) throw std::invalid_argument("make_maxwellian: c2 must be > 0");
    DistributionField f(grid);
    const auto& vg = grid.velocity;
    std::vector<double> slice(vg.size());
    for (std::size_t iv = 0; iv < vg.size(); ++iv)
        slice[iv] = c1 * std::exp(-c2 * norm2(vg.velocity(iv)));
    for (std::size_t ix = 0; ix < grid.space.cells(); ++ix)
        std::copy(slice.begin(), slice.end(), f.slice(ix).begin());
    return f;
}

double weighted_sup_norm_slice(std::span<const double> slice, const VelocityGrid& vg, double k) {
    double m = 0;
    for (std::size_t iv = 0; iv < slice.size(); ++iv) {
        double w = std::pow(bracket2(vg.velocity(iv)), 0.5 * k);
        m = std::max(m, w * std::abs(slice[iv]));
    }
    return m;
}

double weighted_sup_norm(const DistributionField& f, double k) {
    double m = 0;
    for (std::size_t ix = 0; ix < f.grid.space.cells(); ++ix)
        m = std::max(m, weighted_sup_norm_slice(f.slice(ix), f.grid.velocity, k));
    return m;
}

double weighted_lp_norm_slice(std::span<const double> slice, const VelocityGrid& vg, double p, double k) {
    if (std::isinf(p)) return weighted_sup_norm_slice(slice, vg, k);
    if (!(p >= 1.0)) throw std::invalid_argument("weighted_lp_norm: p must be >= 1 or inf");
    double hv3 = vg.cell_volume();
    double acc = 0;
    for (std::size_t iv = 0; iv < slice.size(); ++iv) {
        double w = std::pow(bracket2(vg.velocity(iv)), 0.5 * k);
        acc += std::pow(w * std::abs(slice[iv]), p) * hv3;
    }
    return std::pow(acc, 1.0 / p);
}

std::vector<double> weighted_lp_norm_per_x(const DistributionField& f, double p, double k) {
    std::vector<double> out(f.grid.space.cells());
    for (std::size_t ix = 0; ix < out.size(); ++ix)
        out[ix] = weighted_lp_norm_slice(f.slice(ix), f.grid.velocity, p, k);
    return out;
}

double weighted_lp_norm(const DistributionField& f, double p, double k) {
    if (std::isinf(p)) return weighted_sup_norm(f, k);
    auto per_x = weighted_lp_norm_per_x(f, p, k);
    double hx = f.grid.space.dim == 0 ? 1.0 : f.grid.space.spacing();
    double cell = f.grid.space.dim == 3 ? hx * hx * hx : (f.grid.space.dim == 1 ? hx : 1.0);
    double acc = 0;
    for (double s : per_x) acc += std::pow(s, p) * cell;
    return std::pow(acc, 1.0 / p);
}

double kinetic_distance(const PhasePoint& z, const PhasePoint& z_prime, const SpatialGrid& space) {
    double dt = z_prime.t - z.t;
    Vec3 shift = z_prime.x - z.x - z.v * dt;
    Vec3 wrapped{space.wrap(shift.x),
                 space.dim == 3 ? space.wrap(shift.y) : shift.y,
                 space.dim == 3 ? space.wrap(shift.z) : shift.z};
    return std::sqrt(std::abs(dt)) + std::cbrt(norm(wrapped)) + norm(z_prime.v - z.v);
}

double kinetic_xv_distance(const Vec3& dx_wrapped, const Vec3& dv) {
    return std::cbrt(norm(dx_wrapped)) + norm(dv);
}

WellDistributedParams::WellDistributedParams(double R_, double delta_, double r_)
    : R(R_), delta(delta_), r(r_) {
    if (!(R > 0.0 && delta > 0.0 && r > 0.0))
        throw std::invalid_argument("WellDistributedParams: R, delta, r must be > 0");
}

namespace {

// Cells of the discrete ball around a candidate center, as index offsets.
struct BallStencil {
    std::vector<std::array<int, 3>> v_offsets; // velocity part under joint radius check below
};

double torus_dist2(const SpatialGrid& sg, const Vec3& a, const Vec3& b) {
    Vec3 d{sg.wrap(a.x - b.x), sg.dim == 3 ? sg.wrap(a.y - b.y) : a.y - b.y,
           sg.dim == 3 ? sg.wrap(a.z - b.z) : a.z - b.z};
    return norm2(d);
}

}  // namespace

WellDistributedReport well_distributed_check(const DistributionField& f,
                                             const WellDistributedParams& params) {
    const auto& vg = f.grid.velocity;
    const auto& sg = f.grid.space;
    if (params.r < 2.0 * vg.spacing())
        throw std::invalid_argument("well_distributed_check: ball radius r < 2 h_v is unresolvable");

    WellDistributedReport report;
    report.vacuous_radius = (sg.dim > 0 && params.R >= 0.5 * sg.period);

    // Candidate velocity centers: grid cells with |v_m| <= R.
    std::vector<std::size_t> v_candidates;
    for (std::size_t iv = 0; iv < vg.size(); ++iv)
        if (norm(vg.velocity(iv)) <= params.R) v_candidates.push_back(iv);

    const double r2 = params.r * params.r;
    const std::size_t nx = sg.cells();

    auto ball_filled = [&](std::size_t ix_m, std::size_t iv_m) {
        Vec3 xm = sg.position(ix_m);
        Vec3 vm = vg.velocity(iv_m);
        // every cell whose center lies in the joint (x,v) ball must carry >= delta
        for (std::size_t jx = 0; jx < nx; ++jx) {
            double dx2 = sg.dim == 0 ? 0.0 : torus_dist2(sg, sg.position(jx), xm);
            if (dx2 > r2) continue;
            double rem2 = r2 - dx2;
            auto slice = f.slice(jx);
            for (std::size_t jv = 0; jv < vg.size(); ++jv) {
                Vec3 dv = vg.velocity(jv) - vm;
                if (norm2(dv) <= rem2 && slice[jv] < params.delta) return false;
            }
        }
        return true;
    };

    report.witnesses.assign(nx, {});
    for (std::size_t ix = 0; ix < nx; ++ix) {
        Vec3 x = sg.position(ix);
        bool found = false;
        for (std::size_t ix_m = 0; ix_m < nx && !found; ++ix_m) {
            if (sg.dim > 0 && torus_dist2(sg, sg.position(ix_m), x) > params.R * params.R) continue;
            for (std::size_t iv_m : v_candidates) {
                if (ball_filled(ix_m, iv_m)) {
                    report.witnesses[ix] = {sg.position(ix_m), vg.velocity(iv_m)};
                    found = true;
                    break;
                }
            }
        }
        if (!found) {
            report.ok = false;
            report.first_failing_x = static_cast<std::int64_t>(ix);
            report.witnesses.clear();
            return report;
        }
    }
    report.ok = true;
    return report;
}

}  // namespace landau
