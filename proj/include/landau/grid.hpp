#pragma once

#include <cstdint>
#include <limits>
#include <span>
#include <string>
#include <vector>

#include "landau/geometry.hpp"

namespace landau {

/// Cell-centered uniform cube [-half_width, half_width]^3. The density is
/// treated as zero outside the box.
struct VelocityGrid {
    int n = 0;             // points per axis, >= 4
    double half_width = 0; // > 0

    VelocityGrid() = default;
    VelocityGrid(int n_, double half_width_);

    double spacing() const { return 2.0 * half_width / n; }
    std::size_t size() const { return static_cast<std::size_t>(n) * n * n; }

    double center(int i) const { return -half_width + (i + 0.5) * spacing(); }
    Vec3 velocity(int i, int j, int k) const { return {center(i), center(j), center(k)}; }
    Vec3 velocity(std::size_t flat) const {
        int k = static_cast<int>(flat % n);
        int j = static_cast<int>((flat / n) % n);
        int i = static_cast<int>(flat / (static_cast<std::size_t>(n) * n));
        return velocity(i, j, k);
    }
    std::size_t index(int i, int j, int k) const {
        return (static_cast<std::size_t>(i) * n + j) * n + k;
    }
    double cell_volume() const { double h = spacing(); return h * h * h; }

    bool operator==(const VelocityGrid&) const = default;
};

/// Periodic spatial torus. dim 0 encodes the homogeneous mode (one cell);
/// dim 1 varies along the first axis only; dim 3 is the full torus.
struct SpatialGrid {
    int dim = 0;       // 0, 1 or 3
    int n = 1;         // points per active axis
    double period = 1; // torus period per axis

    SpatialGrid() = default;
    SpatialGrid(int dim_, int n_, double period_);

    std::size_t cells() const {
        if (dim == 0) return 1;
        if (dim == 1) return static_cast<std::size_t>(n);
        return static_cast<std::size_t>(n) * n * n;
    }
    double spacing() const { return period / n; }
    double center(int i) const { return (i + 0.5) * spacing(); }

    /// Minimal-image representative of a coordinate difference on the torus.
    double wrap(double dx) const {
        if (dim == 0) return dx;
        double L = period;
        dx = std::fmod(dx, L);
        if (dx > 0.5 * L) dx -= L;
        if (dx < -0.5 * L) dx += L;
        return dx;
    }

    Vec3 position(std::size_t flat) const;

    bool operator==(const SpatialGrid&) const = default;
};

struct PhaseGrid {
    SpatialGrid space;
    VelocityGrid velocity;

    std::size_t cells() const { return space.cells() * velocity.size(); }
    bool operator==(const PhaseGrid&) const = default;
};

/// z = (t, x, v)
struct PhasePoint {
    double t = 0;
    Vec3 x{};
    Vec3 v{};
};

/// Snapshot of the solution f(t,.,.) >= 0 on a phase grid, x-major then v.
struct DistributionField {
    PhaseGrid grid;
    double time = 0;
    std::vector<double> values;

    DistributionField() = default;
    explicit DistributionField(const PhaseGrid& g, double t = 0.0)
        : grid(g), time(t), values(g.cells(), 0.0) {}

    double& at(std::size_t ix, std::size_t iv) { return values[ix * grid.velocity.size() + iv]; }
    double at(std::size_t ix, std::size_t iv) const { return values[ix * grid.velocity.size() + iv]; }

    std::span<double> slice(std::size_t ix) {
        return {values.data() + ix * grid.velocity.size(), grid.velocity.size()};
    }
    std::span<const double> slice(std::size_t ix) const {
        return {values.data() + ix * grid.velocity.size(), grid.velocity.size()};
    }

    double max_abs() const;
    bool finite() const;
    /// Throws if any value is negative beyond -tol, or non-finite.
    void validate(double tol = 0.0) const;
};

/// f(x,v) = c1 exp(-c2 |v|^2), x-independent. Rejects non-positive c1, c2.
DistributionField make_maxwellian(const PhaseGrid& grid, double c1, double c2);

/// sup over cells of <v>^k |f|.
double weighted_sup_norm(const DistributionField& f, double k);
double weighted_sup_norm_slice(std::span<const double> slice, const VelocityGrid& vg, double k);

/// Discrete L^{p,k} norm with rectangle-rule quadrature (p = inf allowed).
double weighted_lp_norm(const DistributionField& f, double p, double k);
/// v-only norm at each x slice (the building block of the continuation functional).
std::vector<double> weighted_lp_norm_per_x(const DistributionField& f, double p, double k);
double weighted_lp_norm_slice(std::span<const double> slice, const VelocityGrid& vg, double p, double k);

/// |t'-t|^{1/2} + |x'-x-(t'-t)v|^{1/3} + |v'-v|, with the x-difference wrapped
/// to the minimal torus image.
double kinetic_distance(const PhasePoint& z, const PhasePoint& z_prime, const SpatialGrid& space);

/// Time-sliced kinetic (x,v)-metric: |dx|^{1/3} + |dv|.
double kinetic_xv_distance(const Vec3& dx_wrapped, const Vec3& dv);

struct WellDistributedParams {
    double R = 0;     // search radius for (x_m, v_m)
    double delta = 0; // required lower density
    double r = 0;     // ball radius

    WellDistributedParams() = default;
    WellDistributedParams(double R_, double delta_, double r_);
};

struct WellDistributedWitness {
    Vec3 x_m{};
    Vec3 v_m{};
};

struct WellDistributedReport {
    bool ok = false;
    /// R >= period/2 makes the x-search vacuous on the torus; flagged, not silent.
    bool vacuous_radius = false;
    std::vector<WellDistributedWitness> witnesses; // one per x cell on success
    std::int64_t first_failing_x = -1;
};

/// For every x cell, search for (x_m, v_m) with dist(x, x_m) <= R (torus),
/// |v_m| <= R, and f >= delta on every cell of the discrete ball B_r(x_m, v_m).
/// Candidate centers are grid cell centers. Rejects r < 2 h_v.
WellDistributedReport well_distributed_check(const DistributionField& f,
                                             const WellDistributedParams& params);

}  // namespace landau
