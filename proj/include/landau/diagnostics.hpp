#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "landau/coefficients.hpp"
#include "landau/grid.hpp"
#include "landau/solver.hpp"

namespace landau {

/// Mass, energy and entropy densities per x cell (rectangle-rule moments,
/// entropy with the 0 log 0 = 0 convention and a 1e-300 floor).
struct HydroFields {
    std::vector<double> mass;
    std::vector<double> energy;
    std::vector<double> entropy;
};
HydroFields hydrodynamic_fields(const DistributionField& f);

/// Instantaneous continuation functional for one snapshot:
///   gamma in (-2,0):   sup_x ||f(x,.)||_{L^{1,2}_v}
///   gamma in [-3,-2]:  sup_x ||f||_{L^1_v} + sup_x ||f||_{L^p_v}, p = inf at -3.
/// p_choice must exceed 3/(3+gamma) on the second branch.
double psi_instant(const DistributionField& f, double gamma, double p_choice);
/// Running sup over the trajectory's stored rows/snapshots.
std::vector<double> psi_series(const TrajectoryRecord& traj, double gamma, double p_choice);

/// The older criterion: gamma in (-2,0) branch identical to psi;
/// gamma in [-3,-2]: sup_x ||f||_{L^{1,ell}_v} + ||f||_{L^inf_{x,v}},
/// ell_choice > 3|gamma|/(5+gamma).
double psi_tilde_instant(const DistributionField& f, double gamma, double ell_choice);
std::vector<double> psi_tilde_series(const TrajectoryRecord& traj, double gamma, double ell_choice);

/// Time-indexed stack of fields on a shared grid (a trajectory view or a
/// single snapshot).
struct FieldWindow {
    const PhaseGrid* grid = nullptr;
    std::vector<double> times;
    std::vector<std::span<const double>> fields;

    static FieldWindow of(const DistributionField& f);
    static FieldWindow of(const TrajectoryRecord& traj);
    static FieldWindow of(const TrajectoryRecord& traj, double t_min, double t_max);
};

enum class HolderMetric { kinetic, euclidean };

struct HolderSampler {
    std::uint64_t seed = 1;
    std::size_t pairs = 100000;
    bool exhaustive = false; // all same-time grid pairs with |dx|,|dv| <= 1
    double max_offset = 1.0; // |chi|, |nu| cap for sampled pairs
};

/// Lower-bound estimate of the weighted Holder seminorm by pair sampling:
/// max <v>^m |f(z)-f(z')| / dist^alpha, dist kinetic or Euclidean-in-(x,v).
/// g_sup is the squared form with weight <v>^{2m}.
struct HolderEstimate {
    double alpha = 0;
    double weight_m = 0;
    double seminorm_value = 0;
    double g_sup = 0;
    HolderMetric metric = HolderMetric::euclidean;
    std::size_t sample_count = 0;
    std::string region;
};
HolderEstimate holder_seminorm(const FieldWindow& window, double alpha, double weight_m,
                               HolderMetric metric, const HolderSampler& sampler);

/// The Schauder bookkeeping exponents as pure functions of (alpha, gamma, k, m):
///   p(alpha) = 3 + 2 alpha/3 + 3/alpha
///   q = (2+gamma)_+ - gamma
///       + (1 - alpha^2/(6-alpha)) max{ -(2+gamma)_+ + gamma - (k-m)/3,
///                                      (2+alpha/3) p(alpha) - (k-m) }
///   q' = q(alpha, gamma, k, m - alpha(1+gamma/2)_+) + alpha(1+gamma/2)_+
/// Requires m in (max{3, 5+gamma+alpha/3}, k] (shifted accordingly for q').
struct SchauderExponents {
    double alpha = 0, gamma = 0, k = 0, m = 0;
    double p_alpha = 0;
    double q = 0;
    double q_prime = 0;
    double time_exponent = 0; // alpha^2 / (6 - alpha)
};
SchauderExponents schauder_exponents(double alpha, double gamma, double k, double m);

/// The anisotropy-normalizing change of variables at z0: S has eigenvalue
/// <v0>^{gamma/2} along v0 and <v0>^{1+gamma/2} transverse to it,
/// r1 = <v0>^{-(1+gamma/2)_+} min(1, sqrt(t0/2)).
struct KineticTransform {
    PhasePoint z0;
    double gamma = 0;
    SymMat3 S;
    SymMat3 S_inv;
    double r1 = 0;

    /// S_{z0}(delta_{r1} z) for z in cylinder coordinates.
    PhasePoint forward(const PhasePoint& z) const;
    /// Inverse map back to cylinder coordinates.
    PhasePoint inverse(const PhasePoint& z) const;
};
KineticTransform build_kinetic_transform(const PhasePoint& z0, double gamma);

/// f_{z0}(z) = f(S_{z0}(delta_{r1} z)) sampled on a uniform lattice over the
/// unit cylinder box [-1,0] x B1 x B1 (trilinear in (x,v), linear in t).
struct TransformedField {
    KineticTransform transform;
    int nt = 0, nx = 0, nv = 0;
    std::vector<PhasePoint> points; // cylinder coordinates, lattice order
    std::vector<double> values;
};
TransformedField transform_field(const FieldWindow& window, const KineticTransform& T, int nt,
                                 int nx, int nv);

/// Transformed coefficients at a cylinder point z (default center):
/// A = S^-1 a_{z0} S^-1, B = r1 S^-1 b_{z0}, C = r1^2 c_{z0}.
struct TransformedCoefficients {
    SymMat3 A;
    Vec3 B;
    double C = 0;
};
TransformedCoefficients transform_coefficients(const CoefficientField& coeff,
                                               const KineticTransform& T,
                                               const PhasePoint& z_cyl = {});

/// Largest c1 (bisection) with c1 exp(-|v|^{2-gamma}/c1) <= f on all cells
/// with |v| <= half_width/2. Returns c1 = 0 when f vanishes in that region.
struct EnvelopeFit {
    double c1 = 0;
    double residual = 0;      // min over cells of f - envelope at the fitted c1
    std::int64_t argmin = -1; // cell where the envelope binds
};
EnvelopeFit lower_bound_envelope_fit(std::span<const double> f_slice, const VelocityGrid& grid,
                                     double gamma, double tol = 1e-10);
EnvelopeFit lower_bound_envelope_fit(const DistributionField& f, double gamma, double tol = 1e-10);

/// sup over interior cells of <v>^weight max|D^2_v f| (central differences,
/// matrix max norm).
double d2v_weighted_sup(std::span<const double> f_slice, const VelocityGrid& grid, double weight);
double d2v_weighted_sup(const DistributionField& f, double weight);

}  // namespace landau
