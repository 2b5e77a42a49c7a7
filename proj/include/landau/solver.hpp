#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "landau/coefficients.hpp"
#include "landau/grid.hpp"

namespace landau {

enum class SplittingScheme { lie, strang };
enum class CollisionForm { divergence, nondivergence };
enum class CollisionIntegrator { explicit_euler, semi_implicit_diffusion, heun };
enum class PositivityMode { clamp, off };

struct SolverConfig {
    double gamma = -1;
    double dt = 1e-3;
    double t_end = 0.1;
    SplittingScheme splitting = SplittingScheme::strang;
    CollisionForm collision_form = CollisionForm::divergence;
    CollisionIntegrator collision_integrator = CollisionIntegrator::explicit_euler;
    double k_decay = 6;        // weight of the monitored decay norm, > max{5, 15/(5+gamma)}
    double psi_threshold = 1e8;
    double psi_p = 0;          // Lebesgue exponent of the continuation functional; 0 = choose default
    double psi_tilde_ell = 0;  // weight of the older criterion's L^{1,ell}; 0 = choose default
    double mollify_eps = 0;    // 0 disables
    PositivityMode positivity = PositivityMode::clamp;
    int diag_every = 10;
    bool auto_halve_dt = true; // subcycle the collision stage when dt violates the explicit limit
    // diagnostics controls
    bool diag_ellipticity = true;
    bool diag_holder = true;
    double holder_alpha = 0.5;
    double holder_m = 5;
    int holder_pairs = 20000;
    std::uint64_t seed = 12345;

    /// All violations, empty when valid.
    std::vector<std::string> validate() const;
    /// Default continuation exponents for this gamma.
    double effective_psi_p() const;
    double effective_psi_tilde_ell() const;
};

enum class RunStatus { completed, continuation_abort, instability };

/// One diagnostics emission; the CSV column order is fixed.
struct DiagnosticsRow {
    double t = 0;
    double mass_min_x = 0, mass_max_x = 0;
    double energy_max_x = 0, entropy_max_x = 0;
    double psi = 0, psi_tilde = 0;
    double linfty_k = 0;
    double ellipticity_min = 0, ellipticity_aniso_par = 0, ellipticity_aniso_perp = 0;
    double holder_est_alpha = 0, holder_g_sup = 0;
    double d2v_weighted_sup = 0;
    double clamped_mass = 0;
    std::uint64_t seed = 0;
};

struct TrajectoryRecord {
    PhaseGrid grid;
    std::vector<double> snapshot_times;          // strictly increasing
    std::vector<std::vector<double>> snapshots;  // field values per stored time
    std::vector<DiagnosticsRow> rows;
    RunStatus status = RunStatus::completed;
    double final_time = 0;
    double clamped_mass_total = 0;

    DistributionField field_at(std::size_t j) const;
    /// Piecewise-linear-in-time field at t (clamped to the stored range).
    DistributionField interpolate(double t) const;
};

/// zeta_eps(v) * (f * psi_eps), discrete Gaussian mollifier of std dev eps in
/// (x, v), C^2 velocity cutoff supported in |v| <= 1/eps + 1. eps = 0 is the
/// identity. Rejects eps with 1/eps < h_v.
DistributionField mollify_initial_data(const DistributionField& f_in, double eps);

/// Exact free transport along characteristics: every v sheet translates by
/// -v dt in x on the torus, periodic cubic Lagrange interpolation (exact for
/// grid-aligned shifts). No-op for dim_x = 0.
DistributionField transport_step(const DistributionField& f, double dt);

/// One collision stage with frozen coefficients (one CoefficientField per x
/// slice). Explicit or semi-implicit per config; the explicit path enforces
/// dt <= 0.4 h^2 / (6 max|a|) and dt <= 0.5/max(c), subcycling when
/// auto_halve_dt is set. clamped_mass accumulates the mass removed by the
/// positivity clamp.
DistributionField collision_step(const DistributionField& f,
                                 const std::vector<CoefficientField>& coeffs, double dt,
                                 const SolverConfig& config, double reference_sup,
                                 double* clamped_mass = nullptr);

/// Full splitting step with coefficient recomputation. Strang:
/// transport(dt/2) o collision(dt) o transport(dt/2); Lie: collision o
/// transport. The heun integrator recomputes coefficients at the predictor.
class LandauStepper {
  public:
    LandauStepper(const PhaseGrid& grid, const SolverConfig& config);

    DistributionField step(const DistributionField& f, double dt);
    std::vector<CoefficientField> coefficients(const DistributionField& f) const;

    double clamped_mass() const { return clamped_mass_; }
    const CollisionKernel& kernel() const { return kernel_; }

  private:
    DistributionField collision_stage(const DistributionField& f, double dt);

    PhaseGrid grid_;
    SolverConfig config_;
    CollisionKernel kernel_;
    std::shared_ptr<const ConvolutionEngine> engine_;
    double reference_sup_ = 0;
    double clamped_mass_ = 0;
    friend TrajectoryRecord run_simulation(const DistributionField&, const SolverConfig&);
};

DistributionField strang_step(const DistributionField& f, double dt, const SolverConfig& config);

/// Mollifies, steps to t_end, emits diagnostics every diag_every steps, and
/// aborts with a distinguished status when the continuation functional
/// crosses psi_threshold or the step leaves the stable range.
TrajectoryRecord run_simulation(const DistributionField& f_in, const SolverConfig& config);

}  // namespace landau
