#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "landau/coefficients.hpp"
#include "landau/diagnostics.hpp"
#include "landau/grid.hpp"
#include "landau/solver.hpp"

#include "json.hpp"

namespace landau {

/// One executable check, serialized as a JSON object per the report contract.
struct CheckResult {
    std::string name;
    nlohmann::json params;
    bool pass = false;
    double margin = 0;
    nlohmann::json witness;
    std::uint64_t seed = 0;
    double runtime_ms = 0;

    nlohmann::json to_json() const;
};

// ---------------------------------------------------------------------------
// Barriers (maximum-principle supersolutions)
// ---------------------------------------------------------------------------

struct BarrierSpec {
    enum class Kind { decay, matching_upper, matching_lower };
    Kind kind = Kind::decay;
    double beta = 0;
    double k = 6;       // decay barrier weight
    double M = 0;       // matching paraboloid strength
    double rho = 0;     // matching linear-in-t slack
    double eta = 0;     // matching constant slack
    Vec3 x0{}, v0{};    // matching center
    double f_center = 0;
};

/// Barrier value at (t, x, v), closed form.
double barrier_value(const BarrierSpec& spec, double t, const Vec3& x, const Vec3& v);

/// Grid minimum of the supersolution residual: L(phi) for decay/upper barriers
/// and -L(h) for the lower barrier, with L g = (d_t + v.grad_x) g
/// - tr(a D^2_v g) - c g and the barrier differentiated analytically.
double barrier_residual(const std::vector<CoefficientField>& coeffs, const BarrierSpec& spec,
                        const PhaseGrid& grid, double t);

/// Smallest beta with nonnegative decay-barrier residual (bisection; the
/// residual is monotone increasing in beta at every grid point).
double find_supersolution_beta(const std::vector<CoefficientField>& coeffs, const PhaseGrid& grid,
                               double k, double tol = 1e-10);

/// Measured coefficient-bound constant: sup over slices of
/// max(|a|/<v>^{(gamma+2)+}, |c|).
double measured_coefficient_bound(const std::vector<CoefficientField>& coeffs);

// ---------------------------------------------------------------------------
// Gronwall-type threshold
// ---------------------------------------------------------------------------

struct GronwallResult {
    bool precondition_ok = false; // H non-decreasing and H <= A exp(B t H) sampled
    bool pass = false;            // H <= eA + tol on [0, min(T, 1/(eAB))]
    double t_star = 0;
    double max_violation = 0;
};
GronwallResult gronwall_threshold(double A, double B, const std::vector<double>& times,
                                  const std::vector<double>& H, double tol = 1e-9);

// ---------------------------------------------------------------------------
// Initial-data matching
// ---------------------------------------------------------------------------

struct MatchingResult {
    std::vector<double> times;
    std::vector<double> deviation;  // sup over the compact region of |f(t) - f_in|
    double fitted_C = 0;            // max s(t)/t over the examined decade
    bool monotone = false;
    bool asserted = false;          // false when the data is flagged discontinuous
    std::string claim_scope;
};
MatchingResult initial_matching_check(const TrajectoryRecord& traj, const DistributionField& f_in,
                                      double v_radius, bool continuous_data,
                                      std::size_t first_rows = 10);

// ---------------------------------------------------------------------------
// Weak-form residual
// ---------------------------------------------------------------------------

/// phi(t,x,v) = chi(t) X(x) V(v) with closed-form grad_v and (d_t + v.grad_x).
/// chi is a quintic step from 1 at t=0 to 0 at t_cut; X = 1 + x_amp cos(2 pi
/// x_1 / L); V is 1, a compact polynomial bump, or a Gaussian with a C^2
/// radial cutoff.
struct WeakTestFunction {
    enum class VKind { constant, bump, gaussian };
    std::string name = "phi";
    double t_cut = 0;      // support ends here; must be < trajectory end
    VKind v_kind = VKind::constant;
    Vec3 v_center{};
    double v_width = 1;          // bump half-width / Gaussian 1/e width
    double cutoff_start = 0;     // gaussian: radial cutoff ramp [start, end]
    double cutoff_end = 0;
    double x_amp = 0;

    double chi(double t) const;
    double chi_prime(double t) const;
    double value(double t, const Vec3& x, const Vec3& v, const SpatialGrid& sg) const;
    Vec3 grad_v(double t, const Vec3& x, const Vec3& v, const SpatialGrid& sg) const;
    double kinetic_derivative(double t, const Vec3& x, const Vec3& v, const SpatialGrid& sg) const;
};

/// Signed weak-form pairing int f_in phi(0) + int (f (d_t + v.grad_x) phi
/// - grad_v phi . (a grad_v f) - f b . grad_v phi) over a sum of test
/// functions; rectangle rule in (x,v), Gauss-Legendre in t over snapshot
/// intervals with linear-in-t field (and hence coefficient) interpolation.
/// Rejects test functions touching t = T or, unless v-independent, the
/// velocity boundary. The pairing is linear in the test-function set.
double weak_form_pairing(const TrajectoryRecord& traj,
                         const std::vector<WeakTestFunction>& phis,
                         const CollisionKernel& kernel);
/// Absolute residual for a single test function.
double weak_form_residual(const TrajectoryRecord& traj, const WeakTestFunction& phi,
                          const CollisionKernel& kernel);

// ---------------------------------------------------------------------------
// Decay-norm propagation
// ---------------------------------------------------------------------------

struct PropagationFit {
    double K_decay = 0;  // measured sup of the coefficient bounds
    double K_psi = 0;    // Psi + L^inf_x L^p alternative
    double C_decay = 0;  // smallest C with ||f(t)|| <= ||f_in|| e^{C K t}
    double C_psi = 0;
    std::vector<double> times;
    std::vector<double> norms;
};
PropagationFit linftyk_propagation_check(const TrajectoryRecord& traj, double k,
                                         const CollisionKernel& kernel);

// ---------------------------------------------------------------------------
// Holder propagation supersolution
// ---------------------------------------------------------------------------

/// dG/dt = N t^{-1+r} (1+G)^{(p+1)/2}, G(0) = G0, r = alpha^2/(6-alpha).
/// Integrated adaptively in the regular variable u = t^r. blow_up_time is the
/// extrapolated divergence time (finite for every N, G0 > 0).
struct SupersolutionCurve {
    double N = 0, alpha = 0, G0 = 0;
    double r = 0, power = 0;  // power = (p(alpha)+1)/2
    double blow_up_time = 0;
    double log_blow_up_time = 0;
    std::vector<double> times;
    std::vector<double> values; // G at the requested times (inf past blow-up)
};
SupersolutionCurve integrate_supersolution(double N, double alpha, double G0,
                                           const std::vector<double>& sample_times,
                                           double rel_tol = 1e-12);

struct HolderPropagationResult {
    bool found = false;
    double N = 0;
    double T_H = 0;
    std::vector<double> g_sup;          // measured series at snapshot times
    std::vector<double> tried_N;
    std::vector<double> blow_up_times;  // per tried N (comparison-principle check)
};
HolderPropagationResult holder_propagation_check(const TrajectoryRecord& traj, double alpha,
                                                 double m, double N_max,
                                                 const HolderSampler& sampler);

// ---------------------------------------------------------------------------
// D^2_v time decay
// ---------------------------------------------------------------------------

struct DecayFit {
    double slope = 0;
    double threshold = 0; // -1 + alpha^2/(6-alpha) - slack
    bool pass = false;
    std::vector<double> times;
    std::vector<double> values;
};
DecayFit d2v_decay_check(const TrajectoryRecord& traj, double alpha, double weight, double gamma,
                         double t_min, double t_max, double slack = 0.2);

// ---------------------------------------------------------------------------
// Uniqueness contraction
// ---------------------------------------------------------------------------

/// W = (1/2) <v>^10 (e^{-int r} (g - f))^2 with r(t) = C (2 + t^{-1+alpha^2/(6-alpha)}).
struct ContractionSeries {
    std::vector<double> times;
    std::vector<double> sup_W;
    double max_W = 0;
    std::size_t increase_violations = 0; // steps with W rising beyond tolerance
};
ContractionSeries uniqueness_contraction_check(const TrajectoryRecord& a,
                                               const TrajectoryRecord& b, double alpha,
                                               double C_weight, double tolerance = 0.0);

// ---------------------------------------------------------------------------
// Analytic-corpus interpolation inequalities
// ---------------------------------------------------------------------------

struct CorpusFunction {
    std::string name;
    double box = 3.0;          // sample cube [-box, box]^3
    int samples_per_axis = 9;
    std::function<double(const Vec3&)> value;
    std::function<SymMat3(const Vec3&)> hessian;
};
std::vector<CorpusFunction> analytic_corpus();

struct InterpolationCheck {
    std::string name;
    // ||D^2 phi|| <= C ([phi]_a + [phi]_a^theta [D^2 phi]_b^{1-theta}),
    // theta = beta/(2+beta-alpha)
    double lhs_d2 = 0, rhs_d2 = 0;
    bool pass_d2 = false;
    // regularity-for-size trade: [phi]_beta <= C [phi]_alpha^{beta/alpha}
    // ||phi||_inf^{1-beta/alpha}, same pair set on both sides
    double lhs_decay = 0, rhs_decay = 0;
    bool pass_decay = false;
    std::size_t pairs = 0;
};
std::vector<InterpolationCheck> interpolation_inequality_checks(
    const std::vector<CorpusFunction>& corpus, double alpha, double beta, double C_d2 = 10.0,
    double C_decay = 4.0);

// ---------------------------------------------------------------------------
// Kinetic-in-t from kinetic-in-(x,v) Holder control
// ---------------------------------------------------------------------------

struct HolderTfromXVResult {
    std::vector<double> center_speed;
    std::vector<double> ratio;
    double max_ratio = 0;
    bool pass = false; // max ratio below the corpus constant
};
HolderTfromXVResult holder_t_from_xv_check(const TrajectoryRecord& traj, double alpha,
                                           double gamma, int n_centers, std::size_t pair_budget,
                                           std::uint64_t seed, double corpus_constant = 10.0);

}  // namespace landau
