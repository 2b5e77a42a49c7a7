#pragma once

#include <array>
#include <memory>
#include <span>
#include <vector>

#include "landau/geometry.hpp"
#include "landau/grid.hpp"

namespace landau {

/// Kernel data for the nonlocal coefficients. Soft potentials only:
/// gamma in [-3, 0). The default constants are the unique normalization
/// (up to overall scale) under which b = -div_v(a) and c = div_v(b) hold,
/// with the local form c = 8 pi f in the Coulomb case gamma = -3.
struct CollisionKernel {
    double gamma = -1;
    double a_const = 1;
    double b_const = 2;
    double c_const = 4; // 2(gamma+3) at the default gamma

    static CollisionKernel standard(double gamma);
    void validate() const;
    bool coulomb() const { return gamma == -3.0; }
};

/// a-bar (symmetric 3x3), b-bar (3-vector), c-bar (scalar) per velocity cell,
/// at a fixed (t, x) slice.
struct CoefficientField {
    VelocityGrid grid;
    double gamma = -1;
    double time = 0;
    std::int64_t x_index = 0;
    std::array<std::vector<double>, 6> a; // xx xy xz yy yz zz
    std::array<std::vector<double>, 3> b; // x y z
    std::vector<double> c;

    CoefficientField() = default;
    CoefficientField(const VelocityGrid& g, double gamma_);

    SymMat3 a_at(std::size_t iv) const {
        return {a[0][iv], a[1][iv], a[2][iv], a[3][iv], a[4][iv], a[5][iv]};
    }
    Vec3 b_at(std::size_t iv) const { return {b[0][iv], b[1][iv], b[2][iv]}; }
};

/// Average of |u|^r over the unit cube [-1/2,1/2]^3, r > -3. Dyadic-shell
/// reduction plus tensor Gauss-Legendre; near machine precision.
double cube_average_power(double r);

/// Tabulated kernel on the (2n-1)^3 offset lattice, origin regularized with
/// the exact cell average. Shared by the direct sum and the FFT path, so the
/// two compute the same discrete sum.
struct KernelTable {
    VelocityGrid grid;
    CollisionKernel kernel;
    int m = 0; // 2n-1 offsets per axis; offset d indexes at d + n - 1
    std::array<std::vector<double>, 6> a;
    std::array<std::vector<double>, 3> b;
    std::vector<double> c; // unused for gamma = -3 (local form)

    std::size_t index(int di, int dj, int dk) const {
        return (static_cast<std::size_t>(di + grid.n - 1) * m + (dj + grid.n - 1)) * m +
               (dk + grid.n - 1);
    }
};

KernelTable build_kernel_table(const VelocityGrid& grid, const CollisionKernel& kernel);

/// O(n^6) reference evaluation of the coefficient convolutions. Oracle path.
CoefficientField compute_coefficients_direct(std::span<const double> f_slice,
                                             const VelocityGrid& grid,
                                             const CollisionKernel& kernel);
CoefficientField compute_coefficients_direct(std::span<const double> f_slice,
                                             const KernelTable& table);

/// FFT convolution path, zero padded to 2n per axis so the circular product
/// equals the linear sum. Identical output contract as the direct path.
class ConvolutionEngine {
  public:
    ConvolutionEngine(const VelocityGrid& grid, const CollisionKernel& kernel);
    ~ConvolutionEngine();
    ConvolutionEngine(const ConvolutionEngine&) = delete;
    ConvolutionEngine& operator=(const ConvolutionEngine&) = delete;

    /// Per-thread scratch (FFT buffers and plans). Make one per worker.
    class Workspace {
      public:
        ~Workspace();
        Workspace(Workspace&&) noexcept;
        Workspace& operator=(Workspace&&) = delete;

      private:
        friend class ConvolutionEngine;
        explicit Workspace(const ConvolutionEngine& e);
        struct Impl;
        std::unique_ptr<Impl> impl;
    };

    Workspace make_workspace() const;
    void compute(std::span<const double> f_slice, CoefficientField& out, Workspace& ws) const;

    const VelocityGrid& grid() const { return grid_; }
    const CollisionKernel& kernel() const { return kernel_; }

  private:
    struct Impl;
    VelocityGrid grid_;
    CollisionKernel kernel_;
    std::unique_ptr<Impl> impl_;
};

/// Convenience wrapper; engines are memoized per (grid, gamma).
CoefficientField compute_coefficients_fast(std::span<const double> f_slice,
                                           const VelocityGrid& grid,
                                           const CollisionKernel& kernel);

/// max(f, 0) per cell. Clamp-off runs may carry tiny negative excursions;
/// coefficient consumers feed on the nonnegative part.
std::vector<double> nonnegative_part(std::span<const double> f_slice);
std::shared_ptr<const ConvolutionEngine> shared_convolution_engine(const VelocityGrid& grid,
                                                                   const CollisionKernel& kernel);

/// Max-norm residuals of the structural identities b = -div(a) and
/// c = div(b), central differences, outermost 2-cell layer excluded.
/// res_c is only meaningful for gamma > -3 and reported as 0 otherwise.
struct DivergenceResiduals {
    double res_b = 0;
    double res_c = 0;
};
DivergenceResiduals divergence_identity_residuals(const CoefficientField& coeff);

/// Max ratios of the measured coefficients against their decay-norm
/// envelopes, plus the anisotropic ratios along/transverse to v.
struct CoefficientBoundReport {
    double k = 0;
    double a_iso = 0;      // |a| / (<v>^{(gamma+2)+} ||f||_{inf,k})
    double b_iso = 0;      // |b| / (<v>^{(gamma+1)+} ||f||_{inf,k})
    double c_iso = 0;      // c / ||f|| (sup norm at gamma=-3, decay norm else)
    double aniso_par = 0;  // (v^ . a v^) / (<v>^gamma * mass-norm)
    double aniso_perp = 0; // (e . a e), e _|_ v, against <v>^{gamma+2}
    double ell = 0;        // weight exponent used in the L^{1,ell} mass norm
    double p = 0;          // Lebesgue exponent used in the L^p mass norm
};
CoefficientBoundReport coefficient_bound_report(const CoefficientField& coeff,
                                                std::span<const double> f_slice, double k);

/// Eigenvalues and Rayleigh quotients of a-bar per cell.
struct EllipticitySpectrum {
    std::vector<double> lambda_min;
    std::vector<double> lambda_max;
    std::vector<double> lambda_par;  // v^ . a v^
    std::vector<double> lambda_perp; // e . a e for a fixed unit e _|_ v
    std::int64_t psd_violations = 0; // cells with lambda_min < -tol
    double worst_lambda_min = 0;
};
EllipticitySpectrum ellipticity_spectrum(const CoefficientField& coeff, double psd_tol = 1e-12);

}  // namespace landau
