#include "landau/coefficients.hpp"

#include <fftw3.h>

#include <complex>
#include <cstring>
#include <map>
#include <mutex>
#include <stdexcept>

#include "landau/parallel.hpp"

namespace landau {

CollisionKernel CollisionKernel::standard(double gamma) {
    CollisionKernel k;
    k.gamma = gamma;
    k.a_const = 1.0;
    k.b_const = 2.0;
    k.c_const = gamma == -3.0 ? 8.0 * M_PI : 2.0 * (gamma + 3.0);
    k.validate();
    return k;
}

void CollisionKernel::validate() const {
    if (!(gamma >= -3.0 && gamma < 0.0))
        throw std::invalid_argument("CollisionKernel: gamma must lie in [-3, 0)");
    if (!(a_const > 0.0) || !(c_const > 0.0))
        throw std::invalid_argument("CollisionKernel: a_const and c_const must be > 0");
}

CoefficientField::CoefficientField(const VelocityGrid& g, double gamma_) : grid(g), gamma(gamma_) {
    for (auto& comp : a) comp.assign(g.size(), 0.0);
    for (auto& comp : b) comp.assign(g.size(), 0.0);
    c.assign(g.size(), 0.0);
}

double cube_average_power(double r) {
    if (!(r > -3.0)) throw std::invalid_argument("cube_average_power: need r > -3");
    // J := int_{[-1/2,1/2]^3} |u|^r du satisfies J = I_shell / (1 - 2^{-(3+r)}),
    // where the shell is the cube minus its half-size copy. The shell integrand
    // is smooth (|u| >= 1/4), so tensor Gauss-Legendre over the 56 quarter-size
    // boxes converges to machine precision.
    static const Quadrature gl = gauss_legendre(16);
    const int nb = 4;
    const double side = 0.25;
    double shell = 0.0;
    for (int bi = 0; bi < nb; ++bi)
        for (int bj = 0; bj < nb; ++bj)
            for (int bk = 0; bk < nb; ++bk) {
                bool central = (bi == 1 || bi == 2) && (bj == 1 || bj == 2) && (bk == 1 || bk == 2);
                if (central) continue;
                double x0 = -0.5 + bi * side, y0 = -0.5 + bj * side, z0 = -0.5 + bk * side;
                double acc = 0.0;
                for (size_t i = 0; i < gl.nodes.size(); ++i) {
                    double x = x0 + 0.5 * side * (gl.nodes[i] + 1.0);
                    for (size_t j = 0; j < gl.nodes.size(); ++j) {
                        double y = y0 + 0.5 * side * (gl.nodes[j] + 1.0);
                        double wij = gl.weights[i] * gl.weights[j];
                        for (size_t k = 0; k < gl.nodes.size(); ++k) {
                            double z = z0 + 0.5 * side * (gl.nodes[k] + 1.0);
                            acc += wij * gl.weights[k] *
                                   std::pow(x * x + y * y + z * z, 0.5 * r);
                        }
                    }
                }
                shell += acc * std::pow(0.5 * side, 3);
            }
    return shell / (1.0 - std::pow(2.0, -(3.0 + r)));
}

KernelTable build_kernel_table(const VelocityGrid& grid, const CollisionKernel& kernel) {
    kernel.validate();
    KernelTable t;
    t.grid = grid;
    t.kernel = kernel;
    t.m = 2 * grid.n - 1;
    const std::size_t total = static_cast<std::size_t>(t.m) * t.m * t.m;
    for (auto& comp : t.a) comp.assign(total, 0.0);
    for (auto& comp : t.b) comp.assign(total, 0.0);
    t.c.assign(total, 0.0);

    const double h = grid.spacing();
    const double g = kernel.gamma;
    const int n1 = grid.n - 1;
    for (int di = -n1; di <= n1; ++di)
        for (int dj = -n1; dj <= n1; ++dj)
            for (int dk = -n1; dk <= n1; ++dk) {
                std::size_t idx = t.index(di, dj, dk);
                if (di == 0 && dj == 0 && dk == 0) continue; // regularized below
                Vec3 w{di * h, dj * h, dk * h};
                double r2 = norm2(w);
                double rg = std::pow(r2, 0.5 * g);
                double rg2 = rg * r2; // |w|^{gamma+2}
                t.a[0][idx] = kernel.a_const * (rg2 - rg * w.x * w.x);
                t.a[1][idx] = kernel.a_const * (-rg * w.x * w.y);
                t.a[2][idx] = kernel.a_const * (-rg * w.x * w.z);
                t.a[3][idx] = kernel.a_const * (rg2 - rg * w.y * w.y);
                t.a[4][idx] = kernel.a_const * (-rg * w.y * w.z);
                t.a[5][idx] = kernel.a_const * (rg2 - rg * w.z * w.z);
                t.b[0][idx] = kernel.b_const * rg * w.x;
                t.b[1][idx] = kernel.b_const * rg * w.y;
                t.b[2][idx] = kernel.b_const * rg * w.z;
                t.c[idx] = kernel.c_const * rg;
            }

    // Origin cell: exact cell average of the kernel over the cube. The matrix
    // kernel averages to (2/3) avg(|w|^{gamma+2}) I by symmetry, the vector
    // kernel is odd and averages to zero.
    std::size_t origin = t.index(0, 0, 0);
    double avg_a = cube_average_power(g + 2.0) * std::pow(h, g + 2.0);
    t.a[0][origin] = t.a[3][origin] = t.a[5][origin] = kernel.a_const * (2.0 / 3.0) * avg_a;
    if (!kernel.coulomb())
        t.c[origin] = kernel.c_const * cube_average_power(g) * std::pow(h, g);
    return t;
}

namespace {

void require_nonnegative(std::span<const double> f_slice) {
    for (double x : f_slice) {
        if (!(x >= 0.0)) throw std::invalid_argument("coefficients: density must be nonnegative");
    }
}

}  // namespace

CoefficientField compute_coefficients_direct(std::span<const double> f_slice,
                                             const KernelTable& table) {
    const VelocityGrid& grid = table.grid;
    if (f_slice.size() != grid.size())
        throw std::invalid_argument("compute_coefficients_direct: slice size mismatch");
    require_nonnegative(f_slice);

    CoefficientField out(grid, table.kernel.gamma);
    out.x_index = -1;
    const int n = grid.n;
    const int m = table.m;
    const double hv3 = grid.cell_volume();
    const bool coulomb = table.kernel.coulomb();

    parallel_for(static_cast<std::size_t>(n), [&](std::size_t ii, int) {
        const int i = static_cast<int>(ii);
        for (int j = 0; j < n; ++j)
            for (int k = 0; k < n; ++k) {
                double acc[10] = {0, 0, 0, 0, 0, 0, 0, 0, 0, 0};
                for (int si = 0; si < n; ++si) {
                    const std::size_t trow_i = static_cast<std::size_t>(i - si + n - 1) * m;
                    for (int sj = 0; sj < n; ++sj) {
                        const std::size_t trow = (trow_i + (j - sj + n - 1)) * m + (n - 1);
                        const double* f_row = f_slice.data() + (static_cast<std::size_t>(si) * n + sj) * n;
                        for (int sk = 0; sk < n; ++sk) {
                            const double fv = f_row[sk];
                            const std::size_t tix = trow + (k - sk);
                            acc[0] += table.a[0][tix] * fv;
                            acc[1] += table.a[1][tix] * fv;
                            acc[2] += table.a[2][tix] * fv;
                            acc[3] += table.a[3][tix] * fv;
                            acc[4] += table.a[4][tix] * fv;
                            acc[5] += table.a[5][tix] * fv;
                            acc[6] += table.b[0][tix] * fv;
                            acc[7] += table.b[1][tix] * fv;
                            acc[8] += table.b[2][tix] * fv;
                            acc[9] += table.c[tix] * fv;
                        }
                    }
                }
                const std::size_t iv = grid.index(i, j, k);
                for (int comp = 0; comp < 6; ++comp) out.a[comp][iv] = acc[comp] * hv3;
                for (int comp = 0; comp < 3; ++comp) out.b[comp][iv] = acc[6 + comp] * hv3;
                out.c[iv] = coulomb ? table.kernel.c_const * f_slice[iv] : acc[9] * hv3;
            }
    });
    return out;
}

CoefficientField compute_coefficients_direct(std::span<const double> f_slice,
                                             const VelocityGrid& grid,
                                             const CollisionKernel& kernel) {
    return compute_coefficients_direct(f_slice, build_kernel_table(grid, kernel));
}

// ---------------------------------------------------------------------------
// FFT path
// ---------------------------------------------------------------------------

namespace {
std::mutex& fftw_planner_mutex() {
    static std::mutex m;
    return m;
}
}  // namespace

struct ConvolutionEngine::Impl {
    int pad = 0;                 // 2n per axis
    std::size_t real_size = 0;   // pad^3
    std::size_t spec_size = 0;   // pad^2 * (pad/2 + 1)
    bool coulomb = false;
    // forward transforms of the wrapped kernel components (a6, b3, c)
    std::vector<std::vector<std::complex<double>>> kernel_hat;
};

struct ConvolutionEngine::Workspace::Impl {
    double* real_in = nullptr;
    double* real_out = nullptr;
    fftw_complex* spec = nullptr;
    fftw_complex* spec_prod = nullptr;
    fftw_plan fwd = nullptr;
    fftw_plan bwd = nullptr;

    ~Impl() {
        std::lock_guard<std::mutex> lock(fftw_planner_mutex());
        if (fwd) fftw_destroy_plan(fwd);
        if (bwd) fftw_destroy_plan(bwd);
        if (real_in) fftw_free(real_in);
        if (real_out) fftw_free(real_out);
        if (spec) fftw_free(spec);
        if (spec_prod) fftw_free(spec_prod);
    }
};

ConvolutionEngine::Workspace::Workspace(const ConvolutionEngine& e) : impl(new Impl) {
    const int p = e.impl_->pad;
    impl->real_in = fftw_alloc_real(e.impl_->real_size);
    impl->real_out = fftw_alloc_real(e.impl_->real_size);
    impl->spec = fftw_alloc_complex(e.impl_->spec_size);
    impl->spec_prod = fftw_alloc_complex(e.impl_->spec_size);
    std::lock_guard<std::mutex> lock(fftw_planner_mutex());
    impl->fwd = fftw_plan_dft_r2c_3d(p, p, p, impl->real_in, impl->spec, FFTW_ESTIMATE);
    impl->bwd = fftw_plan_dft_c2r_3d(p, p, p, impl->spec_prod, impl->real_out, FFTW_ESTIMATE);
}

ConvolutionEngine::Workspace::~Workspace() = default;
ConvolutionEngine::Workspace::Workspace(Workspace&&) noexcept = default;

ConvolutionEngine::ConvolutionEngine(const VelocityGrid& grid, const CollisionKernel& kernel)
    : grid_(grid), kernel_(kernel), impl_(new Impl) {
    kernel.validate();
    const int n = grid.n;
    impl_->pad = 2 * n;
    impl_->real_size = static_cast<std::size_t>(impl_->pad) * impl_->pad * impl_->pad;
    impl_->spec_size = static_cast<std::size_t>(impl_->pad) * impl_->pad * (impl_->pad / 2 + 1);
    impl_->coulomb = kernel.coulomb();

    KernelTable table = build_kernel_table(grid, kernel);
    const int ncomp = impl_->coulomb ? 9 : 10;
    impl_->kernel_hat.resize(ncomp);

    double* pad_buf = fftw_alloc_real(impl_->real_size);
    fftw_complex* spec_buf = fftw_alloc_complex(impl_->spec_size);
    fftw_plan plan;
    {
        std::lock_guard<std::mutex> lock(fftw_planner_mutex());
        plan = fftw_plan_dft_r2c_3d(impl_->pad, impl_->pad, impl_->pad, pad_buf, spec_buf,
                                    FFTW_ESTIMATE);
    }
    auto embed_and_transform = [&](const std::vector<double>& comp, int which) {
        std::memset(pad_buf, 0, impl_->real_size * sizeof(double));
        const int p = impl_->pad;
        for (int di = -(n - 1); di <= n - 1; ++di)
            for (int dj = -(n - 1); dj <= n - 1; ++dj)
                for (int dk = -(n - 1); dk <= n - 1; ++dk) {
                    int pi = di >= 0 ? di : di + p;
                    int pj = dj >= 0 ? dj : dj + p;
                    int pk = dk >= 0 ? dk : dk + p;
                    pad_buf[(static_cast<std::size_t>(pi) * p + pj) * p + pk] =
                        comp[table.index(di, dj, dk)];
                }
        fftw_execute(plan);
        auto& dst = impl_->kernel_hat[which];
        dst.resize(impl_->spec_size);
        std::memcpy(reinterpret_cast<double*>(dst.data()), spec_buf,
                    impl_->spec_size * sizeof(fftw_complex));
    };
    for (int comp = 0; comp < 6; ++comp) embed_and_transform(table.a[comp], comp);
    for (int comp = 0; comp < 3; ++comp) embed_and_transform(table.b[comp], 6 + comp);
    if (!impl_->coulomb) embed_and_transform(table.c, 9);
    {
        std::lock_guard<std::mutex> lock(fftw_planner_mutex());
        fftw_destroy_plan(plan);
    }
    fftw_free(pad_buf);
    fftw_free(spec_buf);
}

ConvolutionEngine::~ConvolutionEngine() = default;

ConvolutionEngine::Workspace ConvolutionEngine::make_workspace() const { return Workspace(*this); }

void ConvolutionEngine::compute(std::span<const double> f_slice, CoefficientField& out,
                                Workspace& ws) const {
    const int n = grid_.n;
    if (f_slice.size() != grid_.size())
        throw std::invalid_argument("ConvolutionEngine: slice size mismatch");
    require_nonnegative(f_slice);
    if (out.grid.size() != grid_.size()) out = CoefficientField(grid_, kernel_.gamma);
    out.gamma = kernel_.gamma;

    const int p = impl_->pad;
    auto* w = ws.impl.get();
    std::memset(w->real_in, 0, impl_->real_size * sizeof(double));
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j)
            std::memcpy(w->real_in + (static_cast<std::size_t>(i) * p + j) * p,
                        f_slice.data() + (static_cast<std::size_t>(i) * n + j) * n,
                        n * sizeof(double));
    fftw_execute(w->fwd);

    const double scale = grid_.cell_volume() / static_cast<double>(impl_->real_size);
    auto convolve_into = [&](int which, std::vector<double>& dst) {
        const auto& khat = impl_->kernel_hat[which];
        const auto* fhat = reinterpret_cast<const std::complex<double>*>(w->spec);
        auto* prod = reinterpret_cast<std::complex<double>*>(w->spec_prod);
        for (std::size_t s = 0; s < impl_->spec_size; ++s) prod[s] = fhat[s] * khat[s];
        fftw_execute(w->bwd);
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j) {
                const double* src = w->real_out + (static_cast<std::size_t>(i) * p + j) * p;
                double* row = dst.data() + (static_cast<std::size_t>(i) * n + j) * n;
                for (int k = 0; k < n; ++k) row[k] = src[k] * scale;
            }
    };
    for (int comp = 0; comp < 6; ++comp) convolve_into(comp, out.a[comp]);
    for (int comp = 0; comp < 3; ++comp) convolve_into(6 + comp, out.b[comp]);
    if (impl_->coulomb) {
        for (std::size_t iv = 0; iv < grid_.size(); ++iv) out.c[iv] = kernel_.c_const * f_slice[iv];
    } else {
        convolve_into(9, out.c);
    }
}

std::shared_ptr<const ConvolutionEngine> shared_convolution_engine(const VelocityGrid& grid,
                                                                   const CollisionKernel& kernel) {
    struct Key {
        int n;
        double l, gamma, a, b, c;
        auto operator<=>(const Key&) const = default;
    };
    static std::mutex mu;
    static std::map<Key, std::weak_ptr<const ConvolutionEngine>> cache;
    Key key{grid.n, grid.half_width, kernel.gamma, kernel.a_const, kernel.b_const, kernel.c_const};
    std::lock_guard<std::mutex> lock(mu);
    if (auto it = cache.find(key); it != cache.end())
        if (auto sp = it->second.lock()) return sp;
    auto sp = std::make_shared<const ConvolutionEngine>(grid, kernel);
    cache[key] = sp;
    return sp;
}

CoefficientField compute_coefficients_fast(std::span<const double> f_slice,
                                           const VelocityGrid& grid,
                                           const CollisionKernel& kernel) {
    auto engine = shared_convolution_engine(grid, kernel);
    auto ws = engine->make_workspace();
    CoefficientField out(grid, kernel.gamma);
    engine->compute(f_slice, out, ws);
    return out;
}

std::vector<double> nonnegative_part(std::span<const double> f_slice) {
    std::vector<double> out(f_slice.begin(), f_slice.end());
    for (auto& v : out) v = std::max(v, 0.0);
    return out;
}

// ---------------------------------------------------------------------------
// Structure checks on computed coefficients
// ---------------------------------------------------------------------------

DivergenceResiduals divergence_identity_residuals(const CoefficientField& coeff) {
    const VelocityGrid& g = coeff.grid;
    if (g.n < 8)
        throw std::invalid_argument("divergence_identity_residuals: need n_v >= 8");
    const int n = g.n;
    const double inv2h = 1.0 / (2.0 * g.spacing());
    const int margin = 2;
    DivergenceResiduals res;

    auto central = [&](const std::vector<double>& comp, int i, int j, int k, int axis) {
        int ip = i + (axis == 0), jp = j + (axis == 1), kp = k + (axis == 2);
        int im = i - (axis == 0), jm = j - (axis == 1), km = k - (axis == 2);
        return (comp[g.index(ip, jp, kp)] - comp[g.index(im, jm, km)]) * inv2h;
    };
    // row components of a: row 0 -> (xx, xy, xz), row 1 -> (xy, yy, yz), row 2 -> (xz, yz, zz)
    static const int row_comp[3][3] = {{0, 1, 2}, {1, 3, 4}, {2, 4, 5}};

    for (int i = margin; i < n - margin; ++i)
        for (int j = margin; j < n - margin; ++j)
            for (int k = margin; k < n - margin; ++k) {
                std::size_t iv = g.index(i, j, k);
                for (int row = 0; row < 3; ++row) {
                    double div_a = 0;
                    for (int axis = 0; axis < 3; ++axis)
                        div_a += central(coeff.a[row_comp[row][axis]], i, j, k, axis);
                    res.res_b = std::max(res.res_b, std::abs(coeff.b[row][iv] + div_a));
                }
                if (coeff.gamma > -3.0) {
                    double div_b = 0;
                    for (int axis = 0; axis < 3; ++axis)
                        div_b += central(coeff.b[axis], i, j, k, axis);
                    res.res_c = std::max(res.res_c, std::abs(coeff.c[iv] - div_b));
                }
            }
    return res;
}

namespace {

// Deterministic unit vector orthogonal to v (falls back to e2 near the axis).
Vec3 orthogonal_unit(const Vec3& v) {
    Vec3 u = std::abs(v.x) <= std::abs(v.y) && std::abs(v.x) <= std::abs(v.z)
                 ? Vec3{1, 0, 0}
                 : (std::abs(v.y) <= std::abs(v.z) ? Vec3{0, 1, 0} : Vec3{0, 0, 1});
    Vec3 w{v.y * u.z - v.z * u.y, v.z * u.x - v.x * u.z, v.x * u.y - v.y * u.x};
    double nw = norm(w);
    if (nw == 0.0) return {0, 1, 0};
    return w * (1.0 / nw);
}

}  // namespace

CoefficientBoundReport coefficient_bound_report(const CoefficientField& coeff,
                                                std::span<const double> f_slice, double k) {
    const double gamma = coeff.gamma;
    if (!(k > gamma + 5.0))
        throw std::invalid_argument("coefficient_bound_report: need k > gamma + 5");
    const VelocityGrid& g = coeff.grid;

    CoefficientBoundReport rep;
    rep.k = k;
    double n_decay = weighted_sup_norm_slice(f_slice, g, k);
    double n_sup = weighted_sup_norm_slice(f_slice, g, 0.0);
    double mass_norm;
    if (gamma <= -2.0) {
        rep.ell = 3.0 * std::abs(gamma) / (5.0 + gamma) + 0.5;
        rep.p = 3.0 / (5.0 + gamma) + 0.5;
        mass_norm = weighted_lp_norm_slice(f_slice, g, 1.0, rep.ell) +
                    weighted_lp_norm_slice(f_slice, g, rep.p, 0.0);
    } else {
        rep.ell = 2.0;
        rep.p = 0.0;
        mass_norm = weighted_lp_norm_slice(f_slice, g, 1.0, 2.0);
    }
    if (n_decay == 0.0 || mass_norm == 0.0) return rep; // zero field: all ratios zero

    double c_norm = gamma == -3.0 ? n_sup : n_decay;
    const double half_h = 0.5 * g.spacing();
    for (std::size_t iv = 0; iv < g.size(); ++iv) {
        Vec3 v = g.velocity(iv);
        double br = bracket(v);
        SymMat3 A = coeff.a_at(iv);
        double a_norm = sym3_eigenvalues(A)[2];
        rep.a_iso = std::max(rep.a_iso, a_norm / (std::pow(br, pos_part(gamma + 2.0)) * n_decay));
        rep.b_iso = std::max(rep.b_iso,
                             norm(coeff.b_at(iv)) / (std::pow(br, pos_part(gamma + 1.0)) * n_decay));
        rep.c_iso = std::max(rep.c_iso, coeff.c[iv] / c_norm);
        if (norm(v) > half_h) {
            Vec3 vhat = v * (1.0 / norm(v));
            Vec3 e = orthogonal_unit(v);
            rep.aniso_par =
                std::max(rep.aniso_par, A.quad(vhat) / (std::pow(br, gamma) * mass_norm));
            rep.aniso_perp =
                std::max(rep.aniso_perp, A.quad(e) / (std::pow(br, gamma + 2.0) * mass_norm));
        }
    }
    return rep;
}

EllipticitySpectrum ellipticity_spectrum(const CoefficientField& coeff, double psd_tol) {
    const VelocityGrid& g = coeff.grid;
    EllipticitySpectrum spec;
    spec.lambda_min.resize(g.size());
    spec.lambda_max.resize(g.size());
    spec.lambda_par.resize(g.size());
    spec.lambda_perp.resize(g.size());
    spec.worst_lambda_min = std::numeric_limits<double>::infinity();
    for (std::size_t iv = 0; iv < g.size(); ++iv) {
        SymMat3 A = coeff.a_at(iv);
        auto eig = sym3_eigenvalues(A);
        spec.lambda_min[iv] = eig[0];
        spec.lambda_max[iv] = eig[2];
        Vec3 v = g.velocity(iv);
        double nv = norm(v);
        Vec3 vhat = nv > 0.0 ? v * (1.0 / nv) : Vec3{1, 0, 0};
        spec.lambda_par[iv] = A.quad(vhat);
        spec.lambda_perp[iv] = A.quad(orthogonal_unit(nv > 0.0 ? v : Vec3{1, 0, 0}));
        spec.worst_lambda_min = std::min(spec.worst_lambda_min, eig[0]);
        if (eig[0] < -psd_tol) ++spec.psd_violations;
    }
    return spec;
}

}  // namespace landau
