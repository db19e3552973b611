#ifndef MODELH_STOKES_HPP
#define MODELH_STOKES_HPP

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "modelh/elliptic.hpp"
#include "modelh/velocity_ops.hpp"

namespace modelh {

/// Discrete Leray projection w -> w - grad q with laplace(q) = div(w), using
/// the spectral Poisson solver of the grid (built once, reused).
template <typename Scalar = double>
class Projector {
public:
    explicit Projector(const Grid& g) : poisson_(g) {}

    const Grid& grid() const { return poisson_.grid(); }

    /// Projected field; the potential q is returned through q_out.
    MacField<Scalar> project(const MacField<Scalar>& w, ScalarField<Scalar>* q_out = nullptr) const
    {
        require_same_grid(grid(), w.grid);
        // -laplace(q) = -div(w)
        ScalarField<Scalar> q = poisson_.poisson(Scalar(-1) * divergence(w));
        MacField<Scalar> r = w - gradient_to_faces(q);
        if (q_out)
            *q_out = std::move(q);
        return r;
    }

    /// Solution of -laplace(q) = f (mean removed).
    ScalarField<Scalar> poisson(const ScalarField<Scalar>& f) const { return poisson_.poisson(f); }

private:
    NeumannSolver<Scalar> poisson_;
};

template <typename Scalar>
MacField<Scalar> leray_project(const MacField<Scalar>& w)
{
    return Projector<Scalar>(w.grid).project(w);
}

/// Subtracts the mean of each velocity component (periodic grids only, where
/// constants are in the kernel of the viscous operator).
template <typename Scalar>
MacField<Scalar> remove_velocity_mean(MacField<Scalar> w)
{
    if (!w.grid.periodic())
        return w;
    const int nx = w.grid.nx, ny = w.grid.ny;
    w.u.topRows(nx) -= w.u.topRows(nx).mean();
    w.v.leftCols(ny) -= w.v.leftCols(ny).mean();
    w.enforce_boundary();
    return w;
}

/// Spectral inverse of a componentwise constant-coefficient operator
///   u: c0 + ux Kx + uy Ky,   v: c0 + vx Kx + vy Ky
/// on the velocity unknowns. Used as the preconditioner of every viscous solve.
template <typename Scalar = double>
class VelocitySpectralInverse {
public:
    explicit VelocitySpectralInverse(const Grid& g) : grid_(g), bases_(g) {}

    void set_symbol(Scalar c0, Scalar ux, Scalar uy, Scalar vx, Scalar vy)
    {
        c0_ = c0;
        ux_ = ux;
        uy_ = uy;
        vx_ = vx;
        vy_ = vy;
    }

    MacField<Scalar> apply(const MacField<Scalar>& r) const
    {
        MacField<Scalar> z(grid_);
        detail::set_u_block(z, bases_.u.solve(detail::u_block(r), c0_, ux_, uy_));
        detail::set_v_block(z, bases_.v.solve(detail::v_block(r), c0_, vx_, vy_));
        return z;
    }

private:
    Grid grid_;
    VelocityBases<Scalar> bases_;
    Scalar c0_ = 0, ux_ = 1, uy_ = 1, vx_ = 1, vy_ = 1;
};

struct StokesConfig {
    double rel_tol = 1e-12;
    int max_iter = 2000;
};

template <typename Scalar = double>
struct StokesSolution {
    MacField<Scalar> u;
    ScalarField<Scalar> p;   ///< mean zero
    double residual = 0;     ///< ||f - L u - grad p|| / ||f||
    int iterations = 0;
};

/// Cell viscosity nu(phi) with harmonic node averages.
template <typename Scalar>
ViscosityField<Scalar> viscosity_field(const ScalarField<Scalar>& phi, const ViscositySpec<Scalar>& visc)
{
    return ViscosityField<Scalar>::from_cells(map(phi, [&](Scalar z) { return nu(visc, z); }));
}

namespace detail {

// Projected CG for P L P u = P f on discretely solenoidal (and, periodic,
// mean-zero) fields, followed by pressure recovery.
template <typename Scalar, class Op>
StokesSolution<Scalar> projected_stokes(const MacField<Scalar>& f, Op&& op, const VelocitySpectralInverse<Scalar>& m,
                                        const Projector<Scalar>& proj, const StokesConfig& cfg, const char* label)
{
    const Grid& g = f.grid;
    auto P = [&](const MacField<Scalar>& w) { return remove_velocity_mean(proj.project(w)); };
    StokesSolution<Scalar> sol;
    sol.u = MacField<Scalar>(g);
    const MacField<Scalar> b = P(f);
    // tolerance is relative to ||f||: a pure gradient projects to round-off
    const double fn = static_cast<double>(l2(f)), bn = static_cast<double>(l2(b));
    if (bn > cfg.rel_tol * fn) {
        const double tol = std::min(0.5, cfg.rel_tol * fn / bn);
        const CgStats st = pcg([&](const MacField<Scalar>& w) { return P(op(w)); },
                               [&](const MacField<Scalar>& r) { return P(m.apply(r)); }, b, sol.u, tol,
                               cfg.max_iter, label);
        sol.iterations = st.iterations;
    }

    // f - L u is a gradient up to the solver residual: grad p = (I - P)(f - L u)
    const MacField<Scalar> rem = f - op(sol.u);
    sol.p = proj.poisson(Scalar(-1) * divergence(rem));
    const MacField<Scalar> res = rem - gradient_to_faces(sol.p);
    sol.residual = fn > 0 ? static_cast<double>(l2(res)) / fn : static_cast<double>(l2(res));
    return sol;
}

} // namespace detail

/// -laplace(u) + grad p = f, div u = 0, no-slip or periodic. In periodic mode
/// the component means of f are not representable and are dropped.
template <typename Scalar>
StokesSolution<Scalar> stokes_solve(const MacField<Scalar>& f, const StokesConfig& cfg = {})
{
    const Grid& g = f.grid;
    const Projector<Scalar> proj(g);
    VelocitySpectralInverse<Scalar> m(g);
    m.set_symbol(0, 1, 1, 1, 1);
    return detail::projected_stokes(
        f, [](const MacField<Scalar>& w) { return apply_vector_neg_laplace(w); }, m, proj, cfg, "stokes");
}

/// A^{-1} f: the velocity of the Stokes solve with data P f.
template <typename Scalar>
MacField<Scalar> inverse_stokes(const MacField<Scalar>& f, const StokesConfig& cfg = {})
{
    return stokes_solve(leray_project(f), cfg).u;
}

/// ||f||_# = ||grad A^{-1} f||.
template <typename Scalar>
Scalar dual_norm_sharp(const MacField<Scalar>& f, const StokesConfig& cfg = {})
{
    return h1_semi(inverse_stokes(f, cfg));
}

/// <P f, A^{-1} f>^{1/2}, the pairing form of the same norm.
template <typename Scalar>
Scalar dual_norm_sharp_pairing(const MacField<Scalar>& f, const StokesConfig& cfg = {})
{
    using std::sqrt;
    const MacField<Scalar> pf = remove_velocity_mean(leray_project(f));
    const Scalar s = inner(pf, stokes_solve(pf, cfg).u);
    return sqrt(s > 0 ? s : Scalar(0));
}

/// -div(nu D u) + grad p = f with a given viscosity field.
template <typename Scalar>
StokesSolution<Scalar> stokes_var_solve(const MacField<Scalar>& f, const ViscosityField<Scalar>& nu,
                                        const StokesConfig& cfg = {})
{
    const Grid& g = f.grid;
    require_same_grid(g, nu.cells.grid);
    const Projector<Scalar> proj(g);
    VelocitySpectralInverse<Scalar> m(g);
    // on solenoidal fields the constant-coefficient operator is (nu/2)(-laplace)
    const Scalar half = Scalar(0.5) * mean(nu.cells);
    m.set_symbol(0, half, half, half, half);
    return detail::projected_stokes(
        f, [&](const MacField<Scalar>& w) { return apply_viscous(w, nu); }, m, proj, cfg, "variable-viscosity stokes");
}

template <typename Scalar>
StokesSolution<Scalar> stokes_var_solve(const MacField<Scalar>& f, const ScalarField<Scalar>& phi,
                                        const ViscositySpec<Scalar>& visc, const StokesConfig& cfg = {})
{
    return stokes_var_solve(f, viscosity_field(phi, visc), cfg);
}

} // namespace modelh

#endif
