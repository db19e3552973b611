#ifndef MODELH_VELOCITY_OPS_HPP
#define MODELH_VELOCITY_OPS_HPP

#include <cmath>

#include "modelh/operators.hpp"

// Velocity-gradient machinery on the MAC grid.
//
// Normal strains (du/dx, dv/dy) live at cell centers; shear derivatives
// (du/dy, dv/dx) live at nodes (xf(i), yf(j)), stored as (nx+1) x (ny+1)
// arrays. No-slip walls use antisymmetric ghosts, so the wall node value of
// du/dy is 2 u / hy. Node quadrature weights are 1 inside, 1/2 on walls and
// 1/4 at corners; in periodic mode the image row/column gets weight 0.
// Every operator below is written together with its exact transpose so the
// assembled bilinear forms are symmetric to round-off.

namespace modelh {

template <typename Scalar>
Array2<Scalar> node_weights(const Grid& g)
{
    Array2<Scalar> w = Array2<Scalar>::Ones(g.nx + 1, g.ny + 1);
    if (g.periodic()) {
        w.row(g.nx).setZero();
        w.col(g.ny).setZero();
    } else {
        w.row(0) *= Scalar(0.5);
        w.row(g.nx) *= Scalar(0.5);
        w.col(0) *= Scalar(0.5);
        w.col(g.ny) *= Scalar(0.5);
    }
    return w;
}

template <typename Scalar>
Array2<Scalar> strain_xx(const MacField<Scalar>& w)
{
    const int nx = w.grid.nx;
    return (w.u.bottomRows(nx) - w.u.topRows(nx)) / Scalar(w.grid.hx());
}

template <typename Scalar>
Array2<Scalar> strain_yy(const MacField<Scalar>& w)
{
    const int ny = w.grid.ny;
    return (w.v.rightCols(ny) - w.v.leftCols(ny)) / Scalar(w.grid.hy());
}

template <typename Scalar>
void add_strain_xx_transpose(const Array2<Scalar>& g, MacField<Scalar>& out)
{
    const int nx = out.grid.nx;
    const Scalar ihx = Scalar(1) / Scalar(out.grid.hx());
    out.u.bottomRows(nx) += g * ihx;
    out.u.topRows(nx) -= g * ihx;
}

template <typename Scalar>
void add_strain_yy_transpose(const Array2<Scalar>& g, MacField<Scalar>& out)
{
    const int ny = out.grid.ny;
    const Scalar ihy = Scalar(1) / Scalar(out.grid.hy());
    out.v.rightCols(ny) += g * ihy;
    out.v.leftCols(ny) -= g * ihy;
}

/// du/dy at nodes.
template <typename Scalar>
Array2<Scalar> shear_dudy(const MacField<Scalar>& w)
{
    const Grid& g = w.grid;
    const int nx = g.nx, ny = g.ny;
    const Scalar ihy = Scalar(1) / Scalar(g.hy());
    Array2<Scalar> d(nx + 1, ny + 1);
    d.block(0, 1, nx + 1, ny - 1) = (w.u.rightCols(ny - 1) - w.u.leftCols(ny - 1)) * ihy;
    if (g.periodic()) {
        d.col(0) = (w.u.col(0) - w.u.col(ny - 1)) * ihy;
        d.col(ny) = d.col(0);
    } else {
        d.col(0) = Scalar(2) * w.u.col(0) * ihy;
        d.col(ny) = Scalar(-2) * w.u.col(ny - 1) * ihy;
    }
    return d;
}

/// dv/dx at nodes.
template <typename Scalar>
Array2<Scalar> shear_dvdx(const MacField<Scalar>& w)
{
    const Grid& g = w.grid;
    const int nx = g.nx, ny = g.ny;
    const Scalar ihx = Scalar(1) / Scalar(g.hx());
    Array2<Scalar> d(nx + 1, ny + 1);
    d.block(1, 0, nx - 1, ny + 1) = (w.v.bottomRows(nx - 1) - w.v.topRows(nx - 1)) * ihx;
    if (g.periodic()) {
        d.row(0) = (w.v.row(0) - w.v.row(nx - 1)) * ihx;
        d.row(nx) = d.row(0);
    } else {
        d.row(0) = Scalar(2) * w.v.row(0) * ihx;
        d.row(nx) = Scalar(-2) * w.v.row(nx - 1) * ihx;
    }
    return d;
}

/// Accumulates the transpose of shear_dudy applied to node data g (the
/// image column of g is ignored in periodic mode).
template <typename Scalar>
void add_shear_dudy_transpose(const Array2<Scalar>& g, MacField<Scalar>& out)
{
    const Grid& gr = out.grid;
    const int nx = gr.nx, ny = gr.ny;
    const Scalar ihy = Scalar(1) / Scalar(gr.hy());
    out.u.rightCols(ny - 1) += g.block(0, 1, nx + 1, ny - 1) * ihy;
    out.u.leftCols(ny - 1) -= g.block(0, 1, nx + 1, ny - 1) * ihy;
    if (gr.periodic()) {
        out.u.col(0) += g.col(0) * ihy;
        out.u.col(ny - 1) -= g.col(0) * ihy;
    } else {
        out.u.col(0) += Scalar(2) * g.col(0) * ihy;
        out.u.col(ny - 1) -= Scalar(2) * g.col(ny) * ihy;
    }
}

template <typename Scalar>
void add_shear_dvdx_transpose(const Array2<Scalar>& g, MacField<Scalar>& out)
{
    const Grid& gr = out.grid;
    const int nx = gr.nx, ny = gr.ny;
    const Scalar ihx = Scalar(1) / Scalar(gr.hx());
    out.v.bottomRows(nx - 1) += g.block(1, 0, nx - 1, ny + 1) * ihx;
    out.v.topRows(nx - 1) -= g.block(1, 0, nx - 1, ny + 1) * ihx;
    if (gr.periodic()) {
        out.v.row(0) += g.row(0) * ihx;
        out.v.row(nx - 1) -= g.row(0) * ihx;
    } else {
        out.v.row(0) += Scalar(2) * g.row(0) * ihx;
        out.v.row(nx - 1) -= Scalar(2) * g.row(nx) * ihx;
    }
}

/// Harmonic mean of the cells touching each node (wrapped when periodic,
/// only existing cells on walls and corners).
template <typename Scalar>
Array2<Scalar> harmonic_to_nodes(const ScalarField<Scalar>& c)
{
    const Grid& g = c.grid;
    const int nx = g.nx, ny = g.ny;
    Array2<Scalar> r(nx + 1, ny + 1);
    for (int j = 0; j <= ny; ++j) {
        for (int i = 0; i <= nx; ++i) {
            Scalar inv_sum = 0;
            int count = 0;
            for (int dj = -1; dj <= 0; ++dj) {
                for (int di = -1; di <= 0; ++di) {
                    int ci = i + di, cj = j + dj;
                    if (g.periodic()) {
                        ci = (ci + nx) % nx;
                        cj = (cj + ny) % ny;
                    } else if (ci < 0 || ci >= nx || cj < 0 || cj >= ny) {
                        continue;
                    }
                    inv_sum += Scalar(1) / c.values(ci, cj);
                    ++count;
                }
            }
            r(i, j) = Scalar(count) / inv_sum;
        }
    }
    return r;
}

/// Cell and node samples of a viscosity coefficient.
template <typename Scalar>
struct ViscosityField {
    ScalarField<Scalar> cells;
    Array2<Scalar> nodes;

    static ViscosityField constant(const Grid& g, Scalar nu)
    {
        return {ScalarField<Scalar>::constant(g, nu), Array2<Scalar>::Constant(g.nx + 1, g.ny + 1, nu)};
    }
    static ViscosityField from_cells(ScalarField<Scalar> c)
    {
        Array2<Scalar> n = harmonic_to_nodes(c);
        return {std::move(c), std::move(n)};
    }
};

/// L w = -div(nu D w) as the gradient of w -> 1/2 int nu |Dw|^2, so that
/// inner(L w, z) = int nu Dw : Dz exactly.
template <typename Scalar>
MacField<Scalar> apply_viscous(const MacField<Scalar>& w, const ViscosityField<Scalar>& nu)
{
    const Grid& g = w.grid;
    MacField<Scalar> out(g);
    const Array2<Scalar> wn = node_weights<Scalar>(g);
    add_strain_xx_transpose<Scalar>(nu.cells.values * strain_xx(w), out);
    add_strain_yy_transpose<Scalar>(nu.cells.values * strain_yy(w), out);
    const Array2<Scalar> shear = Scalar(0.5) * (shear_dudy(w) + shear_dvdx(w));
    const Array2<Scalar> s = wn * nu.nodes * shear;
    add_shear_dudy_transpose<Scalar>(s, out);
    add_shear_dvdx_transpose<Scalar>(s, out);
    out.fold_boundary();
    return out;
}

/// Componentwise -Laplacian of a staggered field (no-slip ghosts or wrap).
template <typename Scalar>
MacField<Scalar> apply_vector_neg_laplace(const MacField<Scalar>& w)
{
    const Grid& g = w.grid;
    MacField<Scalar> out(g);
    const Array2<Scalar> wn = node_weights<Scalar>(g);
    add_strain_xx_transpose<Scalar>(strain_xx(w), out);
    add_strain_yy_transpose<Scalar>(strain_yy(w), out);
    add_shear_dudy_transpose<Scalar>(wn * shear_dudy(w), out);
    add_shear_dvdx_transpose<Scalar>(wn * shear_dvdx(w), out);
    out.fold_boundary();
    return out;
}

/// ||grad w||^2 (full velocity gradient, matching apply_vector_neg_laplace).
template <typename Scalar>
Scalar grad_norm_sq(const MacField<Scalar>& w)
{
    const Array2<Scalar> wn = node_weights<Scalar>(w.grid);
    const Array2<Scalar> a = shear_dudy(w), b = shear_dvdx(w);
    return (strain_xx(w).square().sum() + strain_yy(w).square().sum()
            + (wn * (a.square() + b.square())).sum())
           * Scalar(w.grid.cell_area());
}

template <typename Scalar>
Scalar h1_semi(const MacField<Scalar>& w)
{
    using std::sqrt;
    return sqrt(grad_norm_sq(w));
}

/// ||sqrt(nu) D w||^2, the viscous dissipation rate.
template <typename Scalar>
Scalar viscous_dissipation(const MacField<Scalar>& w, const ViscosityField<Scalar>& nu)
{
    const Array2<Scalar> wn = node_weights<Scalar>(w.grid);
    const Array2<Scalar> shear = Scalar(0.5) * (shear_dudy(w) + shear_dvdx(w));
    return ((nu.cells.values * (strain_xx(w).square() + strain_yy(w).square())).sum()
            + Scalar(2) * (wn * nu.nodes * shear.square()).sum())
           * Scalar(w.grid.cell_area());
}

/// Bilinear form a(w, z) = int nu Dw : Dz.
template <typename Scalar>
Scalar viscous_form(const MacField<Scalar>& w, const MacField<Scalar>& z, const ViscosityField<Scalar>& nu)
{
    const Array2<Scalar> wn = node_weights<Scalar>(w.grid);
    const Array2<Scalar> sw = Scalar(0.5) * (shear_dudy(w) + shear_dvdx(w));
    const Array2<Scalar> sz = Scalar(0.5) * (shear_dudy(z) + shear_dvdx(z));
    return ((nu.cells.values * (strain_xx(w) * strain_xx(z) + strain_yy(w) * strain_yy(z))).sum()
            + Scalar(2) * (wn * nu.nodes * sw * sz).sum())
           * Scalar(w.grid.cell_area());
}

/// Conservative (divergence-form) convection div(w (x) w) on the MAC grid.
/// Skew-symmetric, hence energy neutral, whenever w is discretely solenoidal.
template <typename Scalar>
MacField<Scalar> convection(const MacField<Scalar>& w)
{
    const Grid& g = w.grid;
    const int nx = g.nx, ny = g.ny;
    const bool per = g.periodic();
    const Scalar ihx = Scalar(1) / Scalar(g.hx()), ihy = Scalar(1) / Scalar(g.hy());

    const Array2<Scalar> uc = Scalar(0.5) * (w.u.topRows(nx) + w.u.bottomRows(nx));
    const Array2<Scalar> vc = Scalar(0.5) * (w.v.leftCols(ny) + w.v.rightCols(ny));
    const Array2<Scalar> uu = uc.square(), vv = vc.square();

    // node flux u*v
    Array2<Scalar> uv = Array2<Scalar>::Zero(nx + 1, ny + 1);
    for (int j = 0; j <= ny; ++j) {
        for (int i = 0; i <= nx; ++i) {
            if (per) {
                const int ii = i % nx, jj = j % ny;
                const int im = (ii + nx - 1) % nx, jm = (jj + ny - 1) % ny;
                uv(i, j) = Scalar(0.25) * (w.u(ii, jm) + w.u(ii, jj)) * (w.v(im, jj) + w.v(ii, jj));
            } else if (i > 0 && i < nx && j > 0 && j < ny) {
                uv(i, j) = Scalar(0.25) * (w.u(i, j - 1) + w.u(i, j)) * (w.v(i - 1, j) + w.v(i, j));
            }
        }
    }

    MacField<Scalar> n(g);
    const int i0 = per ? 0 : 1;
    for (int j = 0; j < ny; ++j) {
        for (int i = i0; i < nx; ++i) {
            const int im = per ? (i + nx - 1) % nx : i - 1;
            n.u(i, j) = (uu(i, j) - uu(im, j)) * ihx + (uv(i, j + 1) - uv(i, j)) * ihy;
        }
    }
    const int j0 = per ? 0 : 1;
    for (int j = j0; j < ny; ++j) {
        const int jm = per ? (j + ny - 1) % ny : j - 1;
        for (int i = 0; i < nx; ++i)
            n.v(i, j) = (vv(i, j) - vv(i, jm)) * ihy + (uv(i + 1, j) - uv(i, j)) * ihx;
    }
    n.enforce_boundary();
    return n;
}

/// Face force -div(T) of a symmetric tensor with diagonal entries at cells
/// and the off-diagonal entry at nodes.
template <typename Scalar>
MacField<Scalar> neg_div_tensor(const Array2<Scalar>& txx, const Array2<Scalar>& tyy, const Array2<Scalar>& txy,
                                const Grid& g)
{
    const int nx = g.nx, ny = g.ny;
    const bool per = g.periodic();
    const Scalar ihx = Scalar(1) / Scalar(g.hx()), ihy = Scalar(1) / Scalar(g.hy());
    MacField<Scalar> f(g);
    for (int j = 0; j < ny; ++j) {
        for (int i = per ? 0 : 1; i < nx; ++i) {
            const int im = per ? (i + nx - 1) % nx : i - 1;
            f.u(i, j) = -((txx(i, j) - txx(im, j)) * ihx + (txy(i, j + 1) - txy(i, j)) * ihy);
        }
    }
    for (int j = per ? 0 : 1; j < ny; ++j) {
        const int jm = per ? (j + ny - 1) % ny : j - 1;
        for (int i = 0; i < nx; ++i)
            f.v(i, j) = -((tyy(i, j) - tyy(i, jm)) * ihy + (txy(i + 1, j) - txy(i, j)) * ihx);
    }
    f.enforce_boundary();
    return f;
}

} // namespace modelh

#endif
