#ifndef MODELH_OPERATORS_HPP
#define MODELH_OPERATORS_HPP

#include <algorithm>
#include <cmath>

#include "modelh/fields.hpp"

// Second-order finite differences on the cell-centered / MAC grid and the
// midpoint-rule quadratures built on them.

namespace modelh {

namespace detail {

// Copy of f with one ghost layer: mirrored (zero normal derivative) or wrapped.
template <typename Scalar>
Array2<Scalar> pad_ghosts(const ScalarField<Scalar>& f)
{
    const int nx = f.grid.nx, ny = f.grid.ny;
    Array2<Scalar> g(nx + 2, ny + 2);
    g.block(1, 1, nx, ny) = f.values;
    if (f.grid.periodic()) {
        g.block(0, 1, 1, ny) = f.values.row(nx - 1);
        g.block(nx + 1, 1, 1, ny) = f.values.row(0);
        g.block(1, 0, nx, 1) = f.values.col(ny - 1);
        g.block(1, ny + 1, nx, 1) = f.values.col(0);
    } else {
        g.block(0, 1, 1, ny) = f.values.row(0);
        g.block(nx + 1, 1, 1, ny) = f.values.row(nx - 1);
        g.block(1, 0, nx, 1) = f.values.col(0);
        g.block(1, ny + 1, nx, 1) = f.values.col(ny - 1);
    }
    // corners are never read by the 5-point stencil
    g(0, 0) = g(0, ny + 1) = g(nx + 1, 0) = g(nx + 1, ny + 1) = Scalar(0);
    return g;
}

} // namespace detail

/// Five-point Laplacian with mirror (Neumann) or wrapped (periodic) ghosts.
template <typename Scalar>
ScalarField<Scalar> laplace(const ScalarField<Scalar>& f)
{
    const int nx = f.grid.nx, ny = f.grid.ny;
    const Scalar ihx2 = Scalar(1) / Scalar(f.grid.hx() * f.grid.hx());
    const Scalar ihy2 = Scalar(1) / Scalar(f.grid.hy() * f.grid.hy());
    const Array2<Scalar> g = detail::pad_ghosts(f);
    ScalarField<Scalar> r(f.grid);
    r.values = (g.block(0, 1, nx, ny) - Scalar(2) * f.values + g.block(2, 1, nx, ny)) * ihx2
               + (g.block(1, 0, nx, ny) - Scalar(2) * f.values + g.block(1, 2, nx, ny)) * ihy2;
    return r;
}

/// Face-normal differences of a cell field. Boundary faces carry zero in
/// Neumann mode.
template <typename Scalar>
MacField<Scalar> gradient_to_faces(const ScalarField<Scalar>& f)
{
    const Grid& g = f.grid;
    const int nx = g.nx, ny = g.ny;
    const Scalar ihx = Scalar(1) / Scalar(g.hx()), ihy = Scalar(1) / Scalar(g.hy());
    MacField<Scalar> w(g);
    w.u.block(1, 0, nx - 1, ny) = (f.values.bottomRows(nx - 1) - f.values.topRows(nx - 1)) * ihx;
    w.v.block(0, 1, nx, ny - 1) = (f.values.rightCols(ny - 1) - f.values.leftCols(ny - 1)) * ihy;
    if (g.periodic()) {
        w.u.row(0) = (f.values.row(0) - f.values.row(nx - 1)) * ihx;
        w.v.col(0) = (f.values.col(0) - f.values.col(ny - 1)) * ihy;
    }
    w.enforce_boundary();
    return w;
}

template <typename Scalar>
ScalarField<Scalar> divergence(const MacField<Scalar>& w)
{
    const Grid& g = w.grid;
    const int nx = g.nx, ny = g.ny;
    ScalarField<Scalar> r(g);
    r.values = (w.u.bottomRows(nx) - w.u.topRows(nx)) / Scalar(g.hx())
               + (w.v.rightCols(ny) - w.v.leftCols(ny)) / Scalar(g.hy());
    return r;
}

/// Arithmetic mean of the two cells adjacent to each face. Neumann boundary
/// faces take the value of their single neighbour.
template <typename Scalar>
MacField<Scalar> average_to_faces(const ScalarField<Scalar>& f)
{
    const Grid& g = f.grid;
    const int nx = g.nx, ny = g.ny;
    MacField<Scalar> w(g);
    w.u.block(1, 0, nx - 1, ny) = Scalar(0.5) * (f.values.bottomRows(nx - 1) + f.values.topRows(nx - 1));
    w.v.block(0, 1, nx, ny - 1) = Scalar(0.5) * (f.values.rightCols(ny - 1) + f.values.leftCols(ny - 1));
    if (g.periodic()) {
        w.u.row(0) = Scalar(0.5) * (f.values.row(0) + f.values.row(nx - 1));
        w.u.row(nx) = w.u.row(0);
        w.v.col(0) = Scalar(0.5) * (f.values.col(0) + f.values.col(ny - 1));
        w.v.col(ny) = w.v.col(0);
    } else {
        w.u.row(0) = f.values.row(0);
        w.u.row(nx) = f.values.row(nx - 1);
        w.v.col(0) = f.values.col(0);
        w.v.col(ny) = f.values.col(ny - 1);
    }
    return w;
}

/// div(w f) with f averaged to faces; equals w . grad f when div w = 0.
template <typename Scalar>
ScalarField<Scalar> advect_scalar(const MacField<Scalar>& w, const ScalarField<Scalar>& f)
{
    require_same_grid(w.grid, f.grid);
    return divergence(hadamard(w, average_to_faces(f)));
}

// ---------------------------------------------------------------------------
// Quadrature (midpoint rule on cells and faces)

template <typename Scalar>
Scalar inner(const ScalarField<Scalar>& a, const ScalarField<Scalar>& b)
{
    require_same_grid(a.grid, b.grid);
    return (a.values * b.values).sum() * Scalar(a.grid.cell_area());
}

/// Face inner product. Face nx (ny) is skipped: it is either a periodic image
/// or a no-slip wall face holding zero.
template <typename Scalar>
Scalar inner(const MacField<Scalar>& a, const MacField<Scalar>& b)
{
    require_same_grid(a.grid, b.grid);
    const int nx = a.grid.nx, ny = a.grid.ny;
    return ((a.u.topRows(nx) * b.u.topRows(nx)).sum() + (a.v.leftCols(ny) * b.v.leftCols(ny)).sum())
           * Scalar(a.grid.cell_area());
}

template <typename Scalar>
Scalar l2(const ScalarField<Scalar>& f)
{
    using std::sqrt;
    return sqrt(inner(f, f));
}

template <typename Scalar>
Scalar l2(const MacField<Scalar>& w)
{
    using std::sqrt;
    return sqrt(inner(w, w));
}

template <typename Scalar>
Scalar linf(const ScalarField<Scalar>& f)
{
    return f.values.abs().maxCoeff();
}

template <typename Scalar>
Scalar linf(const MacField<Scalar>& w)
{
    return std::max(w.u.abs().maxCoeff(), w.v.abs().maxCoeff());
}

template <typename Scalar>
Scalar mean(const ScalarField<Scalar>& f)
{
    return f.values.sum() / Scalar(f.values.size());
}

template <typename Scalar>
Scalar h1_semi(const ScalarField<Scalar>& f)
{
    return l2(gradient_to_faces(f));
}

/// f minus its mean.
template <typename Scalar>
ScalarField<Scalar> remove_mean(ScalarField<Scalar> f)
{
    f.values -= mean(f);
    return f;
}

} // namespace modelh

#endif
