#ifndef MODELH_FIELDS_HPP
#define MODELH_FIELDS_HPP

#include <Eigen/Core>

#include "modelh/grid.hpp"

namespace modelh {

template <typename Scalar>
using Array2 = Eigen::Array<Scalar, Eigen::Dynamic, Eigen::Dynamic>;

/// Cell-centered grid function. values(i, j) sits at (xc(i), yc(j)).
template <typename Scalar = double>
struct ScalarField {
    Grid grid;
    Array2<Scalar> values;

    ScalarField() = default;
    explicit ScalarField(const Grid& g) : grid(g), values(Array2<Scalar>::Zero(g.nx, g.ny)) {}
    ScalarField(const Grid& g, Array2<Scalar> v) : grid(g), values(std::move(v)) {}

    static ScalarField zeros(const Grid& g) { return ScalarField(g); }
    static ScalarField constant(const Grid& g, Scalar c)
    {
        return ScalarField(g, Array2<Scalar>::Constant(g.nx, g.ny, c));
    }
    /// Samples fn(x, y) at cell centers.
    template <class Fn>
    static ScalarField sample(const Grid& g, Fn&& fn)
    {
        ScalarField f(g);
        for (int j = 0; j < g.ny; ++j)
            for (int i = 0; i < g.nx; ++i)
                f.values(i, j) = Scalar(fn(g.xc(i), g.yc(j)));
        return f;
    }

    Scalar& operator()(int i, int j) { return values(i, j); }
    Scalar operator()(int i, int j) const { return values(i, j); }

    ScalarField& operator+=(const ScalarField& o)
    {
        require_same_grid(grid, o.grid);
        values += o.values;
        return *this;
    }
    ScalarField& operator-=(const ScalarField& o)
    {
        require_same_grid(grid, o.grid);
        values -= o.values;
        return *this;
    }
    ScalarField& operator*=(Scalar a)
    {
        values *= a;
        return *this;
    }
};

template <typename Scalar>
ScalarField<Scalar> operator+(ScalarField<Scalar> a, const ScalarField<Scalar>& b) { return a += b; }
template <typename Scalar>
ScalarField<Scalar> operator-(ScalarField<Scalar> a, const ScalarField<Scalar>& b) { return a -= b; }
template <typename Scalar>
ScalarField<Scalar> operator*(Scalar s, ScalarField<Scalar> a) { return a *= s; }
template <typename Scalar>
ScalarField<Scalar> operator-(ScalarField<Scalar> a) { return a *= Scalar(-1); }

/// Staggered (MAC) velocity: u(i, j) on x-face (xf(i), yc(j)), i in [0, nx];
/// v(i, j) on y-face (xc(i), yf(j)), j in [0, ny].
///
/// Periodic grids keep face nx (resp. ny) as a copy of face 0. In
/// NeumannNoSlip mode the boundary normal components are exactly zero.
template <typename Scalar = double>
struct MacField {
    Grid grid;
    Array2<Scalar> u;
    Array2<Scalar> v;

    MacField() = default;
    explicit MacField(const Grid& g)
        : grid(g), u(Array2<Scalar>::Zero(g.nx + 1, g.ny)), v(Array2<Scalar>::Zero(g.nx, g.ny + 1))
    {
    }

    static MacField zeros(const Grid& g) { return MacField(g); }

    /// Samples a continuous vector field at face centers and applies the
    /// boundary convention.
    template <class FnU, class FnV>
    static MacField sample(const Grid& g, FnU&& fu, FnV&& fv)
    {
        MacField w(g);
        for (int j = 0; j < g.ny; ++j)
            for (int i = 0; i <= g.nx; ++i)
                w.u(i, j) = Scalar(fu(g.xf(i), g.yc(j)));
        for (int j = 0; j <= g.ny; ++j)
            for (int i = 0; i < g.nx; ++i)
                w.v(i, j) = Scalar(fv(g.xc(i), g.yf(j)));
        w.enforce_boundary();
        return w;
    }

    /// Zero wall-normal faces (no-slip) or copy the periodic images.
    void enforce_boundary()
    {
        if (grid.periodic()) {
            u.row(grid.nx) = u.row(0);
            v.col(grid.ny) = v.col(0);
        } else {
            u.row(0).setZero();
            u.row(grid.nx).setZero();
            v.col(0).setZero();
            v.col(grid.ny).setZero();
        }
    }

    /// Adjoint counterpart of enforce_boundary: contributions accumulated on
    /// periodic image faces are folded back onto face 0.
    void fold_boundary()
    {
        if (grid.periodic()) {
            u.row(0) += u.row(grid.nx);
            v.col(0) += v.col(grid.ny);
        }
        enforce_boundary();
    }

    MacField& operator+=(const MacField& o)
    {
        require_same_grid(grid, o.grid);
        u += o.u;
        v += o.v;
        return *this;
    }
    MacField& operator-=(const MacField& o)
    {
        require_same_grid(grid, o.grid);
        u -= o.u;
        v -= o.v;
        return *this;
    }
    MacField& operator*=(Scalar a)
    {
        u *= a;
        v *= a;
        return *this;
    }
};

template <typename Scalar>
MacField<Scalar> operator+(MacField<Scalar> a, const MacField<Scalar>& b) { return a += b; }
template <typename Scalar>
MacField<Scalar> operator-(MacField<Scalar> a, const MacField<Scalar>& b) { return a -= b; }
template <typename Scalar>
MacField<Scalar> operator*(Scalar s, MacField<Scalar> a) { return a *= s; }

/// Componentwise product of two staggered fields (face fluxes).
template <typename Scalar>
MacField<Scalar> hadamard(const MacField<Scalar>& a, const MacField<Scalar>& b)
{
    require_same_grid(a.grid, b.grid);
    MacField<Scalar> r(a.grid);
    r.u = a.u * b.u;
    r.v = a.v * b.v;
    return r;
}

template <typename Scalar>
ScalarField<Scalar> hadamard(const ScalarField<Scalar>& a, const ScalarField<Scalar>& b)
{
    require_same_grid(a.grid, b.grid);
    return ScalarField<Scalar>(a.grid, a.values * b.values);
}

/// Pointwise map of a scalar field.
template <typename Scalar, class Fn>
ScalarField<Scalar> map(const ScalarField<Scalar>& f, Fn&& fn)
{
    ScalarField<Scalar> r(f.grid);
    r.values = f.values.unaryExpr([&](Scalar z) { return Scalar(fn(z)); });
    return r;
}

} // namespace modelh

#endif
