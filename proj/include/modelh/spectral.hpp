#ifndef MODELH_SPECTRAL_HPP
#define MODELH_SPECTRAL_HPP

#include <Eigen/Dense>
#include <stdexcept>

#include "modelh/fields.hpp"

// Separable eigen-solvers ("fast diagonalization") for the second-difference
// operators used on the grid. Each axis operator K = -d2/dx2 is a small
// symmetric matrix factored once as Q diag(lambda) Q^T; a 2D operator
// c0 + cx Kx + cy Ky is then inverted with four dense products.

namespace modelh {

/// Discrete -d2/dx2 on one axis.
enum class AxisKind {
    NeumannCell,    ///< cell centers, mirrored ghosts
    PeriodicCell,   ///< wrapped
    DirichletFace,  ///< interior faces 1..n-1 of n cells, zero at both ends
    DirichletGhost  ///< cell centers, antisymmetric ghosts (wall value zero)
};

template <typename Scalar>
struct AxisBasis {
    using Matrix = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;
    using Vector = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;

    Matrix q;       ///< orthonormal eigenvectors (columns)
    Vector lambda;  ///< ascending eigenvalues
    bool singular = false;  ///< constant vector is in the kernel (lambda(0) == 0)

    AxisBasis() = default;

    /// n is the number of cells along the axis; spacing h.
    AxisBasis(AxisKind kind, int n, double h)
    {
        const int m = kind == AxisKind::DirichletFace ? n - 1 : n;
        Matrix k = Matrix::Zero(m, m);
        for (int i = 0; i < m; ++i) {
            k(i, i) = 2;
            if (i > 0)
                k(i, i - 1) = -1;
            if (i + 1 < m)
                k(i, i + 1) = -1;
        }
        switch (kind) {
        case AxisKind::NeumannCell:
            k(0, 0) = 1;
            k(m - 1, m - 1) = 1;
            singular = true;
            break;
        case AxisKind::PeriodicCell:
            k(0, m - 1) += -1;
            k(m - 1, 0) += -1;
            singular = true;
            break;
        case AxisKind::DirichletFace:
            break;
        case AxisKind::DirichletGhost:
            k(0, 0) = 3;
            k(m - 1, m - 1) = 3;
            break;
        }
        k /= Scalar(h * h);
        Eigen::SelfAdjointEigenSolver<Matrix> es(k);
        if (es.info() != Eigen::Success)
            throw std::runtime_error("axis eigen-decomposition failed");
        q = es.eigenvectors();
        lambda = es.eigenvalues();
        if (singular) {
            using std::sqrt;
            lambda(0) = 0;
            q.col(0).setConstant(Scalar(1) / sqrt(Scalar(m)));
        }
    }

    int size() const { return static_cast<int>(lambda.size()); }
};

/// Pair of axis bases acting on an (mx x my) block.
template <typename Scalar>
class SeparableBasis {
public:
    using Matrix = typename AxisBasis<Scalar>::Matrix;

    SeparableBasis() = default;
    SeparableBasis(AxisBasis<Scalar> bx, AxisBasis<Scalar> by) : x_(std::move(bx)), y_(std::move(by)) {}

    const AxisBasis<Scalar>& x() const { return x_; }
    const AxisBasis<Scalar>& y() const { return y_; }

    Matrix forward(const Array2<Scalar>& f) const
    {
        Matrix tmp;
        tmp.noalias() = x_.q.transpose() * f.matrix();
        Matrix out;
        out.noalias() = tmp * y_.q;
        return out;
    }

    Array2<Scalar> backward(const Matrix& c) const
    {
        Matrix tmp;
        tmp.noalias() = x_.q * c;
        Matrix out;
        out.noalias() = tmp * y_.q.transpose();
        return out.array();
    }

    /// Applies the spectral multiplier m(lambda_x, lambda_y) to f.
    template <class Mult>
    Array2<Scalar> apply(const Array2<Scalar>& f, Mult&& m) const
    {
        Matrix c = forward(f);
        for (int b = 0; b < c.cols(); ++b)
            for (int a = 0; a < c.rows(); ++a)
                c(a, b) *= m(x_.lambda(a), y_.lambda(b));
        return backward(c);
    }

    /// Solves (c0 + cx Kx + cy Ky) u = f. A vanishing symbol (the constant
    /// mode of a singular operator with c0 = 0) maps to zero.
    Array2<Scalar> solve(const Array2<Scalar>& f, Scalar c0, Scalar cx = 1, Scalar cy = 1) const
    {
        return apply(f, [&](Scalar lx, Scalar ly) {
            const Scalar s = c0 + cx * lx + cy * ly;
            return s == Scalar(0) ? Scalar(0) : Scalar(1) / s;
        });
    }

private:
    AxisBasis<Scalar> x_;
    AxisBasis<Scalar> y_;
};

/// Bases for the cell-centered scalar Laplacian of a grid.
template <typename Scalar>
SeparableBasis<Scalar> scalar_basis(const Grid& g)
{
    const AxisKind k = g.periodic() ? AxisKind::PeriodicCell : AxisKind::NeumannCell;
    return {AxisBasis<Scalar>(k, g.nx, g.hx()), AxisBasis<Scalar>(k, g.ny, g.hy())};
}

/// Bases for the x-face (u) and y-face (v) velocity components.
template <typename Scalar>
struct VelocityBases {
    SeparableBasis<Scalar> u;
    SeparableBasis<Scalar> v;

    explicit VelocityBases(const Grid& g)
    {
        if (g.periodic()) {
            u = {AxisBasis<Scalar>(AxisKind::PeriodicCell, g.nx, g.hx()),
                 AxisBasis<Scalar>(AxisKind::PeriodicCell, g.ny, g.hy())};
            v = u;
        } else {
            u = {AxisBasis<Scalar>(AxisKind::DirichletFace, g.nx, g.hx()),
                 AxisBasis<Scalar>(AxisKind::DirichletGhost, g.ny, g.hy())};
            v = {AxisBasis<Scalar>(AxisKind::DirichletGhost, g.nx, g.hx()),
                 AxisBasis<Scalar>(AxisKind::DirichletFace, g.ny, g.hy())};
        }
    }
};

namespace detail {

// Unknown block of each velocity component.
template <typename Scalar>
Array2<Scalar> u_block(const MacField<Scalar>& w)
{
    const Grid& g = w.grid;
    return g.periodic() ? Array2<Scalar>(w.u.topRows(g.nx)) : Array2<Scalar>(w.u.block(1, 0, g.nx - 1, g.ny));
}

template <typename Scalar>
Array2<Scalar> v_block(const MacField<Scalar>& w)
{
    const Grid& g = w.grid;
    return g.periodic() ? Array2<Scalar>(w.v.leftCols(g.ny)) : Array2<Scalar>(w.v.block(0, 1, g.nx, g.ny - 1));
}

template <typename Scalar>
void set_u_block(MacField<Scalar>& w, const Array2<Scalar>& b)
{
    const Grid& g = w.grid;
    if (g.periodic())
        w.u.topRows(g.nx) = b;
    else
        w.u.block(1, 0, g.nx - 1, g.ny) = b;
    w.enforce_boundary();
}

template <typename Scalar>
void set_v_block(MacField<Scalar>& w, const Array2<Scalar>& b)
{
    const Grid& g = w.grid;
    if (g.periodic())
        w.v.leftCols(g.ny) = b;
    else
        w.v.block(0, 1, g.nx, g.ny - 1) = b;
    w.enforce_boundary();
}

} // namespace detail

} // namespace modelh

#endif
