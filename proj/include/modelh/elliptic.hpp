#ifndef MODELH_ELLIPTIC_HPP
#define MODELH_ELLIPTIC_HPP

#include <Eigen/SparseCholesky>
#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <vector>

#include "modelh/operators.hpp"
#include "modelh/pcg.hpp"
#include "modelh/potential.hpp"
#include "modelh/spectral.hpp"

namespace modelh {

struct NeumannSolverConfig {
    double rel_tol = 1e-10;
    int max_iter = 500;
    double newton_tol = 1e-10;
    int newton_max = 100;
    double safeguard_margin = 0.05;

    void validate() const
    {
        if (!(rel_tol > 0 && rel_tol < 1) || !(newton_tol > 0 && newton_tol < 1))
            throw std::invalid_argument("solver tolerances must lie in (0, 1)");
        if (max_iter <= 0 || newton_max <= 0)
            throw std::invalid_argument("solver iteration limits must be positive");
        if (!(safeguard_margin > 0 && safeguard_margin < 1))
            throw std::invalid_argument("safeguard margin must lie in (0, 1)");
    }
};

struct NewtonStats {
    int iterations = 0;
    int linear_iterations = 0;
    double residual = 0;
};

/// Spectral inverses of A0 = -Laplace (on mean-zero data) and
/// A_lambda = -Laplace + lambda for one grid, reusable across solves.
template <typename Scalar = double>
class NeumannSolver {
public:
    explicit NeumannSolver(const Grid& g) : grid_(g), basis_(scalar_basis<Scalar>(g)) {}

    const Grid& grid() const { return grid_; }
    const SeparableBasis<Scalar>& basis() const { return basis_; }

    /// Mean-zero u with -laplace(u) = f - mean(f).
    ScalarField<Scalar> poisson(const ScalarField<Scalar>& f, Scalar* removed_mean = nullptr) const
    {
        require_same_grid(grid_, f.grid);
        const Scalar m = mean(f);
        if (removed_mean)
            *removed_mean = m;
        ScalarField<Scalar> u(grid_, basis_.solve(f.values - m, Scalar(0)));
        u.values -= mean(u);
        return u;
    }

    ScalarField<Scalar> helmholtz(const ScalarField<Scalar>& f, Scalar lambda) const
    {
        require_same_grid(grid_, f.grid);
        if (!(lambda > 0))
            throw std::invalid_argument("helmholtz shift must be positive");
        return ScalarField<Scalar>(grid_, basis_.solve(f.values, lambda));
    }

private:
    Grid grid_;
    SeparableBasis<Scalar> basis_;
};

namespace detail {

template <typename Scalar>
void check_residual(const ScalarField<Scalar>& residual, const ScalarField<Scalar>& rhs, double rel_tol,
                    const char* label)
{
    const double r = static_cast<double>(l2(residual));
    const double b = static_cast<double>(l2(rhs));
    if (r > rel_tol * std::max(b, 1e-300) && r > 1e-300)
        throw SolverError(label, b > 0 ? r / b : r, 1);
}

// Sparse -laplace on cell unknowns (column-major index i + j nx), same
// ghost conventions as laplace().
template <typename Scalar>
Eigen::SparseMatrix<Scalar> neg_laplace_matrix(const Grid& g)
{
    const int nx = g.nx, ny = g.ny;
    const Scalar ax = Scalar(1) / Scalar(g.hx() * g.hx()), ay = Scalar(1) / Scalar(g.hy() * g.hy());
    std::vector<Eigen::Triplet<Scalar>> t;
    t.reserve(static_cast<std::size_t>(5) * nx * ny);
    auto id = [nx](int i, int j) { return i + j * nx; };
    for (int j = 0; j < ny; ++j) {
        for (int i = 0; i < nx; ++i) {
            Scalar diag = 0;
            auto link = [&](int ii, int jj, Scalar a) {
                if (g.periodic()) {
                    ii = (ii + nx) % nx;
                    jj = (jj + ny) % ny;
                } else if (ii < 0 || ii >= nx || jj < 0 || jj >= ny) {
                    return;  // mirrored ghost cancels the link
                }
                t.emplace_back(id(i, j), id(ii, jj), -a);
                diag += a;
            };
            link(i - 1, j, ax);
            link(i + 1, j, ax);
            link(i, j - 1, ay);
            link(i, j + 1, ay);
            t.emplace_back(id(i, j), id(i, j), diag);
        }
    }
    Eigen::SparseMatrix<Scalar> k(nx * ny, nx * ny);
    k.setFromTriplets(t.begin(), t.end());
    return k;
}

} // namespace detail

/// A0^{-1} f: the mean-zero solution of -laplace(u) = f. The mean of f is
/// removed first (A0 acts on mean-zero data); it is reported through
/// removed_mean when requested.
template <typename Scalar>
ScalarField<Scalar> solve_neumann_poisson(const ScalarField<Scalar>& f, Scalar* removed_mean = nullptr,
                                          double rel_tol = 1e-10)
{
    const NeumannSolver<Scalar> s(f.grid);
    const ScalarField<Scalar> u = s.poisson(f, removed_mean);
    const ScalarField<Scalar> f0 = remove_mean(f);
    detail::check_residual(laplace(u) + f0, f0, rel_tol, "neumann poisson");
    return u;
}

/// ||f||_* = ||grad A0^{-1} f||.
template <typename Scalar>
Scalar dual_norm_star(const ScalarField<Scalar>& f)
{
    return h1_semi(solve_neumann_poisson(f));
}

/// <f, A0^{-1} f>^{1/2}; the same number as dual_norm_star by summation by parts.
template <typename Scalar>
Scalar dual_norm_star_pairing(const ScalarField<Scalar>& f)
{
    using std::sqrt;
    const ScalarField<Scalar> f0 = remove_mean(f);
    return sqrt(inner(f0, solve_neumann_poisson(f0)));
}

/// u with -laplace(u) + lambda u = f.
template <typename Scalar>
ScalarField<Scalar> solve_helmholtz(const ScalarField<Scalar>& f, Scalar lambda, double rel_tol = 1e-10)
{
    const NeumannSolver<Scalar> s(f.grid);
    const ScalarField<Scalar> u = s.helmholtz(f, lambda);
    detail::check_residual(lambda * u - laplace(u) - f, f, rel_tol, "helmholtz");
    return u;
}

/// Pointwise clamp to [-k, k].
template <typename Scalar>
ScalarField<Scalar> truncate(const ScalarField<Scalar>& f, Scalar k)
{
    if (!(k > 0))
        throw std::invalid_argument("truncation level must be positive");
    ScalarField<Scalar> r(f.grid);
    r.values = f.values.max(-k).min(k);
    return r;
}

/// Largest step s in (0, 1] keeping phi + s delta strictly inside (-1, 1):
/// every cell retains at least `margin` of its remaining gap to +-1.
template <typename Scalar>
Scalar fraction_to_boundary(const ScalarField<Scalar>& phi, const ScalarField<Scalar>& delta, double margin)
{
    Scalar s = 1;
    const Scalar keep = Scalar(1) - Scalar(margin);
    for (Eigen::Index k = 0; k < phi.values.size(); ++k) {
        const Scalar z = phi.values(k), d = delta.values(k);
        if (d > 0) {
            const Scalar lim = keep * (1 - z) / d;
            s = std::min(s, lim);
        } else if (d < 0) {
            const Scalar lim = keep * (1 + z) / (-d);
            s = std::min(s, lim);
        }
    }
    return s;
}

/// Solves -laplace(u) + F'(u) = f by safeguarded Newton iteration.
///
/// Each Newton system -laplace + diag(F''(u)) is factored with a sparse
/// Cholesky decomposition (F'' spans many decades near the pure phases, which
/// defeats simple preconditioners). With the exact potential the step is
/// first cut by the fraction-to-the-boundary rule and then halved (at most 30
/// times) until the convex functional or the residual decreases.
template <typename Scalar>
ScalarField<Scalar> solve_log_neumann(const ScalarField<Scalar>& f, const PotentialSpec<Scalar>& spec,
                                      const NeumannSolverConfig& cfg = {},
                                      const ScalarField<Scalar>* initial_guess = nullptr,
                                      NewtonStats* stats = nullptr)
{
    using std::tanh;
    using SpMat = Eigen::SparseMatrix<Scalar>;
    using Vec = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;
    const Grid& g = f.grid;
    const double fnorm = static_cast<double>(l2(f));
    const double tol = cfg.rel_tol * std::max(fnorm, 1e-300);

    ScalarField<Scalar> u(g);
    if (initial_guess) {
        require_same_grid(g, initial_guess->grid);
        u = *initial_guess;
        if (spec.exact() && !(linf(u) < Scalar(1)))
            throw std::domain_error("initial guess must satisfy |u| < 1");
    } else {
        // pointwise solution of F'(u) = f, the exact answer when laplace(u) is negligible
        const Scalar cap = Scalar(1) - Scalar(1e-12);
        u = map(f, [&](Scalar z) { return std::clamp(tanh(z / spec.theta), -cap, cap); });
    }

    auto residual = [&](const ScalarField<Scalar>& w) {
        ScalarField<Scalar> r = map(w, [&](Scalar z) { return dF(spec, z); });
        r -= laplace(w);
        r -= f;
        return r;
    };
    // the equation is the optimality condition of this strictly convex functional
    auto energy = [&](const ScalarField<Scalar>& w) {
        const Scalar grad = Scalar(0.5) * inner(gradient_to_faces(w), gradient_to_faces(w));
        return grad + inner(map(w, [&](Scalar z) { return F(spec, z); }), ScalarField<Scalar>::constant(g, 1))
               - inner(f, w);
    };

    const SpMat k = detail::neg_laplace_matrix<Scalar>(g);
    SpMat jac = k;
    Eigen::SimplicialLDLT<SpMat> ldlt;
    ldlt.analyzePattern(k);
    const Eigen::Index n = k.rows();

    // residual level set by rounding u itself: one ulp of u moves F'(u) by
    // F''(u) ulp(u), which is large right next to the pure phases
    auto floor_of = [&](const ScalarField<Scalar>& w) {
        const ScalarField<Scalar> c = map(w, [&](Scalar z) { using std::abs; return d2F(spec, z) * abs(z); });
        return 64.0 * static_cast<double>(std::numeric_limits<Scalar>::epsilon()) * static_cast<double>(l2(c));
    };

    NewtonStats st;
    ScalarField<Scalar> r = residual(u);
    double rnorm = static_cast<double>(l2(r));
    while (rnorm > std::max(tol, floor_of(u))) {
        if (st.iterations >= cfg.newton_max)
            throw SolverError("log-neumann newton", rnorm / std::max(fnorm, 1e-300), st.iterations);
        jac = k;
        for (Eigen::Index q = 0; q < n; ++q)
            jac.coeffRef(q, q) += d2F(spec, u.values(q));
        ldlt.factorize(jac);
        if (ldlt.info() != Eigen::Success)
            throw SolverError("log-neumann newton factorization", rnorm / std::max(fnorm, 1e-300), st.iterations);
        const Vec rv = Eigen::Map<const Vec>(r.values.data(), n);
        ScalarField<Scalar> delta(g);
        Eigen::Map<Vec>(delta.values.data(), n) = -ldlt.solve(rv);
        ++st.linear_iterations;

        // Armijo on the functional, or plain residual decrease (the functional
        // stops resolving progress near convergence)
        const Scalar e0 = energy(u);
        const Scalar slope = inner(r, delta);
        Scalar s = spec.exact() ? fraction_to_boundary(u, delta, cfg.safeguard_margin) : Scalar(1);
        ScalarField<Scalar> trial, rt;
        double tnorm = 0;
        bool accepted = false;
        for (int halvings = 0; halvings <= 30 && !accepted; ++halvings, s *= Scalar(0.5)) {
            trial = u + s * delta;
            rt = residual(trial);
            tnorm = static_cast<double>(l2(rt));
            accepted = tnorm < rnorm || energy(trial) <= e0 + Scalar(1e-4) * s * slope;
        }
        ++st.iterations;
        if (!accepted) {
            // stagnation at round-off level is accepted
            if (rnorm <= 100 * std::max(tol, floor_of(u)))
                break;
            throw SolverError("log-neumann newton line search", rnorm / std::max(fnorm, 1e-300), st.iterations);
        }
        u = std::move(trial);
        r = std::move(rt);
        rnorm = tnorm;
    }
    st.residual = rnorm / std::max(fnorm, 1e-300);
    if (stats)
        *stats = st;
    return u;
}

/// Result of the truncate-and-resolve preparation of an initial phase field.
template <typename Scalar = double>
struct PreparedDatum {
    ScalarField<Scalar> phi0k;       ///< solution of -laplace(phi) + F'(phi) = h_k(mu_tilde0)
    ScalarField<Scalar> mu_tilde0k;  ///< truncated source h_k(-laplace(phi0) + F'(phi0))
    Scalar k = 0;
    Scalar sep_delta = 0;            ///< 1 - max|phi0k|, measured
    Scalar max_abs_dF = 0;           ///< max|F'(phi0k)|, bounded by k
};

/// mu~0 = -laplace(phi0) + F'(phi0), clamp to [-k, k], re-solve the
/// logarithmic Neumann problem with the clamped source. The output is
/// strictly separated from the pure phases.
template <typename Scalar>
PreparedDatum<Scalar> prepare_initial_datum(const ScalarField<Scalar>& phi0, Scalar k,
                                            const PotentialSpec<Scalar>& spec, const NeumannSolverConfig& cfg = {})
{
    using std::abs;
    if (!(k > 0))
        throw std::invalid_argument("truncation level must be positive");
    if (!(linf(phi0) < Scalar(1)))
        throw std::domain_error("initial phase must satisfy |phi0| < 1 pointwise");
    if (!(abs(mean(phi0)) < Scalar(1)))
        throw std::domain_error("initial phase mean must lie in (-1, 1)");

    const ScalarField<Scalar> mu_tilde = map(phi0, [&](Scalar z) { return dF(spec, z); }) - laplace(phi0);
    PreparedDatum<Scalar> out;
    out.k = k;
    out.mu_tilde0k = truncate(mu_tilde, k);
    out.phi0k = solve_log_neumann(out.mu_tilde0k, spec, cfg, &phi0);
    out.sep_delta = Scalar(1) - linf(out.phi0k);
    out.max_abs_dF = linf(map(out.phi0k, [&](Scalar z) { return dF(spec, z); }));
    return out;
}

} // namespace modelh

#endif
