#ifndef MODELH_PCG_HPP
#define MODELH_PCG_HPP

#include <cmath>
#include <stdexcept>
#include <string>

#include "modelh/operators.hpp"

namespace modelh {

/// Raised when an iterative or nonlinear solve misses its tolerance.
class SolverError : public std::runtime_error {
public:
    SolverError(const std::string& what, double residual, int iterations)
        : std::runtime_error(what + " (residual " + std::to_string(residual) + " after "
                             + std::to_string(iterations) + " iterations)"),
          residual_(residual), iterations_(iterations)
    {
    }
    double residual() const { return residual_; }
    int iterations() const { return iterations_; }

private:
    double residual_;
    int iterations_;
};

struct CgStats {
    int iterations = 0;
    double relative_residual = 0;
};

/// Matrix-free preconditioned conjugate gradient for an SPD operator on a
/// field type V (ScalarField or MacField). x holds the initial guess.
template <class V, class Op, class Prec>
CgStats pcg(Op&& apply_op, Prec&& apply_prec, const V& b, V& x, double rel_tol, int max_iter,
            const char* label = "conjugate gradient")
{
    using std::sqrt;
    CgStats st;
    const double bnorm = static_cast<double>(sqrt(inner(b, b)));
    if (bnorm == 0.0) {
        x = b;
        x *= 0;
        return st;
    }
    V r = b - apply_op(x);
    V z = apply_prec(r);
    V p = z;
    auto rz = inner(r, z);
    double rnorm = static_cast<double>(sqrt(inner(r, r)));
    while (rnorm > rel_tol * bnorm) {
        if (st.iterations >= max_iter)
            throw SolverError(label, rnorm / bnorm, st.iterations);
        const V ap = apply_op(p);
        const auto pap = inner(p, ap);
        if (!(pap > 0))
            throw SolverError(std::string(label) + ": operator not positive definite", rnorm / bnorm,
                              st.iterations);
        const auto a = rz / pap;
        x += a * p;
        r -= a * ap;
        z = apply_prec(r);
        const auto rz_new = inner(r, z);
        p = z + (rz_new / rz) * p;
        rz = rz_new;
        rnorm = static_cast<double>(sqrt(inner(r, r)));
        ++st.iterations;
    }
    st.relative_residual = rnorm / bnorm;
    return st;
}

} // namespace modelh

#endif
