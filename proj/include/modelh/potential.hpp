#ifndef MODELH_POTENTIAL_HPP
#define MODELH_POTENTIAL_HPP

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>
#include <vector>

// Logarithmic (Flory-Huggins) free energy
//
//   Psi(z) = F(z) - theta0/2 z^2,  F(z) = theta/2 [(1+z) ln(1+z) + (1-z) ln(1-z)],
//
// its C^2 quadratic-extension regularization F_eps (second-order Taylor
// expansion of F about +-(1-eps) outside [-1+eps, 1-eps]) and the
// concentration-dependent viscosity.

namespace modelh {

template <typename Scalar = double>
struct PotentialSpec {
    Scalar theta = 1;
    Scalar theta0 = 2;
    Scalar eps = 0;  ///< 0 selects the exact logarithmic potential

    Scalar alpha() const { return theta0 - theta; }
    bool exact() const { return eps == Scalar(0); }

    /// Throws std::invalid_argument unless 0 < theta < theta0 and 0 <= eps < 1.
    void validate() const
    {
        if (!(theta > 0))
            throw std::invalid_argument("potential.theta must be positive");
        if (!(theta0 > theta))
            throw std::invalid_argument("potential.theta0 must exceed potential.theta");
        if (!(eps >= 0 && eps < 1))
            throw std::invalid_argument("potential.eps must lie in [0, 1)");
    }
};

namespace detail {

template <typename Scalar>
void require_open_interval(Scalar z)
{
    using std::abs;
    if (!(abs(z) < Scalar(1)))
        throw std::domain_error("logarithmic potential evaluated outside (-1, 1): z = "
                                + std::to_string(static_cast<double>(z)));
}

template <typename Scalar>
Scalar F_exact(Scalar theta, Scalar z)
{
    using std::log1p;
    return Scalar(0.5) * theta * ((1 + z) * log1p(z) + (1 - z) * log1p(-z));
}

template <typename Scalar>
Scalar dF_exact(Scalar theta, Scalar z)
{
    using std::log1p;
    return Scalar(0.5) * theta * (log1p(z) - log1p(-z));
}

template <typename Scalar>
Scalar d2F_exact(Scalar theta, Scalar z)
{
    return theta / ((1 - z) * (1 + z));
}

template <typename Scalar>
Scalar d3F_exact(Scalar theta, Scalar z)
{
    const Scalar s = (1 - z) * (1 + z);
    return Scalar(2) * theta * z / (s * s);
}

} // namespace detail

/// Convex part F (eps = 0) or F_eps (eps > 0).
template <typename Scalar>
Scalar F(const PotentialSpec<Scalar>& p, Scalar z)
{
    if (p.exact()) {
        detail::require_open_interval(z);
        return detail::F_exact(p.theta, z);
    }
    const Scalar zc = 1 - p.eps;
    if (z > zc || z < -zc) {
        const Scalar c = z > 0 ? zc : -zc;
        const Scalar d = z - c;
        return detail::F_exact(p.theta, c) + detail::dF_exact(p.theta, c) * d
               + Scalar(0.5) * detail::d2F_exact(p.theta, c) * d * d;
    }
    return detail::F_exact(p.theta, z);
}

template <typename Scalar>
Scalar dF(const PotentialSpec<Scalar>& p, Scalar z)
{
    if (p.exact()) {
        detail::require_open_interval(z);
        return detail::dF_exact(p.theta, z);
    }
    const Scalar zc = 1 - p.eps;
    if (z > zc || z < -zc) {
        const Scalar c = z > 0 ? zc : -zc;
        return detail::dF_exact(p.theta, c) + detail::d2F_exact(p.theta, c) * (z - c);
    }
    return detail::dF_exact(p.theta, z);
}

template <typename Scalar>
Scalar d2F(const PotentialSpec<Scalar>& p, Scalar z)
{
    if (p.exact()) {
        detail::require_open_interval(z);
        return detail::d2F_exact(p.theta, z);
    }
    const Scalar zc = 1 - p.eps;
    if (z > zc)
        return detail::d2F_exact(p.theta, zc);
    if (z < -zc)
        return detail::d2F_exact(p.theta, -zc);
    return detail::d2F_exact(p.theta, z);
}

/// Third derivative (zero on the quadratic extension).
template <typename Scalar>
Scalar d3F(const PotentialSpec<Scalar>& p, Scalar z)
{
    if (p.exact()) {
        detail::require_open_interval(z);
        return detail::d3F_exact(p.theta, z);
    }
    const Scalar zc = 1 - p.eps;
    if (z > zc || z < -zc)
        return Scalar(0);
    return detail::d3F_exact(p.theta, z);
}

template <typename Scalar>
Scalar psi(const PotentialSpec<Scalar>& p, Scalar z)
{
    return F(p, z) - Scalar(0.5) * p.theta0 * z * z;
}

template <typename Scalar>
Scalar dpsi(const PotentialSpec<Scalar>& p, Scalar z)
{
    return dF(p, z) - p.theta0 * z;
}

template <typename Scalar>
Scalar d2psi(const PotentialSpec<Scalar>& p, Scalar z)
{
    return d2F(p, z) - p.theta0;
}

/// Positive root beta of dF(beta) = theta0 beta (the pure-phase minimizer of
/// the exact potential), by bisection. Requires theta < theta0.
template <typename Scalar>
Scalar binodal_root(const PotentialSpec<Scalar>& p)
{
    PotentialSpec<Scalar> ex{p.theta, p.theta0, Scalar(0)};
    // dF(z) - theta0 z is negative just above 0 and -> +inf at 1
    Scalar lo = std::numeric_limits<Scalar>::epsilon();
    Scalar hi = Scalar(1) - std::numeric_limits<Scalar>::epsilon();
    for (int it = 0; it < 200; ++it) {
        const Scalar mid = Scalar(0.5) * (lo + hi);
        if (dF(ex, mid) - p.theta0 * mid > 0)
            hi = mid;
        else
            lo = mid;
    }
    return Scalar(0.5) * (lo + hi);
}

// ---------------------------------------------------------------------------
// Viscosity

/// nu(z) = nu1 (1+z)/2 + nu2 (1-z)/2 on [-1, 1]. Beyond |z| = 1 the slope is
/// ramped to zero with a cubic (smoothstep) profile over the width
/// `smoothing`, so nu is C^2 on the real line and constant for
/// |z| >= 1 + smoothing.
template <typename Scalar = double>
struct ViscositySpec {
    Scalar nu1 = 1;
    Scalar nu2 = 1;
    Scalar smoothing = Scalar(0.1);

    Scalar slope() const { return Scalar(0.5) * (nu1 - nu2); }

    /// Global lower bound nu_* with 2 nu_* <= nu(z).
    Scalar nu_star() const
    {
        using std::abs;
        using std::min;
        return Scalar(0.5) * (min(nu1, nu2) - Scalar(0.25) * abs(nu1 - nu2) * smoothing);
    }

    /// Global upper bound nu^* >= nu(z).
    Scalar nu_upper() const
    {
        using std::abs;
        using std::max;
        return max(nu1, nu2) + Scalar(0.25) * abs(nu1 - nu2) * smoothing;
    }

    void validate() const
    {
        if (!(nu1 > 0) || !(nu2 > 0))
            throw std::invalid_argument("viscosity.nu1 and viscosity.nu2 must be positive");
        if (!(smoothing > 0))
            throw std::invalid_argument("viscosity smoothing width must be positive");
        if (!(nu_star() > 0))
            throw std::invalid_argument("viscosity contrast too large for the clamped extension");
    }
};

template <typename Scalar>
Scalar nu(const ViscositySpec<Scalar>& v, Scalar z)
{
    const Scalar m = v.slope();
    const Scalar s = v.smoothing;
    if (z >= Scalar(-1) && z <= Scalar(1))
        return v.nu1 * (1 + z) / 2 + v.nu2 * (1 - z) / 2;
    const Scalar sign = z > 0 ? Scalar(1) : Scalar(-1);
    const Scalar base = z > 0 ? v.nu1 : v.nu2;
    Scalar t = (z > 0 ? z - 1 : -1 - z) / s;
    if (t > 1)
        t = 1;
    // integral of the smoothstep-ramped slope 1 - 3 t^2 + 2 t^3
    const Scalar ramp = t - t * t * t + Scalar(0.5) * t * t * t * t;
    return base + sign * m * s * ramp;
}

template <typename Scalar>
Scalar nu_prime(const ViscositySpec<Scalar>& v, Scalar z)
{
    const Scalar m = v.slope();
    if (z >= Scalar(-1) && z <= Scalar(1))
        return m;
    Scalar t = (z > 0 ? z - 1 : -1 - z) / v.smoothing;
    if (t >= 1)
        return Scalar(0);
    return m * (1 - 3 * t * t + 2 * t * t * t);
}

// ---------------------------------------------------------------------------
// Sampled verification of the structural assumptions.

struct AssumptionCheck {
    std::string name;
    bool passed = false;
    double value = 0;  ///< worst sampled quantity (or fitted constant)
};

struct AssumptionReport {
    std::vector<AssumptionCheck> checks;
    double growth_constant = 0;  ///< smallest sampled C in F'' <= C exp(C |F'|)

    bool all_passed() const
    {
        for (const auto& c : checks)
            if (!c.passed)
                return false;
        return true;
    }
    const AssumptionCheck* find(const std::string& name) const
    {
        for (const auto& c : checks)
            if (c.name == name)
                return &c;
        return nullptr;
    }
};

/// Dense-sampling checks of: alpha > 0, F'' >= theta, convexity of F'',
/// the exponential growth bound on F'', Psi'' >= -alpha and the viscosity
/// bounds. Never throws for admissible numbers; failures are reported.
template <typename Scalar>
AssumptionReport verify_assumptions(const PotentialSpec<Scalar>& p, const ViscositySpec<Scalar>& visc,
                                    int samples = 20001)
{
    using std::abs;
    using std::exp;
    AssumptionReport rep;
    const double zmax = 0.999;

    rep.checks.push_back({"alpha_positive", p.alpha() > 0 && p.theta > 0, static_cast<double>(p.alpha())});

    // sample points on (-zmax, zmax), plus the extension region when eps > 0
    std::vector<Scalar> zs;
    zs.reserve(samples);
    for (int k = 0; k < samples; ++k)
        zs.push_back(Scalar(-zmax + 2 * zmax * k / (samples - 1)));

    double worst_h = std::numeric_limits<double>::infinity();
    for (Scalar z : zs)
        worst_h = std::min(worst_h, static_cast<double>(d2F(p, z) - p.theta));
    if (!p.exact())
        for (int k = 0; k <= 200; ++k)
            worst_h = std::min(worst_h, static_cast<double>(d2F(p, Scalar(-3 + 6.0 * k / 200)) - p.theta));
    rep.checks.push_back({"F2_ge_theta", worst_h >= -1e-12 * static_cast<double>(p.theta), worst_h});

    // convexity of F'': centered second differences of d2F on the exact branch
    {
        const PotentialSpec<Scalar> ex{p.theta, p.theta0, Scalar(0)};
        double worst = std::numeric_limits<double>::infinity();
        const Scalar h = Scalar(1e-3);
        for (Scalar z : zs) {
            if (abs(z) + h >= Scalar(1))
                continue;
            const Scalar sd = d2F(ex, z + h) - 2 * d2F(ex, z) + d2F(ex, z - h);
            worst = std::min(worst, static_cast<double>(sd / (abs(d2F(ex, z)) + 1)));
        }
        rep.checks.push_back({"F2_convex", worst >= -1e-10, worst});
    }

    // growth bound F''(z) <= C exp(C |F'(z)|): smallest C per sample by bisection
    {
        const PotentialSpec<Scalar> ex{p.theta, p.theta0, Scalar(0)};
        double cmax = 0;
        for (Scalar z : zs) {
            const double a = std::abs(static_cast<double>(dF(ex, z)));
            const double b = static_cast<double>(d2F(ex, z));
            double lo = 0, hi = 1;
            while (hi * std::exp(hi * a) < b)
                hi *= 2;
            for (int it = 0; it < 100; ++it) {
                const double mid = 0.5 * (lo + hi);
                (mid * std::exp(mid * a) < b ? lo : hi) = mid;
            }
            cmax = std::max(cmax, hi);
        }
        rep.growth_constant = cmax;
        rep.checks.push_back({"F2_exponential_growth", std::isfinite(cmax), cmax});
    }

    if (!p.exact()) {
        double worst = std::numeric_limits<double>::infinity();
        for (int k = 0; k <= 4000; ++k) {
            const Scalar z = Scalar(-3 + 6.0 * k / 4000);
            worst = std::min(worst, static_cast<double>(d2psi(p, z) + p.alpha()));
        }
        rep.checks.push_back({"psi2_ge_minus_alpha", worst >= -1e-12, worst});
    }

    {
        const double lo = 2 * static_cast<double>(visc.nu_star());
        const double hi = static_cast<double>(visc.nu_upper());
        double worst = std::numeric_limits<double>::infinity();
        for (int k = 0; k <= 4000; ++k) {
            const double v = static_cast<double>(nu(visc, Scalar(-5 + 10.0 * k / 4000)));
            worst = std::min({worst, v - lo, hi - v});
        }
        rep.checks.push_back({"viscosity_bounds", lo > 0 && worst >= -1e-12, worst});
    }
    return rep;
}

} // namespace modelh

#endif
