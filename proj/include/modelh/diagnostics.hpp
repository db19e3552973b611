#ifndef MODELH_DIAGNOSTICS_HPP
#define MODELH_DIAGNOSTICS_HPP

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <vector>

#include "modelh/chns.hpp"

namespace modelh {

struct StabilityRecord {
    double t = 0;
    double h_value = 0;      ///< (1/2)||u1 - u2||_#^2 + (1/2)||phi1 - phi2||_*^2
    double l2_u_diff = 0;
    double l2_phi_diff = 0;
    double projection_residual = 0;  ///< ||(I - P) du|| / ||du||, removed before the Stokes solve
};

struct RegularityRecord {
    double t = 0;
    double grad_u_norm = 0;
    double grad_mu_norm = 0;
    double lambda = 0;
    double sep_delta = 0;
    double sup_grad_u = 0;   ///< running suprema over t >= tau (zero before)
    double sup_grad_mu = 0;
};

struct RegularitySeries {
    std::vector<RegularityRecord> records;
    double tau = 0;
    /// smallest C with Lambda >= |grad u|^2/4 + |grad mu|^2/4 - C on the series
    double lambda_lower_constant = 0;
};

struct SeparationSeries {
    std::vector<double> t;
    std::vector<double> sep_delta;
    double tau = 0;
    double inf_after_tau = std::numeric_limits<double>::infinity();
};

/// Burn-in used when none is given: a tenth of the last time.
inline double default_tau(double t_end) { return 0.1 * t_end; }

/// One record of the two-trajectory functional at matching times.
template <typename Scalar>
StabilityRecord stability_record(const State<Scalar>& a, const State<Scalar>& b, const StokesConfig& cfg = {})
{
    require_same_grid(a.grid(), b.grid());
    if (std::abs(a.t - b.t) > 1e-9 * std::max(1.0, std::abs(a.t)))
        throw std::invalid_argument("stability monitor: trajectories are sampled at different times");
    StabilityRecord r;
    r.t = a.t;
    const MacField<Scalar> du = a.u - b.u;
    const ScalarField<Scalar> dphi = a.phi - b.phi;
    r.l2_u_diff = static_cast<double>(l2(du));
    r.l2_phi_diff = static_cast<double>(l2(dphi));
    if (r.l2_u_diff == 0 && r.l2_phi_diff == 0)
        return r;

    const MacField<Scalar> pdu = leray_project(du);
    r.projection_residual = r.l2_u_diff > 0 ? static_cast<double>(l2(du - pdu)) / r.l2_u_diff : 0.0;
    const double s = r.l2_u_diff > 0 ? static_cast<double>(dual_norm_sharp(pdu, cfg)) : 0.0;
    const double d = static_cast<double>(dual_norm_star(dphi));
    r.h_value = 0.5 * s * s + 0.5 * d * d;
    return r;
}

template <typename Scalar>
std::vector<StabilityRecord> stability_monitor(const std::vector<State<Scalar>>& traj1,
                                               const std::vector<State<Scalar>>& traj2,
                                               const StokesConfig& cfg = {})
{
    if (traj1.size() != traj2.size())
        throw std::invalid_argument("stability monitor: trajectories have different lengths");
    if (traj1.empty())
        return {};
    require_same_grid(traj1.front().grid(), traj2.front().grid());
    const double m1 = static_cast<double>(mean(traj1.front().phi)), m2 = static_cast<double>(mean(traj2.front().phi));
    if (std::abs(m1 - m2) > 1e-12)
        throw std::invalid_argument("stability monitor: initial phase fields have different means");
    std::vector<StabilityRecord> out;
    out.reserve(traj1.size());
    for (std::size_t k = 0; k < traj1.size(); ++k)
        out.push_back(stability_record(traj1[k], traj2[k], cfg));
    return out;
}

enum class LambdaAssembly {
    CellQuadrature,  ///< (div(u phi_f), mu) summed over cells
    FaceBilinear     ///< -(u phi_f, grad mu) summed over faces
};

/// Lambda = |grad u|^2/2 + |grad mu|^2/2 + (u . grad phi, mu). The two
/// assemblies are related by summation by parts and agree to round-off.
template <typename Scalar>
Scalar lambda_functional(const State<Scalar>& s, LambdaAssembly how = LambdaAssembly::CellQuadrature)
{
    const MacField<Scalar> gm = gradient_to_faces(s.mu);
    Scalar lam = Scalar(0.5) * grad_norm_sq(s.u) + Scalar(0.5) * inner(gm, gm);
    if (how == LambdaAssembly::CellQuadrature)
        lam += inner(advect_scalar(s.u, s.phi), s.mu);
    else
        lam -= inner(hadamard(s.u, average_to_faces(s.phi)), gm);
    return lam;
}

template <typename Scalar>
RegularityRecord regularity_record(const State<Scalar>& s)
{
    RegularityRecord r;
    r.t = s.t;
    r.grad_u_norm = static_cast<double>(h1_semi(s.u));
    r.grad_mu_norm = static_cast<double>(h1_semi(s.mu));
    r.lambda = static_cast<double>(lambda_functional(s));
    r.sep_delta = 1.0 - static_cast<double>(linf(s.phi));
    return r;
}

/// Streaming form of regularity_series for runs that do not keep states.
class RegularityAccumulator {
public:
    explicit RegularityAccumulator(double tau) { series_.tau = tau; }

    template <typename Scalar>
    const RegularityRecord& push(const State<Scalar>& s)
    {
        RegularityRecord r = regularity_record(s);
        if (r.t >= series_.tau) {
            sup_u_ = std::max(sup_u_, r.grad_u_norm);
            sup_mu_ = std::max(sup_mu_, r.grad_mu_norm);
        }
        r.sup_grad_u = sup_u_;
        r.sup_grad_mu = sup_mu_;
        const double gap = 0.25 * r.grad_u_norm * r.grad_u_norm + 0.25 * r.grad_mu_norm * r.grad_mu_norm - r.lambda;
        series_.lambda_lower_constant = std::max(series_.lambda_lower_constant, gap);
        series_.records.push_back(r);
        return series_.records.back();
    }

    const RegularitySeries& series() const { return series_; }

private:
    RegularitySeries series_;
    double sup_u_ = 0, sup_mu_ = 0;
};

/// Per-time norms, Lambda and separation with running suprema for t >= tau.
/// A negative tau selects default_tau of the last time.
template <typename Scalar>
RegularitySeries regularity_series(const std::vector<State<Scalar>>& traj, double tau = -1)
{
    if (tau < 0)
        tau = traj.empty() ? 0.0 : default_tau(traj.back().t);
    RegularityAccumulator acc(tau);
    for (const auto& s : traj)
        acc.push(s);
    return acc.series();
}

class SeparationAccumulator {
public:
    explicit SeparationAccumulator(double tau) { series_.tau = tau; }

    template <typename Scalar>
    double push(const State<Scalar>& s)
    {
        return push(s.t, static_cast<double>(linf(s.phi)));
    }

    double push(double t, double max_abs_phi)
    {
        const double d = 1.0 - max_abs_phi;
        series_.t.push_back(t);
        series_.sep_delta.push_back(d);
        if (t >= series_.tau)
            series_.inf_after_tau = std::min(series_.inf_after_tau, d);
        return d;
    }

    const SeparationSeries& series() const { return series_; }

private:
    SeparationSeries series_;
};

template <typename Scalar>
SeparationSeries separation_series(const std::vector<State<Scalar>>& traj, double tau = -1)
{
    if (tau < 0)
        tau = traj.empty() ? 0.0 : default_tau(traj.back().t);
    SeparationAccumulator acc(tau);
    for (const auto& s : traj)
        acc.push(s);
    return acc.series();
}

} // namespace modelh

#endif
