#ifndef MODELH_CHNS_HPP
#define MODELH_CHNS_HPP

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <sstream>
#include <stdexcept>
#include <string>

#include <Eigen/SparseLU>

#include "modelh/elliptic.hpp"
#include "modelh/stokes.hpp"

namespace modelh {

enum class TimeScheme { ConvexSplit, FullyImplicitNewton };
enum class KortewegForm { MuGradPhi, TensorDiv };

inline std::string_view to_string(TimeScheme s)
{
    return s == TimeScheme::ConvexSplit ? "convex_split" : "fully_implicit_newton";
}
inline std::string_view to_string(KortewegForm k)
{
    return k == KortewegForm::MuGradPhi ? "mu_grad_phi" : "tensor_div";
}

struct SolverConfig {
    double dt = 1e-3;
    double t_end = 1.0;
    TimeScheme scheme = TimeScheme::ConvexSplit;
    KortewegForm korteweg_form = KortewegForm::MuGradPhi;
    double cfl_max = 0.5;
    bool flow = true;  ///< false freezes u (pure Cahn-Hilliard when u = 0)
    int report_every = 1;
    int snapshot_every = 0;  ///< 0: initial and final snapshots only

    double newton_tol = 1e-10;
    int newton_max = 50;
    double safeguard_margin = 0.05;
    double ch_cg_max_tol = 1e-2;  ///< loosest inner tolerance of the Newton systems
    int ch_cg_max_iter = 300;  ///< beyond this the sparse direct fallback is used
    double viscous_tol = 1e-12;
    int viscous_max_iter = 1000;

    void validate() const
    {
        if (!(dt > 0))
            throw std::invalid_argument("dt must be positive");
        if (!(t_end >= 0))
            throw std::invalid_argument("t_end must be non-negative");
        if (!(cfl_max > 0 && cfl_max <= 1))
            throw std::invalid_argument("cfl_max must lie in (0, 1]");
        if (report_every <= 0 || snapshot_every < 0)
            throw std::invalid_argument("report/snapshot cadence must be positive");
        if (!(newton_tol > 0 && newton_tol < 1) || !(viscous_tol > 0 && viscous_tol < 1))
            throw std::invalid_argument("solver tolerances must lie in (0, 1)");
        if (newton_max <= 0 || ch_cg_max_iter <= 0 || viscous_max_iter <= 0)
            throw std::invalid_argument("iteration limits must be positive");
        if (!(safeguard_margin > 0 && safeguard_margin < 1))
            throw std::invalid_argument("safeguard margin must lie in (0, 1)");
    }
};

template <typename Scalar = double>
struct State {
    double t = 0;
    MacField<Scalar> u;
    ScalarField<Scalar> phi;
    ScalarField<Scalar> mu;
    ScalarField<Scalar> pi;

    State() = default;
    explicit State(const Grid& g) : u(g), phi(g), mu(g), pi(g) {}
    const Grid& grid() const { return phi.grid; }
};

struct EnergyReport {
    double kinetic = 0;
    double interfacial = 0;
    double bulk = 0;
    double total = 0;
    double visc_dissipation = 0;
    double chem_dissipation = 0;
};

/// Per-step solver statistics.
struct StepInfo {
    int newton_iterations = 0;
    int ch_linear_iterations = 0;
    int ch_direct_solves = 0;  ///< Newton systems handed to the sparse fallback
    double ch_residual = 0;
    int viscous_iterations = 0;
    double div_residual = 0;  ///< l2(div u) after projection
    double cfl = 0;
    bool cfl_exceeded = false;
};

template <typename Scalar>
ScalarField<Scalar> chemical_potential(const ScalarField<Scalar>& phi, const PotentialSpec<Scalar>& spec)
{
    return map(phi, [&](Scalar z) { return dpsi(spec, z); }) - laplace(phi);
}

/// Rejects phase fields the exact potential cannot evaluate.
template <typename Scalar>
void require_admissible(const ScalarField<Scalar>& phi, const PotentialSpec<Scalar>& spec)
{
    if (!phi.values.allFinite())
        throw std::domain_error("phase field contains non-finite values");
    if (spec.exact() && !(linf(phi) < Scalar(1)))
        throw std::domain_error("phase field touches +-1 with the exact potential; "
                                "prepare the datum with prepare_initial_datum first");
}

template <typename Scalar>
EnergyReport energy(const State<Scalar>& s, const PotentialSpec<Scalar>& spec, const ViscositySpec<Scalar>& visc)
{
    EnergyReport e;
    const Grid& g = s.grid();
    e.kinetic = 0.5 * static_cast<double>(inner(s.u, s.u));
    const MacField<Scalar> gp = gradient_to_faces(s.phi);
    e.interfacial = 0.5 * static_cast<double>(inner(gp, gp));
    e.bulk = static_cast<double>(map(s.phi, [&](Scalar z) { return psi(spec, z); }).values.sum()) * g.cell_area();
    e.total = e.kinetic + e.interfacial + e.bulk;
    e.visc_dissipation = static_cast<double>(viscous_dissipation(s.u, viscosity_field(s.phi, visc)));
    const MacField<Scalar> gm = gradient_to_faces(s.mu);
    e.chem_dissipation = static_cast<double>(inner(gm, gm));
    return e;
}

/// Korteweg force on the faces from (phi, mu).
///
/// MuGradPhi: mu averaged to faces times the face gradient of phi.
/// TensorDiv: grad(|grad phi|^2 / 2 + Psi(phi)) - div(grad phi (x) grad phi),
/// equal to the first form up to a discrete gradient plus O(h^2).
template <typename Scalar>
MacField<Scalar> korteweg_force(const ScalarField<Scalar>& phi, const ScalarField<Scalar>& mu,
                                const PotentialSpec<Scalar>& spec, KortewegForm form)
{
    const Grid& g = phi.grid;
    const MacField<Scalar> gp = gradient_to_faces(phi);
    if (form == KortewegForm::MuGradPhi)
        return hadamard(average_to_faces(mu), gp);

    const int nx = g.nx, ny = g.ny;
    // squared face gradients averaged to cells
    const Array2<Scalar> gx2 = Scalar(0.5) * (gp.u.topRows(nx).square() + gp.u.bottomRows(nx).square());
    const Array2<Scalar> gy2 = Scalar(0.5) * (gp.v.leftCols(ny).square() + gp.v.rightCols(ny).square());
    Array2<Scalar> txy = Array2<Scalar>::Zero(nx + 1, ny + 1);
    for (int j = 0; j <= ny; ++j) {
        for (int i = 0; i <= nx; ++i) {
            int jm = j - 1, jj = j, im = i - 1, ii = i;
            if (g.periodic()) {
                jm = (jm + ny) % ny;
                jj %= ny;
                im = (im + nx) % nx;
                ii %= nx;
            } else if (i == 0 || i == nx || j == 0 || j == ny) {
                continue;  // one factor is a wall-normal derivative, zero
            }
            const Scalar ax = Scalar(0.5) * (gp.u(i, jm) + gp.u(i, jj));
            const Scalar ay = Scalar(0.5) * (gp.v(im, j) + gp.v(ii, j));
            txy(i, j) = ax * ay;
        }
    }
    ScalarField<Scalar> pot(g, Scalar(0.5) * (gx2 + gy2));
    pot += map(phi, [&](Scalar z) { return psi(spec, z); });
    return gradient_to_faces(pot) + neg_div_tensor<Scalar>(gx2, gy2, txy, g);
}

/// Time stepper with the spectral factorizations of one grid cached.
template <typename Scalar = double>
class Stepper {
public:
    Stepper(const Grid& g, const SolverConfig& cfg, const PotentialSpec<Scalar>& spec, const ViscositySpec<Scalar>& visc)
        : grid_(g), cfg_(cfg), spec_(spec), visc_(visc), scalar_(g), projector_(g), viscous_(g)
    {
        cfg_.validate();
        spec_.validate();
        visc_.validate();
    }

    const SolverConfig& config() const { return cfg_; }
    const PotentialSpec<Scalar>& potential() const { return spec_; }
    const ViscositySpec<Scalar>& viscosity() const { return visc_; }

    struct ChResult {
        ScalarField<Scalar> phi;
        ScalarField<Scalar> mu;
    };

    /// One Cahn-Hilliard step
    ///   (phi - phi^n)/dt + div(u^n phi^n) = laplace(mu) + source,
    ///   mu = -laplace(phi) + F'(phi) - theta0 phi^n   (convex splitting)
    /// solved as the minimization of a strictly convex functional over fields
    /// with prescribed mean. FullyImplicitNewton uses -theta0 phi instead.
    ChResult ch_step(const State<Scalar>& s, const ScalarField<Scalar>* source = nullptr, StepInfo* info = nullptr) const
    {
        using std::abs;
        const Grid& g = grid_;
        const double dt = cfg_.dt;
        const Scalar th0 = spec_.theta0;
        const bool implicit_concave = cfg_.scheme == TimeScheme::FullyImplicitNewton;
        const ScalarField<Scalar>& phi_n = s.phi;
        require_admissible(phi_n, spec_);

        // explicit transport and source, mean split off (the mean only shifts phi)
        ScalarField<Scalar> a = advect_scalar(s.u, phi_n);
        Scalar src_mean = 0;
        if (source) {
            require_same_grid(g, source->grid);
            src_mean = mean(*source);
            a -= *source;
        }
        a = remove_mean(a);
        const ScalarField<Scalar> z0 = scalar_.poisson(a);  // A0^{-1} a

        // start from phi^n shifted by the source mean
        ScalarField<Scalar> phi = phi_n;
        phi.values += Scalar(dt) * src_mean;
        require_admissible(phi, spec_);
        ScalarField<Scalar> y(g);  // A0^{-1} (phi - phi^n - dt src_mean)

        auto gradient = [&](const ScalarField<Scalar>& p, const ScalarField<Scalar>& yy) {
            ScalarField<Scalar> r = map(p, [&](Scalar z) { return dF(spec_, z); });
            r -= laplace(p);
            r += (Scalar(1) / Scalar(dt)) * yy;
            r += z0;
            r -= th0 * (implicit_concave ? p : phi_n);
            return remove_mean(r);
        };
        auto functional = [&](const ScalarField<Scalar>& p, const ScalarField<Scalar>& yy) {
            const ScalarField<Scalar> d = p - phi_n;
            const MacField<Scalar> gp = gradient_to_faces(p);
            Scalar j = inner(d, yy) / Scalar(2 * dt) + inner(z0, p) + Scalar(0.5) * inner(gp, gp)
                       + map(p, [&](Scalar z) { return F(spec_, z); }).values.sum() * Scalar(g.cell_area());
            j -= implicit_concave ? Scalar(0.5) * th0 * inner(p, p) : th0 * inner(phi_n, p);
            return j;
        };
        const double area_root = std::sqrt(g.area());
        const double scale = area_root * std::max<double>(
            {1.0, static_cast<double>(linf(laplace(phi_n))),
             static_cast<double>(linf(map(phi_n, [&](Scalar z) { return dF(spec_, z); })))});
        const double eps = static_cast<double>(std::numeric_limits<Scalar>::epsilon());
        auto floor_of = [&](const ScalarField<Scalar>& p, const ScalarField<Scalar>& yy) {
            const ScalarField<Scalar> c = map(p, [&](Scalar z) { return d2F(spec_, z) * abs(z); });
            const double stencil = 4 / (g.hx() * g.hx()) + 4 / (g.hy() * g.hy());
            return 64 * eps
                   * (static_cast<double>(l2(c)) + stencil * static_cast<double>(l2(p))
                      + static_cast<double>(l2(yy)) / dt);
        };

        StepInfo st;
        ScalarField<Scalar> r = gradient(phi, y);
        double rnorm = static_cast<double>(l2(r));
        const double tol = cfg_.newton_tol * scale;
        while (rnorm > std::max(tol, floor_of(phi, y))) {
            if (st.newton_iterations >= cfg_.newton_max)
                throw SolverError("cahn-hilliard newton (reduce dt)", rnorm / scale, st.newton_iterations);
            // Hessian A0^{-1}/dt + A + diag(c), mean-zero space
            ScalarField<Scalar> c = map(phi, [&](Scalar z) { return d2F(spec_, z); });
            if (implicit_concave)
                c.values -= th0;
            const Scalar shift = std::max(mean(c), Scalar(0));
            const double lin_tol = std::min(cfg_.ch_cg_max_tol, std::max(1e-14, 0.1 * rnorm / scale));
            ScalarField<Scalar> delta;
            try {
                delta = newton_direction(c, shift, Scalar(-1) * r, lin_tol, st);
            } catch (const SolverError&) {
                // strongly varying F'' (cells next to +-1) defeats the spectral preconditioner
                delta = direct_newton_direction(c, r);
                ++st.ch_direct_solves;
            }
            delta = remove_mean(delta);
            const ScalarField<Scalar> ydelta = scalar_.poisson(delta);

            const Scalar j0 = functional(phi, y);
            const Scalar slope = inner(r, delta);
            Scalar step = spec_.exact() ? fraction_to_boundary(phi, delta, cfg_.safeguard_margin) : Scalar(1);
            ScalarField<Scalar> trial, ytrial, rt;
            double tnorm = 0;
            bool accepted = false;
            for (int halvings = 0; halvings <= 30 && !accepted; ++halvings, step *= Scalar(0.5)) {
                trial = phi + step * delta;
                // the safeguard can round onto +-1 when the gap is a few ulps
                if (spec_.exact() && !(linf(trial) < Scalar(1)))
                    continue;
                ytrial = y + step * ydelta;
                rt = gradient(trial, ytrial);
                tnorm = static_cast<double>(l2(rt));
                accepted = tnorm < rnorm || functional(trial, ytrial) <= j0 + Scalar(1e-4) * step * slope;
            }
            ++st.newton_iterations;
            if (!accepted) {
                if (rnorm <= 100 * std::max(tol, floor_of(phi, y)))
                    break;
                throw SolverError("cahn-hilliard newton line search (reduce dt)", rnorm / scale, st.newton_iterations);
            }
            phi = std::move(trial);
            y = std::move(ytrial);
            r = std::move(rt);
            rnorm = tnorm;
            // past this point F' is known to fewer digits than the tolerance asks for
            if (floor_of(phi, y) > 1e-6 * scale)
                throw SolverError("cahn-hilliard newton: iterate within round-off of +-1 (reduce dt or resolve the interface)",
                                  rnorm / scale, st.newton_iterations);
        }
        st.ch_residual = rnorm / scale;

        ChResult out;
        out.mu = map(phi, [&](Scalar z) { return dF(spec_, z); }) - laplace(phi);
        out.mu -= th0 * (implicit_concave ? phi : phi_n);
        out.phi = std::move(phi);
        if (info) {
            info->newton_iterations = st.newton_iterations;
            info->ch_linear_iterations = st.ch_linear_iterations;
            info->ch_direct_solves = st.ch_direct_solves;
            info->ch_residual = st.ch_residual;
        }
        return out;
    }

    /// Projection step for the momentum equation with nu(phi_new) frozen:
    ///   (u* - u^n)/dt + N(u^n) - div(nu D u*) = K(phi_new, mu_new),
    ///   u^{n+1} = u* - grad q,  laplace(q) = div(u*),  pi = q / dt.
    std::pair<MacField<Scalar>, ScalarField<Scalar>> ns_step(const State<Scalar>& s, const ScalarField<Scalar>& phi_new,
                                                             const ScalarField<Scalar>& mu_new,
                                                             StepInfo* info = nullptr) const
    {
        const Grid& g = grid_;
        const Scalar idt = Scalar(1) / Scalar(cfg_.dt);
        StepInfo st;
        st.cfl = static_cast<double>(linf(s.u)) * cfg_.dt / g.h_min();
        st.cfl_exceeded = st.cfl > cfg_.cfl_max;

        const ViscosityField<Scalar> nuf = viscosity_field(phi_new, visc_);
        MacField<Scalar> b = idt * s.u;
        b -= convection(s.u);
        b += korteweg_force(phi_new, mu_new, spec_, cfg_.korteweg_form);
        b.enforce_boundary();

        VelocitySpectralInverse<Scalar> m = viscous_;
        const Scalar nref = mean(nuf.cells);
        m.set_symbol(idt, nref, Scalar(0.5) * nref, Scalar(0.5) * nref, nref);
        MacField<Scalar> ustar = s.u;
        const CgStats cg = pcg([&](const MacField<Scalar>& w) { return idt * w + apply_viscous(w, nuf); },
                               [&](const MacField<Scalar>& r) { return m.apply(r); }, b, ustar, cfg_.viscous_tol,
                               cfg_.viscous_max_iter, "viscous predictor");
        st.viscous_iterations = cg.iterations;

        ScalarField<Scalar> q;
        MacField<Scalar> unew = projector_.project(ustar, &q);
        st.div_residual = static_cast<double>(l2(divergence(unew)));
        if (info) {
            info->viscous_iterations = st.viscous_iterations;
            info->div_residual = st.div_residual;
            info->cfl = st.cfl;
            info->cfl_exceeded = st.cfl_exceeded;
        }
        return {std::move(unew), idt * q};
    }

    /// CH step with u^n, then NS step with the new (phi, mu).
    State<Scalar> coupled_step(const State<Scalar>& s, const ScalarField<Scalar>* ch_source = nullptr,
                               StepInfo* info = nullptr) const
    {
        StepInfo st;
        ChResult ch = ch_step(s, ch_source, &st);
        State<Scalar> next(grid_);
        if (cfg_.flow) {
            auto [u, p] = ns_step(s, ch.phi, ch.mu, &st);
            next.u = std::move(u);
            next.pi = std::move(p);
        } else {
            next.u = s.u;
            st.div_residual = static_cast<double>(l2(divergence(s.u)));
        }
        next.phi = std::move(ch.phi);
        next.mu = std::move(ch.mu);
        next.t = s.t + cfg_.dt;
        if (info)
            *info = st;
        return next;
    }

private:
    // PCG on Pi (A0^{-1}/dt + A + diag c) Pi with preconditioner
    // M = A0^{-1}/dt + A + shift (exact in the cosine/Fourier basis). M p is
    // carried by recurrence (M z = r), so each iteration costs one spectral
    // solve.
    ScalarField<Scalar> newton_direction(const ScalarField<Scalar>& c, Scalar shift, const ScalarField<Scalar>& b,
                                         double rel_tol, StepInfo& st) const
    {
        const Grid& g = grid_;
        const Scalar dt = Scalar(cfg_.dt);
        const auto& basis = scalar_.basis();
        auto minv = [&](const ScalarField<Scalar>& r) {
            return ScalarField<Scalar>(g, basis.apply(r.values, [&](Scalar lx, Scalar ly) {
                const Scalar lam = lx + ly;
                return lam == Scalar(0) ? Scalar(0) : Scalar(1) / (Scalar(1) / (dt * lam) + lam + shift);
            }));
        };
        ScalarField<Scalar> dc = c;
        dc.values -= shift;

        ScalarField<Scalar> x(g);
        const double bnorm = static_cast<double>(l2(b));
        if (bnorm == 0)
            return x;
        ScalarField<Scalar> r = b;
        ScalarField<Scalar> z = minv(r);
        ScalarField<Scalar> p = z;
        ScalarField<Scalar> mp = r;
        Scalar rz = inner(r, z);
        double rnorm = bnorm;
        int it = 0;
        while (rnorm > rel_tol * bnorm) {
            if (it >= cfg_.ch_cg_max_iter)
                throw SolverError("cahn-hilliard newton direction", rnorm / bnorm, it);
            ScalarField<Scalar> hp = mp + remove_mean(hadamard(dc, p));
            const Scalar php = inner(p, hp);
            if (!(php > 0))
                throw SolverError("cahn-hilliard hessian not positive definite (reduce dt)", rnorm / bnorm, it);
            const Scalar alpha = rz / php;
            x += alpha * p;
            r -= alpha * hp;
            z = minv(r);
            const Scalar rz_new = inner(r, z);
            const Scalar beta = rz_new / rz;
            rz = rz_new;
            p = z + beta * p;
            mp = r + beta * mp;
            rnorm = static_cast<double>(l2(r));
            ++it;
        }
        st.ch_linear_iterations += it;
        return x;
    }

    // The same Newton system multiplied by A: (I/dt + A (A + diag c)) delta = -A r.
    // The matrix is sparse; its column sums vanish against A, so delta keeps mean zero.
    ScalarField<Scalar> direct_newton_direction(const ScalarField<Scalar>& c, const ScalarField<Scalar>& r) const
    {
        using SpMat = Eigen::SparseMatrix<Scalar>;
        using Vec = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;
        const Grid& g = grid_;
        if (laplace_.rows() == 0)
            laplace_ = detail::neg_laplace_matrix<Scalar>(g);
        const Eigen::Index n = laplace_.rows();
        SpMat ac = laplace_;
        for (Eigen::Index q = 0; q < n; ++q)
            ac.coeffRef(q, q) += c.values(q);
        SpMat k = laplace_ * ac;
        for (Eigen::Index q = 0; q < n; ++q)
            k.coeffRef(q, q) += Scalar(1) / Scalar(cfg_.dt);
        k.makeCompressed();
        Eigen::SparseLU<SpMat> lu;
        lu.compute(k);
        if (lu.info() != Eigen::Success)
            throw SolverError("cahn-hilliard newton direct factorization", 0.0, 0);
        const Vec rhs = -(laplace_ * Eigen::Map<const Vec>(r.values.data(), n));
        ScalarField<Scalar> d(g);
        Eigen::Map<Vec>(d.values.data(), n) = lu.solve(rhs);
        return d;
    }

    Grid grid_;
    SolverConfig cfg_;
    PotentialSpec<Scalar> spec_;
    ViscositySpec<Scalar> visc_;
    NeumannSolver<Scalar> scalar_;
    Projector<Scalar> projector_;
    VelocitySpectralInverse<Scalar> viscous_;
    mutable Eigen::SparseMatrix<Scalar> laplace_;  // built on first direct solve
};

template <typename Scalar>
typename Stepper<Scalar>::ChResult ch_step(const State<Scalar>& s, const SolverConfig& cfg,
                                           const PotentialSpec<Scalar>& spec, const ViscositySpec<Scalar>& visc = {})
{
    return Stepper<Scalar>(s.grid(), cfg, spec, visc).ch_step(s);
}

template <typename Scalar>
std::pair<MacField<Scalar>, ScalarField<Scalar>> ns_step(const State<Scalar>& s, const ScalarField<Scalar>& phi_new,
                                                         const ScalarField<Scalar>& mu_new, const SolverConfig& cfg,
                                                         const PotentialSpec<Scalar>& spec,
                                                         const ViscositySpec<Scalar>& visc)
{
    return Stepper<Scalar>(s.grid(), cfg, spec, visc).ns_step(s, phi_new, mu_new);
}

template <typename Scalar>
State<Scalar> coupled_step(const State<Scalar>& s, const SolverConfig& cfg, const PotentialSpec<Scalar>& spec,
                           const ViscositySpec<Scalar>& visc)
{
    return Stepper<Scalar>(s.grid(), cfg, spec, visc).coupled_step(s);
}

/// Output hooks of run(); any of them may be empty.
template <typename Scalar = double>
struct RunSinks {
    std::function<void(const State<Scalar>&, const EnergyReport&, const StepInfo&)> on_report;
    std::function<void(const State<Scalar>&)> on_snapshot;
    std::function<void(const std::string&)> on_warning;
    /// Optional CH source term evaluated at the new time level (manufactured runs).
    std::function<ScalarField<Scalar>(double)> ch_source;
};

/// Builds a consistent initial state: checks admissibility, makes u
/// boundary-consistent and computes mu.
template <typename Scalar>
State<Scalar> make_state(double t, MacField<Scalar> u, ScalarField<Scalar> phi, const PotentialSpec<Scalar>& spec)
{
    require_same_grid(u.grid, phi.grid);
    require_admissible(phi, spec);
    State<Scalar> s(phi.grid);
    s.t = t;
    u.enforce_boundary();
    s.u = std::move(u);
    s.mu = chemical_potential(phi, spec);
    s.phi = std::move(phi);
    return s;
}

/// Time loop to cfg.t_end. Times are n * dt with n a global step index, so a
/// run restarted from a saved state reproduces the straight run bit for bit.
template <typename Scalar>
State<Scalar> run(const State<Scalar>& initial, const SolverConfig& cfg, const PotentialSpec<Scalar>& spec,
                  const ViscositySpec<Scalar>& visc, const RunSinks<Scalar>& sinks = {})
{
    cfg.validate();
    State<Scalar> s = initial;
    require_admissible(s.phi, spec);
    const long long n0 = std::llround(initial.t / cfg.dt);
    const long long n_end = std::llround(cfg.t_end / cfg.dt);
    StepInfo info;
    info.div_residual = static_cast<double>(l2(divergence(s.u)));
    if (sinks.on_report)
        sinks.on_report(s, energy(s, spec, visc), info);
    if (sinks.on_snapshot)
        sinks.on_snapshot(s);
    if (n_end <= n0)
        return s;

    const Stepper<Scalar> stepper(s.grid(), cfg, spec, visc);
    bool warned = false;
    for (long long n = n0 + 1; n <= n_end; ++n) {
        const double t_new = static_cast<double>(n) * cfg.dt;
        ScalarField<Scalar> src;
        if (sinks.ch_source)
            src = sinks.ch_source(t_new);
        s = stepper.coupled_step(s, sinks.ch_source ? &src : nullptr, &info);
        s.t = t_new;
        if (info.cfl_exceeded && sinks.on_warning && !warned) {
            std::ostringstream msg;
            msg << "CFL number " << info.cfl << " exceeds " << cfg.cfl_max << " at t = " << t_new;
            sinks.on_warning(msg.str());
            warned = true;
        }
        // cadence follows the global index so restarts emit the same rows
        if (sinks.on_report && (n % cfg.report_every == 0 || n == n_end))
            sinks.on_report(s, energy(s, spec, visc), info);
        if (sinks.on_snapshot && ((cfg.snapshot_every > 0 && n % cfg.snapshot_every == 0) || n == n_end))
            sinks.on_snapshot(s);
    }
    return s;
}

} // namespace modelh

#endif
