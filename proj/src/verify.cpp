#include <algorithm>
#include <cmath>

#include "modelh/app/commands.hpp"
#include "modelh/app/initial.hpp"

namespace modelh::app {

namespace {

constexpr double pi = 3.14159265358979323846;

// Smooth field from a handful of low modes with seeded coefficients.
ScalarField<double> smooth_field(const Grid& g, std::uint64_t seed, double amp)
{
    double c[6];
    for (int k = 0; k < 6; ++k)
        c[k] = uniform_pm1(seed, static_cast<std::uint64_t>(k));
    const double kx = pi / g.lx, ky = pi / g.ly;
    return ScalarField<double>::sample(g, [&](double x, double y) {
        return amp * (c[0] * std::cos(kx * x) + c[1] * std::cos(ky * y) + c[2] * std::cos(2 * kx * x) * std::cos(ky * y)
                      + c[3] * std::cos(kx * x) * std::cos(3 * ky * y) + c[4] * std::cos(3 * kx * x) + c[5] * x * y / (g.lx * g.ly));
    });
}

MacField<double> taylor_green(const Grid& g)
{
    return MacField<double>::sample(
        g, [&](double x, double y) { return std::sin(pi * x) * std::cos(pi * y); },
        [&](double x, double y) { return -std::cos(pi * x) * std::sin(pi * y); });
}

class Suite {
public:
    explicit Suite(bool strict) : strict_(strict) {}

    // value <= tol (tol tightened tenfold in strict mode)
    void below(const std::string& name, double value, double tol)
    {
        const double t = strict_ ? tol / 10 : tol;
        checks_.push_back({name, value, t, value <= t});
    }
    // |value - target| <= half_width (window halved in strict mode)
    void within(const std::string& name, double value, double target, double half_width)
    {
        const double w = strict_ ? half_width / 2 : half_width;
        checks_.push_back({name, value, w, std::abs(value - target) <= w});
    }

    std::vector<VerifyCheck> take() { return std::move(checks_); }

private:
    bool strict_;
    std::vector<VerifyCheck> checks_;
};

} // namespace

std::vector<VerifyCheck> verify(const VerifyOptions& opts)
{
    Suite suite(opts.strict);
    auto lap = [&](const ScalarField<double>& f) { return opts.laplace_override ? opts.laplace_override(f) : laplace(f); };
    const PotentialSpec<double> pot{1.0, 2.0, 0.0};
    const ViscositySpec<double> visc{1.0, 3.0};

    for (Boundary bc : {Boundary::NeumannNoSlip, Boundary::Periodic}) {
        const Grid g(24, 20, 1.0, 1.0, bc);
        const std::string tag = bc == Boundary::Periodic ? " (periodic)" : " (walls)";
        const auto f = smooth_field(g, 11, 1.0), h = smooth_field(g, 12, 1.0);
        const auto gf = gradient_to_faces(f), gh = gradient_to_faces(h);
        // (grad f, grad h) = -(f, laplace h)
        suite.below("adjointness: laplace" + tag, std::abs(inner(gf, gh) + inner(f, lap(h))) / (l2(gf) * l2(gh)), 1e-12);
        // (grad f, w) = -(f, div w)
        MacField<double> w = gradient_to_faces(h);
        w.u += 0.3;
        w.enforce_boundary();
        suite.below("adjointness: gradient/divergence" + tag,
                    std::abs(inner(gf, w) + inner(f, divergence(w))) / (l2(gf) * l2(w)), 1e-12);
        suite.below("conservation: sum of divergence" + tag, std::abs(divergence(w).values.sum()) * g.cell_area() / l2(w), 1e-12);
    }

    {
        auto err = [&](int n) {
            const Grid g(n, n, 1.0, 1.0, Boundary::NeumannNoSlip);
            const auto f = ScalarField<double>::sample(g, [](double x, double) { return std::cos(pi * x); });
            return l2(solve_neumann_poisson(f) - (1 / (pi * pi)) * f);
        };
        suite.within("poisson cosine oracle: error ratio 32 -> 64", err(32) / err(64), 4.0, 0.5);
        const Grid g(64, 64, 1.0, 1.0, Boundary::NeumannNoSlip);
        const auto f = ScalarField<double>::sample(g, [](double x, double) { return std::cos(pi * x); });
        const double exact = 1 / (pi * std::sqrt(2.0));
        suite.below("dual norm ||cos(pi x)||_*: relative error", std::abs(dual_norm_star(f) - exact) / exact, 1e-2);
        const auto u = solve_neumann_poisson(f);
        suite.below("poisson residual with the operator under test", l2(lap(u) + remove_mean(f)) / l2(f), 1e-10);
    }

    {
        const Grid g(32, 32, 1.0, 1.0, Boundary::NeumannNoSlip);
        double worst = 0;
        for (std::uint64_t seed = 0; seed < 5; ++seed) {
            const auto f = smooth_field(g, 100 + seed, 3.0);
            const auto u = solve_log_neumann(f, pot);
            worst = std::max(worst, linf(map(u, [&](double z) { return dF(pot, z); })) - linf(f));
        }
        suite.below("log Neumann maximum principle: max|F'(u)| - max|f|", worst, 1e-9);
    }

    {
        auto err = [](int n) {
            const Grid g(n, n, 2.0, 2.0, Boundary::Periodic);
            return l2(stokes_solve((2 * pi * pi) * taylor_green(g)).u - taylor_green(g));
        };
        suite.within("stokes Taylor-Green eigenfield: error ratio 16 -> 32", err(16) / err(32), 4.0, 0.5);
        const Grid g(32, 32, 2.0, 2.0, Boundary::Periodic);
        const auto r = remove_velocity_mean(leray_project(gradient_to_faces(smooth_field(g, 7, 1.0)) + taylor_green(g)));
        const double a = dual_norm_sharp(r), b = dual_norm_sharp_pairing(r);
        suite.below("dual norm ||.||_#: gradient and pairing forms", std::abs(a * a - b * b) / (b * b), 1e-10);
    }

    {
        const Grid g(24, 24, 1.0, 1.0, Boundary::NeumannNoSlip);
        const auto phi = smooth_field(g, 21, 0.3);
        const auto mu = chemical_potential(phi, pot);
        const auto w = leray_project(taylor_green(g));
        const double lhs = inner(korteweg_force(phi, mu, pot, KortewegForm::MuGradPhi), w);
        const double rhs = inner(advect_scalar(w, phi), mu);
        suite.below("korteweg force and transport cancel", std::abs(lhs - rhs) / (l2(mu) * l2(w)), 1e-12);
    }

    {
        RunConfig cfg;
        cfg.grid = Grid(32, 32, 8.0, 8.0, Boundary::Periodic);
        cfg.viscosity = visc;
        cfg.initial.kind = InitialKind::RandomSeeded;
        cfg.initial.amplitude = 0.05;
        cfg.initial.seed = 3;
        cfg.initial.velocity = VelocityKind::TaylorGreen;
        cfg.initial.velocity_amplitude = 0.2;
        cfg.solver.dt = 5e-3;
        cfg.solver.t_end = 0.1;
        const SimulationSummary s = simulate(cfg, false);
        suite.below("mass conservation over 20 coupled steps", s.max_mass_drift, 1e-12);

        cfg.solver.flow = false;
        cfg.initial.velocity = VelocityKind::Zero;
        const SimulationSummary c = simulate(cfg, false);
        suite.below("energy decay without flow: increasing steps", c.energy_increases, 0.0);
    }

    suite.below("binodal root of the logarithmic potential",
                std::abs(binodal_root(pot) - 0.957504024077268740676), 1e-12);
    return suite.take();
}

} // namespace modelh::app
