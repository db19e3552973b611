#include <doctest.h>

#include <cmath>

#include "modelh/elliptic.hpp"

using namespace modelh;

namespace {

constexpr double pi = 3.14159265358979323846;

ScalarField<double> cos_mode(const Grid& g, double amp)
{
    return ScalarField<double>::sample(g, [&](double x, double y) {
        return amp * std::cos(pi * x / g.lx) * std::cos(pi * y / g.ly);
    });
}

} // namespace

TEST_CASE("spectral axis bases diagonalize their matrices")
{
    for (AxisKind k : {AxisKind::NeumannCell, AxisKind::PeriodicCell, AxisKind::DirichletFace, AxisKind::DirichletGhost}) {
        const AxisBasis<double> b(k, 10, 0.1);
        const auto qtq = (b.q.transpose() * b.q).eval();
        CHECK((qtq - Eigen::MatrixXd::Identity(b.size(), b.size())).cwiseAbs().maxCoeff() < 1e-12);
        CHECK(b.lambda(0) >= 0);
        CHECK(b.singular == (k == AxisKind::NeumannCell || k == AxisKind::PeriodicCell));
    }
    // Dirichlet-face spectrum: (4/h^2) sin^2(k pi / (2 n))
    const AxisBasis<double> d(AxisKind::DirichletFace, 16, 1.0 / 16);
    CHECK(d.size() == 15);
    CHECK(d.lambda(0) == doctest::Approx(4 * 256 * std::pow(std::sin(pi / 32), 2)).epsilon(1e-12));
}

TEST_CASE("Neumann Poisson: second-order convergence on the cosine mode")
{
    auto err = [](int n) {
        const Grid g(n, n, 1.0, 1.0, Boundary::NeumannNoSlip);
        const auto f = cos_mode(g, 2 * pi * pi);
        const auto u = solve_neumann_poisson(f);
        return linf(u - cos_mode(g, 1.0));
    };
    const double e1 = err(32), e2 = err(64);
    CHECK(e1 < 1e-3);
    CHECK(e1 / e2 == doctest::Approx(4.0).epsilon(0.02));
}

TEST_CASE("Neumann Poisson: mean removal and exact residual")
{
    for (Boundary bc : {Boundary::NeumannNoSlip, Boundary::Periodic}) {
        const Grid g(24, 20, 1.3, 0.9, bc);
        auto f = ScalarField<double>::sample(g, [](double x, double y) { return std::exp(x) * std::sin(3 * y) + 0.7; });
        double m = 0;
        const auto u = solve_neumann_poisson(f, &m);
        CHECK(m == doctest::Approx(mean(f)));
        CHECK(std::abs(mean(u)) < 1e-13);
        CHECK(linf(laplace(u) + remove_mean(f)) < 1e-9);
    }
}

TEST_CASE("dual norm ||.||_* of 2 cos(pi x) cos(pi y) approaches 1/(pi sqrt 2)")
{
    const double exact = 0.225079079039276517388;
    double prev = 0;
    for (int n : {32, 64}) {
        const Grid g(n, n, 1.0, 1.0, Boundary::NeumannNoSlip);
        const auto f = cos_mode(g, 2.0);
        const double a = dual_norm_star(f), b = dual_norm_star_pairing(f);
        CHECK(a == doctest::Approx(b).epsilon(1e-12));
        const double e = std::abs(a - exact);
        if (prev > 0)
            CHECK(prev / e == doctest::Approx(4.0).epsilon(0.05));
        prev = e;
    }
    CHECK(prev < 1e-4);
}

TEST_CASE("dual norm ignores the mean")
{
    const Grid g(16, 16, 1.0, 1.0, Boundary::Periodic);
    const auto f = ScalarField<double>::sample(g, [](double x, double y) { return std::sin(2 * pi * x) + y * y; });
    CHECK(dual_norm_star(f) == doctest::Approx(dual_norm_star(f + ScalarField<double>::constant(g, 5.0))).epsilon(1e-12));
}

TEST_CASE("Helmholtz and truncation")
{
    const Grid g(20, 20, 1.0, 1.0, Boundary::NeumannNoSlip);
    const auto f = ScalarField<double>::sample(g, [](double x, double y) { return x - y * y; });
    const auto u = solve_helmholtz(f, 3.0);
    CHECK(linf(3.0 * u - laplace(u) - f) < 1e-10);
    CHECK_THROWS_AS(solve_helmholtz(f, 0.0), std::invalid_argument);

    const auto t = truncate(f, 0.25);
    CHECK(linf(t) <= 0.25);
    CHECK(t(10, 10) == f(10, 10));
    CHECK_THROWS_AS(truncate(f, -1.0), std::invalid_argument);
}

TEST_CASE("fraction to boundary keeps iterates inside (-1, 1)")
{
    const Grid g(4, 4, 1, 1, Boundary::Periodic);
    auto phi = ScalarField<double>::constant(g, 0.5);
    auto d = ScalarField<double>::constant(g, 1.0);
    CHECK(fraction_to_boundary(phi, d, 0.05) == doctest::Approx(0.95 * 0.5));
    d = ScalarField<double>::constant(g, -0.1);
    CHECK(fraction_to_boundary(phi, d, 0.05) == 1.0);
}

TEST_CASE("log Neumann solve: constant datum ln(3)/2 gives u = 1/2")
{
    const PotentialSpec<double> p{1.0, 2.0, 0.0};
    for (Boundary bc : {Boundary::NeumannNoSlip, Boundary::Periodic}) {
        const Grid g(16, 16, 1.0, 1.0, bc);
        const auto f = ScalarField<double>::constant(g, 0.549306144334054845697);
        const auto u = solve_log_neumann(f, p);
        CHECK(linf(u - ScalarField<double>::constant(g, 0.5)) < 1e-12);
    }
}

TEST_CASE("log Neumann solve: residual, separation and maximum principle")
{
    const PotentialSpec<double> p{1.0, 2.0, 0.0};
    // beyond |f| ~ 8 the residual is dominated by rounding of u next to +-1
    for (double k : {1.0, 5.0, 8.0}) {
        CAPTURE(k);
        const Grid g(32, 32, 1.0, 1.0, Boundary::NeumannNoSlip);
        const auto f = ScalarField<double>::sample(g, [&](double x, double y) {
            return k * std::tanh(20 * (x - 0.5)) * std::cos(pi * y * 0.3);
        });
        NewtonStats st;
        const auto u = solve_log_neumann(f, p, NeumannSolverConfig{}, static_cast<const ScalarField<double>*>(nullptr), &st);
        const auto r = map(u, [&](double z) { return dF(p, z); }) - laplace(u) - f;
        CHECK(l2(r) <= 1e-9 * l2(f));
        // |F'(u)| <= max|f|, i.e. |u| <= tanh(max|f| / theta)
        CHECK(linf(u) <= std::tanh(linf(f)) + 1e-12);
        CHECK(linf(map(u, [&](double z) { return dF(p, z); })) <= linf(f) * (1 + 1e-9));
        CHECK(st.iterations > 0);
    }
}

TEST_CASE("log Neumann solve with the regularized potential")
{
    const PotentialSpec<double> p{1.0, 2.0, 0.05};
    const Grid g(24, 24, 1.0, 1.0, Boundary::Periodic);
    const auto f = ScalarField<double>::sample(g, [](double x, double) { return 8 * std::sin(2 * pi * x); });
    const auto u = solve_log_neumann(f, p);
    const auto r = map(u, [&](double z) { return dF(p, z); }) - laplace(u) - f;
    CHECK(l2(r) <= 1e-9 * l2(f));
}

TEST_CASE("initial datum preparation separates from the pure phases")
{
    const PotentialSpec<double> p{1.0, 2.0, 0.0};
    const Grid g(48, 48, 1.0, 1.0, Boundary::NeumannNoSlip);
    const auto phi0 = ScalarField<double>::sample(g, [](double x, double) { return 0.999 * std::tanh((x - 0.5) / 0.02); });
    double prev_delta = 1.0;
    for (double k : {5.0, 10.0, 20.0, 40.0}) {
        CAPTURE(k);
        const auto d = prepare_initial_datum(phi0, k, p);
        CHECK(d.max_abs_dF <= k * (1 + 1e-9));
        CHECK(d.sep_delta >= 1 - std::tanh(k) - 1e-15);
        CHECK(d.sep_delta > 0);
        CHECK(d.sep_delta <= prev_delta + 1e-15);
        CHECK(linf(d.mu_tilde0k) <= k);
        prev_delta = d.sep_delta;
    }

    auto bad = phi0;
    bad(0, 0) = 1.0;
    CHECK_THROWS_AS(prepare_initial_datum(bad, 5.0, p), std::domain_error);
}
