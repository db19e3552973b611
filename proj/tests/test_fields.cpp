#include <doctest.h>

#include <cmath>
#include <random>

#include "modelh/velocity_ops.hpp"

using namespace modelh;

namespace {

constexpr double pi = 3.14159265358979323846;

ScalarField<double> random_cells(const Grid& g, unsigned seed)
{
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> d(-1.0, 1.0);
    ScalarField<double> f(g);
    for (Eigen::Index k = 0; k < f.values.size(); ++k)
        f.values(k) = d(rng);
    return f;
}

MacField<double> random_faces(const Grid& g, unsigned seed)
{
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> d(-1.0, 1.0);
    MacField<double> w(g);
    for (Eigen::Index k = 0; k < w.u.size(); ++k)
        w.u(k) = d(rng);
    for (Eigen::Index k = 0; k < w.v.size(); ++k)
        w.v(k) = d(rng);
    w.enforce_boundary();
    return w;
}

// Discretely solenoidal field from a random node stream function (zero on
// walls in no-slip mode).
MacField<double> solenoidal(const Grid& g, unsigned seed)
{
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> d(-1.0, 1.0);
    Array2<double> psi = Array2<double>::Zero(g.nx + 1, g.ny + 1);
    for (int j = 0; j <= g.ny; ++j)
        for (int i = 0; i <= g.nx; ++i)
            psi(i, j) = d(rng);
    if (g.periodic()) {
        psi.row(g.nx) = psi.row(0);
        psi.col(g.ny) = psi.col(0);
    } else {
        psi.row(0).setZero();
        psi.row(g.nx).setZero();
        psi.col(0).setZero();
        psi.col(g.ny).setZero();
    }
    MacField<double> w(g);
    for (int j = 0; j < g.ny; ++j)
        for (int i = 0; i <= g.nx; ++i)
            w.u(i, j) = (psi(i, j + 1) - psi(i, j)) / g.hy();
    for (int j = 0; j <= g.ny; ++j)
        for (int i = 0; i < g.nx; ++i)
            w.v(i, j) = -(psi(i + 1, j) - psi(i, j)) / g.hx();
    w.enforce_boundary();
    return w;
}

const Grid grids[] = {
    Grid(12, 9, 1.0, 0.75, Boundary::NeumannNoSlip),
    Grid(10, 14, 2.0, 1.5, Boundary::Periodic),
};

} // namespace

TEST_CASE("grid basics")
{
    const Grid g(8, 4, 2.0, 1.0, Boundary::Periodic);
    CHECK(g.hx() == 0.25);
    CHECK(g.xc(0) == 0.125);
    CHECK(g.area() == 2.0);
    CHECK_THROWS_AS(Grid(3, 8, 1, 1, Boundary::Periodic), std::invalid_argument);
    CHECK_THROWS_AS(Grid(8, 8, 0, 1, Boundary::Periodic), std::invalid_argument);
    CHECK(boundary_from_string("periodic") == Boundary::Periodic);
    CHECK(boundary_from_string("neumann") == Boundary::NeumannNoSlip);
    CHECK_THROWS_AS(boundary_from_string("dirichlet"), std::invalid_argument);

    const ScalarField<double> a(g), b(Grid(8, 4, 2.0, 1.0, Boundary::NeumannNoSlip));
    CHECK_THROWS_AS(inner(a, b), std::invalid_argument);
}

TEST_CASE("boundary convention of staggered fields")
{
    const Grid gn(6, 5, 1, 1, Boundary::NeumannNoSlip);
    const auto w = MacField<double>::sample(gn, [](double, double) { return 1.0; }, [](double, double) { return 2.0; });
    CHECK(w.u.row(0).isZero());
    CHECK(w.u.row(6).isZero());
    CHECK(w.v.col(5).isZero());
    CHECK(w.u(3, 2) == 1.0);

    const Grid gp(6, 5, 1, 1, Boundary::Periodic);
    auto p = random_faces(gp, 3);
    CHECK((p.u.row(6) == p.u.row(0)).all());
    CHECK((p.v.col(5) == p.v.col(0)).all());
}

TEST_CASE("laplace is second-order accurate on a Neumann eigenfunction")
{
    auto err = [](int n) {
        const Grid g(n, n, 1.0, 1.0, Boundary::NeumannNoSlip);
        const auto f = ScalarField<double>::sample(g, [](double x, double y) { return std::cos(pi * x) * std::cos(pi * y); });
        ScalarField<double> e = laplace(f) + 2 * pi * pi * f;
        return linf(e);
    };
    const double e1 = err(32), e2 = err(64);
    CHECK(e1 / e2 == doctest::Approx(4.0).epsilon(0.02));
}

TEST_CASE("discrete calculus identities")
{
    for (const Grid& g : grids) {
        CAPTURE(to_string(g.bc));
        const auto f = random_cells(g, 1), h = random_cells(g, 2);
        const auto w = random_faces(g, 5);
        const double s = linf(f);

        // div grad == laplace
        CHECK(linf(divergence(gradient_to_faces(f)) - laplace(f)) < 1e-10 * s / g.cell_area());
        // summation by parts
        CHECK(inner(laplace(f), h) == doctest::Approx(-inner(gradient_to_faces(f), gradient_to_faces(h))).epsilon(1e-12));
        CHECK(inner(gradient_to_faces(f), w) == doctest::Approx(-inner(f, divergence(w))).epsilon(1e-12));
        // laplace symmetric
        CHECK(inner(laplace(f), h) == doctest::Approx(inner(f, laplace(h))).epsilon(1e-12));
        // constants are in the kernel
        CHECK(linf(laplace(ScalarField<double>::constant(g, 3.0))) < 1e-10);
        // flux form is conservative
        CHECK(std::abs(divergence(w).values.sum()) < 1e-9);
    }
}

TEST_CASE("scalar transport: conservative and skew for solenoidal velocity")
{
    for (const Grid& g : grids) {
        CAPTURE(to_string(g.bc));
        const auto w = solenoidal(g, 7);
        CHECK(linf(divergence(w)) < 1e-10);
        const auto f = random_cells(g, 8), h = random_cells(g, 9);
        const auto a = advect_scalar(w, f);
        CHECK(std::abs(a.values.sum()) < 1e-9);
        CHECK(std::abs(inner(a, f)) < 1e-10);
        CHECK(inner(a, h) == doctest::Approx(-inner(advect_scalar(w, h), f)).epsilon(1e-10));
        // mu grad phi on faces vs -(phi, w . grad mu): same number
        const double route_a = inner(w, hadamard(average_to_faces(h), gradient_to_faces(f)));
        const double route_b = -inner(f, advect_scalar(w, h));
        CHECK(route_a == doctest::Approx(route_b).epsilon(1e-10));
    }
}

TEST_CASE("viscous operator is the gradient of its form")
{
    for (const Grid& g : grids) {
        CAPTURE(to_string(g.bc));
        auto c = random_cells(g, 11);
        c.values = 2.0 + c.values;  // positive, variable
        const auto nu = ViscosityField<double>::from_cells(c);
        const auto w = random_faces(g, 12), z = random_faces(g, 13);
        const double a = viscous_form(w, z, nu);
        CHECK(inner(apply_viscous(w, nu), z) == doctest::Approx(a).epsilon(1e-12));
        CHECK(inner(w, apply_viscous(z, nu)) == doctest::Approx(a).epsilon(1e-12));
        CHECK(viscous_form(w, w, nu) == doctest::Approx(viscous_dissipation(w, nu)).epsilon(1e-12));
        CHECK(viscous_dissipation(w, nu) > 0);
        CHECK(inner(apply_vector_neg_laplace(w), z) == doctest::Approx(inner(w, apply_vector_neg_laplace(z))).epsilon(1e-12));
        CHECK(inner(apply_vector_neg_laplace(w), w) == doctest::Approx(grad_norm_sq(w)).epsilon(1e-12));
    }
}

TEST_CASE("constant viscosity on solenoidal fields reduces to half the vector laplacian")
{
    for (const Grid& g : grids) {
        CAPTURE(to_string(g.bc));
        const auto nu = ViscosityField<double>::constant(g, 1.7);
        const auto w = solenoidal(g, 21);
        const auto lhs = apply_viscous(w, nu);
        const auto rhs = 0.85 * apply_vector_neg_laplace(w);
        CHECK(linf(lhs - rhs) < 1e-9 * linf(rhs));
        // Korn equality for div-free fields: 2 ||Dw||^2 = ||grad w||^2
        CHECK(2 * viscous_dissipation(w, ViscosityField<double>::constant(g, 1.0)) == doctest::Approx(grad_norm_sq(w)).epsilon(1e-12));
    }
}

TEST_CASE("harmonic node viscosity")
{
    const Grid g(4, 4, 1, 1, Boundary::NeumannNoSlip);
    auto c = ScalarField<double>::constant(g, 1.0);
    c(0, 0) = 3.0;
    const auto n = harmonic_to_nodes(c);
    CHECK(n(0, 0) == 3.0);                              // corner: one cell
    CHECK(n(1, 0) == doctest::Approx(2.0 / (1.0 / 3 + 1.0)));  // wall: two cells
    CHECK(n(1, 1) == doctest::Approx(4.0 / (1.0 / 3 + 3.0)));
    CHECK(n(2, 2) == 1.0);
}

TEST_CASE("convection is energy neutral for solenoidal velocity")
{
    for (const Grid& g : grids) {
        CAPTURE(to_string(g.bc));
        const auto w = solenoidal(g, 31);
        const auto n = convection(w);
        CHECK(std::abs(inner(n, w)) < 1e-10 * l2(n) * l2(w));
    }
}

TEST_CASE("convection approximates (u . grad) u for a smooth periodic field")
{
    // u = (sin x cos y, -cos x sin y) on [0, 2pi]^2: (u.grad)u = (sin 2x / 2, sin 2y / 2)
    auto err = [](int n) {
        const Grid g(n, n, 2 * pi, 2 * pi, Boundary::Periodic);
        const auto w = MacField<double>::sample(
            g, [](double x, double y) { return std::sin(x) * std::cos(y); },
            [](double x, double y) { return -std::cos(x) * std::sin(y); });
        const auto ex = MacField<double>::sample(
            g, [](double x, double) { return 0.5 * std::sin(2 * x); },
            [](double, double y) { return 0.5 * std::sin(2 * y); });
        return linf(convection(w) - ex);
    };
    const double e1 = err(32), e2 = err(64);
    CHECK(e1 < 0.05);
    CHECK(e1 / e2 == doctest::Approx(4.0).epsilon(0.1));
}

TEST_CASE("quadrature helpers")
{
    const Grid g(8, 8, 2.0, 2.0, Boundary::NeumannNoSlip);
    const auto c = ScalarField<double>::constant(g, 3.0);
    CHECK(l2(c) == doctest::Approx(6.0));
    CHECK(mean(c) == doctest::Approx(3.0));
    CHECK(linf(remove_mean(c)) < 1e-14);
    CHECK(h1_semi(c) == 0.0);
    const auto m = map(c, [](double z) { return z * z; });
    CHECK(m(3, 4) == 9.0);
    CHECK(hadamard(c, c)(0, 0) == 9.0);
}
