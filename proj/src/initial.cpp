#include "modelh/app/initial.hpp"

#include <cmath>

namespace modelh::app {

namespace {

constexpr double pi = 3.14159265358979323846;

// Wavenumber of mode m along an axis: cosines on walled axes, full periods on
// periodic ones, so every mode is a discrete eigenfunction of the Laplacian.
double wavenumber(const Grid& g, int m, double length)
{
    return (g.periodic() ? 2 * pi : pi) * m / length;
}

ScalarField<double> cosine_mode(const Grid& g, int mx, int my)
{
    const double kx = wavenumber(g, mx, g.lx), ky = wavenumber(g, my, g.ly);
    return ScalarField<double>::sample(g, [&](double x, double y) { return std::cos(kx * x) * std::cos(ky * y); });
}

ScalarField<double> uniform_field(const Grid& g, std::uint64_t seed)
{
    ScalarField<double> f(g);
    for (int j = 0; j < g.ny; ++j)
        for (int i = 0; i < g.nx; ++i)
            f(i, j) = uniform_pm1(seed, static_cast<std::uint64_t>(i) + static_cast<std::uint64_t>(g.nx) * j);
    return f;
}

ScalarField<double> normalized(ScalarField<double> f)
{
    f = remove_mean(std::move(f));
    const double m = linf(f);
    if (m > 0)
        f *= 1.0 / m;
    return f;
}

} // namespace

std::uint64_t splitmix64(std::uint64_t seed, std::uint64_t counter)
{
    std::uint64_t z = seed + (counter + 1) * 0x9e3779b97f4a7c15ULL;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

double uniform_pm1(std::uint64_t seed, std::uint64_t counter)
{
    return 2.0 * static_cast<double>(splitmix64(seed, counter) >> 11) * 0x1.0p-53 - 1.0;
}

ScalarField<double> initial_phase(const RunConfig& cfg)
{
    const Grid& g = cfg.grid;
    const InitialSpec& in = cfg.initial;
    switch (in.kind) {
    case InitialKind::Constant:
        return ScalarField<double>::constant(g, in.mean);
    case InitialKind::CosinePerturbation: {
        ScalarField<double> f = in.amplitude * cosine_mode(g, in.mode_x, in.mode_y);
        f.values += in.mean;
        return f;
    }
    case InitialKind::TanhStripe: {
        const double x0 = in.position * g.lx, w = in.width, a = in.amplitude;
        if (!g.periodic())
            return ScalarField<double>::sample(g, [&](double x, double) { return a * std::tanh((x - x0) / w); });
        // two interfaces, at x0 and x0 + Lx/2
        return ScalarField<double>::sample(g, [&](double x, double) {
            const double s = std::fmod(x - x0 + g.lx, g.lx);
            return a * (std::tanh(s / w) - std::tanh((s - g.lx / 2) / w) + std::tanh((s - g.lx) / w));
        });
    }
    case InitialKind::RandomSeeded: {
        ScalarField<double> f = in.amplitude * uniform_field(g, in.seed);
        f.values += in.mean - mean(f);
        return f;
    }
    }
    throw std::logic_error("unhandled initial condition kind");
}

MacField<double> initial_velocity(const RunConfig& cfg)
{
    const Grid& g = cfg.grid;
    if (cfg.initial.velocity == VelocityKind::Zero || cfg.initial.velocity_amplitude == 0)
        return MacField<double>(g);
    const double a = cfg.initial.velocity_amplitude;
    const double kx = wavenumber(g, 1, g.lx), ky = wavenumber(g, 1, g.ly);
    const MacField<double> w = MacField<double>::sample(
        g, [&](double x, double y) { return a * std::sin(kx * x) * std::cos(ky * y); },
        [&](double x, double y) { return -a * (kx / ky) * std::cos(kx * x) * std::sin(ky * y); });
    return remove_velocity_mean(leray_project(w));
}

ScalarField<double> perturbation_shape(const RunConfig& cfg)
{
    if (cfg.compare.shape == PerturbationShape::Random)
        return normalized(uniform_field(cfg.grid, cfg.compare.seed));
    return normalized(cosine_mode(cfg.grid, cfg.compare.mode_x, cfg.compare.mode_y));
}

InitialDatum prepare_phase(const RunConfig& cfg, const ScalarField<double>& phi0)
{
    InitialDatum d;
    d.phi = phi0;
    require_admissible(phi0, cfg.potential);
    d.max_abs_mu_tilde = linf(map(phi0, [&](double z) { return dF(cfg.potential, z); }) - laplace(phi0));
    if (cfg.potential.exact() && d.max_abs_mu_tilde > cfg.truncation_k) {
        PreparedDatum<double> p = prepare_initial_datum(phi0, cfg.truncation_k, cfg.potential);
        d.phi = std::move(p.phi0k);
        d.truncated = true;
    }
    d.sep_delta = 1.0 - linf(d.phi);
    return d;
}

} // namespace modelh::app
