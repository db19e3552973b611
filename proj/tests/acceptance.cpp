// Acceptance run: one PASS/FAIL line per criterion.
//
//   acceptance            all criteria
//   acceptance 3 7        only criteria 3 and 7
//
// The exit status is nonzero when a criterion fails that is not listed in
// known_unattainable; those still print FAIL with their measured values.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <functional>
#include <set>
#include <string>
#include <vector>

#include "modelh/app/commands.hpp"
#include "modelh/app/io.hpp"

#ifndef MODELH_CONFIG_DIR
#error "MODELH_CONFIG_DIR must point at tools/configs"
#endif

using namespace modelh;
using namespace modelh::app;
namespace fs = std::filesystem;

namespace {

constexpr double pi = 3.14159265358979323846;
const PotentialSpec<double> logpot{1.0, 2.0, 0.0};

// The benchmark's separation window needs growth of the noise; for theta = 1,
// theta0 = 2 and unit interface energy every mode decays (README, "Known
// limits").
const std::set<int> known_unattainable = {5};

struct Outcome {
    bool pass = false;
    std::string detail;
};

std::string fmt(const char* f, double x)
{
    char buf[64];
    std::snprintf(buf, sizeof buf, f, x);
    return buf;
}

RunConfig benchmark_config()
{
    RunConfig c = load_config(fs::path(MODELH_CONFIG_DIR) / "spinodal.cfg");
    c.output_dir = (fs::temp_directory_path() / "modelh_acceptance" / "spinodal").string();
    return c;
}

// Smooth field built from low cosine modes with coefficients in [-1, 1]; the
// sup norm is then rescaled to amp.
ScalarField<double> smooth_random(const Grid& g, std::uint64_t seed, double amp)
{
    double c[8];
    for (int k = 0; k < 8; ++k)
        c[k] = uniform_pm1(seed, static_cast<std::uint64_t>(k));
    const double kx = pi / g.lx, ky = pi / g.ly;
    ScalarField<double> f = ScalarField<double>::sample(g, [&](double x, double y) {
        return c[0] + c[1] * std::cos(kx * x) + c[2] * std::cos(ky * y) + c[3] * std::cos(kx * x) * std::cos(ky * y)
               + c[4] * std::cos(2 * kx * x) + c[5] * std::cos(2 * ky * y) * std::cos(kx * x)
               + c[6] * std::cos(3 * kx * x) * std::cos(2 * ky * y) + c[7] * std::cos(4 * ky * y);
    });
    f *= amp / linf(f);
    return f;
}

MacField<double> taylor_green(const Grid& g)
{
    return MacField<double>::sample(
        g, [](double x, double y) { return std::sin(pi * x) * std::cos(pi * y); },
        [](double x, double y) { return -std::cos(pi * x) * std::sin(pi * y); });
}

double seconds_since(std::chrono::steady_clock::time_point t0)
{
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

Outcome elliptic_oracle()
{
    const auto t0 = std::chrono::steady_clock::now();
    std::vector<double> errs;
    for (int n : {16, 32, 64, 128}) {
        const Grid g(n, n, 1.0, 1.0, Boundary::NeumannNoSlip);
        const auto f = ScalarField<double>::sample(g, [&](double x, double) { return std::cos(pi * x / g.lx); });
        errs.push_back(l2(solve_neumann_poisson(f) - (1 / (pi * pi)) * f));
    }
    Outcome o{true, "error ratios"};
    for (std::size_t k = 1; k < errs.size(); ++k) {
        const double r = errs[k - 1] / errs[k];
        o.pass = o.pass && r >= 3.5 && r <= 4.5;
        o.detail += " " + fmt("%.3f", r);
    }
    const Grid g(128, 128, 1.0, 1.0, Boundary::NeumannNoSlip);
    const auto f = ScalarField<double>::sample(g, [](double x, double) { return std::cos(pi * x); });
    const double exact = 1 / (pi * std::sqrt(2.0));
    const double rel = std::abs(dual_norm_star(f) - exact) / exact;
    const double secs = seconds_since(t0);
    o.pass = o.pass && rel <= 0.01 && secs < 5;
    o.detail += "; ||cos(pi x)||_* relative error " + fmt("%.2e", rel) + "; " + fmt("%.2f", secs) + " s of 5";
    return o;
}

Outcome maximum_principle()
{
    const auto t0 = std::chrono::steady_clock::now();
    const Grid g(64, 64, 1.0, 1.0, Boundary::NeumannNoSlip);
    double worst = -1e300;
    for (std::uint64_t s = 0; s < 20; ++s) {
        // sup norms spread over [0.5, 8]
        const double amp = 0.5 + 7.5 * (0.5 + 0.5 * uniform_pm1(1000 + s, 99));
        const auto f = smooth_random(g, 1000 + s, amp);
        const auto u = solve_log_neumann(f, logpot);
        worst = std::max(worst, linf(map(u, [](double z) { return dF(logpot, z); })) - linf(f));
    }
    const double secs = seconds_since(t0);
    return {worst <= 1e-9 && secs < 30,
            "max over 20 data of max|F'(u)| - max|f| = " + fmt("%.3e", worst) + "; " + fmt("%.2f", secs) + " s of 30"};
}

Outcome stokes_oracle()
{
    std::vector<double> errs;
    for (int n : {16, 32, 64, 128}) {
        const Grid g(n, n, 2.0, 2.0, Boundary::Periodic);
        errs.push_back(l2(stokes_solve((2 * pi * pi) * taylor_green(g)).u - taylor_green(g)));
    }
    Outcome o{true, "error ratios"};
    for (std::size_t k = 1; k < errs.size(); ++k) {
        const double r = errs[k - 1] / errs[k];
        o.pass = o.pass && r >= 3.5 && r <= 4.5;
        o.detail += " " + fmt("%.3f", r);
    }
    const Grid g(128, 128, 2.0, 2.0, Boundary::Periodic);
    const auto w = taylor_green(g);
    const double a = dual_norm_sharp(w), b = dual_norm_sharp_pairing(w);
    const double rel = std::abs(a - 1 / pi) * pi;
    const double pairing = std::abs(a * a - b * b) / (b * b);
    o.pass = o.pass && rel <= 0.01 && pairing <= 1e-10;
    o.detail += "; ||w||_# relative error " + fmt("%.2e", rel) + ", <f, A^-1 f> vs ||grad A^-1 f||^2 " +
                fmt("%.2e", pairing);
    return o;
}

// Criteria 4 and 5 share one benchmark run.
const SimulationSummary& benchmark_run()
{
    static const SimulationSummary s = simulate(benchmark_config(), false);
    return s;
}

Outcome mass_conservation()
{
    const SimulationSummary& s = benchmark_run();
    return {s.max_mass_drift <= 1e-11 && s.steps == 4000,
            std::to_string(s.steps) + " steps, max |mean drift| " + fmt("%.3e", s.max_mass_drift)};
}

Outcome separation()
{
    const SimulationSummary& s = benchmark_run();
    const double beta = binodal_root(logpot);
    bool window = true;
    double running = 0, first = -1;
    for (std::size_t k = 0; k < s.t.size(); ++k) {
        if (s.t[k] < 0.5 - 1e-12)
            continue;
        running = std::max(running, s.max_abs_phi_series[k]);
        if (first < 0)
            first = running;
        window = window && running >= 0.8 && running <= 0.999;
    }
    const bool near_beta = std::abs(running - beta) <= 0.03;
    return {s.bound_preserved && window && near_beta,
            std::string("max|phi| < 1 every step: ") + (s.bound_preserved ? "yes" : "no") +
                "; running max over t >= 0.5 from " + fmt("%.4f", first) + " to " + fmt("%.4f", running) +
                " (window [0.8, 0.999], beta = " + fmt("%.4f", beta) + ")"};
}

Outcome energy_dissipation()
{
    // pure Cahn-Hilliard on the benchmark datum and on a resolved stripe
    int pure_increases = 0;
    long long pure_steps = 0;
    {
        RunConfig c = benchmark_config();
        c.solver.flow = false;
        c.solver.t_end = 0.5;
        const SimulationSummary s = simulate(c, false);
        pure_increases += s.energy_increases;
        pure_steps += s.steps;
    }
    {
        RunConfig c = load_config(fs::path(MODELH_CONFIG_DIR) / "stripe.cfg");
        c.solver.flow = false;
        const SimulationSummary s = simulate(c, false);
        pure_increases += s.energy_increases;
        pure_steps += s.steps;
    }

    // coupled: stirred stripe, dt halved twice
    RunConfig c = load_config(fs::path(MODELH_CONFIG_DIR) / "stripe.cfg");
    c.initial.velocity = VelocityKind::TaylorGreen;
    c.initial.velocity_amplitude = 1.0;
    c.solver.t_end = 0.25;
    std::vector<double> dts = {1e-3, 5e-4, 2.5e-4}, residuals;
    std::vector<int> increases;
    for (double dt : dts) {
        c.solver.dt = dt;
        const SimulationSummary s = simulate(c, false);
        increases.push_back(s.energy_increases);
        residuals.push_back(s.mean_balance_residual);
    }
    const double order = fitted_slope(dts, residuals);
    const bool trend = increases[1] <= increases[0] && increases[2] <= increases[1] &&
                       (increases[2] == 0 || increases[2] < increases[0]);
    return {pure_increases == 0 && trend && order >= 0.8,
            "pure CH: " + std::to_string(pure_increases) + " increases in " + std::to_string(pure_steps) +
                " steps; coupled increases " + std::to_string(increases[0]) + "/" + std::to_string(increases[1]) +
                "/" + std::to_string(increases[2]) + ", balance residual " + fmt("%.3e", residuals[0]) + "/" +
                fmt("%.3e", residuals[1]) + "/" + fmt("%.3e", residuals[2]) + ", order " + fmt("%.3f", order)};
}

Outcome continuous_dependence()
{
    RunConfig c = benchmark_config();
    c.solver.t_end = 0.5;
    const CompareSummary s = compare(c, {1e-2, 1e-3, 1e-4}, false);
    return {std::abs(s.slope - 1.0) <= 0.3 && s.normalized_ratio <= 1e3,
            "slope " + fmt("%.4f", s.slope) + ", normalized ratio " + fmt("%.4g", s.normalized_ratio)};
}

Outcome datum_preparation()
{
    // F'(phi0) stays below 4 in double precision, so the curvature term has to
    // push mu~0 past the largest level: a sharp stripe on a fine grid
    RunConfig c = load_config(fs::path(MODELH_CONFIG_DIR) / "stripe.cfg");
    c.grid = Grid(128, 128, c.grid.lx, c.grid.ly, c.grid.bc);
    c.initial.amplitude = 0.999;
    c.initial.width = 0.1;
    const ScalarField<double> phi0 = initial_phase(c);
    const double mu_max =
        linf(map(phi0, [&](double z) { return dF(c.potential, z); }) - laplace(phi0));
    auto h1 = [](const ScalarField<double>& d) { return std::sqrt(l2(d) * l2(d) + h1_semi(d) * h1_semi(d)); };
    Outcome o{true, "max|mu~0| " + fmt("%.1f", mu_max) + "; k: H1 distance, max|F'|:"};
    double prev = 1e300;
    for (double k : {5.0, 10.0, 20.0, 40.0}) {
        const PreparedDatum<double> p = prepare_initial_datum(phi0, k, c.potential);
        const double d = h1(p.phi0k - phi0);
        o.pass = o.pass && d <= prev && p.max_abs_dF <= k;
        o.detail += " " + fmt("%g", k) + ": " + fmt("%.4e", d) + ", " + fmt("%.15g", p.max_abs_dF) + ";";
        prev = d;
    }
    o.pass = o.pass && mu_max > 40;
    o.detail.pop_back();
    return o;
}

Outcome scheme_convergence()
{
    const RunConfig c = load_config(fs::path(MODELH_CONFIG_DIR) / "convergence.cfg");
    const ConvergenceSummary s = convergence(c, false);
    return {s.spatial_order() >= 1.9 && s.temporal_order() >= 0.9,
            "spatial order " + fmt("%.3f", s.spatial_order()) + ", temporal order " + fmt("%.3f", s.temporal_order())};
}

Outcome determinism()
{
    const fs::path root = fs::temp_directory_path() / "modelh_acceptance" / "determinism";
    fs::remove_all(root);
    std::vector<std::string> names;
    bool same = true;
    for (const char* cfg_name : {"stripe.cfg", "spinodal.cfg"}) {
        RunConfig c = load_config(fs::path(MODELH_CONFIG_DIR) / cfg_name);
        c.solver.t_end = std::min(c.solver.t_end, 100 * c.solver.dt);
        std::vector<fs::path> dirs;
        for (const char* rep : {"a", "b"}) {
            c.output_dir = (root / cfg_name / rep).string();
            simulate(c, true);
            dirs.push_back(c.output_dir);
        }
        for (const char* f : {"energy.csv", "regularity.csv"}) {
            same = same && read_text(dirs[0] / f) == read_text(dirs[1] / f);
            names.push_back(std::string(cfg_name) + "/" + f);
        }
    }
    {
        RunConfig c = benchmark_config();
        c.solver.t_end = 0.05;
        std::vector<fs::path> dirs;
        for (const char* rep : {"a", "b"}) {
            c.output_dir = (root / "compare" / rep).string();
            compare(c, {1e-2, 1e-3}, true);
            dirs.push_back(c.output_dir);
        }
        for (const char* f : {"compare.csv", "stability_0.csv", "stability_1.csv"}) {
            same = same && read_text(dirs[0] / f) == read_text(dirs[1] / f);
            names.push_back(std::string("compare/") + f);
        }
    }
    return {same, std::to_string(names.size()) + " csv files compared across repeated runs"};
}

struct Criterion {
    int id;
    const char* name;
    std::function<Outcome()> run;
};

} // namespace

int main(int argc, char** argv)
{
    const std::vector<Criterion> all = {
        {1, "elliptic oracle", elliptic_oracle},
        {2, "maximum principle of the logarithmic Neumann problem", maximum_principle},
        {3, "Stokes oracle", stokes_oracle},
        {4, "mass conservation on the spinodal benchmark", mass_conservation},
        {5, "bound preservation and separation on the spinodal benchmark", separation},
        {6, "energy dissipation", energy_dissipation},
        {7, "continuous dependence on the initial data", continuous_dependence},
        {8, "initial datum preparation", datum_preparation},
        {9, "scheme convergence", scheme_convergence},
        {10, "determinism", determinism},
    };
    std::set<int> only;
    for (int k = 1; k < argc; ++k)
        only.insert(std::atoi(argv[k]));

    int unexpected = 0;
    for (const auto& c : all) {
        if (!only.empty() && !only.count(c.id))
            continue;
        const auto t0 = std::chrono::steady_clock::now();
        Outcome o;
        try {
            o = c.run();
        } catch (const std::exception& e) {
            o = {false, std::string("threw: ") + e.what()};
        }
        const double secs = seconds_since(t0);
        const bool expected_failure = !o.pass && known_unattainable.count(c.id);
        std::printf("%s criterion %d (%s): %s [%.1f s]%s\n", o.pass ? "PASS" : "FAIL", c.id, c.name, o.detail.c_str(),
                    secs, expected_failure ? " (known unattainable)" : "");
        std::fflush(stdout);
        if (!o.pass && !expected_failure)
            ++unexpected;
    }
    return unexpected ? 1 : 0;
}
