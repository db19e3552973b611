#include <algorithm>
#include <cmath>
#include <limits>

#include <json.hpp>

#include "manifest.hpp"
#include "modelh/app/commands.hpp"
#include "modelh/app/io.hpp"

namespace modelh::app {

namespace fs = std::filesystem;

namespace {

constexpr double pi = 3.14159265358979323846;

// One manufactured problem: initial state, optional source, exact or
// reference comparison at the final time.
struct Problem {
    virtual ~Problem() = default;
    virtual State<double> initial(const Grid& g) const = 0;
    virtual bool flow() const = 0;
    virtual std::function<ScalarField<double>(double)> source(const Grid&) const { return {}; }
    virtual double error(const State<double>& s, double t) const = 0;        // against the exact solution
    virtual double distance(const State<double>& a, const State<double>& b) const = 0;  // between two runs
};

// Taylor-Green vortex in uniform phase: u = w exp(-(nu/2) k^2 t).
struct TaylorGreen : Problem {
    const RunConfig& cfg;
    double m;
    double nu0;
    explicit TaylorGreen(const RunConfig& c) : cfg(c), m(c.initial.mean), nu0(nu(c.viscosity, c.initial.mean)) {}

    MacField<double> exact(const Grid& g, double t) const
    {
        const double kx = 2 * pi / g.lx, ky = 2 * pi / g.ly;
        const double a = std::exp(-0.5 * nu0 * (kx * kx + ky * ky) * t);
        return MacField<double>::sample(
            g, [&](double x, double y) { return a * std::sin(kx * x) * std::cos(ky * y); },
            [&](double x, double y) { return -a * (kx / ky) * std::cos(kx * x) * std::sin(ky * y); });
    }
    State<double> initial(const Grid& g) const override
    {
        return make_state(0.0, leray_project(exact(g, 0.0)), ScalarField<double>::constant(g, m), cfg.potential);
    }
    bool flow() const override { return true; }
    double error(const State<double>& s, double t) const override { return l2(s.u - exact(s.grid(), t)); }
    double distance(const State<double>& a, const State<double>& b) const override { return l2(a.u - b.u); }
};

// phi = m + a(t) cos(kx x) cos(ky y), a(t) = a0 exp(-t), kept exact by a source.
struct ForcedCosine : Problem {
    const RunConfig& cfg;
    double m;
    double a0 = 0.25;
    explicit ForcedCosine(const RunConfig& c) : cfg(c), m(c.initial.mean) {}

    ScalarField<double> exact(const Grid& g, double t) const
    {
        const double kx = 2 * pi / g.lx, ky = 2 * pi / g.ly, a = a0 * std::exp(-t);
        return ScalarField<double>::sample(g, [&](double x, double y) { return m + a * std::cos(kx * x) * std::cos(ky * y); });
    }
    State<double> initial(const Grid& g) const override
    {
        return make_state(0.0, MacField<double>(g), exact(g, 0.0), cfg.potential);
    }
    bool flow() const override { return false; }
    std::function<ScalarField<double>(double)> source(const Grid& g) const override
    {
        return [this, g](double t) {
            const PotentialSpec<double>& p = cfg.potential;
            const double kx = 2 * pi / g.lx, ky = 2 * pi / g.ly, k2 = kx * kx + ky * ky;
            const double a = a0 * std::exp(-t), da = -a;
            return ScalarField<double>::sample(g, [&](double x, double y) {
                const double c = std::cos(kx * x) * std::cos(ky * y);
                const double gx = -kx * std::sin(kx * x) * std::cos(ky * y);
                const double gy = -ky * std::cos(kx * x) * std::sin(ky * y);
                const double phi = m + a * c;
                // laplace of mu = -laplace(phi) + F'(phi) - theta0 phi
                const double lap_mu = -a * k2 * k2 * c + d3F(p, phi) * a * a * (gx * gx + gy * gy)
                                      - d2F(p, phi) * a * k2 * c + p.theta0 * a * k2 * c;
                return da * c - lap_mu;
            });
        };
    }
    double error(const State<double>& s, double t) const override { return l2(s.phi - exact(s.grid(), t)); }
    double distance(const State<double>& a, const State<double>& b) const override { return l2(a.phi - b.phi); }
};

ConvergenceLadder ladder_of(const std::string& suite, const std::string& ladder)
{
    ConvergenceLadder l;
    l.suite = suite;
    l.ladder = ladder;
    return l;
}

State<double> integrate(const Problem& prob, const RunConfig& cfg, const Grid& g, double dt, double t_end)
{
    SolverConfig sc = cfg.solver;
    sc.dt = dt;
    sc.t_end = t_end;
    sc.flow = prob.flow();
    sc.snapshot_every = 0;
    RunSinks<double> sinks;
    sinks.ch_source = prob.source(g);
    return run(prob.initial(g), sc, cfg.potential, cfg.viscosity, sinks);
}

Grid level_grid(const RunConfig& cfg, int n)
{
    const int ny = std::max(4, static_cast<int>(std::lround(n * static_cast<double>(cfg.grid.ny) / cfg.grid.nx)));
    return Grid(n, ny, cfg.grid.lx, cfg.grid.ly, Boundary::Periodic);
}

ConvergenceLadder spatial(const Problem& prob, const RunConfig& cfg, const std::string& suite)
{
    const ConvergenceSpec& cs = cfg.convergence;
    ConvergenceLadder l = ladder_of(suite, "spatial");
    for (int lev = 0; lev < cs.levels; ++lev) {
        const Grid g = level_grid(cfg, cs.base_n << lev);
        // dt ~ h^2 keeps the first-order time error at the size of the space error
        const double h = std::max(g.hx(), g.hy());
        const long long steps = std::max<long long>(1, static_cast<long long>(std::ceil(cs.t_end / (cs.spatial_dt_factor * h * h))));
        const double dt = cs.t_end / static_cast<double>(steps);
        const State<double> s = integrate(prob, cfg, g, dt, static_cast<double>(steps) * dt);
        l.steps.push_back(h);
        l.errors.push_back(prob.error(s, s.t));
    }
    l.order = fitted_slope(l.steps, l.errors);
    return l;
}

ConvergenceLadder temporal(const Problem& prob, const RunConfig& cfg, const std::string& suite)
{
    const ConvergenceSpec& cs = cfg.convergence;
    ConvergenceLadder l = ladder_of(suite, "temporal");
    // same-grid reference removes the spatial error from the comparison
    const Grid g = level_grid(cfg, cs.base_n * 2);
    auto steps_for = [&](double dt) { return std::max<long long>(1, std::llround(cs.t_end / dt)); };
    const double dt_min = cs.temporal_dt / std::pow(2.0, cs.levels - 1);
    const long long n_ref = steps_for(dt_min) * 16;
    const State<double> ref = integrate(prob, cfg, g, cs.t_end / static_cast<double>(n_ref), cs.t_end);
    for (int lev = 0; lev < cs.levels; ++lev) {
        const long long n = steps_for(cs.temporal_dt / std::pow(2.0, lev));
        const double dt = cs.t_end / static_cast<double>(n);
        const State<double> s = integrate(prob, cfg, g, dt, cs.t_end);
        l.steps.push_back(dt);
        l.errors.push_back(prob.distance(s, ref));
    }
    l.order = fitted_slope(l.steps, l.errors);
    return l;
}

} // namespace

double ConvergenceSummary::spatial_order() const
{
    double o = std::numeric_limits<double>::infinity();
    for (const auto& l : ladders)
        if (!l.skipped && l.ladder == "spatial")
            o = std::min(o, l.order);
    return o;
}

double ConvergenceSummary::temporal_order() const
{
    double o = std::numeric_limits<double>::infinity();
    for (const auto& l : ladders)
        if (!l.skipped && l.ladder == "temporal")
            o = std::min(o, l.order);
    return o;
}

ConvergenceSummary convergence(const RunConfig& cfg, bool write_outputs, const Logger& log)
{
    std::vector<std::string> problems;
    if (!cfg.grid.periodic())
        problems.push_back("convergence: grid.bc must be periodic for the manufactured suite");
    if (cfg.convergence.levels < 3)
        problems.push_back("convergence: convergence.levels = " + std::to_string(cfg.convergence.levels) +
                           ", at least 3 resolutions are needed for an order fit");
    if (!problems.empty())
        throw ConfigError(problems);

    ConvergenceSummary sum;
    sum.out_dir = resolve_output_dir(cfg);
    const TaylorGreen tg(cfg);
    const ForcedCosine fc(cfg);
    auto note = [&](const ConvergenceLadder& l) {
        if (log)
            log("convergence " + l.suite + " " + l.ladder + (l.skipped ? ": skipped" : ": order " + format_real(l.order)));
    };
    sum.ladders.push_back(spatial(tg, cfg, "ns"));
    note(sum.ladders.back());
    sum.ladders.push_back(temporal(tg, cfg, "ns"));
    note(sum.ladders.back());
    for (const char* ladder : {"spatial", "temporal"}) {
        if (cfg.convergence.ns_only) {
            ConvergenceLadder l = ladder_of("ch", ladder);
            l.skipped = true;
            sum.ladders.push_back(l);
        } else {
            sum.ladders.push_back(std::string(ladder) == "spatial" ? spatial(fc, cfg, "ch") : temporal(fc, cfg, "ch"));
        }
        note(sum.ladders.back());
    }

    if (write_outputs) {
        fs::create_directories(sum.out_dir);
        for (const auto& l : sum.ladders) {
            if (l.skipped)
                continue;
            CsvWriter csv(sum.out_dir / ("convergence_" + l.suite + "_" + l.ladder + ".csv"),
                          {l.ladder == "spatial" ? "h" : "dt", "error"});
            for (std::size_t k = 0; k < l.steps.size(); ++k)
                csv.row({l.steps[k], l.errors[k]});
        }
        nlohmann::ordered_json m = detail::manifest_head("convergence", cfg);
        nlohmann::ordered_json orders = nlohmann::ordered_json::array();
        for (const auto& l : sum.ladders)
            orders.push_back({{"suite", l.suite}, {"ladder", l.ladder}, {"skipped", l.skipped}, {"order", l.order}});
        m["orders"] = orders;
        write_text(sum.out_dir / "manifest.json", m.dump(2) + "\n");
    }
    return sum;
}

} // namespace modelh::app
