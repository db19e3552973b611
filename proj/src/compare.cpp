#include <algorithm>
#include <cmath>
#include <limits>
#include <memory>

#include <json.hpp>

#include "manifest.hpp"
#include "modelh/app/commands.hpp"
#include "modelh/app/io.hpp"

namespace modelh::app {

namespace fs = std::filesystem;

double fitted_slope(const std::vector<double>& x, const std::vector<double>& y)
{
    if (x.size() != y.size() || x.size() < 2)
        throw std::invalid_argument("slope fit needs at least two points");
    double mx = 0, my = 0;
    for (std::size_t k = 0; k < x.size(); ++k) {
        mx += std::log(x[k]);
        my += std::log(y[k]);
    }
    mx /= static_cast<double>(x.size());
    my /= static_cast<double>(y.size());
    double sxy = 0, sxx = 0;
    for (std::size_t k = 0; k < x.size(); ++k) {
        const double dx = std::log(x[k]) - mx;
        sxy += dx * (std::log(y[k]) - my);
        sxx += dx * dx;
    }
    return sxy / sxx;
}

CompareSummary compare(const RunConfig& cfg, const std::vector<double>& amplitudes, bool write_outputs,
                       const Logger& log)
{
    if (amplitudes.empty())
        throw ConfigError({"compare: no perturbation amplitudes given"});
    CompareSummary sum;
    sum.out_dir = resolve_output_dir(cfg);
    sum.amplitudes = amplitudes;
    const SolverConfig& sc = cfg.solver;

    const InitialDatum datum = prepare_phase(cfg, initial_phase(cfg));
    const ScalarField<double> shape = perturbation_shape(cfg);
    const MacField<double> u0 = initial_velocity(cfg);
    const State<double> ref0 = make_state(0.0, u0, datum.phi, cfg.potential);

    std::vector<std::string> problems;
    std::vector<State<double>> runs;
    for (double a : amplitudes) {
        const ScalarField<double> phi = datum.phi + a * shape;
        const double sup = linf(phi);
        if (!std::isfinite(a) || (cfg.potential.exact() ? !(sup < 1) : sup > 1)) {
            problems.push_back("compare: amplitude " + format_real(a) + " gives max|phi0| = " + format_real(sup) +
                               ", outside the admissible range");
            continue;
        }
        runs.push_back(make_state(0.0, u0, phi, cfg.potential));
    }
    if (!problems.empty())
        throw ConfigError(problems);

    std::vector<std::unique_ptr<CsvWriter>> csv;
    if (write_outputs) {
        fs::create_directories(sum.out_dir);
        for (std::size_t k = 0; k < amplitudes.size(); ++k)
            csv.push_back(std::make_unique<CsvWriter>(sum.out_dir / ("stability_" + std::to_string(k) + ".csv"),
                                                      stability_columns));
    }
    sum.records.resize(amplitudes.size());
    auto record = [&](const State<double>& ref) {
        for (std::size_t k = 0; k < runs.size(); ++k) {
            const StabilityRecord r = stability_record(ref, runs[k]);
            sum.records[k].push_back(r);
            if (!csv.empty())
                csv[k]->row({r.t, r.h_value, r.l2_u_diff, r.l2_phi_diff});
        }
    };

    // lockstep: no trajectory is ever stored
    const Stepper<double> stepper(cfg.grid, sc, cfg.potential, cfg.viscosity);
    State<double> ref = ref0;
    record(ref);
    const long long n_end = std::llround(sc.t_end / sc.dt);
    for (long long n = 1; n <= n_end; ++n) {
        const double t = static_cast<double>(n) * sc.dt;
        ref = stepper.coupled_step(ref);
        ref.t = t;
        for (auto& s : runs) {
            s = stepper.coupled_step(s);
            s.t = t;
        }
        if (n % sc.report_every == 0 || n == n_end)
            record(ref);
    }

    std::vector<double> xs, ys;
    double a_min = std::numeric_limits<double>::infinity();
    std::size_t k_min = 0;
    for (std::size_t k = 0; k < amplitudes.size(); ++k) {
        const double h = sum.records[k].back().h_value;
        sum.h_end.push_back(h);
        const double a = std::abs(amplitudes[k]);
        if (a > 0 && h > 0) {
            xs.push_back(a);
            ys.push_back(std::sqrt(h));
        }
        if (a > 0 && a < a_min) {
            a_min = a;
            k_min = k;
        }
    }
    sum.slope = xs.size() >= 2 ? fitted_slope(xs, ys) : std::numeric_limits<double>::quiet_NaN();
    sum.normalized_ratio = std::numeric_limits<double>::quiet_NaN();
    if (std::isfinite(a_min)) {
        double scale = 0;
        for (const auto& r : sum.records[k_min])
            scale = std::max(scale, r.h_value);
        if (scale > 0) {
            double worst = 0;
            for (std::size_t k = 0; k < amplitudes.size(); ++k) {
                const double a = std::abs(amplitudes[k]);
                if (a == 0)
                    continue;
                for (const auto& r : sum.records[k])
                    worst = std::max(worst, r.h_value * (a_min / a) * (a_min / a));
            }
            sum.normalized_ratio = worst / scale;
        }
    }
    if (log)
        log("compare: fitted slope " + format_real(sum.slope) + ", normalized ratio " +
            format_real(sum.normalized_ratio));

    if (write_outputs) {
        CsvWriter summary(sum.out_dir / "compare.csv", {"amplitude", "h_end", "sqrt_h_end"});
        for (std::size_t k = 0; k < amplitudes.size(); ++k)
            summary.row({amplitudes[k], sum.h_end[k], std::sqrt(sum.h_end[k])});
        nlohmann::ordered_json m = detail::manifest_head("compare", cfg);
        m["amplitudes"] = amplitudes;
        m["slope"] = sum.slope;
        m["normalized_ratio"] = sum.normalized_ratio;
        write_text(sum.out_dir / "manifest.json", m.dump(2) + "\n");
    }
    return sum;
}

} // namespace modelh::app
