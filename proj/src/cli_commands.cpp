#include <cstdio>
#include <ostream>

#include "modelh/app/commands.hpp"

namespace modelh::app {

namespace {

// Runs body, mapping failures to exit codes with one diagnostic line each.
template <class Body>
int guarded(std::ostream& err, Body&& body)
{
    try {
        return body();
    } catch (const ConfigError& e) {
        for (const auto& m : e.messages())
            err << "config error: " << m << '\n';
        return exit_config_error;
    } catch (const std::invalid_argument& e) {
        err << "config error: " << e.what() << '\n';
        return exit_config_error;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << '\n';
        return exit_check_failure;
    }
}

Logger to_stream(std::ostream& out)
{
    return [&out](const std::string& line) { out << line << '\n'; };
}

std::string fixed(double x, const char* fmt = "%.6g")
{
    char buf[48];
    std::snprintf(buf, sizeof buf, fmt, x);
    return buf;
}

} // namespace

int cmd_simulate(const std::filesystem::path& config, std::ostream& out, std::ostream& err)
{
    return guarded(err, [&] {
        const RunConfig cfg = load_config(config);
        const SimulationSummary s = simulate(cfg, true, to_stream(out));
        out << "simulate: " << s.steps << " steps to t = " << fixed(s.final_state.t) << ", output in "
            << s.out_dir.string() << '\n';
        out << "  max mass drift " << fixed(s.max_mass_drift, "%.3e") << ", max|phi| " << fixed(s.max_abs_phi, "%.6f")
            << ", energy-increasing steps " << s.energy_increases << '\n';
        return int(exit_ok);
    });
}

int cmd_verify(const VerifyOptions& opts, std::ostream& out, std::ostream& err)
{
    return guarded(err, [&] {
        const auto checks = verify(opts);
        int failures = 0;
        for (const auto& c : checks) {
            char line[200];
            std::snprintf(line, sizeof line, "%-4s  %-58s value %-12.4g limit %.3g", c.pass ? "PASS" : "FAIL",
                          c.name.c_str(), c.value, c.threshold);
            out << line << '\n';
            failures += c.pass ? 0 : 1;
        }
        out << (failures ? std::to_string(failures) + " check(s) failed" : "all checks passed")
            << (opts.strict ? " (strict)" : "") << '\n';
        return failures ? int(exit_check_failure) : int(exit_ok);
    });
}

int cmd_compare(const std::filesystem::path& config, const std::vector<double>& amplitudes, std::ostream& out,
                std::ostream& err)
{
    return guarded(err, [&] {
        const RunConfig cfg = load_config(config);
        const CompareSummary s = compare(cfg, amplitudes, true, to_stream(out));
        for (std::size_t k = 0; k < s.amplitudes.size(); ++k)
            out << "  amplitude " << fixed(s.amplitudes[k], "%.3e") << "  H(T) " << fixed(s.h_end[k], "%.6e") << '\n';
        out << "compare: slope of log H(T)^(1/2) vs log amplitude = " << fixed(s.slope, "%.4f")
            << ", normalized ratio " << fixed(s.normalized_ratio, "%.4g") << ", output in " << s.out_dir.string()
            << '\n';
        return int(exit_ok);
    });
}

int cmd_convergence(const std::filesystem::path& config, bool ns_only, int levels, std::ostream& out,
                    std::ostream& err)
{
    return guarded(err, [&] {
        RunConfig cfg = load_config(config);
        if (ns_only)
            cfg.convergence.ns_only = true;
        if (levels > 0)
            cfg.convergence.levels = levels;
        const ConvergenceSummary s = convergence(cfg, true, {});
        for (const auto& l : s.ladders) {
            out << l.suite << ' ' << l.ladder << ": ";
            if (l.skipped) {
                out << "skipped\n";
                continue;
            }
            out << "order " << fixed(l.order, "%.3f") << "  (";
            for (std::size_t k = 0; k < l.steps.size(); ++k)
                out << (k ? ", " : "") << fixed(l.steps[k], "%.3g") << " -> " << fixed(l.errors[k], "%.3e");
            out << ")\n";
        }
        out << "spatial order " << fixed(s.spatial_order(), "%.3f") << ", temporal order "
            << fixed(s.temporal_order(), "%.3f") << '\n';
        return int(exit_ok);
    });
}

} // namespace modelh::app
