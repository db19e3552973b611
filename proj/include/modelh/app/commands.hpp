#ifndef MODELH_APP_COMMANDS_HPP
#define MODELH_APP_COMMANDS_HPP

#include <filesystem>
#include <functional>
#include <iosfwd>
#include <string>
#include <vector>

#include "modelh/app/config.hpp"
#include "modelh/app/initial.hpp"

namespace modelh::app {

enum ExitCode : int { exit_ok = 0, exit_check_failure = 1, exit_config_error = 2 };

using Logger = std::function<void(const std::string&)>;

struct SimulationSummary {
    std::filesystem::path out_dir;
    InitialDatum datum;
    long long steps = 0;
    double mean_phi0 = 0;
    double max_mass_drift = 0;       ///< max_n |mean(phi^n) - mean(phi^0)|
    double max_abs_phi = 0;          ///< over every step
    bool bound_preserved = true;     ///< max|phi| < 1 at every step (exact potential)
    int energy_increases = 0;        ///< steps with E^{n+1} > E^n (1e-12 relative)
    double mean_balance_residual = 0;  ///< mean over steps of |(E^{n+1} - E^n)/dt + D^{n+1}|
    std::vector<double> t;           ///< every step, including t = 0
    std::vector<double> total_energy;
    std::vector<double> max_abs_phi_series;
    SeparationSeries separation;
    RegularitySeries regularity;     ///< at report steps
    int cfl_warnings = 0;
    State<double> final_state;
};

/// Runs cfg: initial datum (truncated when needed), time loop, CSV and
/// snapshot output, manifest. With write_outputs false nothing touches disk.
SimulationSummary simulate(const RunConfig& cfg, bool write_outputs = true, const Logger& log = {});

struct CompareSummary {
    std::filesystem::path out_dir;
    std::vector<double> amplitudes;
    std::vector<std::vector<StabilityRecord>> records;  ///< per amplitude, at report steps
    std::vector<double> h_end;
    double slope = 0;             ///< least-squares slope of log H(T)^{1/2} against log amplitude
    double normalized_ratio = 0;  ///< max over a, t of H_a(t) (a_min / a)^2 / max_t H_{a_min}(t)
};

/// Paired runs from phi0 and phi0 + a * shape for each amplitude, stepped in
/// lockstep; throws ConfigError for amplitudes that leave the admissible range.
CompareSummary compare(const RunConfig& cfg, const std::vector<double>& amplitudes, bool write_outputs = true,
                       const Logger& log = {});

struct ConvergenceLadder {
    std::string suite;   ///< "ns" or "ch"
    std::string ladder;  ///< "spatial" (h) or "temporal" (dt)
    bool skipped = false;
    std::vector<double> steps;
    std::vector<double> errors;
    double order = 0;
};

struct ConvergenceSummary {
    std::filesystem::path out_dir;
    std::vector<ConvergenceLadder> ladders;
    double spatial_order() const;   ///< smallest fitted order over the non-skipped spatial ladders
    double temporal_order() const;
};

/// Manufactured-solution orders on a periodic grid: Taylor-Green decay for
/// the momentum part, a forced cosine mode for the Cahn-Hilliard part.
ConvergenceSummary convergence(const RunConfig& cfg, bool write_outputs = true, const Logger& log = {});

struct VerifyCheck {
    std::string name;
    double value = 0;
    double threshold = 0;
    bool pass = false;
};

struct VerifyOptions {
    bool strict = false;  ///< tolerances ten times tighter, ratio windows halved
    /// Replacement for the discrete Laplacian in the operator checks; lets a
    /// test harness inject a defect and watch the suite catch it.
    std::function<ScalarField<double>(const ScalarField<double>&)> laplace_override;
};

std::vector<VerifyCheck> verify(const VerifyOptions& opts = {});

/// Least-squares slope of log y against log x.
double fitted_slope(const std::vector<double>& x, const std::vector<double>& y);

int cmd_simulate(const std::filesystem::path& config, std::ostream& out, std::ostream& err);
int cmd_verify(const VerifyOptions& opts, std::ostream& out, std::ostream& err);
int cmd_compare(const std::filesystem::path& config, const std::vector<double>& amplitudes, std::ostream& out,
                std::ostream& err);
int cmd_convergence(const std::filesystem::path& config, bool ns_only, int levels, std::ostream& out,
                    std::ostream& err);

} // namespace modelh::app

#endif
