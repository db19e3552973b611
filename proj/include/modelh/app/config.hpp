#ifndef MODELH_APP_CONFIG_HPP
#define MODELH_APP_CONFIG_HPP

#include <cstdint>
#include <filesystem>
#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "modelh/diagnostics.hpp"

namespace modelh::app {

enum class InitialKind { Constant, CosinePerturbation, TanhStripe, RandomSeeded };
enum class VelocityKind { Zero, TaylorGreen };

struct InitialSpec {
    InitialKind kind = InitialKind::Constant;
    double mean = 0;
    double amplitude = 0;
    double width = 0.05;     // tanh_stripe interface width
    double position = 0.5;   // tanh_stripe center as a fraction of Lx
    int mode_x = 1;
    int mode_y = 1;
    std::uint64_t seed = 0;
    VelocityKind velocity = VelocityKind::Zero;
    double velocity_amplitude = 0;
};

enum class PerturbationShape { Cosine, Random };

struct CompareSpec {
    PerturbationShape shape = PerturbationShape::Cosine;
    int mode_x = 1;
    int mode_y = 1;
    std::uint64_t seed = 1;
};

struct ConvergenceSpec {
    int base_n = 16;
    int levels = 3;
    double t_end = 0.1;
    double spatial_dt_factor = 0.1;  // dt = factor * h^2 on the spatial ladder
    double temporal_dt = 0.01;       // coarsest dt on the temporal ladder
    bool ns_only = false;
};

struct RunConfig {
    Grid grid{64, 64, 1.0, 1.0, Boundary::NeumannNoSlip};
    PotentialSpec<double> potential;
    ViscositySpec<double> viscosity;
    SolverConfig solver;
    InitialSpec initial;
    double truncation_k = 20;
    double tau = -1;  // negative: a tenth of t_end
    std::string output_dir = "output";
    CompareSpec compare;
    ConvergenceSpec convergence;

    double burn_in() const { return tau >= 0 ? tau : default_tau(solver.t_end); }
};

/// All problems found in one configuration, one "origin:line: message" each.
class ConfigError : public std::runtime_error {
public:
    explicit ConfigError(std::vector<std::string> messages);
    const std::vector<std::string>& messages() const { return messages_; }

private:
    std::vector<std::string> messages_;
};

/// Flat "section.key = value" text; '#' starts a comment. Unknown keys,
/// malformed values and violated invariants are all reported together.
RunConfig parse_config(std::string_view text, const std::string& origin = "<config>");

/// The "config" object of a run manifest (dotted keys, string or number values).
RunConfig parse_manifest(std::string_view json_text, const std::string& origin = "<manifest>");

/// Reads a key-value file or, when the content is a JSON object, a manifest.
RunConfig load_config(const std::filesystem::path& path);

/// Every key with its resolved value, in schema order. Reals use 17
/// significant digits so that parse_config(to_text(c)) reproduces c exactly.
std::vector<std::pair<std::string, std::string>> to_key_values(const RunConfig& cfg);
std::string to_text(const RunConfig& cfg);

/// Shortest-safe decimal form of a double: 17 significant digits.
std::string format_real(double x);

std::string_view to_string(InitialKind k);

} // namespace modelh::app

#endif
