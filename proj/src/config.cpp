#include "modelh/app/config.hpp"

#include <charconv>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <functional>
#include <map>
#include <sstream>

#include <json.hpp>

namespace modelh::app {

namespace {

std::string trim(std::string_view s)
{
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string_view::npos)
        return {};
    const auto e = s.find_last_not_of(" \t\r");
    return std::string(s.substr(b, e - b + 1));
}

double parse_real(const std::string& s)
{
    const char* begin = s.c_str();
    char* end = nullptr;
    const double v = std::strtod(begin, &end);
    if (s.empty() || end != begin + s.size())
        throw std::invalid_argument("expected a real number, got '" + s + "'");
    if (!std::isfinite(v))
        throw std::invalid_argument("value must be finite");
    return v;
}

template <typename Int>
Int parse_integer(const std::string& s)
{
    Int v{};
    const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (s.empty() || ec != std::errc() || ptr != s.data() + s.size())
        throw std::invalid_argument("expected an integer, got '" + s + "'");
    return v;
}

bool parse_bool(const std::string& s)
{
    if (s == "true" || s == "1" || s == "yes" || s == "on")
        return true;
    if (s == "false" || s == "0" || s == "no" || s == "off")
        return false;
    throw std::invalid_argument("expected true or false, got '" + s + "'");
}

template <typename E>
E parse_choice(const std::string& s, std::initializer_list<std::pair<const char*, E>> options)
{
    std::string names;
    for (const auto& [name, value] : options) {
        if (s == name)
            return value;
        names += names.empty() ? name : std::string(", ") + name;
    }
    throw std::invalid_argument("expected one of {" + names + "}, got '" + s + "'");
}

template <typename E>
std::string choice_name(E v, std::initializer_list<std::pair<const char*, E>> options)
{
    for (const auto& [name, value] : options)
        if (v == value)
            return name;
    return "?";
}

const std::initializer_list<std::pair<const char*, Boundary>> boundary_names = {
    {"neumann_noslip", Boundary::NeumannNoSlip}, {"periodic", Boundary::Periodic}};
const std::initializer_list<std::pair<const char*, TimeScheme>> scheme_names = {
    {"convex_split", TimeScheme::ConvexSplit}, {"fully_implicit_newton", TimeScheme::FullyImplicitNewton}};
const std::initializer_list<std::pair<const char*, KortewegForm>> korteweg_names = {
    {"mu_grad_phi", KortewegForm::MuGradPhi}, {"tensor_div", KortewegForm::TensorDiv}};
const std::initializer_list<std::pair<const char*, InitialKind>> initial_names = {
    {"constant", InitialKind::Constant},
    {"cosine_perturbation", InitialKind::CosinePerturbation},
    {"tanh_stripe", InitialKind::TanhStripe},
    {"random_seeded", InitialKind::RandomSeeded}};
const std::initializer_list<std::pair<const char*, VelocityKind>> velocity_names = {
    {"none", VelocityKind::Zero}, {"taylor_green", VelocityKind::TaylorGreen}};
const std::initializer_list<std::pair<const char*, PerturbationShape>> shape_names = {
    {"cosine", PerturbationShape::Cosine}, {"random", PerturbationShape::Random}};

struct Key {
    const char* name;
    std::function<void(RunConfig&, const std::string&)> set;
    std::function<std::string(const RunConfig&)> get;
};

// Field accessors for the table below.
template <typename T>
Key real_key(const char* name, T RunConfig::*sect, double T::*field)
{
    return {name, [=](RunConfig& c, const std::string& v) { (c.*sect).*field = parse_real(v); },
            [=](const RunConfig& c) { return format_real((c.*sect).*field); }};
}

template <typename T, typename Int>
Key int_key(const char* name, T RunConfig::*sect, Int T::*field)
{
    return {name, [=](RunConfig& c, const std::string& v) { (c.*sect).*field = parse_integer<Int>(v); },
            [=](const RunConfig& c) { return std::to_string((c.*sect).*field); }};
}

template <typename T, typename E>
Key choice_key(const char* name, T RunConfig::*sect, E T::*field, std::initializer_list<std::pair<const char*, E>> opts)
{
    return {name, [=](RunConfig& c, const std::string& v) { (c.*sect).*field = parse_choice(v, opts); },
            [=](const RunConfig& c) { return choice_name((c.*sect).*field, opts); }};
}

template <typename T>
Key bool_key(const char* name, T RunConfig::*sect, bool T::*field)
{
    return {name, [=](RunConfig& c, const std::string& v) { (c.*sect).*field = parse_bool(v); },
            [=](const RunConfig& c) { return std::string((c.*sect).*field ? "true" : "false"); }};
}

const std::vector<Key>& schema()
{
    using C = RunConfig;
    static const std::vector<Key> keys = {
        int_key("grid.nx", &C::grid, &Grid::nx),
        int_key("grid.ny", &C::grid, &Grid::ny),
        real_key("grid.Lx", &C::grid, &Grid::lx),
        real_key("grid.Ly", &C::grid, &Grid::ly),
        choice_key("grid.bc", &C::grid, &Grid::bc, boundary_names),
        real_key("potential.theta", &C::potential, &PotentialSpec<double>::theta),
        real_key("potential.theta0", &C::potential, &PotentialSpec<double>::theta0),
        real_key("potential.eps", &C::potential, &PotentialSpec<double>::eps),
        real_key("viscosity.nu1", &C::viscosity, &ViscositySpec<double>::nu1),
        real_key("viscosity.nu2", &C::viscosity, &ViscositySpec<double>::nu2),
        real_key("time.dt", &C::solver, &SolverConfig::dt),
        real_key("time.t_end", &C::solver, &SolverConfig::t_end),
        int_key("time.snapshot_every", &C::solver, &SolverConfig::snapshot_every),
        int_key("time.report_every", &C::solver, &SolverConfig::report_every),
        choice_key("scheme.time", &C::solver, &SolverConfig::scheme, scheme_names),
        choice_key("scheme.korteweg_form", &C::solver, &SolverConfig::korteweg_form, korteweg_names),
        real_key("scheme.cfl_max", &C::solver, &SolverConfig::cfl_max),
        bool_key("scheme.flow", &C::solver, &SolverConfig::flow),
        real_key("solver.newton_tol", &C::solver, &SolverConfig::newton_tol),
        int_key("solver.newton_max", &C::solver, &SolverConfig::newton_max),
        real_key("solver.viscous_tol", &C::solver, &SolverConfig::viscous_tol),
        choice_key("initial.kind", &C::initial, &InitialSpec::kind, initial_names),
        real_key("initial.mean", &C::initial, &InitialSpec::mean),
        real_key("initial.amplitude", &C::initial, &InitialSpec::amplitude),
        real_key("initial.width", &C::initial, &InitialSpec::width),
        real_key("initial.position", &C::initial, &InitialSpec::position),
        int_key("initial.mode_x", &C::initial, &InitialSpec::mode_x),
        int_key("initial.mode_y", &C::initial, &InitialSpec::mode_y),
        int_key("initial.seed", &C::initial, &InitialSpec::seed),
        choice_key("initial.velocity", &C::initial, &InitialSpec::velocity, velocity_names),
        real_key("initial.velocity_amplitude", &C::initial, &InitialSpec::velocity_amplitude),
        {"truncation.k", [](C& c, const std::string& v) { c.truncation_k = parse_real(v); },
         [](const C& c) { return format_real(c.truncation_k); }},
        {"diagnostics.tau", [](C& c, const std::string& v) { c.tau = parse_real(v); },
         [](const C& c) { return format_real(c.tau); }},
        {"output.dir",
         [](C& c, const std::string& v) {
             if (v.empty())
                 throw std::invalid_argument("output directory must not be empty");
             c.output_dir = v;
         },
         [](const C& c) { return c.output_dir; }},
        choice_key("compare.shape", &C::compare, &CompareSpec::shape, shape_names),
        int_key("compare.mode_x", &C::compare, &CompareSpec::mode_x),
        int_key("compare.mode_y", &C::compare, &CompareSpec::mode_y),
        int_key("compare.seed", &C::compare, &CompareSpec::seed),
        int_key("convergence.base_n", &C::convergence, &ConvergenceSpec::base_n),
        int_key("convergence.levels", &C::convergence, &ConvergenceSpec::levels),
        real_key("convergence.t_end", &C::convergence, &ConvergenceSpec::t_end),
        real_key("convergence.spatial_dt_factor", &C::convergence, &ConvergenceSpec::spatial_dt_factor),
        real_key("convergence.temporal_dt", &C::convergence, &ConvergenceSpec::temporal_dt),
        bool_key("convergence.ns_only", &C::convergence, &ConvergenceSpec::ns_only),
    };
    return keys;
}

const Key* find_key(const std::string& name)
{
    for (const Key& k : schema())
        if (name == k.name)
            return &k;
    return nullptr;
}

// Collects entries and their locations, then validates the whole config.
class Builder {
public:
    explicit Builder(std::string origin) : origin_(std::move(origin)) {}

    void entry(const std::string& key, const std::string& value, const std::string& where)
    {
        const Key* k = find_key(key);
        if (!k) {
            errors_.push_back(where + ": unknown key '" + key + "'");
            return;
        }
        if (auto it = where_.find(key); it != where_.end()) {
            errors_.push_back(where + ": duplicate key '" + key + "' (first set at " + it->second + ")");
            return;
        }
        where_[key] = where;
        try {
            k->set(cfg_, value);
        } catch (const std::exception& e) {
            errors_.push_back(where + ": " + key + ": " + e.what());
        }
    }

    void error(const std::string& where, const std::string& msg) { errors_.push_back(where + ": " + msg); }

    RunConfig finish()
    {
        if (errors_.empty())
            validate();
        if (!errors_.empty())
            throw ConfigError(errors_);
        return cfg_;
    }

private:
    std::string at(const std::string& key) const
    {
        auto it = where_.find(key);
        return it != where_.end() ? it->second : origin_ + " (default " + key + ")";
    }

    void require(bool ok, const std::string& key, const std::string& msg)
    {
        if (!ok)
            errors_.push_back(at(key) + ": " + key + ": " + msg);
    }

    void validate()
    {
        const RunConfig& c = cfg_;
        require(c.grid.nx >= 4, "grid.nx", "at least 4 cells required");
        require(c.grid.ny >= 4, "grid.ny", "at least 4 cells required");
        require(c.grid.lx > 0, "grid.Lx", "must be positive");
        require(c.grid.ly > 0, "grid.Ly", "must be positive");

        require(c.potential.theta > 0, "potential.theta", "must be positive");
        require(c.potential.theta0 > c.potential.theta, "potential.theta0",
                "must exceed potential.theta (the mixture must have a spinodal region)");
        require(c.potential.eps >= 0 && c.potential.eps < 1, "potential.eps", "must lie in [0, 1)");
        require(c.viscosity.nu1 > 0, "viscosity.nu1", "must be positive");
        require(c.viscosity.nu2 > 0, "viscosity.nu2", "must be positive");
        if (c.viscosity.nu1 > 0 && c.viscosity.nu2 > 0)
            require(c.viscosity.nu_star() > 0, "viscosity.nu2", "contrast too large for the viscosity extension");

        const SolverConfig& s = c.solver;
        require(s.dt > 0, "time.dt", "must be positive");
        require(s.t_end >= 0, "time.t_end", "must be non-negative");
        if (s.dt > 0 && s.t_end > 0) {
            const double n = s.t_end / s.dt;
            require(std::abs(n - std::round(n)) <= 1e-9 * std::max(1.0, n), "time.t_end",
                    "must be an integer multiple of time.dt");
        }
        require(s.report_every >= 1, "time.report_every", "must be at least 1");
        require(s.snapshot_every >= 0, "time.snapshot_every", "must be non-negative");
        require(s.cfl_max > 0, "scheme.cfl_max", "must be positive");
        require(s.newton_tol > 0 && s.newton_tol < 1, "solver.newton_tol", "must lie in (0, 1)");
        require(s.newton_max > 0, "solver.newton_max", "must be positive");
        require(s.viscous_tol > 0 && s.viscous_tol < 1, "solver.viscous_tol", "must lie in (0, 1)");

        // pointwise bound of the initial phase field before preparation
        const InitialSpec& i = c.initial;
        const bool exact = c.potential.eps == 0;
        auto bounded = [&](double sup) { return exact ? sup < 1 : sup <= 1; };
        const char* bound_msg = exact ? "initial phase must satisfy |phi0| < 1 with the exact potential"
                                      : "initial phase must satisfy |phi0| <= 1";
        require(std::abs(i.mean) < 1, "initial.mean", "mean must lie in (-1, 1)");
        switch (i.kind) {
        case InitialKind::Constant:
            break;
        case InitialKind::CosinePerturbation:
        case InitialKind::RandomSeeded:
            require(bounded(std::abs(i.mean) + std::abs(i.amplitude)), "initial.amplitude", bound_msg);
            break;
        case InitialKind::TanhStripe:
            require(bounded(std::abs(i.amplitude)), "initial.amplitude", bound_msg);
            require(i.width > 0, "initial.width", "must be positive");
            require(i.position > 0 && i.position < 1, "initial.position", "must lie in (0, 1)");
            break;
        }
        require(i.mode_x >= 0 && i.mode_y >= 0, "initial.mode_x", "modes must be non-negative");
        if (i.kind == InitialKind::CosinePerturbation)
            require(i.mode_x + i.mode_y > 0, "initial.mode_x", "at least one mode must be nonzero");

        require(c.truncation_k > 0, "truncation.k", "must be positive");
        require(c.compare.mode_x >= 0 && c.compare.mode_y >= 0 && c.compare.mode_x + c.compare.mode_y > 0,
                "compare.mode_x", "modes must be non-negative and not both zero");
        require(c.convergence.base_n >= 4, "convergence.base_n", "at least 4 cells required");
        require(c.convergence.levels >= 1, "convergence.levels", "must be positive");
        require(c.convergence.t_end > 0, "convergence.t_end", "must be positive");
        require(c.convergence.spatial_dt_factor > 0, "convergence.spatial_dt_factor", "must be positive");
        require(c.convergence.temporal_dt > 0, "convergence.temporal_dt", "must be positive");
    }

    std::string origin_;
    RunConfig cfg_;
    std::map<std::string, std::string> where_;
    std::vector<std::string> errors_;
};

std::string join_lines(const std::vector<std::string>& lines)
{
    std::string s;
    for (const auto& l : lines)
        s += (s.empty() ? "" : "\n") + l;
    return s;
}

} // namespace

ConfigError::ConfigError(std::vector<std::string> messages)
    : std::runtime_error(join_lines(messages)), messages_(std::move(messages))
{
}

std::string format_real(double x)
{
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", x);
    return buf;
}

std::string_view to_string(InitialKind k)
{
    switch (k) {
    case InitialKind::Constant:
        return "constant";
    case InitialKind::CosinePerturbation:
        return "cosine_perturbation";
    case InitialKind::TanhStripe:
        return "tanh_stripe";
    case InitialKind::RandomSeeded:
        return "random_seeded";
    }
    return "?";
}

RunConfig parse_config(std::string_view text, const std::string& origin)
{
    Builder b(origin);
    std::istringstream in{std::string(text)};
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (const auto hash = line.find('#'); hash != std::string::npos)
            line.erase(hash);
        const std::string content = trim(line);
        if (content.empty())
            continue;
        const std::string where = origin + ":" + std::to_string(lineno);
        const auto eq = content.find('=');
        if (eq == std::string::npos) {
            b.error(where, "expected 'key = value', got '" + content + "'");
            continue;
        }
        const std::string key = trim(std::string_view(content).substr(0, eq));
        const std::string value = trim(std::string_view(content).substr(eq + 1));
        if (key.empty()) {
            b.error(where, "missing key before '='");
            continue;
        }
        b.entry(key, value, where);
    }
    return b.finish();
}

RunConfig parse_manifest(std::string_view json_text, const std::string& origin)
{
    using nlohmann::json;
    json doc;
    try {
        doc = json::parse(json_text);
    } catch (const json::parse_error& e) {
        throw ConfigError({origin + ": invalid JSON: " + e.what()});
    }
    if (!doc.is_object() || !doc.contains("config") || !doc["config"].is_object())
        throw ConfigError({origin + ": manifest has no \"config\" object"});
    Builder b(origin);
    for (const auto& [key, value] : doc["config"].items()) {
        const std::string where = origin + ": config." + key;
        if (value.is_string())
            b.entry(key, value.get<std::string>(), where);
        else if (value.is_boolean())
            b.entry(key, value.get<bool>() ? "true" : "false", where);
        else if (value.is_number_integer())
            b.entry(key, value.dump(), where);
        else if (value.is_number())
            b.entry(key, format_real(value.get<double>()), where);
        else
            b.error(where, "value must be a string, number or boolean");
    }
    return b.finish();
}

RunConfig load_config(const std::filesystem::path& path)
{
    std::ifstream in(path, std::ios::binary);
    if (!in)
        throw ConfigError({path.string() + ": cannot open configuration file"});
    std::ostringstream ss;
    ss << in.rdbuf();
    const std::string text = ss.str();
    const auto first = text.find_first_not_of(" \t\r\n");
    if (first != std::string::npos && text[first] == '{')
        return parse_manifest(text, path.string());
    return parse_config(text, path.string());
}

std::vector<std::pair<std::string, std::string>> to_key_values(const RunConfig& cfg)
{
    std::vector<std::pair<std::string, std::string>> out;
    for (const Key& k : schema())
        out.emplace_back(k.name, k.get(cfg));
    return out;
}

std::string to_text(const RunConfig& cfg)
{
    std::string s;
    for (const auto& [k, v] : to_key_values(cfg))
        s += k + " = " + v + "\n";
    return s;
}

} // namespace modelh::app
