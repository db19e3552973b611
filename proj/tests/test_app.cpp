#include <doctest.h>

#include <cmath>
#include <cstdlib>
#include <fstream>
#include <set>
#include <sstream>

#include <json.hpp>

#include "modelh/app/commands.hpp"
#include "modelh/app/io.hpp"

using namespace modelh;
using namespace modelh::app;
namespace fs = std::filesystem;

namespace {

fs::path scratch(const std::string& name)
{
    const fs::path p = fs::temp_directory_path() / "modelh_test_app" / name;
    fs::remove_all(p);
    fs::create_directories(p);
    return p;
}

// Small coupled run used by several cases; output goes to dir.
std::string small_config(const fs::path& dir, const std::string& extra = "")
{
    return "grid.nx = 16\ngrid.ny = 16\ngrid.Lx = 4\ngrid.Ly = 4\ngrid.bc = periodic\n"
           "time.dt = 1e-3\ntime.t_end = 0.01\ntime.report_every = 2\ntime.snapshot_every = 5\n"
           "initial.kind = random_seeded\ninitial.amplitude = 0.05\ninitial.seed = 4\n"
           "initial.velocity = taylor_green\ninitial.velocity_amplitude = 0.1\n"
           "output.dir = " + dir.string() + "\n" + extra;
}

std::vector<std::string> messages_of(const std::string& text)
{
    try {
        parse_config(text, "case.cfg");
    } catch (const ConfigError& e) {
        return e.messages();
    }
    return {};
}

bool any_contains(const std::vector<std::string>& ms, const std::string& needle)
{
    for (const auto& m : ms)
        if (m.find(needle) != std::string::npos)
            return true;
    return false;
}

std::set<std::string> tree(const fs::path& root)
{
    std::set<std::string> out;
    for (const auto& e : fs::recursive_directory_iterator(root))
        if (e.is_regular_file())
            out.insert(fs::relative(e.path(), root).generic_string());
    return out;
}

} // namespace

TEST_CASE("config text parses, and every error is reported with its line")
{
    const RunConfig c = parse_config("# comment\n\ngrid.nx = 32   # trailing\npotential.theta0 = 3\n", "a.cfg");
    CHECK(c.grid.nx == 32);
    CHECK(c.potential.theta0 == 3.0);

    const auto ms = messages_of("grid.nx = 8\ngrid.bogus = 1\ngrid.nx = 9\npotential.theta0 = 0.5\ntime.dt = abc\n");
    CHECK(any_contains(ms, "case.cfg:2"));
    CHECK(any_contains(ms, "grid.bogus"));
    CHECK(any_contains(ms, "case.cfg:3"));   // duplicate
    CHECK(any_contains(ms, "case.cfg:5"));   // malformed value
    CHECK(ms.size() == 3);

    // cross-key invariants are checked once every entry has parsed
    CHECK(any_contains(messages_of("potential.theta0 = 0.5\n"), "case.cfg:1: potential.theta0"));

    CHECK(any_contains(messages_of("grid.nx 12\n"), "case.cfg:1"));
    CHECK(any_contains(messages_of("time.dt = 0.003\ntime.t_end = 0.01\n"), "t_end"));
    CHECK(any_contains(messages_of("initial.kind = constant\ninitial.mean = 1\n"), "initial.mean"));
    CHECK(any_contains(messages_of("initial.kind = cosine_perturbation\ninitial.amplitude = 1\n"), "initial"));
    CHECK(messages_of("initial.kind = cosine_perturbation\ninitial.amplitude = 1\npotential.eps = 1e-3\n").empty());
    CHECK(any_contains(messages_of("grid.bc = slip\n"), "neumann_noslip"));
}

TEST_CASE("config survives text and manifest round trips")
{
    RunConfig c = parse_config("grid.nx = 24\ngrid.Lx = 3.3\ninitial.kind = tanh_stripe\ninitial.width = 0.125\n"
                               "scheme.korteweg_form = tensor_div\nviscosity.nu2 = 0.1\n");
    c.potential.theta0 = 2.0000000000000004;  // needs all 17 digits
    const auto kv = to_key_values(c);
    CHECK(to_key_values(parse_config(to_text(c))) == kv);

    nlohmann::ordered_json m;
    m["format"] = "modelh-manifest";
    m["config"] = nlohmann::ordered_json::object();
    for (const auto& [k, v] : kv)
        m["config"][k] = v;
    CHECK(to_key_values(parse_manifest(m.dump())) == kv);
    CHECK_THROWS_AS(parse_manifest("{\"config\": {\"grid.nope\": \"1\"}}"), ConfigError);
}

TEST_CASE("the manifest written by a run reloads as its config")
{
    const fs::path dir = scratch("manifest");
    const fs::path cfg_path = dir / "run.cfg";
    write_text(cfg_path, small_config(dir / "out"));
    const RunConfig c = load_config(cfg_path);
    simulate(c, true);
    const RunConfig again = load_config(dir / "out" / "manifest.json");
    CHECK(to_key_values(again) == to_key_values(c));
}

TEST_CASE("splitmix64 matches the reference generator")
{
    // counter n is the (n+1)-th output of the reference stream started at seed
    CHECK(splitmix64(0, 0) == 0xe220a8397b1dcdafULL);
    CHECK(splitmix64(1234567, 0) == 6457827717110365317ULL);
    CHECK(splitmix64(1234567, 1) == 3203168211198807973ULL);
    for (std::uint64_t n = 0; n < 1000; ++n) {
        const double u = uniform_pm1(9, n);
        REQUIRE(u >= -1.0);
        REQUIRE(u < 1.0);
    }
}

TEST_CASE("csv rows carry every bit of a double")
{
    const fs::path dir = scratch("csv");
    const std::vector<double> xs = {0.1, 1.0 / 3.0, -2.718281828459045, 1e-300, 6.02214076e23, 0.0};
    {
        CsvWriter w(dir / "x.csv", {"a", "b", "c", "d", "e", "f"});
        w.row(xs);
        CHECK_THROWS(w.row({1.0, 2.0}));
    }
    std::ifstream in(dir / "x.csv");
    std::string header, row;
    std::getline(in, header);
    std::getline(in, row);
    CHECK(header == "a,b,c,d,e,f");
    std::stringstream ss(row);
    std::string cell;
    for (double x : xs) {
        REQUIRE(std::getline(ss, cell, ','));
        CHECK(std::strtod(cell.c_str(), nullptr) == x);
    }
}

TEST_CASE("snapshots read back bit for bit, and restarting from one is seamless")
{
    const fs::path dir = scratch("snapshot");
    RunConfig c = parse_config(small_config(dir / "out"));
    const SimulationSummary full = simulate(c, true);

    const fs::path side = dir / "out" / "snapshots" / "snap_00000005.json";
    REQUIRE(fs::exists(side));
    const State<double> mid = read_snapshot(side);
    CHECK(mid.t == doctest::Approx(0.005));

    const auto meta = nlohmann::json::parse(read_text(side));
    CHECK(meta["byte_order"] == "little");
    CHECK(meta["blocks"].size() == 5);
    CHECK(fs::file_size(dir / "out" / "snapshots" / "snap_00000005.bin") ==
          (3u * 16 * 16 + 2u * 17 * 16) * sizeof(double));

    const State<double> last = read_snapshot(dir / "out" / "snapshots" / "snap_00000010.json");
    CHECK((last.phi.values.array() == full.final_state.phi.values.array()).all());
    CHECK((last.u.u.array() == full.final_state.u.u.array()).all());
    CHECK((last.u.v.array() == full.final_state.u.v.array()).all());

    SolverConfig sc = c.solver;
    sc.snapshot_every = 0;
    const State<double> resumed = run(mid, sc, c.potential, c.viscosity, {});
    CHECK((resumed.phi.values.array() == full.final_state.phi.values.array()).all());
    CHECK((resumed.u.u.array() == full.final_state.u.u.array()).all());
}

TEST_CASE("a zero-length run writes only the manifest and the initial snapshot")
{
    const fs::path dir = scratch("zero");
    const RunConfig c = parse_config(small_config(dir / "out", "") + "");
    RunConfig z = c;
    z.solver.t_end = 0;
    const SimulationSummary s = simulate(z, true);
    CHECK(s.steps == 0);
    CHECK(tree(dir / "out") ==
          std::set<std::string>{"manifest.json", "snapshots/snap_00000000.bin", "snapshots/snap_00000000.json"});
    CHECK((s.final_state.phi.values.array() == s.datum.phi.values.array()).all());
}

TEST_CASE("repeated runs produce byte-identical csv files")
{
    const fs::path a = scratch("det_a"), b = scratch("det_b");
    simulate(parse_config(small_config(a)), true);
    simulate(parse_config(small_config(b)), true);
    for (const char* f : {"energy.csv", "regularity.csv"})
        CHECK(read_text(a / f) == read_text(b / f));
}

TEST_CASE("commands map failures onto exit codes")
{
    const fs::path dir = scratch("exit");
    std::ostringstream out, err;
    CHECK(cmd_simulate(dir / "missing.cfg", out, err) == exit_config_error);
    write_text(dir / "bad.cfg", "grid.nx = -3\n");
    CHECK(cmd_simulate(dir / "bad.cfg", out, err) == exit_config_error);
    CHECK(err.str().find("bad.cfg:1") != std::string::npos);

    write_text(dir / "good.cfg", small_config(dir / "out"));
    CHECK(cmd_simulate(dir / "good.cfg", out, err) == exit_ok);
    CHECK(cmd_compare(dir / "good.cfg", {0.5, 3.0}, out, err) == exit_config_error);
    CHECK(cmd_convergence(dir / "good.cfg", true, 2, out, err) == exit_config_error);
    CHECK(cmd_verify({}, out, err) == exit_ok);
}

TEST_CASE("verify passes on the real operators and catches a corrupted laplacian")
{
    for (const auto& c : verify())
        CHECK_MESSAGE(c.pass, c.name);

    VerifyOptions broken;
    broken.laplace_override = [](const ScalarField<double>& f) { return -1.0 * laplace(f); };
    int failed = 0;
    for (const auto& c : verify(broken))
        failed += c.pass ? 0 : 1;
    CHECK(failed >= 2);
}

TEST_CASE("compare: zero perturbation gives identically zero H, large ones are rejected")
{
    const fs::path dir = scratch("compare");
    const RunConfig c = parse_config(small_config(dir));
    const CompareSummary s = compare(c, {0.0, 1e-3}, true);
    for (const auto& r : s.records[0])
        CHECK(r.h_value == 0.0);
    CHECK(s.h_end[1] > 0);
    CHECK(fs::exists(dir / "stability_0.csv"));
    CHECK(fs::exists(dir / "compare.csv"));
    CHECK_THROWS_AS(compare(c, {1e-3, 5.0}, false), ConfigError);
    CHECK_THROWS_AS(compare(c, {}, false), ConfigError);
}

TEST_CASE("convergence: too few levels is a config error, ns_only skips the phase ladders")
{
    RunConfig c = parse_config("grid.bc = periodic\ngrid.Lx = 2\ngrid.Ly = 2\nconvergence.base_n = 8\n"
                               "convergence.t_end = 0.02\nconvergence.temporal_dt = 0.005\n");
    c.convergence.levels = 1;
    CHECK_THROWS_AS(convergence(c, false), ConfigError);

    c.convergence.levels = 3;
    c.convergence.ns_only = true;
    const ConvergenceSummary s = convergence(c, false);
    REQUIRE(s.ladders.size() == 4);
    int skipped = 0;
    for (const auto& l : s.ladders) {
        CHECK(l.skipped == (l.suite == "ch"));
        skipped += l.skipped;
    }
    CHECK(skipped == 2);
    CHECK(s.spatial_order() > 1.8);

    RunConfig walls = c;
    walls.grid = Grid(8, 8, 2.0, 2.0, Boundary::NeumannNoSlip);
    CHECK_THROWS_AS(convergence(walls, false), ConfigError);
}
