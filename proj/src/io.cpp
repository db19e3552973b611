#include "modelh/app/io.hpp"

#include <bit>
#include <cstdint>
#include <cstdlib>
#include <cstring>
#include <sstream>
#include <stdexcept>

#include <json.hpp>

namespace modelh::app {

namespace fs = std::filesystem;

const std::vector<std::string> energy_columns = {"t",     "kinetic",          "interfacial",      "bulk",
                                                 "total", "visc_dissipation", "chem_dissipation", "mean_phi",
                                                 "max_abs_phi", "div_residual"};
const std::vector<std::string> stability_columns = {"t", "h_value", "l2_u_diff", "l2_phi_diff"};
const std::vector<std::string> regularity_columns = {"t", "grad_u", "grad_mu", "lambda", "sep_delta"};

CsvWriter::CsvWriter(const fs::path& path, std::vector<std::string> columns)
    : out_(path, std::ios::binary | std::ios::trunc), ncols_(columns.size())
{
    if (!out_)
        throw std::runtime_error("cannot write " + path.string());
    for (std::size_t k = 0; k < columns.size(); ++k)
        out_ << (k ? "," : "") << columns[k];
    out_ << '\n';
}

void CsvWriter::row(std::initializer_list<double> values) { row(std::vector<double>(values)); }

void CsvWriter::row(const std::vector<double>& values)
{
    if (values.size() != ncols_)
        throw std::logic_error("csv row has the wrong number of columns");
    for (std::size_t k = 0; k < values.size(); ++k)
        out_ << (k ? "," : "") << format_real(values[k]);
    out_ << '\n';
    out_.flush();
}

namespace {

void put_le(std::ofstream& out, const double* data, std::size_t n)
{
    if constexpr (std::endian::native == std::endian::little) {
        out.write(reinterpret_cast<const char*>(data), static_cast<std::streamsize>(n * sizeof(double)));
    } else {
        for (std::size_t k = 0; k < n; ++k) {
            std::uint64_t bits;
            std::memcpy(&bits, data + k, 8);
            bits = __builtin_bswap64(bits);
            out.write(reinterpret_cast<const char*>(&bits), 8);
        }
    }
}

void get_le(std::ifstream& in, double* data, std::size_t n)
{
    in.read(reinterpret_cast<char*>(data), static_cast<std::streamsize>(n * sizeof(double)));
    if constexpr (std::endian::native != std::endian::little) {
        for (std::size_t k = 0; k < n; ++k) {
            std::uint64_t bits;
            std::memcpy(&bits, data + k, 8);
            bits = __builtin_bswap64(bits);
            std::memcpy(data + k, &bits, 8);
        }
    }
}

} // namespace

void write_snapshot(const fs::path& dir, const std::string& stem, const State<double>& s, long long step)
{
    using nlohmann::ordered_json;
    fs::create_directories(dir);
    const Grid& g = s.grid();
    struct Block {
        const char* name;
        const Array2<double>* a;
    };
    const Block blocks[] = {{"phi", &s.phi.values}, {"mu", &s.mu.values}, {"pi", &s.pi.values},
                            {"u", &s.u.u},          {"v", &s.u.v}};

    std::ofstream bin(dir / (stem + ".bin"), std::ios::binary | std::ios::trunc);
    if (!bin)
        throw std::runtime_error("cannot write snapshot in " + dir.string());
    ordered_json side;
    side["format"] = "modelh-snapshot";
    side["t"] = s.t;
    side["step"] = step;
    side["grid"] = {{"nx", g.nx}, {"ny", g.ny}, {"Lx", g.lx}, {"Ly", g.ly}, {"bc", std::string(to_string(g.bc))}};
    side["dtype"] = "float64";
    side["byte_order"] = "little";
    side["layout"] = "x fastest";
    side["data"] = stem + ".bin";
    ordered_json arr = ordered_json::array();
    std::size_t offset = 0;
    for (const Block& b : blocks) {
        // Eigen arrays are column-major with x as the row index: x is fastest
        const std::size_t n = static_cast<std::size_t>(b.a->size());
        put_le(bin, b.a->data(), n);
        arr.push_back({{"name", b.name}, {"shape", {b.a->rows(), b.a->cols()}}, {"offset", offset}});
        offset += n * sizeof(double);
    }
    side["blocks"] = arr;
    write_text(dir / (stem + ".json"), side.dump(2) + "\n");
}

State<double> read_snapshot(const fs::path& sidecar)
{
    using nlohmann::json;
    const json side = json::parse(read_text(sidecar));
    const auto& gj = side.at("grid");
    const Grid g(gj.at("nx").get<int>(), gj.at("ny").get<int>(), gj.at("Lx").get<double>(), gj.at("Ly").get<double>(),
                 boundary_from_string(gj.at("bc").get<std::string>()));
    State<double> s(g);
    s.t = side.at("t").get<double>();
    std::ifstream bin(sidecar.parent_path() / side.at("data").get<std::string>(), std::ios::binary);
    if (!bin)
        throw std::runtime_error("snapshot data missing for " + sidecar.string());
    for (const auto& b : side.at("blocks")) {
        const std::string name = b.at("name").get<std::string>();
        Array2<double>* a = name == "phi" ? &s.phi.values
                            : name == "mu" ? &s.mu.values
                            : name == "pi" ? &s.pi.values
                            : name == "u"  ? &s.u.u
                            : name == "v"  ? &s.u.v
                                           : nullptr;
        if (!a)
            throw std::runtime_error("unknown snapshot block '" + name + "'");
        const auto shape = b.at("shape");
        if (shape.at(0).get<Eigen::Index>() != a->rows() || shape.at(1).get<Eigen::Index>() != a->cols())
            throw std::runtime_error("snapshot block '" + name + "' has the wrong shape");
        bin.seekg(static_cast<std::streamoff>(b.at("offset").get<std::size_t>()));
        get_le(bin, a->data(), static_cast<std::size_t>(a->size()));
        if (!bin)
            throw std::runtime_error("snapshot data truncated in " + sidecar.string());
    }
    return s;
}

fs::path resolve_output_dir(const RunConfig& cfg)
{
    fs::path dir(cfg.output_dir);
    if (const char* root = std::getenv("MODELH_OUTPUT_ROOT"); root && *root && dir.is_relative())
        dir = fs::path(root) / dir;
    return dir;
}

void write_text(const fs::path& path, const std::string& text)
{
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out)
        throw std::runtime_error("cannot write " + path.string());
    out << text;
}

std::string read_text(const fs::path& path)
{
    std::ifstream in(path, std::ios::binary);
    if (!in)
        throw std::runtime_error("cannot read " + path.string());
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

} // namespace modelh::app
