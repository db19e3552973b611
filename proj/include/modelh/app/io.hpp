#ifndef MODELH_APP_IO_HPP
#define MODELH_APP_IO_HPP

#include <filesystem>
#include <fstream>
#include <initializer_list>
#include <string>
#include <vector>

#include "modelh/app/config.hpp"

namespace modelh::app {

/// CSV with a header row and 17-significant-digit reals.
class CsvWriter {
public:
    CsvWriter(const std::filesystem::path& path, std::vector<std::string> columns);
    void row(std::initializer_list<double> values);
    void row(const std::vector<double>& values);

private:
    std::ofstream out_;
    std::size_t ncols_;
};

extern const std::vector<std::string> energy_columns;
extern const std::vector<std::string> stability_columns;
extern const std::vector<std::string> regularity_columns;

/// Snapshot as raw little-endian float64 blocks (phi, mu, pi, u, v; x index
/// fastest) plus a JSON sidecar naming the blocks, their shapes and offsets.
/// Writes <dir>/<stem>.bin and <dir>/<stem>.json.
void write_snapshot(const std::filesystem::path& dir, const std::string& stem, const State<double>& s, long long step);

/// Reads a snapshot back from its sidecar path.
State<double> read_snapshot(const std::filesystem::path& sidecar);

/// Output directory of a run: cfg.output_dir, placed under $MODELH_OUTPUT_ROOT
/// when that is set and the directory is relative.
std::filesystem::path resolve_output_dir(const RunConfig& cfg);

void write_text(const std::filesystem::path& path, const std::string& text);
std::string read_text(const std::filesystem::path& path);

} // namespace modelh::app

#endif
