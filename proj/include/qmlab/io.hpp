#pragma once

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <string>
#include <vector>

namespace qmlab {

/// Shortest representation that round-trips a double exactly (%.17g).
std::string formatDouble(double v);

/// Minimal CSV emitter: one fixed header row, then data rows. Files are
/// opened in binary mode so output bytes are platform-independent.
class CsvWriter {
public:
    CsvWriter(const std::filesystem::path& path, const std::vector<std::string>& header);

    void writeRow(const std::vector<std::string>& fields);

private:
    std::ofstream out_;
    std::size_t columns_;
};

/// Binary P5 image, maxval 255: 0 = unvisited, 255 = visited. The first
/// pixel row is the top of the image, i.e. the cells with the largest
/// y-index.
void writePgm(const std::filesystem::path& path, int m, const std::vector<std::uint8_t>& cells);

std::string readFileBytes(const std::filesystem::path& path);

}  // namespace qmlab
