#include "qmlab/io.hpp"

#include <cstdio>
#include <sstream>
#include <stdexcept>

namespace qmlab {

std::string formatDouble(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

CsvWriter::CsvWriter(const std::filesystem::path& path, const std::vector<std::string>& header)
    : out_(path, std::ios::binary), columns_(header.size()) {
    if (!out_) {
        throw std::runtime_error("CsvWriter: cannot open " + path.string());
    }
    writeRow(header);
}

void CsvWriter::writeRow(const std::vector<std::string>& fields) {
    if (fields.size() != columns_) {
        throw std::runtime_error("CsvWriter: row width mismatch");
    }
    for (std::size_t i = 0; i < fields.size(); ++i) {
        if (i > 0) {
            out_ << ',';
        }
        out_ << fields[i];
    }
    out_ << '\n';
}

void writePgm(const std::filesystem::path& path, int m, const std::vector<std::uint8_t>& cells) {
    if (cells.size() != static_cast<std::size_t>(m) * m) {
        throw std::runtime_error("writePgm: cell count does not match m*m");
    }
    std::ofstream out(path, std::ios::binary);
    if (!out) {
        throw std::runtime_error("writePgm: cannot open " + path.string());
    }
    out << "P5\n" << m << " " << m << "\n255\n";
    for (int row = 0; row < m; ++row) {
        const int iy = m - 1 - row;
        for (int ix = 0; ix < m; ++ix) {
            out.put(cells[static_cast<std::size_t>(iy) * m + ix] ? static_cast<char>(255)
                                                                 : static_cast<char>(0));
        }
    }
}

std::string readFileBytes(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw std::runtime_error("readFileBytes: cannot open " + path.string());
    }
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

}  // namespace qmlab
