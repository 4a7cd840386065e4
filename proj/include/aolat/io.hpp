// Deterministic text output: CSV files (RFC-4180 style, header row, '.'
// decimal separator) and FNV-1a content hashes for run manifests.
#pragma once

#include <cstdint>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "aolat/energy.hpp"

namespace aolat {

inline std::string format_number(double x) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.12g", x);
    return buf;
}

inline std::uint64_t fnv1a64(const std::string& bytes) {
    std::uint64_t h = 1469598103934665603ull;
    for (unsigned char c : bytes) {
        h ^= c;
        h *= 1099511628211ull;
    }
    return h;
}

inline std::string hex64(std::uint64_t h) {
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
    return buf;
}

class CsvWriter {
  public:
    explicit CsvWriter(std::vector<std::string> header) : cols_(std::move(header)) {
        for (std::size_t i = 0; i < cols_.size(); ++i) body_ += (i ? "," : "") + cols_[i];
        body_ += "\n";
    }

    void row(const std::vector<std::string>& cells) {
        if (cells.size() != cols_.size()) throw std::invalid_argument("CsvWriter: column count mismatch");
        for (std::size_t i = 0; i < cells.size(); ++i) body_ += (i ? "," : "") + cells[i];
        body_ += "\n";
    }

    const std::string& str() const { return body_; }

    void write(const std::string& path) const {
        std::ofstream os(path, std::ios::binary);
        if (!os) throw std::runtime_error("cannot open " + path);
        os << body_;
    }

  private:
    std::vector<std::string> cols_;
    std::string body_;
};

inline std::string read_file(const std::string& path) {
    std::ifstream is(path, std::ios::binary);
    if (!is) throw std::runtime_error("cannot open " + path);
    std::ostringstream ss;
    ss << is.rdbuf();
    return ss.str();
}

}  // namespace aolat

namespace aolat {

// Form serialization: one row per canonical cell, ascending cell id, columns
// cell,c0,..,c{D-1}.  Text, so endianness never enters; golden files compare
// byte-for-byte.
template <int D>
inline std::string form_csv(const PForm<D>& u) {
    std::vector<std::string> header{"cell"};
    for (int i = 0; i < D; ++i) header.push_back("c" + std::to_string(i));
    CsvWriter csv(header);
    for (int c = 0; c < u.size(); ++c) {
        std::vector<std::string> row{std::to_string(c)};
        for (int i = 0; i < D; ++i) row.push_back(format_number(u.values[c][i]));
        csv.row(row);
    }
    return csv.str();
}

template <int D>
inline std::string form_csv(const LatForm<D>& u) {
    std::vector<std::string> header{"cell"};
    for (int i = 0; i < D; ++i) header.push_back("n" + std::to_string(i));
    CsvWriter csv(header);
    for (int c = 0; c < u.size(); ++c) {
        std::vector<std::string> row{std::to_string(c)};
        for (int i = 0; i < D; ++i) row.push_back(std::to_string(u.values[c][i]));
        csv.row(row);
    }
    return csv.str();
}

template <int D>
inline std::string relax_json(const RelaxResult<D>& r) {
    std::ostringstream os;
    os << "{\"energy\":" << format_number(r.energy) << ",\"iterations\":" << r.stats.iterations
       << ",\"relative_residual\":" << format_number(r.stats.relative_residual) << "}";
    return os.str();
}

template <int D>
inline std::string energy_report_json(const EnergyReport<D>& r) {
    std::ostringstream os;
    os << "{\"total\":" << format_number(r.total) << ",\"elastic\":" << format_number(r.elastic)
       << ",\"dislocation\":" << format_number(r.dislocation)
       << ",\"residual\":" << format_number(r.residual) << "}";
    return os.str();
}

}  // namespace aolat
