#include "gradflow/csv.hpp"

#include <charconv>
#include <fstream>
#include <stdexcept>

namespace gradflow {

std::string format_double(double v) {
    char buf[64];
    const auto res = std::to_chars(buf, buf + sizeof(buf), v);
    return std::string(buf, res.ptr);
}

void write_series_csv(const std::string& path, const FunctionalSeries& s) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot open " + path);
    out << "time,value\n";
    for (std::size_t i = 0; i < s.size(); ++i)
        out << format_double(s.times[i]) << "," << format_double(s.values[i]) << "\n";
    if (!out) throw std::runtime_error("write failed for " + path);
}

}  // namespace gradflow
