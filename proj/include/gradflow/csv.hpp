#pragma once

#include <string>
#include <vector>

namespace gradflow {

// Shortest round-trip decimal representation (locale-independent).
std::string format_double(double v);

struct FunctionalSeries {
    std::string name;
    std::vector<double> times;
    std::vector<double> values;

    void push(double t, double v) {
        times.push_back(t);
        values.push_back(v);
    }
    std::size_t size() const { return times.size(); }
};

void write_series_csv(const std::string& path, const FunctionalSeries& s);

}  // namespace gradflow
