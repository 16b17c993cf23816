#pragma once

#include <cmath>
#include <cstdio>
#include <string>
#include <vector>

namespace mildnet {

// Shortest decimal form that round-trips a double exactly via strtod.
inline std::string fmt_full(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return std::string(buf);
}

inline double dot(const double* a, const double* b, int n) {
    double acc = 0.0;
    for (int k = 0; k < n; ++k) acc += a[k] * b[k];
    return acc;
}

inline double norm2(const double* a, int n) { return std::sqrt(dot(a, a, n)); }

inline double norm2(const std::vector<double>& a) {
    return norm2(a.data(), static_cast<int>(a.size()));
}

inline double norm_inf(const std::vector<double>& a) {
    double m = 0.0;
    for (double v : a) m = std::max(m, std::fabs(v));
    return m;
}

}  // namespace mildnet
