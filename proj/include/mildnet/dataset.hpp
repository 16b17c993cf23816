#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "mildnet/errors.hpp"
#include "mildnet/network.hpp"

namespace mildnet {

// Labeled sample living in the closed unit ball, plus the provenance needed
// to audit how it was produced (margin, corrupted labels, seed, teacher).
struct Dataset {
    int d = 0;
    int n = 0;
    std::vector<double> xs;  // n x d row-major
    std::vector<int> ys;     // entries in {-1, +1}

    double gamma = 0.0;            // certified margin of the generator, 0 if unknown
    int corrupt_count = 0;         // number of flipped labels (E)
    std::uint64_t seed = 0;        // generator seed, 0 if not generated
    std::vector<int> corrupted;    // sorted indices of flipped labels
    std::optional<Teacher> teacher;           // generating teacher, if any
    std::optional<std::vector<double>> vbar;  // linear-margin direction, if any

    const double* x(int i) const { return xs.data() + static_cast<std::size_t>(i) * d; }
    double* x(int i) { return xs.data() + static_cast<std::size_t>(i) * d; }
};

inline void check_dataset(const Dataset& data) {
    if (data.n < 0 || data.d < 1) throw shape_error("dataset must have d >= 1 and n >= 0");
    if (data.xs.size() != static_cast<std::size_t>(data.n) * data.d)
        throw shape_error("dataset xs size != n*d");
    if (static_cast<int>(data.ys.size()) != data.n) throw shape_error("dataset ys size != n");
    for (int i = 0; i < data.n; ++i) {
        if (data.ys[static_cast<std::size_t>(i)] != 1 && data.ys[static_cast<std::size_t>(i)] != -1)
            throw contract_error("dataset labels must be +/-1");
        double nrm = 0.0;
        for (int k = 0; k < data.d; ++k) nrm += data.x(i)[k] * data.x(i)[k];
        require(nrm <= 1.0 + 1e-12, "dataset point " + std::to_string(i) + " outside unit ball");
    }
}

// CSV with a metadata header line and one "y,x1,...,xd" row per sample; the
// sidecar JSON written next to it carries teacher and corruption provenance.
void save_dataset(const Dataset& data, const std::string& path);
Dataset load_dataset(const std::string& path);

}  // namespace mildnet
