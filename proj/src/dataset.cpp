#include "mildnet/dataset.hpp"

#include <cstdlib>
#include <fstream>
#include <sstream>

#include "json.hpp"
#include "mildnet/util.hpp"

namespace mildnet {

namespace {

std::string sidecar_path(const std::string& path) { return path + ".sidecar.json"; }

nlohmann::ordered_json teacher_to_json(const Teacher& t) {
    nlohmann::ordered_json j;
    j["d"] = t.d;
    j["coeffs"] = t.coeffs;
    j["dirs"] = t.dirs;
    return j;
}

Teacher teacher_from_json(const nlohmann::json& j) {
    Teacher t;
    t.d = j.at("d").get<int>();
    t.coeffs = j.at("coeffs").get<std::vector<double>>();
    t.dirs = j.at("dirs").get<std::vector<double>>();
    return t;
}

}  // namespace

void save_dataset(const Dataset& data, const std::string& path) {
    check_dataset(data);
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot open '" + path + "' for writing");
    out << "# mildnet-dataset v1, d=" << data.d << ", n=" << data.n
        << ", gamma=" << fmt_full(data.gamma) << ", E=" << data.corrupt_count
        << ", seed=" << data.seed << "\n";
    for (int i = 0; i < data.n; ++i) {
        out << data.ys[static_cast<std::size_t>(i)];
        for (int k = 0; k < data.d; ++k) out << ',' << fmt_full(data.x(i)[k]);
        out << '\n';
    }
    if (!out) throw std::runtime_error("write failure on '" + path + "'");

    nlohmann::ordered_json side;
    side["format"] = "mildnet-dataset-sidecar v1";
    side["corrupted"] = data.corrupted;
    side["teacher"] = data.teacher ? teacher_to_json(*data.teacher) : nlohmann::ordered_json();
    side["vbar"] = data.vbar ? nlohmann::ordered_json(*data.vbar) : nlohmann::ordered_json();
    std::ofstream sout(sidecar_path(path));
    if (!sout) throw std::runtime_error("cannot open dataset sidecar for writing");
    sout << side.dump(2) << '\n';
}

Dataset load_dataset(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open '" + path + "'");
    std::string line;
    if (!std::getline(in, line)) throw parse_error("empty dataset file", 1);

    Dataset data;
    {
        // Header: "# mildnet-dataset v1, d=<d>, n=<n>, gamma=<g>, E=<E>, seed=<s>"
        const std::string magic = "# mildnet-dataset v1";
        if (line.rfind(magic, 0) != 0) throw parse_error("missing dataset header", 1);
        long long n = -1, e = -1;
        unsigned long long seed = 0;
        if (std::sscanf(line.c_str(), "# mildnet-dataset v1, d=%d, n=%lld, gamma=%lf, E=%lld, seed=%llu",
                        &data.d, &n, &data.gamma, &e, &seed) != 5)
            throw parse_error("malformed dataset header", 1);
        if (data.d < 1 || n < 0 || e < 0) throw parse_error("invalid header fields", 1);
        data.n = static_cast<int>(n);
        data.corrupt_count = static_cast<int>(e);
        data.seed = seed;
    }

    data.xs.reserve(static_cast<std::size_t>(data.n) * data.d);
    data.ys.reserve(static_cast<std::size_t>(data.n));
    long line_no = 1;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty()) continue;
        std::stringstream row(line);
        std::string cell;
        if (!std::getline(row, cell, ',')) throw parse_error("missing label", line_no);
        char* end = nullptr;
        const long label = std::strtol(cell.c_str(), &end, 10);
        if (end == cell.c_str() || (label != 1 && label != -1))
            throw parse_error("label must be +/-1", line_no);
        data.ys.push_back(static_cast<int>(label));
        int cols = 0;
        while (std::getline(row, cell, ',')) {
            const double v = std::strtod(cell.c_str(), &end);
            if (end == cell.c_str()) throw parse_error("malformed coordinate", line_no);
            data.xs.push_back(v);
            ++cols;
        }
        if (cols != data.d) throw parse_error("expected " + std::to_string(data.d) + " coordinates",
                                              line_no);
    }
    if (static_cast<int>(data.ys.size()) != data.n)
        throw parse_error("row count does not match header n", line_no);
    try {
        check_dataset(data);
    } catch (const std::exception& ex) {
        throw parse_error(ex.what(), line_no);
    }

    std::ifstream sin(sidecar_path(path));
    if (sin) {
        const nlohmann::json side = nlohmann::json::parse(sin);
        data.corrupted = side.value("corrupted", std::vector<int>{});
        if (side.contains("teacher") && !side["teacher"].is_null())
            data.teacher = teacher_from_json(side["teacher"]);
        if (side.contains("vbar") && !side["vbar"].is_null())
            data.vbar = side["vbar"].get<std::vector<double>>();
    }
    return data;
}

}  // namespace mildnet
