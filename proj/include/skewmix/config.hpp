#pragma once

#include <fstream>
#include <sstream>
#include <string>

#include <nlohmann/json.hpp>

#include "skewmix/correlation.hpp"
#include "skewmix/examples.hpp"
#include "skewmix/map.hpp"

namespace skewmix {

using Json = nlohmann::json;

inline Json load_json_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw Error("cannot open " + path);
    Json j;
    try {
        in >> j;
    } catch (const std::exception& e) {
        throw Error("invalid JSON in " + path + ": " + e.what());
    }
    return j;
}

inline PiecewiseC2Map map_from_json(const Json& j, MapKind kind) {
    std::vector<double> bps = j.at("breakpoints").get<std::vector<double>>();
    std::vector<std::string> exprs = j.at("branches").get<std::vector<std::string>>();
    return make_map(bps, exprs, kind);
}

// Map config schema:
//   {"f": {"breakpoints": [...], "branches": ["...", ...]},
//    "tau": {"breakpoints": [...], "branches": [...]},
//    "validation_grid": 10000, "seed": 42}
// or {"example": "tripling_cos"} to use a bundled map.
struct MapConfig {
    SkewProduct sp;
    std::uint64_t seed = 42;
    Json raw;
};

inline MapConfig load_map_config(const std::string& path) {
    MapConfig cfg;
    cfg.raw = load_json_file(path);
    const Json& j = cfg.raw;
    cfg.seed = j.value("seed", std::uint64_t(42));
    BuildOptions opts;
    opts.validation_grid = j.value("validation_grid", std::size_t(10000));
    if (j.contains("example")) {
        cfg.sp = example_skew_product(j.at("example").get<std::string>(), opts);
        return cfg;
    }
    cfg.sp = build_skew_product(map_from_json(j.at("f"), MapKind::Circle),
                                map_from_json(j.at("tau"), MapKind::Real), opts);
    return cfg;
}

// Observable schema (one observable):
//   {"modes": [{"b": 1, "re": "cos(2*pi*x)", "im": "0"}, ...]}
// or sampled on a torus grid:
//   {"sample": {"N": 4096, "M": 1024, "B": 16, "values": [[row-major N x M]]}}
inline Observable2D observable_from_json(const Json& j, std::size_t N) {
    if (j.contains("modes")) {
        std::vector<ModeSpec> specs;
        for (const Json& m : j.at("modes")) {
            ModeSpec s;
            s.b = m.at("b").get<int>();
            s.re = m.at("re").get<std::string>();
            s.im = m.value("im", std::string());
            if (s.im == "0") s.im.clear();
            specs.push_back(std::move(s));
        }
        return observable_from_modes(N, specs);
    }
    if (j.contains("sample")) {
        const Json& s = j.at("sample");
        auto Ns = s.at("N").get<std::size_t>();
        auto Ms = s.at("M").get<std::size_t>();
        int B = s.at("B").get<int>();
        std::vector<std::vector<double>> vals =
            s.at("values").get<std::vector<std::vector<double>>>();
        if (vals.size() != Ns) throw Error("sample rows != N");
        for (const auto& row : vals)
            if (row.size() != Ms) throw Error("sample cols != M");
        auto fn = [&vals, Ns, Ms](double x, double u) {
            auto i = std::min(std::size_t(wrap01(x) * double(Ns)), Ns - 1);
            auto m = std::min(std::size_t(wrap01(u) * double(Ms)), Ms - 1);
            return vals[i][m];
        };
        return observable_from_function(Ns, Ms, B, fn);
    }
    throw Error("observable needs 'modes' or 'sample'");
}

// Observable-pair config: {"g": {...}, "h": {...}} ; "h" defaults to "g".
struct ObservablePair {
    Observable2D g;
    Observable2D h;
};

inline ObservablePair load_observables(const std::string& path, std::size_t N) {
    Json j = load_json_file(path);
    ObservablePair p;
    p.g = observable_from_json(j.at("g"), N);
    p.h = j.contains("h") ? observable_from_json(j.at("h"), N) : p.g;
    return p;
}

}  // namespace skewmix
