#pragma once

// JSON experiment configuration. A missing or empty file means "all
// defaults"; unknown keys are rejected so typos cannot silently fall back
// to a default. Default values reproduce the reference operating point:
// F=20 Zipf(1) catalogue, q in [0.2, 1] Mbps, M = 5.2 Mbit (650 kB at
// 8 bit/byte), 5 MHz, SNR 25 dB, INR 5 dB, beta 3, T = A = 1 s, mean
// distance 40 m.

#include <cctype>
#include <cstdint>
#include <fstream>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "fraccache/channel.hpp"
#include "fraccache/content.hpp"
#include "fraccache/distance.hpp"

namespace fraccache {

class config_error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

struct ExperimentConfig {
    // library
    std::size_t F = 20;
    double zipf_exponent = 1.0;
    double q_min = 0.2; // Mbps
    double q_max = 1.0; // Mbps
    double A = 1.0;     // s
    double T = 1.0;     // s
    double M = 5.2;     // Mbit

    // channel
    double psi_db = 25.0;
    double upsilon_db = 5.0;
    double bandwidth_mhz = 5.0;
    double beta = 3.0;
    double r0_m = 1.0;

    // distance
    std::string distance_kind = "fixed"; // fixed | uniform_disk | poisson_disk | tabulated
    double mean_distance_m = 40.0;
    std::optional<double> fixed_r_m;
    std::optional<double> disk_R_m;
    double poisson_intensity_per_m2 = 0.002;
    std::vector<std::pair<double, double>> tabulated_samples;

    // sweep
    std::string sweep_axis = "snr_db"; // snr_db | mean_distance_m
    std::vector<double> sweep_values;  // empty -> axis default grid

    // sim
    std::uint64_t n_trials = 100000;
    std::uint64_t seed = 1;

    // output
    std::string out_dir = "out";
    std::vector<std::string> formats = {"csv"};

    ContentLibrary content_library() const {
        return ContentLibrary(zipf_popularity(F, zipf_exponent), q_min, q_max, A, T, M);
    }

    ChannelParams channel_params(std::optional<double> psi_db_override = {}) const {
        return ChannelParams::from_db(psi_db_override.value_or(psi_db), upsilon_db,
                                      bandwidth_mhz, beta, r0_m);
    }

    // Mean-distance mapping: fixed r = E[r]; disk R = 3/2 E[r] (E[r] = 2R/3).
    DistanceModel distance_model_of_kind(const std::string& kind, double mean_m) const {
        if (kind == "fixed") return DistanceModel(FixedDistance{mean_m});
        if (kind == "uniform_disk") return DistanceModel(UniformDisk{1.5 * mean_m});
        if (kind == "poisson_disk")
            return DistanceModel(PoissonDisk{poisson_intensity_per_m2, 1.5 * mean_m});
        throw config_error("distance.kind '" + kind + "' cannot be built from a mean distance");
    }

    DistanceModel distance_model(std::optional<double> mean_override = {}) const {
        if (distance_kind == "tabulated") {
            if (mean_override)
                throw config_error("distance.kind 'tabulated' does not support mean-distance sweeps");
            return DistanceModel(TabulatedPdf{tabulated_samples});
        }
        if (!mean_override) {
            if (distance_kind == "fixed" && fixed_r_m)
                return DistanceModel(FixedDistance{*fixed_r_m});
            if (distance_kind == "uniform_disk" && disk_R_m)
                return DistanceModel(UniformDisk{*disk_R_m});
            if (distance_kind == "poisson_disk" && disk_R_m)
                return DistanceModel(PoissonDisk{poisson_intensity_per_m2, *disk_R_m});
        }
        return distance_model_of_kind(distance_kind, mean_override.value_or(mean_distance_m));
    }

    std::vector<double> effective_sweep_values() const {
        if (!sweep_values.empty()) return sweep_values;
        if (sweep_axis == "snr_db") return {10.0, 15.0, 20.0, 25.0, 30.0, 35.0};
        return {20.0, 30.0, 40.0, 50.0, 60.0, 80.0};
    }
};

namespace detail {

// Tracks which keys of a JSON object were consumed; leftovers are errors.
class JsonBlock {
public:
    JsonBlock(const nlohmann::json& j, std::string name) : name_(std::move(name)) {
        if (!j.is_object()) throw config_error(name_ + " must be a JSON object");
        remaining_ = j;
    }

    bool has(const std::string& key) const { return remaining_.contains(key); }

    template <class T>
    void read(const std::string& key, T& out) {
        if (!remaining_.contains(key)) return;
        try {
            out = remaining_.at(key).get<T>();
        } catch (const nlohmann::json::exception&) {
            throw config_error(name_ + "." + key + " has the wrong type");
        }
        remaining_.erase(key);
    }

    nlohmann::json take(const std::string& key) {
        nlohmann::json j = remaining_.at(key);
        remaining_.erase(key);
        return j;
    }

    void finish() const {
        if (!remaining_.empty())
            throw config_error("unknown key " + name_ + "." + remaining_.begin().key());
    }

private:
    std::string name_;
    nlohmann::json remaining_;
};

inline void require(bool ok, const std::string& what) {
    if (!ok) throw config_error(what);
}

} // namespace detail

inline ExperimentConfig config_from_json(const nlohmann::json& root) {
    if (!root.is_object()) throw config_error("config root must be a JSON object");
    ExperimentConfig cfg;

    detail::JsonBlock top(root, "config");
    if (top.has("library")) {
        detail::JsonBlock b(top.take("library"), "library");
        b.read("F", cfg.F);
        b.read("zipf_exponent", cfg.zipf_exponent);
        b.read("q_min", cfg.q_min);
        b.read("q_max", cfg.q_max);
        b.read("A", cfg.A);
        b.read("T", cfg.T);
        const bool has_m = b.has("M"), has_kb = b.has("M_kbyte");
        detail::require(!(has_m && has_kb), "library.M and library.M_kbyte are exclusive");
        b.read("M", cfg.M);
        if (has_kb) {
            double kb = 0.0;
            b.read("M_kbyte", kb);
            cfg.M = kb * 8.0 / 1000.0; // 1 kB = 8 kbit
        }
        b.finish();
    }
    if (top.has("channel")) {
        detail::JsonBlock b(top.take("channel"), "channel");
        b.read("psi_db", cfg.psi_db);
        b.read("upsilon_db", cfg.upsilon_db);
        b.read("bandwidth_mhz", cfg.bandwidth_mhz);
        b.read("beta", cfg.beta);
        b.read("r0_m", cfg.r0_m);
        b.finish();
    }
    if (top.has("distance")) {
        detail::JsonBlock b(top.take("distance"), "distance");
        b.read("kind", cfg.distance_kind);
        const bool has_mean = b.has("mean_distance_m");
        b.read("mean_distance_m", cfg.mean_distance_m);
        if (b.has("r_m")) {
            double r = 0.0;
            b.read("r_m", r);
            detail::require(!has_mean, "distance.r_m and distance.mean_distance_m are exclusive");
            detail::require(cfg.distance_kind == "fixed",
                            "distance.r_m only applies to kind 'fixed'");
            cfg.fixed_r_m = r;
            cfg.mean_distance_m = r;
        }
        if (b.has("R_m")) {
            double R = 0.0;
            b.read("R_m", R);
            detail::require(!has_mean, "distance.R_m and distance.mean_distance_m are exclusive");
            detail::require(cfg.distance_kind == "uniform_disk" ||
                                cfg.distance_kind == "poisson_disk",
                            "distance.R_m only applies to the disk kinds");
            cfg.disk_R_m = R;
            cfg.mean_distance_m = 2.0 * R / 3.0;
        }
        b.read("intensity_per_m2", cfg.poisson_intensity_per_m2);
        if (b.has("samples")) {
            detail::require(cfg.distance_kind == "tabulated",
                            "distance.samples only applies to kind 'tabulated'");
            nlohmann::json s = b.take("samples");
            detail::require(s.is_array(), "distance.samples must be an array of [r, density]");
            for (const auto& row : s) {
                detail::require(row.is_array() && row.size() == 2,
                                "distance.samples entries must be [r, density]");
                cfg.tabulated_samples.emplace_back(row[0].get<double>(),
                                                   row[1].get<double>());
            }
        }
        b.finish();
    }
    if (top.has("sweep")) {
        detail::JsonBlock b(top.take("sweep"), "sweep");
        b.read("axis", cfg.sweep_axis);
        b.read("values", cfg.sweep_values);
        b.finish();
    }
    if (top.has("sim")) {
        detail::JsonBlock b(top.take("sim"), "sim");
        b.read("n_trials", cfg.n_trials);
        b.read("seed", cfg.seed);
        b.finish();
    }
    if (top.has("output")) {
        detail::JsonBlock b(top.take("output"), "output");
        b.read("directory", cfg.out_dir);
        b.read("formats", cfg.formats);
        b.finish();
    }
    top.finish();

    using detail::require;
    require(cfg.F >= 1, "library.F must be >= 1");
    require(cfg.zipf_exponent >= 0.0, "library.zipf_exponent must be >= 0");
    require(cfg.q_min > 0.0, "library.q_min must be > 0");
    require(cfg.q_max >= cfg.q_min, "library.q_max must be >= q_min");
    require(cfg.A > 0.0, "library.A must be > 0");
    require(cfg.T > 0.0, "library.T must be > 0");
    require(cfg.M >= 0.0, "library.M must be >= 0");
    require(cfg.bandwidth_mhz > 0.0, "channel.bandwidth_mhz must be > 0");
    require(cfg.beta > 0.0, "channel.beta must be > 0");
    require(cfg.r0_m > 0.0, "channel.r0_m must be > 0");
    require(cfg.distance_kind == "fixed" || cfg.distance_kind == "uniform_disk" ||
                cfg.distance_kind == "poisson_disk" || cfg.distance_kind == "tabulated",
            "distance.kind must be fixed|uniform_disk|poisson_disk|tabulated");
    require(cfg.distance_kind != "tabulated" || cfg.tabulated_samples.size() >= 2,
            "distance.samples required for kind 'tabulated'");
    require(cfg.mean_distance_m > 0.0, "distance.mean_distance_m must be > 0");
    require(cfg.poisson_intensity_per_m2 > 0.0, "distance.intensity_per_m2 must be > 0");
    require(cfg.sweep_axis == "snr_db" || cfg.sweep_axis == "mean_distance_m",
            "sweep.axis must be snr_db|mean_distance_m");
    for (double v : cfg.sweep_values)
        require(cfg.sweep_axis != "mean_distance_m" || v > 0.0,
                "sweep.values must be > 0 for a distance sweep");
    require(cfg.n_trials >= 1, "sim.n_trials must be >= 1");
    for (const auto& f : cfg.formats)
        require(f == "csv" || f == "json", "output.formats entries must be csv|json");
    require(!cfg.formats.empty(), "output.formats must not be empty");
    return cfg;
}

inline ExperimentConfig parse_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw config_error("cannot open config file: " + path);
    std::stringstream buf;
    buf << in.rdbuf();
    std::string text = buf.str();
    const bool blank = text.find_first_not_of(" \t\r\n") == std::string::npos;
    if (blank) return ExperimentConfig{}; // empty file -> all defaults
    nlohmann::json root;
    try {
        root = nlohmann::json::parse(text);
    } catch (const nlohmann::json::parse_error& e) {
        throw config_error(std::string("malformed JSON: ") + e.what());
    }
    return config_from_json(root);
}

} // namespace fraccache
