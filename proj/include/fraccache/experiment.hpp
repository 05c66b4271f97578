#pragma once

// Experiment sweeps and their CSV/JSON emission. Two table shapes:
//   alpha_profile   - one row per content, one alpha column per sweep value
//   quality_sweep   - long format, one row per (sweep value, optimisation
//                     distribution, evaluation distribution, policy)
// Doubles are printed with %.17g so re-reading a file reproduces the
// in-memory table exactly.

#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "fraccache/analytics.hpp"
#include "fraccache/config.hpp"
#include "fraccache/optimizer.hpp"
#include "fraccache/simulate.hpp"

namespace fraccache {

struct AlphaProfileTable {
    std::string axis;
    std::vector<double> sweep_values;
    std::vector<std::vector<double>> alpha; // [sweep value][content]

    bool operator==(const AlphaProfileTable&) const = default;
};

struct QualityRow {
    double sweep_value = 0.0;
    std::string policy_name; // waterfill | whole_content
    std::string opt_dist;
    std::string eval_dist;
    double analytic_objective = 0.0;
    double mc_mean = 0.0;
    double mc_stderr = 0.0;
    std::uint64_t n_trials = 0;
    std::uint64_t seed = 0;

    bool operator==(const QualityRow&) const = default;
};

struct QualitySweepTable {
    std::string axis;
    std::vector<QualityRow> rows;

    bool operator==(const QualitySweepTable&) const = default;
};

namespace detail {

inline std::string fmt(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

struct SweepPoint {
    ContentLibrary lib;
    ChannelParams ch;
    double mean_m;
};

inline SweepPoint sweep_point(const ExperimentConfig& cfg, double value) {
    std::optional<double> psi_db;
    double mean = cfg.mean_distance_m;
    if (cfg.sweep_axis == "snr_db")
        psi_db = value;
    else
        mean = value;
    return SweepPoint{cfg.content_library(), cfg.channel_params(psi_db), mean};
}

} // namespace detail

inline AlphaProfileTable run_alpha_profile(const ExperimentConfig& cfg) {
    AlphaProfileTable table;
    table.axis = cfg.sweep_axis;
    table.sweep_values = cfg.effective_sweep_values();
    for (double v : table.sweep_values) {
        auto pt = detail::sweep_point(cfg, v);
        const DistanceModel dist =
            cfg.sweep_axis == "mean_distance_m"
                ? cfg.distance_model_of_kind(cfg.distance_kind, pt.mean_m)
                : cfg.distance_model();
        table.alpha.push_back(waterfill(pt.lib, pt.ch, dist).alpha);
    }
    return table;
}

inline QualitySweepTable run_quality_sweep(const ExperimentConfig& cfg) {
    static const std::vector<std::string> kinds = {"fixed", "uniform_disk",
                                                   "poisson_disk"};
    static const std::vector<std::string> kind_labels = {"fixed", "uniform", "poisson"};

    QualitySweepTable table;
    table.axis = cfg.sweep_axis;
    std::uint64_t row_counter = 0;
    for (double v : cfg.effective_sweep_values()) {
        auto pt = detail::sweep_point(cfg, v);
        std::vector<DistanceModel> dists;
        for (const auto& k : kinds)
            dists.push_back(cfg.distance_model_of_kind(k, pt.mean_m));

        for (std::size_t oi = 0; oi < dists.size(); ++oi) {
            const CachingPolicy proposed = waterfill(pt.lib, pt.ch, dists[oi]);
            const CachingPolicy whole = baseline_whole_content(pt.lib, pt.ch, dists[oi]);
            for (std::size_t ei = 0; ei < dists.size(); ++ei) {
                auto add_row = [&](const std::string& name, const CachingPolicy& policy) {
                    const std::uint64_t row_seed =
                        detail::mix64(detail::mix64(cfg.seed) ^ (++row_counter));
                    const SimEstimate est = simulate_quality(
                        policy, dists[ei], pt.lib, pt.ch, cfg.n_trials, row_seed);
                    table.rows.push_back(QualityRow{
                        v, name, kind_labels[oi], kind_labels[ei],
                        policy_objective(policy, dists[ei], pt.lib, pt.ch), est.mean,
                        est.std_error, est.n_trials, est.seed});
                };
                add_row("waterfill", proposed);
                add_row("whole_content", whole);
            }
        }
    }
    return table;
}

// --- CSV ------------------------------------------------------------------

inline void write_alpha_profile_csv(const AlphaProfileTable& t, const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write " + path);
    out << "content_index";
    for (double v : t.sweep_values) out << ",alpha[" << t.axis << "=" << detail::fmt(v) << "]";
    out << "\n";
    const std::size_t F = t.alpha.empty() ? 0 : t.alpha.front().size();
    for (std::size_t i = 0; i < F; ++i) {
        out << (i + 1);
        for (const auto& col : t.alpha) out << "," << detail::fmt(col[i]);
        out << "\n";
    }
}

inline void write_quality_sweep_csv(const QualitySweepTable& t, const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write " + path);
    out << "experiment,sweep_value,content_index,policy_name,opt_dist,eval_dist,"
           "analytic_objective,mc_mean,mc_stderr,n_trials,seed\n";
    for (const auto& r : t.rows) {
        out << "quality_sweep," << detail::fmt(r.sweep_value) << ",," << r.policy_name
            << "," << r.opt_dist << "," << r.eval_dist << ","
            << detail::fmt(r.analytic_objective) << "," << detail::fmt(r.mc_mean) << ","
            << detail::fmt(r.mc_stderr) << "," << r.n_trials << "," << r.seed << "\n";
    }
}

namespace detail {

inline std::vector<std::string> split_csv_line(const std::string& line) {
    std::vector<std::string> cells;
    std::string cell;
    std::stringstream ss(line);
    while (std::getline(ss, cell, ',')) cells.push_back(cell);
    if (!line.empty() && line.back() == ',') cells.push_back("");
    return cells;
}

} // namespace detail

inline AlphaProfileTable read_alpha_profile_csv(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot read " + path);
    AlphaProfileTable t;
    std::string line;
    if (!std::getline(in, line)) return t;
    auto header = detail::split_csv_line(line);
    for (std::size_t c = 1; c < header.size(); ++c) {
        const auto& h = header[c]; // alpha[<axis>=<value>]
        const auto eq = h.find('=');
        t.axis = h.substr(6, eq - 6);
        t.sweep_values.push_back(std::strtod(h.c_str() + eq + 1, nullptr));
    }
    t.alpha.assign(t.sweep_values.size(), {});
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        auto cells = detail::split_csv_line(line);
        for (std::size_t c = 1; c < cells.size(); ++c)
            t.alpha[c - 1].push_back(std::strtod(cells[c].c_str(), nullptr));
    }
    return t;
}

inline QualitySweepTable read_quality_sweep_csv(const std::string& path,
                                                const std::string& axis = "") {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot read " + path);
    QualitySweepTable t;
    t.axis = axis;
    std::string line;
    std::getline(in, line); // header
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        auto c = detail::split_csv_line(line);
        QualityRow r;
        r.sweep_value = std::strtod(c[1].c_str(), nullptr);
        r.policy_name = c[3];
        r.opt_dist = c[4];
        r.eval_dist = c[5];
        r.analytic_objective = std::strtod(c[6].c_str(), nullptr);
        r.mc_mean = std::strtod(c[7].c_str(), nullptr);
        r.mc_stderr = std::strtod(c[8].c_str(), nullptr);
        r.n_trials = std::strtoull(c[9].c_str(), nullptr, 10);
        r.seed = std::strtoull(c[10].c_str(), nullptr, 10);
        t.rows.push_back(r);
    }
    return t;
}

// --- JSON -----------------------------------------------------------------

inline nlohmann::json to_json(const AlphaProfileTable& t) {
    return nlohmann::json{{"experiment", "alpha_profile"},
                          {"axis", t.axis},
                          {"sweep_values", t.sweep_values},
                          {"alpha", t.alpha}};
}

inline nlohmann::json to_json(const QualitySweepTable& t) {
    nlohmann::json rows = nlohmann::json::array();
    for (const auto& r : t.rows)
        rows.push_back({{"sweep_value", r.sweep_value},
                        {"policy_name", r.policy_name},
                        {"opt_dist", r.opt_dist},
                        {"eval_dist", r.eval_dist},
                        {"analytic_objective", r.analytic_objective},
                        {"mc_mean", r.mc_mean},
                        {"mc_stderr", r.mc_stderr},
                        {"n_trials", r.n_trials},
                        {"seed", r.seed}});
    return nlohmann::json{
        {"experiment", "quality_sweep"}, {"axis", t.axis}, {"rows", rows}};
}

template <class Table>
void write_json_file(const Table& t, const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write " + path);
    out << to_json(t).dump(2) << "\n";
}

// Write a table in every requested format under cfg.out_dir.
inline std::vector<std::string> emit(const AlphaProfileTable& t,
                                     const ExperimentConfig& cfg) {
    std::filesystem::create_directories(cfg.out_dir);
    std::vector<std::string> written;
    for (const auto& format : cfg.formats) {
        const std::string path = cfg.out_dir + "/alpha_profile." + format;
        if (format == "csv")
            write_alpha_profile_csv(t, path);
        else
            write_json_file(t, path);
        written.push_back(path);
    }
    return written;
}

inline std::vector<std::string> emit(const QualitySweepTable& t,
                                     const ExperimentConfig& cfg) {
    std::filesystem::create_directories(cfg.out_dir);
    std::vector<std::string> written;
    for (const auto& format : cfg.formats) {
        const std::string path = cfg.out_dir + "/quality_sweep." + format;
        if (format == "csv")
            write_quality_sweep_csv(t, path);
        else
            write_json_file(t, path);
        written.push_back(path);
    }
    return written;
}

} // namespace fraccache
