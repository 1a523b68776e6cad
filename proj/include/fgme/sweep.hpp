#pragma once

#include "fgme/config.hpp"
#include "fgme/effective.hpp"
#include "fgme/observables.hpp"
#include "fgme/version.hpp"

#include <nlohmann/json.hpp>

#include <atomic>
#include <chrono>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <thread>

namespace fgme {

inline constexpr double nan_value = std::numeric_limits<double>::quiet_NaN();

struct ResultRow {
    std::size_t index = 0;
    SystemSpec spec;
    int cutoff = 0;
    bool cutoff_converged = true;
    double solver_residual = nan_value;
    double min_eigenvalue = nan_value;
    // thermo_report
    double qdot_a = nan_value, qdot_b = nan_value, work = nan_value, work_direct = nan_value;
    double balance_residual = nan_value, relative_balance_residual = nan_value;
    std::string mode;
    double efficiency = nan_value, carnot = nan_value;
    // concurrence_profile
    double mean_concurrence = nan_value, entangled_fraction = nan_value;
    std::vector<std::pair<double, double>> profile;
    // floquet_spectrum
    std::array<double, 4> quasienergies{nan_value, nan_value, nan_value, nan_value};
    // effective_hamiltonian
    double lambda_eff = nan_value, coupling_scale_a = nan_value;

    std::string error; // empty on success
    bool ok() const { return error.empty(); }
};

struct Dataset {
    SweepConfig config;
    std::vector<ResultRow> rows;
    std::size_t error_rows() const {
        return std::size_t(std::count_if(rows.begin(), rows.end(), [](const auto& r) { return !r.ok(); }));
    }
};

// Cutoffs tried by "auto": 8, 12, ... up to the ceiling.
inline std::vector<int> auto_cutoffs(int ceiling) {
    std::vector<int> c;
    for (int v = 8; v < ceiling; v += 4) c.push_back(v);
    c.push_back(ceiling);
    return c;
}

inline ResultRow evaluate_point(const SweepConfig& cfg, const SystemSpec& spec, std::size_t index) {
    ResultRow row;
    row.index = index;
    row.spec = spec;
    try {
        PointSolution p;
        if (cfg.auto_cutoff) {
            std::vector<PointSolution> kept;
            const auto rep = convergence_study(spec, auto_cutoffs(cfg.auto_ceiling), 1e-8, true, &kept);
            if (kept.empty()) throw SolverError(rep.rows.empty() ? "auto cutoff: no solution" : rep.rows.back().error);
            row.cutoff_converged = rep.converged_cutoff.has_value();
            const int want = rep.converged_cutoff.value_or(kept.back().sambe.cutoff);
            p = *std::find_if(kept.begin(), kept.end(), [&](const auto& s) { return s.sambe.cutoff == want; });
        } else {
            SambeConfig sc;
            sc.cutoff = cfg.cutoff;
            p = solve_point(spec, sc);
        }
        row.cutoff = p.sambe.cutoff;
        row.solver_residual = p.state.residual;
        row.min_eigenvalue = p.state.min_eigenvalue;
        if (cfg.observables.floquet_spectrum) row.quasienergies = p.floquet().quasienergies;
        if (cfg.observables.effective_hamiltonian) {
            const auto eff = effective_hamiltonian(spec);
            row.lambda_eff = eff.lambda_eff;
            row.coupling_scale_a = eff.coupling_scale_a;
        }
        if (cfg.observables.concurrence_profile) {
            const auto prof = concurrence_profile(p.state, cfg.profile_samples);
            row.mean_concurrence = prof.mean;
            row.entangled_fraction = prof.entangled_fraction;
            row.profile = prof.samples;
        }
        if (cfg.observables.thermo_report) {
            const auto tr = thermo_report(p, cfg.deadband);
            row.qdot_a = tr.qdot_a_avg;
            row.qdot_b = tr.qdot_b_avg;
            row.work = tr.work_avg;
            row.work_direct = tr.work_avg_direct;
            row.balance_residual = tr.balance_residual;
            row.relative_balance_residual = std::abs(tr.balance_residual) / std::max(std::abs(tr.qdot_a_avg), 1e-12);
            row.mode = to_string(tr.mode);
            row.efficiency = tr.efficiency.value_or(nan_value);
            row.carnot = tr.carnot;
        }
    } catch (const std::exception& e) {
        row.error = e.what();
    }
    return row;
}

namespace detail {

inline void ensure_writable_dir(const std::string& dir) {
    namespace fs = std::filesystem;
    std::error_code ec;
    fs::create_directories(dir, ec);
    if (ec) throw std::runtime_error(dir + ": cannot create output directory (" + ec.message() + ")");
    const fs::path probe = fs::path(dir) / ".fgme_write_probe";
    {
        std::ofstream f(probe);
        if (!f) throw std::runtime_error(dir + ": output directory is not writable");
    }
    fs::remove(probe, ec);
}

} // namespace detail

// Evaluates every grid point; rows come back in grid order whatever the thread count.
// When check_output is set the output directory is verified before any computation.
inline Dataset run_sweep(const SweepConfig& cfg, bool check_output = true) {
    if (check_output) detail::ensure_writable_dir(cfg.output_path);
    const auto grid = cfg.grid();
    Dataset ds;
    ds.config = cfg;
    ds.rows.resize(grid.size());
    std::atomic<std::size_t> next{0};
    auto worker = [&] {
        for (std::size_t i = next++; i < grid.size(); i = next++) ds.rows[i] = evaluate_point(cfg, grid[i], i);
    };
    const int nt = std::max(1, std::min<int>(cfg.threads, int(grid.size())));
    if (nt == 1) {
        worker();
    } else {
        std::vector<std::thread> pool;
        for (int t = 0; t < nt; ++t) pool.emplace_back(worker);
        for (auto& th : pool) th.join();
    }
    return ds;
}

// ---- emit ----

inline const std::vector<std::string>& csv_columns() {
    static const std::vector<std::string> cols{
        "index",        "drive_amplitude",  "drive_frequency",   "temperature_a",  "temperature_b",
        "cutoff",       "cutoff_converged", "solver_residual",   "min_eigenvalue", "qdot_a",
        "qdot_b",       "work",             "work_direct",       "balance_residual", "relative_balance_residual",
        "mode",         "efficiency",       "carnot",            "mean_concurrence", "entangled_fraction",
        "quasienergy_0", "quasienergy_1",   "quasienergy_2",     "quasienergy_3",  "lambda_eff",
        "coupling_scale_a", "status",       "error"};
    return cols;
}

inline const std::vector<std::string>& profile_columns() {
    static const std::vector<std::string> cols{"index", "t", "concurrence"};
    return cols;
}

inline std::string format_double(double v) {
    if (std::isnan(v)) return "";
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

namespace detail {

inline std::string csv_escape(const std::string& s) {
    if (s.find_first_of(",\"\n") == std::string::npos) return s;
    std::string out = "\"";
    for (char ch : s) {
        if (ch == '"') out += '"';
        out += ch == '\n' ? ' ' : ch;
    }
    return out + "\"";
}

inline std::vector<std::string> row_cells(const ResultRow& r) {
    return {std::to_string(r.index),
            format_double(r.spec.drive_amplitude),
            format_double(r.spec.drive_frequency),
            format_double(r.spec.bath_a.temperature),
            format_double(r.spec.bath_b.temperature),
            r.ok() ? std::to_string(r.cutoff) : "",
            r.ok() ? (r.cutoff_converged ? "1" : "0") : "",
            format_double(r.solver_residual),
            format_double(r.min_eigenvalue),
            format_double(r.qdot_a),
            format_double(r.qdot_b),
            format_double(r.work),
            format_double(r.work_direct),
            format_double(r.balance_residual),
            format_double(r.relative_balance_residual),
            r.mode,
            format_double(r.efficiency),
            format_double(r.carnot),
            format_double(r.mean_concurrence),
            format_double(r.entangled_fraction),
            format_double(r.quasienergies[0]),
            format_double(r.quasienergies[1]),
            format_double(r.quasienergies[2]),
            format_double(r.quasienergies[3]),
            format_double(r.lambda_eff),
            format_double(r.coupling_scale_a),
            r.ok() ? "ok" : "error",
            csv_escape(r.error)};
}

inline void write_file(const std::filesystem::path& path, const std::string& content) {
    std::ofstream f(path, std::ios::binary);
    if (!f) throw std::runtime_error(path.string() + ": cannot open for writing");
    f << content;
    if (!f) throw std::runtime_error(path.string() + ": write failed");
}

inline nlohmann::ordered_json json_number(double v) { return std::isnan(v) ? nlohmann::ordered_json(nullptr) : nlohmann::ordered_json(v); }

inline std::string utc_timestamp() {
    const std::time_t now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
    std::tm tm{};
    gmtime_r(&now, &tm);
    char buf[32];
    std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
    return buf;
}

} // namespace detail

inline std::string to_csv(const Dataset& ds) {
    std::string out;
    const auto& cols = csv_columns();
    for (std::size_t i = 0; i < cols.size(); ++i) out += (i ? "," : "") + cols[i];
    out += "\n";
    for (const auto& r : ds.rows) {
        const auto cells = detail::row_cells(r);
        for (std::size_t i = 0; i < cells.size(); ++i) out += (i ? "," : "") + cells[i];
        out += "\n";
    }
    return out;
}

inline std::string profile_to_csv(const Dataset& ds) {
    std::string out = "index,t,concurrence\n";
    for (const auto& r : ds.rows)
        for (const auto& [t, c] : r.profile) out += std::to_string(r.index) + "," + format_double(t) + "," + format_double(c) + "\n";
    return out;
}

struct ResidualStats {
    double max_solver_residual = 0.0;
    double max_abs_balance_residual = 0.0;
    double max_relative_balance_residual = 0.0;
    std::size_t error_rows = 0;
};

inline ResidualStats residual_stats(const Dataset& ds) {
    ResidualStats s;
    for (const auto& r : ds.rows) {
        if (!r.ok()) {
            ++s.error_rows;
            continue;
        }
        s.max_solver_residual = std::max(s.max_solver_residual, r.solver_residual);
        if (!std::isnan(r.balance_residual)) {
            s.max_abs_balance_residual = std::max(s.max_abs_balance_residual, std::abs(r.balance_residual));
            s.max_relative_balance_residual = std::max(s.max_relative_balance_residual, r.relative_balance_residual);
        }
    }
    return s;
}

inline nlohmann::ordered_json to_json(const Dataset& ds, const std::string& timestamp) {
    using nlohmann::ordered_json;
    ordered_json meta;
    meta["code_version"] = version;
    meta["generated_at"] = timestamp;
    ordered_json echo = ordered_json::object();
    for (const auto& [k, v] : config_echo(ds.config)) echo[k] = v;
    meta["config"] = echo;
    meta["cutoff"] = ds.config.auto_cutoff ? ordered_json("auto") : ordered_json(ds.config.cutoff);
    const auto st = residual_stats(ds);
    meta["residuals"] = {{"max_solver_residual", st.max_solver_residual},
                         {"max_abs_balance_residual", st.max_abs_balance_residual},
                         {"max_relative_balance_residual", st.max_relative_balance_residual},
                         {"error_rows", st.error_rows}};
    meta["columns"] = csv_columns();

    ordered_json rows = ordered_json::array();
    ordered_json profile = ordered_json::array();
    for (const auto& r : ds.rows) {
        ordered_json j;
        j["index"] = r.index;
        j["drive_amplitude"] = r.spec.drive_amplitude;
        j["drive_frequency"] = r.spec.drive_frequency;
        j["temperature_a"] = r.spec.bath_a.temperature;
        j["temperature_b"] = r.spec.bath_b.temperature;
        j["cutoff"] = r.ok() ? ordered_json(r.cutoff) : ordered_json(nullptr);
        j["cutoff_converged"] = r.ok() ? ordered_json(r.cutoff_converged) : ordered_json(nullptr);
        j["solver_residual"] = detail::json_number(r.solver_residual);
        j["min_eigenvalue"] = detail::json_number(r.min_eigenvalue);
        j["qdot_a"] = detail::json_number(r.qdot_a);
        j["qdot_b"] = detail::json_number(r.qdot_b);
        j["work"] = detail::json_number(r.work);
        j["work_direct"] = detail::json_number(r.work_direct);
        j["balance_residual"] = detail::json_number(r.balance_residual);
        j["relative_balance_residual"] = detail::json_number(r.relative_balance_residual);
        j["mode"] = r.mode.empty() ? ordered_json(nullptr) : ordered_json(r.mode);
        j["efficiency"] = detail::json_number(r.efficiency);
        j["carnot"] = detail::json_number(r.carnot);
        j["mean_concurrence"] = detail::json_number(r.mean_concurrence);
        j["entangled_fraction"] = detail::json_number(r.entangled_fraction);
        for (std::size_t q = 0; q < 4; ++q) j["quasienergy_" + std::to_string(q)] = detail::json_number(r.quasienergies[q]);
        j["lambda_eff"] = detail::json_number(r.lambda_eff);
        j["coupling_scale_a"] = detail::json_number(r.coupling_scale_a);
        j["status"] = r.ok() ? "ok" : "error";
        j["error"] = r.error;
        rows.push_back(j);
        for (const auto& [t, c] : r.profile) profile.push_back({{"index", r.index}, {"t", t}, {"concurrence", c}});
    }
    ordered_json doc;
    doc["metadata"] = meta;
    doc["rows"] = rows;
    doc["concurrence_profile"] = profile;
    return doc;
}

// Writes <dir>/<name>.csv (+ <name>_profile.csv) or <dir>/<name>.json; returns the paths written.
inline std::vector<std::filesystem::path> emit(const Dataset& ds, OutputFormat format, const std::string& dir,
                                               const std::string& timestamp = detail::utc_timestamp()) {
    if (ds.rows.empty()) throw std::invalid_argument("emit: dataset is empty");
    detail::ensure_writable_dir(dir);
    const std::filesystem::path base = std::filesystem::path(dir) / ds.config.output_name;
    std::vector<std::filesystem::path> written;
    if (format == OutputFormat::csv) {
        auto main = base;
        main += ".csv";
        detail::write_file(main, to_csv(ds));
        written.push_back(main);
        if (ds.config.observables.concurrence_profile) {
            auto prof = base;
            prof += "_profile.csv";
            detail::write_file(prof, profile_to_csv(ds));
            written.push_back(prof);
        }
    } else {
        auto js = base;
        js += ".json";
        detail::write_file(js, to_json(ds, timestamp).dump(2) + "\n");
        written.push_back(js);
    }
    return written;
}

} // namespace fgme
