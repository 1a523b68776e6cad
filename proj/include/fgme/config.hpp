#pragma once

#include "fgme/model.hpp"

#include <charconv>
#include <map>
#include <set>

namespace fgme {

class ConfigError : public std::runtime_error {
public:
    ConfigError(const std::string& key, const std::string& msg) : std::runtime_error(key + ": " + msg), key_(key) {}
    const std::string& key() const { return key_; }

private:
    std::string key_;
};

enum class AxisParameter { drive_amplitude, drive_frequency, temperature_a, temperature_b, delta_t };
enum class AxisScale { linear, log };
enum class OutputFormat { csv, json };

inline const char* to_string(AxisParameter p) {
    switch (p) {
    case AxisParameter::drive_amplitude: return "drive_amplitude";
    case AxisParameter::drive_frequency: return "drive_frequency";
    case AxisParameter::temperature_a: return "temperature_a";
    case AxisParameter::temperature_b: return "temperature_b";
    case AxisParameter::delta_t: return "delta_t";
    }
    return "";
}

struct SweepAxis {
    AxisParameter parameter = AxisParameter::drive_amplitude;
    double start = 0.0;
    double stop = 0.0;
    int points = 2;
    AxisScale scale = AxisScale::linear;

    std::vector<double> values() const {
        std::vector<double> v(static_cast<std::size_t>(points));
        for (int j = 0; j < points; ++j) {
            const double f = double(j) / (points - 1);
            v[std::size_t(j)] = scale == AxisScale::linear ? start + f * (stop - start)
                                                           : std::exp(std::log(start) + f * (std::log(stop) - std::log(start)));
        }
        v.front() = start;
        v.back() = stop;
        return v;
    }
};

// Apply an axis value to a spec. delta_t sets T_A = T_B + value.
inline void apply_axis(SystemSpec& s, AxisParameter p, double v) {
    switch (p) {
    case AxisParameter::drive_amplitude: s.drive_amplitude = v; break;
    case AxisParameter::drive_frequency: s.drive_frequency = v; break;
    case AxisParameter::temperature_a: s.bath_a.temperature = v; break;
    case AxisParameter::temperature_b: s.bath_b.temperature = v; break;
    case AxisParameter::delta_t: s.bath_a.temperature = s.bath_b.temperature + v; break;
    }
}

struct Observables {
    bool thermo_report = true;
    bool concurrence_profile = true;
    bool floquet_spectrum = false;
    bool effective_hamiltonian = false;
};

struct SweepConfig {
    SystemSpec base;
    std::vector<SweepAxis> axes; // at most 2
    int cutoff = 12;             // ignored when auto_cutoff
    bool auto_cutoff = false;
    int auto_ceiling = 24;
    Observables observables;
    int profile_samples = 64;
    double deadband = 1e-12;
    std::string output_path = "results";
    std::string output_name = "dataset";
    OutputFormat format = OutputFormat::csv;
    int threads = 1;

    // grid in row-major order, first axis outermost
    std::vector<SystemSpec> grid() const {
        std::vector<SystemSpec> out;
        if (axes.empty()) return {base};
        const auto xs = axes[0].values();
        const std::vector<double> ys = axes.size() > 1 ? axes[1].values() : std::vector<double>{};
        for (double x : xs) {
            if (ys.empty()) {
                SystemSpec s = base;
                apply_axis(s, axes[0].parameter, x);
                out.push_back(s);
                continue;
            }
            for (double y : ys) {
                SystemSpec s = base;
                apply_axis(s, axes[0].parameter, x);
                apply_axis(s, axes[1].parameter, y);
                out.push_back(s);
            }
        }
        return out;
    }
};

namespace detail {

inline std::string trim(std::string_view s) {
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string_view::npos) return {};
    const auto e = s.find_last_not_of(" \t\r");
    return std::string(s.substr(b, e - b + 1));
}

inline double parse_double(const std::string& key, const std::string& v) {
    double out = 0.0;
    const char* end = v.data() + v.size();
    auto [ptr, ec] = std::from_chars(v.data(), end, out);
    if (ec != std::errc() || ptr != end || !std::isfinite(out)) throw ConfigError(key, "expected a finite number, got '" + v + "'");
    return out;
}

inline int parse_int(const std::string& key, const std::string& v) {
    int out = 0;
    const char* end = v.data() + v.size();
    auto [ptr, ec] = std::from_chars(v.data(), end, out);
    if (ec != std::errc() || ptr != end) throw ConfigError(key, "expected an integer, got '" + v + "'");
    return out;
}

inline std::vector<std::string> split_list(const std::string& v) {
    std::vector<std::string> out;
    std::size_t pos = 0;
    while (pos <= v.size()) {
        const auto next = v.find(',', pos);
        const auto item = trim(std::string_view(v).substr(pos, next == std::string::npos ? std::string::npos : next - pos));
        if (!item.empty()) out.push_back(item);
        if (next == std::string::npos) break;
        pos = next + 1;
    }
    return out;
}

} // namespace detail

// Flat "key = value" document; '#' starts a comment. Every key is optional and
// unknown keys are rejected.
inline SweepConfig parse_config(const std::string& text) {
    std::map<std::string, std::string> kv;
    std::istringstream in(text);
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (const auto h = line.find('#'); h != std::string::npos) line.erase(h);
        const std::string t = detail::trim(line);
        if (t.empty()) continue;
        const auto eq = t.find('=');
        if (eq == std::string::npos) throw ConfigError("line " + std::to_string(lineno), "expected 'key = value'");
        const std::string key = detail::trim(std::string_view(t).substr(0, eq));
        const std::string value = detail::trim(std::string_view(t).substr(eq + 1));
        if (key.empty()) throw ConfigError("line " + std::to_string(lineno), "empty key");
        if (value.empty()) throw ConfigError(key, "empty value");
        if (!kv.emplace(key, value).second) throw ConfigError(key, "duplicate key");
    }

    SweepConfig cfg;
    std::set<std::string> used;
    auto take = [&](const std::string& key) -> const std::string* {
        auto it = kv.find(key);
        if (it == kv.end()) return nullptr;
        used.insert(key);
        return &it->second;
    };
    auto num = [&](const std::string& key, double& dst) {
        if (auto v = take(key)) dst = detail::parse_double(key, *v);
    };
    auto integer = [&](const std::string& key, int& dst) {
        if (auto v = take(key)) dst = detail::parse_int(key, *v);
    };

    num("system.omega_a", cfg.base.omega_a);
    num("system.omega_b", cfg.base.omega_b);
    num("system.lambda", cfg.base.lambda);
    num("drive.amplitude", cfg.base.drive_amplitude);
    num("drive.frequency", cfg.base.drive_frequency);
    for (auto [prefix, bath] : {std::pair{"bath_a", &cfg.base.bath_a}, std::pair{"bath_b", &cfg.base.bath_b}}) {
        const std::string p = prefix;
        num(p + ".temperature", bath->temperature);
        num(p + ".coupling", bath->coupling);
        num(p + ".reference_frequency", bath->reference_frequency);
    }

    for (const char* axis_name : {"x", "y"}) {
        const std::string p = std::string("sweep.") + axis_name;
        const bool present = std::any_of(kv.begin(), kv.end(), [&](const auto& e) { return e.first.rfind(p + ".", 0) == 0; });
        if (!present) continue;
        if (std::string(axis_name) == "y" && cfg.axes.empty()) throw ConfigError(p, "second axis given without sweep.x");
        SweepAxis ax;
        const auto* param = take(p + ".parameter");
        if (!param) throw ConfigError(p + ".parameter", "missing required key");
        static const std::map<std::string, AxisParameter> params{{"drive_amplitude", AxisParameter::drive_amplitude},
                                                                 {"drive_frequency", AxisParameter::drive_frequency},
                                                                 {"temperature_a", AxisParameter::temperature_a},
                                                                 {"temperature_b", AxisParameter::temperature_b},
                                                                 {"delta_t", AxisParameter::delta_t}};
        auto pit = params.find(*param);
        if (pit == params.end()) throw ConfigError(p + ".parameter", "unknown sweep parameter '" + *param + "'");
        ax.parameter = pit->second;
        for (const char* req : {".start", ".stop", ".points"})
            if (!kv.count(p + req)) throw ConfigError(p + req, "missing required key");
        num(p + ".start", ax.start);
        num(p + ".stop", ax.stop);
        integer(p + ".points", ax.points);
        if (auto v = take(p + ".scale")) {
            if (*v == "linear") ax.scale = AxisScale::linear;
            else if (*v == "log") ax.scale = AxisScale::log;
            else throw ConfigError(p + ".scale", "expected 'linear' or 'log', got '" + *v + "'");
        }
        if (ax.points < 2) throw ConfigError(p + ".points", "must be >= 2");
        if (ax.scale == AxisScale::log && !(ax.start > 0.0 && ax.stop > 0.0))
            throw ConfigError(p + ".start", "log scale requires positive endpoints");
        if (!cfg.axes.empty() && cfg.axes[0].parameter == ax.parameter) throw ConfigError(p + ".parameter", "both axes sweep the same parameter");
        cfg.axes.push_back(ax);
    }

    if (auto v = take("sambe.cutoff")) {
        if (*v == "auto") cfg.auto_cutoff = true;
        else cfg.cutoff = detail::parse_int("sambe.cutoff", *v);
    }
    integer("sambe.auto_ceiling", cfg.auto_ceiling);
    if (auto v = take("observables")) {
        cfg.observables = {false, false, false, false};
        for (const auto& item : detail::split_list(*v)) {
            if (item == "thermo_report") cfg.observables.thermo_report = true;
            else if (item == "concurrence_profile") cfg.observables.concurrence_profile = true;
            else if (item == "floquet_spectrum") cfg.observables.floquet_spectrum = true;
            else if (item == "effective_hamiltonian") cfg.observables.effective_hamiltonian = true;
            else throw ConfigError("observables", "unknown observable '" + item + "'");
        }
    }
    integer("profile.samples", cfg.profile_samples);
    num("thermo.deadband", cfg.deadband);
    if (auto v = take("output.path")) cfg.output_path = *v;
    if (auto v = take("output.name")) cfg.output_name = *v;
    if (auto v = take("output.format")) {
        if (*v == "csv") cfg.format = OutputFormat::csv;
        else if (*v == "json") cfg.format = OutputFormat::json;
        else throw ConfigError("output.format", "expected 'csv' or 'json', got '" + *v + "'");
    }
    integer("threads", cfg.threads);

    for (const auto& [key, value] : kv)
        if (!used.count(key)) throw ConfigError(key, "unknown key");

    // range checks, reported with the key that carries the value
    try {
        cfg.base.bath_a.validate("bath_a");
        cfg.base.bath_b.validate("bath_b");
        cfg.base.validate();
    } catch (const std::invalid_argument& e) {
        const std::string msg = e.what();
        throw ConfigError(msg.substr(0, msg.find(':')), msg.substr(msg.find(':') + 2));
    }
    if (!cfg.auto_cutoff && cfg.cutoff < 1) throw ConfigError("sambe.cutoff", "must be >= 1 or 'auto'");
    if (cfg.auto_ceiling < 8) throw ConfigError("sambe.auto_ceiling", "must be >= 8");
    if (cfg.profile_samples < 2) throw ConfigError("profile.samples", "must be >= 2");
    if (cfg.deadband < 0.0) throw ConfigError("thermo.deadband", "must be >= 0");
    if (cfg.threads < 1) throw ConfigError("threads", "must be >= 1");
    if (cfg.output_name.empty() || cfg.output_name.find('/') != std::string::npos)
        throw ConfigError("output.name", "must be a plain file stem");
    for (std::size_t a = 0; a < cfg.axes.size(); ++a) {
        const std::string key = std::string("sweep.") + (a == 0 ? "x" : "y") + ".start";
        for (const auto& s : cfg.grid()) {
            try {
                s.validate();
            } catch (const std::invalid_argument& e) {
                throw ConfigError(key, std::string("grid leaves the valid range (") + e.what() + ")");
            }
        }
    }
    return cfg;
}

// Effective values of every schema key, used for the metadata echo.
inline std::vector<std::pair<std::string, std::string>> config_echo(const SweepConfig& cfg) {
    auto num = [](double v) {
        char buf[32];
        auto [p, ec] = std::to_chars(buf, buf + sizeof buf, v);
        return std::string(buf, p);
    };
    std::vector<std::pair<std::string, std::string>> e{
        {"system.omega_a", num(cfg.base.omega_a)},
        {"system.omega_b", num(cfg.base.omega_b)},
        {"system.lambda", num(cfg.base.lambda)},
        {"drive.amplitude", num(cfg.base.drive_amplitude)},
        {"drive.frequency", num(cfg.base.drive_frequency)},
        {"bath_a.temperature", num(cfg.base.bath_a.temperature)},
        {"bath_a.coupling", num(cfg.base.bath_a.coupling)},
        {"bath_a.reference_frequency", num(cfg.base.bath_a.reference_frequency)},
        {"bath_b.temperature", num(cfg.base.bath_b.temperature)},
        {"bath_b.coupling", num(cfg.base.bath_b.coupling)},
        {"bath_b.reference_frequency", num(cfg.base.bath_b.reference_frequency)},
    };
    for (std::size_t a = 0; a < cfg.axes.size(); ++a) {
        const std::string p = std::string("sweep.") + (a == 0 ? "x" : "y");
        const auto& ax = cfg.axes[a];
        e.emplace_back(p + ".parameter", to_string(ax.parameter));
        e.emplace_back(p + ".start", num(ax.start));
        e.emplace_back(p + ".stop", num(ax.stop));
        e.emplace_back(p + ".points", std::to_string(ax.points));
        e.emplace_back(p + ".scale", ax.scale == AxisScale::log ? "log" : "linear");
    }
    e.emplace_back("sambe.cutoff", cfg.auto_cutoff ? "auto" : std::to_string(cfg.cutoff));
    e.emplace_back("sambe.auto_ceiling", std::to_string(cfg.auto_ceiling));
    std::string obs;
    auto add = [&](bool on, const char* name) {
        if (!on) return;
        if (!obs.empty()) obs += ", ";
        obs += name;
    };
    add(cfg.observables.thermo_report, "thermo_report");
    add(cfg.observables.concurrence_profile, "concurrence_profile");
    add(cfg.observables.floquet_spectrum, "floquet_spectrum");
    add(cfg.observables.effective_hamiltonian, "effective_hamiltonian");
    e.emplace_back("observables", obs);
    e.emplace_back("profile.samples", std::to_string(cfg.profile_samples));
    e.emplace_back("thermo.deadband", num(cfg.deadband));
    e.emplace_back("output.path", cfg.output_path);
    e.emplace_back("output.name", cfg.output_name);
    e.emplace_back("output.format", cfg.format == OutputFormat::json ? "json" : "csv");
    e.emplace_back("threads", std::to_string(cfg.threads));
    return e;
}

} // namespace fgme
