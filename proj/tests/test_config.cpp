#include "fgme/config.hpp"

#include <gtest/gtest.h>

using namespace fgme;

namespace {

std::string error_key(const std::string& text) {
    try {
        parse_config(text);
    } catch (const ConfigError& e) {
        return e.key();
    }
    return "<no error>";
}

} // namespace

TEST(ParseConfig, EmptyDocumentGivesDefaults) {
    const auto cfg = parse_config("# nothing\n\n");
    EXPECT_EQ(cfg.base.omega_a, 0.5);
    EXPECT_EQ(cfg.base.omega_b, 0.5);
    EXPECT_EQ(cfg.base.lambda, 0.25);
    EXPECT_EQ(cfg.base.bath_a.coupling, 1e-3);
    EXPECT_EQ(cfg.base.bath_b.coupling, 1e-3);
    EXPECT_EQ(cfg.base.bath_a.reference_frequency, 1.0);
    EXPECT_EQ(cfg.base.bath_a.temperature, 0.5);
    EXPECT_EQ(cfg.base.bath_b.temperature, 0.1);
    EXPECT_EQ(cfg.base.drive_frequency, 0.5);
    EXPECT_TRUE(cfg.axes.empty());
    EXPECT_EQ(cfg.grid().size(), 1u);
    EXPECT_EQ(cfg.format, OutputFormat::csv);
    EXPECT_FALSE(cfg.auto_cutoff);
}

TEST(ParseConfig, ReadsEveryKey) {
    const auto cfg = parse_config(R"(
system.omega_a = 0.6
system.omega_b = 0.4   # trailing comment
system.lambda = 0.2
drive.amplitude = 0.3
drive.frequency = 0.7
bath_a.temperature = 1
bath_a.coupling = 2e-3
bath_a.reference_frequency = 1.5
bath_b.temperature = 0.01
bath_b.coupling = 0
bath_b.reference_frequency = 2
sweep.x.parameter = drive_amplitude
sweep.x.start = 0.01
sweep.x.stop = 1
sweep.x.points = 5
sweep.x.scale = log
sweep.y.parameter = delta_t
sweep.y.start = 0
sweep.y.stop = 1
sweep.y.points = 3
sambe.cutoff = auto
sambe.auto_ceiling = 20
observables = thermo_report, floquet_spectrum
profile.samples = 32
thermo.deadband = 1e-10
output.path = out/dir
output.name = run1
output.format = json
threads = 3
)");
    EXPECT_EQ(cfg.base.omega_a, 0.6);
    EXPECT_EQ(cfg.base.omega_b, 0.4);
    EXPECT_EQ(cfg.base.lambda, 0.2);
    EXPECT_EQ(cfg.base.drive_amplitude, 0.3);
    EXPECT_EQ(cfg.base.drive_frequency, 0.7);
    EXPECT_EQ(cfg.base.bath_a.coupling, 2e-3);
    EXPECT_EQ(cfg.base.bath_a.reference_frequency, 1.5);
    EXPECT_EQ(cfg.base.bath_b.coupling, 0.0);
    ASSERT_EQ(cfg.axes.size(), 2u);
    EXPECT_EQ(cfg.axes[0].parameter, AxisParameter::drive_amplitude);
    EXPECT_EQ(cfg.axes[0].scale, AxisScale::log);
    EXPECT_EQ(cfg.axes[1].parameter, AxisParameter::delta_t);
    EXPECT_TRUE(cfg.auto_cutoff);
    EXPECT_EQ(cfg.auto_ceiling, 20);
    EXPECT_TRUE(cfg.observables.thermo_report);
    EXPECT_FALSE(cfg.observables.concurrence_profile);
    EXPECT_TRUE(cfg.observables.floquet_spectrum);
    EXPECT_FALSE(cfg.observables.effective_hamiltonian);
    EXPECT_EQ(cfg.profile_samples, 32);
    EXPECT_EQ(cfg.deadband, 1e-10);
    EXPECT_EQ(cfg.output_path, "out/dir");
    EXPECT_EQ(cfg.output_name, "run1");
    EXPECT_EQ(cfg.format, OutputFormat::json);
    EXPECT_EQ(cfg.threads, 3);

    const auto grid = cfg.grid();
    ASSERT_EQ(grid.size(), 15u);
    // x outer, y inner; delta_t sets T_A = T_B + v
    EXPECT_EQ(grid[0].drive_amplitude, 0.01);
    EXPECT_EQ(grid[0].bath_a.temperature, 0.01);
    EXPECT_EQ(grid[2].bath_a.temperature, 1.01);
    EXPECT_EQ(grid[14].drive_amplitude, 1.0);
    EXPECT_NEAR(grid[3].drive_amplitude, std::pow(10.0, -1.5), 1e-15);
}

TEST(SweepAxis, LinearAndLogValues) {
    SweepAxis lin{AxisParameter::drive_amplitude, 0.0, 1.0, 5, AxisScale::linear};
    const auto v = lin.values();
    ASSERT_EQ(v.size(), 5u);
    EXPECT_DOUBLE_EQ(v[1], 0.25);
    EXPECT_EQ(v.back(), 1.0);
    SweepAxis lg{AxisParameter::drive_amplitude, 0.01, 1.0, 3, AxisScale::log};
    const auto w = lg.values();
    EXPECT_EQ(w.front(), 0.01);
    EXPECT_NEAR(w[1], 0.1, 1e-15);
    EXPECT_EQ(w.back(), 1.0);
}

TEST(ParseConfig, UnknownKeyNamed) { EXPECT_EQ(error_key("omega_c = 3\n"), "omega_c"); }

TEST(ParseConfig, NegativeTemperatureRejected) {
    EXPECT_EQ(error_key("bath_a.temperature = -1\n"), "bath_a.temperature");
    EXPECT_EQ(error_key("bath_b.temperature = 0\n"), "bath_b.temperature");
}

TEST(ParseConfig, TypeMismatch) {
    EXPECT_EQ(error_key("drive.amplitude = big\n"), "drive.amplitude");
    EXPECT_EQ(error_key("threads = 2.5\n"), "threads");
    EXPECT_EQ(error_key("sambe.cutoff = many\n"), "sambe.cutoff");
}

TEST(ParseConfig, RangeViolations) {
    EXPECT_EQ(error_key("drive.frequency = 0\n"), "drive.frequency");
    EXPECT_EQ(error_key("bath_a.coupling = -1e-3\n"), "bath_a.coupling");
    EXPECT_EQ(error_key("threads = 0\n"), "threads");
    EXPECT_EQ(error_key("profile.samples = 1\n"), "profile.samples");
    EXPECT_EQ(error_key("sambe.cutoff = 0\n"), "sambe.cutoff");
}

TEST(ParseConfig, AxisRules) {
    EXPECT_EQ(error_key("sweep.x.parameter = drive_amplitude\nsweep.x.start = 0\nsweep.x.stop = 1\nsweep.x.points = 1\n"),
              "sweep.x.points");
    EXPECT_EQ(error_key("sweep.x.parameter = drive_amplitude\nsweep.x.start = 0\nsweep.x.stop = 1\nsweep.x.points = 4\n"
                        "sweep.x.scale = log\n"),
              "sweep.x.start");
    EXPECT_EQ(error_key("sweep.x.parameter = drive_amplitude\nsweep.x.stop = 1\nsweep.x.points = 4\n"), "sweep.x.start");
    EXPECT_EQ(error_key("sweep.x.start = 0\n"), "sweep.x.parameter");
    EXPECT_EQ(error_key("sweep.x.parameter = omega_c\nsweep.x.start = 0\nsweep.x.stop = 1\nsweep.x.points = 2\n"),
              "sweep.x.parameter");
    EXPECT_EQ(error_key("sweep.y.parameter = drive_amplitude\nsweep.y.start = 0\nsweep.y.stop = 1\nsweep.y.points = 2\n"),
              "sweep.y");
    EXPECT_EQ(error_key("sweep.x.parameter = temperature_b\nsweep.x.start = -1\nsweep.x.stop = 1\nsweep.x.points = 3\n"),
              "sweep.x.start");
}

TEST(ParseConfig, DuplicateAndMalformedLines) {
    EXPECT_EQ(error_key("threads = 2\nthreads = 3\n"), "threads");
    EXPECT_EQ(error_key("threads 2\n"), "line 1");
    EXPECT_EQ(error_key("threads =\n"), "threads");
}

TEST(ParseConfig, ObservableListValidated) {
    EXPECT_EQ(error_key("observables = thermo_report, magic\n"), "observables");
    const auto cfg = parse_config("observables = effective_hamiltonian\n");
    EXPECT_TRUE(cfg.observables.effective_hamiltonian);
    EXPECT_FALSE(cfg.observables.thermo_report);
}

TEST(ConfigEcho, CoversSchema) {
    const auto cfg = parse_config("sweep.x.parameter = drive_frequency\nsweep.x.start = 0.25\nsweep.x.stop = 2.5\nsweep.x.points = 4\n");
    const auto echo = config_echo(cfg);
    std::set<std::string> keys;
    for (const auto& [k, v] : echo) keys.insert(k);
    for (const char* k : {"system.omega_a", "drive.frequency", "bath_b.reference_frequency", "sweep.x.parameter", "sweep.x.scale",
                          "sambe.cutoff", "observables", "output.format", "threads"})
        EXPECT_TRUE(keys.count(k)) << k;
    // the echo parses back to the same configuration
    std::string doc;
    for (const auto& [k, v] : echo) doc += k + " = " + v + "\n";
    const auto again = parse_config(doc);
    EXPECT_EQ(config_echo(again), echo);
}
