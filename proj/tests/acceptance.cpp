// Acceptance suite: one PASS/FAIL line per criterion, exit code 1 if any criterion fails.
#include "fgme/fgme.hpp"
#include "oracles.hpp"

#include <chrono>
#include <cstdio>
#include <functional>
#include <iostream>
#include <thread>

using namespace fgme;

namespace {

struct Outcome {
    bool pass = false;
    std::string detail;
};

std::string fmt(const char* f, double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, f, v);
    return buf;
}

SystemSpec make(double k, double wl, double ta, double tb) {
    SystemSpec s;
    s.drive_amplitude = k;
    s.drive_frequency = wl;
    s.bath_a.temperature = ta;
    s.bath_b.temperature = tb;
    return s;
}

PointSolution at_cutoff(const SystemSpec& s, int c) {
    SambeConfig cfg;
    cfg.cutoff = c;
    return solve_point(s, cfg);
}

// smallest cutoff on 8, 12, ..., 24 whose rho_0 agrees with the next to 1e-8
PointSolution converged(const SystemSpec& s) {
    std::vector<PointSolution> kept;
    const auto rep = convergence_study(s, auto_cutoffs(24), 1e-8, true, &kept);
    if (kept.empty()) throw SolverError(rep.rows.back().error);
    const int want = rep.converged_cutoff.value_or(kept.back().sambe.cutoff);
    for (auto& p : kept)
        if (p.sambe.cutoff == want) return p;
    return kept.back();
}

// 20 x 20 (K, w_L) sweep at T_A = 1, T_B = 0.01, shared by the first two criteria
struct MachineSweep {
    Dataset data;
    double seconds = 0.0;
};

const MachineSweep& machine_sweep() {
    static const MachineSweep sweep = [] {
        SweepConfig cfg = parse_config("sweep.x.parameter = drive_amplitude\nsweep.x.start = 0.01\nsweep.x.stop = 1\n"
                                       "sweep.x.points = 20\nsweep.x.scale = log\n"
                                       "sweep.y.parameter = drive_frequency\nsweep.y.start = 0.25\nsweep.y.stop = 2.5\n"
                                       "sweep.y.points = 20\nsweep.y.scale = log\n"
                                       "bath_a.temperature = 1\nbath_b.temperature = 0.01\nsambe.cutoff = 12\n"
                                       "observables = thermo_report\n");
        cfg.threads = int(std::max(1u, std::thread::hardware_concurrency()));
        MachineSweep m;
        const auto t0 = std::chrono::steady_clock::now();
        m.data = run_sweep(cfg, false);
        m.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        return m;
    }();
    return sweep;
}

Outcome energy_balance() {
    const auto& m = machine_sweep();
    double worst = 0.0;
    std::size_t bad = 0, errors = 0;
    std::string where;
    for (const auto& r : m.data.rows) {
        if (!r.ok()) {
            ++errors;
            continue;
        }
        const double rel = std::abs(r.qdot_a + r.qdot_b + r.work_direct) / std::max(std::abs(r.qdot_a), 1e-12);
        if (!(rel < 1e-8)) ++bad;
        if (rel > worst) {
            worst = rel;
            where = "K=" + fmt("%.4g", r.spec.drive_amplitude) + " wL=" + fmt("%.4g", r.spec.drive_frequency);
        }
    }
    return {bad == 0 && errors == 0,
            std::to_string(m.data.rows.size()) + " points, " + std::to_string(errors) + " errors, " + std::to_string(bad) +
                " above 1e-8, worst relative residual " + fmt("%.3e", worst) + " at " + where + ", runtime " +
                fmt("%.1f", m.seconds) + " s"};
}

Outcome carnot_bound() {
    const auto& m = machine_sweep();
    std::size_t engines = 0, pumps = 0, bad = 0, errors = 0;
    double max_engine = 0.0, max_pump = 0.0;
    for (const auto& r : m.data.rows) {
        if (!r.ok()) {
            ++errors;
            continue;
        }
        if (r.mode == "engine") {
            ++engines;
            const double e = std::abs(r.work_direct / r.qdot_a);
            max_engine = std::max(max_engine, e);
            if (e > 0.99 + 1e-9) ++bad;
        } else if (r.mode == "pump") {
            ++pumps;
            const double c = std::abs(r.qdot_a / r.work_direct);
            max_pump = std::max(max_pump, c);
            if (c > 1.0 / 0.99 + 1e-9) ++bad;
        }
    }
    return {bad == 0 && errors == 0,
            std::to_string(engines) + " engine points (max |W/Q_A| " + fmt("%.4g", max_engine) + "), " + std::to_string(pumps) +
                " pump points (max |Q_A/W| " + fmt("%.4g", max_pump) + "), " + std::to_string(bad) + " violations, " +
                std::to_string(errors) + " errors"};
}

Outcome mode_map() {
    SweepConfig cfg = parse_config("sweep.x.parameter = drive_amplitude\nsweep.x.start = 0.01\nsweep.x.stop = 1\n"
                                   "sweep.x.points = 40\nsweep.x.scale = log\nbath_a.temperature = 1\nbath_b.temperature = 0.01\n"
                                   "sambe.cutoff = 12\nobservables = thermo_report\n");
    const auto ds = run_sweep(cfg, false);
    // run-length sequence of modes
    std::vector<std::pair<std::string, std::pair<double, double>>> runs;
    for (const auto& r : ds.rows) {
        const std::string m = r.ok() ? r.mode : "error";
        const double k = r.spec.drive_amplitude;
        if (runs.empty() || runs.back().first != m) runs.push_back({m, {k, k}});
        else runs.back().second.second = k;
    }
    std::string seq;
    for (const auto& [m, range] : runs)
        seq += (seq.empty() ? "" : " -> ") + m + "[" + fmt("%.3g", range.first) + "," + fmt("%.3g", range.second) + "]";
    bool pass = runs.size() == 3 && runs[0].first == "engine" && runs[1].first == "transition" && runs[2].first == "pump";
    if (pass) {
        const double b1 = std::sqrt(runs[0].second.second * runs[1].second.first);
        const double b2 = std::sqrt(runs[1].second.second * runs[2].second.first);
        pass = b1 > 0.1 && b1 < 0.25 && b2 > 0.25 && b2 < 0.45;
        seq += ", boundaries " + fmt("%.3g", b1) + ", " + fmt("%.3g", b2);
    }
    return {pass, seq};
}

Outcome static_limit() {
    double worst = 0.0;
    for (auto [ta, tb] : {std::pair{0.5, 0.1}, std::pair{1.0, 0.01}, std::pair{0.5, 0.5}, std::pair{2.0, 0.3}}) {
        const auto p = at_cutoff(make(0.0, 0.5, ta, tb), 4);
        const auto want =
            oracle::null_state(oracle::static_generator(oracle::h0(0.5, 0.5, 0.25), {1e-3, 1.0, ta}, {1e-3, 1.0, tb}));
        worst = std::max(worst, trace_distance(p.state.rho[0], want));
    }
    const auto eq = at_cutoff(make(0.0, 0.5, 0.5, 0.5), 4);
    const Mat4 h0 = oracle::h0(0.5, 0.5, 0.25);
    Eigen::SelfAdjointEigenSolver<Mat4> es(h0);
    const auto w = oracle::gibbs(h0, 0.5);
    double gibbs_dev = 0.0;
    for (int r = 0; r < 4; ++r) {
        const double pop = (es.eigenvectors().col(r).adjoint() * eq.state.rho[0] * es.eigenvectors().col(r))(0).real();
        gibbs_dev = std::max(gibbs_dev, std::abs(pop / w[std::size_t(r)] - 1.0));
    }
    return {worst < 1e-10 && gibbs_dev < 0.01,
            "max trace distance to static null vector " + fmt("%.2e", worst) + ", max relative Gibbs deviation " + fmt("%.2e", gibbs_dev)};
}

Outcome propagation() {
    const auto p = at_cutoff(make(0.5, 0.5, 0.5, 0.1), 12);
    const PeriodicPropagator prop(p.liouvillian, 1000);
    const long periods = long(std::ceil(200.0 / 1e-3 / p.spec.period()));
    const Mat4 target = density_at_time(p.state, 0.0);
    std::mt19937_64 g(2024);
    std::vector<Mat4> ends;
    double worst = 0.0;
    for (int n = 0; n < 5; ++n) {
        ends.push_back(prop.advance_periods(oracle::random_density(g), periods));
        worst = std::max(worst, 2.0 * trace_distance(ends.back(), target));
    }
    double pair = 0.0;
    for (std::size_t a = 0; a < ends.size(); ++a)
        for (std::size_t b = a + 1; b < ends.size(); ++b) pair = std::max(pair, 2.0 * trace_distance(ends[a], ends[b]));
    return {worst < 1e-6 && pair < 1e-6, std::to_string(periods) + " periods at T/1000, max trace norm to Fourier orbit " +
                                             fmt("%.2e", worst) + ", max pairwise " + fmt("%.2e", pair)};
}

// returns the index of the strict maximum, or -1 on ties at the top
int strict_argmax(const std::vector<double>& v) {
    const auto it = std::max_element(v.begin(), v.end());
    if (std::count(v.begin(), v.end(), *it) > 1) return -1;
    return int(it - v.begin());
}

Outcome entanglement_scans() {
    const std::vector<double> ks{0.05, 0.1, 0.2, 0.35, 0.5, 0.8, 1.5, 5.0};
    const std::vector<double> ws{0.1, 0.2, 0.35, 0.5, 0.8, 1.5, 5.0};
    std::vector<double> fk, fw;
    std::string d = "fraction(K):";
    for (double k : ks) {
        const auto prof = concurrence_profile(converged(make(k, 0.5, 0.5, 0.1)).state, 128);
        fk.push_back(prof.entangled_fraction);
        d += " " + fmt("%.3g", prof.entangled_fraction);
    }
    d += "; fraction(wL):";
    for (double w : ws) {
        const auto prof = concurrence_profile(converged(make(0.5, w, 0.5, 0.1)).state, 128);
        fw.push_back(prof.entangled_fraction);
        d += " " + fmt("%.3g", prof.entangled_fraction);
    }
    const int ak = strict_argmax(fk), aw = strict_argmax(fw);
    d += "; argmax K=" + (ak < 0 ? std::string("tie") : fmt("%.3g", ks[std::size_t(ak)])) +
         ", argmax wL=" + (aw < 0 ? std::string("tie") : fmt("%.3g", ws[std::size_t(aw)]));
    return {ak >= 0 && ks[std::size_t(ak)] == 0.5 && aw >= 0 && ws[std::size_t(aw)] == 0.5, d};
}

Outcome high_frequency() {
    const auto driven = at_cutoff(make(0.5, 50.0, 0.5, 0.1), 8);
    const auto still = at_cutoff(make(0.0, 50.0, 0.5, 0.1), 4);
    const double dist = trace_distance(driven.state.rho[0], still.state.rho[0]);
    return {dist < 0.02, "trace distance of period average to undriven state " + fmt("%.3e", dist)};
}

Outcome effective_checks() {
    double flow = 0.0, avg = 0.0;
    for (double ratio : {0.1, 1.0, 2.0, 5.0})
        for (double wl : {0.25, 0.5, 2.0}) {
            const auto s = make(ratio * wl, wl, 0.5, 0.1);
            const auto fs = integrate_flow(s, 400, 64);
            for (int j = 0; j < 64; ++j) {
                const auto want = flow_closed_form(s, 1.0, fs.times[std::size_t(j)]);
                for (std::size_t i = 0; i < 7; ++i) flow = std::max(flow, std::abs(fs.terminal(j)[i] - want[i]));
            }
            const auto a = fs.averaged_terminal();
            const double lj = 0.25 * double(oracle::j0_series(ratio));
            avg = std::max({avg, std::abs(a[2] - lj), std::abs(effective_hamiltonian(s).lambda_eff - lj)});
        }
    const double j1 = std::abs(bessel_j0(1.0) - double(oracle::j0_series(1.0L)));
    return {flow < 1e-8 && avg < 1e-8 && j1 < 1e-12,
            "flow vs closed form " + fmt("%.2e", flow) + ", averaged coupling vs lambda J0 " + fmt("%.2e", avg) + ", |J0(1) - series| " +
                fmt("%.2e", j1)};
}

Outcome invariants() {
    std::vector<std::string> failed;
    auto check = [&](bool ok, const std::string& name, double v) {
        if (!ok) failed.push_back(name + "=" + fmt("%.2e", v));
    };
    std::mt19937_64 g(77);
    const auto s = make(0.5, 0.5, 1.0, 0.01);
    const auto p = at_cutoff(s, 10);
    const auto& lv = p.liouvillian;

    double tr = 0.0, herm = 0.0;
    for (int j = 0; j < 16; ++j) {
        const Mat16 l = lv.at(s.period() * j / 16);
        for (int n = 0; n < 100; ++n) {
            const Mat4 rho = oracle::random_density(g);
            const Mat4 out = unvec(l * vec(rho));
            tr = std::max(tr, std::abs(out.trace()));
            herm = std::max(herm, (out - out.adjoint()).norm());
        }
    }
    check(tr < 1e-12, "trace", tr);
    check(herm < 1e-12, "hermiticity", herm);

    const auto& dec = p.floquet();
    double ortho = 0.0;
    for (int r = 0; r < 4; ++r)
        for (int rp = 0; rp < 4; ++rp) ortho = std::max(ortho, std::abs(dec.extended_inner(r, rp) - (r == rp ? 1.0 : 0.0)));
    check(ortho < 1e-12, "orthonormality", ortho);

    double unit = 0.0;
    std::uniform_real_distribution<double> ud(0.0, s.period());
    for (int j = 0; j < 16; ++j) {
        const Mat4 m = micromotion(dec, ud(g), ud(g));
        unit = std::max(unit, (m.adjoint() * m - Mat4::Identity()).norm());
    }
    check(unit < 1e-10, "micromotion", unit);

    const Mat4 rho = 0.7 * oracle::werner(0.9) + 0.3 * oracle::random_density(g);
    const double c0 = concurrence(rho);
    double lu = 0.0;
    for (int n = 0; n < 50; ++n) {
        const Mat4 u = oracle::kron(oracle::random_unitary(g, 2), oracle::random_unitary(g, 2));
        lu = std::max(lu, std::abs(concurrence(u * rho * u.adjoint()) - c0));
    }
    check(c0 > 0.0 && lu < 1e-10, "local-unitary", lu);

    const auto gen = p.heat;
    const std::array<BathSpec, 2> baths{s.bath_a, s.bath_b};
    double fd = 0.0;
    for (int i = 0; i < 2; ++i) {
        CountingFields plus, minus;
        (i == 0 ? plus.chi_a : plus.chi_b) = 1e-6;
        (i == 0 ? minus.chi_a : minus.chi_b) = -1e-6;
        const auto lp = build_liouvillian(p.jumps, baths, p.hamiltonian, plus);
        const auto lm = build_liouvillian(p.jumps, baths, p.hamiltonian, minus);
        double err = 0.0, scale = 0.0;
        for (int k = -lp.window(); k <= lp.window(); ++k) {
            err = std::max(err, ((lp.components[k] - lm.components[k]) / (2e-6 * I) - gen.per_bath[std::size_t(i)][k]).norm());
            scale = std::max(scale, gen.per_bath[std::size_t(i)][k].norm());
        }
        fd = std::max(fd, err / scale);
    }
    check(fd < 1e-6, "chi-derivative", fd);

    std::string d = "trace " + fmt("%.1e", tr) + ", hermiticity " + fmt("%.1e", herm) + ", orthonormality " + fmt("%.1e", ortho) +
                    ", micromotion " + fmt("%.1e", unit) + ", local-unitary " + fmt("%.1e", lu) + ", chi fd " + fmt("%.1e", fd);
    for (const auto& f : failed) d += "; failed " + f;
    return {failed.empty(), d};
}

Outcome static_temperature_window() {
    auto c_at = [](double t1, double t2) {
        const double lib = concurrence(at_cutoff(make(0.0, 0.5, t1, t2), 4).state.rho[0]);
        const double ref =
            concurrence(oracle::null_state(oracle::static_generator(oracle::h0(0.5, 0.5, 0.25), {1e-3, 1.0, t1}, {1e-3, 1.0, t2})));
        return std::pair{lib, ref};
    };
    const auto [cold, cold_ref] = c_at(0.1, 0.1);
    const auto [hot, hot_ref] = c_at(2.0, 2.0);
    const bool agree = std::abs(cold - cold_ref) < 1e-8 && std::abs(hot - hot_ref) < 1e-8;
    return {cold > 0.0 && hot == 0.0 && agree, "C(0.1,0.1) = " + fmt("%.6g", cold) + " (oracle " + fmt("%.6g", cold_ref) +
                                                   "), C(2,2) = " + fmt("%.3g", hot) + " (oracle " + fmt("%.3g", hot_ref) + ")"};
}

} // namespace

int main() {
    const std::vector<std::pair<const char*, std::function<Outcome()>>> criteria{
        {"energy balance", energy_balance},
        {"Carnot bound", carnot_bound},
        {"operation-mode map", mode_map},
        {"static-limit oracle", static_limit},
        {"propagation oracle", propagation},
        {"entanglement phenomenology", entanglement_scans},
        {"high-frequency limit", high_frequency},
        {"effective-Hamiltonian cross-check", effective_checks},
        {"invariant suite", invariants},
        {"static temperature window", static_temperature_window},
    };
    int failures = 0;
    for (std::size_t i = 0; i < criteria.size(); ++i) {
        Outcome o;
        try {
            o = criteria[i].second();
        } catch (const std::exception& e) {
            o = {false, std::string("exception: ") + e.what()};
        }
        if (!o.pass) ++failures;
        std::cout << (o.pass ? "PASS" : "FAIL") << " " << (i + 1) << " " << criteria[i].first << ": " << o.detail << std::endl;
    }
    std::cout << (criteria.size() - std::size_t(failures)) << "/" << criteria.size() << " criteria passed" << std::endl;
    return failures == 0 ? 0 : 1;
}
