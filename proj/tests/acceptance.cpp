// Copyright 2026 The qlink Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

// Acceptance report: one PASS/FAIL line per criterion, run through the same
// recipes the CLI exposes. The exit status is 0 whenever the report could be
// produced, so a red criterion shows up in the output without hiding the
// others; a crash or an exception outside a criterion still fails the test.
//
// Usage: acceptance [--report FILE] [AC1 AC3 ...]   (no criteria: all of them)
// The report goes to stdout and, with --report, to FILE as well.

#include <algorithm>
#include <chrono>
#include <fstream>
#include <cmath>
#include <iomanip>
#include <iostream>
#include <numbers>
#include <set>
#include <sstream>
#include <thread>

#include "qlink/config.hpp"
#include "qlink/esd.hpp"
#include "qlink/experiment.hpp"
#include "qlink/rng.hpp"
#include "qlink/shuttle.hpp"

using namespace qlink;
using namespace qlink::exp;

namespace {

struct Outcome {
    bool pass = true;
    std::ostringstream detail;

    // Records one comparison; every comparison is listed, failing ones marked.
    void within(const std::string& what, double value, double target, double tol) {
        const bool ok = std::abs(value - target) <= tol;
        std::ostringstream rule;
        rule << "target " << target << " +- " << std::setprecision(3) << tol;
        note(what, value, ok, rule.str());
    }
    void below(const std::string& what, double value, double bound) {
        note(what, value, value < bound, "< " + format_number(bound));
    }
    void at_most(const std::string& what, double value, double bound) {
        note(what, value, value <= bound, "<= " + format_number(bound));
    }
    void at_least(const std::string& what, double value, double bound) {
        note(what, value, value >= bound, ">= " + format_number(bound));
    }
    void holds(const std::string& what, bool ok) {
        pass = pass && ok;
        detail << "\n      " << (ok ? "ok   " : "MISS ") << what;
    }

private:
    void note(const std::string& what, double value, bool ok, const std::string& rule) {
        pass = pass && ok;
        std::ostringstream v;
        v << std::setprecision(6) << value;
        detail << "\n      " << (ok ? "ok   " : "MISS ") << what << " = " << v.str() << " (" << rule << ")";
    }
};

int jobs() { return std::max(1, int(std::thread::hardware_concurrency())); }

ResultRecord recipe(const std::string& name, const std::vector<std::pair<std::string, std::string>>& extra = {}) {
    auto cfg = Config::parse(repro_yaml(name), "recipe " + name);
    cfg.set("run.jobs", std::to_string(jobs()));
    for (const auto& [k, v] : extra) cfg.set(k, v);
    cfg.validate();
    return run_experiment(cfg);
}

// Row of a table whose first columns match the given values.
size_t find_row(const Table& t, const std::vector<std::pair<std::string, double>>& keys) {
    for (size_t i = 0; i < t.rows.size(); ++i) {
        bool all = true;
        for (const auto& [c, v] : keys) all = all && t.number(i, c) == v;
        if (all) return i;
    }
    throw DimensionError("no matching row");
}

void ac1(Outcome& o) {
    const auto r = recipe("table1");
    o.within("fidelity T2,c = 400 ns", r.metrics.at("fidelity_t2c_400"), 0.945, 0.01);
    o.within("fidelity T2,c = 100 ns", r.metrics.at("fidelity_t2c_100"), 0.900, 0.01);
    o.within("fidelity T2,c = 50 ns", r.metrics.at("fidelity_t2c_50"), 0.844, 0.01);
    o.at_most("wall time per point [s]", r.duration_s / 3, 600);
}

void ac2(Outcome& o) {
    const auto r = recipe("fig3");
    o.within("peak concurrence", r.metrics.at("peak_concurrence"), 0.89, 0.03);
    o.within("time of the peak [ns]", r.metrics.at("peak_time_ns"), 15, 2);
    o.within("odd-parity acceptance at stop", r.metrics.at("success_probability_at_stop"), 0.90, 0.03);
    o.within("photon-vacuum probability at stop", r.metrics.at("vacuum_probability_at_stop"), 0.96, 0.02);
}

void ac3(Outcome& o) {
    const auto r = recipe("table2");
    const auto& t = r.series.at("table2");
    const auto& f = r.series.at("failures");
    o.within("2-round fidelity, 400 ns", r.metrics.at("fidelity_400_r2"), 0.995, 0.005);
    const double fails[] = {0.10, 0.08, 0.06};
    for (int s = 0; s < 3; ++s)
        o.within("failure probability, stage " + std::to_string(s),
                 f.number(find_row(f, {{"t2_charge_ns", 400}, {"rounds", 2}, {"stage", s}}), "failure_probability"),
                 fails[s], 0.02);
    o.within("4-round fidelity, 400 ns", r.metrics.at("fidelity_400_r4"), 0.998, 0.005);
    o.within("4-round fidelity, 100 ns", r.metrics.at("fidelity_100_r4"), 0.998, 0.005);
    o.within("4-round fidelity, 50 ns", r.metrics.at("fidelity_50_r4"), 0.997, 0.005);
    const struct {
        double t2;
        int rounds;
        double pairs, rate;
    } cases[] = {{400, 2, 5.2, 11.6}, {100, 4, 25.4, 2.3}, {50, 4, 33.0, 1.7}};
    for (const auto& c : cases) {
        const size_t i = find_row(t, {{"t2_charge_ns", c.t2}, {"rounds", c.rounds}});
        const std::string tag = format_number(c.t2) + " ns, " + std::to_string(c.rounds) + " rounds";
        o.within("raw pairs, " + tag, t.number(i, "expected_raw_pairs"), c.pairs, 0.10 * c.pairs);
        o.within("rate [MHz], " + tag, t.number(i, "generation_rate_mhz"), c.rate, 0.15 * c.rate);
    }
}

void ac4(Outcome& o) {
    double worst_p = 0, worst_f = 0, worst_alt = 0;
    for (double eps : {0.0, 0.05, 0.1, 0.2, 0.3})
        for (double phi : {0.0, 1.3}) {
            const auto p = shuttle::purify_shuttled_pair(shuttle::purifiable_state(eps, phi));
            worst_p = std::max(worst_p, std::abs(p.success_prob - (1 - eps) * (1 - eps) * (0.5 - eps)));
            worst_f = std::max(worst_f, std::abs(fidelity_to_pure(p.state, bell_state(1)) - 1));
            worst_alt = std::max(worst_alt, std::abs(p.success_prob - (0.5 - eps)));
        }
    o.below("max |p - (1-eps)^2 (1/2-eps)|", worst_p, 1e-10);
    o.below("max |F(psi+) - 1|", worst_f, 1e-10);
    // Not part of the criterion; shows what the simulated circuit gives instead.
    o.detail << "\n      info max |p - (1/2-eps)| = " << std::setprecision(3) << worst_alt;
}

void ac5(Outcome& o) {
    const auto r = recipe("fig7");
    o.at_least("chains", double(r.series.at("chains").rows.size()), 100);
    o.within("mean purified concurrence, tc 30, SD 0.785", r.metrics.at("mean_purified_concurrence"), 0.995, 0.005);
    const auto& s = r.series.at("sd_scan");
    bool mono = true;
    for (size_t i = 1; i < s.rows.size(); ++i) {
        mono = mono && s.number(i, "sd_phase") > s.number(i - 1, "sd_phase");
        mono = mono && s.number(i, "mean_raw_concurrence") <= s.number(i - 1, "mean_raw_concurrence");
    }
    std::ostringstream scan;
    for (size_t i = 0; i < s.rows.size(); ++i)
        scan << (i ? ", " : "") << std::setprecision(4) << s.number(i, "mean_raw_concurrence");
    o.holds("raw concurrence decreases with SD_phi: " + scan.str(), mono);
    o.at_least("raw concurrence with all phases equal", s.number(find_row(s, {{"sd_phase", 0}}), "mean_raw_concurrence"),
               0.999);
    // Both misses above come from the spin-orbit term (E_SOI = 1 ueV by default):
    // without it the spin never sees the valley flips. Shown for reference only.
    shuttle::ChainConfig ideal;
    ideal.sd_phase = 0;
    ideal.bx_total = ideal.bz_total = 0;
    shuttle::SweepParams sw;
    sw.tc = 30;
    sw.esoi = 0;
    const auto trace = shuttle::shuttle_chain(ideal, sw).concurrence_trace;
    o.detail << "\n      info equal phases, E_SOI = 0, no field gradients: min concurrence along the chain "
             << std::setprecision(7) << *std::min_element(trace.begin(), trace.end());
}

void ac6(Outcome& o) {
    const auto r = recipe("fig11");
    o.below("max |mean noisy - noiseless| raw concurrence", r.metrics.at("max_abs_mean_delta_concurrence"), 1e-3);
    o.detail << std::setprecision(3) << "\n      info purified: " << r.metrics.at("max_abs_mean_delta_purified")
             << ", largest single realization: " << r.metrics.at("max_abs_single_delta_concurrence")
             << ", PTM: " << r.metrics.at("max_ptm_deviation");
}

void ac7(Outcome& o) {
    const auto r = recipe("fig8");
    o.within("cavity raw", r.metrics.at("best_bell_fidelity_cavity_raw"), 0.945, 0.01);
    o.within("cavity purified (2 rounds)", r.metrics.at("best_bell_fidelity_cavity_purified"), 0.995, 0.01);
    o.within("shuttle raw", r.metrics.at("best_bell_fidelity_shuttle_raw"), 0.957, 0.01);
    o.within("shuttle purified (1 round)", r.metrics.at("best_bell_fidelity_shuttle_purified"), 0.996, 0.01);
}

const std::vector<Check>& suite() {
    static const auto checks = invariant_suite(1, 7);
    return checks;
}

// Probability that no teleportation on n distinct qubits suffers an error:
// the identity weight of the composed channel, p_I = 4^-n sum_P Tr(P E(P)) / 2^n.
double error_free_weight(int n, double f) {
    const int d = 1 << n;
    double total = 0;
    std::vector<int> qubits(n);
    for (int q = 0; q < n; ++q) qubits[q] = q;
    for (long code = 0; code < (1L << (2 * n)); ++code) {
        std::vector<Mat> ops;
        for (int q = 0; q < n; ++q) ops.push_back(pauli(int((code >> (2 * q)) & 3)));
        const Mat p = kron(ops);
        total += (p * esd::teleport_noise(p, qubits, f, n)).trace().real() / d;
    }
    return total / double(1L << (2 * n));
}

void ac8(Outcome& o) {
    for (const auto& c : suite())
        if (c.name == "teleportation equals Pauli channel")
            o.at_most("teleportation vs Pauli channel (100 weight vectors)", c.value, 1e-10);
    const double w1 = error_free_weight(1, 0.995), w6 = error_free_weight(6, 0.995);
    o.below("6 qubits: |p_I - 0.995^6|", std::abs(w6 - std::pow(0.995, 6)), 5e-5);
    o.within("6 qubits: p_I", w6, 0.97, 0.005);
    // Independent qubits compose multiplicatively; 100 is out of reach for a dense check.
    const double w100 = std::pow(w1, 100);
    o.below("100 qubits: |p_I(1)^100 - 0.995^100|", std::abs(w100 - std::pow(0.995, 100)), 5e-5);
    o.within("100 qubits: p_I", w100, 0.60, 0.01);
}

void ac9(Outcome& o) {
    const auto r = recipe("fig10c");
    const auto& m = r.metrics;
    auto at = [&](const std::string& mode, double xi) { return m.at(mode + "_xi_" + format_number(xi)); };
    o.at_most("(a) noiseless VQE energy error", m.at("vqe_energy_error"), 1e-4);
    for (double xi : {0.1, 0.3, 1.0, 3.0, 5.0}) {
        o.below("(b) ideal n=2 - unmitigated, xi " + format_number(xi), at("ideal_n2", xi) - at("unmitigated", xi), 0);
        o.at_most("(c) noisy / ideal, xi " + format_number(xi), at("both", xi) / at("ideal_n2", xi), 3);
    }
    // (d) needs small xi only; the formula-level noisy-pair estimate is enough there.
    const auto small = recipe("fig10c", {{"esd.xi", "[0, 0.0001, 0.001, 0.01]"}, {"esd.circuit", "false"}});
    std::vector<double> tail;
    for (double xi : {0.01, 0.001, 0.0001, 0.0}) tail.push_back(small.metrics.at("noisy_bell_xi_" + format_number(xi)));
    std::ostringstream seq;
    seq << std::setprecision(4) << tail[0] << ", " << tail[1] << ", " << tail[2] << " -> " << tail[3];
    o.holds("(d) xi = 0.01, 0.001, 1e-4 -> 0: " + seq.str() + " decreasing", tail[0] > tail[1] && tail[1] > tail[2] &&
                                                                                  tail[2] >= tail[3]);
    o.at_least("(d) limit at xi = 0", tail[3], 1e-12);
    o.at_most("(d) relative distance from the limit at xi = 1e-4", tail[2] / tail[3] - 1, 0.01);
    o.below("(d) limit vs unmitigated at xi 1", tail[3], at("unmitigated", 1));
    o.at_most("(e) n=3 - n=2 at xi 1", at("ideal_n3", 1) - at("ideal_n2", 1), 0);
    o.at_most("(e) n=4 - n=2 at xi 1", at("ideal_n4", 1) - at("ideal_n2", 1), 0);
    o.at_most("sweep wall time [s]", r.duration_s, 1800);
}

void ac10(Outcome& o) {
    for (const auto& c : suite()) {
        if (c.name == "teleportation equals Pauli channel") continue;
        if (c.bound < 0)
            o.at_least(c.name, c.value, c.bound);
        else
            o.at_most(c.name, c.value, c.bound);
    }
}

}  // namespace

int main(int argc, char** argv) {
    const std::vector<std::pair<std::string, void (*)(Outcome&)>> all{
        {"AC1", ac1}, {"AC2", ac2}, {"AC3", ac3}, {"AC4", ac4}, {"AC5", ac5},
        {"AC6", ac6}, {"AC7", ac7}, {"AC8", ac8}, {"AC9", ac9}, {"AC10", ac10}};
    std::set<std::string> only;
    std::ofstream report;
    for (int i = 1; i < argc; ++i) {
        const std::string a = argv[i];
        if (a == "--report" && i + 1 < argc)
            report.open(argv[++i]);
        else
            only.insert(a);
    }
    auto print = [&](const std::string& s) {
        std::cout << s << std::flush;
        if (report) report << s << std::flush;
    };
    int passed = 0, run = 0;
    for (const auto& [id, fn] : all) {
        if (!only.empty() && !only.count(id)) continue;
        Outcome o;
        const auto t0 = std::chrono::steady_clock::now();
        try {
            fn(o);
        } catch (const std::exception& e) {
            o.pass = false;
            o.detail << "\n      error: " << e.what();
        }
        const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        ++run;
        passed += o.pass;
        std::ostringstream line;
        line << id << (id.size() < 4 ? "  " : " ") << (o.pass ? "PASS" : "FAIL") << "  (" << std::fixed
             << std::setprecision(1) << secs << " s)" << std::defaultfloat << o.detail.str() << "\n";
        print(line.str());
    }
    print(std::to_string(passed) + "/" + std::to_string(run) + " criteria pass\n");
    return 0;
}
