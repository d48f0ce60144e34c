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

#include <chrono>
#include <cmath>
#include <numbers>

#include "qlink/cavity.hpp"
#include "qlink/esd.hpp"
#include "qlink/experiment.hpp"
#include "qlink/lindblad.hpp"
#include "qlink/purification.hpp"
#include "qlink/rng.hpp"
#include "qlink/shuttle.hpp"

namespace qlink::exp {

namespace {

using Log = std::function<void(const std::string&)>;

std::string num(double x) { return format_number(x); }

void say(const Log& log, const std::string& s) {
    if (log) log(s);
}

// Adds context to numerical failures raised inside a sweep point.
template <class F>
auto with_context(const std::string& where, F&& f) {
    try {
        return f();
    } catch (const NumericalError& e) {
        throw NumericalError(where + ": " + e.what());
    } catch (const DimensionError& e) {
        throw DimensionError(where + ": " + e.what());
    }
}

Mat as_mat(const Eigen::MatrixXd& m) { return m.cast<cplx>(); }

// ---- cavity

struct CavitySetup {
    cavity::OptimizableParameters p;
    cavity::CavityParams c;
    double sigma = 0;
    int npoints = 1;
};

CavitySetup cavity_setup(const Config& cfg, double t2c) {
    CavitySetup s;
    s.p = cavity::OptimizableParameters::baseline();
    s.p.t = cfg.real("cavity.stop_time");
    s.c.T2_charge = t2c;
    s.c.T2_spin = cfg.real("cavity.t2_spin");
    s.c.kappa = cfg.real("cavity.kappa");
    s.c.fock_cutoff = int(cfg.integer("cavity.fock"));
    s.c.omega_r = s.p.B;
    s.sigma = cfg.real("cavity.jitter_sigma");
    s.npoints = s.sigma > 0 ? int(cfg.integer("cavity.jitter_points")) : 1;
    if (s.c.fock_cutoff < 1) throw ConfigError("cavity.fock: must be at least 1");
    if (s.npoints < 1) throw ConfigError("cavity.jitter_points: must be at least 1");
    const double lambda = cfg.real("cavity.scale");
    if (lambda != 1) {
        s.p = cavity::rescale_parameters(s.p, lambda);
        s.c = cavity::rescale_cavity(s.c, lambda);
        s.sigma /= lambda;
    }
    if (cfg.flag("cavity.optimize"))
        s.p = cavity::optimize_parameters(s.p, s.c, int(cfg.integer("cavity.max_iterations"))).params;
    return s;
}

cavity::RawBellResult cavity_pair(const Config& cfg, double t2c) {
    const auto s = cavity_setup(cfg, t2c);
    return cavity::generate_raw_pair(s.p, s.c, s.sigma, s.npoints);
}

std::vector<cavity::RawBellResult> cavity_pairs(const Config& cfg, const std::vector<double>& t2s, PartialLog& partial,
                                                const Log& log) {
    return parallel_map<cavity::RawBellResult>(
        t2s.size(), int(cfg.integer("run.jobs")),
        [&](size_t i) { return with_context("cavity T2,c = " + num(t2s[i]), [&] { return cavity_pair(cfg, t2s[i]); }); },
        [&](size_t i, const cavity::RawBellResult& r) {
            partial.write("cavity," + num(t2s[i]) + "," + num(r.fidelity) + "," + num(r.success_probability));
            say(log, "cavity T2,c = " + num(t2s[i]) + " ns: fidelity " + num(r.fidelity));
        });
}

void run_cavity(const Config& cfg, ResultRecord& rec, PartialLog& partial, const Log& log) {
    const auto t2s = cfg.reals("cavity.t2_charge");
    if (t2s.empty()) throw ConfigError("cavity.t2_charge: needs at least one value");
    const auto pairs = cavity_pairs(cfg, t2s, partial, log);
    Table t;
    t.columns = {"t2_charge_ns", "fidelity", "success_probability", "concurrence", "weighted_concurrence",
                 "vacuum_probability"};
    for (size_t i = 0; i < t2s.size(); ++i) {
        const auto& r = pairs[i];
        t.add({t2s[i], r.fidelity, r.success_probability, r.concurrence, r.weighted_concurrence, r.vacuum_probability});
        rec.metrics["fidelity_t2c_" + num(t2s[i])] = r.fidelity;
        rec.metrics["success_probability_t2c_" + num(t2s[i])] = r.success_probability;
        rec.matrices["raw_t2c_" + num(t2s[i])] = r.spin_state;
    }
    rec.series["table1"] = std::move(t);
}

void run_cavity_trace(const Config& cfg, ResultRecord& rec, PartialLog& partial, const Log& log) {
    const double t2c = cfg.reals("cavity.t2_charge").at(0);
    const auto s = cavity_setup(cfg, t2c);
    const int npts = int(cfg.integer("cavity.trace_points"));
    const double tend = cfg.real("cavity.trace_end");
    if (npts < 2 || !(tend > 0)) throw ConfigError("cavity.trace_points/trace_end: need >= 2 points over t > 0");
    // The first point is t = 0 (no odd-parity weight yet), so the grid starts one step in.
    std::vector<double> grid;
    for (int k = 1; k <= npts; ++k) grid.push_back(tend * k / npts);
    const Mat H = cavity::build_system_hamiltonian(s.p.dqd(1), s.p.dqd(2), s.c) * 1e-3;
    const auto traj = with_context("cavity trace", [&] {
        return lindblad::evolve(cavity::initial_state(s.p, s.c.fock_cutoff), H, cavity::dissipators(s.c), grid);
    });
    Table t;
    t.columns = {"t_ns", "fidelity", "concurrence", "weighted_concurrence", "success_probability",
                 "vacuum_probability", "trace_error", "hermiticity_error", "min_eigenvalue"};
    double peak = -1, tpeak = 0, worst_tr = 0, worst_herm = 0, min_eig = 0;
    size_t at_stop = 0;
    for (size_t k = 0; k < grid.size(); ++k) {
        const auto r = cavity::analyze_state(traj[k], s.c.fock_cutoff);
        const double tr = trace_error(traj[k]), he = hermiticity_error(traj[k]), me = min_eigenvalue(traj[k]);
        t.add({grid[k], r.fidelity, r.concurrence, r.weighted_concurrence, r.success_probability,
               r.vacuum_probability, tr, he, me});
        if (r.weighted_concurrence > peak) peak = r.weighted_concurrence, tpeak = grid[k];
        if (std::abs(grid[k] - s.p.t) < std::abs(grid[at_stop] - s.p.t)) at_stop = k;
        worst_tr = std::max(worst_tr, tr);
        worst_herm = std::max(worst_herm, he);
        min_eig = std::min(min_eig, me);
    }
    partial.write("cavity-trace," + num(t2c) + "," + num(peak));
    say(log, "trace: peak concurrence " + num(peak) + " at t = " + num(tpeak) + " ns");
    rec.metrics["peak_concurrence"] = peak;
    rec.metrics["peak_time_ns"] = tpeak;
    rec.metrics["stop_time_ns"] = grid[at_stop];
    for (const char* c : {"fidelity", "weighted_concurrence", "success_probability", "vacuum_probability"})
        rec.metrics[std::string(c) + "_at_stop"] = t.number(at_stop, c);
    rec.metrics["max_trace_error"] = worst_tr;
    rec.metrics["max_hermiticity_error"] = worst_herm;
    rec.metrics["min_eigenvalue"] = min_eig;
    rec.series["trace"] = std::move(t);
}

// ---- purification

purify::NoiseModel noise_model(const Config& cfg) {
    purify::NoiseModel n{cfg.real("purify.depol_1q"), cfg.real("purify.depol_2q"), cfg.real("purify.meas_error")};
    n.validate();
    return n;
}

purify::PurificationProtocol protocol(const Config& cfg, int rounds) {
    const auto& v = cfg.text("purify.variant");
    if (v == "s-gates") return purify::PurificationProtocol::s_gates(rounds, false);
    if (v == "s-identity") return purify::PurificationProtocol::s_gates(rounds, true);
    return purify::PurificationProtocol::canonical(rounds);
}

std::vector<int> round_counts(const Config& cfg) {
    std::vector<int> out;
    for (double r : cfg.reals("purify.rounds")) {
        if (r < 1 || r != std::floor(r)) throw ConfigError("purify.rounds: entries must be positive integers");
        out.push_back(int(r));
    }
    if (out.empty()) throw ConfigError("purify.rounds: needs at least one value");
    return out;
}

void run_purify(const Config& cfg, ResultRecord& rec, PartialLog& partial, const Log& log) {
    const auto noise = noise_model(cfg);
    const auto rounds = round_counts(cfg);
    std::vector<double> labels;
    std::vector<purify::RawSource> sources;
    std::string label_col;
    if (cfg.text("purify.source") == "werner") {
        const double f = cfg.real("purify.werner_fidelity");
        if (f < 0 || f > 1) throw ConfigError("purify.werner_fidelity: must lie in [0, 1]");
        const Mat p = proj(cavity::psi_minus());
        sources.push_back({f * p + (1 - f) / 3 * (Mat::Identity(4, 4) - p), cfg.real("purify.werner_success"),
                           cfg.real("purify.attempt_time")});
        labels.push_back(f);
        label_col = "werner_fidelity";
    } else {
        labels = cfg.reals("cavity.t2_charge");
        if (labels.empty()) throw ConfigError("cavity.t2_charge: needs at least one value");
        for (const auto& r : cavity_pairs(cfg, labels, partial, log))
            sources.push_back({r.spin_state, r.success_probability, r.attempt_time});
        label_col = "t2_charge_ns";
    }
    const long trials = cfg.integer("purify.monte_carlo_trials");
    if (trials < 0) throw ConfigError("purify.monte_carlo_trials: must be non-negative");

    Table t, fail;
    t.columns = {label_col, "rounds", "raw_fidelity", "raw_success", "fidelity", "concurrence", "expected_raw_pairs",
                 "expected_attempts", "generation_rate_mhz"};
    if (trials > 0) t.columns.insert(t.columns.end(), {"mc_expected_raw_pairs", "mc_stderr"});
    fail.columns = {label_col, "rounds", "stage", "failure_probability"};
    for (size_t i = 0; i < sources.size(); ++i)
        for (size_t j = 0; j < rounds.size(); ++j) {
            const int r = rounds[j];
            const auto proto = protocol(cfg, r);
            const auto st = with_context("purify " + num(labels[i]) + ", " + std::to_string(r) + " rounds",
                                         [&] { return purify::run_protocol(sources[i], proto, noise); });
            const double raw_f = fidelity_to_pure(sources[i].state, cavity::psi_minus());
            std::vector<Cell> row{labels[i], double(r), raw_f, sources[i].success_prob, st.fidelity, st.concurrence,
                                  st.expected_raw_pairs, st.expected_attempts, st.generation_rate * 1e3};
            if (trials > 0) {
                auto rng = make_stream(cfg.seed(), "purify-mc", i * rounds.size() + j);
                const auto mc = purify::monte_carlo_attempts(sources[i], proto, noise, rng, int(trials));
                row.push_back(mc.mean_attempts);
                row.push_back(mc.stderr_attempts);
            }
            t.add(std::move(row));
            for (size_t s = 0; s < st.per_round_failure.size(); ++s)
                fail.add({labels[i], double(r), double(s), st.per_round_failure[s]});
            const std::string key = num(labels[i]) + "_r" + std::to_string(r);
            rec.metrics["fidelity_" + key] = st.fidelity;
            rec.metrics["generation_rate_mhz_" + key] = st.generation_rate * 1e3;
            rec.matrices["purified_" + key] = st.final_state;
            say(log, "purify " + key + ": fidelity " + num(st.fidelity));
        }
    rec.series["table2"] = std::move(t);
    rec.series["failures"] = std::move(fail);
}

// ---- shuttling

shuttle::SweepParams sweep_params(const Config& cfg) {
    shuttle::SweepParams s;
    s.eps0 = cfg.real("shuttle.eps0");
    s.alpha = cfg.real("shuttle.alpha");
    s.tc = cfg.real("shuttle.tc");
    s.esoi = cfg.real("shuttle.esoi");
    s.nsteps = int(cfg.integer("shuttle.nsteps"));
    s.dressed_endpoints = cfg.flag("shuttle.dressed_endpoints");
    s.validate();
    return s;
}

shuttle::ChainConfig chain_config(const Config& cfg) {
    shuttle::ChainConfig c;
    c.n_dots = int(cfg.integer("shuttle.n_dots"));
    c.B = cfg.real("shuttle.zeeman");
    c.bx_total = cfg.real("shuttle.bx_total");
    c.bz_total = cfg.real("shuttle.bz_total");
    c.mean_magnitude = cfg.real("shuttle.mean_magnitude");
    c.sd_magnitude = cfg.real("shuttle.sd_magnitude");
    c.sd_phase = cfg.real("shuttle.sd_phase");
    c.phase_mode = cfg.text("shuttle.phase_mode") == "per-site" ? shuttle::PhaseMode::PerSite
                                                                 : shuttle::PhaseMode::PerLink;
    c.project_valley = cfg.flag("shuttle.project_valley");
    c.seed = cfg.seed();
    c.validate();
    return c;
}

shuttle::ChargeNoiseOptions noise_options(const Config& cfg) {
    shuttle::ChargeNoiseOptions o;
    o.n_processes = int(cfg.integer("noise.processes"));
    o.s_1mhz = cfg.real("noise.s_1mhz");
    o.tau_min = cfg.real("noise.tau_min");
    o.tau_max = cfg.real("noise.tau_max");
    if (o.n_processes < 1 || !(o.tau_min > 0) || !(o.tau_max >= o.tau_min) || o.s_1mhz < 0)
        throw ConfigError("noise: need processes >= 1, 0 < tau_min <= tau_max and s_1mhz >= 0");
    return o;
}

struct ChainOutcome {
    double raw = 0, purified = 0, purify_success = 0, valley_success = 0;
    std::vector<double> trace;
    Mat raw_state, purified_state;
    Ptm ptm;
};

// Chain k draws its sites from a seed derived from (master seed, k) and, with
// charge noise on, one noise realization per sweep from another derived seed.
ChainOutcome one_chain(shuttle::ChainConfig cc, const shuttle::SweepParams& sw, std::uint64_t master, size_t k,
                       bool charge_noise, const shuttle::ChargeNoiseOptions& nopt) {
    cc.seed = stream_key(master, "shuttle-chain", k);
    std::vector<shuttle::NoiseTrace> noise;
    if (charge_noise) {
        const std::uint64_t ns = stream_key(master, "shuttle-noise", k);
        for (int d = 0; d + 1 < cc.n_dots; ++d)
            noise.push_back(shuttle::charge_noise_trace(ns, std::uint64_t(d), sw.duration(), sw.duration() / sw.nsteps,
                                                        nopt));
    }
    const auto r = shuttle::shuttle_chain(cc, sw, noise);
    const auto p = shuttle::purify_shuttled_pair(r.final_state);
    return {r.concurrence_trace.back(), concurrence(p.state), p.success_prob, r.success_probability,
            r.concurrence_trace, r.final_state, p.state, r.ptm};
}

struct Ensemble {
    std::vector<ChainOutcome> chains;
    Mat raw_mean, purified_mean;
    Ptm ptm = Ptm::Zero();
    double raw = 0, purified = 0;
};

Ensemble ensemble(const Config& cfg, shuttle::ChainConfig cc, const shuttle::SweepParams& sw, long nchains,
                  const std::string& tag, PartialLog& partial, const Log& log) {
    if (nchains < 1) throw ConfigError("chain count must be positive");
    const bool cn = cfg.flag("shuttle.charge_noise");
    const auto nopt = cn ? noise_options(cfg) : shuttle::ChargeNoiseOptions{};
    Ensemble e;
    e.chains = parallel_map<ChainOutcome>(
        size_t(nchains), int(cfg.integer("run.jobs")),
        [&](size_t k) {
            return with_context(tag + " chain " + std::to_string(k),
                                [&] { return one_chain(cc, sw, cfg.seed(), k, cn, nopt); });
        },
        [&](size_t k, const ChainOutcome& o) {
            partial.write(tag + "," + std::to_string(k) + "," + num(o.raw) + "," + num(o.purified));
            if ((k + 1) % 10 == 0) say(log, tag + ": " + std::to_string(k + 1) + " chains done");
        });
    e.raw_mean = Mat::Zero(4, 4);
    e.purified_mean = Mat::Zero(4, 4);
    for (const auto& o : e.chains) {
        e.raw += o.raw / double(nchains);
        e.purified += o.purified / double(nchains);
        e.raw_mean += o.raw_state / double(nchains);
        e.purified_mean += o.purified_state / double(nchains);
        e.ptm += o.ptm / double(nchains);
    }
    return e;
}

void run_shuttle(const Config& cfg, ResultRecord& rec, PartialLog& partial, const Log& log) {
    const auto sw = sweep_params(cfg);
    const auto cc = chain_config(cfg);
    const auto e = ensemble(cfg, cc, sw, cfg.integer("shuttle.chains"), "shuttle", partial, log);

    Table chains, traces;
    chains.columns = {"chain", "raw_concurrence", "purified_concurrence", "purify_success", "valley_success"};
    traces.columns = {"chain", "dot", "concurrence"};
    const long ntr = cfg.integer("shuttle.traces");
    double worst = 1;
    for (size_t k = 0; k < e.chains.size(); ++k) {
        const auto& o = e.chains[k];
        chains.add({double(k), o.raw, o.purified, o.purify_success, o.valley_success});
        worst = std::min(worst, o.purified);
        if (long(k) < ntr)
            for (size_t d = 0; d < o.trace.size(); ++d) traces.add({double(k), double(d), o.trace[d]});
    }
    rec.metrics["mean_raw_concurrence"] = e.raw;
    rec.metrics["mean_purified_concurrence"] = e.purified;
    rec.metrics["min_purified_concurrence"] = worst;
    rec.metrics["ensemble_raw_concurrence"] = concurrence(e.raw_mean);
    rec.metrics["ensemble_purified_concurrence"] = concurrence(e.purified_mean);
    rec.matrices["ensemble_raw"] = e.raw_mean;
    rec.matrices["ensemble_purified"] = e.purified_mean;
    rec.matrices["ptm_mean"] = as_mat(e.ptm);
    Table ptm;
    ptm.columns = {"row", "col", "value"};
    for (int i = 0; i < 4; ++i)
        for (int j = 0; j < 4; ++j) ptm.add({double(i), double(j), e.ptm(i, j)});
    rec.series["chains"] = std::move(chains);
    rec.series["traces"] = std::move(traces);
    rec.series["ptm"] = std::move(ptm);

    const auto scan = cfg.reals("shuttle.sd_phase_scan");
    if (!scan.empty()) {
        Table t;
        t.columns = {"sd_phase", "mean_raw_concurrence", "mean_purified_concurrence"};
        for (double sd : scan) {
            auto c2 = cc;
            c2.sd_phase = sd;
            c2.validate();
            const auto s = ensemble(cfg, c2, sw, cfg.integer("shuttle.chains"), "scan " + num(sd), partial, log);
            t.add({sd, s.raw, s.purified});
            say(log, "SD_phi = " + num(sd) + ": mean concurrence " + num(s.raw));
        }
        rec.series["sd_scan"] = std::move(t);
    }
}

// One DQD step per valley phase step, noiseless and with
// charge-noise realizations. Concurrences are compared after averaging over
// realizations, for the raw and the purified pair.
void run_charge_noise(const Config& cfg, ResultRecord& rec, PartialLog& partial, const Log& log) {
    auto sw = sweep_params(cfg);
    sw.tc = cfg.real("noise.tc");
    sw.validate();
    shuttle::ChainConfig cc;
    cc.n_dots = 2;
    cc.B = cfg.real("shuttle.zeeman");
    cc.bx_total = cfg.real("noise.bx");
    cc.bz_total = cfg.real("noise.bz");
    cc.project_valley = cfg.flag("shuttle.project_valley");
    const double mag = cfg.real("noise.magnitude");
    const auto dphis = cfg.reals("noise.dphi");
    if (dphis.empty()) throw ConfigError("noise.dphi: needs at least one value");
    const auto nopt = noise_options(cfg);
    const long nreal = cfg.integer("noise.realizations");
    if (nreal < 1) throw ConfigError("noise.realizations: must be positive");
    const double dt = sw.duration() / sw.nsteps;

    struct Point {
        double c = 0, cp = 0;
        Ptm ptm;
    };
    auto simulate = [&](const std::vector<shuttle::SiteParams>& sites, const shuttle::NoiseTrace& tr) {
        const auto r = tr ? shuttle::shuttle_chain(cc, sites, sw, {tr}) : shuttle::shuttle_chain(cc, sites, sw);
        return Point{r.concurrence_trace.back(), concurrence(shuttle::purify_shuttled_pair(r.final_state).state),
                     r.ptm};
    };
    // Realization k uses the same noise trace at every phase step.
    const size_t nd = dphis.size(), nr = size_t(nreal);
    const auto pts = parallel_map<Point>(
        nd * (nr + 1), int(cfg.integer("run.jobs")),
        [&](size_t i) {
            const size_t j = i / (nr + 1), k = i % (nr + 1);
            const std::vector<shuttle::SiteParams> sites{{mag, 0}, {mag, dphis[j]}};
            return with_context("dphi " + num(dphis[j]) + ", realization " + std::to_string(k), [&] {
                if (k == 0) return simulate(sites, {});
                return simulate(sites, shuttle::charge_noise_trace(cfg.seed(), k - 1, sw.duration(), dt, nopt));
            });
        },
        [&](size_t i, const Point& p) {
            partial.write("charge-noise," + std::to_string(i / (nr + 1)) + "," + std::to_string(i % (nr + 1)) + "," +
                          num(p.c));
        });

    Table real, summary, ptm;
    real.columns = {"dphi", "realization", "concurrence", "purified_concurrence", "delta_concurrence",
                    "delta_purified_concurrence"};
    summary.columns = {"dphi", "noiseless_concurrence", "mean_concurrence", "delta_mean",
                       "max_abs_delta_single", "noiseless_purified", "mean_purified", "delta_mean_purified"};
    ptm.columns = {"dphi", "row", "col", "noiseless", "noisy_mean"};
    double worst = 0, worst_p = 0, worst_single = 0, worst_ptm = 0;
    for (size_t j = 0; j < nd; ++j) {
        const Point& clean = pts[j * (nr + 1)];
        double mc = 0, mp = 0, single = 0;
        Ptm mean = Ptm::Zero();
        for (size_t k = 1; k <= nr; ++k) {
            const Point& p = pts[j * (nr + 1) + k];
            real.add({dphis[j], double(k - 1), p.c, p.cp, p.c - clean.c, p.cp - clean.cp});
            mc += p.c / double(nr);
            mp += p.cp / double(nr);
            mean += p.ptm / double(nr);
            single = std::max(single, std::abs(p.c - clean.c));
        }
        summary.add({dphis[j], clean.c, mc, mc - clean.c, single, clean.cp, mp, mp - clean.cp});
        for (int a = 0; a < 4; ++a)
            for (int b = 0; b < 4; ++b) ptm.add({dphis[j], double(a), double(b), clean.ptm(a, b), mean(a, b)});
        worst = std::max(worst, std::abs(mc - clean.c));
        worst_p = std::max(worst_p, std::abs(mp - clean.cp));
        worst_single = std::max(worst_single, single);
        worst_ptm = std::max(worst_ptm, (mean - clean.ptm).cwiseAbs().maxCoeff());
        say(log, "dphi = " + num(dphis[j]) + ": noisy - noiseless concurrence " + num(mc - clean.c) +
                     " (purified " + num(mp - clean.cp) + ")");
    }
    rec.metrics["max_abs_mean_delta_concurrence"] = worst;
    rec.metrics["max_abs_mean_delta_purified"] = worst_p;
    rec.metrics["max_abs_single_delta_concurrence"] = worst_single;
    rec.metrics["max_ptm_deviation"] = worst_ptm;
    rec.series["realizations"] = std::move(real);
    rec.series["summary"] = std::move(summary);
    rec.series["ptm"] = std::move(ptm);
}

// ---- ESD

void run_esd(const Config& cfg, ResultRecord& rec, PartialLog& partial, const Log& log) {
    const int n = int(cfg.integer("esd.n"));
    if (n < 2 || n > 6) throw ConfigError("esd.n: supported range is 2..6 (the circuit needs 2n+1 qubits)");
    const int layers = int(cfg.integer("esd.layers"));
    if (layers < 0) throw ConfigError("esd.layers: must be non-negative");
    const auto h = esd::SpinRing::random(n, cfg.real("esd.coupling"), cfg.seed());
    const auto fit = with_context("variational fit", [&] {
        return esd::optimize_vha(h, layers, cfg.real("esd.tolerance"), int(cfg.integer("esd.restarts")), cfg.seed());
    });
    say(log, "VQE energy error " + num(fit.error) + " after " + std::to_string(fit.iterations) + " iterations");
    partial.write("vqe," + num(fit.error));

    const auto xis = cfg.reals("esd.xi");
    esd::SweepOptions opt;
    opt.bell_f = cfg.real("esd.bell_f");
    opt.circuit = cfg.flag("esd.circuit");
    const auto rows = parallel_map<esd::SweepRow>(
        xis.size(), int(cfg.integer("run.jobs")),
        [&](size_t i) {
            return with_context("xi = " + num(xis[i]),
                                [&] { return esd::energy_error_sweep(h, fit.params, {xis[i]}, opt).at(0); });
        },
        [&](size_t, const esd::SweepRow& r) {
            partial.write("esd," + num(r.xi) + "," + num(r.unmitigated) + "," + num(r.ideal[0]));
            say(log, "xi = " + num(r.xi) + ": unmitigated " + num(r.unmitigated) + ", n=2 " + num(r.ideal[0]));
        });

    Table longf, wide, ring;
    longf.columns = {"xi", "mode", "energy_error"};
    wide.columns = {"xi", "unmitigated", "ideal_n2", "ideal_n3", "ideal_n4", "noisy_bell", "noisy_derangement",
                    "both"};
    for (const auto& r : rows) {
        const std::vector<std::pair<const char*, double>> modes{
            {"unmitigated", r.unmitigated}, {"ideal_n2", r.ideal[0]}, {"ideal_n3", r.ideal[1]},
            {"ideal_n4", r.ideal[2]},       {"noisy_bell", r.noisy_bell}, {"noisy_derangement", r.noisy_derangement},
            {"both", r.both}};
        std::vector<Cell> w{r.xi};
        for (const auto& [m, v] : modes) {
            w.push_back(v);
            if (!std::isnan(v)) longf.add({r.xi, std::string(m), v});
            if (!std::isnan(v)) rec.metrics[std::string(m) + "_xi_" + num(r.xi)] = v;
        }
        wide.add(std::move(w));
    }
    ring.columns = {"site", "omega"};
    for (int k = 0; k < n; ++k) ring.add({double(k), h.omega[size_t(k)]});
    rec.metrics["ground_energy"] = h.ground_energy();
    rec.metrics["vqe_energy_error"] = fit.error;
    rec.metrics["vqe_iterations"] = fit.iterations;
    rec.metrics["vqe_reached"] = fit.reached ? 1 : 0;
    rec.series["energy_error"] = std::move(longf);
    rec.series["sweep"] = std::move(wide);
    rec.series["ring"] = std::move(ring);
}

// ---- comparison

void add_view(ResultRecord& rec, Table& t, const std::string& name, const BellView& v) {
    static const char* labels[] = {"phi+", "phi-", "psi+", "psi-"};
    for (int i = 0; i < 4; ++i)
        for (int j = 0; j < 4; ++j)
            t.add({name, std::string(labels[i]), std::string(labels[j]), v.magnitudes(i, j)});
    rec.metrics["best_bell_fidelity_" + name] = v.best_fidelity;
    rec.matrices[name] = v.state;
}

void run_compare(const Config& cfg, ResultRecord& rec, PartialLog& partial, const Log& log) {
    const double t2c = cfg.real("compare.t2_charge");
    const long rounds = cfg.integer("compare.rounds");
    if (rounds < 1) throw ConfigError("compare.rounds: must be positive");
    const auto raw = with_context("cavity pair", [&] { return cavity_pair(cfg, t2c); });
    partial.write("cavity," + num(raw.fidelity));
    const auto pur = purify::run_protocol({raw.spin_state, raw.success_probability, raw.attempt_time},
                                          protocol(cfg, int(rounds)), noise_model(cfg));
    say(log, "cavity: raw " + num(raw.fidelity) + ", purified " + num(pur.fidelity));

    auto sw = sweep_params(cfg);
    sw.tc = cfg.real("compare.shuttle_tc");
    sw.validate();
    auto cc = chain_config(cfg);
    cc.sd_phase = cfg.real("compare.shuttle_sd_phase");
    cc.validate();
    const auto e = ensemble(cfg, cc, sw, cfg.integer("compare.chains"), "compare", partial, log);

    const auto cmp = compare_bell_basis(raw.spin_state, pur.final_state, e.raw_mean, e.purified_mean,
                                        int(cfg.integer("compare.restarts")), cfg.seed());
    Table t;
    t.columns = {"state", "row", "col", "magnitude"};
    add_view(rec, t, "cavity_raw", cmp.cavity_raw);
    add_view(rec, t, "cavity_purified", cmp.cavity_purified);
    add_view(rec, t, "shuttle_raw", cmp.shuttle_raw);
    add_view(rec, t, "shuttle_purified", cmp.shuttle_purified);
    rec.metrics["shuttle_mean_raw_concurrence"] = e.raw;
    rec.metrics["shuttle_mean_purified_concurrence"] = e.purified;
    rec.series["bell_magnitudes"] = std::move(t);
    say(log, "shuttle: raw " + num(cmp.shuttle_raw.best_fidelity) + ", purified " +
                 num(cmp.shuttle_purified.best_fidelity));
}

}  // namespace

std::string record_id(const Config& cfg) {
    const auto& id = cfg.text("run.id");
    return id.empty() ? cfg.text("run.experiment") : id;
}

ResultRecord run_experiment(const Config& cfg, const Log& log) {
    const auto t0 = std::chrono::steady_clock::now();
    ResultRecord rec;
    rec.id = record_id(cfg);
    rec.kind = cfg.text("run.experiment");
    rec.config_hash = cfg.hash();
    rec.config = cfg.values();
    if (cfg.integer("run.jobs") < 1) throw ConfigError("run.jobs: must be at least 1");
    PartialLog partial(cfg.text("run.out"), rec.id);
    if (rec.kind == "cavity") run_cavity(cfg, rec, partial, log);
    else if (rec.kind == "cavity-trace") run_cavity_trace(cfg, rec, partial, log);
    else if (rec.kind == "purify") run_purify(cfg, rec, partial, log);
    else if (rec.kind == "shuttle") run_shuttle(cfg, rec, partial, log);
    else if (rec.kind == "charge-noise") run_charge_noise(cfg, rec, partial, log);
    else if (rec.kind == "esd") run_esd(cfg, rec, partial, log);
    else if (rec.kind == "compare") run_compare(cfg, rec, partial, log);
    else throw ConfigError("run.experiment: unknown experiment '" + rec.kind + "'");
    partial.finish();
    rec.duration_s = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    return rec;
}

const std::vector<std::string>& repro_names() {
    static const std::vector<std::string> n{"table1", "table2", "fig3", "fig7", "fig8", "fig10c", "fig11"};
    return n;
}

std::string repro_yaml(const std::string& name) {
    static const std::map<std::string, std::string> recipes = {
        {"table1",
         "run:\n  experiment: cavity\n  id: table1\ncavity:\n  t2_charge: [400, 100, 50]\n"},
        {"table2",
         "run:\n  experiment: purify\n  id: table2\ncavity:\n  t2_charge: [400, 100, 50]\npurify:\n"
         "  rounds: [2, 4]\n"},
        {"fig3",
         "run:\n  experiment: cavity-trace\n  id: fig3\ncavity:\n  t2_charge: [400]\n  trace_end: 30\n"
         "  trace_points: 60\n"},
        {"fig7",
         "run:\n  experiment: shuttle\n  id: fig7\nshuttle:\n  chains: 100\n  traces: 5\n"
         "  sd_phase_scan: [0, 0.39269908169872414, 0.7853981633974483, 1.5707963267948966]\n"},
        {"fig8", "run:\n  experiment: compare\n  id: fig8\n"},
        {"fig10c", "run:\n  experiment: esd\n  id: fig10c\nesd:\n  xi: [0.1, 0.3, 1, 3, 5]\n"},
        {"fig11", "run:\n  experiment: charge-noise\n  id: fig11\nnoise:\n  realizations: 100\n"},
    };
    const auto it = recipes.find(name);
    if (it == recipes.end()) throw ConfigError("repro: unknown recipe '" + name + "'");
    return it->second;
}

std::vector<Check> invariant_suite(std::uint64_t seed, int fock_cutoff) {
    std::vector<Check> out;
    auto add = [&](std::string name, double value, double bound, bool pass) {
        out.push_back({std::move(name), value, bound, pass});
    };

    // State validity along a cavity trajectory and on both backends of a small one.
    double tr = 0, herm = 0, pos = 0, agree = 0;
    auto scan = [&](const std::vector<Mat>& traj) {
        for (const auto& r : traj) {
            tr = std::max(tr, trace_error(r));
            herm = std::max(herm, hermiticity_error(r));
            pos = std::min(pos, min_eigenvalue(r));
        }
    };
    {
        auto p = cavity::OptimizableParameters::baseline();
        cavity::CavityParams c;
        c.fock_cutoff = fock_cutoff;
        std::vector<double> grid;
        for (int k = 1; k <= 30; ++k) grid.push_back(k);
        const Mat H = cavity::build_system_hamiltonian(p.dqd(1), p.dqd(2), c) * 1e-3;
        scan(lindblad::evolve(cavity::initial_state(p, fock_cutoff), H, cavity::dissipators(c), grid));

        c.fock_cutoff = 2;
        c.T2_charge = 100;
        const Mat H2 = cavity::build_system_hamiltonian(p.dqd(1), p.dqd(2), c) * 1e-3;
        const Mat r0 = cavity::initial_state(p, 2);
        std::vector<double> g2;
        for (int k = 1; k <= 10; ++k) g2.push_back(1.5 * k);
        lindblad::EvolveOptions po;
        po.backend = lindblad::Backend::Propagator;
        const auto a = lindblad::evolve(r0, H2, cavity::dissipators(c), g2);
        const auto b = lindblad::evolve(r0, H2, cavity::dissipators(c), g2, po);
        scan(a);
        scan(b);
        for (size_t k = 0; k < g2.size(); ++k) agree = std::max(agree, (a[k] - b[k]).cwiseAbs().maxCoeff());
    }
    add("trace preservation", tr, 1e-9, tr <= 1e-9);
    add("hermiticity", herm, 1e-9, herm <= 1e-9);
    add("positivity (min eigenvalue)", pos, -1e-7, pos >= -1e-7);
    add("direct vs propagator backend", agree, 1e-6, agree <= 1e-6);

    // Valley tunneling: norm identity and the amplitudes read off the Hamiltonian.
    double tvc = 0;
    for (double d = -std::numbers::pi; d <= std::numbers::pi; d += 0.1) {
        const auto t = shuttle::valley_tunneling(30, d);
        tvc = std::max(tvc, std::abs(std::norm(t.vc) + std::norm(t.vf) - 900) / 900);
    }
    {
        shuttle::SweepParams sw;
        sw.tc = 25;
        sw.esoi = 0;
        shuttle::SpinFields f;
        f.B = 0;
        for (double d : {0.0, 0.7, 2.0, std::numbers::pi}) {
            const shuttle::SiteParams l{60, d}, r{70, 0};
            Mat w = Mat::Zero(8, 8);
            w.topLeftCorner(4, 4) = kron(shuttle::valley_basis(l.phase), pauli(0));
            w.bottomRightCorner(4, 4) = kron(shuttle::valley_basis(r.phase), pauli(0));
            const Mat h = w.adjoint() * shuttle::build_shuttle_hamiltonian(l, r, sw, f, 0.0) * w;
            const auto t = shuttle::valley_tunneling(25, d);
            tvc = std::max({tvc, std::abs(h(0, 4) - t.vc), std::abs(h(0, 6) - t.vf)});
        }
    }
    add("valley tunneling identities", tvc, 1e-12, tvc <= 1e-12);

    auto rng = make_stream(seed, "validate");
    double lu = 0;
    for (int k = 0; k < 50; ++k) {
        const Mat rho = random_density(4, rng);
        const Mat u = kron(random_unitary(2, rng), random_unitary(2, rng));
        lu = std::max(lu, std::abs(concurrence(rho) - concurrence(u * rho * u.adjoint())));
    }
    add("concurrence local-unitary invariance", lu, 1e-9, lu <= 1e-9);

    double tel = 0;
    std::uniform_real_distribution<double> uni(0, 1);
    for (int k = 0; k < 100; ++k) {
        Eigen::Vector4d w(uni(rng), uni(rng), uni(rng), uni(rng));
        w /= w.sum();
        Mat res = Mat::Zero(4, 4);
        for (int a = 0; a < 4; ++a) res += w[a] * proj(bell_state(a));
        const Mat rho = random_density(2, rng);
        Mat expect = Mat::Zero(2, 2);
        for (int a = 0; a < 4; ++a) expect += w[a] * pauli(a) * rho * pauli(a);
        tel = std::max(tel, (esd::teleport(rho, res) - expect).cwiseAbs().maxCoeff());
    }
    add("teleportation equals Pauli channel", tel, 1e-10, tel <= 1e-10);
    return out;
}

}  // namespace qlink::exp
