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

#include "qlink/config.hpp"

#include <openssl/evp.h>
#include <yaml-cpp/yaml.h>

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>

#include "qlink/qmath.hpp"

namespace qlink::exp {

namespace {

const SchemaEntry* find_entry(const std::string& path) {
    for (const auto& e : schema())
        if (e.path == path) return &e;
    return nullptr;
}

std::string trim(std::string s) {
    const auto b = s.find_first_not_of(" \t");
    if (b == std::string::npos) return "";
    const auto e = s.find_last_not_of(" \t");
    return s.substr(b, e - b + 1);
}

bool parse_real(const std::string& s, double& out) {
    const std::string t = trim(s);
    if (t.empty()) return false;
    const char* end = t.data() + t.size();
    auto [p, ec] = std::from_chars(t.data(), end, out);
    return ec == std::errc() && p == end && std::isfinite(out);
}

std::vector<std::string> split_list(const std::string& s) {
    std::string t = trim(s);
    if (!t.empty() && t.front() == '[' && t.back() == ']') t = t.substr(1, t.size() - 2);
    std::vector<std::string> out;
    if (trim(t).empty()) return out;
    std::stringstream ss(t);
    std::string item;
    while (std::getline(ss, item, ',')) out.push_back(trim(item));
    return out;
}

[[noreturn]] void bad(const std::string& path, const std::string& what) { throw ConfigError(path + ": " + what); }

// Canonical text for a validated value.
std::string normalize(const SchemaEntry& e, const std::string& raw) {
    const std::string v = trim(raw);
    double x;
    switch (e.kind) {
        case Kind::Real:
            if (!parse_real(v, x)) bad(e.path, "expected a number, got '" + v + "'");
            return format_number(x);
        case Kind::Integer:
            if (!parse_real(v, x) || x != std::floor(x) || std::abs(x) > 9.0e15)
                bad(e.path, "expected an integer, got '" + v + "'");
            return std::to_string(static_cast<long long>(x));
        case Kind::Flag:
            if (v == "true" || v == "yes" || v == "on" || v == "1") return "true";
            if (v == "false" || v == "no" || v == "off" || v == "0") return "false";
            bad(e.path, "expected true or false, got '" + v + "'");
        case Kind::Text:
            if (!e.choices.empty() && std::find(e.choices.begin(), e.choices.end(), v) == e.choices.end()) {
                std::string opts;
                for (const auto& c : e.choices) opts += (opts.empty() ? "" : ", ") + c;
                bad(e.path, "expected one of {" + opts + "}, got '" + v + "'");
            }
            return v;
        case Kind::RealList: {
            std::string out;
            for (const auto& item : split_list(v)) {
                if (!parse_real(item, x)) bad(e.path, "expected a list of numbers, got '" + item + "'");
                out += (out.empty() ? "" : ", ") + format_number(x);
            }
            return out;
        }
    }
    return v;
}

}  // namespace

std::string format_number(double x) {
    char buf[64];
    auto [p, ec] = std::to_chars(buf, buf + sizeof buf, x);
    if (ec != std::errc()) throw NumericalError("number formatting failed");
    return std::string(buf, p);
}

const std::vector<SchemaEntry>& schema() {
    static const std::vector<SchemaEntry> s = {
        {"run.experiment", Kind::Text, "cavity", "experiment to run",
         {"cavity", "cavity-trace", "purify", "shuttle", "charge-noise", "esd", "compare"}},
        {"run.seed", Kind::Integer, "1", "master seed; every random stream derives from it", {}},
        {"run.id", Kind::Text, "", "output file stem (default: experiment name)", {}},
        {"run.out", Kind::Text, "results", "output directory", {}},
        {"run.format", Kind::Text, "both", "output format", {"csv", "json", "both"}},
        {"run.jobs", Kind::Integer, "1", "worker threads for sweep points", {}},

        {"cavity.t2_charge", Kind::RealList, "400", "charge dephasing times T2,c (ns); one row each", {}},
        {"cavity.t2_spin", Kind::Real, "120000", "spin dephasing time (ns)", {}},
        {"cavity.kappa", Kind::Real, "0.001", "photon loss rate (1/ns)", {}},
        {"cavity.fock", Kind::Integer, "7", "photon-number cutoff", {}},
        {"cavity.jitter_sigma", Kind::Real, "0.5", "std. dev. of the stopping time (ns); 0 disables averaging", {}},
        {"cavity.jitter_points", Kind::Integer, "13", "stopping-time samples over +-3 sigma", {}},
        {"cavity.stop_time", Kind::Real, "15", "stopping time (ns)", {}},
        {"cavity.scale", Kind::Real, "1", "rescale all energies by this factor (times by its inverse)", {}},
        {"cavity.optimize", Kind::Flag, "false", "refine the couplings by BFGS before generating pairs", {}},
        {"cavity.max_iterations", Kind::Integer, "20", "optimizer iteration cap", {}},
        {"cavity.trace_end", Kind::Real, "30", "cavity-trace: last time point (ns)", {}},
        {"cavity.trace_points", Kind::Integer, "61", "cavity-trace: number of time points", {}},

        {"purify.source", Kind::Text, "cavity", "raw pairs from the cavity model or a Werner state",
         {"cavity", "werner"}},
        {"purify.rounds", Kind::RealList, "2", "round counts to evaluate", {}},
        {"purify.variant", Kind::Text, "canonical", "protocol variant", {"canonical", "s-gates", "s-identity"}},
        {"purify.depol_1q", Kind::Real, "0.0002", "single-qubit depolarizing probability", {}},
        {"purify.depol_2q", Kind::Real, "0.001", "two-qubit depolarizing probability", {}},
        {"purify.meas_error", Kind::Real, "0.001", "measurement flip probability", {}},
        {"purify.werner_fidelity", Kind::Real, "0.9", "werner source: fidelity to psi-", {}},
        {"purify.werner_success", Kind::Real, "0.9", "werner source: heralding probability", {}},
        {"purify.attempt_time", Kind::Real, "15", "werner source: time per attempt (ns)", {}},
        {"purify.monte_carlo_trials", Kind::Integer, "0", "sampled protocol runs for attempt statistics", {}},

        {"shuttle.n_dots", Kind::Integer, "25", "dots in the chain", {}},
        {"shuttle.chains", Kind::Integer, "100", "disorder realizations", {}},
        {"shuttle.tc", Kind::Real, "30", "bare tunnel coupling (ueV)", {}},
        {"shuttle.eps0", Kind::Real, "800", "detuning sweep amplitude (ueV)", {}},
        {"shuttle.alpha", Kind::Real, "300", "detuning sweep rate (ueV/ns)", {}},
        {"shuttle.esoi", Kind::Real, "1", "spin-orbit coupling (ueV)", {}},
        {"shuttle.nsteps", Kind::Integer, "4000", "piecewise-constant steps per sweep", {}},
        {"shuttle.zeeman", Kind::Real, "40", "Zeeman splitting B (ueV)", {}},
        {"shuttle.bx_total", Kind::Real, "1", "transverse gradient across the chain (ueV)", {}},
        {"shuttle.bz_total", Kind::Real, "3", "longitudinal gradient across the chain (ueV)", {}},
        {"shuttle.mean_magnitude", Kind::Real, "75", "mean valley coupling |Delta| (ueV)", {}},
        {"shuttle.sd_magnitude", Kind::Real, "10", "std. dev. of |Delta| (ueV)", {}},
        {"shuttle.sd_phase", Kind::Real, "0.7853981633974483", "std. dev. of the valley phase (rad)", {}},
        {"shuttle.phase_mode", Kind::Text, "per-link", "phase disorder model", {"per-link", "per-site"}},
        {"shuttle.dressed_endpoints", Kind::Flag, "false",
         "start and end each sweep in the dressed orbital states instead of bare |L>, |R>", {}},
        {"shuttle.project_valley", Kind::Flag, "true", "post-select the ground valley after each sweep", {}},
        {"shuttle.sd_phase_scan", Kind::RealList, "", "extra SD_phi values for a mean-concurrence scan", {}},
        {"shuttle.traces", Kind::Integer, "1", "chains whose per-dot concurrence is emitted", {}},
        {"shuttle.charge_noise", Kind::Flag, "false", "add charge noise to every sweep", {}},

        {"noise.realizations", Kind::Integer, "100", "charge-noise: noise realizations", {}},
        {"noise.s_1mhz", Kind::Real, "1e-06", "noise density at 1 MHz (ueV^2/Hz)", {}},
        {"noise.processes", Kind::Integer, "1000", "Ornstein-Uhlenbeck processes", {}},
        {"noise.tau_min", Kind::Real, "1", "shortest correlation time (ns)", {}},
        {"noise.tau_max", Kind::Real, "1000000", "longest correlation time (ns)", {}},
        {"noise.tc", Kind::Real, "20", "charge-noise: tunnel coupling (ueV)", {}},
        {"noise.magnitude", Kind::Real, "75", "charge-noise: |Delta| of both dots (ueV)", {}},
        {"noise.dphi", Kind::RealList, "0, 0.5, 1, 1.5, 2, 2.5, 3",
         "charge-noise: valley phase steps to scan (rad; pi itself empties the ground valley)", {}},
        {"noise.bx", Kind::Real, "1", "charge-noise: transverse gradient (ueV)", {}},
        {"noise.bz", Kind::Real, "1", "charge-noise: longitudinal gradient (ueV)", {}},

        {"esd.n", Kind::Integer, "6", "qubits per copy", {}},
        {"esd.coupling", Kind::Real, "0.1", "ring coupling J", {}},
        {"esd.layers", Kind::Integer, "20", "ansatz layers", {}},
        {"esd.tolerance", Kind::Real, "0.0001", "target energy error of the noiseless ansatz", {}},
        {"esd.restarts", Kind::Integer, "4", "optimizer restarts", {}},
        {"esd.xi", Kind::RealList, "0.1, 0.3, 1, 3, 5", "expected gate errors in state preparation", {}},
        {"esd.bell_f", Kind::Real, "0.995", "fidelity of the distributed pairs", {}},
        {"esd.circuit", Kind::Flag, "true", "also simulate the 2N+1 qubit derangement circuit", {}},

        {"compare.t2_charge", Kind::Real, "400", "cavity T2,c for the comparison (ns)", {}},
        {"compare.rounds", Kind::Integer, "2", "purification rounds for the cavity pair", {}},
        {"compare.shuttle_tc", Kind::Real, "26", "tunnel coupling for the shuttle ensemble (ueV)", {}},
        {"compare.shuttle_sd_phase", Kind::Real, "0.7853981633974483",
         "valley phase spread for the shuttle ensemble (rad)", {}},
        {"compare.chains", Kind::Integer, "100", "shuttle ensemble size", {}},
        {"compare.restarts", Kind::Integer, "8", "restarts of the local-rotation search", {}},
    };
    return s;
}

std::string schema_help() {
    std::ostringstream os;
    std::string section;
    for (const auto& e : schema()) {
        const std::string sec = e.path.substr(0, e.path.find('.'));
        if (sec != section) os << (section.empty() ? "" : "\n") << "[" << (section = sec) << "]\n";
        os << "  " << e.path << " = " << (e.fallback.empty() ? "\"\"" : e.fallback) << "\n      " << e.help;
        if (!e.choices.empty()) {
            os << " (";
            for (size_t i = 0; i < e.choices.size(); ++i) os << (i ? "|" : "") << e.choices[i];
            os << ")";
        }
        os << "\n";
    }
    return os.str();
}

Config Config::parse(const std::string& yaml, const std::string& origin) {
    YAML::Node root;
    try {
        root = YAML::Load(yaml);
    } catch (const YAML::Exception& e) {
        throw ConfigError(origin + ": line " + std::to_string(e.mark.line + 1) + ": " + e.msg);
    }
    Config c;
    if (!root || root.IsNull()) return c;
    if (!root.IsMap()) throw ConfigError(origin + ": top level must be a mapping of sections");
    for (const auto& sec : root) {
        const std::string name = sec.first.as<std::string>();
        if (!sec.second.IsMap()) throw ConfigError(name + ": section must be a mapping");
        for (const auto& kv : sec.second) {
            const std::string path = name + "." + kv.first.as<std::string>();
            const YAML::Node& v = kv.second;
            if (v.IsScalar()) {
                c.values_[path] = v.as<std::string>();
            } else if (v.IsSequence()) {
                std::string joined;
                for (const auto& item : v) {
                    if (!item.IsScalar()) throw ConfigError(path + ": list items must be scalars");
                    joined += (joined.empty() ? "" : ", ") + item.as<std::string>();
                }
                c.values_[path] = joined;
            } else if (v.IsNull()) {
                c.values_[path] = "";
            } else {
                throw ConfigError(path + ": nested mappings are not supported");
            }
        }
    }
    return c;
}

Config Config::load(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError(path + ": cannot open config file");
    std::stringstream ss;
    ss << in.rdbuf();
    return parse(ss.str(), path);
}

void Config::set(const std::string& path, const std::string& value) { values_[path] = value; }

void Config::apply_env(const std::function<const char*(const char*)>& getenv) {
    for (const auto& e : schema()) {
        std::string name = "QLINK_" + e.path;
        std::replace(name.begin(), name.end(), '.', '_');
        std::transform(name.begin(), name.end(), name.begin(), [](unsigned char ch) { return std::toupper(ch); });
        if (const char* v = getenv(name.c_str())) values_[e.path] = v;
    }
}

void Config::validate() {
    for (const auto& [path, value] : values_)
        if (!find_entry(path)) throw ConfigError(path + ": unknown key");
    std::map<std::string, std::string> out;
    for (const auto& e : schema()) {
        const auto it = values_.find(e.path);
        out[e.path] = normalize(e, it == values_.end() ? e.fallback : it->second);
    }
    values_ = std::move(out);
}

double Config::real(const std::string& path) const {
    double x;
    if (!parse_real(text(path), x)) bad(path, "not a number");
    return x;
}

long Config::integer(const std::string& path) const { return long(real(path)); }

bool Config::flag(const std::string& path) const { return text(path) == "true"; }

const std::string& Config::text(const std::string& path) const {
    const auto it = values_.find(path);
    if (it == values_.end()) bad(path, "missing (was the config validated?)");
    return it->second;
}

std::vector<double> Config::reals(const std::string& path) const {
    std::vector<double> out;
    for (const auto& item : split_list(text(path))) {
        double x;
        if (!parse_real(item, x)) bad(path, "not a list of numbers");
        out.push_back(x);
    }
    return out;
}

std::string Config::canonical() const {
    std::string s;
    for (const auto& [k, v] : values_) s += k + " = " + v + "\n";
    return s;
}

std::string Config::hash() const {
    const std::string text = canonical();
    unsigned char md[EVP_MAX_MD_SIZE];
    unsigned int len = 0;
    if (!EVP_Digest(text.data(), text.size(), md, &len, EVP_sha256(), nullptr))
        throw NumericalError("config hashing failed");
    static const char* hex = "0123456789abcdef";
    std::string out;
    for (unsigned i = 0; i < len; ++i) {
        out += hex[md[i] >> 4];
        out += hex[md[i] & 15];
    }
    return out;
}

}  // namespace qlink::exp
