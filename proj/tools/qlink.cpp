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

// qlink: command-line front end for the experiments.
//
// Exit codes: 0 success, 2 configuration error, 3 numerical failure,
// 1 anything else (I/O and the like).

#include <cstdlib>
#include <iomanip>
#include <iostream>
#include <optional>

#include "CLI11.hpp"
#include "qlink/experiment.hpp"

using namespace qlink;
using namespace qlink::exp;

namespace {

struct Common {
    std::string config;
    std::optional<long> seed;
    std::optional<int> jobs;
    std::string out;
    std::string format;
    std::vector<std::string> sets;
    bool quiet = false;
};

void add_common(CLI::App* app, Common& c, bool config_option = true) {
    if (config_option) app->add_option("--config,-c", c.config, "config file (YAML subset, see --help of the root)");
    app->add_option("--seed", c.seed, "master seed (run.seed)");
    app->add_option("--jobs,-j", c.jobs, "worker threads (run.jobs)");
    app->add_option("--out,-o", c.out, "output directory (run.out)");
    app->add_option("--format", c.format, "csv, json or both (run.format)")
        ->check(CLI::IsMember({"csv", "json", "both"}));
    app->add_option("--set", c.sets, "override any key: section.key=value (repeatable)");
    app->add_flag("--quiet,-q", c.quiet, "no progress output");
}

// Precedence: defaults < file < environment < --set < dedicated flags.
Config build(Config cfg, const Common& c, const std::string& experiment) {
    cfg.apply_env([](const char* name) { return std::getenv(name); });
    for (const auto& s : c.sets) {
        const auto eq = s.find('=');
        if (eq == std::string::npos) throw ConfigError("--set " + s + ": expected section.key=value");
        cfg.set(s.substr(0, eq), s.substr(eq + 1));
    }
    if (c.seed) cfg.set("run.seed", std::to_string(*c.seed));
    if (c.jobs) cfg.set("run.jobs", std::to_string(*c.jobs));
    if (!c.out.empty()) cfg.set("run.out", c.out);
    if (!c.format.empty()) cfg.set("run.format", c.format);
    if (!experiment.empty()) cfg.set("run.experiment", experiment);
    cfg.validate();
    return cfg;
}

int execute(const Config& cfg, bool quiet) {
    auto log = [quiet](const std::string& s) {
        if (!quiet) std::cerr << "[" << "qlink" << "] " << s << std::endl;
    };
    log(cfg.text("run.experiment") + " (config " + cfg.hash().substr(0, 12) + ")");
    const auto rec = run_experiment(cfg, log);
    const auto files = emit(rec, cfg.text("run.out"), parse_format(cfg.text("run.format")));
    for (const auto& f : files) std::cout << f.string() << "\n";
    for (const auto& [k, v] : rec.metrics) log(k + " = " + format_number(v));
    return 0;
}

int validate_suite(long seed, int fock) {
    const auto checks = invariant_suite(std::uint64_t(seed), fock);
    bool ok = true;
    for (const auto& c : checks) {
        std::cout << (c.pass ? "PASS " : "FAIL ") << std::left << std::setw(40) << c.name << " value "
                  << std::setw(12) << format_number(c.value) << " bound " << format_number(c.bound) << "\n";
        ok = ok && c.pass;
    }
    return ok ? 0 : 3;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"qlink: inter-core quantum link simulations"};
    app.require_subcommand(1);
    app.footer("Configuration keys and defaults (override in a config file, with\n"
               "QLINK_<SECTION>_<KEY> environment variables, or with --set):\n\n" +
               schema_help());

    Common common;
    std::string run_path, recipe;
    long vseed = 1;
    int vfock = 7;
    std::string chosen;

    auto* run = app.add_subcommand("run", "run the experiment named in a config file");
    run->add_option("config", run_path, "config file")->required();
    add_common(run, common, false);

    const std::vector<std::pair<std::string, std::string>> kinds{
        {"cavity", "raw Bell pairs from the cavity link (fidelity table)"},
        {"cavity-trace", "observables of the cavity link versus time"},
        {"purify", "recurrence purification of raw pairs (fidelities, rates)"},
        {"shuttle", "shuttling through a disordered dot chain (ensemble)"},
        {"charge-noise", "charge-noise effect on one shuttling step"},
        {"esd", "derangement error suppression on the spin ring"},
        {"compare", "Bell-basis comparison of cavity and shuttle pairs"},
    };
    for (const auto& [name, help] : kinds) {
        auto* sc = app.add_subcommand(name, help);
        add_common(sc, common);
        sc->callback([&chosen, n = name] { chosen = n; });
    }

    auto* repro = app.add_subcommand("repro", "one-shot reproduction recipe");
    repro->add_option("recipe", recipe, "table1, table2, fig3, fig7, fig8, fig10c or fig11")
        ->required()
        ->check(CLI::IsMember(repro_names()));
    add_common(repro, common, false);

    auto* val = app.add_subcommand("validate", "run the invariant suite");
    val->add_option("--seed", vseed, "seed for the random checks");
    val->add_option("--fock", vfock, "photon cutoff of the cavity trajectory");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 2;
    }

    try {
        if (val->parsed()) return validate_suite(vseed, vfock);
        if (run->parsed()) return execute(build(Config::load(run_path), common, ""), common.quiet);
        if (repro->parsed())
            return execute(build(Config::parse(repro_yaml(recipe), "recipe " + recipe), common, ""), common.quiet);
        const Config base = common.config.empty() ? Config{} : Config::load(common.config);
        return execute(build(base, common, chosen), common.quiet);
    } catch (const ConfigError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return 2;
    } catch (const NumericalError& e) {
        std::cerr << "numerical failure: " << e.what() << "\n";
        return 3;
    } catch (const DimensionError& e) {
        std::cerr << "numerical failure: " << e.what() << "\n";
        return 3;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
}
