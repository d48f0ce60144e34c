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

// Experiment records, their CSV/JSON files, and the runners behind the CLI.
#pragma once

#include <atomic>
#include <exception>
#include <filesystem>
#include <functional>
#include <map>
#include <mutex>
#include <string>
#include <thread>
#include <variant>
#include <vector>

#include "qlink/config.hpp"
#include "qlink/qmath.hpp"

namespace qlink::exp {

using Cell = std::variant<double, std::string>;

struct Table {
    std::vector<std::string> columns;
    std::vector<std::vector<Cell>> rows;

    void add(std::vector<Cell> row);
    // Index of a column; throws DimensionError if absent.
    size_t column(const std::string& name) const;
    double number(size_t row, const std::string& col) const;
};

struct ResultRecord {
    std::string id;
    std::string kind;
    std::string config_hash;
    std::map<std::string, std::string> config;
    std::map<std::string, double> metrics;
    std::map<std::string, Table> series;
    std::map<std::string, Mat> matrices;
    double duration_s = 0;
};

enum class Format { Csv, Json, Both };
Format parse_format(const std::string& s);

// Cells print numbers in shortest round-trip form; text containing commas or
// quotes is quoted.
std::string to_csv(const Table& t);
Table from_csv(const std::string& text);

std::string to_json(const ResultRecord& r);
ResultRecord from_json(const std::string& text);

// Writes <id>.<series>.csv and <id>.metrics.csv (csv), <id>.json (json).
// Returns the paths written; I/O failures throw std::runtime_error.
std::vector<std::filesystem::path> emit(const ResultRecord& r, const std::filesystem::path& dir, Format f);

// Appends one line per finished sweep point to <id>.partial.csv so a long
// run leaves its completed points behind if it is interrupted; finish()
// removes the file once the full record has been written.
class PartialLog {
public:
    PartialLog(std::filesystem::path dir, const std::string& id);
    void write(const std::string& line);
    void finish();
    const std::filesystem::path& path() const { return path_; }

private:
    std::filesystem::path path_;
    std::mutex mu_;
    bool open_ = false;
};

// Evaluates f(0..n-1) on `jobs` threads. Results come back in index order
// whatever the completion order; on_done runs serialized as points finish.
template <class R>
std::vector<R> parallel_map(size_t n, int jobs, const std::function<R(size_t)>& f,
                            const std::function<void(size_t, const R&)>& on_done = {}) {
    std::vector<R> out(n);
    std::atomic<size_t> next{0};
    std::mutex mu;
    std::exception_ptr err;
    auto worker = [&] {
        for (size_t i; (i = next++) < n;) {
            {
                std::lock_guard lk(mu);
                if (err) return;
            }
            try {
                R r = f(i);
                std::lock_guard lk(mu);
                out[i] = std::move(r);
                if (on_done) on_done(i, out[i]);
            } catch (...) {
                std::lock_guard lk(mu);
                if (!err) err = std::current_exception();
            }
        }
    };
    const size_t nthreads = std::min<size_t>(n, size_t(std::max(jobs, 1)));
    if (nthreads <= 1) {
        worker();
    } else {
        std::vector<std::thread> pool;
        for (size_t t = 0; t < nthreads; ++t) pool.emplace_back(worker);
        for (auto& t : pool) t.join();
    }
    if (err) std::rethrow_exception(err);
    return out;
}

// ---- Bell-basis comparison

struct BellView {
    Eigen::Matrix4d magnitudes;  // |<B_i|rho|B_j>|, order Phi+, Phi-, Psi+, Psi-
    double best_fidelity = 0;    // max_i <B_i|rho|B_i>
    Mat state;                   // the state shown (after local rotations, if any)
};

// Plain change of basis.
BellView bell_view(const Mat& rho);
// Maximizes the best Bell fidelity over u3 (x) u3 (six angles, BFGS from the
// identity plus `restarts` seeded random starts) and reports the rotated state.
BellView bell_view_local(const Mat& rho, int restarts, std::uint64_t seed);

struct BellComparison {
    BellView cavity_raw, cavity_purified, shuttle_raw, shuttle_purified;
};
BellComparison compare_bell_basis(const Mat& cavity_raw, const Mat& cavity_purified, const Mat& shuttle_raw,
                                  const Mat& shuttle_purified, int restarts = 8, std::uint64_t seed = 1);

// ---- runners

// Runs cfg's run.experiment; cfg must be validated. `log` receives progress
// lines (may be empty). Partial results go to <run.out>/<id>.partial.csv.
ResultRecord run_experiment(const Config& cfg, const std::function<void(const std::string&)>& log = {});

// Record id: run.id, or the experiment name.
std::string record_id(const Config& cfg);

// Built-in reproduction recipes: table1, table2, fig3, fig7, fig8, fig10c, fig11.
const std::vector<std::string>& repro_names();
std::string repro_yaml(const std::string& name);

struct Check {
    std::string name;
    double value = 0;
    double bound = 0;
    bool pass = false;
};

// Invariant suite: state validity along cavity trajectories, agreement of
// the two Lindblad backends, valley tunneling identities, local-unitary
// invariance of the concurrence and the teleportation/Pauli-channel identity.
std::vector<Check> invariant_suite(std::uint64_t seed = 1, int fock_cutoff = 7);

}  // namespace qlink::exp
