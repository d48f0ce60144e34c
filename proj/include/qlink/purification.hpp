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

// Recurrence purification on pairs of two-qubit states.
//
// Register order is A1 B1 A2 B2: pair 1 (qubits 0,1) is kept, pair 2
// (qubits 2,3) is measured. Side A holds qubits 0 and 2, side B 1 and 3.
#pragma once

#include <random>
#include <vector>

#include "qlink/qmath.hpp"

namespace qlink::purify {

struct NoiseModel {
    double depol_1q = 0.0002;
    double depol_2q = 0.001;
    double meas_error = 0.001;

    static NoiseModel noiseless() { return {0, 0, 0}; }
    void validate() const;
};

enum class Target { BitFlip, PhaseFlip };

struct RoundSpec {
    Target target = Target::BitFlip;
    Mat pre_a;  // single-qubit gate on both side-A qubits; empty = none
    Mat pre_b;
};

struct PurificationProtocol {
    std::vector<RoundSpec> rounds;

    // Alternating bit/phase rounds. The first round carries the local frame
    // change that maps |psi-> raw pairs onto |phi+>.
    static PurificationProtocol canonical(int nrounds);
    // Canonical protocol with S on side A and S^dagger on side B in every round
    // after the first. `identity` replaces both with I (no gate, no gate noise).
    static PurificationProtocol s_gates(int nrounds, bool identity = false);
};

struct RoundResult {
    Mat out;
    double success_prob = 0;
};

RoundResult purify_round(const Mat& pair_a, const Mat& pair_b, const RoundSpec& spec, const NoiseModel& noise);

struct RawSource {
    Mat state;
    double success_prob = 1;
    double attempt_time = 15;  // ns
};

struct PurificationStats {
    Mat final_state;
    double fidelity = 0;       // to |phi+>
    double concurrence = 0;
    std::vector<double> per_round_failure;  // [raw, round 1, round 2, ...]
    std::vector<double> round_success;      // [round 1, round 2, ...]
    double expected_raw_pairs = 0;          // 2^r / (p_raw prod p_i)
    double expected_attempts = 0;           // expected_raw_pairs / p_raw
    double generation_rate = 0;             // 1 / (attempts * attempt_time), in 1/ns
};

PurificationStats run_protocol(const RawSource& raw, const PurificationProtocol& protocol, const NoiseModel& noise);
PurificationStats alt_protocol_s_gates(const RawSource& raw, int nrounds, const NoiseModel& noise);

// Exact average over the Bell-diagonalizing Pauli group {P (x) P*}.
Mat twirl(const Mat& rho);
// Sampled variant: average of `samples` random group elements.
Mat twirl(const Mat& rho, std::mt19937_64& rng, int samples);

// Bell-basis diagonal in the order Phi+, Phi-, Psi+, Psi-.
Eigen::Vector4d bell_diagonal(const Mat& rho);

struct MonteCarloEstimate {
    double mean_attempts = 0;
    double stderr_attempts = 0;
    int trials = 0;
};

// Simulates the recursive protocol tree with sampled raw successes and round outcomes.
MonteCarloEstimate monte_carlo_attempts(const RawSource& raw, const PurificationProtocol& protocol,
                                        const NoiseModel& noise, std::mt19937_64& rng, int trials);

}  // namespace qlink::purify
