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

// Error suppression by derangement (virtual distillation) on a spin-ring
// ground state prepared by a noisy variational circuit.
#pragma once

#include <cmath>
#include <cstdint>
#include <vector>

#include "qlink/qmath.hpp"

namespace qlink::esd {

// H = sum_k w_k Z_k + J sum_k (XX + YY + ZZ)_{k,k+1 mod N}
struct SpinRing {
    int n = 6;
    double J = 0.1;
    std::vector<double> omega;

    static SpinRing random(int n, double J, std::uint64_t seed);
    Mat hamiltonian() const;
    Eigen::VectorXd diagonal() const;  // sum_k w_k Z_k
    double ground_energy() const;
    // Computational basis state minimizing the field term.
    long initial_index() const;
};

struct VhaParams {
    std::vector<double> beta, gamma;
    int layers() const { return int(beta.size()); }
    static VhaParams zeros(int l);
};

struct GateNoise {
    double depol_2q = 0;
    double depol_1q() const { return depol_2q / 5; }
};

// Gate counts of the ansatz: three entangling gates per edge and layer, one
// Z rotation per qubit and layer, one preparation gate per qubit.
int entangling_gate_count(const SpinRing& h, int layers);
int single_qubit_gate_count(const SpinRing& h, int layers);
// depol_2q such that N2q p + N1q p/5 = xi.
GateNoise noise_for_xi(double xi, const SpinRing& h, int layers);

Vec vha_state(const SpinRing& h, const VhaParams& p);
Mat vha_prepare(const SpinRing& h, const VhaParams& p, const GateNoise& noise);

struct VhaFit {
    VhaParams params;
    double energy = 0;
    double error = 0;
    int iterations = 0;
    bool reached = false;
};
VhaFit optimize_vha(const SpinRing& h, int layers, double tolerance = 1e-4, int restarts = 4,
                    std::uint64_t seed = 1, const VhaParams* start = nullptr);

// Pauli channel left by teleporting through a twirled pair of fidelity f:
// rho -> f rho + (1-f)/3 sum_{X,Y,Z} P rho P on each listed qubit.
Mat teleport_noise(const Mat& rho, const std::vector<int>& qubits, double f, int nqubits);

// Three-qubit teleportation (input, sender half, receiver half) with the
// given two-qubit resource; returns the receiver's corrected state.
Mat teleport(const Mat& input, const Mat& resource);

struct TeleportReport {
    double distance = 0;  // max |out - expected|
};
// Injects |Phi_alpha> = (sigma_alpha x I)|Phi+> and compares with sigma_alpha psi.
TeleportReport teleportation_identity(int alpha, const Vec& psi);

double mitigated_expectation(const std::vector<Mat>& copies, const Mat& sigma);

// Controlled-SWAP as five two-qubit gates. Roles: 0 control, 1 and 2 the
// swapped pair; gates act on (roles[0], roles[1]) with roles[0] the more
// significant qubit.
struct RoleGate {
    Mat u;
    int roles[2];
};
const std::vector<RoleGate>& cswap_decomposition();

// Two-copy derangement: ancilla + N + N qubits, one controlled-SWAP per qubit
// pair, each of its five gates followed by two-qubit depolarizing noise; the
// second copy passes through teleport_noise(f) first. Returns
// <X_anc sigma_1>/<X_anc>.
double derangement_circuit_estimate(const Mat& copy1, const Mat& copy2, const Mat& sigma, const GateNoise& noise,
                                    double bell_f);

struct SweepRow {
    double xi = 0;
    double unmitigated = 0;
    double ideal[3] = {0, 0, 0};  // n = 2, 3, 4, formula level
    double noisy_bell = 0;        // n = 2 formula level, second copy teleported
    double noisy_derangement = NAN;  // circuit, noisy gates, perfect pairs
    double both = NAN;               // circuit, noisy gates and pairs
};

struct SweepOptions {
    double bell_f = 0.995;
    bool circuit = true;
};

std::vector<SweepRow> energy_error_sweep(const SpinRing& h, const VhaParams& p, const std::vector<double>& xis,
                                         const SweepOptions& opt = {});

}  // namespace qlink::esd
