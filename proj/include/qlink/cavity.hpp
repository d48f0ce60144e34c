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

// Two double quantum dots coupled through one resonator mode.
//
// Energies are frequencies in MHz used directly as angular rates (rad/us);
// time is in ns, so a Hamiltonian entry h contributes a phase h * 1e-3 * t.
// Decay rates are in 1/ns and coherence times in ns (0 disables a channel).
// Tensor order is charge1, spin1, charge2, spin2, photon.
#pragma once

#include <map>
#include <utility>
#include <vector>

#include "qlink/lindblad.hpp"
#include "qlink/optimize.hpp"
#include "qlink/qmath.hpp"

namespace qlink::cavity {

inline constexpr double kMHzPerMicroEv = 241.799;
inline constexpr double kNsPerInvMHz = 1e3;  // 1/MHz = 1000 ns

struct DqdParams {
    double eps = 0;   // detuning
    double tc = 0;    // tunnel coupling
    double B = 0;     // Zeeman splitting
    double bx = 0, by = 0, bz = 0;  // field gradient
    double gc = 0;    // charge-photon coupling
};

struct CavityParams {
    double omega_r = 1e4;
    int fock_cutoff = 7;
    double kappa = 1e-3;     // 1/ns (1/us)
    double T2_spin = 120e3;  // ns
    double T2_charge = 400;  // ns
};

struct OptimizableParameters {
    double B = 1e4;  // sets omega_r = B and t_c = B/2
    double bx1 = 526, bx2 = 174;
    double gc1 = 390, gc2 = 140;
    double eps1 = 0, eps2 = 0;
    Vec init1, init2;  // charge (x) spin amplitudes per DQD
    double t = 15;     // stopping time, ns

    static OptimizableParameters baseline();
    DqdParams dqd(int which) const;
};

struct RawBellResult {
    Mat spin_state;
    double success_probability = 0;
    double fidelity = 0;       // to |psi-> = (|01> - |10>)/sqrt(2), 0 = up
    double concurrence = 0;
    double weighted_concurrence = 0;  // probability-weighted over LR and RL
    double uniform_concurrence = 0;   // plain mean over LR and RL
    double vacuum_probability = 0;
    double attempt_time = 0;
    std::map<std::pair<int, int>, double> charge_probabilities;  // (c1, c2), 0 = L
};

enum class CostWeighting { Probability, Uniform };

Mat build_dqd_hamiltonian(const DqdParams& p);
// Throws ConfigError unless B1 = B2 = omega_r and 2 t_c = B for both DQDs.
Mat build_system_hamiltonian(const DqdParams& p1, const DqdParams& p2, const CavityParams& c);
std::vector<lindblad::LindbladTerm> dissipators(const CavityParams& c);
Mat initial_state(const OptimizableParameters& p, int fock_cutoff);
Vec psi_minus();

// Odd-parity post-selection of a full system state.
RawBellResult analyze_state(const Mat& rho, int fock_cutoff);

// Gaussian stopping-time average (mean p.t, width sigma, npoints over +-3 sigma).
RawBellResult generate_raw_pair(const OptimizableParameters& p, const CavityParams& c, double stop_jitter_sigma,
                                int npoints = 13, const lindblad::EvolveOptions& opt = {});

double concurrence_cost(const OptimizableParameters& p, const CavityParams& c,
                        CostWeighting w = CostWeighting::Probability);

struct OptimizeReport {
    OptimizableParameters params;
    double cost = 0;
    double initial_cost = 0;
    int iterations = 0;
    bool converged = false;
    std::string message;
};

// Free variables: bx1, bx2, gc1, gc2, eps1, eps2 (and optionally t).
OptimizeReport optimize_parameters(const OptimizableParameters& init, const CavityParams& c, int max_iterations = 500,
                                   bool include_time = false);

OptimizableParameters rescale_parameters(const OptimizableParameters& p, double lambda);
CavityParams rescale_cavity(const CavityParams& c, double lambda);

}  // namespace qlink::cavity
