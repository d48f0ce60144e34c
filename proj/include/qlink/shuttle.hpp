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

// Bucket-brigade shuttling of one spin of an entangled pair through a chain
// of silicon quantum dots with a valley degree of freedom.
//
// Energies are in ueV and times in ns. The sweep Hamiltonian acts on
// orbit (L, R) x valley x spin. Between sweeps the chain state lives in the
// local valley eigenbasis of the occupied dot: valley (ground -, excited +)
// x shuttled spin x rest, where `rest` is the stationary spin (dim 2) or
// nothing (dim 1). Spin index 0 is up.
#pragma once

#include <functional>
#include <random>
#include <vector>

#include "qlink/qmath.hpp"

namespace qlink::shuttle {

inline constexpr double kHbar = 0.6582119569;  // ueV ns

struct SiteParams {
    double magnitude = 75;  // |Delta|, valley splitting is 2|Delta|
    double phase = 0;       // Delta = |Delta| exp(-i phase)
};

struct SweepParams {
    double eps0 = 800;   // sweep runs from -eps0 to +eps0
    double alpha = 300;  // ueV/ns
    double tc = 30;
    double esoi = 1;
    int nsteps = 4000;
    // Start and end in the instantaneous L/R orbital sectors of H(-eps0) and
    // H(+eps0) rather than the bare |L>, |R> states. Removes the ringing at
    // the orbital splitting that a sudden start from bare |L> leaves behind.
    bool dressed_endpoints = false;

    double duration() const { return 2 * eps0 / alpha; }
    void validate() const;
};

// Magnetic terms of one DQD step.
struct SpinFields {
    double B = 40;
    double bx = 0, bz = 0;
};

enum class PhaseMode { PerLink, PerSite };

struct ChainConfig {
    int n_dots = 25;
    double B = 40;
    double bx_total = 1, bz_total = 3;  // split evenly over the n_dots - 1 steps
    double mean_magnitude = 75, sd_magnitude = 10;
    double sd_phase = 0.7853981633974483;
    PhaseMode phase_mode = PhaseMode::PerLink;
    bool project_valley = true;
    std::uint64_t seed = 1;

    SpinFields step_fields() const;
    void validate() const;
};

struct Tunneling {
    cplx vc, vf;
};

// Valley-conserving and valley-flipping tunnel amplitudes for a phase step
// dphi = phase_left - phase_right. These are the L-R matrix elements of the
// orbital tunneling between local valley eigenstates.
Tunneling valley_tunneling(double tc, double dphi);

// Columns are the local ground and excited valley states in the bulk basis.
Mat valley_basis(double phase);

Mat build_shuttle_hamiltonian(const SiteParams& left, const SiteParams& right, const SweepParams& sweep,
                              const SpinFields& f, double eps);
// Adds a stationary spin in its rotating frame (identity factor).
Mat with_stationary_spin(const Mat& h8);

using NoiseTrace = std::function<double(double)>;  // detuning offset at time t

// Direct rotation taking the bare orbital sectors (L = first four states)
// onto the matching eigenspaces of h; identity when tunneling vanishes.
Mat orbital_dressing(const Mat& h8);

// Sweep propagator on orbit x valley x spin, midpoint piecewise-constant.
// With dressed_endpoints the result is D(end)^dagger U D(start).
Mat sweep_unitary(const SiteParams& left, const SiteParams& right, const SweepParams& sweep, const SpinFields& f,
                  const NoiseTrace& noise = {});

// |L> (x) (local -> bulk valley rotation) of a chain state.
Mat embed_left(const Mat& local, const SiteParams& site);
// Orbit (x) valley (x) spin (x) rest state after the sweep.
Mat sweep_step(const Mat& embedded, const SiteParams& left, const SiteParams& right, const SweepParams& sweep,
               const SpinFields& f, const NoiseTrace& noise = {});
Mat apply_sweep(const Mat& embedded, const Mat& u8);
// Orbit traced out, valley rotated into the local basis of `next`.
Mat relax_and_reinit(const Mat& swept, const SiteParams& next);

struct Projection {
    Mat state;
    double probability = 0;
    bool flagged = false;  // zero-probability branch
};
Projection valley_project(const Mat& local);

// Traces out the valley of a chain state.
Mat spin_state(const Mat& local);

std::vector<SiteParams> sample_sites(const ChainConfig& cfg);

struct ChainResult {
    std::vector<double> concurrence_trace;  // after each dot, [0] = initial
    std::vector<double> valley_probabilities;
    Mat final_state;  // shuttled spin (x) stationary spin
    Ptm ptm;          // single shuttled spin, Pauli basis I X Y Z
    double success_probability = 1;  // product of valley post-selections
    std::vector<SiteParams> sites;
};

ChainResult shuttle_chain(const ChainConfig& cfg, const SweepParams& sweep,
                          const std::vector<NoiseTrace>& noise = {});
ChainResult shuttle_chain(const ChainConfig& cfg, const std::vector<SiteParams>& sites, const SweepParams& sweep,
                          const std::vector<NoiseTrace>& noise = {});

// One ideal round: two copies, CNOTs between copies, keep outcome "11".
struct PurifiedPair {
    Mat state;
    double success_prob = 0;
};
PurifiedPair purify_shuttled_pair(const Mat& rho);

// The phase-accumulated asymmetric Bell state plus a |down down> admixture.
Mat purifiable_state(double eps, double phi);

// ---- charge noise

struct ChargeNoiseOptions {
    int n_processes = 1000;
    double s_1mhz = 1e-6;  // ueV^2/Hz, one-sided
    double tau_min = 1;    // ns
    double tau_max = 1e6;  // ns
};

// Samples of a sum of Ornstein-Uhlenbeck processes on t = 0, dt, ..., duration,
// with log-spaced correlation times and equal variances scaled so the
// one-sided spectrum equals s_1mhz at 1 MHz.
std::vector<double> charge_noise_samples(std::mt19937_64& rng, double duration, double dt,
                                         const ChargeNoiseOptions& opt = {});
// Linear interpolation of charge_noise_samples as a detuning offset.
NoiseTrace charge_noise_trace(std::uint64_t seed, std::uint64_t realization, double duration, double dt,
                              const ChargeNoiseOptions& opt = {});
// Analytic one-sided spectrum of the OU mixture at frequency f (Hz).
double charge_noise_psd(double f_hz, const ChargeNoiseOptions& opt = {});

// ---- two-electron valley readout

struct ReadoutParams {
    double U = 1000;
    double t = 5;
    double EZ_L = 51, EZ_R = 49;
    double EV_L = 90, EV_R = 110;
};

// Two electrons in 8 modes (dot L/R x valley -/+ x spin up/down).
struct TwoElectronBasis {
    std::vector<std::pair<int, int>> pairs;  // mode indices, first < second
    static int mode(int dot, int valley, int spin) { return dot * 4 + valley * 2 + spin; }
    int index(int m1, int m2) const;
    int right_occupation(int k) const;  // electrons in R for basis state k
};

const TwoElectronBasis& two_electron_basis();
Mat build_two_electron_hamiltonian(const ReadoutParams& p, double eps);
// Row k holds the sorted eigenvalues at eps_grid[k].
Eigen::MatrixXd valley_readout_spectrum(const ReadoutParams& p, const std::vector<double>& eps_grid);

struct ReadoutClass {
    int left_valley = 0;  // 0 = -, 1 = +
    int left_spin = 0;
    double right_occupation = 0;  // final <n_R> of the followed eigenstate
    bool to_02 = false;
};
// Starts from each (1,1) state with the ancilla in |- down> on the right dot
// and follows the instantaneous eigenstate of maximal overlap across eps_grid.
std::vector<ReadoutClass> classify_readout_states(const ReadoutParams& p, const std::vector<double>& eps_grid);

}  // namespace qlink::shuttle
