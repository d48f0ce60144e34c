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

#include "qlink/esd.hpp"

#include <algorithm>
#include <limits>

#include "qlink/optimize.hpp"
#include "qlink/qubits.hpp"
#include "qlink/rng.hpp"

namespace qlink::esd {

namespace {

long bit(int q, int n) { return 1L << (n - 1 - q); }

int edge_end(int k, int n) { return (k + 1) % n; }

// psi -> exp(-i theta P_a P_b) psi for P in {X, Y, Z} (1, 2, 3).
void rotate_pp(Vec& psi, int P, int a, int b, int n, double theta) {
    const long ma = bit(a, n), mb = bit(b, n), m = ma | mb;
    const double c = std::cos(theta), s = std::sin(theta);
    const cplx mis(0, -s);
    if (P == 3) {
        for (long i = 0; i < psi.size(); ++i) {
            const bool odd = bool(i & ma) != bool(i & mb);
            psi(i) *= odd ? cplx(c, s) : cplx(c, -s);
        }
        return;
    }
    for (long i = 0; i < psi.size(); ++i) {
        const long j = i ^ m;
        if (j < i) continue;
        // YY picks up -1 on equal bits, +1 on opposite bits; XX is a plain flip.
        double sign = 1;
        if (P == 2) sign = (bool(i & ma) != bool(i & mb)) ? 1 : -1;
        const cplx pi = psi(i), pj = psi(j);
        psi(i) = c * pi + mis * sign * pj;
        psi(j) = c * pj + mis * sign * pi;
    }
}

Mat pp_gate(int P, double theta) {
    const Mat pp = kron(pauli(P), pauli(P));
    return std::cos(theta) * Mat::Identity(4, 4) - cplx(0, std::sin(theta)) * pp;
}

Mat rz(double theta) {
    Mat u = Mat::Zero(2, 2);
    u(0, 0) = std::exp(cplx(0, -theta));
    u(1, 1) = std::exp(cplx(0, theta));
    return u;
}

// Pauli-form depolarizing: probability p of a uniformly random non-identity Pauli.
void pauli_depolarize(Mat& rho, const std::vector<int>& qs, double p, int n) {
    if (p == 0) return;
    const double g = double(1L << (2 * qs.size()));
    qubits::depolarize(rho, qs, p * g / (g - 1), n);
}

void check_params(const SpinRing& h, const VhaParams& p) {
    if (p.beta.size() != p.gamma.size()) throw ConfigError("beta and gamma must have one entry per layer");
    if (h.n < 2 || int(h.omega.size()) != h.n) throw ConfigError("spin ring needs n >= 2 fields");
}

std::vector<double> pack(const VhaParams& p) {
    std::vector<double> x(p.beta);
    x.insert(x.end(), p.gamma.begin(), p.gamma.end());
    return x;
}

VhaParams unpack(const std::vector<double>& x) {
    const size_t l = x.size() / 2;
    VhaParams p;
    p.beta.assign(x.begin(), x.begin() + l);
    p.gamma.assign(x.begin() + l, x.end());
    return p;
}

}  // namespace

SpinRing SpinRing::random(int n, double J, std::uint64_t seed) {
    if (n < 2) throw ConfigError("spin ring needs at least two sites");
    auto rng = make_stream(seed, "spin-ring");
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    SpinRing h;
    h.n = n;
    h.J = J;
    for (int k = 0; k < n; ++k) h.omega.push_back(u(rng));
    return h;
}

Eigen::VectorXd SpinRing::diagonal() const {
    const long D = 1L << n;
    Eigen::VectorXd d = Eigen::VectorXd::Zero(D);
    for (long i = 0; i < D; ++i)
        for (int k = 0; k < n; ++k) d(i) += (i & bit(k, n)) ? -omega[k] : omega[k];
    return d;
}

Mat SpinRing::hamiltonian() const {
    const long D = 1L << n;
    Mat H = Mat::Zero(D, D);
    H.diagonal() = diagonal().cast<cplx>();
    for (int k = 0; k < n; ++k)
        for (int P = 1; P <= 3; ++P) H += J * qubits::embed(kron(pauli(P), pauli(P)), {k, edge_end(k, n)}, n);
    return H;
}

double SpinRing::ground_energy() const {
    return Eigen::SelfAdjointEigenSolver<Mat>(hamiltonian(), Eigen::EigenvaluesOnly).eigenvalues()(0);
}

long SpinRing::initial_index() const {
    long idx = 0;
    for (int k = 0; k < n; ++k)
        if (omega[k] > 0) idx |= bit(k, n);
    return idx;
}

VhaParams VhaParams::zeros(int l) {
    VhaParams p;
    p.beta.assign(l, 0.0);
    p.gamma.assign(l, 0.0);
    return p;
}

int entangling_gate_count(const SpinRing& h, int layers) { return 3 * h.n * layers; }

int single_qubit_gate_count(const SpinRing& h, int layers) { return h.n * layers + h.n; }

GateNoise noise_for_xi(double xi, const SpinRing& h, int layers) {
    if (xi < 0) throw ConfigError("xi must be non-negative");
    const double w = entangling_gate_count(h, layers) + single_qubit_gate_count(h, layers) / 5.0;
    return {xi / w};
}

Vec vha_state(const SpinRing& h, const VhaParams& p) {
    check_params(h, p);
    Vec psi = Vec::Zero(1L << h.n);
    psi(h.initial_index()) = 1;
    const Eigen::VectorXd d = h.diagonal();
    for (int l = 0; l < p.layers(); ++l) {
        for (int k = 0; k < h.n; ++k)
            for (int P = 1; P <= 3; ++P) rotate_pp(psi, P, k, edge_end(k, h.n), h.n, p.gamma[l] * h.J);
        for (long i = 0; i < psi.size(); ++i) psi(i) *= std::exp(cplx(0, -p.beta[l] * d(i)));
    }
    return psi;
}

Mat vha_prepare(const SpinRing& h, const VhaParams& p, const GateNoise& noise) {
    check_params(h, p);
    if (noise.depol_2q < 0 || noise.depol_2q > 1) throw ConfigError("depolarizing probability must lie in [0, 1]");
    const int n = h.n;
    const long D = 1L << n;
    Mat rho = Mat::Zero(D, D);
    rho(0, 0) = 1;
    const long init = h.initial_index();
    for (int k = 0; k < n; ++k) {
        if (init & bit(k, n)) qubits::apply_gate(rho, pauli(1), {k}, n);
        pauli_depolarize(rho, {k}, noise.depol_1q(), n);
    }
    for (int l = 0; l < p.layers(); ++l) {
        for (int k = 0; k < n; ++k)
            for (int P = 1; P <= 3; ++P) {
                const std::vector<int> q{k, edge_end(k, n)};
                qubits::apply_gate(rho, pp_gate(P, p.gamma[l] * h.J), q, n);
                pauli_depolarize(rho, q, noise.depol_2q, n);
            }
        for (int k = 0; k < n; ++k) {
            qubits::apply_gate(rho, rz(p.beta[l] * h.omega[k]), {k}, n);
            pauli_depolarize(rho, {k}, noise.depol_1q(), n);
        }
    }
    return rho;
}

VhaFit optimize_vha(const SpinRing& h, int layers, double tolerance, int restarts, std::uint64_t seed,
                    const VhaParams* start) {
    if (layers < 0) throw ConfigError("layer count must be non-negative");
    if (start && start->layers() != layers) throw ConfigError("starting parameters have the wrong layer count");
    const Mat H = h.hamiltonian();
    const double e0 = h.ground_energy();
    auto energy = [&](const std::vector<double>& x) {
        const Vec psi = vha_state(h, unpack(x));
        return (psi.adjoint() * H * psi)(0).real();
    };

    MinimizeOptions mo;
    mo.max_iterations = 2000;
    mo.function_tolerance = 1e-14;
    mo.gradient_tolerance = 1e-12;
    mo.rel_step = 1e-6;
    mo.min_step = 1e-6;
    // Stop at the requested precision rather than polishing to machine zero.
    mo.target = e0 + tolerance;

    VhaFit best;
    best.error = std::numeric_limits<double>::infinity();
    for (int r = 0; r <= restarts; ++r) {
        std::vector<double> x0;
        if (r == 0 && start) {
            x0 = pack(*start);
        } else {
            // Annealing-like ramp plus seeded jitter: beta shrinks, gamma grows.
            auto rng = make_stream(seed, "vha", std::uint64_t(r));
            std::normal_distribution<double> jitter(0.0, r == 0 ? 0.0 : 0.2);
            VhaParams p0 = VhaParams::zeros(layers);
            for (int l = 0; l < layers; ++l) {
                const double s = (l + 0.5) / layers;
                p0.beta[l] = 0.5 * (1 - s) + jitter(rng);
                p0.gamma[l] = 5.0 * s + jitter(rng);
            }
            x0 = pack(p0);
        }
        if (layers == 0) {
            best.params = VhaParams::zeros(0);
            best.energy = energy(x0);
            best.error = best.energy - e0;
            break;
        }
        const auto res = minimize_bfgs(energy, x0, mo);
        const double err = res.f - e0;
        best.iterations += res.iterations;
        if (err < best.error) {
            best.params = unpack(res.x);
            best.energy = res.f;
            best.error = err;
        }
        if (best.error <= tolerance) break;
    }
    best.reached = best.error <= tolerance;
    return best;
}

Mat teleport_noise(const Mat& rho, const std::vector<int>& qubits, double f, int nqubits) {
    if (!(f > 0) || f > 1) throw ConfigError("Bell fidelity must lie in (0, 1]");
    if (rho.rows() != (1L << nqubits)) throw DimensionError("teleport_noise: register size mismatch");
    Mat out = rho;
    for (int q : qubits) pauli_depolarize(out, {q}, 1 - f, nqubits);
    return out;
}

Mat teleport(const Mat& input, const Mat& resource) {
    if (input.rows() != 2 || resource.rows() != 4) throw DimensionError("teleport needs a qubit and a pair");
    Mat r = kron(input, resource);
    qubits::apply_gate(r, qubits::cnot(), {0, 1}, 3);
    qubits::apply_gate(r, qubits::hadamard(), {0}, 3);
    Mat out = Mat::Zero(2, 2);
    for (int m0 = 0; m0 < 2; ++m0)
        for (int m1 = 0; m1 < 2; ++m1) {
            const int b = (m0 * 2 + m1) * 2;
            Mat blk = r.block(b, b, 2, 2);
            Mat c = Mat::Identity(2, 2);
            if (m1) c = pauli(1) * c;
            if (m0) c = pauli(3) * c;
            out += c * blk * c.adjoint();
        }
    return out;
}

TeleportReport teleportation_identity(int alpha, const Vec& psi) {
    if (psi.size() != 2) throw DimensionError("teleportation_identity needs a qubit state");
    const Mat in = proj(psi.normalized());
    const Mat out = teleport(in, proj(bell_state(alpha)));
    const Mat& s = pauli(alpha);
    return {(out - s * in * s.adjoint()).cwiseAbs().maxCoeff()};
}

double mitigated_expectation(const std::vector<Mat>& copies, const Mat& sigma) {
    if (copies.size() < 2) throw ConfigError("mitigation needs at least two copies");
    const long d = copies[0].rows();
    for (const auto& c : copies)
        if (c.rows() != d || c.cols() != d) throw DimensionError("copies must have equal dimension");
    if (sigma.rows() != d) throw DimensionError("observable dimension mismatch");
    const size_t n = copies.size();
    double num = 0, den = 0;
    for (size_t k = 0; k < n; ++k) {
        Mat prod = copies[k];
        for (size_t j = 1; j < n; ++j) prod = prod * copies[(k + j) % n];
        num += (sigma * prod).trace().real();
        if (k == 0) den = prod.trace().real();
    }
    if (std::abs(den) < 1e-12) throw NumericalError("Tr[rho^n] below 1e-12");
    return num / double(n) / den;
}

std::vector<SweepRow> energy_error_sweep(const SpinRing& h, const VhaParams& p, const std::vector<double>& xis,
                                         const SweepOptions& opt) {
    const Mat H = h.hamiltonian();
    const double e0 = h.ground_energy();
    std::vector<int> all(h.n);
    for (int k = 0; k < h.n; ++k) all[k] = k;
    std::vector<SweepRow> rows;
    for (double xi : xis) {
        const GateNoise noise = noise_for_xi(xi, h, p.layers());
        const Mat rho = vha_prepare(h, p, noise);
        SweepRow r;
        r.xi = xi;
        r.unmitigated = std::abs((H * rho).trace().real() - e0);
        for (int n = 2; n <= 4; ++n)
            r.ideal[n - 2] = std::abs(mitigated_expectation(std::vector<Mat>(n, rho), H) - e0);
        const Mat tele = teleport_noise(rho, all, opt.bell_f, h.n);
        r.noisy_bell = std::abs(mitigated_expectation({rho, tele}, H) - e0);
        if (opt.circuit) {
            r.noisy_derangement = std::abs(derangement_circuit_estimate(rho, rho, H, noise, 1.0) - e0);
            r.both = std::abs(derangement_circuit_estimate(rho, rho, H, noise, opt.bell_f) - e0);
        }
        rows.push_back(r);
    }
    return rows;
}

}  // namespace qlink::esd
