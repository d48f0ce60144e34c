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

#include <bit>
#include <cmath>
#include <random>

#include "doctest.h"
#include "qlink/esd.hpp"
#include "qlink/qubits.hpp"

using namespace qlink;
using namespace qlink::esd;

namespace {

// Single-site operator on an N-qubit register, qubit 0 leftmost.
Mat site_op(const Mat& op, int k, int n) {
    std::vector<Mat> f(n, pauli(0));
    f[k] = op;
    return kron(f);
}

Mat ring_by_hand(const SpinRing& h) {
    const long D = 1L << h.n;
    Mat H = Mat::Zero(D, D);
    for (int k = 0; k < h.n; ++k) {
        H += h.omega[k] * site_op(pauli(3), k, h.n);
        for (int P = 1; P <= 3; ++P)
            H += h.J * site_op(pauli(P), k, h.n) * site_op(pauli(P), (k + 1) % h.n, h.n);
    }
    return H;
}

// exp(-i theta P P) via the dense embedding, independent of the state-vector kernel.
Vec vha_by_hand(const SpinRing& h, const VhaParams& p) {
    const long D = 1L << h.n;
    Vec psi = Vec::Zero(D);
    psi(h.initial_index()) = 1;
    for (int l = 0; l < p.layers(); ++l) {
        for (int k = 0; k < h.n; ++k)
            for (int P = 1; P <= 3; ++P) {
                const Mat pp = site_op(pauli(P), k, h.n) * site_op(pauli(P), (k + 1) % h.n, h.n);
                const double t = p.gamma[l] * h.J;
                psi = (std::cos(t) * Mat::Identity(D, D) - cplx(0, std::sin(t)) * pp) * psi;
            }
        Mat b = Mat::Identity(D, D);
        for (int k = 0; k < h.n; ++k) {
            Mat rz = Mat::Zero(2, 2);
            rz(0, 0) = std::exp(cplx(0, -p.beta[l] * h.omega[k]));
            rz(1, 1) = std::exp(cplx(0, p.beta[l] * h.omega[k]));
            b = site_op(rz, k, h.n) * b;
        }
        psi = b * psi;
    }
    return psi;
}

VhaParams random_params(int l, std::mt19937_64& rng) {
    std::normal_distribution<double> g(0, 1);
    VhaParams p = VhaParams::zeros(l);
    for (int i = 0; i < l; ++i) {
        p.beta[i] = g(rng);
        p.gamma[i] = 3 * g(rng);
    }
    return p;
}

Mat bell_diagonal(const Eigen::Vector4d& w) {
    Mat r = Mat::Zero(4, 4);
    for (int a = 0; a < 4; ++a) r += w[a] * proj(bell_state(a));
    return r;
}

Mat pauli_channel(const Mat& rho, const Eigen::Vector4d& w) {
    Mat out = Mat::Zero(2, 2);
    for (int a = 0; a < 4; ++a) out += w[a] * pauli(a) * rho * pauli(a);
    return out;
}

// Explicit single-qubit Pauli sums on every qubit, the long way round.
Mat explicit_pauli_noise(const Mat& rho, double f, int n) {
    Mat cur = rho;
    for (int k = 0; k < n; ++k) {
        Mat next = f * cur;
        for (int P = 1; P <= 3; ++P) {
            const Mat s = site_op(pauli(P), k, n);
            next += (1 - f) / 3 * s * cur * s;
        }
        cur = next;
    }
    return cur;
}

Mat random_hermitian(int d, std::mt19937_64& rng) {
    std::normal_distribution<double> g;
    Mat a(d, d);
    for (int i = 0; i < d; ++i)
        for (int j = 0; j < d; ++j) a(i, j) = cplx(g(rng), g(rng));
    return (a + a.adjoint()) / 2;
}

const SpinRing& ring6() {
    static const SpinRing h = SpinRing::random(6, 0.1, 1);
    return h;
}

const VhaFit& fit6() {
    static const VhaFit f = optimize_vha(ring6(), 20);
    return f;
}

}  // namespace

TEST_CASE("spin ring matches a term-by-term construction") {
    for (int n : {2, 3, 5}) {
        const auto h = SpinRing::random(n, 0.1, 7);
        REQUIRE(int(h.omega.size()) == n);
        for (double w : h.omega) CHECK(std::abs(w) <= 1);
        CHECK((h.hamiltonian() - ring_by_hand(h)).cwiseAbs().maxCoeff() < 1e-12);
        const auto d = h.diagonal();
        CHECK(d(h.initial_index()) == doctest::Approx(d.minCoeff()).epsilon(1e-14));
    }
    CHECK_THROWS_AS(SpinRing::random(1, 0.1, 1), ConfigError);
}

TEST_CASE("gate accounting") {
    const auto& h = ring6();
    CHECK(entangling_gate_count(h, 20) == 360);
    CHECK(single_qubit_gate_count(h, 20) == 126);
    const auto g = noise_for_xi(1.0, h, 20);
    CHECK(360 * g.depol_2q + 126 * g.depol_1q() == doctest::Approx(1.0).epsilon(1e-14));
    CHECK(g.depol_1q() == doctest::Approx(g.depol_2q / 5));
    CHECK_THROWS_AS(noise_for_xi(-1, h, 20), ConfigError);
}

TEST_CASE("zero layers prepare the initial basis state") {
    const auto& h = ring6();
    const Mat rho = vha_prepare(h, VhaParams::zeros(0), {});
    Mat ref = Mat::Zero(64, 64);
    ref(h.initial_index(), h.initial_index()) = 1;
    CHECK((rho - ref).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("ansatz kernels agree with dense exponentials") {
    std::mt19937_64 rng(11);
    const auto h = SpinRing::random(4, 0.3, 3);
    for (int trial = 0; trial < 5; ++trial) {
        const auto p = random_params(3, rng);
        const Vec a = vha_state(h, p);
        CHECK((a - vha_by_hand(h, p)).cwiseAbs().maxCoeff() < 1e-12);
        const Mat rho = vha_prepare(h, p, {});
        CHECK((rho - proj(a)).cwiseAbs().maxCoeff() < 1e-12);
    }
    VhaParams bad = VhaParams::zeros(2);
    bad.gamma.pop_back();
    CHECK_THROWS_AS(vha_state(h, bad), ConfigError);
}

TEST_CASE("ansatz conserves magnetization") {
    // Both H0 and the isotropic coupling commute with total Z, so the circuit
    // never leaves the sector of the initial basis state.
    std::mt19937_64 rng(5);
    const auto h = SpinRing::random(5, 0.1, 4);
    const Vec psi = vha_state(h, random_params(4, rng));
    const int w0 = std::popcount(std::uint64_t(h.initial_index()));
    double leak = 0;
    for (long i = 0; i < psi.size(); ++i)
        if (std::popcount(std::uint64_t(i)) != w0) leak += std::norm(psi(i));
    CHECK(leak < 1e-24);
}

TEST_CASE("noisy preparation stays a density matrix") {
    std::mt19937_64 rng(2);
    const auto h = SpinRing::random(4, 0.1, 2);
    const Mat rho = vha_prepare(h, random_params(3, rng), {0.05});
    CHECK(trace_error(rho) < 1e-12);
    CHECK(hermiticity_error(rho) < 1e-12);
    CHECK(min_eigenvalue(rho) > -1e-12);
    CHECK_THROWS_AS(vha_prepare(h, VhaParams::zeros(1), {1.5}), ConfigError);
}

TEST_CASE("variational ground state") {
    SUBCASE("two-site toy ring") {
        const auto h = SpinRing::random(2, 0.1, 2);
        const auto f = optimize_vha(h, 4, 1e-6);
        CHECK(f.reached);
        CHECK(f.error <= 1e-6);
        CHECK(f.error >= -1e-12);
    }
    SUBCASE("six-site ring, twenty layers") {
        const auto& f = fit6();
        CHECK(f.reached);
        CHECK(f.error <= 1e-4);
        CHECK(f.energy == doctest::Approx(ring6().ground_energy() + f.error));
    }
    SUBCASE("already optimal input") {
        const auto& f = fit6();
        const auto again = optimize_vha(ring6(), 20, 1e-4, 4, 1, &f.params);
        CHECK(again.iterations <= 2);
        CHECK(again.error <= f.error + 1e-12);
    }
    SUBCASE("unreachable tolerance reports the best attempt") {
        const auto h = SpinRing::random(4, 0.1, 3);
        const auto f = optimize_vha(h, 1, 1e-12, 1);
        CHECK_FALSE(f.reached);
        CHECK(std::isfinite(f.error));
        CHECK(f.params.layers() == 1);
    }
}

TEST_CASE("teleportation noise") {
    std::mt19937_64 rng(3);
    const Mat rho = random_density(16, rng);
    CHECK((teleport_noise(rho, {0, 1, 2, 3}, 1.0, 4) - rho).cwiseAbs().maxCoeff() < 1e-15);
    CHECK((teleport_noise(rho, {0, 1, 2, 3}, 0.9, 4) - explicit_pauli_noise(rho, 0.9, 4)).cwiseAbs().maxCoeff() <
          1e-12);
    CHECK_THROWS_AS(teleport_noise(rho, {0}, 0.0, 4), ConfigError);
    CHECK_THROWS_AS(teleport_noise(rho, {0}, 1.01, 4), ConfigError);

    // Weight of the error-free branch is f per teleported qubit: one qubit via
    // the Choi state, then the product over N.
    const double f = 0.995;
    Mat choi = proj(bell_state(0));
    choi = teleport_noise(choi, {1}, f, 2);
    CHECK(fidelity_to_pure(choi, bell_state(0)) == doctest::Approx(f).epsilon(1e-14));
    CHECK(std::pow(f, 6) == doctest::Approx(0.97).epsilon(0.001));
    CHECK(std::pow(f, 100) == doctest::Approx(0.60).epsilon(0.01));
    // Every Pauli string of weight w is damped by ((4f-1)/3)^w.
    Mat zz = Mat::Identity(64, 64);
    for (int k = 0; k < 6; ++k) zz = zz * site_op(pauli(3), k, 6);
    const Mat in = random_density(64, rng);
    const Mat out = teleport_noise(in, {0, 1, 2, 3, 4, 5}, f, 6);
    const double lam = (4 * f - 1) / 3;
    CHECK((zz * out).trace().real() == doctest::Approx(std::pow(lam, 6) * (zz * in).trace().real()).epsilon(1e-10));
}

TEST_CASE("teleporting through a Pauli-rotated pair") {
    std::mt19937_64 rng(4);
    for (int alpha = 0; alpha < 4; ++alpha)
        for (int i = 0; i < 100; ++i) CHECK(teleportation_identity(alpha, random_ket(2, rng)).distance < 1e-12);
}

TEST_CASE("Bell-diagonal resources give the matching Pauli channel") {
    const Eigen::Vector4d w(0.97, 0.01, 0.01, 0.01);
    const Ptm R = pauli_transfer_matrix([&](const Mat& r) { return teleport(r, bell_diagonal(w)); });
    Ptm expect = Ptm::Zero();
    expect.diagonal() << 1, 0.96, 0.96, 0.96;
    CHECK((R - expect).cwiseAbs().maxCoeff() < 1e-12);

    std::mt19937_64 rng(9);
    std::uniform_real_distribution<double> u(0, 1);
    for (int t = 0; t < 100; ++t) {
        Eigen::Vector4d v(u(rng), u(rng), u(rng), u(rng));
        v /= v.sum();
        const Mat rho = random_density(2, rng);
        CHECK((teleport(rho, bell_diagonal(v)) - pauli_channel(rho, v)).cwiseAbs().maxCoeff() < 1e-10);
    }
    // The twirled (Werner) resource is the teleport_noise channel.
    const double f = 0.93;
    const Eigen::Vector4d wer(f, (1 - f) / 3, (1 - f) / 3, (1 - f) / 3);
    const Mat rho = random_density(2, rng);
    CHECK((teleport(rho, bell_diagonal(wer)) - teleport_noise(rho, {0}, f, 1)).cwiseAbs().maxCoeff() < 1e-12);
}

TEST_CASE("mitigated estimator") {
    std::mt19937_64 rng(6);
    SUBCASE("pure states are returned unchanged") {
        for (int n = 2; n <= 4; ++n) {
            const Mat rho = proj(random_ket(8, rng));
            const Mat s = random_hermitian(8, rng);
            CHECK(mitigated_expectation(std::vector<Mat>(n, rho), s) ==
                  doctest::Approx((s * rho).trace().real()).epsilon(1e-12));
        }
    }
    SUBCASE("two-level closed form") {
        const double q = 0.2;
        Mat rho = Mat::Zero(2, 2);
        rho(0, 0) = 1 - q;
        rho(1, 1) = q;
        for (int n = 2; n <= 4; ++n) {
            const double a = std::pow(1 - q, n), b = std::pow(q, n);
            CHECK(mitigated_expectation(std::vector<Mat>(n, rho), pauli(3)) ==
                  doctest::Approx((a - b) / (a + b)).epsilon(1e-14));
        }
        CHECK(mitigated_expectation({rho, rho}, pauli(3)) == doctest::Approx(0.6 / 0.68).epsilon(1e-14));
    }
    SUBCASE("errors") {
        const Mat r = random_density(4, rng);
        CHECK_THROWS_AS(mitigated_expectation({r}, pauli(0)), ConfigError);
        CHECK_THROWS_AS(mitigated_expectation({r, random_density(2, rng)}, r), DimensionError);
        Mat a = Mat::Zero(2, 2), b = Mat::Zero(2, 2);
        a(0, 0) = 1;
        b(1, 1) = 1;
        CHECK_THROWS_AS(mitigated_expectation({a, b}, pauli(3)), NumericalError);
    }
}

TEST_CASE("derangement circuit agrees with the formula") {
    std::mt19937_64 rng(8);
    SUBCASE("distinct mixed copies, noiseless") {
        for (int t = 0; t < 5; ++t) {
            const Mat a = random_density(4, rng), b = random_density(4, rng);
            const Mat s = random_hermitian(4, rng);
            CHECK(derangement_circuit_estimate(a, b, s, {}, 1.0) ==
                  doctest::Approx(mitigated_expectation({a, b}, s)).epsilon(1e-9));
        }
    }
    SUBCASE("prepared toy states under gate noise in the preparation") {
        const auto h = SpinRing::random(2, 0.1, 2);
        const auto f = optimize_vha(h, 4, 1e-6);
        const Mat rho = vha_prepare(h, f.params, {0.02});
        const Mat H = h.hamiltonian();
        CHECK(derangement_circuit_estimate(rho, rho, H, {}, 1.0) ==
              doctest::Approx(mitigated_expectation({rho, rho}, H)).epsilon(1e-8));
        const Mat tele = teleport_noise(rho, {0, 1}, 0.97, 2);
        CHECK(derangement_circuit_estimate(rho, rho, H, {}, 0.97) ==
              doctest::Approx(mitigated_expectation({rho, tele}, H)).epsilon(1e-8));
    }
    SUBCASE("six qubits, pure identical copies") {
        const Mat rho = proj(vha_state(ring6(), fit6().params));
        const Mat H = ring6().hamiltonian();
        CHECK(derangement_circuit_estimate(rho, rho, H, {}, 1.0) ==
              doctest::Approx(mitigated_expectation({rho, rho}, H)).epsilon(1e-9));
    }
    SUBCASE("mismatched inputs") {
        CHECK_THROWS_AS(derangement_circuit_estimate(random_density(4, rng), random_density(2, rng), pauli(0), {}, 1),
                        DimensionError);
        CHECK_THROWS_AS(derangement_circuit_estimate(random_density(3, rng), random_density(3, rng),
                                                     Mat::Identity(3, 3), {}, 1),
                        DimensionError);
    }
}

TEST_CASE("imperfect pairs act as depolarizing noise on one copy") {
    std::mt19937_64 rng(10);
    const Mat a = random_density(8, rng);
    const Mat s = random_hermitian(8, rng);
    const GateNoise g{0.01};
    for (double f : {0.99, 0.9}) {
        const double via_pairs = derangement_circuit_estimate(a, a, s, g, f);
        const double explicit_noise = derangement_circuit_estimate(a, explicit_pauli_noise(a, f, 3), s, g, 1.0);
        CHECK(via_pairs == doctest::Approx(explicit_noise).epsilon(1e-9));
    }
}

TEST_CASE("suppression favours the dominant eigenvector") {
    const auto& h = ring6();
    const Mat H = h.hamiltonian();
    const double e0 = h.ground_energy();
    const Vec psi = vha_state(h, fit6().params);
    for (double p : {0.01, 0.1, 0.3, 0.6, 0.9}) {
        const Mat rho = (1 - p) * proj(psi) + p * Mat::Identity(64, 64) / 64.0;
        const double raw = std::abs((H * rho).trace().real() - e0);
        const double mit = std::abs(mitigated_expectation({rho, rho}, H) - e0);
        CHECK(mit < raw);
    }
    for (double xi : {0.1, 0.3, 1.0, 3.0, 5.0}) {
        const Mat rho = vha_prepare(h, fit6().params, noise_for_xi(xi, h, 20));
        const double raw = std::abs((H * rho).trace().real() - e0);
        const double mit = std::abs(mitigated_expectation({rho, rho}, H) - e0);
        CHECK(mit < raw);
    }
}

TEST_CASE("formula-level sweep") {
    SweepOptions o;
    o.circuit = false;
    const auto rows = energy_error_sweep(ring6(), fit6().params, {0.0, 1e-4, 1e-3, 1.0}, o);
    REQUIRE(rows.size() == 4);
    CHECK(rows[0].unmitigated < 1e-4);
    for (double e : rows[0].ideal) CHECK(e < 1e-4);
    CHECK(rows[0].noisy_bell < 1e-4);
    CHECK(std::isnan(rows[0].both));
    // With imperfect pairs the error levels off instead of vanishing.
    CHECK(rows[1].noisy_bell > 0);
    CHECK(rows[1].noisy_bell == doctest::Approx(rows[2].noisy_bell).epsilon(0.2));
    CHECK(rows[2].noisy_bell < rows[3].unmitigated);
    CHECK(rows[3].ideal[1] <= rows[3].ideal[0]);
    CHECK(rows[3].ideal[2] <= rows[3].ideal[0]);
    CHECK(rows[3].ideal[0] < rows[3].unmitigated);
}

TEST_CASE("controlled-SWAP decomposition") {
    const auto& gates = cswap_decomposition();
    REQUIRE(gates.size() == 5);
    Mat u = Mat::Identity(8, 8);
    for (const auto& g : gates) u = qubits::embed(g.u, {g.roles[0], g.roles[1]}, 3) * u;
    Mat fredkin = Mat::Identity(8, 8);
    fredkin.row(5).swap(fredkin.row(6));
    CHECK((u - fredkin).cwiseAbs().maxCoeff() < 1e-12);
}
