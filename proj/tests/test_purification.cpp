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

#include <cmath>
#include <random>

#include "doctest.h"
#include "qlink/cavity.hpp"
#include "qlink/purification.hpp"

using namespace qlink;
using namespace qlink::purify;

namespace {

// Brute-force noiseless bit-flip round: explicit permutation for the two
// bilateral CNOTs, then a sum over the accepted outcomes of qubits 2 and 3.
std::pair<Mat, double> brute_bit_round(const Mat& a, const Mat& b) {
    const Mat r = kron(a, b);
    Mat P = Mat::Zero(16, 16);
    for (int x = 0; x < 16; ++x) {
        const int a1 = (x >> 3) & 1, b1 = (x >> 2) & 1, a2 = (x >> 1) & 1, b2 = x & 1;
        const int y = (a1 << 3) | (b1 << 2) | ((a2 ^ a1) << 1) | (b2 ^ b1);
        P(y, x) = 1;
    }
    const Mat s = P * r * P.adjoint();
    Mat out = Mat::Zero(4, 4);
    for (int m : {0, 3})
        for (int i = 0; i < 4; ++i)
            for (int j = 0; j < 4; ++j) out(i, j) += s(i * 4 + m, j * 4 + m);
    const double p = out.trace().real();
    return {out / p, p};
}

Mat bell_mixture(const Eigen::Vector4d& w) {
    const Mat b = bell_basis();
    Mat r = Mat::Zero(4, 4);
    for (int i = 0; i < 4; ++i) r += w[i] * b.col(i) * b.col(i).adjoint();
    return r;
}

Mat werner(const Vec& psi, double F) {
    return F * proj(psi) + (1 - F) / 3 * (Mat::Identity(4, 4) - proj(psi));
}

RoundSpec plain(Target t) {
    RoundSpec s;
    s.target = t;
    return s;
}

RawSource cavity_source(double t2c) {
    cavity::CavityParams c;
    c.T2_charge = t2c;
    const auto r = cavity::generate_raw_pair(cavity::OptimizableParameters::baseline(), c, 0.5);
    return {r.spin_state, r.success_probability, r.attempt_time};
}

}  // namespace

TEST_CASE("perfect pairs pass unchanged") {
    const Mat phi = proj(bell_state(0));
    for (Target t : {Target::BitFlip, Target::PhaseFlip}) {
        const auto r = purify_round(phi, phi, plain(t), NoiseModel::noiseless());
        CHECK(r.success_prob == doctest::Approx(1).epsilon(1e-12));
        CHECK((r.out - phi).cwiseAbs().maxCoeff() < 1e-12);
    }
}

TEST_CASE("bit-flip mixture") {
    const double p = 0.1;
    const Mat rho = (1 - p) * proj(bell_state(0)) + p * proj(bell_state(1));
    const auto r = purify_round(rho, rho, plain(Target::BitFlip), NoiseModel::noiseless());
    const auto [bo, bp] = brute_bit_round(rho, rho);
    const double denom = (1 - p) * (1 - p) + p * p;
    CHECK(r.success_prob == doctest::Approx(denom).epsilon(1e-12));
    CHECK(fidelity_to_pure(r.out, bell_state(1)) == doctest::Approx(p * p / denom).epsilon(1e-12));
    CHECK(bp == doctest::Approx(r.success_prob).epsilon(1e-12));
    CHECK((bo - r.out).cwiseAbs().maxCoeff() < 1e-12);
}

TEST_CASE("Bell-diagonal grid against brute force") {
    std::mt19937_64 rng(11);
    std::uniform_real_distribution<double> u(0.01, 1);
    for (int k = 0; k < 20; ++k) {
        Eigen::Vector4d w(u(rng), u(rng), u(rng), u(rng));
        w /= w.sum();
        const Mat rho = bell_mixture(w);
        const auto r = purify_round(rho, rho, plain(Target::BitFlip), NoiseModel::noiseless());
        const auto [bo, bp] = brute_bit_round(rho, rho);
        CHECK(std::abs(r.success_prob - bp) < 1e-10);
        CHECK((r.out - bo).cwiseAbs().maxCoeff() < 1e-10);
        CHECK(r.success_prob > 0);
        CHECK(r.success_prob <= 1 + 1e-12);
    }
}

TEST_CASE("phase round suppresses phase errors") {
    const double p = 0.1;
    const Mat rho = (1 - p) * proj(bell_state(0)) + p * proj(bell_state(3));
    const auto r = purify_round(rho, rho, plain(Target::PhaseFlip), NoiseModel::noiseless());
    const double denom = (1 - p) * (1 - p) + p * p;
    CHECK(r.success_prob == doctest::Approx(denom).epsilon(1e-12));
    CHECK(fidelity_to_pure(r.out, bell_state(3)) == doctest::Approx(p * p / denom).epsilon(1e-12));
}

TEST_CASE("Werner states improve") {
    for (double F = 0.55; F < 1.0; F += 0.05) {
        const Mat w = werner(bell_state(0), F);
        const auto r = purify_round(w, w, plain(Target::BitFlip), NoiseModel::noiseless());
        CHECK(fidelity_to_pure(r.out, bell_state(0)) > F);
    }
}

TEST_CASE("singlet-anchored input ends on phi+") {
    Vec psi_m = Vec::Zero(4);
    psi_m(1) = 1 / std::sqrt(2.0);
    psi_m(2) = -1 / std::sqrt(2.0);
    RawSource src{werner(psi_m, 0.9), 0.9, 15};
    for (int n : {1, 2, 4}) {
        const auto s = run_protocol(src, PurificationProtocol::canonical(n), NoiseModel{});
        const auto d = bell_diagonal(s.final_state);
        int arg = 0;
        d.maxCoeff(&arg);
        CHECK(arg == 0);
        CHECK(s.expected_raw_pairs >= std::pow(2.0, n));
        CHECK(s.per_round_failure.size() == size_t(n + 1));
    }
}

TEST_CASE("protocol validation") {
    RawSource src{proj(bell_state(0)), 1, 15};
    CHECK_THROWS_AS(PurificationProtocol::canonical(0), ConfigError);
    CHECK_THROWS_AS(run_protocol(src, PurificationProtocol{}, NoiseModel{}), ConfigError);
    src.success_prob = 0;
    CHECK_THROWS_AS(run_protocol(src, PurificationProtocol::canonical(1), NoiseModel{}), NumericalError);
    NoiseModel bad;
    bad.meas_error = 1.5;
    CHECK_THROWS_AS(bad.validate(), ConfigError);
    // Two orthogonal Bell states never agree on a bit-flip round.
    CHECK_THROWS_AS(purify_round(proj(bell_state(0)), proj(bell_state(1)), plain(Target::BitFlip),
                                 NoiseModel::noiseless()),
                    NumericalError);
}

TEST_CASE("canonical protocol alternates") {
    const auto p = PurificationProtocol::canonical(4);
    REQUIRE(p.rounds.size() == 4);
    CHECK(p.rounds[0].target == Target::BitFlip);
    CHECK(p.rounds[1].target == Target::PhaseFlip);
    CHECK(p.rounds[2].target == Target::BitFlip);
    CHECK(p.rounds[3].target == Target::PhaseFlip);
}

TEST_CASE("twirl") {
    std::mt19937_64 rng(5);
    for (int k = 0; k < 50; ++k) {
        const Mat r = random_density(4, rng);
        const Mat t = twirl(r);
        CHECK(std::abs(fidelity_to_pure(t, bell_state(0)) - fidelity_to_pure(r, bell_state(0))) < 1e-12);
        const Mat b = bell_basis();
        const Mat inb = b.adjoint() * t * b;
        CHECK((inb - Mat(inb.diagonal().asDiagonal())).cwiseAbs().maxCoeff() < 1e-12);
    }
    Eigen::Vector4d w(0.7, 0.1, 0.15, 0.05);
    const Mat bd = bell_mixture(w);
    CHECK((twirl(bd) - bd).cwiseAbs().maxCoeff() < 1e-14);

    const cplx c0(0.6, 0), c1(0, 0.8);
    const Vec sup = c0 * bell_basis().col(0) + c1 * bell_basis().col(1);
    const auto d = bell_diagonal(twirl(proj(sup)));
    CHECK(d[0] == doctest::Approx(0.36).epsilon(1e-12));
    CHECK(d[1] == doctest::Approx(0.64).epsilon(1e-12));
    CHECK(std::abs(d[2]) < 1e-12);
    CHECK(std::abs(d[3]) < 1e-12);

    const Mat sampled = twirl(proj(sup), rng, 20000);
    CHECK(std::abs(fidelity_to_pure(sampled, bell_state(0)) - 0.36) < 1e-12);
    CHECK((sampled - twirl(proj(sup))).cwiseAbs().maxCoeff() < 0.03);
}

TEST_CASE("S-gate variant with identity is the canonical protocol") {
    std::mt19937_64 rng(8);
    RawSource src{random_density(4, rng), 0.8, 15};
    const auto a = run_protocol(src, PurificationProtocol::canonical(4), NoiseModel{});
    const auto b = run_protocol(src, PurificationProtocol::s_gates(4, true), NoiseModel{});
    CHECK((a.final_state - b.final_state).cwiseAbs().maxCoeff() < 1e-12);
    CHECK(a.expected_raw_pairs == doctest::Approx(b.expected_raw_pairs).epsilon(1e-12));
}

TEST_CASE("Monte Carlo agrees with branch bookkeeping") {
    Vec psi_m = Vec::Zero(4);
    psi_m(1) = 1 / std::sqrt(2.0);
    psi_m(2) = -1 / std::sqrt(2.0);
    RawSource src{werner(psi_m, 0.85), 0.9, 15};
    const auto proto = PurificationProtocol::canonical(2);
    const auto s = run_protocol(src, proto, NoiseModel{});
    std::mt19937_64 rng(3);
    const auto mc = monte_carlo_attempts(src, proto, NoiseModel{}, rng, 20000);
    // The simulated count is raw generation attempts, which is what
    // expected_raw_pairs tallies (2^r over the product of all success rates).
    CHECK(std::abs(mc.mean_attempts - s.expected_raw_pairs) < 3 * mc.stderr_attempts);
    CHECK(s.generation_rate == doctest::Approx(1 / (s.expected_attempts * 15)).epsilon(1e-12));
}

TEST_CASE("cavity pairs through the protocol") {
    const auto s400 = cavity_source(400);
    const auto s100 = cavity_source(100);
    const NoiseModel noise;

    const auto two = run_protocol(s400, PurificationProtocol::canonical(2), noise);
    CHECK(two.fidelity == doctest::Approx(0.995).epsilon(0.005));
    CHECK(two.per_round_failure[0] == doctest::Approx(0.10).epsilon(0.2));
    CHECK(two.per_round_failure[1] == doctest::Approx(0.08).epsilon(0.25));
    CHECK(two.per_round_failure[2] == doctest::Approx(0.06).epsilon(0.34));
    CHECK(two.expected_raw_pairs == doctest::Approx(5.2).epsilon(0.1));
    CHECK(two.generation_rate * 1e3 == doctest::Approx(11.6).epsilon(0.15));

    const auto four = run_protocol(s100, PurificationProtocol::canonical(4), noise);
    CHECK(four.fidelity == doctest::Approx(0.998).epsilon(0.005));
    CHECK(four.expected_raw_pairs == doctest::Approx(25.4).epsilon(0.1));

    const auto ideal = NoiseModel::noiseless();
    for (const auto* src : {&s400, &s100}) {
        const auto c0 = run_protocol(*src, PurificationProtocol::canonical(4), ideal);
        const auto c1 = alt_protocol_s_gates(*src, 4, ideal);
        CHECK(c1.concurrence >= c0.concurrence - 1e-12);
        const auto n0 = run_protocol(*src, PurificationProtocol::canonical(4), noise);
        const auto n1 = alt_protocol_s_gates(*src, 4, noise);
        CHECK(n1.concurrence <= n0.concurrence + 1e-12);
    }
}
