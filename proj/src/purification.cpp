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

#include "qlink/purification.hpp"

#include <cmath>
#include <functional>

#include "qlink/qubits.hpp"

namespace qlink::purify {

namespace q = qlink::qubits;

void NoiseModel::validate() const {
    for (double p : {depol_1q, depol_2q, meas_error})
        if (p < 0 || p > 1) throw ConfigError("noise probabilities must lie in [0, 1]");
}

PurificationProtocol PurificationProtocol::canonical(int nrounds) {
    if (nrounds < 1) throw ConfigError("protocol needs at least one round");
    Mat iy = Mat::Zero(2, 2);
    iy(0, 1) = 1;
    iy(1, 0) = -1;
    PurificationProtocol p;
    for (int k = 0; k < nrounds; ++k) {
        RoundSpec r;
        r.target = k % 2 == 0 ? Target::BitFlip : Target::PhaseFlip;
        if (k == 0) {
            r.pre_a = q::hadamard();
            r.pre_b = q::hadamard() * iy;
        }
        p.rounds.push_back(r);
    }
    return p;
}

PurificationProtocol PurificationProtocol::s_gates(int nrounds, bool identity) {
    auto p = canonical(nrounds);
    if (identity) return p;  // an identity is no gate, so it carries no gate noise either
    for (size_t k = 1; k < p.rounds.size(); ++k) {
        p.rounds[k].pre_a = q::s_gate();
        p.rounds[k].pre_b = q::s_gate().adjoint();
    }
    return p;
}

RoundResult purify_round(const Mat& pair_a, const Mat& pair_b, const RoundSpec& spec, const NoiseModel& noise) {
    if (pair_a.rows() != 4 || pair_b.rows() != 4) throw DimensionError("purify_round needs two-qubit states");
    noise.validate();
    constexpr int n = 4;
    Mat r = kron(pair_a, pair_b);
    auto gate1 = [&](const Mat& u, int qb) {
        q::apply_gate(r, u, {qb}, n);
        q::depolarize(r, {qb}, noise.depol_1q, n);
    };
    auto gate2 = [&](int c, int t) {
        q::apply_gate(r, q::cnot(), {c, t}, n);
        q::depolarize(r, {c, t}, noise.depol_2q, n);
    };
    if (spec.pre_a.size()) gate1(spec.pre_a, 0), gate1(spec.pre_a, 2);
    if (spec.pre_b.size()) gate1(spec.pre_b, 1), gate1(spec.pre_b, 3);
    if (spec.target == Target::BitFlip) {
        gate2(0, 2);
        gate2(1, 3);
    } else {
        gate2(2, 0);
        gate2(3, 1);
        gate1(q::hadamard(), 2);
        gate1(q::hadamard(), 3);
    }
    // Each reported bit flips independently with probability meas_error.
    const double pm = noise.meas_error;
    const double p_same = (1 - pm) * (1 - pm) + pm * pm;
    const double p_diff = 2 * pm * (1 - pm);
    Mat out = Mat::Zero(4, 4);
    for (int m2 = 0; m2 < 2; ++m2)
        for (int m3 = 0; m3 < 2; ++m3) {
            const double w = m2 == m3 ? p_same : p_diff;
            const int off = m2 * 2 + m3;
            for (int a = 0; a < 4; ++a)
                for (int b = 0; b < 4; ++b) out(a, b) += w * r(a * 4 + off, b * 4 + off);
        }
    const double p = out.trace().real();
    if (p <= 1e-15) throw NumericalError("purification round has zero acceptance probability");
    return {hermitize(out / p), p};
}

PurificationStats run_protocol(const RawSource& raw, const PurificationProtocol& protocol, const NoiseModel& noise) {
    if (protocol.rounds.empty()) throw ConfigError("protocol needs at least one round");
    if (!(raw.success_prob > 0)) throw NumericalError("raw success probability is zero");
    PurificationStats s;
    Mat r = raw.state;
    double e = 1.0 / raw.success_prob;
    s.per_round_failure.push_back(1 - raw.success_prob);
    for (const auto& spec : protocol.rounds) {
        auto rr = purify_round(r, r, spec, noise);
        r = rr.out;
        e = 2 * e / rr.success_prob;
        s.round_success.push_back(rr.success_prob);
        s.per_round_failure.push_back(1 - rr.success_prob);
    }
    s.final_state = r;
    s.fidelity = fidelity_to_pure(r, bell_state(0));
    s.concurrence = concurrence(r);
    s.expected_raw_pairs = e;
    s.expected_attempts = e / raw.success_prob;
    s.generation_rate = 1.0 / (s.expected_attempts * raw.attempt_time);
    return s;
}

PurificationStats alt_protocol_s_gates(const RawSource& raw, int nrounds, const NoiseModel& noise) {
    return run_protocol(raw, PurificationProtocol::s_gates(nrounds), noise);
}

namespace {
Mat bilateral(int i) { return kron(pauli(i), pauli(i)); }
}  // namespace

Mat twirl(const Mat& rho) {
    Mat out = Mat::Zero(4, 4);
    for (int i = 0; i < 4; ++i) out += bilateral(i) * rho * bilateral(i).adjoint();
    return out / 4.0;
}

Mat twirl(const Mat& rho, std::mt19937_64& rng, int samples) {
    std::uniform_int_distribution<int> pick(0, 3);
    Mat out = Mat::Zero(4, 4);
    for (int k = 0; k < samples; ++k) {
        const Mat p = bilateral(pick(rng));
        out += p * rho * p.adjoint();
    }
    return out / double(samples);
}

Eigen::Vector4d bell_diagonal(const Mat& rho) {
    const Mat b = bell_basis();
    Eigen::Vector4d d;
    for (int i = 0; i < 4; ++i) d[i] = fidelity_to_pure(rho, b.col(i));
    return d;
}

MonteCarloEstimate monte_carlo_attempts(const RawSource& raw, const PurificationProtocol& protocol,
                                        const NoiseModel& noise, std::mt19937_64& rng, int trials) {
    std::vector<double> p;
    Mat r = raw.state;
    for (const auto& spec : protocol.rounds) {
        auto rr = purify_round(r, r, spec, noise);
        r = rr.out;
        p.push_back(rr.success_prob);
    }
    std::uniform_real_distribution<double> u(0, 1);
    std::function<long(int)> produce = [&](int level) -> long {
        long used = 0;
        if (level == 0) {
            do ++used;
            while (u(rng) >= raw.success_prob);
            return used;
        }
        for (;;) {
            used += produce(level - 1) + produce(level - 1);
            if (u(rng) < p[level - 1]) return used;
        }
    };
    double sum = 0, sum2 = 0;
    for (int t = 0; t < trials; ++t) {
        const double a = double(produce(int(p.size())));
        sum += a;
        sum2 += a * a;
    }
    MonteCarloEstimate m;
    m.trials = trials;
    m.mean_attempts = sum / trials;
    m.stderr_attempts = std::sqrt(std::max(0.0, sum2 / trials - m.mean_attempts * m.mean_attempts) / trials);
    return m;
}

}  // namespace qlink::purify
