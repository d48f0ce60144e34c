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
#include <numeric>

#include "qlink/esd.hpp"
#include "qlink/qubits.hpp"

namespace qlink::esd {

namespace {

Mat controlled(const Mat& u, bool first_controls) {
    Mat m = Mat::Identity(4, 4);
    if (first_controls) {
        m.bottomRightCorner(2, 2) = u;
    } else {
        m(1, 1) = u(0, 0), m(1, 3) = u(0, 1);
        m(3, 1) = u(1, 0), m(3, 3) = u(1, 1);
    }
    return m;
}

}  // namespace

// CX(0->1); CX(2->1) then CV^dag(1->2); CX(0->1); CV(0->2); CV(1->2) then CX(2->1),
// with V^2 = X. Noise acting between these gates differs from noise lumped
// after the whole controlled-SWAP.
const std::vector<RoleGate>& cswap_decomposition() {
    static const std::vector<RoleGate> g = [] {
        Mat v(2, 2);
        v << cplx(1, 1), cplx(1, -1), cplx(1, -1), cplx(1, 1);
        v /= 2.0;
        const Mat x = pauli(1);
        const Mat cx_fwd = controlled(x, true), cx_back = controlled(x, false);
        return std::vector<RoleGate>{
            {cx_fwd, {0, 1}},
            {Mat(controlled(v.adjoint(), true) * cx_back), {1, 2}},
            {cx_fwd, {0, 1}},
            {controlled(v, true), {0, 2}},
            {Mat(cx_back * controlled(v, true)), {1, 2}},
        };
    }();
    return g;
}

// Register: ancilla (qubit 0, most significant), copy 1, copy 2.
double derangement_circuit_estimate(const Mat& copy1, const Mat& copy2, const Mat& sigma, const GateNoise& noise,
                                    double bell_f) {
    const long d = copy1.rows();
    if (copy1.cols() != d || copy2.rows() != d || copy2.cols() != d || sigma.rows() != d)
        throw DimensionError("derangement copies and observable must share one dimension");
    if (d < 2 || !std::has_single_bit(std::uint64_t(d))) throw DimensionError("copies must be qubit registers");
    const int N = std::countr_zero(std::uint64_t(d));
    const int n = 2 * N + 1;
    if (n > 13) throw DimensionError("derangement circuit is limited to 13 qubits");

    std::vector<int> qs(N);
    std::iota(qs.begin(), qs.end(), 0);
    const Mat c2 = teleport_noise(copy2, qs, bell_f, N);

    // |+><+| x copy1 x copy2, filled in place to avoid full-size temporaries.
    const long D = 1L << n, dd = d * d;
    Mat rho(D, D);
    for (long j = 0; j < D; ++j) {
        const long jr = j % dd, j1 = jr / d, j2 = jr % d;
        for (long i = 0; i < D; ++i) {
            const long ir = i % dd;
            rho(i, j) = 0.5 * copy1(ir / d, j1) * c2(ir % d, j2);
        }
    }

    const long anc = 1L << (n - 1);
    for (int k = 0; k < N; ++k) {
        const int q1 = 1 + k, q2 = 1 + N + k;
        const long b1 = 1L << (n - 1 - q1), b2 = 1L << (n - 1 - q2);
        std::vector<long> perm(D);
        for (long i = 0; i < D; ++i) {
            perm[i] = i;
            if ((i & anc) && bool(i & b1) != bool(i & b2)) perm[i] = i ^ b1 ^ b2;
        }
        if (noise.depol_2q == 0) {
            qubits::apply_involution(rho, perm);
            continue;
        }
        const int role[3] = {0, q1, q2};
        for (const auto& g : cswap_decomposition()) {
            const std::vector<int> qs{role[g.roles[0]], role[g.roles[1]]};
            qubits::apply_gate(rho, g.u, qs, n);
            qubits::depolarize(rho, qs, noise.depol_2q * 16 / 15, n);
        }
    }

    // <X_anc O_1> = 2 Re Tr[O M] with M the copy-1 reduction of the <0|rho|1> ancilla block.
    const long h = D / 2;
    Mat M = Mat::Zero(d, d);
    for (long j1 = 0; j1 < d; ++j1)
        for (long i1 = 0; i1 < d; ++i1) {
            cplx s = 0;
            for (long r = 0; r < d; ++r) s += rho(i1 * d + r, h + j1 * d + r);
            M(i1, j1) = s;
        }
    const double den = 2 * M.trace().real();
    if (std::abs(den) < 1e-12) throw NumericalError("ancilla coherence below 1e-12");
    return 2 * (sigma * M).trace().real() / den;
}

}  // namespace qlink::esd
