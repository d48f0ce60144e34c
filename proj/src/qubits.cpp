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

#include "qlink/qubits.hpp"

#include <cmath>

namespace qlink::qubits {
namespace {

struct Layout {
    std::vector<long> off;
    std::vector<long> bases;
};

Layout layout(const std::vector<int>& qs, int n) {
    const int k = int(qs.size());
    Layout L;
    long mask = 0;
    for (int q : qs) {
        if (q < 0 || q >= n) throw DimensionError("qubit index out of range");
        mask |= 1L << (n - 1 - q);
    }
    L.off.resize(1L << k);
    for (long a = 0; a < (1L << k); ++a) {
        long o = 0;
        for (int b = 0; b < k; ++b)
            if ((a >> (k - 1 - b)) & 1) o |= 1L << (n - 1 - qs[b]);
        L.off[a] = o;
    }
    const long D = 1L << n;
    L.bases.reserve(D >> k);
    for (long i = 0; i < D; ++i)
        if (!(i & mask)) L.bases.push_back(i);
    return L;
}

}  // namespace

void apply_gate(Mat& rho, const Mat& U, const std::vector<int>& qs, int n) {
    const long D = 1L << n;
    if (rho.rows() != D) throw DimensionError("apply_gate: register size mismatch");
    const Layout L = layout(qs, n);
    const long g = long(L.off.size());
    if (U.rows() != g) throw DimensionError("apply_gate: gate size mismatch");

    std::vector<cplx> v(g), w(g);
    for (long j = 0; j < D; ++j) {
        cplx* col = rho.col(j).data();
        for (long i0 : L.bases) {
            for (long a = 0; a < g; ++a) v[a] = col[i0 + L.off[a]];
            for (long a = 0; a < g; ++a) {
                cplx s = 0;
                for (long b = 0; b < g; ++b) s += U(a, b) * v[b];
                w[a] = s;
            }
            for (long a = 0; a < g; ++a) col[i0 + L.off[a]] = w[a];
        }
    }
    const Mat Uc = U.conjugate();
    Mat tmp(D, g);
    for (long j0 : L.bases) {
        tmp.setZero();
        for (long c = 0; c < g; ++c)
            for (long b = 0; b < g; ++b)
                if (Uc(c, b) != cplx(0)) tmp.col(c) += Uc(c, b) * rho.col(j0 + L.off[b]);
        for (long c = 0; c < g; ++c) rho.col(j0 + L.off[c]) = tmp.col(c);
    }
}

void depolarize(Mat& rho, const std::vector<int>& qs, double p, int n) {
    if (p == 0.0) return;
    const long D = 1L << n;
    if (rho.rows() != D) throw DimensionError("depolarize: register size mismatch");
    const Layout L = layout(qs, n);
    const long g = long(L.off.size());
    for (long j0 : L.bases)
        for (long b = 0; b < g; ++b) {
            cplx* col = rho.col(j0 + L.off[b]).data();
            for (long i0 : L.bases)
                for (long a = 0; a < g; ++a)
                    if (a != b) col[i0 + L.off[a]] *= (1.0 - p);
        }
    for (long j0 : L.bases)
        for (long i0 : L.bases) {
            cplx t = 0;
            for (long a = 0; a < g; ++a) t += rho(i0 + L.off[a], j0 + L.off[a]);
            for (long a = 0; a < g; ++a) {
                cplx& e = rho(i0 + L.off[a], j0 + L.off[a]);
                e = (1.0 - p) * e + p * t / double(g);
            }
        }
}

void apply_involution(Mat& rho, const std::vector<long>& perm) {
    const long D = rho.rows();
    if (long(perm.size()) != D) throw DimensionError("apply_involution: size mismatch");
    for (long j = 0; j < D; ++j) {
        const long pj = perm[j];
        for (long i = 0; i < D; ++i) {
            const long pi = perm[i];
            if (pj > j || (pj == j && pi > i)) std::swap(rho(i, j), rho(pi, pj));
        }
    }
}

Mat cnot() {
    Mat m = Mat::Zero(4, 4);
    m(0, 0) = m(1, 1) = m(2, 3) = m(3, 2) = 1.0;
    return m;
}

Mat hadamard() {
    Mat h(2, 2);
    h << 1, 1, 1, -1;
    return h / std::sqrt(2.0);
}

Mat s_gate() {
    Mat s = Mat::Zero(2, 2);
    s(0, 0) = 1.0;
    s(1, 1) = I_;
    return s;
}

Mat swap_gate() {
    Mat m = Mat::Zero(4, 4);
    m(0, 0) = m(1, 2) = m(2, 1) = m(3, 3) = 1.0;
    return m;
}

Mat embed(const Mat& U, const std::vector<int>& qs, int n) {
    const Layout L = layout(qs, n);
    const long g = long(L.off.size());
    Mat out = Mat::Zero(1L << n, 1L << n);
    for (long i0 : L.bases)
        for (long a = 0; a < g; ++a)
            for (long b = 0; b < g; ++b) out(i0 + L.off[a], i0 + L.off[b]) = U(a, b);
    return out;
}

}  // namespace qlink::qubits
