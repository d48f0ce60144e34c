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

#include "qlink/shuttle.hpp"

namespace qlink::shuttle {

namespace {

constexpr int kModes = 8;

int dot_of(int m) { return m / 4; }
int valley_of(int m) { return (m / 2) % 2; }
int spin_of(int m) { return m % 2; }

// c^dagger_a c_b on an occupation bitmask; returns the sign, 0 if annihilated.
int hop(unsigned& occ, int a, int b) {
    if (!(occ >> b & 1u)) return 0;
    int sign = std::popcount(occ & ((1u << b) - 1)) % 2 ? -1 : 1;
    occ &= ~(1u << b);
    if (occ >> a & 1u) return 0;
    sign *= std::popcount(occ & ((1u << a) - 1)) % 2 ? -1 : 1;
    occ |= 1u << a;
    return sign;
}

}  // namespace

int TwoElectronBasis::index(int m1, int m2) const {
    if (m1 > m2) std::swap(m1, m2);
    for (size_t k = 0; k < pairs.size(); ++k)
        if (pairs[k] == std::make_pair(m1, m2)) return int(k);
    throw ConfigError("no such two-electron state");
}

int TwoElectronBasis::right_occupation(int k) const {
    return dot_of(pairs[k].first) + dot_of(pairs[k].second);
}

const TwoElectronBasis& two_electron_basis() {
    static const TwoElectronBasis b = [] {
        TwoElectronBasis t;
        for (int i = 0; i < kModes; ++i)
            for (int j = i + 1; j < kModes; ++j) t.pairs.emplace_back(i, j);
        return t;
    }();
    return b;
}

Mat build_two_electron_hamiltonian(const ReadoutParams& p, double eps) {
    const auto& basis = two_electron_basis();
    const int n = int(basis.pairs.size());
    // Single-particle part.
    Mat h = Mat::Zero(kModes, kModes);
    for (int m = 0; m < kModes; ++m) {
        const int d = dot_of(m);
        const double ez = d == 0 ? p.EZ_L : p.EZ_R;
        const double ev = d == 0 ? p.EV_L : p.EV_R;
        h(m, m) = (d == 0 ? eps : -eps) / 2 + ez / 2 * (spin_of(m) == 0 ? 1 : -1) + ev / 2 * (valley_of(m) == 1 ? 1 : -1);
        if (d == 0) {
            h(m, m + 4) = p.t;
            h(m + 4, m) = p.t;
        }
    }
    auto mask = [](const std::pair<int, int>& pr) { return (1u << pr.first) | (1u << pr.second); };
    Mat H = Mat::Zero(n, n);
    for (int k = 0; k < n; ++k) {
        const unsigned in = mask(basis.pairs[k]);
        for (int a = 0; a < kModes; ++a)
            for (int b = 0; b < kModes; ++b) {
                if (h(a, b) == 0.0) continue;
                unsigned occ = in;
                const int s = hop(occ, a, b);
                if (s == 0) continue;
                const int l = basis.index(std::countr_zero(occ), 31 - std::countl_zero(occ));
                H(l, k) += double(s) * h(a, b);
            }
        const int nr = basis.right_occupation(k);
        if (nr != 1) H(k, k) += p.U;  // both electrons on one dot
    }
    return H;
}

Eigen::MatrixXd valley_readout_spectrum(const ReadoutParams& p, const std::vector<double>& eps_grid) {
    const int n = int(two_electron_basis().pairs.size());
    Eigen::MatrixXd out(eps_grid.size(), n);
    for (size_t k = 0; k < eps_grid.size(); ++k)
        out.row(k) = Eigen::SelfAdjointEigenSolver<Mat>(build_two_electron_hamiltonian(p, eps_grid[k]))
                         .eigenvalues()
                         .transpose();
    return out;
}

std::vector<ReadoutClass> classify_readout_states(const ReadoutParams& p, const std::vector<double>& eps_grid) {
    if (eps_grid.size() < 2) throw ConfigError("classification needs at least two detunings");
    const auto& basis = two_electron_basis();
    const int n = int(basis.pairs.size());
    Eigen::VectorXd nr(n);
    for (int k = 0; k < n; ++k) nr(k) = basis.right_occupation(k);
    const int anc = TwoElectronBasis::mode(1, 0, 1);

    std::vector<Mat> vecs;
    for (double e : eps_grid)
        vecs.push_back(Eigen::SelfAdjointEigenSolver<Mat>(build_two_electron_hamiltonian(p, e)).eigenvectors());

    std::vector<ReadoutClass> out;
    for (int v = 0; v < 2; ++v)
        for (int s = 0; s < 2; ++s) {
            Vec cur = Vec::Zero(n);
            cur(basis.index(TwoElectronBasis::mode(0, v, s), anc)) = 1;
            for (const auto& V : vecs) {
                Eigen::Index best;
                (V.adjoint() * cur).cwiseAbs().maxCoeff(&best);
                cur = V.col(best);
            }
            ReadoutClass c;
            c.left_valley = v;
            c.left_spin = s;
            c.right_occupation = cur.cwiseAbs2().dot(nr);
            c.to_02 = c.right_occupation > 1.5;
            out.push_back(c);
        }
    return out;
}

}  // namespace qlink::shuttle
