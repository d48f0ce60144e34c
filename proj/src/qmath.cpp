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

#include "qlink/qmath.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <set>

namespace qlink {

HilbertSpace::HilbertSpace(std::vector<Factor> factors) : factors_(std::move(factors)) {
    std::set<std::string> seen;
    for (const auto& f : factors_) {
        if (f.dim <= 0) throw ConfigError("factor '" + f.label + "' has non-positive dimension");
        if (!seen.insert(f.label).second) throw ConfigError("duplicate factor label '" + f.label + "'");
    }
}

HilbertSpace HilbertSpace::qubits(int n, const std::string& prefix) {
    std::vector<Factor> f;
    for (int i = 0; i < n; ++i) f.push_back({prefix + std::to_string(i), 2});
    return HilbertSpace(std::move(f));
}

long HilbertSpace::dim() const {
    long d = 1;
    for (const auto& f : factors_) d *= f.dim;
    return d;
}

int HilbertSpace::index_of(const std::string& label) const {
    for (size_t i = 0; i < factors_.size(); ++i)
        if (factors_[i].label == label) return int(i);
    throw ConfigError("unknown factor label '" + label + "'");
}

std::vector<int> HilbertSpace::dims() const {
    std::vector<int> d;
    for (const auto& f : factors_) d.push_back(f.dim);
    return d;
}

HilbertSpace HilbertSpace::concat(const HilbertSpace& other) const {
    auto f = factors_;
    f.insert(f.end(), other.factors_.begin(), other.factors_.end());
    return HilbertSpace(std::move(f));
}

bool HilbertSpace::operator==(const HilbertSpace& o) const {
    if (factors_.size() != o.factors_.size()) return false;
    for (size_t i = 0; i < factors_.size(); ++i)
        if (factors_[i].label != o.factors_[i].label || factors_[i].dim != o.factors_[i].dim) return false;
    return true;
}

Operator::Operator(HilbertSpace s, Mat mat) : space(std::move(s)), m(std::move(mat)) {
    if (m.rows() != m.cols() || m.rows() != space.dim())
        throw DimensionError("operator matrix does not match space dimension");
}

Ket::Ket(HilbertSpace s, Vec amps) : space(std::move(s)), v(std::move(amps)) {
    if (v.size() != space.dim()) throw DimensionError("ket length does not match space dimension");
    if (std::abs(v.squaredNorm() - 1.0) > 1e-12) throw NumericalError("ket is not normalized");
}

DensityMatrix::DensityMatrix(HilbertSpace s, Mat mat) : space(std::move(s)), m(std::move(mat)) {
    if (m.rows() != m.cols() || m.rows() != space.dim())
        throw DimensionError("density matrix does not match space dimension");
    if (hermiticity_error(m) > 1e-10) throw NumericalError("density matrix is not Hermitian");
    if (trace_error(m) > 1e-9) throw NumericalError("density matrix trace differs from 1");
    // Spectrum check is skipped for the large circuit registers.
    if (m.rows() <= 512 && min_eigenvalue(m) < -1e-9)
        throw NumericalError("density matrix has a negative eigenvalue");
}

DensityMatrix DensityMatrix::from_ket(const Ket& k) { return DensityMatrix(k.space, proj(k.v)); }

const Mat& pauli(int i) {
    static const std::vector<Mat> p = [] {
        std::vector<Mat> v(4, Mat::Zero(2, 2));
        v[0] << 1, 0, 0, 1;
        v[1] << 0, 1, 1, 0;
        v[2] << 0, -I_, I_, 0;
        v[3] << 1, 0, 0, -1;
        return v;
    }();
    if (i < 0 || i > 3) throw std::out_of_range("pauli index");
    return p[i];
}

Mat kron(const Mat& a, const Mat& b) {
    Mat r(a.rows() * b.rows(), a.cols() * b.cols());
    for (Eigen::Index i = 0; i < a.rows(); ++i)
        for (Eigen::Index j = 0; j < a.cols(); ++j)
            r.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
    return r;
}

Mat kron(const std::vector<Mat>& ops) {
    if (ops.empty()) throw DimensionError("kron of empty list");
    Mat r = ops[0];
    for (size_t i = 1; i < ops.size(); ++i) r = kron(r, ops[i]);
    return r;
}

Operator tensor(const std::vector<Operator>& ops) {
    if (ops.empty()) throw DimensionError("tensor of empty list");
    HilbertSpace s = ops[0].space;
    Mat m = ops[0].m;
    for (size_t i = 1; i < ops.size(); ++i) {
        s = s.concat(ops[i].space);
        m = kron(m, ops[i].m);
    }
    return Operator(s, m);
}

Mat partial_trace(const Mat& rho, const std::vector<int>& dims, std::vector<int> keep) {
    std::sort(keep.begin(), keep.end());
    const int n = int(dims.size());
    long D = 1;
    for (int d : dims) D *= d;
    if (rho.rows() != D) throw DimensionError("partial_trace: dimension mismatch");
    std::vector<bool> kept(n, false);
    for (int k : keep) {
        if (k < 0 || k >= n) throw ConfigError("partial_trace: factor index out of range");
        kept[k] = true;
    }
    long dk = 1;
    for (int k : keep) dk *= dims[k];

    // strides of each factor in the full index
    std::vector<long> stride(n);
    long s = 1;
    for (int i = n - 1; i >= 0; --i) {
        stride[i] = s;
        s *= dims[i];
    }
    // enumerate kept-multi-index offsets and traced-multi-index offsets
    auto offsets = [&](bool want_kept) {
        std::vector<long> off{0};
        for (int i = 0; i < n; ++i) {
            if (kept[i] != want_kept) continue;
            std::vector<long> nxt;
            nxt.reserve(off.size() * dims[i]);
            for (long o : off)
                for (int a = 0; a < dims[i]; ++a) nxt.push_back(o + a * stride[i]);
            off.swap(nxt);
        }
        return off;
    };
    const auto ko = offsets(true);
    const auto to = offsets(false);
    Mat out = Mat::Zero(dk, dk);
    for (long b = 0; b < dk; ++b)
        for (long a = 0; a < dk; ++a) {
            cplx acc = 0;
            for (long t : to) acc += rho(ko[a] + t, ko[b] + t);
            out(a, b) = acc;
        }
    return out;
}

DensityMatrix partial_trace(const DensityMatrix& rho, const std::vector<std::string>& keep) {
    std::vector<int> idx;
    for (const auto& l : keep) idx.push_back(rho.space.index_of(l));
    std::sort(idx.begin(), idx.end());
    std::vector<Factor> f;
    for (int i : idx) f.push_back(rho.space.factors()[i]);
    Mat red = partial_trace(rho.m, rho.space.dims(), idx);
    return DensityMatrix(HilbertSpace(f), hermitize(red));
}

Mat sqrtm_psd(const Mat& m) {
    Eigen::SelfAdjointEigenSolver<Mat> es(hermitize(m));
    Eigen::VectorXd w = es.eigenvalues().cwiseMax(0.0).cwiseSqrt();
    return es.eigenvectors() * w.asDiagonal() * es.eigenvectors().adjoint();
}

double concurrence(const Mat& rho) {
    if (rho.rows() != 4 || rho.cols() != 4) throw DimensionError("concurrence needs a 2-qubit state");
    static const Mat yy = kron(pauli(2), pauli(2));
    // Round-off eigenvalues of rank-deficient states would otherwise enter as
    // O(sqrt(1e-16)) contributions, so they are zeroed along with negative ones.
    Eigen::SelfAdjointEigenSolver<Mat> ev(hermitize(rho));
    Eigen::Vector4d w = ev.eigenvalues();
    for (int i = 0; i < 4; ++i) w[i] = w[i] < 1e-14 ? 0.0 : std::sqrt(w[i]);
    Mat s = ev.eigenvectors() * w.asDiagonal() * ev.eigenvectors().adjoint();
    // R = sqrt(rho) Y rho* Y sqrt(rho) = M M^dagger with M = sqrt(rho) Y sqrt(rho)*, so the
    // square roots of R's eigenvalues are the singular values of M.
    Eigen::JacobiSVD<Mat> svd(s * yy * s.conjugate());
    Eigen::Vector4d l = svd.singularValues();
    std::sort(l.data(), l.data() + 4, std::greater<>());
    return std::max(0.0, l[0] - l[1] - l[2] - l[3]);
}

double fidelity_to_pure(const Mat& rho, const Vec& psi) {
    if (rho.rows() != psi.size()) throw DimensionError("fidelity_to_pure: dimension mismatch");
    return std::real(psi.dot(rho * psi));
}

Ptm pauli_transfer_matrix(const std::function<Mat(const Mat&)>& channel) {
    Ptm R;
    for (int j = 0; j < 4; ++j) {
        Mat out = channel(pauli(j));
        if (out.rows() != 2) throw DimensionError("pauli_transfer_matrix needs a qubit channel");
        for (int i = 0; i < 4; ++i) R(i, j) = 0.5 * std::real((pauli(i) * out).trace());
    }
    return R;
}

std::vector<Branch> measure_projective(const Mat& rho, const std::vector<Mat>& projectors) {
    const long d = rho.rows();
    Mat sum = Mat::Zero(d, d);
    for (const auto& P : projectors) {
        if (P.rows() != d) throw DimensionError("projector dimension mismatch");
        if (hermiticity_error(P) > 1e-9 || (P * P - P).cwiseAbs().maxCoeff() > 1e-9)
            throw ConfigError("operator is not a projector");
        sum += P;
    }
    if ((sum - Mat::Identity(d, d)).cwiseAbs().maxCoeff() > 1e-9)
        throw ConfigError("projectors do not sum to identity");
    std::vector<Branch> out;
    for (const auto& P : projectors) {
        Mat s = P * rho * P;
        double p = std::real(s.trace());
        if (p <= 1e-14)
            out.push_back({std::max(p, 0.0), Mat(), true});
        else
            out.push_back({p, s / p, false});
    }
    return out;
}

Vec bell_state(int alpha) {
    if (alpha < 0 || alpha > 3) throw std::out_of_range("bell_state index must be 0..3");
    Vec phi = Vec::Zero(4);
    phi(0) = phi(3) = 1.0 / std::sqrt(2.0);
    return kron(pauli(alpha), pauli(0)) * phi;
}

Mat bell_basis() {
    const double r = 1.0 / std::sqrt(2.0);
    Mat b = Mat::Zero(4, 4);
    b(0, 0) = r, b(3, 0) = r;    // Φ+
    b(0, 1) = r, b(3, 1) = -r;   // Φ-
    b(1, 2) = r, b(2, 2) = r;    // Ψ+
    b(1, 3) = r, b(2, 3) = -r;   // Ψ-
    return b;
}

double hermiticity_error(const Mat& m) { return (m - m.adjoint()).cwiseAbs().maxCoeff(); }
double trace_error(const Mat& rho) { return std::abs(rho.trace() - 1.0); }

double min_eigenvalue(const Mat& rho) {
    Eigen::SelfAdjointEigenSolver<Mat> es(hermitize(rho), Eigen::EigenvaluesOnly);
    return es.eigenvalues().minCoeff();
}

Mat hermitize(const Mat& m) { return 0.5 * (m + m.adjoint()); }
Mat proj(const Vec& psi) { return psi * psi.adjoint(); }

Mat random_unitary(int d, std::mt19937_64& rng) {
    std::normal_distribution<double> n(0.0, 1.0);
    Mat g(d, d);
    for (int i = 0; i < d; ++i)
        for (int j = 0; j < d; ++j) g(i, j) = cplx(n(rng), n(rng));
    Eigen::HouseholderQR<Mat> qr(g);
    Mat q = qr.householderQ();
    Mat r = qr.matrixQR();
    for (int j = 0; j < d; ++j) {
        cplx ph = r(j, j) / std::abs(r(j, j));
        q.col(j) *= ph;
    }
    return q;
}

Vec random_ket(int d, std::mt19937_64& rng) {
    std::normal_distribution<double> n(0.0, 1.0);
    Vec v(d);
    for (int i = 0; i < d; ++i) v(i) = cplx(n(rng), n(rng));
    return v.normalized();
}

Mat random_density(int d, std::mt19937_64& rng, int rank) {
    if (rank <= 0) rank = d;
    std::normal_distribution<double> n(0.0, 1.0);
    Mat g(d, rank);
    for (int i = 0; i < d; ++i)
        for (int j = 0; j < rank; ++j) g(i, j) = cplx(n(rng), n(rng));
    Mat r = g * g.adjoint();
    return r / r.trace();
}

Mat u3(double theta, double phi, double lambda) {
    Mat u(2, 2);
    u << std::cos(theta / 2), -std::exp(I_ * lambda) * std::sin(theta / 2),
        std::exp(I_ * phi) * std::sin(theta / 2), std::exp(I_ * (phi + lambda)) * std::cos(theta / 2);
    return u;
}

}  // namespace qlink
