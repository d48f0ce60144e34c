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

#pragma once

#include <Eigen/Dense>
#include <complex>
#include <functional>
#include <random>
#include <stdexcept>
#include <string>
#include <vector>

namespace qlink {

using cplx = std::complex<double>;
using Mat = Eigen::MatrixXcd;
using Vec = Eigen::VectorXcd;
using Ptm = Eigen::Matrix4d;

inline constexpr cplx I_{0.0, 1.0};

struct ConfigError : std::runtime_error {
    using std::runtime_error::runtime_error;
};
struct DimensionError : std::runtime_error {
    using std::runtime_error::runtime_error;
};
struct NumericalError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct Factor {
    std::string label;
    int dim;
};

class HilbertSpace {
public:
    HilbertSpace() = default;
    explicit HilbertSpace(std::vector<Factor> factors);

    static HilbertSpace qubits(int n, const std::string& prefix = "q");

    const std::vector<Factor>& factors() const { return factors_; }
    long dim() const;
    int index_of(const std::string& label) const;  // throws ConfigError
    std::vector<int> dims() const;
    HilbertSpace concat(const HilbertSpace& other) const;
    bool operator==(const HilbertSpace& o) const;

private:
    std::vector<Factor> factors_;
};

struct Operator {
    HilbertSpace space;
    Mat m;

    Operator() = default;
    Operator(HilbertSpace s, Mat mat);
};

struct Ket {
    HilbertSpace space;
    Vec v;

    Ket() = default;
    Ket(HilbertSpace s, Vec amps);  // requires unit norm (1e-12)
};

struct DensityMatrix {
    HilbertSpace space;
    Mat m;

    DensityMatrix() = default;
    DensityMatrix(HilbertSpace s, Mat mat);  // validates invariants
    static DensityMatrix from_ket(const Ket& k);
};

// Pauli matrices indexed 0..3 = I, X, Y, Z.
const Mat& pauli(int i);
Mat kron(const Mat& a, const Mat& b);
Mat kron(const std::vector<Mat>& ops);

Operator tensor(const std::vector<Operator>& ops);

// Reduced state on `keep` (indices into dims, output in ascending order).
Mat partial_trace(const Mat& rho, const std::vector<int>& dims, std::vector<int> keep);
DensityMatrix partial_trace(const DensityMatrix& rho, const std::vector<std::string>& keep);

double concurrence(const Mat& rho);
double fidelity_to_pure(const Mat& rho, const Vec& psi);

Ptm pauli_transfer_matrix(const std::function<Mat(const Mat&)>& channel);

struct Branch {
    double probability;
    Mat state;   // empty when flagged
    bool flagged;
};
std::vector<Branch> measure_projective(const Mat& rho, const std::vector<Mat>& projectors);

// (σ_α ⊗ I)|Φ+⟩ with |Φ+⟩ = (|00⟩+|11⟩)/√2.
Vec bell_state(int alpha);
// Columns are Φ+, Φ-, Ψ+, Ψ- (the basis used for reporting).
Mat bell_basis();

double hermiticity_error(const Mat& m);
double trace_error(const Mat& rho);
double min_eigenvalue(const Mat& rho);
Mat hermitize(const Mat& m);
Mat sqrtm_psd(const Mat& m);
Mat proj(const Vec& psi);

Mat random_unitary(int d, std::mt19937_64& rng);
Vec random_ket(int d, std::mt19937_64& rng);
Mat random_density(int d, std::mt19937_64& rng, int rank = -1);

// General single-qubit rotation Rz(φ)Ry(θ)Rz(λ) up to phase.
Mat u3(double theta, double phi, double lambda);

}  // namespace qlink
