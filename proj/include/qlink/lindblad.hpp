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

#include <Eigen/Sparse>
#include <functional>
#include <vector>

#include "qlink/qmath.hpp"

namespace qlink::lindblad {

// D[A]rho = rate * (A rho A^dag - 1/2 {A^dag A, rho})
struct LindbladTerm {
    double rate;
    Mat op;
};

struct SuperOperator {
    long d = 0;  // system dimension; matrix is d^2 x d^2
    Mat m;
};

// Row stacking: element (i,j) goes to index i*d + j.
Vec vectorize(const Mat& rho);
Mat devectorize(const Vec& v);

// Row-stacking rules: A rho B -> (A kron B^T) vec(rho).
SuperOperator build_liouvillian(const Mat& H, const std::vector<LindbladTerm>& terms);
Eigen::SparseMatrix<cplx> build_liouvillian_sparse(const Mat& H, const std::vector<LindbladTerm>& terms);
SuperOperator propagate_step(const SuperOperator& L, double dt);

enum class Backend { Direct, Propagator };

struct EvolveOptions {
    Backend backend = Backend::Direct;
    double abs_tol = 1e-11;
    double rel_tol = 1e-9;
    double initial_dt = 1e-4;
    double propagator_dt = 15.0 / 600.0;
    double trace_tol = 1e-6;
};

// Time-independent H. Returned states correspond to t_grid entries.
std::vector<Mat> evolve(const Mat& rho0, const Mat& H, const std::vector<LindbladTerm>& terms,
                        const std::vector<double>& t_grid, const EvolveOptions& opt = {});

// Time-ordered exp(-i int H(t) dt / hbar) with H frozen at each sub-step midpoint.
Mat piecewise_unitary(const std::function<Mat(double)>& H, double t0, double t1, int nsub, double hbar = 1.0);

}  // namespace qlink::lindblad
