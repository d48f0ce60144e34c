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

// In-place gate kernels on n-qubit density matrices. Qubit 0 is the most
// significant bit of the basis index, matching kron ordering.
#pragma once

#include <vector>

#include "qlink/qmath.hpp"

namespace qlink::qubits {

// rho <- U rho U^dagger, U acting on `qs` (qs[0] is U's most significant qubit).
void apply_gate(Mat& rho, const Mat& U, const std::vector<int>& qs, int n);
// rho <- (1-p) rho + p Tr_qs(rho) (x) I/2^k
void depolarize(Mat& rho, const std::vector<int>& qs, double p, int n);
// rho <- P rho P^T for an involutive basis permutation.
void apply_involution(Mat& rho, const std::vector<long>& perm);

Mat cnot();
Mat hadamard();
Mat s_gate();
Mat swap_gate();
// Full 2^n matrix of a gate on `qs`, for small registers and tests.
Mat embed(const Mat& U, const std::vector<int>& qs, int n);

}  // namespace qlink::qubits
