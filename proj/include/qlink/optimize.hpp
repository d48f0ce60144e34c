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

#include <functional>
#include <limits>
#include <string>
#include <vector>

namespace qlink {

struct MinimizeOptions {
    int max_iterations = 500;
    double rel_step = 1e-4;     // central-difference step relative to |x_i|
    double min_step = 1e-7;     // absolute floor for the step
    double function_tolerance = 1e-6;
    double gradient_tolerance = 1e-10;
    double parameter_tolerance = 1e-10;
    double target = -std::numeric_limits<double>::infinity();  // stop once f <= target
};

struct MinimizeResult {
    std::vector<double> x;
    double f = 0;
    int iterations = 0;
    int evaluations = 0;
    bool converged = false;
    std::string message;
};

using Objective = std::function<double(const std::vector<double>&)>;

// Quasi-Newton (BFGS line search) with central finite-difference gradients.
MinimizeResult minimize_bfgs(const Objective& f, std::vector<double> x0, const MinimizeOptions& opt = {});

}  // namespace qlink
