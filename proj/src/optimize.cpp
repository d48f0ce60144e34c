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

#include "qlink/optimize.hpp"

#include <ceres/ceres.h>

#include <cmath>
#include <limits>

namespace qlink {
namespace {

class FdFunction : public ceres::FirstOrderFunction {
public:
    FdFunction(const Objective& f, const MinimizeOptions& o, int n, MinimizeResult& best)
        : f_(f), o_(o), n_(n), best_(best) {}

    bool Evaluate(const double* p, double* cost, double* grad) const override {
        std::vector<double> x(p, p + n_);
        *cost = call(x);
        if (!std::isfinite(*cost)) return false;
        if (grad) {
            for (int i = 0; i < n_; ++i) {
                const double h = std::max(o_.rel_step * std::abs(x[i]), o_.min_step);
                auto xp = x, xm = x;
                xp[i] += h;
                xm[i] -= h;
                grad[i] = (call(xp) - call(xm)) / (2 * h);
            }
        }
        return true;
    }
    int NumParameters() const override { return n_; }

private:
    double call(const std::vector<double>& x) const {
        const double v = f_(x);
        ++best_.evaluations;
        if (std::isfinite(v) && v < best_.f) {
            best_.f = v;
            best_.x = x;
        }
        return v;
    }
    const Objective& f_;
    const MinimizeOptions& o_;
    int n_;
    MinimizeResult& best_;
};

class TargetReached : public ceres::IterationCallback {
public:
    explicit TargetReached(double target) : target_(target) {}
    ceres::CallbackReturnType operator()(const ceres::IterationSummary& s) override {
        return s.cost <= target_ ? ceres::SOLVER_TERMINATE_SUCCESSFULLY : ceres::SOLVER_CONTINUE;
    }

private:
    double target_;
};

}  // namespace

MinimizeResult minimize_bfgs(const Objective& f, std::vector<double> x0, const MinimizeOptions& opt) {
    MinimizeResult best;
    best.f = std::numeric_limits<double>::infinity();
    best.x = x0;
    const int n = int(x0.size());
    ceres::GradientProblem problem(new FdFunction(f, opt, n, best));
    ceres::GradientProblemSolver::Options o;
    o.line_search_direction_type = ceres::BFGS;
    o.max_num_iterations = opt.max_iterations;
    o.function_tolerance = opt.function_tolerance;
    o.gradient_tolerance = opt.gradient_tolerance;
    o.parameter_tolerance = opt.parameter_tolerance;
    o.logging_type = ceres::SILENT;
    TargetReached stop(opt.target);
    if (std::isfinite(opt.target)) o.callbacks.push_back(&stop);
    ceres::GradientProblemSolver::Summary s;
    ceres::Solve(o, problem, x0.data(), &s);
    best.iterations = int(s.iterations.size()) - 1;
    best.converged = s.termination_type == ceres::CONVERGENCE || s.termination_type == ceres::USER_SUCCESS;
    best.message = s.message;
    if (s.final_cost <= best.f) {
        best.f = s.final_cost;
        best.x = x0;
    }
    return best;
}

}  // namespace qlink
