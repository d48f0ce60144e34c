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

#include <numbers>

#include "qlink/experiment.hpp"
#include "qlink/optimize.hpp"
#include "qlink/rng.hpp"

namespace qlink::exp {

namespace {

void check_pair(const Mat& rho) {
    if (rho.rows() != 4 || rho.cols() != 4) throw DimensionError("Bell comparison needs 4x4 states");
}

Mat local_rotation(const std::vector<double>& x) { return kron(u3(x[0], x[1], x[2]), u3(x[3], x[4], x[5])); }

}  // namespace

BellView bell_view(const Mat& rho) {
    check_pair(rho);
    const Mat& b = bell_basis();
    const Mat m = b.adjoint() * rho * b;
    BellView v;
    v.magnitudes = m.cwiseAbs();
    v.best_fidelity = m.diagonal().real().maxCoeff();
    v.state = rho;
    return v;
}

BellView bell_view_local(const Mat& rho, int restarts, std::uint64_t seed) {
    check_pair(rho);
    const Mat& b = bell_basis();
    auto rotated = [&](const std::vector<double>& x) {
        const Mat u = local_rotation(x);
        return Mat(u * rho * u.adjoint());
    };
    MinimizeOptions opt;
    opt.max_iterations = 200;
    opt.rel_step = 1e-6;
    opt.min_step = 1e-6;
    opt.function_tolerance = 1e-12;

    std::vector<double> best_x(6, 0.0);
    double best = bell_view(rho).best_fidelity;
    for (int r = 0; r <= restarts; ++r) {
        std::vector<double> x0(6, 0.0);
        if (r > 0) {
            auto rng = make_stream(seed, "compare", std::uint64_t(r));
            std::uniform_real_distribution<double> ang(0, 2 * std::numbers::pi);
            for (auto& a : x0) a = ang(rng);
        }
        // Aim at whichever Bell state the start is closest to; the target is
        // fixed during the descent so the objective stays smooth.
        const Mat start = b.adjoint() * rotated(x0) * b;
        int k;
        start.diagonal().real().maxCoeff(&k);
        auto cost = [&](const std::vector<double>& x) {
            return -(b.col(k).adjoint() * rotated(x) * b.col(k))(0, 0).real();
        };
        const auto res = minimize_bfgs(cost, x0, opt);
        if (-res.f > best) {
            best = -res.f;
            best_x = res.x;
        }
    }
    BellView v = bell_view(hermitize(rotated(best_x)));
    return v;
}

BellComparison compare_bell_basis(const Mat& cavity_raw, const Mat& cavity_purified, const Mat& shuttle_raw,
                                  const Mat& shuttle_purified, int restarts, std::uint64_t seed) {
    return {bell_view(cavity_raw), bell_view(cavity_purified), bell_view_local(shuttle_raw, restarts, seed),
            bell_view_local(shuttle_purified, restarts, seed)};
}

}  // namespace qlink::exp
