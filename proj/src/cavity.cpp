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

#include "qlink/cavity.hpp"

#include <cmath>
#include <sstream>

namespace qlink::cavity {

using lindblad::LindbladTerm;

namespace {

Mat eye(int d) { return Mat::Identity(d, d); }

Mat lowering(int nf) {
    Mat a = Mat::Zero(nf, nf);
    for (int n = 1; n < nf; ++n) a(n - 1, n) = std::sqrt(double(n));
    return a;
}

bool close(double a, double b) { return std::abs(a - b) <= 1e-9 * std::max(1.0, std::abs(b)); }

void check_resonance(const DqdParams& p, const CavityParams& c, int which) {
    if (!close(p.B, c.omega_r) || !close(2 * p.tc, p.B)) {
        std::ostringstream os;
        os << "DQD " << which << " violates the resonance constraints B = omega_r, 2 t_c = B (B=" << p.B
           << ", t_c=" << p.tc << ", omega_r=" << c.omega_r << ")";
        throw ConfigError(os.str());
    }
}

}  // namespace

OptimizableParameters OptimizableParameters::baseline() {
    OptimizableParameters p;
    Vec s(4);
    s << 1, 0, -1, 0;  // (|L> - |R>)/sqrt(2) (x) |up>
    p.init1 = p.init2 = s / std::sqrt(2.0);
    return p;
}

DqdParams OptimizableParameters::dqd(int which) const {
    DqdParams d;
    d.B = B;
    d.tc = B / 2;
    d.bx = which == 1 ? bx1 : bx2;
    d.gc = which == 1 ? gc1 : gc2;
    d.eps = which == 1 ? eps1 : eps2;
    return d;
}

Mat build_dqd_hamiltonian(const DqdParams& p) {
    const Mat& I = pauli(0);
    const Mat& X = pauli(1);
    const Mat& Y = pauli(2);
    const Mat& Z = pauli(3);
    const Mat bs = p.bx * X + p.by * Y + p.bz * Z;
    return p.eps / 2 * kron(Z, I) + p.tc * kron(X, I) + p.B / 2 * kron(I, Z) + 0.5 * kron(Z, bs);
}

Mat build_system_hamiltonian(const DqdParams& p1, const DqdParams& p2, const CavityParams& c) {
    if (c.fock_cutoff < 2) throw ConfigError("fock_cutoff must be at least 2");
    check_resonance(p1, c, 1);
    check_resonance(p2, c, 2);
    const int nf = c.fock_cutoff;
    const Mat a = lowering(nf);
    const Mat x = a + a.adjoint();
    const Mat tz = kron(pauli(3), pauli(0));
    Mat H = c.omega_r * kron(eye(16), Mat(a.adjoint() * a));
    H += kron({build_dqd_hamiltonian(p1), eye(4), eye(nf)});
    H += kron({eye(4), build_dqd_hamiltonian(p2), eye(nf)});
    H += p1.gc * kron({tz, eye(4), x});
    H += p2.gc * kron({eye(4), tz, x});
    return H;
}

std::vector<LindbladTerm> dissipators(const CavityParams& c) {
    const int nf = c.fock_cutoff;
    const Mat& I = pauli(0);
    const Mat& Z = pauli(3);
    std::vector<LindbladTerm> t;
    if (c.kappa > 0) t.push_back({c.kappa, kron(eye(16), lowering(nf))});
    if (c.T2_spin > 0) {
        t.push_back({1 / (2 * c.T2_spin), kron({I, Z, eye(4), eye(nf)})});
        t.push_back({1 / (2 * c.T2_spin), kron({eye(4), I, Z, eye(nf)})});
    }
    if (c.T2_charge > 0) {
        t.push_back({1 / (2 * c.T2_charge), kron({Z, I, eye(4), eye(nf)})});
        t.push_back({1 / (2 * c.T2_charge), kron({eye(4), Z, I, eye(nf)})});
    }
    return t;
}

Mat initial_state(const OptimizableParameters& p, int nf) {
    if (p.init1.size() != 4 || p.init2.size() != 4) throw ConfigError("initial DQD states need 4 amplitudes");
    Vec f = Vec::Zero(nf);
    f(0) = 1;
    Vec psi = kron({Mat(p.init1.normalized()), Mat(p.init2.normalized()), Mat(f)});
    return proj(psi);
}

Vec psi_minus() {
    Vec v = Vec::Zero(4);
    v(1) = 1 / std::sqrt(2.0);
    v(2) = -1 / std::sqrt(2.0);
    return v;
}

RawBellResult analyze_state(const Mat& rho, int nf) {
    if (rho.rows() != 16 * nf) throw DimensionError("analyze_state: state dimension mismatch");
    auto idx = [nf](int c1, int s1, int c2, int s2, int f) { return (((c1 * 2 + s1) * 2 + c2) * 2 + s2) * nf + f; };
    RawBellResult r;
    Mat acc = Mat::Zero(4, 4);
    double vac = 0, cw = 0, cu = 0;
    for (int c1 = 0; c1 < 2; ++c1)
        for (int c2 = 0; c2 < 2; ++c2) {
            Mat sp = Mat::Zero(4, 4);
            double v = 0;
            for (int a = 0; a < 4; ++a)
                for (int b = 0; b < 4; ++b)
                    for (int f = 0; f < nf; ++f) {
                        const cplx e = rho(idx(c1, a / 2, c2, a % 2, f), idx(c1, b / 2, c2, b % 2, f));
                        sp(a, b) += e;
                        if (f == 0 && a == b) v += e.real();
                    }
            const double p = sp.trace().real();
            r.charge_probabilities[{c1, c2}] = p;
            if (c1 != c2) {
                acc += sp;
                vac += v;
                if (p > 1e-14) {
                    const double c = concurrence(hermitize(sp / p));
                    cw += p * c;
                    cu += 0.5 * c;
                }
            }
        }
    const double pacc = acc.trace().real();
    if (pacc <= 1e-14) throw NumericalError("odd-parity acceptance probability is zero");
    r.success_probability = pacc;
    r.spin_state = hermitize(acc / pacc);
    r.fidelity = fidelity_to_pure(r.spin_state, psi_minus());
    r.concurrence = concurrence(r.spin_state);
    r.weighted_concurrence = cw / pacc;
    r.uniform_concurrence = cu;
    r.vacuum_probability = vac / pacc;
    return r;
}

RawBellResult generate_raw_pair(const OptimizableParameters& p, const CavityParams& c, double sigma, int npoints,
                                const lindblad::EvolveOptions& opt) {
    if (!close(p.B, c.omega_r)) throw ConfigError("resonant mode requires B = omega_r");
    const Mat H = build_system_hamiltonian(p.dqd(1), p.dqd(2), c) * 1e-3;
    const auto terms = dissipators(c);
    std::vector<double> times, w;
    if (sigma > 0 && npoints > 1) {
        for (int k = 0; k < npoints; ++k) {
            const double x = -3.0 + 6.0 * k / (npoints - 1);
            times.push_back(p.t + sigma * x);
            w.push_back(std::exp(-0.5 * x * x));
        }
    } else {
        times.push_back(p.t);
        w.push_back(1.0);
    }
    if (times.front() < 0) throw ConfigError("stopping-time window extends below t = 0");
    double wsum = 0;
    for (double x : w) wsum += x;
    const auto traj = lindblad::evolve(initial_state(p, c.fock_cutoff), H, terms, times, opt);
    Mat avg = Mat::Zero(H.rows(), H.cols());
    for (size_t k = 0; k < traj.size(); ++k) avg += (w[k] / wsum) * traj[k];
    RawBellResult r = analyze_state(avg, c.fock_cutoff);
    r.attempt_time = p.t;
    return r;
}

double concurrence_cost(const OptimizableParameters& p, const CavityParams& c, CostWeighting w) {
    const auto r = generate_raw_pair(p, c, 0.0, 1);
    return -(w == CostWeighting::Probability ? r.weighted_concurrence : r.uniform_concurrence);
}

OptimizeReport optimize_parameters(const OptimizableParameters& init, const CavityParams& c, int max_iterations,
                                   bool include_time) {
    auto unpack = [&](const std::vector<double>& x) {
        OptimizableParameters p = init;
        p.bx1 = x[0], p.bx2 = x[1], p.gc1 = x[2], p.gc2 = x[3], p.eps1 = x[4], p.eps2 = x[5];
        if (include_time) p.t = x[6];
        return p;
    };
    std::vector<double> x0{init.bx1, init.bx2, init.gc1, init.gc2, init.eps1, init.eps2};
    // Vanishing charge-photon coupling is a flat stationary point of the cost
    // (no entanglement at all), so such couplings start from a small value.
    for (int k : {2, 3})
        if (x0[k] == 0) x0[k] = 0.01 * init.B;
    if (include_time) x0.push_back(init.t);
    lindblad::EvolveOptions eo;
    eo.abs_tol = 1e-10;
    eo.rel_tol = 1e-8;
    Objective f = [&](const std::vector<double>& x) {
        if (include_time && x[6] <= 0) return 1.0;
        const auto r = generate_raw_pair(unpack(x), c, 0.0, 1, eo);
        return -r.weighted_concurrence;
    };
    MinimizeOptions mo;
    mo.max_iterations = max_iterations;
    mo.rel_step = 1e-4;
    mo.min_step = 1e-2;
    mo.function_tolerance = 1e-6;
    OptimizeReport rep;
    rep.initial_cost = concurrence_cost(init, c);
    const auto res = minimize_bfgs(f, x0, mo);
    rep.params = unpack(res.x);
    rep.cost = res.f;
    rep.iterations = res.iterations;
    rep.converged = res.converged;
    rep.message = res.message;
    return rep;
}

OptimizableParameters rescale_parameters(const OptimizableParameters& p, double lambda) {
    if (!(lambda > 0)) throw ConfigError("rescale factor must be positive");
    OptimizableParameters q = p;
    q.B *= lambda;
    q.bx1 *= lambda, q.bx2 *= lambda;
    q.gc1 *= lambda, q.gc2 *= lambda;
    q.eps1 *= lambda, q.eps2 *= lambda;
    q.t /= lambda;
    return q;
}

CavityParams rescale_cavity(const CavityParams& c, double lambda) {
    if (!(lambda > 0)) throw ConfigError("rescale factor must be positive");
    CavityParams d = c;
    d.omega_r *= lambda;
    d.kappa *= lambda;
    if (d.T2_spin > 0) d.T2_spin /= lambda;
    if (d.T2_charge > 0) d.T2_charge /= lambda;
    return d;
}

}  // namespace qlink::cavity
