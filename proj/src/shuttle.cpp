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

#include "qlink/shuttle.hpp"

#include <cmath>
#include <unsupported/Eigen/MatrixFunctions>

#include "qlink/lindblad.hpp"
#include "qlink/qubits.hpp"
#include "qlink/rng.hpp"

namespace qlink::shuttle {

namespace {

Mat eye(long d) { return Mat::Identity(d, d); }

Mat orbit_proj(int k) {
    Mat p = Mat::Zero(2, 2);
    p(k, k) = 1;
    return p;
}

// Dimension of the factor after valley (x) shuttled spin.
long rest_dim(const Mat& local) {
    if (local.rows() % 4 != 0 || local.rows() != local.cols())
        throw DimensionError("chain state must be valley x spin x rest");
    return local.rows() / 4;
}

}  // namespace

void SweepParams::validate() const {
    if (!(alpha > 0)) throw ConfigError("sweep rate alpha must be positive");
    if (!(eps0 > 0)) throw ConfigError("sweep amplitude eps0 must be positive");
    if (nsteps < 1) throw ConfigError("sweep needs at least one step");
}

SpinFields ChainConfig::step_fields() const {
    SpinFields f;
    f.B = B;
    f.bx = bx_total / (n_dots - 1);
    f.bz = bz_total / (n_dots - 1);
    return f;
}

void ChainConfig::validate() const {
    if (n_dots < 2) throw ConfigError("a chain needs at least two dots");
    if (!(mean_magnitude > 0)) throw ConfigError("mean valley coupling must be positive");
    if (sd_magnitude < 0 || sd_phase < 0) throw ConfigError("standard deviations must be non-negative");
}

Tunneling valley_tunneling(double tc, double dphi) {
    const cplx e = std::exp(cplx(0, -dphi));
    return {tc / 2 * (1.0 + e), tc / 2 * (1.0 - e)};
}

Mat valley_basis(double phase) {
    const cplx e = std::exp(cplx(0, phase));
    Mat w(2, 2);
    w << 1, 1, -e, e;
    return w / std::sqrt(2.0);
}

Mat build_shuttle_hamiltonian(const SiteParams& left, const SiteParams& right, const SweepParams& sweep,
                              const SpinFields& f, double eps) {
    const Mat& I = pauli(0);
    const Mat& X = pauli(1);
    const Mat& Y = pauli(2);
    const Mat& Z = pauli(3);
    Mat vp = Mat::Zero(2, 2);
    vp(0, 1) = 1;
    Mat H = eps / 2 * kron({Z, I, I}) + sweep.tc * kron({X, I, I}) + f.B / 2 * kron({I, I, Z});
    H += 0.5 * kron({Z, I, Mat(f.bx * X + f.bz * Z)});
    H += sweep.esoi * kron({Y, I, Mat(X - Y)});
    const SiteParams* site[2] = {&left, &right};
    for (int d = 0; d < 2; ++d) {
        const cplx delta = site[d]->magnitude * std::exp(cplx(0, -site[d]->phase));
        const Mat t = delta * kron({orbit_proj(d), vp, I});
        H += t + t.adjoint();
    }
    return H;
}

Mat with_stationary_spin(const Mat& h8) { return kron(h8, eye(2)); }

Mat sweep_unitary(const SiteParams& left, const SiteParams& right, const SweepParams& sweep, const SpinFields& f,
                  const NoiseTrace& noise) {
    sweep.validate();
    const Mat h0 = build_shuttle_hamiltonian(left, right, sweep, f, 0.0);
    const Mat zc = 0.5 * kron({pauli(3), eye(2), eye(2)});
    auto H = [&](double t) {
        double eps = sweep.alpha * t - sweep.eps0;
        if (noise) eps += noise(t);
        return Mat(h0 + eps * zc);
    };
    Mat u = lindblad::piecewise_unitary(H, 0.0, sweep.duration(), sweep.nsteps, kHbar);
    if (sweep.dressed_endpoints)
        u = orbital_dressing(H(sweep.duration())).adjoint() * u * orbital_dressing(H(0.0));
    if (!u.allFinite()) throw NumericalError("sweep propagator is not finite");
    return u;
}

Mat orbital_dressing(const Mat& h8) {
    if (h8.rows() != 8 || h8.cols() != 8) throw DimensionError("orbital_dressing needs an 8x8 Hamiltonian");
    Eigen::SelfAdjointEigenSolver<Mat> es(h8);
    Mat p = Mat::Zero(8, 8), p0 = Mat::Zero(8, 8);
    p0.topLeftCorner(4, 4).setIdentity();
    int nl = 0;
    for (int k = 0; k < 8; ++k) {
        const Vec v = es.eigenvectors().col(k);
        if (v.head(4).squaredNorm() > 0.5) p += v * v.adjoint(), ++nl;
    }
    if (nl != 4) throw NumericalError("orbital sectors are not separated at the sweep endpoint");
    const Mat reflect = (2 * p - eye(8)) * (2 * p0 - eye(8));
    return reflect.sqrt();
}

Mat embed_left(const Mat& local, const SiteParams& site) {
    const long m = rest_dim(local);
    const Mat w = kron({valley_basis(site.phase), eye(2 * m)});
    return kron(orbit_proj(0), Mat(w * local * w.adjoint()));
}

Mat apply_sweep(const Mat& embedded, const Mat& u8) {
    if (embedded.rows() % 8 != 0) throw DimensionError("swept state must be orbit x valley x spin x rest");
    const Mat u = kron(u8, eye(embedded.rows() / 8));
    return u * embedded * u.adjoint();
}

Mat sweep_step(const Mat& embedded, const SiteParams& left, const SiteParams& right, const SweepParams& sweep,
               const SpinFields& f, const NoiseTrace& noise) {
    return apply_sweep(embedded, sweep_unitary(left, right, sweep, f, noise));
}

Mat relax_and_reinit(const Mat& swept, const SiteParams& next) {
    if (swept.rows() % 8 != 0) throw DimensionError("swept state must be orbit x valley x spin x rest");
    const long h = swept.rows() / 2;
    const Mat r = swept.topLeftCorner(h, h) + swept.bottomRightCorner(h, h);
    const Mat w = kron({valley_basis(next.phase), eye(h / 2)});
    return w.adjoint() * r * w;
}

Projection valley_project(const Mat& local) {
    const long h = 2 * rest_dim(local);
    Projection p;
    p.probability = local.topLeftCorner(h, h).trace().real();
    p.state = Mat::Zero(local.rows(), local.cols());
    if (p.probability <= 1e-14) {
        p.flagged = true;
        return p;
    }
    p.state.topLeftCorner(h, h) = local.topLeftCorner(h, h) / p.probability;
    return p;
}

Mat spin_state(const Mat& local) {
    const long h = 2 * rest_dim(local);
    return local.topLeftCorner(h, h) + local.bottomRightCorner(h, h);
}

std::vector<SiteParams> sample_sites(const ChainConfig& cfg) {
    cfg.validate();
    auto mag_rng = make_stream(cfg.seed, "valley-magnitude");
    auto phase_rng = make_stream(cfg.seed, "valley-phase");
    std::normal_distribution<double> mag(cfg.mean_magnitude, cfg.sd_magnitude);
    std::normal_distribution<double> ph(0.0, cfg.sd_phase);
    std::vector<SiteParams> s(cfg.n_dots);
    for (int d = 0; d < cfg.n_dots; ++d) {
        double m;
        do m = cfg.sd_magnitude > 0 ? mag(mag_rng) : cfg.mean_magnitude;
        while (m <= 0);
        s[d].magnitude = m;
        if (cfg.sd_phase == 0)
            s[d].phase = 0;
        else if (cfg.phase_mode == PhaseMode::PerSite)
            s[d].phase = ph(phase_rng);
        else
            s[d].phase = d == 0 ? 0.0 : s[d - 1].phase + ph(phase_rng);
    }
    return s;
}

ChainResult shuttle_chain(const ChainConfig& cfg, const SweepParams& sweep, const std::vector<NoiseTrace>& noise) {
    return shuttle_chain(cfg, sample_sites(cfg), sweep, noise);
}

ChainResult shuttle_chain(const ChainConfig& cfg, const std::vector<SiteParams>& sites, const SweepParams& sweep,
                          const std::vector<NoiseTrace>& noise) {
    cfg.validate();
    if (int(sites.size()) != cfg.n_dots) throw ConfigError("site list length must equal n_dots");
    if (!noise.empty() && int(noise.size()) != cfg.n_dots - 1)
        throw ConfigError("need one noise trace per sweep");
    const SpinFields f = cfg.step_fields();

    Vec g = Vec::Zero(2);
    g(0) = 1;
    const Mat ground = proj(g);
    Mat pair = kron(ground, proj(bell_state(1)));
    // Unnormalized single-spin images of I, X, Y, Z for the transfer matrix.
    std::vector<Mat> paulis;
    for (int k = 0; k < 4; ++k) paulis.push_back(kron(ground, pauli(k)));

    ChainResult res;
    res.sites = sites;
    res.concurrence_trace.push_back(concurrence(spin_state(pair)));
    res.valley_probabilities.push_back(1.0);
    for (int d = 0; d + 1 < cfg.n_dots; ++d) {
        const Mat u = sweep_unitary(sites[d], sites[d + 1], sweep, f, noise.empty() ? NoiseTrace{} : noise[d]);
        auto step = [&](const Mat& s) { return relax_and_reinit(apply_sweep(embed_left(s, sites[d]), u), sites[d + 1]); };
        pair = step(pair);
        for (auto& p : paulis) {
            p = step(p);
            if (cfg.project_valley) {
                const long h = p.rows() / 2;
                const Mat keep = p.topLeftCorner(h, h);
                p.setZero();
                p.topLeftCorner(h, h) = keep;
            }
        }
        if (cfg.project_valley) {
            auto pr = valley_project(pair);
            if (pr.flagged) throw NumericalError("ground-valley post-selection has zero probability");
            pair = pr.state;
            res.valley_probabilities.push_back(pr.probability);
            res.success_probability *= pr.probability;
        } else {
            res.valley_probabilities.push_back(1.0);
        }
        res.concurrence_trace.push_back(concurrence(hermitize(spin_state(pair))));
    }
    res.final_state = hermitize(spin_state(pair));
    std::vector<Mat> out;
    for (const auto& p : paulis) out.push_back(spin_state(p));
    const double norm = out[0].trace().real() / 2;
    if (norm <= 1e-14) throw NumericalError("chain channel has zero throughput");
    for (int i = 0; i < 4; ++i)
        for (int j = 0; j < 4; ++j) res.ptm(i, j) = 0.5 * (pauli(i) * out[j]).trace().real() / norm;
    return res;
}

PurifiedPair purify_shuttled_pair(const Mat& rho) {
    if (rho.rows() != 4 || rho.cols() != 4) throw DimensionError("purify_shuttled_pair needs a two-qubit state");
    Mat r = kron(rho, rho);
    qubits::apply_gate(r, qubits::cnot(), {0, 2}, 4);
    qubits::apply_gate(r, qubits::cnot(), {1, 3}, 4);
    Mat out(4, 4);
    for (int i = 0; i < 4; ++i)
        for (int j = 0; j < 4; ++j) out(i, j) = r(i * 4 + 3, j * 4 + 3);
    PurifiedPair p;
    p.success_prob = out.trace().real();
    if (p.success_prob <= 1e-15) throw NumericalError("outcome 11 has zero probability");
    p.state = hermitize(out / p.success_prob);
    return p;
}

Mat purifiable_state(double eps, double phi) {
    if (eps < 0 || eps > 0.5) throw ConfigError("eps must lie in [0, 1/2]");
    Mat r = Mat::Zero(4, 4);
    const double a = 0.5 - eps;
    r(1, 1) = a;
    r(2, 2) = 0.5;
    r(1, 2) = std::exp(cplx(0, phi)) * std::sqrt(0.5 * a);
    r(2, 1) = std::conj(r(1, 2));
    r(3, 3) = eps;
    return r;
}

}  // namespace qlink::shuttle
