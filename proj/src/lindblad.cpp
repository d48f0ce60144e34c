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

#include "qlink/lindblad.hpp"

#include <Eigen/Sparse>
#include <boost/numeric/odeint.hpp>
#include <cmath>
#include <sstream>
#include <unsupported/Eigen/KroneckerProduct>
#include <unsupported/Eigen/MatrixFunctions>

namespace qlink::lindblad {

using SpMat = Eigen::SparseMatrix<cplx>;

Vec vectorize(const Mat& rho) {
    const long d = rho.rows();
    Vec v(d * d);
    for (long i = 0; i < d; ++i)
        for (long j = 0; j < d; ++j) v(i * d + j) = rho(i, j);
    return v;
}

Mat devectorize(const Vec& v) {
    const long d = std::lround(std::sqrt(double(v.size())));
    if (d * d != v.size()) throw DimensionError("devectorize: length is not a square");
    Mat m(d, d);
    for (long i = 0; i < d; ++i)
        for (long j = 0; j < d; ++j) m(i, j) = v(i * d + j);
    return m;
}

Eigen::SparseMatrix<cplx> build_liouvillian_sparse(const Mat& H, const std::vector<LindbladTerm>& terms) {
    const long d = H.rows();
    if (H.cols() != d) throw DimensionError("Hamiltonian must be square");
    SpMat Id(d, d);
    Id.setIdentity();
    auto sp = [](const Mat& m) { return SpMat(m.sparseView(cplx(1e-300), 1.0)); };
    const SpMat h = sp(H), ht = sp(H.transpose());
    SpMat L = SpMat(Eigen::kroneckerProduct(h, Id)) - SpMat(Eigen::kroneckerProduct(Id, ht));
    L *= -I_;
    for (const auto& t : terms) {
        if (t.op.rows() != d || t.op.cols() != d) throw DimensionError("jump operator dimension mismatch");
        if (t.rate < 0) throw ConfigError("Lindblad rate must be non-negative");
        if (t.rate == 0) continue;
        const Mat AdA = t.op.adjoint() * t.op;
        SpMat term = SpMat(Eigen::kroneckerProduct(sp(t.op), sp(t.op.conjugate()))) -
                     0.5 * SpMat(Eigen::kroneckerProduct(sp(AdA), Id)) -
                     0.5 * SpMat(Eigen::kroneckerProduct(Id, sp(AdA.transpose())));
        L += t.rate * term;
    }
    L.makeCompressed();
    return L;
}

SuperOperator build_liouvillian(const Mat& H, const std::vector<LindbladTerm>& terms) {
    return {H.rows(), Mat(build_liouvillian_sparse(H, terms))};
}

SuperOperator propagate_step(const SuperOperator& L, double dt) {
    if (!(dt > 0)) throw ConfigError("propagate_step needs dt > 0");
    Mat P = (L.m * dt).exp();
    if (!P.allFinite()) throw NumericalError("propagator has non-finite entries");
    return {L.d, P};
}

namespace {

using State = std::vector<double>;

// Row-compressed sparse matrix with a dense-column product kernel.
struct Csr {
    std::vector<int> ptr, col;
    std::vector<cplx> val;

    explicit Csr(const Mat& m) {
        ptr.push_back(0);
        for (long i = 0; i < m.rows(); ++i) {
            for (long j = 0; j < m.cols(); ++j)
                if (m(i, j) != cplx(0)) col.push_back(int(j)), val.push_back(m(i, j));
            ptr.push_back(int(col.size()));
        }
    }
    // out = this * r
    template <class In, class Out>
    void left(const In& r, Out& out) const {
        const long d = r.rows();
        for (long j = 0; j < r.cols(); ++j) {
            const cplx* rc = r.col(j).data();
            cplx* oc = out.col(j).data();
            for (long i = 0; i < d; ++i) {
                cplx s = 0;
                for (int k = ptr[i]; k < ptr[i + 1]; ++k) s += val[k] * rc[col[k]];
                oc[i] = s;
            }
        }
    }
    // out += g * y * this^dagger
    template <class Out>
    void right_adjoint_add(const Mat& y, double g, Out& out) const {
        for (long j = 0; j + 1 < long(ptr.size()); ++j)
            for (int k = ptr[j]; k < ptr[j + 1]; ++k) out.col(j) += (g * std::conj(val[k])) * y.col(col[k]);
    }
};

// Hermiticity of rho is preserved by the generator, so the commutator is
// formed as -i (X - X^dagger) with X = H_eff rho.
struct Rhs {
    Csr heff;
    struct Jump {
        double g;
        Csr a;
        Eigen::MatrixXcd outer;  // diag * diag^dagger for diagonal jump operators
        bool is_diag;
    };
    std::vector<Jump> jumps;
    long d;
    mutable Mat x;

    explicit Rhs(const Mat& h) : heff(h), d(h.rows()), x(h.rows(), h.rows()) {}

    void operator()(const State& y, State& dydt, double) const {
        Eigen::Map<const Mat> r(reinterpret_cast<const cplx*>(y.data()), d, d);
        Eigen::Map<Mat> out(reinterpret_cast<cplx*>(dydt.data()), d, d);
        heff.left(r, x);
        out = -I_ * x;
        out += I_ * x.adjoint();
        for (const auto& j : jumps) {
            if (j.is_diag) {
                out.array() += j.g * (j.outer.array() * r.array());
            } else {
                j.a.left(r, x);
                j.a.right_adjoint_add(x, j.g, out);
            }
        }
    }
};


void check_trace(const Mat& r, double t, double tol) {
    const double e = std::abs(r.trace() - 1.0);
    if (e > tol) {
        std::ostringstream os;
        os << "trace drift " << e << " at t=" << t << " exceeds " << tol;
        throw NumericalError(os.str());
    }
}

}  // namespace

std::vector<Mat> evolve(const Mat& rho0, const Mat& H, const std::vector<LindbladTerm>& terms,
                        const std::vector<double>& t_grid, const EvolveOptions& opt) {
    const long d = H.rows();
    if (rho0.rows() != d) throw DimensionError("initial state does not match Hamiltonian");
    if (t_grid.empty()) return {};
    if (t_grid.front() < 0) throw ConfigError("time grid must start at t >= 0");
    for (size_t i = 1; i < t_grid.size(); ++i)
        if (t_grid[i] < t_grid[i - 1]) throw ConfigError("time grid must be ascending");

    std::vector<Mat> out;
    out.reserve(t_grid.size());

    if (opt.backend == Backend::Propagator) {
        const auto L = build_liouvillian(H, terms);
        const auto P = propagate_step(L, opt.propagator_dt);
        Vec v = vectorize(rho0);
        double t = 0;
        for (double target : t_grid) {
            const long n = long(std::floor((target - t) / opt.propagator_dt + 1e-9));
            for (long k = 0; k < n; ++k) v = P.m * v;
            t += n * opt.propagator_dt;
            if (target - t > 1e-12) {
                v = propagate_step(L, target - t).m * v;
                t = target;
            }
            out.push_back(devectorize(v));
            check_trace(out.back(), target, opt.trace_tol);
        }
        return out;
    }

    Mat heff = H;
    for (const auto& tm : terms) {
        if (tm.op.rows() != d) throw DimensionError("jump operator dimension mismatch");
        if (tm.rate < 0) throw ConfigError("Lindblad rate must be non-negative");
        if (tm.rate == 0) continue;
        heff -= 0.5 * I_ * tm.rate * (tm.op.adjoint() * tm.op);
    }
    Rhs rhs(heff);
    for (const auto& tm : terms) {
        if (tm.rate == 0) continue;
        const bool diag = tm.op.isDiagonal(0.0);
        Mat outer = diag ? Mat(tm.op.diagonal() * tm.op.diagonal().adjoint()) : Mat();
        rhs.jumps.push_back({tm.rate, Csr(tm.op), outer, diag});
    }
    const Mat rho_in = hermitize(rho0);

    State y(2 * d * d);
    Eigen::Map<Mat>(reinterpret_cast<cplx*>(y.data()), d, d) = rho_in;

    std::vector<double> times;
    if (t_grid.front() > 0) times.push_back(0.0);
    times.insert(times.end(), t_grid.begin(), t_grid.end());
    const size_t skip = times.size() - t_grid.size();

    namespace ode = boost::numeric::odeint;
    auto stepper = ode::make_controlled(opt.abs_tol, opt.rel_tol, ode::runge_kutta_fehlberg78<State>());
    size_t idx = 0;
    auto observer = [&](const State& s, double t) {
        if (idx++ < skip) return;
        Mat r = Eigen::Map<const Mat>(reinterpret_cast<const cplx*>(s.data()), d, d);
        check_trace(r, t, opt.trace_tol);
        out.push_back(std::move(r));
    };
    if (times.size() == 1) {
        observer(y, times[0]);
        return out;
    }
    ode::integrate_times(stepper, std::cref(rhs), y, times.begin(), times.end(), opt.initial_dt, observer);
    return out;
}

Mat piecewise_unitary(const std::function<Mat(double)>& H, double t0, double t1, int nsub, double hbar) {
    if (nsub <= 0) throw ConfigError("piecewise_unitary needs nsub > 0");
    const double dt = (t1 - t0) / nsub;
    Mat U;
    for (int k = 0; k < nsub; ++k) {
        const Mat h = H(t0 + (k + 0.5) * dt);
        if (k == 0) U = Mat::Identity(h.rows(), h.cols());
        Eigen::SelfAdjointEigenSolver<Mat> es(h);
        const Vec ph = (-I_ * es.eigenvalues().cast<cplx>() * (dt / hbar)).array().exp();
        U = (es.eigenvectors() * ph.asDiagonal() * es.eigenvectors().adjoint()) * U;
    }
    return U;
}

}  // namespace qlink::lindblad
