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

#include <cmath>
#include <memory>
#include <numbers>

#include "qlink/rng.hpp"
#include "qlink/shuttle.hpp"

namespace qlink::shuttle {

namespace {

std::vector<double> correlation_times(const ChargeNoiseOptions& opt) {
    if (opt.n_processes < 1) throw ConfigError("charge noise needs at least one process");
    if (!(opt.tau_min > 0) || opt.tau_max < opt.tau_min) throw ConfigError("bad correlation-time range");
    if (opt.s_1mhz < 0) throw ConfigError("noise spectral density must be non-negative");
    std::vector<double> tau(opt.n_processes);
    const double lo = std::log(opt.tau_min), hi = std::log(opt.tau_max);
    for (int k = 0; k < opt.n_processes; ++k)
        tau[k] = std::exp(opt.n_processes == 1 ? lo : lo + (hi - lo) * k / (opt.n_processes - 1));
    return tau;
}

// One-sided spectrum of a unit-variance OU process with correlation time tau (ns), in 1/Hz.
double unit_psd(double f_hz, double tau_ns) {
    const double tau = tau_ns * 1e-9;
    const double w = 2 * std::numbers::pi * f_hz * tau;
    return 4 * tau / (1 + w * w);
}

double process_variance(const std::vector<double>& tau, double s_1mhz) {
    double s = 0;
    for (double t : tau) s += unit_psd(1e6, t);
    return s_1mhz / s;
}

}  // namespace

double charge_noise_psd(double f_hz, const ChargeNoiseOptions& opt) {
    const auto tau = correlation_times(opt);
    const double var = process_variance(tau, opt.s_1mhz);
    double s = 0;
    for (double t : tau) s += var * unit_psd(f_hz, t);
    return s;
}

std::vector<double> charge_noise_samples(std::mt19937_64& rng, double duration, double dt,
                                         const ChargeNoiseOptions& opt) {
    if (!(dt > 0) || !(duration > 0)) throw ConfigError("charge noise needs positive duration and dt");
    const auto tau = correlation_times(opt);
    const double sigma = std::sqrt(process_variance(tau, opt.s_1mhz));
    const long n = long(std::floor(duration / dt + 1e-9)) + 1;
    std::vector<double> x(std::max(n, 2L), 0.0);
    if (sigma == 0) return x;
    std::normal_distribution<double> normal;
    for (double t : tau) {
        const double a = std::exp(-dt / t);
        const double kick = sigma * std::sqrt(1 - a * a);
        double v = sigma * normal(rng);
        for (auto& xi : x) {
            xi += v;
            v = a * v + kick * normal(rng);
        }
    }
    return x;
}

NoiseTrace charge_noise_trace(std::uint64_t seed, std::uint64_t realization, double duration, double dt,
                              const ChargeNoiseOptions& opt) {
    auto rng = make_stream(seed, "charge-noise", realization);
    auto x = std::make_shared<std::vector<double>>(charge_noise_samples(rng, duration, dt, opt));
    return [x, dt](double t) {
        const double u = std::max(0.0, t / dt);
        const size_t k = std::min(size_t(u), x->size() - 2);
        const double f = std::min(1.0, u - double(k));
        return (*x)[k] * (1 - f) + (*x)[k + 1] * f;
    };
}

}  // namespace qlink::shuttle
