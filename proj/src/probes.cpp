// Copyright 2026 The phaseloss Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "phaseloss/probes.hpp"

#include <cmath>
#include <string>

#include <boost/multiprecision/cpp_bin_float.hpp>

#include "phaseloss/errors.hpp"

namespace phaseloss {

namespace {

using Wide = boost::multiprecision::cpp_bin_float_50;

void require_photons(int n) {
    if (n < 1) {
        throw DomainError("probe needs n >= 1, got " + std::to_string(n));
    }
}

/// Row of C(m, 0..m) by multiplicative recurrence.
std::vector<Wide> binomial_row(int m) {
    std::vector<Wide> row(static_cast<std::size_t>(m + 1));
    row[0] = 1;
    for (int i = 1; i <= m; ++i) {
        row[static_cast<std::size_t>(i)] = row[static_cast<std::size_t>(i - 1)] * (m - i + 1) / i;
    }
    return row;
}

}  // namespace

double TwoModeState::norm() const {
    double s = 0.0;
    for (const auto &a : amplitudes) {
        s += std::norm(a);
    }
    return std::sqrt(s);
}

ProbeState noon(int n) {
    require_photons(n);
    std::vector<double> x(static_cast<std::size_t>(n + 1), 0.0);
    x.front() = 0.5;
    x.back() = 0.5;
    return make_probe(x);
}

ProbeState fock_probe(int n) {
    require_photons(n);
    std::vector<double> x(static_cast<std::size_t>(n + 1), 0.0);
    x.back() = 1.0;
    return make_probe(x);
}

ProbeState uniform(int n) {
    require_photons(n);
    std::vector<double> x(static_cast<std::size_t>(n + 1), 1.0);
    return make_probe(x);
}

TwoModeState beamsplitter_transform(const TwoModeState &state, double transmissivity) {
    if (!(transmissivity >= 0.0 && transmissivity <= 1.0)) {
        throw DomainError("beamsplitter transmissivity outside [0, 1]: " +
                          std::to_string(transmissivity));
    }
    const int n = state.photons();
    if (n < 0) {
        throw DomainError("empty two-mode state");
    }
    const Wide t = boost::multiprecision::sqrt(Wide(transmissivity));
    const Wide r = boost::multiprecision::sqrt(Wide(1.0 - transmissivity));

    std::vector<std::vector<Wide>> binom(static_cast<std::size_t>(n + 1));
    for (int m = 0; m <= n; ++m) {
        binom[static_cast<std::size_t>(m)] = binomial_row(m);
    }
    auto C = [&](int m, int i) -> const Wide & {
        return binom[static_cast<std::size_t>(m)][static_cast<std::size_t>(i)];
    };
    std::vector<Wide> t_pow(static_cast<std::size_t>(n + 1));
    std::vector<Wide> r_pow(static_cast<std::size_t>(n + 1));
    t_pow[0] = 1;
    r_pow[0] = 1;
    for (int i = 1; i <= n; ++i) {
        t_pow[static_cast<std::size_t>(i)] = t_pow[static_cast<std::size_t>(i - 1)] * t;
        r_pow[static_cast<std::size_t>(i)] = r_pow[static_cast<std::size_t>(i - 1)] * r;
    }

    TwoModeState out;
    out.amplitudes.assign(static_cast<std::size_t>(n + 1), Complex{0.0, 0.0});
    for (int k = 0; k <= n; ++k) {
        const Complex in = state.amplitudes[static_cast<std::size_t>(k)];
        if (in == Complex{0.0, 0.0}) {
            continue;
        }
        // (a^dag)^k (b^dag)^(n-k) / sqrt(k! (n-k)!) expanded onto |m, n-m>:
        // sum over i photons kept from a and j moved from b to a, i + j = m,
        // times sqrt(m! (n-m)! / (k! (n-k)!)) = sqrt(C(n,k) / C(n,m)).
        for (int m = 0; m <= n; ++m) {
            Wide sum = 0;
            for (int i = std::max(0, m - (n - k)); i <= std::min(k, m); ++i) {
                const int j = m - i;
                Wide term = C(k, i) * C(n - k, j) * t_pow[static_cast<std::size_t>(i)] *
                            r_pow[static_cast<std::size_t>(k - i)] *
                            r_pow[static_cast<std::size_t>(j)] *
                            t_pow[static_cast<std::size_t>(n - k - j)];
                sum += (j % 2 == 0) ? term : Wide(-term);
            }
            sum *= boost::multiprecision::sqrt(C(n, k) / C(n, m));
            out.amplitudes[static_cast<std::size_t>(m)] += in * static_cast<double>(sum);
        }
    }
    return out;
}

ProbeState to_probe(const TwoModeState &state) {
    std::vector<double> x(state.amplitudes.size());
    std::vector<double> phases(state.amplitudes.size());
    for (std::size_t k = 0; k < x.size(); ++k) {
        x[k] = std::norm(state.amplitudes[k]);
        phases[k] = std::arg(state.amplitudes[k]);
    }
    return make_probe(x, phases);
}

ProbeState holland_burnett(int n) {
    if (n < 2 || n % 2 != 0) {
        throw DomainError("Holland-Burnett probe needs even n >= 2, got " + std::to_string(n));
    }
    TwoModeState twin;
    twin.amplitudes.assign(static_cast<std::size_t>(n + 1), Complex{0.0, 0.0});
    twin.amplitudes[static_cast<std::size_t>(n / 2)] = 1.0;
    return to_probe(beamsplitter_transform(twin, 0.5));
}

}  // namespace phaseloss
