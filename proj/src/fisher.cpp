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

#include "phaseloss/fisher.hpp"

#include <cmath>
#include <limits>

#include "phaseloss/errors.hpp"

namespace phaseloss {

namespace {

void require_informative_probe(int n) {
    if (n < 1) {
        throw DomainError("Fisher information needs at least one photon (n >= 1)");
    }
}

FisherTerms terms_for(const ProbeState &probe, double eta) {
    require_open_eta(eta);
    require_informative_probe(probe.photons());
    const auto x = probe.weights();
    return fisher_terms(x, LossKernel(probe.photons(), eta));
}

double sum_xi1_squared_over_xi0(const MomentTable &m) {
    double s = 0.0;
    for (const auto &row : m.xi) {
        if (row[0] > 0.0) {
            s += row[1] * row[1] / row[0];
        }
    }
    return s;
}

}  // namespace

FisherTerms fisher_terms(std::span<const double> weights, const LossKernel &kernel) {
    const double eta = kernel.eta();
    require_open_eta(eta);
    const BlockSpread spread = block_spread(weights, kernel);
    FisherTerms t;
    double xi1 = 0.0;
    for (std::size_t k = 0; k < weights.size(); ++k) {
        xi1 += weights[k] * static_cast<double>(k);
    }
    const double eta_loss = eta * (1.0 - eta);
    for (std::size_t l = 0; l < spread.probability.size(); ++l) {
        const double p = spread.probability[l];
        if (p <= 0.0) {
            continue;
        }
        t.phase += 4.0 * p * spread.variance[l];
        // (d_eta p_l)^2 / p_l with d_eta p_l = p_l (mean_l / eta - l / (eta (1 - eta))).
        const double score = spread.mean[l] / eta - static_cast<double>(l) / eta_loss;
        t.loss_classical += p * score * score;
    }
    t.loss_quantum = xi1 / eta_loss;
    return t;
}

FisherMatrix qfi_matrix(const ProbeState &probe, double eta) {
    const FisherTerms t = terms_for(probe, eta);
    return {t.phase, t.loss_quantum, 0.0};
}

FisherMatrix classical_fisher_p(const ProbeState &probe, double eta) {
    const FisherTerms t = terms_for(probe, eta);
    return {0.0, t.loss_classical, 0.0};
}

FisherMatrix measured_fisher_phase_sld(const ProbeState &probe, double eta) {
    const FisherTerms t = terms_for(probe, eta);
    return {t.phase, t.loss_classical, 0.0};
}

FisherMatrix measured_fisher_loss_sld(const ProbeState &probe, double eta) {
    const FisherTerms t = terms_for(probe, eta);
    return {0.0, t.loss_quantum, 0.0};
}

Complex commutator_expectation(const ProbeState &probe, double eta) {
    const FisherTerms t = terms_for(probe, eta);
    return {0.0, t.phase / eta};
}

PrecisionSummary precision_from(double phase_information, double loss_information) {
    constexpr double inf = std::numeric_limits<double>::infinity();
    PrecisionSummary s;
    s.phi_informative = phase_information > 0.0;
    s.eta_informative = loss_information > 0.0;
    s.delta_phi = s.phi_informative ? 1.0 / std::sqrt(phase_information) : inf;
    s.delta_eta = s.eta_informative ? 1.0 / std::sqrt(loss_information) : inf;
    s.delta_total = s.finite() ? std::sqrt(s.delta_phi * s.delta_phi + s.delta_eta * s.delta_eta)
                               : inf;
    return s;
}

PrecisionSummary combined_uncertainty(const ProbeState &probe, double eta) {
    const FisherTerms t = terms_for(probe, eta);
    return precision_from(t.phase, t.loss_classical);
}

namespace moment_forms {

double phase_qfi(const MomentTable &m) { return 4.0 * (m.Xi[2] - sum_xi1_squared_over_xi0(m)); }

double classical_loss(const MomentTable &m, double eta) {
    return m.Xi[1] / (eta * (1.0 - eta)) - (m.Xi[2] - sum_xi1_squared_over_xi0(m)) / (eta * eta);
}

double loss_qfi_unsimplified(const MomentTable &m, double eta) {
    double block_term = 0.0;
    for (const auto &row : m.xi) {
        if (row[0] > 0.0) {
            block_term += (row[2] * row[0] - row[1] * row[1]) / (eta * eta * row[0]);
        }
    }
    return classical_loss(m, eta) + block_term;
}

}  // namespace moment_forms

}  // namespace phaseloss
