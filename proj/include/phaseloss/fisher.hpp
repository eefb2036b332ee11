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

#pragma once

#include <span>

#include "phaseloss/fock_core.hpp"

namespace phaseloss {

/// Real symmetric information matrix over (phi, eta).
struct FisherMatrix {
    double phi_phi = 0.0;
    double eta_eta = 0.0;
    double phi_eta = 0.0;

    [[nodiscard]] double operator()(Parameter a, Parameter b) const {
        if (a != b) {
            return phi_eta;
        }
        return a == Parameter::phi ? phi_phi : eta_eta;
    }
};

/// Standard deviations implied by a pair of Fisher informations. Infinite
/// entries flag a parameter the probe carries no information about.
struct PrecisionSummary {
    double delta_phi = 0.0;
    double delta_eta = 0.0;
    double delta_total = 0.0;
    bool phi_informative = true;
    bool eta_informative = true;

    [[nodiscard]] bool finite() const { return phi_informative && eta_informative; }
};

/// Scalars behind every Fisher matrix of a probe at one eta.
struct FisherTerms {
    /// Quantum Fisher information for phase.
    double phase = 0.0;
    /// Quantum Fisher information for loss, Xi_1 / (eta (1 - eta)).
    double loss_quantum = 0.0;
    /// Classical Fisher information of the sector distribution p_l.
    double loss_classical = 0.0;
};

/// Kernel-level evaluation shared with the optimizer.
FisherTerms fisher_terms(std::span<const double> weights, const LossKernel &kernel);

FisherMatrix qfi_matrix(const ProbeState &probe, double eta);
FisherMatrix classical_fisher_p(const ProbeState &probe, double eta);
/// Information from measuring in the eigenbasis of the phase SLD.
FisherMatrix measured_fisher_phase_sld(const ProbeState &probe, double eta);
/// Information from measuring in the eigenbasis of the loss SLD.
FisherMatrix measured_fisher_loss_sld(const ProbeState &probe, double eta);

/// tr(rho [L_eta, L_phi]) = i I_phiphi / eta for the e^{i k phi} phase convention.
/// Nonzero whenever the phase is informative, so the two SLDs never commute on rho.
Complex commutator_expectation(const ProbeState &probe, double eta);

/// Delta_phi from the phase QFI, Delta_eta from the measured loss information.
PrecisionSummary combined_uncertainty(const ProbeState &probe, double eta);
PrecisionSummary precision_from(double phase_information, double loss_information);

/// Moment forms used as independent cross-checks of the primary routes.
namespace moment_forms {
/// 4 (Xi_2 - sum_l xi_{1,l}^2 / xi_{0,l}).
double phase_qfi(const MomentTable &m);
/// Xi_1 / (eta (1 - eta)) - (Xi_2 - sum_l xi_{1,l}^2 / xi_{0,l}) / eta^2.
double classical_loss(const MomentTable &m, double eta);
/// Classical sector term plus the weighted block term 4 sum_l p_l Re P_{l,etaeta}.
double loss_qfi_unsimplified(const MomentTable &m, double eta);
}  // namespace moment_forms

}  // namespace phaseloss
