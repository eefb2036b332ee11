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

/**
 * @file
 * Brute-force reference path. Density matrices are built from the
 * beamsplitter-with-vacuum dilation and a partial trace over the loss mode,
 * SLDs are solved numerically in the eigenbasis of rho, and the QFI follows
 * from tr(rho (L_mu L_nu + L_nu L_mu) / 2). None of this reuses the sector
 * closed forms, which is what makes it a check on them.
 */
#pragma once

#include <Eigen/Dense>

#include "phaseloss/fisher.hpp"
#include "phaseloss/fock_core.hpp"

namespace phaseloss::oracle {

struct DenseState {
    FockBasis basis{0};
    Eigen::MatrixXcd rho;
};

enum class ChannelOrder { phase_then_loss, loss_then_phase };

/// Throws SizeError above the dense photon budget. eta may be 0 or 1 here.
DenseState density_matrix(const ProbeState &probe, const ChannelParams &params,
                          ChannelOrder order = ChannelOrder::phase_then_loss);

/// d rho / d theta from the derivative of the dilated pure state. The eta derivative
/// needs 0 < eta < 1; the phi derivative also accepts the closed interval.
Eigen::MatrixXcd density_derivative(const ProbeState &probe, const ChannelParams &params,
                                    Parameter which);

/// Central differences at 1e-4 and 1e-5, combined by one Richardson step.
Eigen::MatrixXcd density_derivative_fd(const ProbeState &probe, const ChannelParams &params,
                                       Parameter which);

struct SldSolution {
    Eigen::MatrixXcd L;
    /// Frobenius norm of L rho + rho L - 2 d rho.
    double residual = 0.0;
};

/// Solves L rho + rho L = 2 d rho; kernel-kernel entries of L are set to zero.
SldSolution numerical_sld(const Eigen::MatrixXcd &rho, const Eigen::MatrixXcd &drho);

enum class DerivativeSource { analytic, finite_difference };

struct OracleFisher {
    /// Raw 2x2 QFI, index 0 = phi; off-diagonals kept separately for inspection.
    Eigen::Matrix2d matrix = Eigen::Matrix2d::Zero();
    /// tr(rho [L_eta, L_phi]).
    Complex commutator;
    Eigen::MatrixXcd L_phi;
    Eigen::MatrixXcd L_eta;
    double max_residual = 0.0;

    [[nodiscard]] FisherMatrix fisher() const {
        return {matrix(0, 0), matrix(1, 1), 0.5 * (matrix(0, 1) + matrix(1, 0))};
    }
};

OracleFisher numerical_qfi(const ProbeState &probe, const ChannelParams &params,
                           DerivativeSource source = DerivativeSource::analytic);

/// sum_l p_l |psi_l><psi_l| from the sector closed forms, in the same basis.
Eigen::MatrixXcd assemble_blocks(const EvolvedEnsemble &ensemble);

}  // namespace phaseloss::oracle
