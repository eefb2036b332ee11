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
 * Symmetric logarithmic derivatives of the block-diagonal evolved state, their
 * two-eigenvalue spectra, and the classical information of the outcome
 * distributions those eigenbases induce.
 */
#pragma once

#include <string>
#include <vector>

#include <Eigen/Dense>

#include "phaseloss/fisher.hpp"
#include "phaseloss/fock_core.hpp"

namespace phaseloss {

/// L_kappa restricted to sector `loss`, on the sector's local basis.
struct SldBlock {
    int loss = 0;
    Parameter kappa = Parameter::phi;
    Eigen::MatrixXcd op;
};

/**
 * @brief Nonzero part of the spectrum of one SLD block.
 *
 * A block with vanishing projected tangent has a single nonzero eigenvalue
 * d_kappa log p_l on psi_l (or none at all when that is also zero). Such blocks
 * set `degenerate`, keep the surviving pair in `lambda_plus` / `plus`, and leave
 * `minus` empty.
 */
struct SldEigenpair {
    int loss = 0;
    Parameter kappa = Parameter::phi;
    double lambda_plus = 0.0;
    double lambda_minus = 0.0;
    ComplexVector plus;
    ComplexVector minus;
    bool degenerate = false;
};

struct MeasurementOutcome {
    std::string label;
    double probability = 0.0;
};

/// Outcome probabilities of a projective measurement, residual subspace last.
struct MeasurementDistribution {
    std::vector<MeasurementOutcome> outcomes;

    [[nodiscard]] double total() const;
};

/// Classical Fisher matrix of a frozen measurement plus finite-difference diagnostics.
struct MeasurementFisher {
    FisherMatrix fisher;
    /// Largest |Richardson - half-step| derivative gap over the outcomes kept.
    double refinement_gap = 0.0;
    int outcomes_used = 0;
};

SldBlock sld_block(const EvolvedEnsemble &ensemble, Parameter kappa, int loss);

/// Closed-form eigenpairs for every occupied block, ordered by loss.
std::vector<SldEigenpair> sld_eigenpairs(const EvolvedEnsemble &ensemble, Parameter kappa);

/// Eigenvectors of L_kappa embedded in the global basis: (l, +), (l, -), ...
std::vector<ComplexVector> sld_eigenbasis(const EvolvedEnsemble &ensemble, Parameter kappa);

/// q = <v| rho |v> per projector; throws DomainError when the set is not orthonormal.
MeasurementDistribution measurement_distribution(const EvolvedEnsemble &ensemble,
                                                 const std::vector<ComplexVector> &projectors);

/**
 * @brief Classical Fisher matrix of projectors frozen at params0.
 *
 * Derivatives of the outcome probabilities come from central differences at
 * h and h/2 with one Richardson step. Throws NumericalQualityError when a
 * shifted eta leaves (0, 1) or the refinement does not settle.
 */
MeasurementFisher classical_fisher_of_measurement(const ProbeState &probe,
                                                  const ChannelParams &params0,
                                                  const std::vector<ComplexVector> &projectors);

}  // namespace phaseloss
