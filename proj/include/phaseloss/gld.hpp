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
#include <vector>

#include <Eigen/Dense>

#include "phaseloss/fock_core.hpp"

namespace phaseloss {

/// Boundary masses (M0, M1) of the measure defining a logarithmic derivative;
/// M2 = 1 - M0 - M1 is implicit. (1/2, 1/2) is the SLD.
struct GldWeights {
    double m0 = 0.5;
    double m1 = 0.5;
};

/// Hermitian information matrix over (phi, eta); index 0 is phi.
using GldFisherMatrix = Eigen::Matrix2cd;

GldFisherMatrix gld_fisher(const ProbeState &probe, double eta, const GldWeights &w);

/// Same matrix from the two-term closed form in M0, M1 and I_phiphi.
GldFisherMatrix gld_fisher_closed_form(const ProbeState &probe, double eta,
                                       const GldWeights &w);

struct ScalarBound {
    double value = 0.0;
    /// Matrix was singular; value uses the pseudo-inverse and is +inf when u
    /// reaches into the null space.
    bool singular = false;
};

/// u^T Re(I^-1) u for a real direction u.
ScalarBound scalarized_bound(const ProbeState &probe, double eta, const GldWeights &w,
                             const Eigen::Vector2d &u);

struct DirectionReport {
    Eigen::Vector2d u;
    double argmax_m0 = 0.0;
    double argmax_m1 = 0.0;
    double bound_at_sld = 0.0;
    double grid_max = 0.0;
    /// bound_at_sld - grid_max; non-negative when the SLD point wins.
    double margin = 0.0;
    /// Objective constant over the grid, so the argmax carries no meaning.
    bool flat = false;
    bool pass = false;
};

struct SldOptimalityReport {
    int resolution = 0;
    double cell = 0.0;
    std::vector<DirectionReport> directions;
    bool pass = false;
};

/**
 * @brief Sweeps (M0, M1) = (i, j) / (resolution - 1) over the open simplex and
 * checks that the scalarized bound peaks at (1/2, 1/2) for every direction.
 *
 * Failures are reported, not thrown; only bad arguments throw.
 */
SldOptimalityReport verify_sld_optimal(const ProbeState &probe, double eta, int resolution,
                                       std::span<const Eigen::Vector2d> directions);

}  // namespace phaseloss
