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

namespace phaseloss {

/// Numerical thresholds shared across modules.
struct Tolerances {
    /// Probe and block normalization.
    double normalization = 1e-12;
    /// Agreement between analytic derivatives and finite differences.
    double finite_difference = 1e-6;
    /// Pairwise orthonormality of a projector set.
    double orthonormality = 1e-8;
    /// Pairs of density-matrix eigenvalues summing below this are treated as kernel.
    double sld_eigen_cutoff = 1e-12;
    /// Outcomes below this probability are dropped from classical Fisher sums.
    double min_outcome_probability = 1e-14;
    /// Optimized weights below this are pinned to zero.
    double weight_truncation = 1e-12;
    /// Within-block photon-number variance at or below this counts as zero.
    double degenerate_variance = 1e-30;
    /// Determinant magnitude below this marks a singular 2x2 information matrix.
    double singular_determinant = 1e-14;
    /// Base step for measured-Fisher central differences.
    double measurement_fd_step = 1e-4;
    /// Largest photon number accepted by the dense density-matrix path.
    int dense_photon_budget = 12;
};

inline constexpr Tolerances kTolerances{};

}  // namespace phaseloss
