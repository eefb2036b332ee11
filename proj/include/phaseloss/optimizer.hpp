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
 * Probe design on the probability simplex of weights x_k.
 *
 * Two objectives are supported: the combined uncertainty
 * sqrt(1 / I_phiphi + 1 / I_etaeta) with the loss information taken from the
 * phase-SLD measurement (or, optionally, the loss QFI), and the phase QFI on
 * its own. Each start runs a quasi-Newton descent in squared coordinates
 * x = y^2 / |y|^2 and is then polished with spectral projected gradient steps
 * directly on the simplex.
 */
#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "phaseloss/fisher.hpp"
#include "phaseloss/fock_core.hpp"

namespace phaseloss {

enum class Objective { joint_delta, phase_only };

enum class SimplexParameterization { squared_then_projected };

struct OptimizerSettings {
    Objective objective = Objective::joint_delta;
    int multistart = 16;
    int max_iterations = 4000;
    double objective_tolerance = 1e-14;
    double iterate_tolerance = 1e-13;
    std::uint64_t seed = 20130901;
    SimplexParameterization parameterization = SimplexParameterization::squared_then_projected;
    /// Use the loss QFI instead of the phase-SLD measured loss information.
    /// Not the default; meant for sensitivity studies.
    bool quantum_loss_information = false;
    /// Worker threads for the multistart; 0 picks hardware concurrency.
    int threads = 0;
};

/// Value returned for infeasible points, where some information vanishes.
inline constexpr double kInfeasibleObjective = 1e300;

struct ObjectiveValue {
    /// Delta for joint_delta, I_phiphi for phase_only.
    double value = 0.0;
    /// Partial derivatives of value in x_k (not of the minimized quantity).
    std::vector<double> gradient;
    /// Some information vanishes at x; value holds kInfeasibleObjective.
    bool infeasible = false;
};

ObjectiveValue objective_and_gradient(std::span<const double> x, int n, double eta,
                                      Objective objective, bool quantum_loss_information = false);

struct StartSummary {
    std::string label;
    double initial_objective = 0.0;
    double final_objective = 0.0;
    int iterations = 0;
    double gradient_norm = 0.0;
    double newton_decrement = 0.0;
    bool converged = false;
    bool feasible = false;
};

struct OptimizationResult {
    int n = 0;
    double eta = 0.0;
    Objective objective = Objective::joint_delta;
    std::vector<double> weights;
    /// Delta (joint_delta) or I_phiphi (phase_only) at `weights`.
    double objective_value = 0.0;
    /// Infinity norm of x - proj(x - grad) at the solution. Not scale free:
    /// weights with tiny optimal values and huge curvature keep it large.
    double gradient_norm = 0.0;
    /// Objective decrease still predicted by a Newton step on the active face.
    /// Convergence means this is below objective_tolerance * max(1, |f|).
    double newton_decrement = 0.0;
    /// Indices pinned to zero weight.
    std::vector<int> active_set;
    bool converged = false;
    std::string best_start;
    std::vector<StartSummary> starts;
};

/// Throws NumericalQualityError when no start reaches a feasible point.
OptimizationResult optimize(int n, double eta, const OptimizerSettings &settings);

struct TradeoffRow {
    double eta = 0.0;
    std::vector<double> weights;
    double phase_information = 0.0;
    double measured_loss_information = 0.0;
    double quantum_loss_information = 0.0;
    PrecisionSummary precision;
    bool converged = false;
    /// Failure message for a point where no start was feasible; weights are then empty.
    std::string note;
};

/// One optimize() per eta, rows sorted by eta, Fisher columns recomputed from x*.
std::vector<TradeoffRow> tradeoff_scan(int n, std::span<const double> etas,
                                       const OptimizerSettings &settings);

/// Row for a fixed probe at one eta, same columns as tradeoff_scan.
TradeoffRow evaluate_probe_row(const ProbeState &probe, double eta);

}  // namespace phaseloss
