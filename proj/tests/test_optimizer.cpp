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

#include <gtest/gtest.h>

#include <random>

#include "phaseloss/errors.hpp"
#include "phaseloss/fisher.hpp"
#include "phaseloss/optimizer.hpp"
#include "phaseloss/probes.hpp"
#include "support/reference.hpp"

using namespace phaseloss;
using phaseloss::testing::rel;

namespace {

OptimizerSettings quick(Objective objective) {
    OptimizerSettings s;
    s.objective = objective;
    s.multistart = 8;
    return s;
}

double delta_of(const ProbeState &p, double eta) {
    return combined_uncertainty(p, eta).delta_total;
}

}  // namespace

TEST(Objective, FockVertexIsInfeasible) {
    const std::vector<double> x{0, 0, 0, 1};
    const ObjectiveValue v = objective_and_gradient(x, 3, 0.5, Objective::joint_delta);
    EXPECT_TRUE(v.infeasible);
    EXPECT_EQ(v.value, kInfeasibleObjective);
}

TEST(Objective, ValuesMatchFisher) {
    std::mt19937_64 rng(61);
    for (int trial = 0; trial < 20; ++trial) {
        const int n = 2 + trial % 10;
        const auto x = phaseloss::testing::random_weights(n, rng);
        const double eta = 0.1 + 0.04 * trial;
        const ProbeState p = make_probe(x);
        EXPECT_LE(rel(objective_and_gradient(x, n, eta, Objective::joint_delta).value,
                      delta_of(p, eta)),
                  1e-12);
        EXPECT_LE(rel(objective_and_gradient(x, n, eta, Objective::phase_only).value,
                      qfi_matrix(p, eta).phi_phi),
                  1e-12);
        const double quantum = std::sqrt(1 / qfi_matrix(p, eta).phi_phi +
                                         1 / qfi_matrix(p, eta).eta_eta);
        EXPECT_LE(rel(objective_and_gradient(x, n, eta, Objective::joint_delta, true).value,
                      quantum),
                  1e-12);
    }
}

TEST(Objective, GradientMatchesFiniteDifferences) {
    std::mt19937_64 rng(62);
    for (int trial = 0; trial < 100; ++trial) {
        const int n = 2 + trial % 11;
        auto x = phaseloss::testing::random_weights(n, rng);
        const double eta = 0.1 + 0.008 * trial;
        for (Objective obj : {Objective::joint_delta, Objective::phase_only}) {
            for (bool quantum : {false, true}) {
                const ObjectiveValue v = objective_and_gradient(x, n, eta, obj, quantum);
                ASSERT_FALSE(v.infeasible);
                double scale = 1.0;
                for (double g : v.gradient) {
                    scale = std::max(scale, std::abs(g));
                }
                for (int k = 0; k <= n; ++k) {
                    auto f = [&](double xk) {
                        auto y = x;
                        y[k] = xk;
                        return objective_and_gradient(y, n, eta, obj, quantum).value;
                    };
                    const double fd = phaseloss::testing::derivative(f, x[k], std::min(1e-4, x[k] / 4));
                    const double g = v.gradient[k];
                    EXPECT_LE(std::abs(fd - g), 1e-6 * scale)
                        << "n=" << n << " k=" << k << " eta=" << eta;
                }
            }
        }
    }
}

TEST(Objective, NoonSymmetryForPhaseOnly) {
    const auto x = noon(5).weights();
    const ObjectiveValue v = objective_and_gradient(x, 5, 1.0 - 1e-9, Objective::phase_only);
    EXPECT_NEAR(v.gradient[0], v.gradient[5], 1e-6 * std::abs(v.gradient[0]));
}

TEST(Optimize, MatchesExhaustiveGridAtTwoPhotons) {
    for (double eta : {0.2, 0.5, 0.8}) {
        const OptimizationResult r = optimize(2, eta, quick(Objective::joint_delta));
        const auto grid = phaseloss::testing::grid_search_n2(eta, 1e-3);
        EXPECT_LE(std::abs(r.objective_value - grid.delta), 1e-3) << "eta=" << eta;
        EXPECT_LE(r.objective_value, grid.delta + 1e-12);
        EXPECT_TRUE(r.converged);
    }
}

TEST(Optimize, DominatesLibraryProbes) {
    for (int n : {2, 4, 6}) {
        for (double eta : {0.2, 0.5, 0.8}) {
            const OptimizationResult r = optimize(n, eta, quick(Objective::joint_delta));
            std::vector<ProbeState> library{noon(n), uniform(n), holland_burnett(n)};
            for (const auto &p : library) {
                EXPECT_LE(r.objective_value, delta_of(p, eta) + 1e-12) << "n=" << n;
            }
            EXPECT_LE(rel(r.objective_value, delta_of(make_probe(r.weights), eta)), 1e-12);
        }
    }
}

TEST(Optimize, PhaseOnlyBeatsLibrary) {
    const OptimizationResult r = optimize(6, 0.5, quick(Objective::phase_only));
    const double info = qfi_matrix(make_probe(r.weights), 0.5).phi_phi;
    EXPECT_NEAR(info, r.objective_value, 1e-12 * info);
    EXPECT_GE(info, qfi_matrix(noon(6), 0.5).phi_phi);
    EXPECT_GE(info, qfi_matrix(holland_burnett(6), 0.5).phi_phi);
}

TEST(Optimize, WeightShiftTowardLossyArm) {
    const double eta = 0.5;
    const auto joint = optimize(6, eta, quick(Objective::joint_delta));
    const auto phase = optimize(6, eta, quick(Objective::phase_only));
    EXPECT_GE(joint.weights[6], phase.weights[6]);
}

TEST(Optimize, ResultOnSimplexWithActiveSet) {
    const OptimizationResult r = optimize(8, 0.4, quick(Objective::joint_delta));
    double total = 0.0;
    for (double x : r.weights) {
        EXPECT_GE(x, 0.0);
        total += x;
    }
    EXPECT_NEAR(total, 1.0, 1e-10);
    for (int k : r.active_set) {
        EXPECT_EQ(r.weights[k], 0.0);
    }
    for (std::size_t k = 0; k < r.weights.size(); ++k) {
        if (r.weights[k] > 0.0) {
            EXPECT_GE(r.weights[k], 1e-12);
        }
    }
    EXPECT_FALSE(r.best_start.empty());
    EXPECT_EQ(r.starts.size(), 8u);
}

TEST(Optimize, DeterministicGivenSeed) {
    OptimizerSettings s = quick(Objective::joint_delta);
    s.seed = 99;
    const auto a = optimize(7, 0.35, s);
    s.threads = 1;
    const auto b = optimize(7, 0.35, s);
    EXPECT_EQ(a.weights, b.weights);
    EXPECT_EQ(a.objective_value, b.objective_value);
    EXPECT_EQ(a.best_start, b.best_start);
}

TEST(Optimize, PreconditionErrors) {
    EXPECT_THROW(optimize(1, 0.5, quick(Objective::joint_delta)), DomainError);
    EXPECT_THROW(optimize(4, 1.0, quick(Objective::joint_delta)), DomainError);
    OptimizerSettings bad = quick(Objective::joint_delta);
    bad.multistart = 0;
    bad.max_iterations = 0;
    EXPECT_THROW(optimize(4, 0.5, bad), DomainError);
    EXPECT_NO_THROW(optimize(1, 0.5, quick(Objective::phase_only)));
}

TEST(TradeoffScan, RowsSortedAndRecomputed) {
    const std::vector<double> etas{0.7, 0.2, 0.5};
    const auto rows = tradeoff_scan(4, etas, quick(Objective::joint_delta));
    ASSERT_EQ(rows.size(), 3u);
    EXPECT_EQ(rows[0].eta, 0.2);
    EXPECT_EQ(rows[1].eta, 0.5);
    EXPECT_EQ(rows[2].eta, 0.7);
    for (const auto &r : rows) {
        const ProbeState p = make_probe(r.weights);
        EXPECT_EQ(r.phase_information, qfi_matrix(p, r.eta).phi_phi);
        EXPECT_EQ(r.measured_loss_information, measured_fisher_phase_sld(p, r.eta).eta_eta);
        EXPECT_EQ(r.quantum_loss_information, qfi_matrix(p, r.eta).eta_eta);
        const auto &d = r.precision;
        EXPECT_NEAR(d.delta_total * d.delta_total,
                    d.delta_phi * d.delta_phi + d.delta_eta * d.delta_eta, 1e-14);
        EXPECT_TRUE(r.note.empty());
    }
    const auto noon_row = evaluate_probe_row(noon(4), 0.5);
    EXPECT_LE(rows[1].precision.delta_total, noon_row.precision.delta_total);
}
