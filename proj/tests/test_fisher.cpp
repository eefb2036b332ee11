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
#include "phaseloss/probes.hpp"
#include "support/reference.hpp"

using namespace phaseloss;
using phaseloss::testing::random_probe;
using phaseloss::testing::rel;

namespace {

struct Frozen {
    const char *probe;
    double eta;
    double phase;
    double loss_quantum;
    double loss_measured;
};

// 40-digit evaluations of the moment formulas, rounded to 20 significant digits.
const Frozen kFrozen[] = {
    {"noon6", 0.3, 0.052449764121955094736, 14.285714285714285714, 14.140020496486632673},
    {"noon6", 0.5, 1.1076923076923076923, 12.0, 10.892307692307692308},
    {"noon6", 0.8, 14.954211246894173723, 18.75, 12.908511231681963389},
    {"hb6", 0.3, 2.9991015974776430758, 14.285714285714285714, 5.9548765149430549482},
    {"hb6", 0.5, 6.0053839915908881426, 12.0, 5.9946160084091118574},
    {"hb6", 0.8, 14.75298966946717492, 18.75, 12.987113410364384797},
    {"uniform4", 0.3, 2.2260907884189498825, 9.5238095238095238095, 3.3402240004235519136},
    {"uniform4", 0.5, 3.7946133167907361456, 8.0, 4.2053866832092638544},
    {"uniform4", 0.8, 6.3360139502469550279, 12.5, 10.024994550684783192},
    {"custom3", 0.3, 1.7619364424466448369, 9.5238095238095238095, 4.6295416281243992627},
    {"custom3", 0.5, 2.6057692307692307692, 8.0, 5.3942307692307692308},
    {"custom3", 0.8, 3.5452328238514064989, 12.5, 11.115143428183044336},
};

ProbeState frozen_probe(const std::string &name) {
    if (name == "noon6") {
        return noon(6);
    }
    if (name == "hb6") {
        return holland_burnett(6);
    }
    if (name == "uniform4") {
        return uniform(4);
    }
    const std::vector<double> w{0.1, 0.2, 0.3, 0.4};
    return make_probe(w);
}

}  // namespace

TEST(Fisher, FrozenValues) {
    for (const auto &f : kFrozen) {
        const ProbeState p = frozen_probe(f.probe);
        const FisherMatrix q = qfi_matrix(p, f.eta);
        const FisherMatrix m = measured_fisher_phase_sld(p, f.eta);
        SCOPED_TRACE(std::string(f.probe) + " eta=" + std::to_string(f.eta));
        EXPECT_LE(rel(q.phi_phi, f.phase), 1e-13);
        EXPECT_LE(rel(q.eta_eta, f.loss_quantum), 1e-14);
        EXPECT_LE(rel(m.eta_eta, f.loss_measured), 1e-13);
        EXPECT_EQ(q.phi_eta, 0.0);
    }
}

TEST(Fisher, FockExamples) {
    const FisherMatrix q = qfi_matrix(fock_probe(6), 0.5);
    EXPECT_DOUBLE_EQ(q.eta_eta, 24.0);
    EXPECT_EQ(q.phi_phi, 0.0);
    EXPECT_DOUBLE_EQ(measured_fisher_phase_sld(fock_probe(6), 0.5).eta_eta, 24.0);
    EXPECT_DOUBLE_EQ(measured_fisher_loss_sld(fock_probe(6), 0.25).eta_eta, 32.0);
    EXPECT_EQ(commutator_expectation(fock_probe(6), 0.3), Complex(0.0, 0.0));
    for (double eta : {0.1, 0.5, 0.9}) {
        EXPECT_NEAR(classical_fisher_p(fock_probe(4), eta).eta_eta, 4 / (eta * (1 - eta)),
                    1e-12 * 4 / (eta * (1 - eta)));
    }
    const PrecisionSummary s = combined_uncertainty(fock_probe(6), 0.5);
    EXPECT_FALSE(s.phi_informative);
    EXPECT_TRUE(std::isinf(s.delta_phi));
    EXPECT_TRUE(std::isinf(s.delta_total));
    EXPECT_DOUBLE_EQ(s.delta_eta, 1.0 / std::sqrt(24.0));
}

TEST(Fisher, NoonLosslessLimit) {
    EXPECT_LE(rel(qfi_matrix(noon(6), 1.0 - 1e-9).phi_phi, 36.0), 1e-6);
    EXPECT_LE(rel(qfi_matrix(noon(1), 1.0 - 1e-9).phi_phi, 1.0), 1e-6);
}

TEST(Fisher, DivergenceAtClosedEndpoints) {
    for (double eta : {0.0, 1.0}) {
        try {
            qfi_matrix(noon(3), eta);
            FAIL() << "no error at eta=" << eta;
        } catch (const DivergenceError &e) {
            EXPECT_NE(std::string(e.what()).find("I_etaeta"), std::string::npos);
        }
        EXPECT_THROW(classical_fisher_p(noon(3), eta), DivergenceError);
        EXPECT_THROW(measured_fisher_phase_sld(noon(3), eta), DivergenceError);
        EXPECT_THROW(measured_fisher_loss_sld(noon(3), eta), DivergenceError);
        EXPECT_THROW(commutator_expectation(noon(3), eta), DivergenceError);
        EXPECT_THROW(combined_uncertainty(noon(3), eta), DivergenceError);
    }
    EXPECT_THROW(qfi_matrix(noon(3), -0.1), DomainError);
}

TEST(Fisher, AgreesWithIndependentMoments) {
    std::mt19937_64 rng(21);
    for (int trial = 0; trial < 100; ++trial) {
        const int n = 1 + trial % 20;
        const ProbeState p = random_probe(n, rng);
        for (double eta : {0.1, 0.3, 0.5, 0.7, 0.9}) {
            const auto ref = phaseloss::testing::reference_terms(p.weights(), eta);
            const FisherMatrix q = qfi_matrix(p, eta);
            EXPECT_LE(rel(q.phi_phi, ref.phase), 1e-10);
            EXPECT_LE(rel(q.eta_eta, ref.loss_quantum), 1e-12);
            EXPECT_LE(rel(measured_fisher_phase_sld(p, eta).eta_eta, ref.loss_measured), 1e-10);
        }
    }
}

TEST(Fisher, TradeoffIdentityAndCancellation) {
    std::mt19937_64 rng(22);
    for (int trial = 0; trial < 100; ++trial) {
        const ProbeState p = random_probe(1 + trial % 20, rng);
        for (double eta : {0.1, 0.2, 0.3, 0.4, 0.5, 0.6, 0.7, 0.8, 0.9}) {
            const FisherMatrix q = qfi_matrix(p, eta);
            const FisherMatrix m = measured_fisher_phase_sld(p, eta);
            EXPECT_LE(rel(m.eta_eta + q.phi_phi / (4 * eta * eta), q.eta_eta), 1e-10);
            EXPECT_GE(m.eta_eta, 0.0);
            EXPECT_EQ(m.phi_phi, q.phi_phi);
            EXPECT_EQ(m.phi_eta, 0.0);
            const MomentTable mt = moments(p, eta);
            EXPECT_LE(rel(moment_forms::loss_qfi_unsimplified(mt, eta), q.eta_eta), 1e-10);
            EXPECT_LE(rel(moment_forms::phase_qfi(mt), q.phi_phi), 1e-9);
            EXPECT_LE(rel(moment_forms::classical_loss(mt, eta), m.eta_eta), 1e-9);
        }
    }
}

TEST(Fisher, DecompositionIntoClassicalAndBlocks) {
    std::mt19937_64 rng(23);
    for (int trial = 0; trial < 30; ++trial) {
        const ProbeState p = random_probe(1 + trial % 10, rng);
        const double eta = 0.25 + 0.015 * trial;
        const EvolvedEnsemble e = evolve(p, {eta, 0.0});
        const FisherMatrix c = classical_fisher_p(p, eta);
        double pp = 0.0;
        double ee = 0.0;
        double pe = 0.0;
        for (const auto &d : block_derivatives(e)) {
            if (!d) {
                continue;
            }
            const double w = e.blocks[d->loss].probability;
            pp += 4 * w * d->p_phiphi;
            ee += 4 * w * d->p_etaeta;
            pe += 4 * w * d->p_phieta.real();
        }
        const FisherMatrix q = qfi_matrix(p, eta);
        EXPECT_LE(rel(c.phi_phi + pp, q.phi_phi), 1e-10);
        EXPECT_LE(rel(c.eta_eta + ee, q.eta_eta), 1e-10);
        EXPECT_LE(std::abs(c.phi_eta + pe), 1e-10);
        EXPECT_EQ(c.phi_phi, 0.0);
    }
}

TEST(Fisher, ClassicalLossMatchesFiniteDifferences) {
    const std::vector<double> w{0.5, 0.5};
    const ProbeState p = make_probe(w);
    auto fisher_fd = [&](double eta) {
        const double h = 1e-5;
        const EvolvedEnsemble up = evolve(p, {eta + h, 0.0});
        const EvolvedEnsemble mid = evolve(p, {eta, 0.0});
        const EvolvedEnsemble down = evolve(p, {eta - h, 0.0});
        double total = 0.0;
        for (std::size_t l = 0; l < mid.blocks.size(); ++l) {
            const double dp = (up.blocks[l].probability - down.blocks[l].probability) / (2 * h);
            total += dp * dp / mid.blocks[l].probability;
        }
        return total;
    };
    EXPECT_NEAR(classical_fisher_p(p, 0.5).eta_eta, fisher_fd(0.5), 1e-6);
    EXPECT_DOUBLE_EQ(classical_fisher_p(noon(2), 0.5).eta_eta,
                     measured_fisher_phase_sld(noon(2), 0.5).eta_eta);
}

TEST(Fisher, PhaseIndependence) {
    std::mt19937_64 rng(24);
    for (int trial = 0; trial < 20; ++trial) {
        const int n = 2 + trial % 9;
        const ProbeState a = random_probe(n, rng, false);
        std::vector<double> phases(n + 1);
        std::uniform_real_distribution<double> angle(0, 6.28);
        for (double &ph : phases) {
            ph = angle(rng);
        }
        const auto w = a.weights();
        const ProbeState c = make_probe(w, phases);
        const double eta = 0.2 + 0.03 * trial;
        const FisherMatrix qa = qfi_matrix(a, eta);
        const FisherMatrix qc = qfi_matrix(c, eta);
        // Phases only touch the weights through polar round-off.
        EXPECT_LE(rel(qa.phi_phi, qc.phi_phi), 1e-14);
        EXPECT_LE(rel(qa.eta_eta, qc.eta_eta), 1e-14);
        EXPECT_LE(rel(measured_fisher_phase_sld(a, eta).eta_eta,
                      measured_fisher_phase_sld(c, eta).eta_eta),
                  1e-14);
        EXPECT_LE(std::abs(commutator_expectation(a, eta) - commutator_expectation(c, eta)),
                  1e-14 * std::abs(commutator_expectation(a, eta)));
    }
}

TEST(Fisher, CommutatorIsPositiveImaginary) {
    std::mt19937_64 rng(25);
    for (int trial = 0; trial < 20; ++trial) {
        const ProbeState p = random_probe(1 + trial % 8, rng);
        const double eta = 0.1 + 0.04 * trial;
        const Complex c = commutator_expectation(p, eta);
        EXPECT_EQ(c.real(), 0.0);
        EXPECT_GE(c.imag(), 0.0);
        EXPECT_NEAR(c.imag(), qfi_matrix(p, eta).phi_phi / eta, 1e-12 / eta);
    }
    const Complex c = commutator_expectation(noon(6), 0.5);
    EXPECT_DOUBLE_EQ(c.imag(), 2 * qfi_matrix(noon(6), 0.5).phi_phi);
}

TEST(Precision, CompositionAndMonotonicity) {
    const ProbeState hb = holland_burnett(6);
    const PrecisionSummary s = combined_uncertainty(hb, 0.5);
    ASSERT_TRUE(s.finite());
    const double ip = qfi_matrix(hb, 0.5).phi_phi;
    const double ie = measured_fisher_phase_sld(hb, 0.5).eta_eta;
    EXPECT_DOUBLE_EQ(s.delta_phi, 1 / std::sqrt(ip));
    EXPECT_DOUBLE_EQ(s.delta_eta, 1 / std::sqrt(ie));
    EXPECT_NEAR(s.delta_total * s.delta_total, 1 / ip + 1 / ie, 1e-15);
    double prev = INFINITY;
    for (double scale = 1.0; scale < 10.0; scale += 0.5) {
        const double d = precision_from(2.0 * scale, 3.0 * scale).delta_total;
        EXPECT_LT(d, prev);
        prev = d;
    }
    const PrecisionSummary none = precision_from(5.0, 0.0);
    EXPECT_FALSE(none.eta_informative);
    EXPECT_TRUE(std::isinf(none.delta_eta));
}

TEST(Fisher, RequiresPhotons) {
    const std::vector<double> w{1.0};
    const ProbeState vacuum = make_probe(w);
    EXPECT_THROW(qfi_matrix(vacuum, 0.5), DomainError);
}
