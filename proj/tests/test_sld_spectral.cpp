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
#include "phaseloss/oracle.hpp"
#include "phaseloss/probes.hpp"
#include "phaseloss/sld_spectral.hpp"
#include "support/reference.hpp"

using namespace phaseloss;
using phaseloss::testing::random_probe;
using phaseloss::testing::rel;

namespace {

Eigen::MatrixXcd projector(const ComplexVector &v) { return v * v.adjoint(); }

/// Random orthonormal basis of the full space.
std::vector<ComplexVector> random_basis(int dim, std::mt19937_64 &rng) {
    std::normal_distribution<double> g;
    Eigen::MatrixXcd m(dim, dim);
    for (int i = 0; i < dim; ++i) {
        for (int j = 0; j < dim; ++j) {
            m(i, j) = Complex(g(rng), g(rng));
        }
    }
    Eigen::HouseholderQR<Eigen::MatrixXcd> qr(m);
    const Eigen::MatrixXcd q = qr.householderQ();
    std::vector<ComplexVector> out;
    for (int j = 0; j < dim; ++j) {
        out.push_back(q.col(j));
    }
    return out;
}

}  // namespace

TEST(SldBlock, FockPhaseOperatorVanishes) {
    const EvolvedEnsemble e = evolve(fock_probe(5), {0.4, 0.3});
    for (int l = 0; l <= 5; ++l) {
        EXPECT_LE(sld_block(e, Parameter::phi, l).op.norm(), 1e-14);
    }
}

TEST(SldBlock, DefiningRelationOnBlock) {
    std::mt19937_64 rng(31);
    const ProbeState p = random_probe(3, rng);
    const double eta = 0.55;
    const double phi = 0.8;
    const EvolvedEnsemble e = evolve(p, {eta, phi});
    for (Parameter kappa : {Parameter::phi, Parameter::eta}) {
        for (int l = 0; l <= 3; ++l) {
            const auto &b = e.blocks[l];
            const Eigen::MatrixXcd rho = projector(b.psi);
            const Eigen::MatrixXcd L = sld_block(e, kappa, l).op;
            // d(p rho)/p = (d log p) rho + d rho
            const ComplexVector t = block_tangent(e, kappa, l);
            const double g = block_log_probability_derivative(e, kappa, l);
            const Eigen::MatrixXcd rhs =
                2.0 * (g * rho + t * b.psi.adjoint() + b.psi * t.adjoint());
            EXPECT_LE((L * rho + rho * L - rhs).norm(), 1e-9);
            EXPECT_LE((L - L.adjoint()).norm(), 1e-12);
            if (kappa == Parameter::eta) {
                EXPECT_NEAR((rho * L).trace().real(), g, 1e-10);
            }
        }
    }
}

TEST(SldEigenpairs, PhaseEigenvaluesAreSymmetric) {
    std::mt19937_64 rng(32);
    const ProbeState p = random_probe(6, rng);
    const EvolvedEnsemble e = evolve(p, {0.5, 0.0});
    const auto derivs = block_derivatives(e);
    for (const auto &pair : sld_eigenpairs(e, Parameter::phi)) {
        const double P = derivs[pair.loss]->p_phiphi;
        if (pair.degenerate) {
            continue;
        }
        EXPECT_NEAR(pair.lambda_plus, 2 * std::sqrt(P), 1e-12);
        EXPECT_NEAR(pair.lambda_minus, -2 * std::sqrt(P), 1e-12);
        EXPECT_NEAR(pair.lambda_plus * pair.lambda_minus, -4 * P, 1e-12);
    }
}

TEST(SldEigenpairs, MatchDenseSolver) {
    std::mt19937_64 rng(33);
    for (int trial = 0; trial < 20; ++trial) {
        const int n = 1 + trial % 8;
        const ProbeState p = random_probe(n, rng);
        const double eta = trial == 0 ? 0.6 : 0.1 + 0.04 * trial;
        const EvolvedEnsemble e = evolve(p, {eta, 0.2});
        for (Parameter kappa : {Parameter::phi, Parameter::eta}) {
            for (const auto &pair : sld_eigenpairs(e, kappa)) {
                const Eigen::MatrixXcd op = sld_block(e, kappa, pair.loss).op;
                Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> solver(op);
                const auto &ev = solver.eigenvalues();
                EXPECT_NEAR(pair.plus.norm(), 1.0, 1e-12);
                EXPECT_LE((op * pair.plus - pair.lambda_plus * pair.plus).norm(), 1e-9);
                if (pair.degenerate) {
                    continue;
                }
                EXPECT_LE(rel(pair.lambda_plus, ev(ev.size() - 1)), 1e-9);
                EXPECT_LE(rel(pair.lambda_minus, ev(0)), 1e-9);
                EXPECT_LE((op * pair.minus - pair.lambda_minus * pair.minus).norm(), 1e-9);
                EXPECT_LE(std::abs(pair.plus.dot(pair.minus)), 1e-12);
                // Rank-2 closure onto span{psi, Pi d psi}.
                const Eigen::MatrixXcd Q = projector(pair.plus) + projector(pair.minus);
                EXPECT_LE((Q * Q - Q).norm(), 1e-9);
                const ComplexVector &psi = e.blocks[pair.loss].psi;
                EXPECT_LE((Q * psi - psi).norm(), 1e-9);
                ComplexVector t = block_tangent(e, kappa, pair.loss);
                t -= psi * psi.dot(t);
                EXPECT_LE((Q * t - t).norm(), 1e-9 * std::max(1.0, t.norm()));
            }
        }
    }
}

TEST(SldEigenpairs, DegenerateBlocksFlagged) {
    // Fock probe: no phase spread and p_l independent of phi.
    const EvolvedEnsemble e = evolve(fock_probe(3), {0.5, 0.0});
    for (const auto &pair : sld_eigenpairs(e, Parameter::phi)) {
        EXPECT_TRUE(pair.degenerate);
        EXPECT_EQ(pair.lambda_plus, 0.0);
    }
}

TEST(Measurement, PhaseSldOutcomesSplitEvenly) {
    std::mt19937_64 rng(34);
    const ProbeState p = random_probe(5, rng);
    const EvolvedEnsemble e = evolve(p, {0.65, 0.4});
    const auto basis = sld_eigenbasis(e, Parameter::phi);
    const MeasurementDistribution d = measurement_distribution(e, basis);
    EXPECT_NEAR(d.total(), 1.0, 1e-12);
    // Outcomes come block by block, plus then minus, residual last.
    std::size_t i = 0;
    for (const auto &pair : sld_eigenpairs(e, Parameter::phi)) {
        const double pl = e.blocks[pair.loss].probability;
        if (pair.degenerate) {
            // Single-ket sector (l = n): the lone eigenvector carries p_l.
            EXPECT_NEAR(d.outcomes[i++].probability, pl, 1e-12);
            continue;
        }
        const double half = 0.5 * pl;
        EXPECT_NEAR(d.outcomes[i++].probability, half, 1e-12);
        EXPECT_NEAR(d.outcomes[i++].probability, half, 1e-12);
    }
    EXPECT_EQ(d.outcomes.back().label, "residual");
}

TEST(Measurement, LossSldStatisticsIgnorePhase) {
    std::mt19937_64 rng(35);
    const ProbeState p = random_probe(4, rng);
    const ChannelParams at{0.45, 0.7};
    const auto basis = sld_eigenbasis(evolve(p, at), Parameter::eta);
    const double h = 1e-5;
    const auto up = measurement_distribution(evolve(p, {at.eta, at.phi + h}), basis);
    const auto down = measurement_distribution(evolve(p, {at.eta, at.phi - h}), basis);
    for (std::size_t i = 0; i < up.outcomes.size(); ++i) {
        EXPECT_LE(std::abs(up.outcomes[i].probability - down.outcomes[i].probability) / (2 * h),
                  1e-8);
    }
}

TEST(Measurement, CountingBasisGivesMarginals) {
    std::mt19937_64 rng(36);
    const ProbeState p = random_probe(3, rng);
    const EvolvedEnsemble e = evolve(p, {0.3, 0.0});
    const FockBasis basis(3);
    std::vector<ComplexVector> kets;
    for (int i = 0; i < basis.dimension(); ++i) {
        kets.push_back(ComplexVector::Unit(basis.dimension(), i));
    }
    const auto d = measurement_distribution(e, kets);
    EXPECT_NEAR(d.total(), 1.0, 1e-12);
    EXPECT_NEAR(d.outcomes.back().probability, 0.0, 1e-12);
    // Photon count in the lossy arm after loss: marginal of ket (k - l).
    const auto x = p.weights();
    for (int a = 0; a <= 3; ++a) {
        double expected = 0.0;
        for (int k = a; k <= 3; ++k) {
            expected += x[k] * loss_coefficient(k, k - a, 0.3);
        }
        double got = 0.0;
        for (int k = a; k <= 3; ++k) {
            got += d.outcomes[basis.ket(a, 3 - k)].probability;
        }
        EXPECT_NEAR(got, expected, 1e-12);
    }
}

TEST(Measurement, RejectsNonOrthonormalSets) {
    const EvolvedEnsemble e = evolve(noon(2), {0.5, 0.0});
    const int dim = FockBasis(2).dimension();
    ComplexVector a = ComplexVector::Unit(dim, 0);
    ComplexVector b = (ComplexVector::Unit(dim, 0) + ComplexVector::Unit(dim, 1)).normalized();
    EXPECT_THROW(measurement_distribution(e, {a, b}), DomainError);
    EXPECT_THROW(measurement_distribution(e, {2.0 * a}), DomainError);
}

TEST(MeasurementFisher, PhaseSldBasisReachesMeasuredInformation) {
    std::mt19937_64 rng(37);
    for (int trial = 0; trial < 4; ++trial) {
        const ProbeState p = random_probe(2 + trial, rng);
        const ChannelParams at{0.35 + 0.1 * trial, 0.5};
        const auto mf = classical_fisher_of_measurement(
            p, at, sld_eigenbasis(evolve(p, at), Parameter::phi));
        const FisherMatrix expected = measured_fisher_phase_sld(p, at.eta);
        EXPECT_LE(rel(mf.fisher.phi_phi, expected.phi_phi), 1e-5);
        EXPECT_LE(rel(mf.fisher.eta_eta, expected.eta_eta), 1e-5);
        EXPECT_LE(std::abs(mf.fisher.phi_eta), 1e-5);
    }
}

TEST(MeasurementFisher, LossSldBasisReachesLossQfi) {
    std::mt19937_64 rng(38);
    for (int trial = 0; trial < 4; ++trial) {
        const ProbeState p = random_probe(2 + trial, rng);
        const ChannelParams at{0.3 + 0.12 * trial, 1.3};
        const auto mf = classical_fisher_of_measurement(
            p, at, sld_eigenbasis(evolve(p, at), Parameter::eta));
        EXPECT_LE(std::abs(mf.fisher.phi_phi), 1e-6);
        EXPECT_LE(rel(mf.fisher.eta_eta, qfi_matrix(p, at.eta).eta_eta), 1e-5);
    }
}

TEST(MeasurementFisher, NeverBeatsQuantumBound) {
    std::mt19937_64 rng(39);
    for (int trial = 0; trial < 5; ++trial) {
        const ProbeState p = random_probe(3, rng);
        const ChannelParams at{0.5, 0.3};
        const auto basis = random_basis(FockBasis(3).dimension(), rng);
        const auto mf = classical_fisher_of_measurement(p, at, basis);
        const FisherMatrix q = qfi_matrix(p, at.eta);
        EXPECT_LE(mf.fisher.phi_phi, q.phi_phi + 1e-5);
        EXPECT_LE(mf.fisher.eta_eta, q.eta_eta + 1e-5);
    }
}

TEST(MeasurementFisher, StepLeavingDomainIsReported) {
    const ProbeState p = noon(2);
    const ChannelParams at{1e-5, 0.0};
    EXPECT_THROW(classical_fisher_of_measurement(p, at, {ComplexVector::Unit(6, 0)}),
                 NumericalQualityError);
}

TEST(Sld, AssembledOperatorsSolveGlobalRelation) {
    std::mt19937_64 rng(40);
    const ProbeState p = random_probe(3, rng);
    const ChannelParams at{0.6, 0.25};
    const EvolvedEnsemble e = evolve(p, at);
    const FockBasis basis(3);
    const auto dense = oracle::density_matrix(p, at);
    for (Parameter kappa : {Parameter::phi, Parameter::eta}) {
        Eigen::MatrixXcd L = Eigen::MatrixXcd::Zero(basis.dimension(), basis.dimension());
        for (int l = 0; l <= 3; ++l) {
            L.block(basis.block_offset(l), basis.block_offset(l), basis.block_size(l),
                    basis.block_size(l)) = sld_block(e, kappa, l).op;
        }
        const Eigen::MatrixXcd drho = oracle::density_derivative(p, at, kappa);
        EXPECT_LE((L * dense.rho + dense.rho * L - 2.0 * drho).norm(), 1e-8);
        // Agreement with the oracle solution on the support of rho.
        const auto sol = oracle::numerical_sld(dense.rho, drho);
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(dense.rho);
        Eigen::MatrixXcd support = Eigen::MatrixXcd::Zero(basis.dimension(), basis.dimension());
        for (int i = 0; i < basis.dimension(); ++i) {
            if (es.eigenvalues()(i) > 1e-12) {
                support += es.eigenvectors().col(i) * es.eigenvectors().col(i).adjoint();
            }
        }
        EXPECT_LE((support * (L - sol.L) * support).norm(), 1e-8);
        const double info = (dense.rho * L * L).trace().real();
        const FisherMatrix q = qfi_matrix(p, at.eta);
        EXPECT_LE(rel(info, kappa == Parameter::phi ? q.phi_phi : q.eta_eta), 1e-8);
    }
}
