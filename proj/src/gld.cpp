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

#include "phaseloss/gld.hpp"

#include <cmath>
#include <limits>
#include <string>

#include "phaseloss/config.hpp"
#include "phaseloss/errors.hpp"
#include "phaseloss/fisher.hpp"

namespace phaseloss {

namespace {

void require_positive_masses(const GldWeights &w) {
    if (!(w.m0 > 0.0 && w.m1 > 0.0)) {
        throw DomainError("logarithmic-derivative masses must be positive, got M0=" +
                          std::to_string(w.m0) + ", M1=" + std::to_string(w.m1));
    }
    if (w.m0 > 1.0 || w.m1 > 1.0 || w.m0 + w.m1 > 1.0 + 1e-12) {
        throw DomainError("logarithmic-derivative masses must satisfy M0 + M1 <= 1");
    }
}

constexpr Complex kI{0.0, 1.0};

}  // namespace

GldFisherMatrix gld_fisher(const ProbeState &probe, double eta, const GldWeights &w) {
    require_positive_masses(w);
    const FisherMatrix classical = classical_fisher_p(probe, eta);
    const EvolvedEnsemble ensemble = evolve(probe, {eta, 0.0});

    GldFisherMatrix I = GldFisherMatrix::Zero();
    I(0, 0) = classical.phi_phi;
    I(1, 1) = classical.eta_eta;
    I(0, 1) = classical.phi_eta;
    I(1, 0) = classical.phi_eta;
    for (const auto &d : block_derivatives(ensemble)) {
        if (!d) {
            continue;
        }
        const double p = ensemble.blocks[static_cast<std::size_t>(d->loss)].probability;
        Eigen::Matrix2cd P;
        P << d->p_phiphi, d->p_phieta, std::conj(d->p_phieta), d->p_etaeta;
        // P_{l,mu nu} / M0 + P_{l,nu mu} / M1
        I += p * (P / w.m0 + P.transpose() / w.m1);
    }
    return I;
}

GldFisherMatrix gld_fisher_closed_form(const ProbeState &probe, double eta,
                                       const GldWeights &w) {
    require_positive_masses(w);
    const FisherMatrix q = qfi_matrix(probe, eta);
    const FisherMatrix classical = classical_fisher_p(probe, eta);
    const double scale = q.phi_phi / (16.0 * eta * eta * w.m0 * w.m1);
    const double sum = w.m0 + w.m1;
    GldFisherMatrix I;
    I << 4.0 * eta * eta * sum, 2.0 * kI * eta * (w.m0 - w.m1),
        2.0 * kI * eta * (w.m1 - w.m0), sum;
    I *= scale;
    I(1, 1) += classical.eta_eta;
    return I;
}

ScalarBound scalarized_bound(const ProbeState &probe, double eta, const GldWeights &w,
                             const Eigen::Vector2d &u) {
    if (u.norm() == 0.0) {
        throw DomainError("scalarization direction must be non-zero");
    }
    const GldFisherMatrix I = gld_fisher(probe, eta, w);
    const Complex det = I.determinant();
    const Eigen::Vector2cd uc = u.cast<Complex>();
    ScalarBound out;
    if (std::abs(det) > kTolerances.singular_determinant) {
        const GldFisherMatrix inv = I.inverse();
        const Complex form = uc.dot(inv * uc);
        if (std::abs(form.imag()) > 1e-9 * std::max(1.0, std::abs(form.real()))) {
            throw NumericalQualityError("quadratic form of a Hermitian inverse is not real");
        }
        out.value = u.dot(inv.real() * u);
        return out;
    }
    out.singular = true;
    Eigen::SelfAdjointEigenSolver<Eigen::Matrix2cd> eig(I);
    const double top = std::max(1.0, eig.eigenvalues().cwiseAbs().maxCoeff());
    double value = 0.0;
    for (int i = 0; i < 2; ++i) {
        const double lambda = eig.eigenvalues()[i];
        const Complex component = eig.eigenvectors().col(i).dot(uc);
        if (std::abs(lambda) <= 1e-12 * top) {
            if (std::abs(component) > 1e-12 * u.norm()) {
                out.value = std::numeric_limits<double>::infinity();
                return out;
            }
            continue;
        }
        value += std::norm(component) / lambda;
    }
    out.value = value;
    return out;
}

SldOptimalityReport verify_sld_optimal(const ProbeState &probe, double eta, int resolution,
                                       std::span<const Eigen::Vector2d> directions) {
    if (resolution < 5) {
        throw DomainError("grid resolution must be at least 5 per axis");
    }
    if (directions.size() < 3) {
        throw DomainError("need at least 3 scalarization directions");
    }
    SldOptimalityReport report;
    report.resolution = resolution;
    report.cell = 1.0 / static_cast<double>(resolution - 1);
    report.pass = true;

    for (const auto &u : directions) {
        DirectionReport d;
        d.u = u;
        d.bound_at_sld = scalarized_bound(probe, eta, {0.5, 0.5}, u).value;
        double best = -std::numeric_limits<double>::infinity();
        double worst = std::numeric_limits<double>::infinity();
        double best_distance = std::numeric_limits<double>::infinity();
        for (int i = 1; i < resolution; ++i) {
            for (int j = 1; j < resolution; ++j) {
                const double m0 = i * report.cell;
                const double m1 = j * report.cell;
                if (m0 + m1 > 1.0 + 1e-12) {
                    continue;
                }
                const double v = scalarized_bound(probe, eta, {m0, std::min(m1, 1.0 - m0)}, u).value;
                worst = std::min(worst, v);
                const double distance = std::hypot(m0 - 0.5, m1 - 0.5);
                const double tie = 1e-12 * std::max(1.0, std::abs(v));
                if (v > best + tie || (std::abs(v - best) <= tie && distance < best_distance)) {
                    best = std::max(best, v);
                    best_distance = distance;
                    d.argmax_m0 = m0;
                    d.argmax_m1 = m1;
                }
            }
        }
        d.grid_max = best;
        if (std::isinf(best) && std::isinf(worst)) {
            d.flat = true;
            d.margin = 0.0;
        } else {
            d.flat = best - worst <= 1e-12 * std::max(1.0, std::abs(best));
            d.margin = d.bound_at_sld - best;
        }
        const double slack = 1e-12 * std::max(1.0, std::abs(best));
        const bool near_sld = std::abs(d.argmax_m0 - 0.5) <= report.cell + 1e-12 &&
                              std::abs(d.argmax_m1 - 0.5) <= report.cell + 1e-12;
        d.pass = d.flat || (near_sld && d.margin >= -slack);
        report.pass = report.pass && d.pass;
        report.directions.push_back(d);
    }
    return report;
}

}  // namespace phaseloss
