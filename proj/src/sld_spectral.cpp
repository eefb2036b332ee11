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

#include "phaseloss/sld_spectral.hpp"

#include <algorithm>
#include <cmath>

#include "phaseloss/config.hpp"
#include "phaseloss/errors.hpp"

namespace phaseloss {

namespace {

double projected_tangent_norm2(const BlockDerivatives &d, Parameter kappa) {
    return kappa == Parameter::phi ? d.p_phiphi : d.p_etaeta;
}

void check_orthonormal(const std::vector<ComplexVector> &projectors, int dim) {
    for (std::size_t a = 0; a < projectors.size(); ++a) {
        if (projectors[a].size() != dim) {
            throw DomainError("projector " + std::to_string(a) + " has dimension " +
                              std::to_string(projectors[a].size()) + ", expected " +
                              std::to_string(dim));
        }
        for (std::size_t b = a; b < projectors.size(); ++b) {
            const Complex overlap = projectors[a].dot(projectors[b]);
            const Complex expected = a == b ? 1.0 : 0.0;
            if (std::abs(overlap - expected) > kTolerances.orthonormality) {
                throw DomainError("projectors " + std::to_string(a) + " and " +
                                  std::to_string(b) + " are not orthonormal");
            }
        }
    }
}

std::vector<double> outcome_probabilities(const EvolvedEnsemble &ensemble,
                                          const std::vector<ComplexVector> &projectors) {
    const FockBasis basis(ensemble.n);
    std::vector<double> q(projectors.size() + 1, 0.0);
    double sum = 0.0;
    for (std::size_t a = 0; a < projectors.size(); ++a) {
        double value = 0.0;
        for (const auto &block : ensemble.blocks) {
            if (!block.occupied) {
                continue;
            }
            const Complex amp = projectors[a]
                                    .segment(basis.block_offset(block.loss), block.psi.size())
                                    .dot(block.psi);
            value += block.probability * std::norm(amp);
        }
        q[a] = value;
        sum += value;
    }
    q.back() = 1.0 - sum;
    return q;
}

}  // namespace

double MeasurementDistribution::total() const {
    double s = 0.0;
    for (const auto &o : outcomes) {
        s += o.probability;
    }
    return s;
}

SldBlock sld_block(const EvolvedEnsemble &ensemble, Parameter kappa, int loss) {
    const ComplexVector tangent = block_tangent(ensemble, kappa, loss);
    const double score = block_log_probability_derivative(ensemble, kappa, loss);
    const ComplexVector &psi = ensemble.blocks[static_cast<std::size_t>(loss)].psi;
    SldBlock out;
    out.loss = loss;
    out.kappa = kappa;
    out.op = score * psi * psi.adjoint() + 2.0 * tangent * psi.adjoint() +
             2.0 * psi * tangent.adjoint();
    return out;
}

std::vector<SldEigenpair> sld_eigenpairs(const EvolvedEnsemble &ensemble, Parameter kappa) {
    std::vector<SldEigenpair> pairs;
    for (const auto &block : ensemble.blocks) {
        if (!block.occupied) {
            continue;
        }
        const int l = block.loss;
        const BlockDerivatives d = block_derivatives(ensemble, l);
        const double score = block_log_probability_derivative(ensemble, kappa, l);
        const double P = projected_tangent_norm2(d, kappa);

        SldEigenpair e;
        e.loss = l;
        e.kappa = kappa;
        if (d.p_phiphi <= kTolerances.degenerate_variance) {
            e.degenerate = true;
            e.lambda_plus = score;
            e.lambda_minus = 0.0;
            e.plus = block.psi;
            pairs.push_back(std::move(e));
            continue;
        }
        const ComplexVector tangent = block_tangent(ensemble, kappa, l);
        const ComplexVector orth = tangent - block.psi * block.psi.dot(tangent);
        // lambda_+ lambda_- = -4P; take the large root first to avoid cancellation.
        const double root = std::sqrt(score * score + 16.0 * P);
        const double big = 0.5 * (score + std::copysign(root, score));
        const double small = -4.0 * P / big;
        e.lambda_plus = std::max(big, small);
        e.lambda_minus = std::min(big, small);
        const double onorm = orth.norm();
        auto eigvec = [&](double lambda) -> ComplexVector {
            ComplexVector v = lambda * block.psi + 2.0 * orth;
            return v / std::sqrt(lambda * lambda + 4.0 * onorm * onorm);
        };
        e.plus = eigvec(e.lambda_plus);
        e.minus = eigvec(e.lambda_minus);
        pairs.push_back(std::move(e));
    }
    return pairs;
}

std::vector<ComplexVector> sld_eigenbasis(const EvolvedEnsemble &ensemble, Parameter kappa) {
    const FockBasis basis(ensemble.n);
    std::vector<ComplexVector> vectors;
    for (const auto &e : sld_eigenpairs(ensemble, kappa)) {
        vectors.push_back(embed_block(basis, e.loss, e.plus));
        if (!e.degenerate) {
            vectors.push_back(embed_block(basis, e.loss, e.minus));
        }
    }
    return vectors;
}

MeasurementDistribution measurement_distribution(const EvolvedEnsemble &ensemble,
                                                 const std::vector<ComplexVector> &projectors) {
    check_orthonormal(projectors, FockBasis(ensemble.n).dimension());
    const std::vector<double> q = outcome_probabilities(ensemble, projectors);
    MeasurementDistribution dist;
    dist.outcomes.reserve(q.size());
    for (std::size_t a = 0; a + 1 < q.size(); ++a) {
        dist.outcomes.push_back({"projector_" + std::to_string(a), q[a]});
    }
    dist.outcomes.push_back({"residual", q.back()});
    return dist;
}

MeasurementFisher classical_fisher_of_measurement(const ProbeState &probe,
                                                  const ChannelParams &params0,
                                                  const std::vector<ComplexVector> &projectors) {
    require_open_eta(params0.eta);
    check_orthonormal(projectors, FockBasis(probe.photons()).dimension());
    const double h = kTolerances.measurement_fd_step;
    if (params0.eta - h <= 0.0 || params0.eta + h >= 1.0) {
        throw NumericalQualityError("finite-difference step leaves (0, 1) around eta = " +
                                    std::to_string(params0.eta));
    }

    const std::vector<double> q0 = outcome_probabilities(evolve(probe, params0), projectors);
    auto probabilities_at = [&](Parameter p, double shift) {
        ChannelParams shifted = params0;
        (p == Parameter::phi ? shifted.phi : shifted.eta) += shift;
        return outcome_probabilities(evolve(probe, shifted), projectors);
    };
    auto central = [&](Parameter p, double step) {
        const auto up = probabilities_at(p, step);
        const auto down = probabilities_at(p, -step);
        std::vector<double> d(up.size());
        for (std::size_t a = 0; a < d.size(); ++a) {
            d[a] = (up[a] - down[a]) / (2.0 * step);
        }
        return d;
    };

    MeasurementFisher out;
    std::array<std::vector<double>, 2> derivative;
    for (int which = 0; which < 2; ++which) {
        const Parameter p = which == 0 ? Parameter::phi : Parameter::eta;
        const auto coarse = central(p, h);
        const auto fine = central(p, h / 2.0);
        derivative[which].resize(coarse.size());
        for (std::size_t a = 0; a < coarse.size(); ++a) {
            const double refined = (4.0 * fine[a] - coarse[a]) / 3.0;
            derivative[which][a] = refined;
            if (q0[a] >= kTolerances.min_outcome_probability) {
                out.refinement_gap = std::max(out.refinement_gap,
                                              std::abs(refined - fine[a]) /
                                                  std::max(1.0, std::abs(refined)));
            }
        }
    }
    if (out.refinement_gap > 1e-3) {
        throw NumericalQualityError("Richardson refinement did not settle: gap " +
                                    std::to_string(out.refinement_gap));
    }

    for (std::size_t a = 0; a < q0.size(); ++a) {
        if (q0[a] < kTolerances.min_outcome_probability) {
            continue;
        }
        ++out.outcomes_used;
        const double dphi = derivative[0][a];
        const double deta = derivative[1][a];
        out.fisher.phi_phi += dphi * dphi / q0[a];
        out.fisher.eta_eta += deta * deta / q0[a];
        out.fisher.phi_eta += dphi * deta / q0[a];
    }
    return out;
}

}  // namespace phaseloss
