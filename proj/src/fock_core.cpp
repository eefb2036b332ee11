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

#include "phaseloss/fock_core.hpp"

#include <cmath>
#include <numeric>
#include <string>

#include "phaseloss/config.hpp"
#include "phaseloss/errors.hpp"

namespace phaseloss {

namespace {

constexpr Complex kI{0.0, 1.0};

struct SectorStats {
    double mean = 0.0;
    double variance = 0.0;
};

SectorStats sector_stats(const LossBlock &block) {
    // Offsets are taken from the first populated index so a single-term block has
    // exactly zero variance.
    SectorStats s;
    Eigen::Index ref = 0;
    while (ref + 1 < block.psi.size() && block.psi[ref] == Complex(0.0)) {
        ++ref;
    }
    double shift = 0.0;
    for (Eigen::Index j = ref + 1; j < block.psi.size(); ++j) {
        shift += std::norm(block.psi[j]) * static_cast<double>(j - ref);
    }
    s.mean = static_cast<double>(ref + block.loss) + shift;
    for (Eigen::Index j = 0; j < block.psi.size(); ++j) {
        const double d = static_cast<double>(j + block.loss) - s.mean;
        s.variance += std::norm(block.psi[j]) * d * d;
    }
    return s;
}

const LossBlock &occupied_block(const EvolvedEnsemble &ensemble, int loss) {
    if (loss < 0 || loss > ensemble.n) {
        throw DomainError("block index " + std::to_string(loss) + " outside 0.." +
                          std::to_string(ensemble.n));
    }
    const LossBlock &block = ensemble.blocks[static_cast<std::size_t>(loss)];
    if (!block.occupied) {
        throw DomainError("block " + std::to_string(loss) + " is degenerate (p_l = 0)");
    }
    return block;
}

}  // namespace

ProbeState::ProbeState(std::vector<Complex> amplitudes) : amplitudes_(std::move(amplitudes)) {
    if (amplitudes_.empty()) {
        throw DomainError("probe needs at least one amplitude");
    }
    double norm = 0.0;
    for (const auto &a : amplitudes_) {
        norm += std::norm(a);
    }
    if (std::abs(norm - 1.0) > kTolerances.normalization) {
        throw DomainError("probe amplitudes not normalized: sum |alpha_k|^2 = " +
                          std::to_string(norm));
    }
}

std::vector<double> ProbeState::weights() const {
    std::vector<double> x(amplitudes_.size());
    for (std::size_t k = 0; k < x.size(); ++k) {
        x[k] = std::norm(amplitudes_[k]);
    }
    return x;
}

ProbeState make_probe(std::span<const double> weights, std::span<const double> phases) {
    if (weights.empty()) {
        throw DomainError("empty weight vector");
    }
    if (!phases.empty() && phases.size() != weights.size()) {
        throw DomainError("phase vector length " + std::to_string(phases.size()) +
                          " does not match weight length " + std::to_string(weights.size()));
    }
    double total = 0.0;
    for (std::size_t k = 0; k < weights.size(); ++k) {
        if (!(weights[k] >= 0.0) || !std::isfinite(weights[k])) {
            throw DomainError("weight at index " + std::to_string(k) +
                              " is negative or not finite");
        }
        total += weights[k];
    }
    if (total <= 0.0) {
        throw DomainError("weights sum to zero");
    }
    std::vector<Complex> amplitudes(weights.size());
    for (std::size_t k = 0; k < weights.size(); ++k) {
        const double phase = phases.empty() ? 0.0 : phases[k];
        amplitudes[k] = std::polar(std::sqrt(weights[k] / total), phase);
    }
    // Rounding in the square roots can leave the norm a few ulps off.
    double norm = 0.0;
    for (const auto &a : amplitudes) {
        norm += std::norm(a);
    }
    const double scale = 1.0 / std::sqrt(norm);
    for (auto &a : amplitudes) {
        a *= scale;
    }
    return ProbeState(std::move(amplitudes));
}

void require_open_eta(double eta) {
    if (!(eta > 0.0 && eta < 1.0)) {
        throw DivergenceError("I_etaeta diverges: eta must lie strictly inside (0, 1), got " +
                              std::to_string(eta));
    }
}

double loss_coefficient(int k, int l, double eta) {
    if (l < 0 || l > k) {
        throw DomainError("loss coefficient needs 0 <= l <= k, got k=" + std::to_string(k) +
                          ", l=" + std::to_string(l));
    }
    if (!(eta >= 0.0 && eta <= 1.0)) {
        throw DomainError("transmissivity outside [0, 1]: " + std::to_string(eta));
    }
    if (eta == 1.0) {
        return l == 0 ? 1.0 : 0.0;
    }
    if (eta == 0.0) {
        return l == k ? 1.0 : 0.0;
    }
    double binom = 1.0;
    for (int i = 1; i <= l; ++i) {
        binom = binom * static_cast<double>(k - l + i) / static_cast<double>(i);
    }
    return binom * std::exp(static_cast<double>(k - l) * std::log(eta) +
                            static_cast<double>(l) * std::log1p(-eta));
}

LossKernel::LossKernel(int n, double eta)
    : n_(n), eta_(eta), table_(static_cast<std::size_t>(n + 1) * static_cast<std::size_t>(n + 1)) {
    if (n < 0) {
        throw DomainError("negative photon number");
    }
    if (!(eta >= 0.0 && eta <= 1.0)) {
        throw DomainError("transmissivity outside [0, 1]: " + std::to_string(eta));
    }
    if (eta == 0.0 || eta == 1.0) {
        for (int k = 0; k <= n; ++k) {
            table_[index(k, eta == 1.0 ? 0 : k)] = 1.0;
        }
        return;
    }
    const double log_eta = std::log(eta);
    const double log_loss = std::log1p(-eta);
    for (int k = 0; k <= n; ++k) {
        double binom = 1.0;
        for (int l = 0; l <= k; ++l) {
            if (l > 0) {
                binom = binom * static_cast<double>(k - l + 1) / static_cast<double>(l);
            }
            table_[index(k, l)] = binom * std::exp(static_cast<double>(k - l) * log_eta +
                                                   static_cast<double>(l) * log_loss);
        }
    }
}

EvolvedEnsemble evolve(const ProbeState &probe, const ChannelParams &params) {
    require_open_eta(params.eta);
    const int n = probe.photons();
    const LossKernel kernel(n, params.eta);
    const auto &alpha = probe.amplitudes();

    EvolvedEnsemble out;
    out.n = n;
    out.eta = params.eta;
    out.phi = params.phi;
    out.blocks.resize(static_cast<std::size_t>(n + 1));
    for (int l = 0; l <= n; ++l) {
        LossBlock &block = out.blocks[static_cast<std::size_t>(l)];
        block.loss = l;
        block.psi = ComplexVector::Zero(n - l + 1);
        double p = 0.0;
        for (int k = l; k <= n; ++k) {
            const double b = kernel(k, l);
            p += std::norm(alpha[static_cast<std::size_t>(k)]) * b;
            block.psi[k - l] = alpha[static_cast<std::size_t>(k)] * std::sqrt(b) *
                               std::polar(1.0, static_cast<double>(k) * params.phi);
        }
        block.probability = p;
        block.occupied = p > 0.0;
        if (block.occupied) {
            block.psi /= std::sqrt(p);
        }
    }
    return out;
}

MomentTable moments(std::span<const double> weights, const LossKernel &kernel) {
    const int n = kernel.photons();
    if (static_cast<int>(weights.size()) != n + 1) {
        throw DomainError("weight vector length does not match kernel photon number");
    }
    MomentTable table;
    table.xi.assign(static_cast<std::size_t>(n + 1), {0.0, 0.0, 0.0});
    for (int k = 0; k <= n; ++k) {
        const double x = weights[static_cast<std::size_t>(k)];
        const double kk = static_cast<double>(k);
        table.Xi[0] += x;
        table.Xi[1] += x * kk;
        table.Xi[2] += x * kk * kk;
        if (x == 0.0) {
            continue;
        }
        for (int l = 0; l <= k; ++l) {
            const double w = x * kernel(k, l);
            auto &row = table.xi[static_cast<std::size_t>(l)];
            row[0] += w;
            row[1] += w * kk;
            row[2] += w * kk * kk;
        }
    }
    return table;
}

MomentTable moments(const ProbeState &probe, double eta) {
    require_open_eta(eta);
    const auto x = probe.weights();
    return moments(x, LossKernel(probe.photons(), eta));
}

BlockSpread block_spread(std::span<const double> weights, const LossKernel &kernel) {
    const int n = kernel.photons();
    BlockSpread s;
    s.probability.assign(static_cast<std::size_t>(n + 1), 0.0);
    s.mean.assign(static_cast<std::size_t>(n + 1), 0.0);
    s.variance.assign(static_cast<std::size_t>(n + 1), 0.0);
    for (int l = 0; l <= n; ++l) {
        double p = 0.0;
        double first = 0.0;
        int ref = -1;
        for (int k = l; k <= n; ++k) {
            const double w = weights[static_cast<std::size_t>(k)] * kernel(k, l);
            if (w == 0.0) {
                continue;
            }
            if (ref < 0) {
                ref = k;
            }
            p += w;
            first += w * static_cast<double>(k - ref);
        }
        if (p <= 0.0) {
            continue;
        }
        const double mean = static_cast<double>(ref) + first / p;
        double var = 0.0;
        for (int k = l; k <= n; ++k) {
            const double d = static_cast<double>(k) - mean;
            var += weights[static_cast<std::size_t>(k)] * kernel(k, l) * d * d;
        }
        s.probability[static_cast<std::size_t>(l)] = p;
        s.mean[static_cast<std::size_t>(l)] = mean;
        s.variance[static_cast<std::size_t>(l)] = var / p;
    }
    return s;
}

BlockDerivatives block_derivatives(const EvolvedEnsemble &ensemble, int loss) {
    const LossBlock &block = occupied_block(ensemble, loss);
    const SectorStats s = sector_stats(block);
    const double eta = ensemble.eta;
    BlockDerivatives d;
    d.loss = loss;
    d.psi_dphi = kI * s.mean;
    d.psi_deta = 0.0;
    d.p_phiphi = s.variance;
    d.p_etaeta = s.variance / (4.0 * eta * eta);
    d.p_phieta = -kI * s.variance / (2.0 * eta);
    return d;
}

std::vector<std::optional<BlockDerivatives>> block_derivatives(const EvolvedEnsemble &ensemble) {
    std::vector<std::optional<BlockDerivatives>> out(ensemble.blocks.size());
    for (const auto &block : ensemble.blocks) {
        if (block.occupied) {
            out[static_cast<std::size_t>(block.loss)] = block_derivatives(ensemble, block.loss);
        }
    }
    return out;
}

ComplexVector block_tangent(const EvolvedEnsemble &ensemble, Parameter kappa, int loss) {
    const LossBlock &block = occupied_block(ensemble, loss);
    ComplexVector tangent(block.psi.size());
    if (kappa == Parameter::phi) {
        for (Eigen::Index j = 0; j < block.psi.size(); ++j) {
            tangent[j] = kI * static_cast<double>(j + loss) * block.psi[j];
        }
        return tangent;
    }
    const double mean = sector_stats(block).mean;
    for (Eigen::Index j = 0; j < block.psi.size(); ++j) {
        tangent[j] = block.psi[j] * (static_cast<double>(j + loss) - mean) / (2.0 * ensemble.eta);
    }
    return tangent;
}

double block_log_probability_derivative(const EvolvedEnsemble &ensemble, Parameter kappa,
                                        int loss) {
    const LossBlock &block = occupied_block(ensemble, loss);
    if (kappa == Parameter::phi) {
        return 0.0;
    }
    const double eta = ensemble.eta;
    return sector_stats(block).mean / eta - static_cast<double>(loss) / (eta * (1.0 - eta));
}

FockBasis::FockBasis(int n) : n_(n), dim_(0), offsets_(static_cast<std::size_t>(n + 1)) {
    if (n < 0) {
        throw DomainError("negative photon number");
    }
    for (int l = 0; l <= n; ++l) {
        offsets_[static_cast<std::size_t>(l)] = dim_;
        dim_ += n - l + 1;
    }
}

ComplexVector embed_block(const FockBasis &basis, int loss, const ComplexVector &local) {
    if (local.size() != basis.block_size(loss)) {
        throw DomainError("local vector size does not match block " + std::to_string(loss));
    }
    ComplexVector global = ComplexVector::Zero(basis.dimension());
    global.segment(basis.block_offset(loss), local.size()) = local;
    return global;
}

}  // namespace phaseloss
