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
 * Fixed-photon-number two-mode probes and the loss + phase channel acting on
 * the first mode. The evolved state splits into orthogonal sectors labelled by
 * the number of photons lost; every closed form in this library reduces to the
 * weighted moments of the probe weights within those sectors.
 */
#pragma once

#include <array>
#include <complex>
#include <optional>
#include <span>
#include <vector>

#include <Eigen/Dense>

namespace phaseloss {

using Complex = std::complex<double>;
using ComplexVector = Eigen::VectorXcd;

enum class Parameter { phi, eta };

/**
 * @brief Pure state sum_k alpha_k |k, n-k>, with k photons in the lossy arm.
 *
 * Construction checks normalization; the amplitude vector has length n + 1.
 */
class ProbeState {
  public:
    explicit ProbeState(std::vector<Complex> amplitudes);

    [[nodiscard]] int photons() const { return static_cast<int>(amplitudes_.size()) - 1; }
    [[nodiscard]] const std::vector<Complex> &amplitudes() const { return amplitudes_; }
    [[nodiscard]] double weight(int k) const { return std::norm(amplitudes_.at(k)); }
    /// x_k = |alpha_k|^2.
    [[nodiscard]] std::vector<double> weights() const;

  private:
    std::vector<Complex> amplitudes_;
};

/// Builds a probe from non-negative weights (renormalized) and optional phases.
ProbeState make_probe(std::span<const double> weights, std::span<const double> phases = {});

struct ChannelParams {
    double eta = 0.5;
    double phi = 0.0;
};

/// Throws DomainError unless 0 < eta < 1.
void require_open_eta(double eta);

/// C(k, l) eta^(k-l) (1-eta)^l. Endpoints eta = 0, 1 are allowed.
double loss_coefficient(int k, int l, double eta);

/**
 * @brief Table of loss coefficients b_l^k for k, l = 0..n at a fixed eta.
 *
 * Binomials are built by multiplicative recurrence so the table stays finite
 * up to a few hundred photons.
 */
class LossKernel {
  public:
    LossKernel(int n, double eta);

    [[nodiscard]] int photons() const { return n_; }
    [[nodiscard]] double eta() const { return eta_; }
    /// b_l^k, zero for l > k.
    [[nodiscard]] double operator()(int k, int l) const { return table_[index(k, l)]; }

  private:
    [[nodiscard]] std::size_t index(int k, int l) const {
        return static_cast<std::size_t>(k) * static_cast<std::size_t>(n_ + 1) +
               static_cast<std::size_t>(l);
    }
    int n_;
    double eta_;
    std::vector<double> table_;
};

/// Pure sector reached after losing `loss` photons.
struct LossBlock {
    int loss = 0;
    double probability = 0.0;
    /// False when the sector carries no weight; such blocks are skipped everywhere.
    bool occupied = false;
    /// Coefficients on |k - loss, n - k>, k = loss..n (local index k - loss).
    ComplexVector psi;
};

struct EvolvedEnsemble {
    int n = 0;
    double eta = 0.0;
    double phi = 0.0;
    std::vector<LossBlock> blocks;
};

EvolvedEnsemble evolve(const ProbeState &probe, const ChannelParams &params);

/// xi[l][r] = sum_{k>=l} x_k b_l^k k^r and Xi[r] = sum_k x_k k^r, r = 0, 1, 2.
struct MomentTable {
    std::vector<std::array<double, 3>> xi;
    std::array<double, 3> Xi{};
};

MomentTable moments(std::span<const double> weights, const LossKernel &kernel);
MomentTable moments(const ProbeState &probe, double eta);

/// Per-sector probability, mean and variance of k under x_k b_l^k / p_l.
struct BlockSpread {
    std::vector<double> probability;
    std::vector<double> mean;
    std::vector<double> variance;
};

/// Two-pass evaluation; avoids the xi_2 xi_0 - xi_1^2 cancellation.
BlockSpread block_spread(std::span<const double> weights, const LossKernel &kernel);

/// Closed-form inner products of a sector state and its parameter derivatives.
struct BlockDerivatives {
    int loss = 0;
    /// <psi_l | d_phi psi_l>, purely imaginary.
    Complex psi_dphi;
    /// <psi_l | d_eta psi_l>, identically zero.
    Complex psi_deta;
    double p_phiphi = 0.0;
    double p_etaeta = 0.0;
    /// <d_phi psi | Pi | d_eta psi>.
    Complex p_phieta;
};

/// Throws DomainError for a degenerate block.
BlockDerivatives block_derivatives(const EvolvedEnsemble &ensemble, int loss);
/// One entry per block; empty for degenerate blocks.
std::vector<std::optional<BlockDerivatives>> block_derivatives(const EvolvedEnsemble &ensemble);

/// Analytic d_kappa psi_l on the block's local basis. Throws for degenerate blocks.
ComplexVector block_tangent(const EvolvedEnsemble &ensemble, Parameter kappa, int loss);
/// d_kappa log p_l; zero for phi.
double block_log_probability_derivative(const EvolvedEnsemble &ensemble, Parameter kappa,
                                        int loss);

/**
 * @brief Indexing of the post-loss Hilbert space: all |a, b> with a + b <= n.
 *
 * Sector l holds the n - l + 1 kets with a + b = n - l, ordered by a.
 */
class FockBasis {
  public:
    explicit FockBasis(int n);

    [[nodiscard]] int photons() const { return n_; }
    [[nodiscard]] int dimension() const { return dim_; }
    [[nodiscard]] int block_size(int loss) const { return n_ - loss + 1; }
    [[nodiscard]] int block_offset(int loss) const { return offsets_.at(loss); }
    /// Global index of local entry j of sector l, i.e. the ket |j, n - l - j>.
    [[nodiscard]] int index(int loss, int local) const { return offsets_.at(loss) + local; }
    /// Global index of |a, b>.
    [[nodiscard]] int ket(int a, int b) const { return index(n_ - a - b, a); }

  private:
    int n_;
    int dim_;
    std::vector<int> offsets_;
};

/// Zero-padded copy of a sector-local vector in the global basis.
ComplexVector embed_block(const FockBasis &basis, int loss, const ComplexVector &local);

}  // namespace phaseloss
