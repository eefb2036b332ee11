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

#include "phaseloss/oracle.hpp"

#include <cmath>
#include <string>

#include "phaseloss/config.hpp"
#include "phaseloss/errors.hpp"

namespace phaseloss::oracle {

namespace {

constexpr Complex kI{0.0, 1.0};

void require_budget(int n) {
    if (n > kTolerances.dense_photon_budget) {
        throw SizeError("dense oracle limited to n <= " +
                        std::to_string(kTolerances.dense_photon_budget) + ", got n = " +
                        std::to_string(n));
    }
}

/// Columns indexed by the photon count l left in the loss mode.
Eigen::MatrixXcd dilated_state(const ProbeState &probe, const ChannelParams &params,
                               ChannelOrder order) {
    const int n = probe.photons();
    const FockBasis basis(n);
    Eigen::MatrixXcd psi = Eigen::MatrixXcd::Zero(basis.dimension(), n + 1);
    const auto &alpha = probe.amplitudes();
    for (int k = 0; k <= n; ++k) {
        for (int l = 0; l <= k; ++l) {
            const int photons_in_arm = order == ChannelOrder::phase_then_loss ? k : k - l;
            psi(basis.ket(k - l, n - k), l) =
                alpha[static_cast<std::size_t>(k)] * std::sqrt(loss_coefficient(k, l, params.eta)) *
                std::polar(1.0, static_cast<double>(photons_in_arm) * params.phi);
        }
    }
    return psi;
}

}  // namespace

DenseState density_matrix(const ProbeState &probe, const ChannelParams &params,
                          ChannelOrder order) {
    require_budget(probe.photons());
    const Eigen::MatrixXcd psi = dilated_state(probe, params, order);
    DenseState state;
    state.basis = FockBasis(probe.photons());
    state.rho = psi * psi.adjoint();
    return state;
}

Eigen::MatrixXcd density_derivative(const ProbeState &probe, const ChannelParams &params,
                                    Parameter which) {
    require_budget(probe.photons());
    if (which == Parameter::eta) {
        require_open_eta(params.eta);
    }
    const int n = probe.photons();
    const FockBasis basis(n);
    const Eigen::MatrixXcd psi = dilated_state(probe, params, ChannelOrder::phase_then_loss);
    Eigen::MatrixXcd dpsi = Eigen::MatrixXcd::Zero(psi.rows(), psi.cols());
    const double eta = params.eta;
    for (int k = 0; k <= n; ++k) {
        for (int l = 0; l <= k; ++l) {
            const int row = basis.ket(k - l, n - k);
            const double factor =
                which == Parameter::phi
                    ? 0.0
                    : 0.5 * (static_cast<double>(k) / eta -
                             static_cast<double>(l) / (eta * (1.0 - eta)));
            dpsi(row, l) = which == Parameter::phi ? kI * static_cast<double>(k) * psi(row, l)
                                                   : factor * psi(row, l);
        }
    }
    return dpsi * psi.adjoint() + psi * dpsi.adjoint();
}

Eigen::MatrixXcd density_derivative_fd(const ProbeState &probe, const ChannelParams &params,
                                       Parameter which) {
    require_open_eta(params.eta);
    auto central = [&](double h) -> Eigen::MatrixXcd {
        ChannelParams up = params;
        ChannelParams down = params;
        (which == Parameter::phi ? up.phi : up.eta) += h;
        (which == Parameter::phi ? down.phi : down.eta) -= h;
        if (which == Parameter::eta && (down.eta <= 0.0 || up.eta >= 1.0)) {
            throw NumericalQualityError("finite-difference step leaves (0, 1)");
        }
        return (density_matrix(probe, up).rho - density_matrix(probe, down).rho) / (2.0 * h);
    };
    constexpr double coarse = 1e-4;
    constexpr double fine = 1e-5;
    constexpr double ratio2 = (coarse / fine) * (coarse / fine);
    return (ratio2 * central(fine) - central(coarse)) / (ratio2 - 1.0);
}

SldSolution numerical_sld(const Eigen::MatrixXcd &rho, const Eigen::MatrixXcd &drho) {
    if (rho.rows() != rho.cols() || drho.rows() != rho.rows() || drho.cols() != rho.cols()) {
        throw DomainError("rho and its derivative must be square and of equal size");
    }
    if ((drho - drho.adjoint()).cwiseAbs().maxCoeff() > 1e-10 * std::max(1.0, drho.norm())) {
        throw DomainError("density derivative is not Hermitian");
    }
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> eig(rho);
    const Eigen::VectorXd &lambda = eig.eigenvalues();
    const Eigen::MatrixXcd &V = eig.eigenvectors();
    const Eigen::MatrixXcd D = V.adjoint() * drho * V;
    Eigen::MatrixXcd Lprime = Eigen::MatrixXcd::Zero(rho.rows(), rho.cols());
    for (Eigen::Index i = 0; i < rho.rows(); ++i) {
        for (Eigen::Index j = 0; j < rho.cols(); ++j) {
            const double denom = lambda[i] + lambda[j];
            if (denom > kTolerances.sld_eigen_cutoff) {
                Lprime(i, j) = 2.0 * D(i, j) / denom;
            }
        }
    }
    SldSolution out;
    out.L = V * Lprime * V.adjoint();
    out.residual = (out.L * rho + rho * out.L - 2.0 * drho).norm();
    if (out.residual > 1e-6 * std::max(1.0, drho.norm())) {
        throw NumericalQualityError("SLD residual " + std::to_string(out.residual) +
                                    " exceeds tolerance");
    }
    return out;
}

OracleFisher numerical_qfi(const ProbeState &probe, const ChannelParams &params,
                           DerivativeSource source) {
    require_open_eta(params.eta);
    const DenseState state = density_matrix(probe, params);
    auto derivative = [&](Parameter which) {
        return source == DerivativeSource::analytic ? density_derivative(probe, params, which)
                                                    : density_derivative_fd(probe, params, which);
    };
    const SldSolution phi = numerical_sld(state.rho, derivative(Parameter::phi));
    const SldSolution eta = numerical_sld(state.rho, derivative(Parameter::eta));

    OracleFisher out;
    out.L_phi = phi.L;
    out.L_eta = eta.L;
    out.max_residual = std::max(phi.residual, eta.residual);
    const Eigen::MatrixXcd *L[2] = {&out.L_phi, &out.L_eta};
    for (int a = 0; a < 2; ++a) {
        for (int b = 0; b < 2; ++b) {
            const Eigen::MatrixXcd sym = 0.5 * (*L[a] * *L[b] + *L[b] * *L[a]);
            out.matrix(a, b) = (state.rho * sym).trace().real();
        }
    }
    out.commutator = (state.rho * (out.L_eta * out.L_phi - out.L_phi * out.L_eta)).trace();
    return out;
}

Eigen::MatrixXcd assemble_blocks(const EvolvedEnsemble &ensemble) {
    const FockBasis basis(ensemble.n);
    Eigen::MatrixXcd rho = Eigen::MatrixXcd::Zero(basis.dimension(), basis.dimension());
    for (const auto &block : ensemble.blocks) {
        if (!block.occupied) {
            continue;
        }
        const ComplexVector v = embed_block(basis, block.loss, block.psi);
        rho += block.probability * v * v.adjoint();
    }
    return rho;
}

}  // namespace phaseloss::oracle
