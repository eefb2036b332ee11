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

#include <complex>
#include <vector>

#include "phaseloss/fock_core.hpp"

namespace phaseloss {

/// n photons over two modes, amplitude k on |k, n-k>.
struct TwoModeState {
    std::vector<Complex> amplitudes;

    [[nodiscard]] int photons() const { return static_cast<int>(amplitudes.size()) - 1; }
    [[nodiscard]] double norm() const;
};

/// Equal superposition of |n,0> and |0,n>.
ProbeState noon(int n);
/// All n photons in the lossy arm, |n,0>.
ProbeState fock_probe(int n);
ProbeState uniform(int n);

/**
 * @brief Two-mode beamsplitter in the Fock basis.
 *
 * a^dag -> sqrt(T) a^dag + sqrt(1-T) b^dag, b^dag -> -sqrt(1-T) a^dag + sqrt(T) b^dag.
 * Matrix elements are explicit binomial sums evaluated in extended precision,
 * which keeps the alternating sums accurate to a few hundred photons.
 */
TwoModeState beamsplitter_transform(const TwoModeState &state, double transmissivity);

/// Twin-Fock |n/2, n/2> through a 50:50 beamsplitter; n even, n >= 2.
ProbeState holland_burnett(int n);

ProbeState to_probe(const TwoModeState &state);

}  // namespace phaseloss
