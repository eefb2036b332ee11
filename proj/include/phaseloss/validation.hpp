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

#include <cstdint>
#include <string>
#include <vector>

namespace phaseloss {

struct ValidationCheck {
    std::string name;
    double error = 0.0;
    double tolerance = 0.0;
    bool pass = false;
    std::string detail;
};

struct ValidationSettings {
    /// Largest n handed to the dense oracle.
    int n_budget = 6;
    std::uint64_t seed = 20130901;
    /// Empty means every check.
    std::vector<std::string> checks;
    int threads = 0;
};

/// Names accepted by ValidationSettings::checks, in execution order.
const std::vector<std::string> &validation_check_names();

std::vector<ValidationCheck> run_validation(const ValidationSettings &settings);

}  // namespace phaseloss
