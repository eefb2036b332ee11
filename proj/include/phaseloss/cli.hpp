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

#include <iosfwd>
#include <string>
#include <vector>

namespace phaseloss::cli {

/// Process exit statuses.
enum ExitStatus : int {
    kExitOk = 0,
    kExitFailure = 1,
    kExitUsage = 2,
    /// `optimize` finished but at least one (n, eta) point did not converge.
    kExitPartial = 3,
};

/**
 * @brief Entry point shared by the executable and the tests.
 *
 * `args` excludes the program name. Tables go to files under `--out` when it
 * is given and to `out` otherwise; diagnostics and warnings go to `err`.
 */
int run(const std::vector<std::string> &args, std::ostream &out, std::ostream &err);

}  // namespace phaseloss::cli
