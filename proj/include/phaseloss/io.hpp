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

#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

namespace phaseloss::io {

/// Shortest round-trip decimal for finite values, the literal `inf` otherwise.
std::string format_number(double value);

/// Parses a number written by format_number; accepts `inf`.
double parse_number(const std::string &text);

struct WeightsFile {
    std::vector<double> weights;
    std::vector<std::string> warnings;
};

/**
 * @brief Reads a `k,x_k` CSV with rows k = 0..n in order.
 *
 * Weights are renormalized on load; a warning is recorded when their sum is
 * off by more than 1e-9. Throws std::runtime_error with the offending line
 * number on malformed input.
 */
WeightsFile read_weights(const std::filesystem::path &path);
void write_weights(const std::filesystem::path &path, const std::vector<double> &weights);

/// Writes header + rows; every field is already formatted.
void write_csv(std::ostream &out, const std::vector<std::string> &header,
               const std::vector<std::vector<std::string>> &rows);

}  // namespace phaseloss::io
