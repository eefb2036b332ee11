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

#include <stdexcept>
#include <string>

namespace phaseloss {

/// A parameter or index outside the domain of an operation.
class DomainError : public std::domain_error {
  public:
    using std::domain_error::domain_error;
};

/// Loss information diverges at eta in {0, 1}.
class DivergenceError : public DomainError {
  public:
    using DomainError::DomainError;
};

/// A numerical procedure could not reach its accuracy target.
class NumericalQualityError : public std::runtime_error {
  public:
    using std::runtime_error::runtime_error;
};

/// Input exceeds a configured problem-size budget.
class SizeError : public std::length_error {
  public:
    using std::length_error::length_error;
};

}  // namespace phaseloss
