// Copyright 2026 The tmpft Authors
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

#include <cstddef>

namespace tmpft {

/// Numerical thresholds shared by all modules. Defaults are sized for double
/// precision at total Hilbert-space dimension up to ~64.
struct Tolerances {
    double hermiticity = 1e-10;     // max |H - H^dagger| entry
    double unitarity = 1e-10;       // max |U^dagger U - I| entry
    double orthonormality = 1e-10;  // max |V^dagger V - I| entry
    double trace = 1e-12;           // |Tr rho - 1|
    double psd = 1e-12;             // smallest admissible eigenvalue is -psd
    double support = 1e-12;         // relative to the largest eigenvalue
    double reconstruction = 1e-10;  // max entry of sum_k p_k |k><k| - rho
    double degeneracy = 1e-9;       // eigenvalues closer than this share a block
    double ft = 1e-10;              // fluctuation-theorem equalities
    double bound = 1e-10;           // inequality slack
};

/// Upper limit on the number of entries in a dense outcome-tuple table.
inline constexpr std::size_t kMaxTupleEntries = 10'000'000;

}  // namespace tmpft
