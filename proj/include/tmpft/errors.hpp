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

#include <stdexcept>
#include <string>

namespace tmpft {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
    using std::runtime_error::runtime_error;
};

class DimensionError : public Error {
 public:
    using Error::Error;
};

class HermiticityError : public Error {
 public:
    using Error::Error;
};

class UnitarityError : public Error {
 public:
    using Error::Error;
};

/// Raised when a matrix fails the density-operator checks (trace, PSD).
class StateError : public Error {
 public:
    using Error::Error;
};

/// A supplied decomposition or table does not agree with the state it claims to describe.
class ConsistencyError : public Error {
 public:
    using Error::Error;
};

/// Parameter outside the domain of a scenario or formula.
class DomainError : public Error {
 public:
    using Error::Error;
};

/// Dense tuple table would exceed the enumeration guard.
class SizeError : public Error {
 public:
    using Error::Error;
};

class PartitionUnavailable : public Error {
 public:
    using Error::Error;
};

/// A check was requested whose preconditions do not hold for this system.
class NotApplicable : public Error {
 public:
    using Error::Error;
};

}  // namespace tmpft
