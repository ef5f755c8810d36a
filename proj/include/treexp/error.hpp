// Copyright 2026 The treexp Authors. All Rights Reserved.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.
// =============================================================================

#ifndef TREEXP_ERROR_HPP_
#define TREEXP_ERROR_HPP_

#include <stdexcept>
#include <string>

namespace treexp {

// Base class of every error raised by the library. The C API maps each
// subclass onto one status code.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// A graph, tree or edge function violates a structural invariant.
class StructuralError : public Error {
 public:
  using Error::Error;
};

// Input exceeds the brute-force enumeration bound.
class SizeError : public Error {
 public:
  using Error::Error;
};

// Mismatched matrix or vector dimensions.
class DimensionError : public Error {
 public:
  using Error::Error;
};

// The Laplacian is singular (Z = 0) where an inverse or a normalization is
// required.
class SingularError : public Error {
 public:
  using Error::Error;
};

// q assigns zero weight to an edge that p supports.
class SupportError : public Error {
 public:
  using Error::Error;
};

// A parameter lies outside the domain of the operation.
class DomainError : public Error {
 public:
  using Error::Error;
};

// A total that must be non-negative came out below the round-off floor.
class NumericalError : public Error {
 public:
  using Error::Error;
};

}  // namespace treexp

#endif  // TREEXP_ERROR_HPP_
