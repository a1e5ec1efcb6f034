/*
 * Copyright 2026 The phobic Authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#pragma once

#include <stdexcept>
#include <string>

namespace phobic {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
  public:
    using std::runtime_error::runtime_error;
};

// Matrix dimensions do not fit the operation (empty input, mismatched sizes).
class DimensionError : public Error {
  public:
    using Error::Error;
};

// Wrong shape class: non-square, asymmetric, odd dimension where even is needed.
class ShapeError : public Error {
  public:
    using Error::Error;
};

// Problem size exceeds an enumeration or exact-evaluation cap.
class CapacityError : public Error {
  public:
    using Error::Error;
};

// A numerical guard tripped (unitarity, PSD, conditioning, probability range).
class NumericalError : public Error {
  public:
    using Error::Error;
};

// Argument outside the mathematical domain of a function.
class DomainError : public Error {
  public:
    using Error::Error;
};

class BoundsError : public Error {
  public:
    using Error::Error;
};

// Photon number is not conserved between input and output Fock states.
class ConservationError : public Error {
  public:
    using Error::Error;
};

// A submatrix or postselection specification is internally inconsistent.
class SpecError : public Error {
  public:
    using Error::Error;
};

class ConfigError : public Error {
  public:
    using Error::Error;
};

class ParseError : public Error {
  public:
    ParseError(const std::string &what, std::size_t line)
        : Error(what + " (line " + std::to_string(line) + ")"), line_(line) {}

    std::size_t line() const noexcept { return line_; }

  private:
    std::size_t line_;
};

}  // namespace phobic
