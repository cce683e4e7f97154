// Copyright 2026 The clusterdiff Authors
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

#ifndef CLUSTERDIFF_ERRORS_HPP
#define CLUSTERDIFF_ERRORS_HPP

#include <cstddef>
#include <stdexcept>
#include <string>

namespace clusterdiff {

/// Base class of every error thrown by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Malformed input text. Carries the 1-based line number when known (0 otherwise).
class ParseError : public Error {
 public:
  ParseError(const std::string& what, std::size_t line)
      : Error(line == 0 ? what : "line " + std::to_string(line) + ": " + what), line_(line) {}

  [[nodiscard]] std::size_t line() const noexcept { return line_; }

 private:
  std::size_t line_;
};

/// Well-formed input that violates a domain invariant.
class ValidationError : public Error {
 public:
  using Error::Error;
};

/// Unknown item id.
class LookupError : public Error {
 public:
  using Error::Error;
};

/// Invalid configuration value (sample size, policy parameter, grid spec...).
class ConfigError : public Error {
 public:
  using Error::Error;
};

/// The clustering change is a noop, so affected-scope quantities are undefined.
class NoopChangeError : public Error {
 public:
  NoopChangeError() : Error("noop change: no affected items") {}
};

/// A judge was asked about a pair it has no verdict for.
class UnjudgedPairError : public Error {
 public:
  UnjudgedPairError(std::string a, std::string b)
      : Error("unjudged pair: " + a + " / " + b), a_(std::move(a)), b_(std::move(b)) {}

  [[nodiscard]] const std::string& first() const noexcept { return a_; }
  [[nodiscard]] const std::string& second() const noexcept { return b_; }

 private:
  std::string a_;
  std::string b_;
};

/// An assumed parameter lies outside its plausible range [lower, upper].
class InfeasibleParameterError : public Error {
 public:
  InfeasibleParameterError(const std::string& what, double lower, double upper)
      : Error(what + " (feasible range [" + std::to_string(lower) + ", " + std::to_string(upper) + "])"),
        lower_(lower),
        upper_(upper) {}

  [[nodiscard]] double lower() const noexcept { return lower_; }
  [[nodiscard]] double upper() const noexcept { return upper_; }

 private:
  double lower_;
  double upper_;
};

/// Variant 1 of the good-stable-weight reasoning needs SplitRate != MergeRate
/// and a DeltaPrecision value.
class VariantInapplicableError : public Error {
 public:
  using Error::Error;
};

}  // namespace clusterdiff

#endif  // CLUSTERDIFF_ERRORS_HPP
