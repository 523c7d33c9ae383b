// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <stdexcept>

namespace hetcal {

/// Physical or configuration parameter outside its allowed range.
class InvariantError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Malformed, truncated or version-mismatched input document.
class SchemaError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Data was well-formed but the analysis preconditions failed
/// (insufficient SNR, inconsistent calibration, ...).
class AnalysisError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace hetcal
