// Copyright 2026 The dbm-tridiag Authors.
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <stdexcept>
#include <string>

namespace dbm {

/// Invalid user-supplied parameter (non-positive rate, unsupported beta, ...).
class ParameterError : public std::invalid_argument {
 public:
  explicit ParameterError(const std::string& what) : std::invalid_argument(what) {}
};

/// A precondition on an input object does not hold (non-self-adjoint matrix,
/// malformed pairing, dimension mismatch).
class ContractError : public std::logic_error {
 public:
  explicit ContractError(const std::string& what) : std::logic_error(what) {}
};

/// An estimator was asked for a value it cannot provide (too few samples).
class InsufficientData : public std::runtime_error {
 public:
  explicit InsufficientData(const std::string& what) : std::runtime_error(what) {}
};

namespace detail {

inline void require(bool ok, const std::string& message) {
  if (!ok) throw ParameterError(message);
}

inline void expect(bool ok, const std::string& message) {
  if (!ok) throw ContractError(message);
}

}  // namespace detail
}  // namespace dbm
