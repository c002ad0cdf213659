// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <stdexcept>
#include <string>

namespace mcfar {

/// Failure classes. Each maps to a distinct process exit code in the CLI.
enum class ErrorKind {
    parse,        ///< malformed input document or flag value
    invariant,    ///< geometry / configuration / argument domain violation
    convergence,  ///< series, extrapolation or linear solve did not converge
    tolerance,    ///< analytical vs simulated disagreement above threshold
};

class Error : public std::runtime_error {
public:
    Error(ErrorKind kind, const std::string& what) : std::runtime_error(what), kind_(kind) {}

    ErrorKind kind() const noexcept { return kind_; }

private:
    ErrorKind kind_;
};

inline Error parse_error(const std::string& what) { return {ErrorKind::parse, what}; }
inline Error invariant_error(const std::string& what) { return {ErrorKind::invariant, what}; }
inline Error convergence_error(const std::string& what) { return {ErrorKind::convergence, what}; }
inline Error tolerance_error(const std::string& what) { return {ErrorKind::tolerance, what}; }

}  // namespace mcfar
