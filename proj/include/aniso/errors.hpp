#pragma once

#include <stdexcept>
#include <string>

namespace aniso {

/// Base class for all library errors.
class error : public std::runtime_error {
 public:
  explicit error(const std::string& msg) : std::runtime_error(msg) {}
};

/// Malformed network document (bad JSON). Carries 1-based line/column.
class parse_error : public error {
 public:
  parse_error(const std::string& msg, std::size_t line, std::size_t column)
      : error(msg + " (line " + std::to_string(line) + ", column " + std::to_string(column) + ")"),
        line(line),
        column(column) {}
  std::size_t line;
  std::size_t column;
};

/// Well-formed document violating a network invariant; message names the invariant.
class semantic_error : public error {
 public:
  using error::error;
};

/// Requested temperature (E0 - e.rho)/c_H is negative.
class negative_temperature_error : public error {
 public:
  using error::error;
};

/// The attainable set is unbounded, detected by an unbounded linear program.
class unbounded_simplex_error : public error {
 public:
  using error::error;
};

/// Operation requires a reversible network but some kappa_bw = 0.
class irreversible_network_error : public error {
 public:
  using error::error;
};

/// A structural hypothesis (IDB/ICB/constant transition energy/bounded set/theta_minus > 0)
/// required by the operation does not hold.
class hypothesis_error : public error {
 public:
  using error::error;
};

/// An iterative solver failed to converge; message carries diagnostics.
class convergence_error : public error {
 public:
  using error::error;
};

/// Constraint set empty (e.g. no strictly interior point).
class infeasible_error : public error {
 public:
  using error::error;
};

/// State on the boundary of the feasible set where the quantity is undefined.
class boundary_error : public error {
 public:
  using error::error;
};

/// Network does not have the topology the operation requires (e.g. exactly A<=>B).
class topology_error : public error {
 public:
  using error::error;
};

/// A classification trend test did not reach the required confidence.
class inconclusive_error : public error {
 public:
  using error::error;
};

}  // namespace aniso
