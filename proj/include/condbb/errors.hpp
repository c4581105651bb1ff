#pragma once

#include <cstddef>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace condbb {

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Malformed or inconsistent input: wrong shapes, empty data, bad indices.
class InvalidArgument : public Error {
 public:
  using Error::Error;
};

/// The input is well formed but violates a mathematical precondition
/// (weights not summing to one, a point outside its hull, ...).
class PreconditionError : public Error {
 public:
  explicit PreconditionError(const std::string& what, std::optional<std::size_t> cell = std::nullopt)
      : Error(what), cell_(cell) {}

  std::optional<std::size_t> cell() const { return cell_; }

 private:
  std::optional<std::size_t> cell_;
};

class HullMembershipError : public PreconditionError {
 public:
  HullMembershipError(const std::string& what, std::optional<std::size_t> cell, std::vector<double> point,
                      std::vector<double> separating_direction)
      : PreconditionError(what, cell),
        point_(std::move(point)),
        separating_direction_(std::move(separating_direction)) {}

  const std::vector<double>& point() const { return point_; }
  /// d with d·point < d·v for every vertex v; empty when unavailable.
  const std::vector<double>& separating_direction() const { return separating_direction_; }

 private:
  std::vector<double> point_;
  std::vector<double> separating_direction_;
};

class VerificationError : public Error {
 public:
  using Error::Error;
};

}  // namespace condbb
