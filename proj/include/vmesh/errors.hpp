#pragma once

#include <stdexcept>
#include <string>

namespace vmesh {

/// Malformed or unusable input (files, frames, poses, configs).
class InputError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A broken cross-reference inside the map; always a bug, never bad input.
class IntegrityError : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

/// Geometry that cannot be triangulated (too few points, all collinear, ...).
class DegenerateError : public std::runtime_error {
 public:
  DegenerateError() : std::runtime_error("degenerate") {}
  explicit DegenerateError(const std::string& what) : std::runtime_error("degenerate: " + what) {}
};

/// Metric evaluation requested on an empty point set or mesh.
class EmptyInputError : public std::runtime_error {
 public:
  explicit EmptyInputError(const std::string& what = "empty input") : std::runtime_error(what) {}
};

}  // namespace vmesh
