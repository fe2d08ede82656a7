#pragma once

#include <array>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace handfit {

/// Base class of every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Caller supplied arguments that violate a precondition.
class InputError : public Error {
 public:
  using Error::Error;
};

/// A model or container file could not be parsed.
class ParseError : public Error {
 public:
  ParseError(std::string section, const std::string& what)
      : Error("section '" + section + "': " + what), section_(std::move(section)) {}
  const std::string& section() const noexcept { return section_; }

 private:
  std::string section_;
};

/// Data parsed fine but breaks a HandModel invariant.
class InvariantError : public Error {
 public:
  InvariantError(std::string section, const std::string& what)
      : Error("invariant violated in '" + section + "': " + what),
        section_(std::move(section)) {}
  const std::string& section() const noexcept { return section_; }

 private:
  std::string section_;
};

/// IK target bone of zero length.
class DegenerateBoneError : public InputError {
 public:
  DegenerateBoneError(int joint, const std::string& what)
      : InputError("degenerate bone at joint " + std::to_string(joint) + ": " + what),
        joint_(joint) {}
  int joint() const noexcept { return joint_; }

 private:
  int joint_;
};

/// Mesh is not edge-manifold closed; carries the offending edges.
class NonWatertightError : public Error {
 public:
  NonWatertightError(std::vector<std::array<int, 2>> edges, const std::string& what)
      : Error(what), edges_(std::move(edges)) {}
  const std::vector<std::array<int, 2>>& boundary_edges() const noexcept { return edges_; }

 private:
  std::vector<std::array<int, 2>> edges_;
};

}  // namespace handfit
