#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace latdist {

// Base class for all errors thrown by this library.
class error : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

// Basis vectors do not span 3-space (|det| below the degeneracy threshold).
class degenerate_basis_error : public error {
public:
  using error::error;
};

// Cell parameters admit no real 3D lattice (the implied Gram matrix is not
// positive definite, or a length/angle is out of range).
class non_positive_definite_error : public error {
public:
  using error::error;
};

// A computed Voronoi cell failed its completeness certificate even at the
// fallback neighbor extent.
class cell_validation_error : public error {
public:
  using error::error;
};

// Input document errors. `line` is 1-based; 0 means "not line-addressable".
class parse_error : public error {
public:
  explicit parse_error(const std::string& msg, std::size_t line = 0)
      : error(line ? msg + " (line " + std::to_string(line) + ")" : msg),
        line_(line) {}
  std::size_t line() const noexcept { return line_; }

private:
  std::size_t line_ = 0;
};

class missing_tag_error : public parse_error {
public:
  explicit missing_tag_error(const std::string& tag)
      : parse_error("missing required tag " + tag), tag_(tag) {}
  const std::string& tag() const noexcept { return tag_; }

private:
  std::string tag_;
};

class malformed_number_error : public parse_error {
public:
  using parse_error::parse_error;
};

class symmetry_violation_error : public parse_error {
public:
  using parse_error::parse_error;
};

} // namespace latdist
