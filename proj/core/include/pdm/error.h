// Copyright 2026 The pdm Authors.
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>
#include <vector>

namespace pdm {

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Malformed input text (OBJ, JSON). line is 1-based, 0 when unknown.
class ParseError : public Error {
 public:
  ParseError(const std::string& what, std::size_t line = 0)
      : Error(line ? what + " (line " + std::to_string(line) + ")" : what), line_(line) {}
  std::size_t line() const { return line_; }

 private:
  std::size_t line_;
};

class ValidationError : public Error {
 public:
  using Error::Error;
};

class DegenerateFaceError : public ValidationError {
 public:
  explicit DegenerateFaceError(std::vector<std::size_t> faces);
  const std::vector<std::size_t>& faces() const { return faces_; }

 private:
  std::vector<std::size_t> faces_;
};

// N_i . N_g at or below the crease epsilon.
class CreaseError : public Error {
 public:
  CreaseError(std::size_t face, double min_dot);
  std::size_t face() const { return face_; }
  double min_dot() const { return min_dot_; }

 private:
  std::size_t face_;
  double min_dot_;
};

class ContractError : public Error {
 public:
  using Error::Error;
};

class IoError : public Error {
 public:
  using Error::Error;
};

}  // namespace pdm
