#pragma once

#include <stdexcept>
#include <string>

namespace lineloc {

/// Text input could not be parsed. Carries the offending file and 1-based line number.
class ParseError : public std::runtime_error {
 public:
  ParseError(std::string path, std::size_t line, const std::string& what)
      : std::runtime_error(path + ":" + std::to_string(line) + ": " + what),
        path_(std::move(path)),
        line_(line) {}

  const std::string& path() const noexcept { return path_; }
  std::size_t line() const noexcept { return line_; }

 private:
  std::string path_;
  std::size_t line_;
};

/// Rotation angle too close to pi for a stable logarithm.
class NearSingularError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Point lies on (or numerically at) the camera plane, projection undefined.
class AtCameraPlaneError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Projected segment collapsed to a point, direction undefined.
class DegenerateProjectionError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Every residual in the problem is saturated (all endpoints behind the camera).
class NoValidResidualsError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Cost or state became non-finite during optimization.
class NumericFailureError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Frame ids or timestamps went backwards in a stream.
class InputOrderError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Two trajectories share no timestamps within the association tolerance.
class NoOverlapError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Paired positions are collinear or otherwise insufficient for alignment.
class DegenerateAlignmentError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace lineloc
