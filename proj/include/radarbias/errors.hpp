#pragma once

#include <stdexcept>
#include <string>
#include <vector>

namespace radarbias {

// Base of every domain error raised by the library. Input/config problems
// derive from ConfigError instead so front ends can tell them apart.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class ZeroVector : public Error {
 public:
  ZeroVector() : Error("zero vector has no spherical representation") {}
};

class SingularGeometry : public Error {
 public:
  explicit SingularGeometry(int sensor)
      : Error("singular geometry: sensor " + std::to_string(sensor)), sensor_(sensor) {}
  int sensor() const noexcept { return sensor_; }

 private:
  int sensor_;
};

class SingularSystem : public Error {
 public:
  explicit SingularSystem(std::string matrix)
      : Error("singular system: " + matrix), matrix_(std::move(matrix)) {}
  const std::string& matrix() const noexcept { return matrix_; }

 private:
  std::string matrix_;
};

class DimensionMismatch : public Error {
 public:
  using Error::Error;
};

class SingularInnovation : public Error {
 public:
  SingularInnovation() : Error("singular innovation matrix in optimal gain") {}
};

class DegenerateDenominator : public Error {
 public:
  using Error::Error;
};

class NoValidRoot : public Error {
 public:
  NoValidRoot(const std::string& what, std::vector<double> roots)
      : Error(what), roots_(std::move(roots)) {}
  const std::vector<double>& roots() const noexcept { return roots_; }

 private:
  std::vector<double> roots_;
};

class InvalidGains : public Error {
 public:
  using Error::Error;
};

}  // namespace radarbias
