#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>

namespace sgdlab {

// An iterate left the guard region (non-finite or |x| > 1e12).
class DivergenceError : public std::runtime_error {
 public:
  DivergenceError(std::int64_t step, const std::string& what)
      : std::runtime_error(what), step_(step) {}
  std::int64_t step() const noexcept { return step_; }

 private:
  std::int64_t step_;
};

// Matrix handed to psd_sqrt has an eigenvalue below -clip_tol.
class NotPsdError : public std::runtime_error {
 public:
  NotPsdError(double eigenvalue, const std::string& what)
      : std::runtime_error(what), eigenvalue_(eigenvalue) {}
  double offending_eigenvalue() const noexcept { return eigenvalue_; }

 private:
  double eigenvalue_;
};

// Dataset ingestion failure; line numbers are 1-based, 0 = file level.
class IngestError : public std::runtime_error {
 public:
  IngestError(long line, const std::string& what)
      : std::runtime_error(what), line_(line) {}
  long line() const noexcept { return line_; }

 private:
  long line_;
};

// Config schema violation; carries the JSON pointer of the offending field.
class ConfigError : public std::runtime_error {
 public:
  ConfigError(std::string pointer, const std::string& what)
      : std::runtime_error(what), pointer_(std::move(pointer)) {}
  const std::string& pointer() const noexcept { return pointer_; }

 private:
  std::string pointer_;
};

// Replicate failure inside an ensemble run.
class EnsembleError : public std::runtime_error {
 public:
  EnsembleError(std::int64_t replicate, std::uint64_t seed, const std::string& what)
      : std::runtime_error(what), replicate_(replicate), seed_(seed) {}
  std::int64_t replicate() const noexcept { return replicate_; }
  std::uint64_t seed() const noexcept { return seed_; }

 private:
  std::int64_t replicate_;
  std::uint64_t seed_;
};

}  // namespace sgdlab
