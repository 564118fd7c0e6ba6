#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace osmbc {

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class GeometryError : public Error {
 public:
  using Error::Error;
};

class ParseError : public Error {
 public:
  ParseError(const std::string& what, std::size_t byte_offset)
      : Error(what + " (at byte " + std::to_string(byte_offset) + ")"),
        byte_offset_(byte_offset) {}
  explicit ParseError(const std::string& what) : Error(what) {}

  std::size_t byte_offset() const noexcept { return byte_offset_; }

 private:
  std::size_t byte_offset_ = 0;
};

/// Invalid rule configuration, CLI flags or region parameters.
class ConfigError : public Error {
 public:
  using Error::Error;
};

/// A caller violated an operation's precondition.
class ContractError : public Error {
 public:
  using Error::Error;
};

class FetchError : public Error {
 public:
  FetchError(const std::string& what, std::size_t tile_id)
      : Error("tile " + std::to_string(tile_id) + ": " + what), tile_id_(tile_id) {}

  std::size_t tile_id() const noexcept { return tile_id_; }

 private:
  std::size_t tile_id_;
};

class MappingError : public Error {
 public:
  explicit MappingError(const std::string& label)
      : Error("unmapped ground-truth label: \"" + label + "\""), label_(label) {}

  const std::string& label() const noexcept { return label_; }

 private:
  std::string label_;
};

class MetricsError : public Error {
 public:
  using Error::Error;
};

}  // namespace osmbc
