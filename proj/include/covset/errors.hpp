#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>

namespace covset {

// Invalid experiment configuration (CLI exit code 2).
class config_error : public std::runtime_error {
 public:
  explicit config_error(const std::string& what) : std::runtime_error(what) {}
};

// A configured resource cap would be exceeded (CLI exit code 3).
class resource_limit_error : public std::runtime_error {
 public:
  explicit resource_limit_error(const std::string& what) : std::runtime_error(what) {}
};

// The run produced no usable outcome, e.g. every replica was empty (CLI exit code 4).
class degenerate_outcome_error : public std::runtime_error {
 public:
  explicit degenerate_outcome_error(const std::string& what) : std::runtime_error(what) {}
};

namespace limits {

// Grid memory cap in bits. Default 2^31 (256 MiB of bitset), override with
// COVSET_MAX_GRID_BITS.
std::uint64_t max_grid_bits();

// Cap on sequence enumeration length (bucket tables, generation draws).
// Default 10^9, override with COVSET_MAX_ENUM.
std::uint64_t max_enumeration();

}  // namespace limits

}  // namespace covset
