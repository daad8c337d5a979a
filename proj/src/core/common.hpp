#pragma once

#include <stdexcept>
#include <string>

namespace bm {

// Absolute comparison tolerance used throughout; all arithmetic is double.
inline constexpr double kTol = 1e-9;

// Bad input: schema violations, broken invariants, contract violations.
class validation_error : public std::runtime_error {
 public:
  explicit validation_error(const std::string& what) : std::runtime_error(what) {}
};

// Instance is structurally fine but exceeds a documented size limit.
class capacity_error : public std::runtime_error {
 public:
  explicit capacity_error(const std::string& what) : std::runtime_error(what) {}
};

inline void require(bool cond, const std::string& msg) {
  if (!cond) throw validation_error(msg);
}

inline void require_capacity(bool cond, const std::string& msg) {
  if (!cond) throw capacity_error(msg);
}

}  // namespace bm
