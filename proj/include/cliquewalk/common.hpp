#pragma once

#include <cstdint>
#include <cstddef>
#include <stdexcept>
#include <string>
#include <vector>

namespace cliquewalk {

/// Base for all recoverable errors raised on bad input or configuration.
class Error : public std::runtime_error {
 public:
  explicit Error(const std::string& what) : std::runtime_error(what) {}
};

/// Raised when an internal contract is violated. These indicate bugs, not
/// bad input, and are kept as exceptions so tests can observe them.
class ContractViolation : public std::logic_error {
 public:
  explicit ContractViolation(const std::string& what) : std::logic_error(what) {}
};

namespace detail {
[[noreturn]] void assert_fail(const char* file, int line, const std::string& msg);
}

#define CW_ASSERT(cond, msg)                                    \
  do {                                                          \
    if (!(cond)) ::cliquewalk::detail::assert_fail(__FILE__, __LINE__, (msg)); \
  } while (0)

// ---------------------------------------------------------------------------
// Deterministic randomness. Every random decision in the project flows
// through these mixers so that a (seed, identity, counter) triple fully
// determines the draw, independent of host scheduling.

constexpr uint64_t kGolden1 = 0x9e3779b97f4a7c15ull;
constexpr uint64_t kGolden2 = 0xbf58476d1ce4e5b9ull;
constexpr uint64_t kGolden3 = 0x94d049bb133111ebull;

inline uint64_t mix64(uint64_t x) {
  x ^= x >> 30;
  x *= kGolden2;
  x ^= x >> 27;
  x *= kGolden3;
  x ^= x >> 31;
  return x;
}

/// Avalanche four words into one. Two mixing passes per word.
inline uint64_t derive64(uint64_t a, uint64_t b, uint64_t c, uint64_t d) {
  uint64_t h = mix64(a + kGolden1);
  h = mix64(h ^ (b + 0x7f4a7c15c15c15c1ull));
  h = mix64(h ^ (c + 0x2545f4914f6cdd1dull));
  h = mix64(h ^ (d + 0x9e6c63d0a0cfa3c5ull));
  return mix64(h + a);
}

inline double to_unit_double(uint64_t x) {
  // 53 high bits -> [0,1)
  return static_cast<double>(x >> 11) * 0x1.0p-53;
}

/// Sequential splitmix-style stream for single-threaded contexts
/// (reference samplers, tests).
struct Rng {
  uint64_t state = 0;

  explicit Rng(uint64_t seed = 0) : state(mix64(seed + kGolden1)) {}

  uint64_t next_u64() {
    state += kGolden1;
    return mix64(state);
  }
  double uniform() { return to_unit_double(next_u64()); }

  /// Uniform integer in [0, n).
  uint64_t next_below(uint64_t n) {
    CW_ASSERT(n > 0, "next_below: empty range");
    return static_cast<uint64_t>(uniform() * static_cast<double>(n)) % n;
  }
};

/// Index drawn proportional to nonnegative weights; u is a unit uniform.
/// Deterministic: cumulative scan, last positive weight absorbs rounding.
std::size_t pick_weighted(const double* w, std::size_t n, double u);

inline std::size_t pick_weighted(const std::vector<double>& w, double u) {
  return pick_weighted(w.data(), w.size(), u);
}

// ---------------------------------------------------------------------------

inline uint64_t pow2_ceil(uint64_t x) {
  if (x <= 1) return 1;
  uint64_t p = 1;
  while (p < x) p <<= 1;
  return p;
}

inline int log2_exact(uint64_t pow2) {
  int l = 0;
  while ((1ull << l) < pow2) ++l;
  CW_ASSERT((1ull << l) == pow2, "log2_exact: not a power of two");
  return l;
}

inline int ceil_log2(uint64_t x) { return log2_exact(pow2_ceil(x)); }

}  // namespace cliquewalk
