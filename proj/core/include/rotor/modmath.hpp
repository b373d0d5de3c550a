#pragma once

#include <cstdint>

namespace rotor {

/// Non-negative residue of `a` modulo `m` (m > 0).
constexpr int mod(long long a, long long m) {
  long long r = a % m;
  return static_cast<int>(r < 0 ? r + m : r);
}

/// Representative of `a` modulo `m` in the half-open window (-m/2, m/2].
constexpr int centered_mod(long long a, long long m) {
  int r = mod(a, m);
  return (2 * r > m) ? static_cast<int>(r - m) : r;
}

constexpr bool is_power_of_two(long long x) { return x > 0 && (x & (x - 1)) == 0; }

constexpr int log2_exact(long long x) {
  int k = 0;
  while (x > 1) {
    x >>= 1;
    ++k;
  }
  return k;
}

}  // namespace rotor
