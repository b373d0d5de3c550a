#pragma once

#include <string>

namespace rotor {

/// Protocol dimensions. All are powers of two with
/// 2 | m_f | m_c | m_i | d; f_cut is 0 or lies in [1/m_f^2, 1).
struct ProtocolParams {
  int d = 16;
  int m_i = 16;
  int m_c = 8;
  int m_f = 2;
  double f_cut = 0.0;

  int delta_i() const { return d / m_i; }
  int delta_c() const { return d / m_c; }
  int delta_f() const { return m_c / m_f; }

  /// Throws InvalidArgument naming the first violated constraint.
  void validate() const;

  std::string describe() const;
};

}  // namespace rotor
