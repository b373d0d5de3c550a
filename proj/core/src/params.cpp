#include "rotor/params.hpp"

#include <sstream>

#include "rotor/errors.hpp"
#include "rotor/modmath.hpp"

namespace rotor {

void ProtocolParams::validate() const {
  auto require_pow2 = [](int v, const char* name) {
    if (!is_power_of_two(v))
      throw InvalidArgument(std::string(name) + " must be a power of two, got " + std::to_string(v));
  };
  require_pow2(d, "d");
  require_pow2(m_i, "m_i");
  require_pow2(m_c, "m_c");
  require_pow2(m_f, "m_f");
  // For powers of two, divisibility is ordering.
  if (!(2 <= m_f && m_f <= m_c && m_c <= m_i && m_i <= d))
    throw InvalidArgument("dimensions must satisfy 2 | m_f | m_c | m_i | d, got " + describe());
  const double floor = 1.0 / (static_cast<double>(m_f) * m_f);
  if (!(f_cut == 0.0 || (f_cut >= floor && f_cut < 1.0)))
    throw InvalidArgument("f_cut must be 0 or lie in [1/m_f^2, 1), got " + std::to_string(f_cut));
}

std::string ProtocolParams::describe() const {
  std::ostringstream os;
  os << "d=" << d << " m_i=" << m_i << " m_c=" << m_c << " m_f=" << m_f << " f_cut=" << f_cut;
  return os.str();
}

}  // namespace rotor
