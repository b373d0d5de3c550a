#include "rotor/decoder.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>
#include <vector>

#include "rotor/errors.hpp"
#include "rotor/modmath.hpp"

namespace rotor {

namespace {

using cd = std::complex<double>;
constexpr double kTwoPi = 2.0 * std::numbers::pi;

// g(Delta) / s for Delta in [-(n - 1), n - 1], stored at Delta + n - 1.
std::vector<cd> section_kernel(const PeggBarnettBasis& basis, int n) {
  const int half = basis.s / (2 * basis.d);
  std::vector<cd> g(static_cast<std::size_t>(2 * n - 1));
  for (int delta = -(n - 1); delta < n; ++delta) {
    cd sum = 0.0;
    for (int m = -half; m < half; ++m)
      sum += std::polar(1.0, -kTwoPi * mod(static_cast<long long>(delta) * m, basis.s) / basis.s);
    g[static_cast<std::size_t>(delta + n - 1)] = sum / static_cast<double>(basis.s);
  }
  return g;
}

// F[i, n] = exp(-2 pi i n i / d).
Eigen::MatrixXcd section_fourier(int d, int n) {
  Eigen::MatrixXcd f(d, n);
  for (int i = 0; i < d; ++i)
    for (int k = 0; k < n; ++k) f(i, k) = std::polar(1.0, -kTwoPi * mod(static_cast<long long>(i) * k, d) / d);
  return f;
}

void check_dim(const PeggBarnettBasis& basis, int n) {
  basis.validate();
  if (n > basis.s)
    throw InvalidArgument("decoder: Fock dimension " + std::to_string(n) + " exceeds s = " +
                          std::to_string(basis.s));
}

}  // namespace

void PeggBarnettBasis::validate() const {
  if (d < 1 || s < 2 * d || s % (2 * d) != 0)
    throw InvalidArgument("PeggBarnettBasis: s must be a positive multiple of 2d");
}

PeggBarnettBasis PeggBarnettBasis::for_cutoff(int N, int d) {
  if (d < 1) throw InvalidArgument("PeggBarnettBasis: d >= 1");
  const int step = 2 * d;
  const int need = 4 * (N + 1);
  return {(need + step - 1) / step * step, d};
}

Eigen::VectorXcd PeggBarnettBasis::state(int i, int m) const {
  validate();
  const double phi = kTwoPi * (static_cast<double>(i) / d + static_cast<double>(m) / s);
  Eigen::VectorXcd v(s);
  for (int n = 0; n < s; ++n) v(n) = std::polar(1.0 / std::sqrt(static_cast<double>(s)), n * phi);
  return v;
}

Eigen::MatrixXcd decode_single(const Eigen::MatrixXcd& rho_mode, const PeggBarnettBasis& basis) {
  const int n = static_cast<int>(rho_mode.rows());
  if (rho_mode.cols() != n) throw InvalidArgument("decode_single: density must be square");
  check_dim(basis, n);
  const auto g = section_kernel(basis, n);
  Eigen::MatrixXcd hat(n, n);
  for (int c = 0; c < n; ++c)
    for (int r = 0; r < n; ++r) hat(r, c) = rho_mode(r, c) * g[static_cast<std::size_t>(r - c + n - 1)];
  const Eigen::MatrixXcd f = section_fourier(basis.d, n);
  return f * hat * f.adjoint();
}

Eigen::MatrixXcd decode_two_mode(const TwoModeDensity& rho, const PeggBarnettBasis& basis) {
  const int n = rho.space.dim();
  if (rho.rho.rows() != static_cast<Eigen::Index>(n) * n || rho.rho.cols() != rho.rho.rows())
    throw InvalidArgument("decode_two_mode: density does not match its Fock space");
  check_dim(basis, n);
  const auto g = section_kernel(basis, n);
  auto kern = [&](int delta) { return g[static_cast<std::size_t>(delta + n - 1)]; };
  const int D = n * n;
  Eigen::MatrixXcd hat(D, D);
  for (int ap = 0; ap < n; ++ap)
    for (int bp = 0; bp < n; ++bp) {
      const int col = rho.space.joint(ap, bp);
      for (int a = 0; a < n; ++a) {
        const cd ga = kern(a - ap);
        for (int b = 0; b < n; ++b) {
          const int row = rho.space.joint(a, b);
          hat(row, col) = rho.rho(row, col) * ga * kern(b - bp);
        }
      }
    }
  const Eigen::MatrixXcd f1 = section_fourier(basis.d, n);
  Eigen::MatrixXcd f(basis.d * basis.d, D);
  for (int iA = 0; iA < basis.d; ++iA)
    for (int iB = 0; iB < basis.d; ++iB)
      for (int a = 0; a < n; ++a)
        for (int b = 0; b < n; ++b) f(iA * basis.d + iB, rho.space.joint(a, b)) = f1(iA, a) * f1(iB, b);
  Eigen::MatrixXcd sigma = f * hat * f.adjoint();
  return 0.5 * (sigma + sigma.adjoint());
}

double logical_fidelity(const Eigen::MatrixXcd& sigma, const Eigen::VectorXcd& target) {
  if (sigma.rows() != target.size() || sigma.cols() != target.size())
    throw InvalidArgument("logical_fidelity: dimension mismatch");
  const double tr = sigma.trace().real();
  if (!(tr > 0.0)) throw InvalidArgument("logical_fidelity: zero-trace state");
  const double f = (target.adjoint() * sigma * target)(0).real() / (tr * target.squaredNorm());
  return std::clamp(f, 0.0, 1.0);
}

}  // namespace rotor
