#include "rotor/fock_engine.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>
#include <vector>

#include <unsupported/Eigen/MatrixFunctions>

#include "rotor/csv.hpp"
#include "rotor/errors.hpp"
#include "rotor/modmath.hpp"

namespace rotor {

namespace {

using cd = std::complex<double>;
constexpr double kTwoPi = 2.0 * std::numbers::pi;
constexpr double kCutoffTail = 1e-9;

Eigen::MatrixXcd lowering(int dim) {
  Eigen::MatrixXcd a = Eigen::MatrixXcd::Zero(dim, dim);
  for (int n = 1; n < dim; ++n) a(n - 1, n) = std::sqrt(static_cast<double>(n));
  return a;
}

// Unnormalised state on `dim` levels.
Eigen::VectorXcd build_primitive(const PrimitiveSpec& spec, int dim) {
  const Eigen::MatrixXcd a = lowering(dim);
  const Eigen::MatrixXcd ad = a.adjoint();
  Eigen::VectorXcd v = Eigen::VectorXcd::Zero(dim);
  v(0) = 1.0;
  if (spec.kind == PrimitiveSpec::Kind::squeezed_coherent && spec.zeta != cd(0.0, 0.0)) {
    const Eigen::MatrixXcd g = 0.5 * (std::conj(spec.zeta) * a * a - spec.zeta * ad * ad);
    v = g.exp() * v;
  }
  if (spec.alpha != cd(0.0, 0.0)) {
    const Eigen::MatrixXcd g = spec.alpha * ad - std::conj(spec.alpha) * a;
    v = g.exp() * v;
  }
  return v;
}

int working_dim(int dim) { return static_cast<int>(std::ceil(1.5 * dim)); }

// Applies the left factor (A ⊗ B) to every column of x.
Eigen::MatrixXcd left_local(const Eigen::MatrixXcd& x, const Eigen::MatrixXcd& A,
                            const Eigen::MatrixXcd& B, int n1) {
  const Eigen::Index D = x.rows();
  Eigen::MatrixXcd y(D, x.cols());
  // Rows are a * n1 + b, so each column reshapes to an n1 x n1 block with b as row.
  Eigen::Map<const Eigen::MatrixXcd> xin(x.data(), n1, n1 * x.cols());
  Eigen::MatrixXcd tmp = B * xin;
  for (Eigen::Index j = 0; j < x.cols(); ++j) {
    Eigen::Map<Eigen::MatrixXcd> blk(tmp.data() + j * D, n1, n1);
    Eigen::Map<Eigen::MatrixXcd> out(y.data() + j * D, n1, n1);
    out.noalias() = blk * A.transpose();
  }
  return y;
}

double binomial_weight(int m, int k, double gamma) {
  if (k > m) return 0.0;
  if (gamma == 0.0) return k == 0 ? 1.0 : 0.0;
  if (gamma == 1.0) return k == m ? 1.0 : 0.0;
  const double log_w = std::lgamma(m + 1.0) - std::lgamma(k + 1.0) - std::lgamma(m - k + 1.0) +
                       k * std::log(gamma) + (m - k) * std::log1p(-gamma);
  return std::exp(log_w);
}

}  // namespace

void FockSpace::validate() const {
  if (N < 1) throw InvalidArgument("Fock cutoff must be >= 1");
}

double PrimitiveSpec::mean_photons() const {
  const double r = kind == Kind::coherent ? 0.0 : std::abs(zeta);
  return std::norm(alpha) + std::sinh(r) * std::sinh(r);
}

double PrimitiveSpec::photon_stddev() const {
  const double r = kind == Kind::coherent ? 0.0 : std::abs(zeta);
  const double theta = kind == Kind::coherent ? 0.0 : std::arg(zeta);
  const double phi = std::arg(alpha);
  const double sh = std::sinh(r), ch = std::cosh(r);
  const double var = std::norm(alpha) * (std::cosh(2 * r) - std::sinh(2 * r) * std::cos(theta - 2 * phi)) +
                     2.0 * sh * sh * ch * ch;
  return std::sqrt(var);
}

int default_cutoff(const PrimitiveSpec& spec) {
  const int n0 = std::max(1, static_cast<int>(std::ceil(spec.mean_photons() + 6.0 * spec.photon_stddev())));
  const int dim = working_dim(2 * n0 + 20);
  const Eigen::VectorXcd v = build_primitive(spec, dim);
  double tail = v.squaredNorm();
  int n = 0;
  for (; n < dim; ++n) {
    tail -= std::norm(v(n));
    if (n >= n0 && tail < kCutoffTail * v.squaredNorm()) break;
  }
  return n;
}

Primitive primitive_state(const PrimitiveSpec& spec, const FockSpace& space) {
  space.validate();
  const int dim = space.dim();
  const Eigen::VectorXcd big = build_primitive(spec, working_dim(dim));
  Primitive out;
  out.ket = big.head(dim);
  out.leakage = 1.0 - out.ket.squaredNorm() / big.squaredNorm();
  if (out.leakage > kLeakageTolerance)
    throw EngineError("primitive state leaks " + csv::format(out.leakage) +
                      " of its norm beyond cutoff N = " + std::to_string(space.N));
  out.ket.normalize();
  double m1 = 0.0, m2 = 0.0;
  for (int n = 0; n < dim; ++n) {
    const double p = std::norm(out.ket(n));
    m1 += n * p;
    m2 += static_cast<double>(n) * n * p;
  }
  out.mean_n = m1;
  out.delta_n = std::sqrt(std::max(0.0, m2 - m1 * m1));
  return out;
}

FockOperator annihilation_op(const FockSpace& space) {
  return {lowering(space.dim()), FockOperator::Tag::generic};
}

FockOperator number_op(const FockSpace& space) {
  Eigen::MatrixXcd n = Eigen::MatrixXcd::Zero(space.dim(), space.dim());
  for (int k = 0; k < space.dim(); ++k) n(k, k) = k;
  return {n, FockOperator::Tag::generic};
}

FockOperator rotation_op(double theta, const FockSpace& space) {
  Eigen::MatrixXcd r = Eigen::MatrixXcd::Zero(space.dim(), space.dim());
  for (int n = 0; n < space.dim(); ++n) r(n, n) = std::polar(1.0, theta * n);
  return {r, FockOperator::Tag::unitary};
}

Eigen::VectorXcd crot_op(int m, const FockSpace& space) {
  if (m < 1) throw InvalidArgument("crot_op: m must be >= 1");
  const int n1 = space.dim();
  Eigen::VectorXcd diag(n1 * n1);
  for (int a = 0; a < n1; ++a)
    for (int b = 0; b < n1; ++b)
      diag(space.joint(a, b)) = std::polar(1.0, kTwoPi * mod(static_cast<long long>(a) * b, m) / m);
  return diag;
}

FockOperator loss_kraus(int k, double gamma_l, const FockSpace& space) {
  Eigen::MatrixXcd l = Eigen::MatrixXcd::Zero(space.dim(), space.dim());
  for (int m = k; m < space.dim(); ++m) l(m - k, m) = std::sqrt(binomial_weight(m, k, gamma_l));
  return {l, FockOperator::Tag::kraus};
}

FockOperator phase_povm(int k, int d, const FockSpace& space) {
  if (d < 1 || k < 0 || k >= d) throw InvalidArgument("phase_povm: need 0 <= k < d");
  const int n1 = space.dim();
  Eigen::MatrixXcd m(n1, n1);
  const double hi = (2.0 * k + 1.0) * std::numbers::pi / d;
  const double lo = (2.0 * k - 1.0) * std::numbers::pi / d;
  for (int r = 0; r < n1; ++r)
    for (int c = 0; c < n1; ++c) {
      if (r == c) {
        m(r, c) = 1.0 / d;
        continue;
      }
      const double diff = r - c;
      m(r, c) = (std::polar(1.0, diff * hi) - std::polar(1.0, diff * lo)) / (cd(0.0, diff) * kTwoPi);
    }
  return {m, FockOperator::Tag::povm_element};
}

FockOperator modular_phase_pvm(int x, int delta_c, int d, const FockSpace& space) {
  if (delta_c < 1 || d % delta_c != 0 || x < 0 || x >= delta_c)
    throw InvalidArgument("modular_phase_pvm: need Delta_c | d and 0 <= x < Delta_c");
  Eigen::MatrixXcd p = Eigen::MatrixXcd::Zero(space.dim(), space.dim());
  for (int n = 0; n < d / delta_c; ++n) p += phase_povm(n * delta_c + x, d, space).matrix;
  return {p, FockOperator::Tag::povm_element};
}

FockOperator modular_number_pvm(int x, int delta_f, const FockSpace& space) {
  if (delta_f < 1 || x < 0 || x >= delta_f)
    throw InvalidArgument("modular_number_pvm: need 0 <= x < Delta_f");
  Eigen::MatrixXcd p = Eigen::MatrixXcd::Zero(space.dim(), space.dim());
  for (int n = x; n < space.dim(); n += delta_f) p(n, n) = 1.0;
  return {p, FockOperator::Tag::projector};
}

TwoModeDensity TwoModeDensity::pure(const FockSpace& space, const Eigen::VectorXcd& ket) {
  if (ket.size() != static_cast<Eigen::Index>(space.dim()) * space.dim())
    throw InvalidArgument("TwoModeDensity::pure: ket size mismatch");
  return {space, ket * ket.adjoint()};
}

double TwoModeDensity::hermiticity_error() const {
  return (rho - rho.adjoint()).cwiseAbs().maxCoeff();
}

LossResult loss_apply(const TwoModeDensity& in, double gamma_l, int k_max) {
  if (!(gamma_l >= 0.0 && gamma_l < 1.0)) throw InvalidArgument("loss_apply: gamma_l in [0, 1)");
  const int n1 = in.space.dim();
  const int kmax = k_max < 0 ? n1 - 1 : std::min(k_max, n1 - 1);
  if (gamma_l == 0.0) return {in, 0.0};

  std::vector<double> c(static_cast<std::size_t>(n1 * n1), 0.0);  // c[k * n1 + m]
  for (int k = 0; k <= kmax; ++k)
    for (int m = k; m < n1; ++m)
      c[static_cast<std::size_t>(k * n1 + m)] = std::sqrt(binomial_weight(m, k, gamma_l));
  auto coef = [&](int k, int m) { return c[static_cast<std::size_t>(k * n1 + m)]; };

  const Eigen::MatrixXcd& r = in.rho;
  // Mode B acts inside each n1 x n1 block, mode A across blocks.
  Eigen::MatrixXcd tmp = Eigen::MatrixXcd::Zero(r.rows(), r.cols());
  for (int a = 0; a < n1; ++a)
    for (int ap = 0; ap < n1; ++ap) {
      const auto src = r.block(a * n1, ap * n1, n1, n1);
      auto dst = tmp.block(a * n1, ap * n1, n1, n1);
      for (int k = 0; k <= kmax; ++k)
        for (int bp = 0; bp + k < n1; ++bp) {
          const double cb = coef(k, bp + k);
          for (int b = 0; b + k < n1; ++b) dst(b, bp) += coef(k, b + k) * cb * src(b + k, bp + k);
        }
    }
  Eigen::MatrixXcd out = Eigen::MatrixXcd::Zero(r.rows(), r.cols());
  for (int k = 0; k <= kmax; ++k)
    for (int ap = 0; ap + k < n1; ++ap)
      for (int a = 0; a + k < n1; ++a) {
        const double w = coef(k, a + k) * coef(k, ap + k);
        if (w == 0.0) continue;
        out.block(a * n1, ap * n1, n1, n1) += w * tmp.block((a + k) * n1, (ap + k) * n1, n1, n1);
      }
  LossResult res{{in.space, std::move(out)}, 0.0};
  res.deficit = in.trace() - res.state.trace();
  return res;
}

TwoModeDensity dephasing_apply(const TwoModeDensity& in, double gamma_phi) {
  if (!(gamma_phi >= 0.0)) throw InvalidArgument("dephasing_apply: gamma_phi >= 0");
  const int n1 = in.space.dim();
  std::vector<double> f(static_cast<std::size_t>(2 * n1 - 1));
  for (int delta = -(n1 - 1); delta < n1; ++delta)
    f[static_cast<std::size_t>(delta + n1 - 1)] = std::exp(-0.5 * gamma_phi * delta * delta);
  auto fac = [&](int delta) { return f[static_cast<std::size_t>(delta + n1 - 1)]; };
  TwoModeDensity out = in;
  for (int ap = 0; ap < n1; ++ap)
    for (int bp = 0; bp < n1; ++bp) {
      const int col = in.space.joint(ap, bp);
      for (int a = 0; a < n1; ++a) {
        const double fa = fac(a - ap);
        for (int b = 0; b < n1; ++b) out.rho(in.space.joint(a, b), col) *= fa * fac(b - bp);
      }
    }
  return out;
}

TwoModeDensity apply_local(const TwoModeDensity& in, const Eigen::MatrixXcd& A,
                           const Eigen::MatrixXcd& B) {
  const int n1 = in.space.dim();
  const Eigen::MatrixXcd x = left_local(in.rho, A, B, n1);
  const Eigen::MatrixXcd xa = x.adjoint();
  return {in.space, left_local(xa, A, B, n1).adjoint()};
}

Eigen::VectorXcd apply_local(const FockSpace& space, const Eigen::VectorXcd& ket,
                             const Eigen::MatrixXcd& A, const Eigen::MatrixXcd& B) {
  const int n1 = space.dim();
  Eigen::Map<const Eigen::MatrixXcd> m(ket.data(), n1, n1);  // m(b, a)
  const Eigen::MatrixXcd out = B * m * A.transpose();
  return Eigen::Map<const Eigen::VectorXcd>(out.data(), out.size());
}

TwoModeDensity rotate_local(const TwoModeDensity& in, double theta_A, double theta_B) {
  const int n1 = in.space.dim();
  Eigen::VectorXcd ph(n1 * n1);
  for (int a = 0; a < n1; ++a)
    for (int b = 0; b < n1; ++b) ph(in.space.joint(a, b)) = std::polar(1.0, theta_A * a + theta_B * b);
  TwoModeDensity out = in;
  out.rho = ph.asDiagonal() * in.rho * ph.conjugate().asDiagonal();
  return out;
}

TwoModeDensity number_project(const TwoModeDensity& in, int x_A, int x_B, int delta_f) {
  const int n1 = in.space.dim();
  Eigen::VectorXd keep(n1 * n1);
  for (int a = 0; a < n1; ++a)
    for (int b = 0; b < n1; ++b)
      keep(in.space.joint(a, b)) = (mod(a, delta_f) == x_A && mod(b, delta_f) == x_B) ? 1.0 : 0.0;
  TwoModeDensity out = in;
  out.rho = keep.asDiagonal() * in.rho * keep.asDiagonal();
  return out;
}

double max_rotated_overlap(const Eigen::VectorXcd& primitive, int m) {
  double worst = 0.0;
  for (int k = 1; k < m; ++k) {
    cd ov = 0.0;
    for (Eigen::Index n = 0; n < primitive.size(); ++n)
      ov += std::norm(primitive(n)) * std::polar(1.0, kTwoPi * mod(static_cast<long long>(k) * n, m) / m);
    worst = std::max(worst, std::norm(ov));
  }
  return worst;
}

EntangledState prepare_entangled(const FockSpace& space, const Eigen::VectorXcd& primitive, int m_i,
                                 EntangledVariant variant, double budget, int x) {
  const int n1 = space.dim();
  if (primitive.size() != n1) throw InvalidArgument("prepare_entangled: primitive size mismatch");
  if (m_i < 1) throw InvalidArgument("prepare_entangled: m_i >= 1");
  EntangledState out{space, Eigen::VectorXcd::Zero(n1 * n1), max_rotated_overlap(primitive, m_i)};
  if (out.max_overlap > budget)
    throw EngineError("rotated primitives overlap " + csv::format(out.max_overlap) +
                      " above the orthogonality budget " + csv::format(budget));

  if (variant == EntangledVariant::dual) {
    const Eigen::VectorXcd crot = crot_op(m_i, space);
    for (int a = 0; a < n1; ++a)
      for (int b = 0; b < n1; ++b)
        out.ket(space.joint(a, b)) = crot(space.joint(a, b)) * primitive(a) * primitive(b);
  } else {
    for (int k = 0; k < m_i; ++k) {
      const Eigen::VectorXcd rk = rotation_op(kTwoPi * k / m_i, space).matrix.diagonal().cwiseProduct(primitive);
      const cd phase = std::polar(1.0, -kTwoPi * mod(static_cast<long long>(k) * x, m_i) / m_i);
      for (int a = 0; a < n1; ++a)
        for (int b = 0; b < n1; ++b) out.ket(space.joint(a, b)) += phase * rk(a) * rk(b);
    }
  }
  out.ket.normalize();
  return out;
}

TwoModeDensity three_mode_preparation(const FockSpace& space, const Eigen::VectorXcd& primitive,
                                      int m_i, int x) {
  const int n1 = space.dim();
  const int D = n1 * n1;
  Eigen::MatrixXcd psi(D, n1);  // psi(joint(a, b), c)
  for (int a = 0; a < n1; ++a)
    for (int b = 0; b < n1; ++b)
      for (int c = 0; c < n1; ++c) {
        const long long phase = static_cast<long long>(a) * c + static_cast<long long>(b) * c;
        psi(space.joint(a, b), c) = primitive(a) * primitive(b) * primitive(c) *
                                    std::polar(1.0, kTwoPi * mod(phase, m_i) / m_i);
      }
  const Eigen::MatrixXcd m = phase_povm(x, m_i, space).matrix;
  return {space, psi * m.transpose() * psi.adjoint()};
}

double section_overlap(const Eigen::VectorXcd& primitive, int k, int d, const FockSpace& space) {
  return (primitive.adjoint() * phase_povm(mod(k, d), d, space).matrix * primitive)(0).real();
}

double fmax_bound(const Eigen::VectorXcd& primitive, int delta_c, int d, const FockSpace& space) {
  return 2.0 * section_overlap(primitive, (delta_c + 1) / 2, d, space);
}

}  // namespace rotor
