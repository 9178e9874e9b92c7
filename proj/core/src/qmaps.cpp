#include "entwit/qmaps.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>
#include <type_traits>

namespace entwit {

QuantumMap QuantumMap::identity_map() {
  QuantumMap m;
  for (int i = 0; i < 3; ++i)
    for (int k = 0; k < 3; ++k) m.set_coeff(i, k, i, k, 1.0);
  return m;
}

double QuantumMap::self_adjointness_residual() const {
  double worst = 0.0;
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j)
      for (int k = 0; k < 3; ++k)
        for (int l = 0; l < 3; ++l)
          worst = std::max(worst,
                           std::abs(coeff(i, j, k, l) - std::conj(coeff(j, i, l, k))));
  return worst;
}

double QuantumMap::max_abs_coeff() const {
  double worst = 0.0;
  for (const complexd& v : a_) worst = std::max(worst, std::abs(v));
  return worst;
}

QuantumMap& QuantumMap::operator+=(const QuantumMap& o) {
  for (int i = 0; i < 81; ++i) a_[i] += o.a_[i];
  return *this;
}
QuantumMap& QuantumMap::operator-=(const QuantumMap& o) {
  for (int i = 0; i < 81; ++i) a_[i] -= o.a_[i];
  return *this;
}
QuantumMap& QuantumMap::operator*=(double s) {
  for (auto& v : a_) v *= s;
  return *this;
}

QuantumMap make_choi_family(double r, double r0, double r1, double r2, double c) {
  QuantumMap m;
  m.set_coeff(0, 0, 0, 0, r0);
  m.set_coeff(0, 0, 1, 1, r);
  m.set_coeff(1, 1, 1, 1, r1);
  m.set_coeff(1, 1, 2, 2, r);
  m.set_coeff(2, 2, 0, 0, r);
  m.set_coeff(2, 2, 2, 2, r2);
  m.set_coeff(0, 1, 0, 1, {-0.5 * (r + r0 + r1 - r2), c});
  m.set_coeff(0, 2, 0, 2, {-0.5 * (r + r0 - r1 + r2), -c});
  m.set_coeff(1, 2, 1, 2, {-0.5 * (r - r0 + r1 + r2), c});
  m.set_coeff(1, 0, 1, 0, std::conj(m.coeff(0, 1, 0, 1)));
  m.set_coeff(2, 0, 2, 0, std::conj(m.coeff(0, 2, 0, 2)));
  m.set_coeff(2, 1, 2, 1, std::conj(m.coeff(1, 2, 1, 2)));
  return m;
}

QuantumMap make_choi_map() { return make_choi_family(1, 1, 1, 1, 0); }

QuantumMap make_psi_t(double t) {
  QuantumMap m;
  const double t2 = t * t, t4 = t2 * t2;
  const double d = (t2 - 1.0) * (t2 - 1.0);
  const double off = -(t4 - t2 + 1.0);
  m.set_coeff(0, 0, 0, 0, d);
  m.set_coeff(0, 0, 1, 1, 1.0);
  m.set_coeff(0, 0, 2, 2, t4);
  m.set_coeff(1, 1, 0, 0, t4);
  m.set_coeff(1, 1, 1, 1, d);
  m.set_coeff(1, 1, 2, 2, 1.0);
  m.set_coeff(2, 2, 0, 0, 1.0);
  m.set_coeff(2, 2, 1, 1, t4);
  m.set_coeff(2, 2, 2, 2, d);
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j)
      if (i != j) m.set_coeff(i, j, i, j, off);
  return m;
}

QuantumMap make_psi_pq(double p, double q) {
  QuantumMap m;
  const double pq = p * q;
  const double off = -pq * (1.0 - q * q + p * p * q * q);
  const double cor =
      (pq - 1.0) * (p * p + pq - p * p * p * q - q * q + p * p * q * q);
  m.set_coeff(0, 0, 0, 0, p * p * (pq - 1.0) * (pq - 1.0));
  m.set_coeff(0, 0, 1, 1, q * (2.0 * p - q));
  m.set_coeff(0, 1, 0, 1, off);
  m.set_coeff(0, 2, 0, 2, cor);
  m.set_coeff(1, 0, 1, 0, off);
  m.set_coeff(1, 1, 0, 0, p * p * q * q * q * (2.0 * p - q));
  m.set_coeff(1, 1, 1, 1, q * q * (pq - 1.0) * (pq - 1.0));
  m.set_coeff(1, 1, 2, 2, q * (2.0 * p - q));
  m.set_coeff(1, 2, 1, 2, off);
  m.set_coeff(2, 0, 2, 0, cor);
  m.set_coeff(2, 1, 2, 1, off);
  m.set_coeff(2, 2, 0, 0, q * (2.0 * p - q) * (1.0 - p * p * q * q));
  m.set_coeff(2, 2, 1, 1, p * p * q * q * q * (2.0 * p - q));
  m.set_coeff(2, 2, 2, 2, p * p * (pq - 1.0) * (pq - 1.0));
  return m;
}

double MNFamilyParams::b() const {
  return std::min(-2.0 * m * n - m * m * n * n - n * n,
                  -2.0 * m * n - m * m * n * n - m * m);
}

double MNFamilyParams::c() const {
  return std::max(-0.5 * m * n * (1.0 + m * n - std::sqrt(1.0 - n * n)),
                  -0.5 * m * n * (1.0 + m * n - std::sqrt(1.0 - m * m)));
}

QuantumMap make_psi_mn(double m, double n) {
  const MNFamilyParams params{m, n};
  const double b = params.b();
  const double c = params.c();
  QuantumMap w;
  w.add_coeff(0, 0, 0, 0, n * n);
  w.add_coeff(0, 0, 0, 1, n * n * m);
  w.add_coeff(0, 0, 1, 0, n * n * m);
  w.add_coeff(0, 0, 1, 1, n * n * m * m);
  w.add_coeff(0, 1, 0, 0, -m * n * n);
  w.add_coeff(0, 1, 0, 1, m * n);
  w.add_coeff(0, 1, 1, 0, -m * m * n * n);
  w.add_coeff(0, 1, 1, 1, m * m * n);
  w.add_coeff(1, 0, 0, 0, -m * n * n);
  w.add_coeff(1, 0, 1, 0, m * n);
  w.add_coeff(1, 0, 0, 1, -m * m * n * n);
  w.add_coeff(1, 0, 1, 1, m * m * n);
  w.add_coeff(0, 2, 0, 2, -n * (m + n));
  w.add_coeff(0, 2, 1, 2, -n * (m + n) * m);
  w.add_coeff(1, 1, 0, 0, m * m * n * n);
  w.add_coeff(1, 1, 0, 1, -m * m * n);
  w.add_coeff(1, 1, 1, 0, -m * m * n);
  w.add_coeff(1, 1, 1, 1, m * m);
  w.add_coeff(1, 2, 0, 2, m * (m + n) * n);
  w.add_coeff(1, 2, 1, 2, -m * (m + n));
  w.add_coeff(2, 0, 2, 0, -n * (m + n));
  w.add_coeff(2, 0, 2, 1, -n * (m + n) * m);
  w.add_coeff(2, 1, 2, 0, m * (m + n) * n);
  w.add_coeff(2, 1, 2, 1, -m * (m + n));
  w.add_coeff(2, 2, 2, 2, (m + n) * (m + n));

  w.add_coeff(0, 0, 1, 1, b);
  w.add_coeff(0, 2, 0, 2, -b);
  w.add_coeff(1, 1, 2, 2, b);
  w.add_coeff(1, 2, 1, 2, -b);
  w.add_coeff(2, 0, 2, 0, -b);
  w.add_coeff(2, 1, 2, 1, -b);
  w.add_coeff(2, 2, 0, 0, b);
  w.add_coeff(2, 2, 2, 2, b);

  w.add_coeff(0, 1, 0, 1, c);
  w.add_coeff(0, 1, 1, 0, -c);
  w.add_coeff(1, 0, 1, 0, c);
  w.add_coeff(1, 0, 0, 1, -c);
  return w;
}

QuantumMap make_map(const FamilyParams& params) {
  return std::visit(
      [](const auto& p) -> QuantumMap {
        using T = std::decay_t<decltype(p)>;
        if constexpr (std::is_same_v<T, ChoiFamilyParams>)
          return make_choi_family(p.r, p.r0, p.r1, p.r2, p.c);
        else if constexpr (std::is_same_v<T, TFamilyParams>)
          return make_psi_t(p.t);
        else if constexpr (std::is_same_v<T, PQFamilyParams>)
          return make_psi_pq(p.p, p.q);
        else
          return make_psi_mn(p.m, p.n);
      },
      params);
}

HermitianMatrix apply(const QuantumMap& psi, const HermitianMatrix& z) {
  if (z.dim() != 3) throw InvalidInput("apply: map acts on 3x3 matrices");
  HermitianMatrix out(3);
  for (int i = 0; i < 3; ++i) {
    for (int j = i; j < 3; ++j) {
      complexd w = 0.0;
      for (int k = 0; k < 3; ++k)
        for (int l = 0; l < 3; ++l) w += psi.coeff(i, j, k, l) * z(k, l);
      out.set(i, j, w);
    }
  }
  return out;
}

QuantumMap adjoint(const QuantumMap& psi) {
  QuantumMap out;
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j)
      for (int k = 0; k < 3; ++k)
        for (int l = 0; l < 3; ++l) out.set_coeff(i, j, k, l, psi.coeff(l, k, j, i));
  return out;
}

QuantumMap transpose_compose(const QuantumMap& psi) {
  QuantumMap out;
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j)
      for (int k = 0; k < 3; ++k)
        for (int l = 0; l < 3; ++l) out.set_coeff(i, j, k, l, psi.coeff(j, i, k, l));
  return out;
}

QuantumMap conjugate(const QuantumMap& psi, const Complex3x3& q) {
  QuantumMap out;
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j)
      for (int k = 0; k < 3; ++k)
        for (int l = 0; l < 3; ++l) {
          complexd w = 0.0;
          for (int u = 0; u < 3; ++u)
            for (int v = 0; v < 3; ++v)
              w += q[i][u] * psi.coeff(u, v, k, l) * std::conj(q[j][v]);
          out.set_coeff(i, j, k, l, w);
        }
  return out;
}

QuantumMap unitalize(const QuantumMap& psi, double epsilon) {
  HermitianMatrix at_identity = apply(psi, HermitianMatrix::identity(3));
  for (int i = 0; i < 3; ++i) at_identity.add(i, i, 3.0 * epsilon);
  const HermitianMatrix s = inv_sqrt(at_identity);

  QuantumMap shifted = psi;
  for (int i = 0; i < 3; ++i)
    for (int k = 0; k < 3; ++k) shifted.add_coeff(i, i, k, k, epsilon);

  Complex3x3 q;
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) q[i][j] = s(i, j);
  return conjugate(shifted, q);
}

bool in_region_R(double p, double q) {
  const double inv_sqrt2 = 1.0 / std::sqrt(2.0);
  const double sqrt2 = std::sqrt(2.0);
  return p > 0.0 && p < inv_sqrt2 && q > 0.0 && q < sqrt2 && 2.0 * p - q >= 0.0 &&
         (p * p - 1.0) * (p * p - 1.0) * q * q - p * p >= 0.0;
}

bool in_region_A(double m, double n) {
  return std::abs(m) <= 1.0 && std::abs(n) <= 1.0 &&
         -2.0 * m * n - m * m * n * n - n * n >= 0.0 &&
         -2.0 * m * n - m * m * n * n - m * m >= 0.0;
}

bool choi_family_is_positive(double r, double r0, double r1, double r2, double c) {
  const double sum = r + r0 + r1 + r2;
  const double big = r0 * r1 + r0 * r2 + r1 * r2 - 0.25 * sum * sum - c * c;
  return r >= 0.0 && r0 >= 0.0 && r1 >= 0.0 && r2 >= 0.0 && big + r * r2 >= 0.0 &&
         big + r * r1 >= 0.0 && big + r * r0 >= 0.0;
}

namespace {

// Box-Muller over raw mt19937_64 output. std::normal_distribution is not
// pinned by the standard, and the sampled fixtures must reproduce everywhere.
class GaussianSource {
 public:
  explicit GaussianSource(std::uint64_t seed) : rng_(seed) {}

  double next() {
    if (have_spare_) {
      have_spare_ = false;
      return spare_;
    }
    const double u1 = uniform_open();
    const double u2 = uniform_open();
    const double radius = std::sqrt(-2.0 * std::log(u1));
    const double angle = 2.0 * 3.14159265358979323846 * u2;
    spare_ = radius * std::sin(angle);
    have_spare_ = true;
    return radius * std::cos(angle);
  }

 private:
  double uniform_open() {
    // (0,1): 53-bit mantissa shifted off the raw draw, offset from zero
    return (static_cast<double>(rng_() >> 11) + 0.5) * (1.0 / 9007199254740992.0);
  }

  std::mt19937_64 rng_;
  double spare_ = 0.0;
  bool have_spare_ = false;
};

}  // namespace

SamplingReport verify_positivity_sampling(const QuantumMap& psi, int trials,
                                          std::uint64_t seed) {
  if (trials < 1) throw InvalidInput("verify_positivity_sampling: trials must be >= 1");
  GaussianSource gauss(seed);
  SamplingReport report{std::numeric_limits<double>::infinity(), {}};
  for (int trial = 0; trial < trials; ++trial) {
    std::array<complexd, 3> x;
    double norm2 = 0.0;
    for (auto& comp : x) {
      comp = {gauss.next(), gauss.next()};
      norm2 += std::norm(comp);
    }
    if (norm2 == 0.0) continue;
    const double inv_norm = 1.0 / std::sqrt(norm2);
    for (auto& comp : x) comp *= inv_norm;

    HermitianMatrix proj(3);
    for (int i = 0; i < 3; ++i)
      for (int j = i; j < 3; ++j) proj.set(i, j, x[i] * std::conj(x[j]));
    const Spectrum s = eig_herm(apply(psi, proj));
    if (s.eigenvalues.front() < report.min_eigenvalue_found) {
      report.min_eigenvalue_found = s.eigenvalues.front();
      report.worst_point = x;
    }
  }
  return report;
}

}  // namespace entwit
