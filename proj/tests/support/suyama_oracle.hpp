#pragma once

// Brute-force prediction of what stage 1 finds for a tiny prime p dividing n:
// builds the Suyama curve mod p by hand, walks its affine group law and asks
// whether [k]P0 is the identity.

#include <cstdint>
#include <optional>

#include "cli/affine_curve.hpp"

namespace modarith::testing {

struct SuyamaModP {
  bool degenerate = false;  ///< 16 u^3 v = 0 mod p: curve setup divides by zero
  bool singular = false;    ///< A = +-2 mod p: a nodal cubic
  bool start_is_node = false;  ///< start point is the singular point itself
  std::int64_t a = 0;
  std::int64_t x0 = 0;
  std::uint64_t point_order = 0;  ///< order of the start point, when neither flag is set
  std::uint64_t group_order = 0;  ///< smooth points only
};

inline SuyamaModP suyama_mod_p(std::int64_t p, std::uint64_t sigma) {
  const cli::AffineCurve f(p, 0, 1);  // field helper only
  SuyamaModP r;
  const std::int64_t s = static_cast<std::int64_t>(sigma % static_cast<std::uint64_t>(p));
  const std::int64_t u = f.mod(f.mul(s, s) - 5), v = f.mul(4, s);
  const std::int64_t u3 = f.mul(f.mul(u, u), u), v3 = f.mul(f.mul(v, v), v);
  const std::int64_t den = f.mul(f.mul(16, u3), v);
  if (den == 0) {
    r.degenerate = true;
    return r;
  }
  const std::int64_t vmu = f.mod(v - u);
  const std::int64_t num = f.mul(f.mul(f.mul(vmu, vmu), vmu), f.mod(3 * u + v));
  const std::int64_t a24 = f.mul(num, f.inv(den));
  r.a = f.mod(4 * a24 - 2);
  r.x0 = f.mul(u3, f.inv(v3));
  // for A = 2 the node is (-1, 0), for A = -2 it is (1, 0); the smooth
  // points still form a group under chord and tangent
  r.singular = r.a == 2 || r.a == p - 2;
  const std::int64_t node_x = r.a == 2 ? p - 1 : 1;
  if (r.singular && r.x0 == node_x) {
    r.start_is_node = true;
    return r;
  }
  // pick B so that (x0, 1) lies on B y^2 = x^3 + A x^2 + x
  const std::int64_t rhs = f.mod(f.mul(f.mul(r.x0, r.x0), r.x0) + f.mul(r.a, f.mul(r.x0, r.x0)) + r.x0);
  const cli::AffineCurve curve(p, r.a, rhs == 0 ? 1 : rhs);
  const cli::AffineCurve::Point p0{false, r.x0, rhs == 0 ? 0 : 1};
  r.group_order = curve.points().size() - (r.singular ? 1 : 0);
  cli::AffineCurve::Point acc = p0;
  r.point_order = 1;
  while (!acc.infinity) {
    acc = curve.add(acc, p0);
    ++r.point_order;
  }
  return r;
}

/// The gcd stage 1 reports for n = product of the distinct small primes
/// `primes`, or nullopt when a start point is a node modulo one of them. A
/// setup that divides by zero modulo some primes returns their product
/// without running the ladder; otherwise each prime whose start point order
/// divides k contributes.
template <class Primes, class Factors>
std::optional<std::uint64_t> predicted_gcd(const Primes& primes, std::uint64_t sigma, const Factors& factors) {
  std::uint64_t lucky = 1, hit = 1;
  for (std::int64_t p : primes) {
    const SuyamaModP c = suyama_mod_p(p, sigma);
    if (c.degenerate) {
      lucky *= static_cast<std::uint64_t>(p);
      continue;
    }
    if (c.start_is_node) return std::nullopt;
    std::uint64_t k_mod = 1 % c.point_order;
    for (std::uint64_t q : factors) k_mod = k_mod * (q % c.point_order) % c.point_order;
    if (k_mod == 0) hit *= static_cast<std::uint64_t>(p);
  }
  return lucky != 1 ? lucky : hit;
}

}  // namespace modarith::testing
