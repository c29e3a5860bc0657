#pragma once

// Affine group law on B y^2 = x^3 + A x^2 + x over a small prime field.
// Slow and obvious on purpose: it checks the projective x-only formulas.

#include <cstdint>
#include <optional>
#include <vector>

namespace modarith::cli {

class AffineCurve {
 public:
  struct Point {
    bool infinity = true;
    std::int64_t x = 0;
    std::int64_t y = 0;

    friend bool operator==(const Point&, const Point&) = default;
  };

  AffineCurve(std::int64_t p, std::int64_t a, std::int64_t b) : p_(p), a_(mod(a)), b_(mod(b)) {}

  std::int64_t p() const { return p_; }
  std::int64_t a() const { return a_; }

  /// (A + 2) / 4 mod p.
  std::int64_t a24() const { return mul(mod(a_ + 2), inv(4)); }

  bool on_curve(const Point& q) const {
    if (q.infinity) return true;
    const std::int64_t rhs = mod(mul(mul(q.x, q.x), q.x) + mul(a_, mul(q.x, q.x)) + q.x);
    return mul(b_, mul(q.y, q.y)) == rhs;
  }

  /// Every affine point plus the point at infinity, by brute force.
  std::vector<Point> points() const {
    std::vector<Point> out{Point{}};
    for (std::int64_t x = 0; x < p_; ++x) {
      for (std::int64_t y = 0; y < p_; ++y) {
        const Point q{false, x, y};
        if (on_curve(q)) out.push_back(q);
      }
    }
    return out;
  }

  Point neg(const Point& q) const { return q.infinity ? q : Point{false, q.x, mod(-q.y)}; }

  Point add(const Point& s, const Point& t) const {
    if (s.infinity) return t;
    if (t.infinity) return s;
    if (s.x == t.x && mod(s.y + t.y) == 0) return Point{};
    std::int64_t lambda;
    if (s == t) {
      lambda = mul(mod(3 * mul(s.x, s.x) + 2 * mul(a_, s.x) + 1), inv(mul(2 * b_ % p_, s.y)));
    } else {
      lambda = mul(mod(t.y - s.y), inv(mod(t.x - s.x)));
    }
    const std::int64_t x3 = mod(mul(b_, mul(lambda, lambda)) - a_ - s.x - t.x);
    const std::int64_t y3 = mod(mul(lambda, mod(s.x - x3)) - s.y);
    return Point{false, x3, y3};
  }

  Point scalar(std::uint64_t k, const Point& q) const {
    Point acc{};
    for (std::uint64_t i = 0; i < k; ++i) acc = add(acc, q);
    return acc;
  }

  std::int64_t mod(std::int64_t v) const { return ((v % p_) + p_) % p_; }
  std::int64_t mul(std::int64_t u, std::int64_t v) const { return mod(u * v); }

  std::int64_t inv(std::int64_t v) const {
    std::int64_t r = 1, base = mod(v);
    for (std::int64_t e = p_ - 2; e > 0; e >>= 1, base = mul(base, base)) {
      if (e & 1) r = mul(r, base);
    }
    return r;
  }

 private:
  std::int64_t p_;
  std::int64_t a_;
  std::int64_t b_;
};

/// x-coordinate of an affine point, or nullopt for infinity.
inline std::optional<std::int64_t> affine_x(const AffineCurve::Point& q) {
  if (q.infinity) return std::nullopt;
  return q.x;
}

}  // namespace modarith::cli
