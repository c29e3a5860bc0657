#include "modarith/truncmul.hpp"

#include <cmath>

#include "modarith/errors.hpp"

namespace modarith {

double c_rho(double alpha, double rho) {
  if (!(alpha > 1.0 && alpha <= 2.0)) throw ContractViolation("c_rho: alpha must lie in ]1, 2]");
  if (!(rho >= 0.5 && rho <= 1.0)) throw ContractViolation("c_rho: rho must lie in [0.5, 1]");
  return std::pow(rho, alpha) / (1.0 - 2.0 * std::pow(1.0 - rho, alpha));
}

RhoProfile optimal_rho(double alpha) {
  if (!(alpha > 1.0 && alpha <= 2.0)) throw ContractViolation("optimal_rho: alpha must lie in ]1, 2]");
  RhoProfile p;
  p.alpha = alpha;
  p.rho_hat = 1.0 - std::exp2(-1.0 / (alpha - 1.0));
  p.c_rho = c_rho(alpha, p.rho_hat);
  return p;
}

double default_rho(MulKind kind) noexcept {
  switch (kind) {
    case MulKind::schoolbook:
      return 0.5;
    case MulKind::karatsuba:
      return optimal_rho(std::log2(3.0)).rho_hat;
    case MulKind::toom3:
      return optimal_rho(std::log2(5.0) / std::log2(3.0)).rho_hat;
  }
  return 0.5;
}

}  // namespace modarith
