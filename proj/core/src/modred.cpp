#include "modarith/modred.hpp"

#include <string>

namespace modarith {

std::string_view to_string(Bound b) noexcept {
  switch (b) {
    case Bound::canonical:
      return "canonical";
    case Bound::lt_2m:
      return "lt_2m";
    case Bound::lt_2rp:
      return "lt_2rp";
    case Bound::lt_3rp:
      return "lt_3rp";
    case Bound::lt_13_4rp:
      return "lt_13_4rp";
  }
  return "?";
}

std::string_view to_string(RedcStrategy s) noexcept {
  switch (s) {
    case RedcStrategy::classic:
      return "classic";
    case RedcStrategy::opt_schoolbook:
      return "opt-schoolbook";
    case RedcStrategy::opt_split_k2:
      return "opt-k2";
    case RedcStrategy::opt_split_k3:
      return "opt-k3";
  }
  return "?";
}

RedcStrategy parse_strategy(std::string_view name) {
  for (RedcStrategy s : {RedcStrategy::classic, RedcStrategy::opt_schoolbook, RedcStrategy::opt_split_k2,
                         RedcStrategy::opt_split_k3}) {
    if (name == to_string(s)) return s;
  }
  throw ConfigError("unknown REDC strategy '" + std::string(name) + "'");
}

MulConfig mul_config_for(RedcStrategy s) noexcept {
  MulConfig cfg;
  if (s == RedcStrategy::opt_split_k2) cfg.kind = MulKind::karatsuba;
  if (s == RedcStrategy::opt_split_k3) cfg.kind = MulKind::toom3;
  return cfg;
}

}  // namespace modarith
