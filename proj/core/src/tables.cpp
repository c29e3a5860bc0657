#include "modarith/tables.hpp"

#include <cmath>
#include <cstdio>

#include "modarith/truncmul.hpp"

namespace modarith {
namespace {

struct Family {
  const char* name;
  int k;  // Toom-Cook split; 0 for schoolbook
};

constexpr Family kFamilies[] = {{"Schoolbook", 0}, {"Karatsuba-Ofman", 2}, {"Toom-Cook-3", 3}, {"Toom-Cook-4", 4}};

// Toom-Cook-k costs O(n^log_k(2k-1)); schoolbook is O(n^2).
double exponent(int k) { return k == 0 ? 2.0 : std::log(2.0 * k - 1.0) / std::log(static_cast<double>(k)); }

}  // namespace

std::vector<SplitRow> split_table() {
  std::vector<SplitRow> rows;
  for (const Family& f : kFamilies) {
    const RhoProfile p = optimal_rho(exponent(f.k));
    char buf[32];
    if (f.k == 0) {
      std::snprintf(buf, sizeof buf, "O(n^2)");
    } else {
      std::snprintf(buf, sizeof buf, "O(n^%.3f)", p.alpha);
    }
    rows.push_back({f.name, buf, p.alpha, p.rho_hat, p.c_rho});
  }
  return rows;
}

std::vector<HighProductRow> high_product_table() {
  std::vector<HighProductRow> rows;
  for (const Family& f : kFamilies) {
    HighProductRow r;
    r.algorithm = f.name;
    r.c_rho = optimal_rho(exponent(f.k)).c_rho;
    // schoolbook drops one of four half products, Toom-Cook-k one of 2k-1 points
    r.full_subproducts = f.k == 0 ? 4 : 2 * f.k - 1;
    r.subproducts = r.full_subproducts - 1;
    r.c_hat = static_cast<double>(r.subproducts) / r.full_subproducts;
    rows.push_back(r);
  }
  return rows;
}

}  // namespace modarith
