#pragma once

#include <string>
#include <vector>

namespace modarith {

/// Optimal split for the low-half product of one multiplier family.
struct SplitRow {
  std::string algorithm;
  std::string complexity;  ///< e.g. "O(n^1.585)"
  double alpha = 2.0;
  double rho_hat = 0.5;
  double c_rho = 0.5;
};

/// Relative cost of the high product b*m in the optimised REDC variants:
/// sub-products used over sub-products of a full product.
struct HighProductRow {
  std::string algorithm;
  double c_rho = 0.5;
  int subproducts = 3;
  int full_subproducts = 4;
  double c_hat = 0.75;
};

/// Schoolbook, Karatsuba-Ofman, Toom-Cook-3 and Toom-Cook-4 rows.
std::vector<SplitRow> split_table();
std::vector<HighProductRow> high_product_table();

}  // namespace modarith
