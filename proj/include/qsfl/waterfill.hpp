#pragma once

#include <vector>

#include "qsfl/errors.hpp"

namespace qsfl::waterfill {

struct Allocation {
  std::vector<double> rates;  // bits per sample, aligned with the input order
  double water_level = 0.0;   // lambda: rates[j] = max(log2(var[j]/lambda), 0)
  int active_blocks = 0;      // n, count of strictly positive rates
};

// Reverse water-filling of total_rate bits across blocks with the given
// variances (descending). Minimizes sum var_j 2^(-R_j) subject to
// sum R_j = total_rate, R_j >= 0. Solved in the log2 domain via prefix sums;
// a water level exactly equal to a variance is classified into the larger
// active set. total_rate = 0 yields all-zero rates with lambda = var[0].
// Throws EmptyFrame for an empty variance list, DomainError for unsorted
// input or negative total_rate.
Allocation allocate(const std::vector<double>& sorted_variances, double total_rate);

// Distortion value of the optimal allocation, n*lambda + sum_{j>n} var_j,
// without materializing rates.
double distortion_sum(const std::vector<double>& sorted_variances, double total_rate);

}  // namespace qsfl::waterfill
