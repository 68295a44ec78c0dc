#pragma once

#include <complex>
#include <cstddef>
#include <vector>

namespace rootflow {

/// Minimum-cost perfect assignment for a square cost matrix (row-major,
/// n x n): out[i] is the column matched to row i. Hungarian algorithm up to
/// `exact_limit` rows, greedy nearest-pair above.
std::vector<std::size_t> assignment(const std::vector<double>& cost, std::size_t n,
                                    std::size_t exact_limit = 256);

/// Largest displacement |a_i - b_sigma(i)| under the assignment minimizing the
/// total displacement. Sizes must agree.
double matching_distance(const std::vector<std::complex<double>>& a, const std::vector<std::complex<double>>& b);

}  // namespace rootflow
