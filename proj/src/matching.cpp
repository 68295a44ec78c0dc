#include "rootflow/matching.hpp"

#include <algorithm>
#include <limits>
#include <numeric>

#include "rootflow/errors.hpp"

namespace rootflow {
namespace {

// Shortest augmenting path version with potentials, O(n^3).
std::vector<std::size_t> hungarian(const std::vector<double>& cost, std::size_t n) {
  const double inf = std::numeric_limits<double>::infinity();
  std::vector<double> u(n + 1, 0.0), v(n + 1, 0.0);
  std::vector<std::size_t> p(n + 1, 0), way(n + 1, 0);
  for (std::size_t i = 1; i <= n; ++i) {
    p[0] = i;
    std::size_t j0 = 0;
    std::vector<double> minv(n + 1, inf);
    std::vector<char> used(n + 1, 0);
    do {
      used[j0] = 1;
      const std::size_t i0 = p[j0];
      double delta = inf;
      std::size_t j1 = 0;
      for (std::size_t j = 1; j <= n; ++j) {
        if (used[j]) continue;
        const double cur = cost[(i0 - 1) * n + (j - 1)] - u[i0] - v[j];
        if (cur < minv[j]) {
          minv[j] = cur;
          way[j] = j0;
        }
        if (minv[j] < delta) {
          delta = minv[j];
          j1 = j;
        }
      }
      for (std::size_t j = 0; j <= n; ++j) {
        if (used[j]) {
          u[p[j]] += delta;
          v[j] -= delta;
        } else {
          minv[j] -= delta;
        }
      }
      j0 = j1;
    } while (p[j0] != 0);
    do {
      const std::size_t j1 = way[j0];
      p[j0] = p[j1];
      j0 = j1;
    } while (j0 != 0);
  }
  std::vector<std::size_t> out(n);
  for (std::size_t j = 1; j <= n; ++j) out[p[j] - 1] = j - 1;
  return out;
}

std::vector<std::size_t> greedy(const std::vector<double>& cost, std::size_t n) {
  std::vector<std::size_t> order(n * n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return cost[a] < cost[b]; });
  std::vector<std::size_t> out(n, n);
  std::vector<char> col_used(n, 0);
  std::size_t matched = 0;
  for (std::size_t idx : order) {
    const std::size_t i = idx / n;
    const std::size_t j = idx % n;
    if (out[i] != n || col_used[j]) continue;
    out[i] = j;
    col_used[j] = 1;
    if (++matched == n) break;
  }
  return out;
}

}  // namespace

std::vector<std::size_t> assignment(const std::vector<double>& cost, std::size_t n, std::size_t exact_limit) {
  if (cost.size() != n * n) {
    throw Error(ErrorCode::InvalidArgument, "cost matrix must be n x n", {{"n", n}, {"size", cost.size()}});
  }
  if (n == 0) return {};
  return n <= exact_limit ? hungarian(cost, n) : greedy(cost, n);
}

double matching_distance(const std::vector<std::complex<double>>& a, const std::vector<std::complex<double>>& b) {
  if (a.size() != b.size()) {
    throw Error(ErrorCode::InvalidArgument, "matching needs equal sizes", {{"a", a.size()}, {"b", b.size()}});
  }
  const std::size_t n = a.size();
  std::vector<double> cost(n * n);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) cost[i * n + j] = std::abs(a[i] - b[j]);
  }
  const auto sigma = assignment(cost, n);
  double worst = 0.0;
  for (std::size_t i = 0; i < n; ++i) worst = std::max(worst, cost[i * n + sigma[i]]);
  return worst;
}

}  // namespace rootflow
