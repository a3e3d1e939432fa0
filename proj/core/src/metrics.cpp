#include "tgaicc/metrics.hpp"

#include <algorithm>
#include <cmath>

#include "tgaicc/error.hpp"

namespace tgaicc {

namespace {

void require_comparable(const Labeling& a, const Labeling& b) {
  if (a.size() != b.size()) {
    throw Error("labeling length mismatch: " + std::to_string(a.size()) + " vs " +
                std::to_string(b.size()));
  }
  if (a.size() < 2) throw Error("metric needs at least 2 items");
}

__extension__ using i128 = __int128;

i128 pairs(std::int64_t x) { return static_cast<i128>(x) * (x - 1) / 2; }

// ln(0!) .. ln(n!)
std::vector<double> log_factorials(std::int64_t n) {
  std::vector<double> table(static_cast<std::size_t>(n) + 1, 0.0);
  for (std::int64_t i = 2; i <= n; ++i) {
    table[static_cast<std::size_t>(i)] = table[static_cast<std::size_t>(i - 1)] + std::log(static_cast<double>(i));
  }
  return table;
}

}  // namespace

ContingencyTable contingency(const Labeling& a, const Labeling& b) {
  if (a.size() != b.size()) {
    throw Error("labeling length mismatch: " + std::to_string(a.size()) + " vs " +
                std::to_string(b.size()));
  }
  ContingencyTable t;
  t.rows = static_cast<std::size_t>(a.k());
  t.cols = static_cast<std::size_t>(b.k());
  t.counts.assign(t.rows * t.cols, 0);
  t.row_sums.assign(t.rows, 0);
  t.col_sums.assign(t.cols, 0);
  t.n = static_cast<std::int64_t>(a.size());
  for (std::size_t x = 0; x < a.size(); ++x) {
    const auto i = static_cast<std::size_t>(a[x]);
    const auto j = static_cast<std::size_t>(b[x]);
    ++t.counts[i * t.cols + j];
    ++t.row_sums[i];
    ++t.col_sums[j];
  }
  return t;
}

MetricScore ari(const Labeling& a, const Labeling& b) {
  require_comparable(a, b);
  const auto t = contingency(a, b);

  i128 index = 0;
  for (auto c : t.counts) index += pairs(c);
  i128 sum_a = 0;
  for (auto s : t.row_sums) sum_a += pairs(s);
  i128 sum_b = 0;
  for (auto s : t.col_sums) sum_b += pairs(s);
  const i128 total = pairs(t.n);

  // (index - sum_a*sum_b/total) / ((sum_a+sum_b)/2 - sum_a*sum_b/total),
  // multiplied through by 2*total.
  const i128 numerator = 2 * (index * total - sum_a * sum_b);
  const i128 denominator = (sum_a + sum_b) * total - 2 * sum_a * sum_b;
  if (denominator == 0) return {1.0};  // both single-cluster or both all-singletons
  return {static_cast<double>(static_cast<long double>(numerator) /
                              static_cast<long double>(denominator))};
}

double entropy(std::span<const std::int64_t> sizes, std::int64_t n) {
  double h = 0.0;
  const double dn = static_cast<double>(n);
  for (auto s : sizes) {
    if (s == 0) continue;
    const double p = static_cast<double>(s) / dn;
    h -= p * std::log(p);
  }
  return h;
}

double mutual_information(const ContingencyTable& t) {
  const double n = static_cast<double>(t.n);
  double mi = 0.0;
  for (std::size_t i = 0; i < t.rows; ++i) {
    for (std::size_t j = 0; j < t.cols; ++j) {
      const auto nij = t.at(i, j);
      if (nij == 0) continue;
      const double v = static_cast<double>(nij);
      mi += v / n *
            std::log(n * v / (static_cast<double>(t.row_sums[i]) * static_cast<double>(t.col_sums[j])));
    }
  }
  return std::max(mi, 0.0);
}

double expected_mutual_information(const ContingencyTable& t) {
  const std::int64_t n = t.n;
  const double dn = static_cast<double>(n);
  const auto lf = log_factorials(n);
  auto L = [&](std::int64_t x) { return lf[static_cast<std::size_t>(x)]; };

  double emi = 0.0;
  for (auto a : t.row_sums) {
    for (auto b : t.col_sums) {
      const std::int64_t lo = std::max<std::int64_t>(1, a + b - n);
      const std::int64_t hi = std::min(a, b);
      // Terms of P(nij) that do not depend on nij.
      const double fixed = L(a) + L(b) + L(n - a) + L(n - b) - L(n);
      for (std::int64_t nij = lo; nij <= hi; ++nij) {
        const double v = static_cast<double>(nij);
        const double log_p = fixed - L(nij) - L(a - nij) - L(b - nij) - L(n - a - b + nij);
        const double term = v / dn * std::log(dn * v / (static_cast<double>(a) * static_cast<double>(b)));
        emi += term * std::exp(log_p);
      }
    }
  }
  return emi;
}

MetricScore ami(const Labeling& a, const Labeling& b) {
  require_comparable(a, b);
  const std::size_t n = a.size();
  const bool both_single = a.k() == 1 && b.k() == 1;
  const bool both_singletons = static_cast<std::size_t>(a.k()) == n && static_cast<std::size_t>(b.k()) == n;
  if (both_single || both_singletons) return {1.0};
  if (a == b) return {1.0};  // same partition; avoids MI vs entropy rounding

  const auto t = contingency(a, b);
  const double mi = mutual_information(t);
  const double emi = expected_mutual_information(t);
  const double h_a = entropy(t.row_sums, t.n);
  const double h_b = entropy(t.col_sums, t.n);
  const double denominator = 0.5 * (h_a + h_b) - emi;
  if (denominator == 0.0) return {0.0};
  return {(mi - emi) / denominator};
}

double anmi(const Labeling& candidate, const Ensemble& ensemble) {
  if (ensemble.size() == 0) throw Error("empty ensemble");
  double sum = 0.0;
  for (const auto& m : ensemble.members()) sum += ami(candidate, m.labeling).value;
  return sum / static_cast<double>(ensemble.size());
}

}  // namespace tgaicc
