#include "ranklab/stats.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstdint>
#include <limits>
#include <numeric>

#include "ranklab/error.hpp"

namespace ranklab::stats {

namespace {

constexpr double kEps = 1e-15;
constexpr int kMaxIter = 10000;

double gamma_series(double a, double x) {
  double ap = a;
  double sum = 1.0 / a;
  double del = sum;
  for (int n = 0; n < kMaxIter; ++n) {
    ap += 1.0;
    del *= x / ap;
    sum += del;
    if (std::abs(del) < std::abs(sum) * kEps) break;
  }
  return sum * std::exp(-x + a * std::log(x) - std::lgamma(a));
}

// Modified Lentz evaluation of the continued fraction for Q(a, x).
double gamma_continued_fraction(double a, double x) {
  constexpr double tiny = std::numeric_limits<double>::min() / kEps;
  double b = x + 1.0 - a;
  double c = 1.0 / tiny;
  double d = 1.0 / b;
  double h = d;
  for (int i = 1; i < kMaxIter; ++i) {
    const double an = -i * (i - a);
    b += 2.0;
    d = an * d + b;
    if (std::abs(d) < tiny) d = tiny;
    c = b + an / c;
    if (std::abs(c) < tiny) c = tiny;
    d = 1.0 / d;
    const double del = d * c;
    h *= del;
    if (std::abs(del - 1.0) < kEps) break;
  }
  return std::exp(-x + a * std::log(x) - std::lgamma(a)) * h;
}

const char* alternative_name(Alternative alt) {
  switch (alt) {
    case Alternative::Greater:
      return "greater";
    case Alternative::Less:
      return "less";
    case Alternative::TwoSided:
      return "two-sided";
  }
  return "greater";
}

// Midranks (1-based) of the pooled sample, in pooled order.
std::vector<double> midranks(const std::vector<double>& pooled, double& tie_term) {
  const std::size_t n = pooled.size();
  std::vector<std::size_t> idx(n);
  std::iota(idx.begin(), idx.end(), std::size_t{0});
  std::stable_sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) { return pooled[a] < pooled[b]; });
  std::vector<double> ranks(n);
  tie_term = 0.0;
  std::size_t i = 0;
  while (i < n) {
    std::size_t j = i;
    while (j + 1 < n && pooled[idx[j + 1]] == pooled[idx[i]]) ++j;
    const double rank = 0.5 * static_cast<double>(i + j) + 1.0;
    for (std::size_t k = i; k <= j; ++k) ranks[idx[k]] = rank;
    const double t = static_cast<double>(j - i + 1);
    tie_term += t * t * t - t;
    i = j + 1;
  }
  return ranks;
}

}  // namespace

double normal_sf(double z) { return 0.5 * std::erfc(z / std::sqrt(2.0)); }
double normal_cdf(double z) { return 0.5 * std::erfc(-z / std::sqrt(2.0)); }

double gamma_p(double a, double x) {
  if (a <= 0.0) throw DomainError("gamma_p requires a > 0");
  if (x <= 0.0) return 0.0;
  if (x < a + 1.0) return gamma_series(a, x);
  return 1.0 - gamma_continued_fraction(a, x);
}

double gamma_q(double a, double x) {
  if (a <= 0.0) throw DomainError("gamma_q requires a > 0");
  if (x <= 0.0) return 1.0;
  if (x < a + 1.0) return 1.0 - gamma_series(a, x);
  return gamma_continued_fraction(a, x);
}

double chi_square_sf(double x, double dof) { return gamma_q(0.5 * dof, 0.5 * x); }

TestResult mann_whitney_u(std::span<const double> sample_a, std::span<const double> sample_b,
                          Alternative alternative, MwuMethod method) {
  const std::size_t na = sample_a.size();
  const std::size_t nb = sample_b.size();
  if (na == 0 || nb == 0) throw InsufficientDataError("Mann-Whitney U needs two nonempty samples");
  std::vector<double> pooled(sample_a.begin(), sample_a.end());
  pooled.insert(pooled.end(), sample_b.begin(), sample_b.end());
  const std::size_t n = pooled.size();

  double tie_term = 0.0;
  const std::vector<double> ranks = midranks(pooled, tie_term);
  double rank_sum_a = 0.0;
  for (std::size_t i = 0; i < na; ++i) rank_sum_a += ranks[i];
  const double u_a = rank_sum_a - 0.5 * static_cast<double>(na * (na + 1));

  TestResult result;
  result.statistic = u_a;
  result.alternative = alternative_name(alternative);

  const bool constant = std::all_of(pooled.begin(), pooled.end(), [&](double v) { return v == pooled.front(); });
  if (constant) {
    result.method = "mann-whitney-u/degenerate";
    result.p_value = 0.5;
    result.flagged = true;
    return result;
  }

  const bool exact = method == MwuMethod::Exact || (method == MwuMethod::Auto && n <= kMwuExactLimit);
  if (exact) {
    if (n > 25) throw DomainError("exact Mann-Whitney enumeration is limited to 25 observations");
    // Enumerate every assignment of na pooled positions to sample a.
    const double tol = 1e-9;
    std::uint64_t ge = 0, le = 0, total = 0;
    const std::uint32_t limit = std::uint32_t{1} << n;
    for (std::uint32_t mask = 0; mask < limit; ++mask) {
      if (static_cast<std::size_t>(std::popcount(mask)) != na) continue;
      double rs = 0.0;
      for (std::size_t i = 0; i < n; ++i) {
        if (mask & (std::uint32_t{1} << i)) rs += ranks[i];
      }
      const double u = rs - 0.5 * static_cast<double>(na * (na + 1));
      ++total;
      if (u >= u_a - tol) ++ge;
      if (u <= u_a + tol) ++le;
    }
    const double p_ge = static_cast<double>(ge) / static_cast<double>(total);
    const double p_le = static_cast<double>(le) / static_cast<double>(total);
    result.method = "mann-whitney-u/exact";
    switch (alternative) {
      case Alternative::Greater:
        result.p_value = p_ge;
        break;
      case Alternative::Less:
        result.p_value = p_le;
        break;
      case Alternative::TwoSided:
        result.p_value = std::min(1.0, 2.0 * std::min(p_ge, p_le));
        break;
    }
    return result;
  }

  const double dna = static_cast<double>(na);
  const double dnb = static_cast<double>(nb);
  const double dn = static_cast<double>(n);
  const double mu = 0.5 * dna * dnb;
  const double var = dna * dnb / 12.0 * ((dn + 1.0) - tie_term / (dn * (dn - 1.0)));
  const double sd = std::sqrt(var);
  result.method = "mann-whitney-u/normal";
  switch (alternative) {
    case Alternative::Greater:
      result.p_value = normal_sf((u_a - mu - 0.5) / sd);
      break;
    case Alternative::Less:
      result.p_value = normal_cdf((u_a - mu + 0.5) / sd);
      break;
    case Alternative::TwoSided: {
      const double z = std::max(0.0, std::abs(u_a - mu) - 0.5) / sd;
      result.p_value = std::min(1.0, 2.0 * normal_sf(z));
      break;
    }
  }
  return result;
}

TestResult chi_square_contingency(const std::vector<std::vector<double>>& table) {
  const std::size_t rows = table.size();
  if (rows < 2) throw ValidationError("contingency table needs at least two rows");
  const std::size_t cols = table.front().size();
  if (cols < 2) throw ValidationError("contingency table needs at least two columns");
  std::vector<double> row_sum(rows, 0.0), col_sum(cols, 0.0);
  double total = 0.0;
  for (std::size_t r = 0; r < rows; ++r) {
    if (table[r].size() != cols) throw ValidationError("contingency table rows differ in length");
    for (std::size_t c = 0; c < cols; ++c) {
      if (table[r][c] < 0.0) throw ValidationError("contingency table has a negative count");
      row_sum[r] += table[r][c];
      col_sum[c] += table[r][c];
      total += table[r][c];
    }
  }
  for (std::size_t r = 0; r < rows; ++r) {
    if (row_sum[r] <= 0.0) throw DataError("degenerate contingency table: row " + std::to_string(r) + " is empty");
  }
  for (std::size_t c = 0; c < cols; ++c) {
    if (col_sum[c] <= 0.0) throw DataError("degenerate contingency table: column " + std::to_string(c) + " is empty");
  }
  double stat = 0.0;
  for (std::size_t r = 0; r < rows; ++r) {
    for (std::size_t c = 0; c < cols; ++c) {
      const double expected = row_sum[r] * col_sum[c] / total;
      const double diff = table[r][c] - expected;
      stat += diff * diff / expected;
    }
  }
  TestResult result;
  result.statistic = stat;
  result.dof = static_cast<double>((rows - 1) * (cols - 1));
  result.p_value = std::clamp(chi_square_sf(stat, result.dof), 0.0, 1.0);
  result.method = "chi-square-contingency";
  result.alternative = "two-sided";
  return result;
}

double percentile(std::vector<double> values, double q) {
  if (values.empty()) throw InsufficientDataError("percentile of an empty sample");
  std::sort(values.begin(), values.end());
  const double pos = q * static_cast<double>(values.size() - 1);
  const auto lo = static_cast<std::size_t>(std::floor(pos));
  const std::size_t hi = std::min(lo + 1, values.size() - 1);
  const double frac = pos - static_cast<double>(lo);
  return values[lo] + frac * (values[hi] - values[lo]);
}

double mean(std::span<const double> xs) {
  if (xs.empty()) return std::numeric_limits<double>::quiet_NaN();
  double s = 0.0;
  for (double x : xs) s += x;
  return s / static_cast<double>(xs.size());
}

double stddev(std::span<const double> xs) {
  if (xs.size() < 2) return 0.0;
  const double m = mean(xs);
  double ss = 0.0;
  for (double x : xs) ss += (x - m) * (x - m);
  return std::sqrt(ss / static_cast<double>(xs.size() - 1));
}

}  // namespace ranklab::stats
