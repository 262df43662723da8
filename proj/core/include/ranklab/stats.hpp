#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <vector>

namespace ranklab::stats {

enum class Alternative { Greater, Less, TwoSided };

struct TestResult {
  double statistic = 0.0;
  double p_value = 1.0;
  std::string method;
  std::string alternative;
  double dof = 0.0;      // chi-square only
  bool flagged = false;  // degenerate input handled by convention
};

// P(Z > z) for a standard normal.
double normal_sf(double z);
double normal_cdf(double z);

// Regularized lower and upper incomplete gamma functions P(a, x), Q(a, x).
double gamma_p(double a, double x);
double gamma_q(double a, double x);

// Upper tail of the chi-square distribution with `dof` degrees of freedom.
double chi_square_sf(double x, double dof);

enum class MwuMethod { Auto, Exact, Asymptotic };

// Mann-Whitney U on sample_a versus sample_b. "Greater" tests whether values
// in a tend to exceed those in b. The statistic is U_a with midranks for ties.
// Auto uses exact enumeration when n_a + n_b <= 12, otherwise the normal
// approximation with tie-corrected variance and continuity correction.
TestResult mann_whitney_u(std::span<const double> sample_a, std::span<const double> sample_b,
                          Alternative alternative = Alternative::Greater, MwuMethod method = MwuMethod::Auto);

inline constexpr std::size_t kMwuExactLimit = 12;

// Pearson chi-square test of independence on a table of counts.
// Throws DataError when a row or column sums to zero.
TestResult chi_square_contingency(const std::vector<std::vector<double>>& table);

// Percentile with linear interpolation between order statistics (q in [0,1]).
double percentile(std::vector<double> values, double q);

double mean(std::span<const double> xs);
// Sample standard deviation (n - 1 denominator); 0 for fewer than 2 values.
double stddev(std::span<const double> xs);

}  // namespace ranklab::stats
