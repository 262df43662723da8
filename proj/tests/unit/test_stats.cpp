#include <algorithm>
#include <boost/math/special_functions/gamma.hpp>
#include <cmath>
#include <random>

#include "doctest.h"
#include "ranklab/error.hpp"
#include "ranklab/rng.hpp"
#include "ranklab/stats.hpp"

using namespace ranklab;
using namespace ranklab::stats;

TEST_CASE("incomplete gamma agrees with Boost") {
  for (double a : {0.5, 1.0, 2.0, 4.5, 10.0, 50.0}) {
    for (double x : {0.01, 0.3, 1.0, 2.5, 7.0, 20.0, 80.0}) {
      CHECK(gamma_p(a, x) == doctest::Approx(boost::math::gamma_p(a, x)).epsilon(1e-10));
      CHECK(gamma_q(a, x) == doctest::Approx(boost::math::gamma_q(a, x)).epsilon(1e-9).scale(1e-300));
    }
  }
  CHECK(chi_square_sf(40.0, 1.0) == doctest::Approx(std::erfc(std::sqrt(20.0))).epsilon(1e-8));
  CHECK(chi_square_sf(0.0, 3.0) == 1.0);
}

TEST_CASE("normal tail") {
  CHECK(normal_sf(0.0) == doctest::Approx(0.5));
  CHECK(normal_sf(1.959963985) == doctest::Approx(0.025).epsilon(1e-6));
  CHECK(normal_cdf(-1.0) + normal_sf(-1.0) == doctest::Approx(1.0));
}

TEST_CASE("Mann-Whitney exact") {
  const std::vector<double> a = {4, 5, 6};
  const std::vector<double> b = {1, 2, 3};
  const TestResult r = mann_whitney_u(a, b, Alternative::Greater);
  CHECK(r.statistic == 9.0);
  CHECK(r.p_value == doctest::Approx(0.05));
  CHECK(r.method.find("exact") != std::string::npos);
  CHECK(mann_whitney_u(a, b, Alternative::Less).p_value == doctest::Approx(1.0));
  CHECK(mann_whitney_u(a, b, Alternative::TwoSided).p_value == doctest::Approx(0.1));

  const std::vector<double> same = {1, 2, 3, 4};
  CHECK(mann_whitney_u(same, same).p_value == doctest::Approx(0.5).epsilon(0.2));
  const std::vector<double> constant = {1, 1, 1};
  const TestResult flat = mann_whitney_u(constant, constant);
  CHECK(flat.flagged);
  CHECK(flat.p_value == 0.5);
  CHECK_THROWS_AS(mann_whitney_u(std::vector<double>{}, b), DataError);
}

TEST_CASE("Mann-Whitney asymptotic agrees with exact for moderate samples") {
  std::mt19937_64 gen(3);
  std::normal_distribution<double> norm;
  for (int trial = 0; trial < 20; ++trial) {
    std::vector<double> a(6), b(6);
    for (auto& x : a) x = norm(gen) + 0.5;
    for (auto& x : b) x = norm(gen);
    const double exact = mann_whitney_u(a, b, Alternative::Greater, MwuMethod::Exact).p_value;
    const double approx = mann_whitney_u(a, b, Alternative::Greater, MwuMethod::Asymptotic).p_value;
    CHECK(std::abs(exact - approx) < 0.03);
  }
}

TEST_CASE("Mann-Whitney null calibration") {
  std::mt19937_64 gen(11);
  std::normal_distribution<double> norm;
  std::vector<double> ps;
  for (int trial = 0; trial < 1000; ++trial) {
    std::vector<double> a(200), b(200);
    for (auto& x : a) x = norm(gen);
    for (auto& x : b) x = norm(gen);
    ps.push_back(mann_whitney_u(a, b).p_value);
  }
  std::sort(ps.begin(), ps.end());
  // Kolmogorov-Smirnov distance to the uniform distribution.
  double d = 0;
  for (std::size_t i = 0; i < ps.size(); ++i) {
    d = std::max({d, std::abs(ps[i] - double(i) / ps.size()), std::abs(ps[i] - double(i + 1) / ps.size())});
  }
  CHECK(d < 1.63 / std::sqrt(1000.0));
}

TEST_CASE("chi-square contingency") {
  const TestResult indep = chi_square_contingency({{10, 10}, {10, 10}});
  CHECK(indep.statistic == doctest::Approx(0.0));
  CHECK(indep.p_value == doctest::Approx(1.0));
  const TestResult r = chi_square_contingency({{20, 0}, {0, 20}});
  CHECK(r.statistic == doctest::Approx(40.0));
  CHECK(r.dof == 1.0);
  CHECK(r.p_value < 1e-9);
  CHECK(chi_square_contingency({{10, 20}, {30, 40}}).statistic == doctest::Approx(50.0 / 63.0));
  CHECK(chi_square_contingency({{1, 2, 3}, {4, 5, 6}}).dof == 2.0);
  CHECK_THROWS_AS(chi_square_contingency({{0, 0}, {1, 2}}), DataError);
  CHECK_THROWS_AS(chi_square_contingency({{0, 3}, {0, 2}}), DataError);
}

TEST_CASE("chi-square null calibration") {
  Rng rng(21);
  const std::vector<double> probs = {0.3, 0.15, 0.13, 0.15, 0.27};
  int rejections = 0;
  const int trials = 1000;
  for (int t = 0; t < trials; ++t) {
    std::vector<std::vector<double>> table(2, std::vector<double>(5, 0.0));
    for (auto& row : table)
      for (int i = 0; i < 200; ++i) row[sample_categorical(probs, rng)] += 1;
    rejections += chi_square_contingency(table).p_value < 0.05;
  }
  CHECK(std::abs(rejections / double(trials) - 0.05) < 0.02);
}

TEST_CASE("descriptive statistics") {
  CHECK(percentile({1, 2, 3, 4, 5}, 0.5) == 3.0);
  CHECK(percentile({1, 2}, 0.25) == doctest::Approx(1.25));
  CHECK(percentile({7}, 0.975) == 7.0);
  CHECK_THROWS_AS(percentile({}, 0.5), InsufficientDataError);
  const std::vector<double> xs = {2, 4, 4, 4, 5, 5, 7, 9};
  CHECK(mean(xs) == 5.0);
  CHECK(stddev(xs) == doctest::Approx(std::sqrt(32.0 / 7.0)));
  CHECK(stddev(std::vector<double>{1.0}) == 0.0);
}
