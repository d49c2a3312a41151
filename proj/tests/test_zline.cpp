#include <cmath>
#include <map>
#include <numbers>

#include "bubblewalk/common.hpp"
#include "bubblewalk/zline.hpp"
#include "doctest.h"

using namespace bubblewalk;

namespace {

// Brute force over all 4^n letter sequences of the projected walk.
double enumerate_confined(int n, int m) {
  std::int64_t total = 1, good = 0;
  for (int i = 0; i < n; ++i) total *= 4;
  for (std::int64_t code = 0; code < total; ++code) {
    std::int64_t c = code, x = 0;
    bool ok = true;
    for (int i = 0; i < n; ++i, c /= 4) {
      x += project_letter(letter_from_index(static_cast<unsigned>(c % 4)));
      ok = ok && std::abs(x) <= m;
    }
    good += ok;
  }
  return static_cast<double>(good) / static_cast<double>(total);
}

// Top eigenvalue by power iteration on the dense killed matrix.
double power_iteration_lambda(int m) {
  int size = 2 * m + 1;
  std::vector<double> v(size, 1.0), w(size);
  double lambda = 0.0;
  for (int it = 0; it < 20000; ++it) {
    double norm = 0.0;
    for (int i = 0; i < size; ++i) {
      double acc = 0.0;
      for (int j = 0; j < size; ++j) {
        double p = i == j ? 0.5 : (std::abs(i - j) == 1 ? 0.25 : 0.0);
        acc += p * v[j];
      }
      w[i] = acc;
      norm = std::max(norm, acc);
    }
    lambda = norm / *std::max_element(v.begin(), v.end());
    for (int i = 0; i < size; ++i) v[i] = w[i] / norm;
  }
  return lambda;
}

}  // namespace

TEST_CASE("project_letter") {
  CHECK(project_letter(Letter::a) == 1);
  CHECK(project_letter(Letter::a_inv) == -1);
  CHECK(project_letter(Letter::b) == 0);
  CHECK(project_letter(Letter::b_inv) == 0);
}

TEST_CASE("confine_prob_exact examples") {
  CHECK(confine_prob_exact({1, 1}) == 1.0);
  CHECK(confine_prob_exact({0, 5}) == 1.0);
  CHECK(enumerate_confined(2, 1) == 0.875);
  CHECK(confine_prob_exact({2, 1}) == 0.875);
  for (int n = 0; n <= 7; ++n)
    for (int m = 1; m <= 3; ++m)
      CHECK(confine_prob_exact({n, m}) == doctest::Approx(enumerate_confined(n, m)).epsilon(1e-13));
  CHECK_THROWS_AS(confine_prob_exact({-1, 1}), std::invalid_argument);
  CHECK_THROWS_AS(confine_prob_exact({1, 0}), std::invalid_argument);
  CHECK_THROWS_AS(confine_prob_exact({1, 500'000}), ResourceGuardError);
}

TEST_CASE("confine_prob_exact is nonincreasing in n") {
  for (int m : {1, 2, 7}) {
    double prev = 1.0;
    for (int n = 0; n < 300; ++n) {
      double p = confine_prob_exact({n, m});
      CHECK(p <= prev);
      prev = p;
    }
  }
}

TEST_CASE("log form survives underflow") {
  double lp = confine_log_prob_exact({200000, 2});
  CHECK(std::isfinite(lp));
  CHECK(confine_prob_exact({200000, 2}) == 0.0);
  CHECK(lp == doctest::Approx(confine_log_prob_spectral({200000, 2})).epsilon(1e-9));
}

TEST_CASE("spectral route agrees with iteration") {
  for (int m : {1, 2, 5, 16, 40})
    for (int n : {0, 1, 3, 50, 400, 3000})
      CHECK(confine_log_prob_spectral({n, m}) ==
            doctest::Approx(confine_log_prob_exact({n, m})).epsilon(1e-9).scale(1.0));
}

TEST_CASE("confine_rate") {
  // 3-state killed chain: lambda = 1/2 + sqrt(2)/4.
  double closed = -std::log(0.5 + std::sqrt(2.0) / 4.0);
  CHECK(confine_rate(1) == doctest::Approx(closed).epsilon(1e-14));
  CHECK(confine_rate(1) == doctest::Approx(0.158353).epsilon(1e-5));
  for (int m : {1, 2, 4, 9})
    CHECK(confine_lambda_max(m) == doctest::Approx(power_iteration_lambda(m)).epsilon(1e-10));
  // per-step ratio of survival probabilities converges to lambda_max
  double ratio = confine_prob_exact({2001, 1}) / confine_prob_exact({2000, 1});
  CHECK(-std::log(ratio) == doctest::Approx(confine_rate(1)).epsilon(1e-10));
  double scaled = confine_rate(100) * 100.0 * 100.0;
  double limit = std::numbers::pi * std::numbers::pi / 16.0;
  CHECK(std::abs(scaled / limit - 1.0) < 0.02);
  for (int m = 1; m < 200; ++m) CHECK(confine_rate(m) > confine_rate(m + 1));
}

TEST_CASE("survival / lambda^n converges to a positive limit (m = 3)") {
  double lambda = confine_lambda_max(3);
  auto scaled = [&](int n) { return std::exp(confine_log_prob_exact({n, 3}) - n * std::log(lambda)); };
  double c1 = scaled(2500), c2 = scaled(5000), c3 = scaled(10000);
  CHECK(c3 > 0.1);
  CHECK(c2 == doctest::Approx(c1).epsilon(1e-9));
  CHECK(c3 == doctest::Approx(c2).epsilon(1e-9));
}

TEST_CASE("sample_lazy_range") {
  Rng rng(1);
  CHECK(sample_lazy_range(0, rng) == std::pair<std::int64_t, std::int64_t>{0, 0});

  const int reps = 100000;
  int inside = 0;
  std::map<std::int64_t, int> max_hist, neg_min_hist;
  Rng mc(42);
  for (int r = 0; r < reps; ++r) {
    auto [lo, hi] = sample_lazy_range(200, mc);
    inside += (hi <= 5 && lo >= -5);
    ++max_hist[hi];
    ++neg_min_hist[-lo];
  }
  double p = confine_prob_exact({200, 5});
  double se = std::sqrt(p * (1 - p) / reps);
  CHECK(std::abs(static_cast<double>(inside) / reps - p) < 3 * se);

  // reflection symmetry: max and -min have the same law (loose KS check)
  double cdf_a = 0, cdf_b = 0, ks = 0;
  for (std::int64_t v = 0; v <= 200; ++v) {
    cdf_a += max_hist[v];
    cdf_b += neg_min_hist[v];
    ks = std::max(ks, std::abs(cdf_a - cdf_b) / reps);
  }
  CHECK(ks < 0.015);
}

TEST_CASE("diffusive range scaling") {
  auto mean_range = [](std::int64_t n, int reps, std::uint64_t seed) {
    double total = 0;
    for (int r = 0; r < reps; ++r) {
      Rng rng(seed, static_cast<std::uint64_t>(r));
      auto [lo, hi] = sample_lazy_range(n, rng);
      total += static_cast<double>(hi - lo);
    }
    return total / reps;
  };
  double short_run = mean_range(2500, 2000, 3);
  double long_run = mean_range(10000, 2000, 4);
  CHECK(std::abs(long_run / (2.0 * short_run) - 1.0) < 0.1);
}

TEST_CASE("conditioned sampler matches the exact conditional law") {
  // n = 4, m = 1: every step sequence with its exact conditional probability.
  const int n = 4, m = 1;
  ConfinedStepSampler sampler(n, m);
  std::map<std::vector<int>, double> exact;
  double total = 0;
  for (int code = 0; code < 81; ++code) {
    std::vector<int> steps;
    int c = code, x = 0;
    double w = 1;
    bool ok = true;
    for (int i = 0; i < n; ++i, c /= 3) {
      int d = c % 3 - 1;
      steps.push_back(d);
      w *= d == 0 ? 0.5 : 0.25;
      x += d;
      ok = ok && std::abs(x) <= m;
    }
    if (ok) {
      exact[steps] = w;
      total += w;
    }
  }
  CHECK(total == doctest::Approx(confine_prob_exact({n, m})));
  const int reps = 200000;
  std::map<std::vector<int>, int> seen;
  Rng rng(9);
  for (int r = 0; r < reps; ++r) ++seen[sampler.sample(rng)];
  for (const auto& [steps, count] : seen) REQUIRE(exact.count(steps));
  for (const auto& [steps, w] : exact) {
    double p = w / total;
    double se = std::sqrt(p * (1 - p) / reps);
    CHECK(std::abs(static_cast<double>(seen[steps]) / reps - p) < 4.5 * se);
  }
}

TEST_CASE("conditioned samples stay confined") {
  ConfinedStepSampler sampler(2000, 5);
  Rng rng(5);
  for (int r = 0; r < 200; ++r) {
    auto steps = sampler.sample(rng);
    REQUIRE(steps.size() == 2000);
    std::int64_t x = 0;
    for (int d : steps) {
      x += d;
      CHECK(std::abs(x) <= 5);
    }
  }
}
