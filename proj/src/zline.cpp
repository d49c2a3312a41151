#include "bubblewalk/zline.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>
#include <string>

namespace bubblewalk {

namespace {

void validate(const ConfineQuery& q) {
  if (q.n < 0) throw std::invalid_argument("confinement steps n must be >= 0");
  if (q.m < 1) throw std::invalid_argument("confinement half-width m must be >= 1");
  if (2 * q.m + 1 > kMaxConfineStates)
    throw ResourceGuardError("state-space",
                             "2m+1 = " + std::to_string(2 * q.m + 1) + " exceeds " +
                                 std::to_string(kMaxConfineStates));
}

// One step of the killed lazy walk applied to a column vector (the operator is
// symmetric, so forward and backward steps coincide). Returns the max entry.
double killed_step(const std::vector<double>& in, std::vector<double>& out) {
  const std::size_t size = in.size();
  double top = 0.0;
  for (std::size_t i = 0; i < size; ++i) {
    double v = 0.5 * in[i];
    if (i > 0) v += 0.25 * in[i - 1];
    if (i + 1 < size) v += 0.25 * in[i + 1];
    out[i] = v;
    top = std::max(top, v);
  }
  return top;
}

}  // namespace

double confine_log_prob_exact(const ConfineQuery& q) {
  validate(q);
  const auto size = static_cast<std::size_t>(2 * q.m + 1);
  // Survival from every start at once: q_t = P q_{t-1}, q_0 = 1. The walk
  // starts at the middle state.
  std::vector<double> cur(size, 1.0), next(size);
  double log_scale = 0.0;
  for (std::int64_t t = 0; t < q.n; ++t) {
    double top = killed_step(cur, next);
    cur.swap(next);
    if (top < 1e-100) {
      for (auto& v : cur) v /= top;
      log_scale += std::log(top);
    }
  }
  return log_scale + std::log(cur[static_cast<std::size_t>(q.m)]);
}

double confine_prob_exact(const ConfineQuery& q) { return std::exp(confine_log_prob_exact(q)); }

double confine_log_prob_spectral(const ConfineQuery& q) {
  validate(q);
  const std::int64_t big_n = 2 * q.m + 2;
  const std::int64_t start = q.m + 1;
  const double step = std::numbers::pi / static_cast<double>(big_n);
  const double lambda1 = 0.5 + 0.5 * std::cos(step);
  // P(survive n) = sum_j (2/N) sin(j k0 pi/N) (sum_i sin(j i pi/N)) lambda_j^n.
  // Only odd j contribute (the start is the centre).
  double total = 0.0;
  for (std::int64_t j = 1; j < big_n; j += 2) {
    double lambda = 0.5 + 0.5 * std::cos(step * static_cast<double>(j));
    double ratio_pow = q.n == 0 ? 1.0 : std::pow(lambda / lambda1, static_cast<double>(q.n));
    if (ratio_pow == 0.0) continue;
    double row = 0.0;
    for (std::int64_t i = 1; i < big_n; ++i) row += std::sin(step * static_cast<double>(j * i));
    total += (2.0 / static_cast<double>(big_n)) * std::sin(step * static_cast<double>(j * start)) *
             row * ratio_pow;
  }
  return static_cast<double>(q.n) * std::log(lambda1) + std::log(total);
}

double confine_lambda_max(std::int64_t m) {
  if (m < 1) throw std::invalid_argument("confinement half-width m must be >= 1");
  return 0.5 + 0.5 * std::cos(std::numbers::pi / static_cast<double>(2 * m + 2));
}

double confine_rate(std::int64_t m) { return -std::log(confine_lambda_max(m)); }

std::pair<std::int64_t, std::int64_t> sample_lazy_range(std::int64_t n, Rng& rng) {
  if (n < 0) throw std::invalid_argument("n must be >= 0");
  std::int64_t x = 0, lo = 0, hi = 0;
  for (std::int64_t t = 0; t < n; ++t) {
    x += project_letter(letter_from_index(rng.bits2()));
    lo = std::min(lo, x);
    hi = std::max(hi, x);
  }
  return {lo, hi};
}

ConfinedStepSampler::ConfinedStepSampler(std::int64_t n, std::int64_t m) : n_(n), m_(m) {
  validate({n, m});
  if ((n + 1) * (2 * m + 1) > 50'000'000)
    throw ResourceGuardError("state-space", "conditioned sampler table too large");
  const auto size = static_cast<std::size_t>(2 * m + 1);
  survival_.assign(static_cast<std::size_t>(n + 1), std::vector<double>(size, 1.0));
  for (std::int64_t t = 1; t <= n; ++t) {
    auto& row = survival_[static_cast<std::size_t>(t)];
    double top = killed_step(survival_[static_cast<std::size_t>(t - 1)], row);
    for (auto& v : row) v /= top;
  }
}

std::vector<int> ConfinedStepSampler::sample(Rng& rng) const {
  std::vector<int> steps;
  steps.reserve(static_cast<std::size_t>(n_));
  std::int64_t state = m_;  // index into [0, 2m]
  const std::int64_t last = 2 * m_;
  for (std::int64_t k = 0; k < n_; ++k) {
    const auto& q = survival_[static_cast<std::size_t>(n_ - k - 1)];
    double w_down = state > 0 ? 0.25 * q[static_cast<std::size_t>(state - 1)] : 0.0;
    double w_stay = 0.5 * q[static_cast<std::size_t>(state)];
    double w_up = state < last ? 0.25 * q[static_cast<std::size_t>(state + 1)] : 0.0;
    double u = rng.uniform() * (w_down + w_stay + w_up);
    int d = u < w_down ? -1 : (u < w_down + w_stay ? 0 : 1);
    state += d;
    steps.push_back(d);
  }
  return steps;
}

}  // namespace bubblewalk
