#include "bubblewalk/analysis.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>
#include <tuple>

#include "bubblewalk/graph.hpp"
#include "bubblewalk/orbit.hpp"
#include "bubblewalk/wreath.hpp"
#include "bubblewalk/zline.hpp"

namespace bubblewalk {

std::pair<double, double> least_squares(const std::vector<double>& x, const std::vector<double>& y) {
  if (x.size() != y.size() || x.size() < 2) throw std::invalid_argument("least squares needs >= 2 points");
  const double n = static_cast<double>(x.size());
  double mx = 0, my = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    mx += x[i];
    my += y[i];
  }
  mx /= n;
  my /= n;
  double sxx = 0, sxy = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sxx += (x[i] - mx) * (x[i] - mx);
    sxy += (x[i] - mx) * (y[i] - my);
  }
  if (sxx == 0) throw std::invalid_argument("least squares needs distinct x values");
  const double slope = sxy / sxx;
  return {slope, my - slope * mx};
}

EnergyTrace flow_energy(const ScalingRule& rule, int k_max) {
  if (k_max < 1) throw std::invalid_argument("k_max must be >= 1");
  EnergyTrace t;
  t.k_max = k_max;
  double sum = 0, shown = 0;
  for (int k = 1; k <= k_max; ++k) {
    const double alpha = static_cast<double>(rule.alpha(k));
    const double term = (alpha + 1) / std::ldexp(1.0, k);
    sum += term;
    shown += 0.5 * alpha / std::ldexp(1.0, k);
    t.level_terms.push_back(term);
    t.partial_sums.push_back(sum);
    t.displayed_partial_sums.push_back(shown);
  }
  const int lo = std::max(1, k_max / 2);
  if (k_max - lo >= 1) {
    std::vector<double> x, y;
    for (int k = lo; k <= k_max; ++k) {
      x.push_back(std::log(static_cast<double>(k)));
      y.push_back(std::log(t.level_terms[static_cast<std::size_t>(k - 1)]));
    }
    t.tail_exponent = -least_squares(x, y).first;
  }
  t.converges = t.tail_exponent > kConvergentTailExponent;
  return t;
}

namespace {

double unit(int level) { return std::ldexp(1.0, -level); }

// Flow on the a-edge x -> x.a: toward the midpoint on both halves of the cycle.
double flow_a(const ScalingRule& rule, const VertexAddress& x) {
  return x.pos() < rule.alpha_unchecked(x.level()) ? unit(x.level()) : -unit(x.level());
}

// Flow on the b-edge x -> x.b of a branching triangle (midpoint, child 0,
// child 1). Zero for b-fixed vertices.
double flow_b(const ScalingRule& rule, const VertexAddress& x) {
  if (x.pos() == rule.alpha_unchecked(x.level())) return unit(x.level());
  if (x.pos() == 0 && x.path_len() > 0) return x.path_bit(x.path_len() - 1) ? -unit(x.level() - 1) : 0.0;
  return 0.0;
}

}  // namespace

KirchhoffReport kirchhoff_report(const ScalingRule& rule, int k_max, double perturbation) {
  if (k_max < 1) throw std::invalid_argument("k_max must be >= 1");
  if (k_max + 1 > rule.max_level())
    throw std::invalid_argument("kirchhoff check needs levels up to " + std::to_string(k_max + 1) + ", " +
                                rule.describe() + " has " + std::to_string(rule.max_level()));
  std::uint64_t total = 0;
  for (int n = 1; n <= k_max; ++n) {
    total += (std::uint64_t{1} << (n - 1)) * 2 * static_cast<std::uint64_t>(rule.alpha_unchecked(n));
    if (total > kMaxKirchhoffVertices)
      throw ResourceGuardError("ball-size", "kirchhoff check over " + std::to_string(k_max) + " levels exceeds " +
                                                std::to_string(kMaxKirchhoffVertices) + " vertices");
  }
  const VertexAddress o;
  auto fa = [&](const VertexAddress& x) { return flow_a(rule, x) + (x == o ? perturbation : 0.0); };

  KirchhoffReport r;
  r.vertices_checked = total;
  for (int n = 1; n <= k_max; ++n) {
    const std::int64_t len = 2 * rule.alpha_unchecked(n);
    for (std::uint64_t bits = 0; bits < (std::uint64_t{1} << (n - 1)); ++bits)
      for (std::int64_t p = 0; p < len; ++p) {
        auto x = VertexAddress::unchecked(bits, n - 1, p);
        double out = fa(x) - fa(apply_letter(rule, x, Letter::a_inv));
        if (apply_letter(rule, x, Letter::b) != x)
          out += flow_b(rule, x) - flow_b(rule, apply_letter(rule, x, Letter::b_inv));
        if (x == o) r.root_outflow = out;
        else r.max_imbalance = std::max(r.max_imbalance, std::abs(out));
      }
  }
  r.balanced = std::abs(r.root_outflow - 1.0) <= 1e-12 && r.max_imbalance <= 1e-12;
  return r;
}

bool kirchhoff_check(const ScalingRule& rule, int k_max, double perturbation) {
  return kirchhoff_report(rule, k_max, perturbation).balanced;
}

GreenEstimate green_function_estimate(const ScalingRule& rule, std::int64_t n, std::int64_t reps,
                                      std::uint64_t seed, unsigned threads) {
  if (n < 1) throw std::invalid_argument("n must be >= 1");
  if (reps < 1) throw std::invalid_argument("reps must be >= 1");
  GreenEstimate est;
  est.times = {n / 4, n / 2, n};
  est.reps = reps;
  std::vector<std::array<double, 3>> visits(static_cast<std::size_t>(reps));
  parallel_for(visits.size(), threads, [&](std::size_t r) {
    Rng rng(seed, r);
    VertexAddress v;
    std::int64_t count = 1;
    std::size_t next = 0;
    auto& out = visits[r];
    for (std::int64_t t = 0;; ++t) {
      while (next < 3 && est.times[next] == t) out[next++] = static_cast<double>(count);
      if (next == 3) break;
      v = apply_letter(rule, v, letter_from_index(rng.bits2()));
      if (v.is_root()) ++count;
    }
  });
  for (std::size_t i = 0; i < 3; ++i) {
    double sum = 0, sq = 0;
    for (const auto& row : visits) {
      sum += row[i];
      sq += row[i] * row[i];
    }
    const double mean = sum / static_cast<double>(reps);
    const double var = reps > 1 ? (sq - sum * mean) / static_cast<double>(reps - 1) : 0.0;
    est.g.push_back(mean);
    est.std_error.push_back(std::sqrt(std::max(var, 0.0) / static_cast<double>(reps)));
  }
  return est;
}

VolumeFit volume_exponent_fit(const ScalingRule& rule, const std::vector<std::int64_t>& radii) {
  if (radii.size() < 2) throw std::invalid_argument("volume fit needs >= 2 radii");
  for (std::size_t i = 0; i < radii.size(); ++i)
    if (radii[i] < 1 || (i > 0 && radii[i] <= radii[i - 1]))
      throw std::invalid_argument("radii must be positive and increasing");
  VolumeFit fit;
  fit.radii = radii;
  std::vector<double> x, y;
  for (auto r : radii) {
    auto count = ball_count(rule, r);
    if (count == std::numeric_limits<std::uint64_t>::max())
      throw ResourceGuardError("ball-size", "|B_" + std::to_string(r) + "(o)| overflows 64 bits");
    fit.ball_sizes.push_back(static_cast<double>(count));
    x.push_back(std::log(static_cast<double>(r)));
    y.push_back(std::log(static_cast<double>(count)));
  }
  std::tie(fit.slope, fit.intercept) = least_squares(x, y);
  return fit;
}

std::vector<std::int64_t> log_spaced(std::int64_t lo, std::int64_t hi, int count) {
  if (lo < 1 || hi < lo || count < 1) throw std::invalid_argument("need 1 <= lo <= hi and count >= 1");
  std::vector<std::int64_t> out;
  for (int i = 0; i < count; ++i) {
    const double t = count == 1 ? 0.0 : static_cast<double>(i) / (count - 1);
    auto r = static_cast<std::int64_t>(std::llround(std::exp(std::log(lo) + t * (std::log(hi) - std::log(lo)))));
    if (out.empty() || r > out.back()) out.push_back(r);
  }
  return out;
}

double log_confine_probability(std::int64_t n, std::int64_t m) {
  const ConfineQuery q{n, m};
  if (static_cast<double>(n) * static_cast<double>(2 * m + 1) <= 2e7) return confine_log_prob_exact(q);
  return confine_log_prob_spectral(q);
}

namespace {

double log_ball(const ScalingRule& rule, double radius) {
  return std::log(static_cast<double>(ball_count(rule, static_cast<std::int64_t>(std::ceil(radius)))));
}

}  // namespace

double log_A_upper(const ScalingRule& rule, std::int64_t m, const CountingConstants& c) {
  if (m < 1) throw std::invalid_argument("m must be >= 1");
  if (!(c.K > 0) || !(c.path() >= 0) || !(c.c_deep > 0)) throw std::invalid_argument("bad counting constants");
  const double md = static_cast<double>(m);
  const double lamps = std::exp(log_ball(rule, c.K * md)) * std::log(2.0);
  const double flat = std::log(2.0 * c.K * md);
  const double two_level = c.path() * md * std::log(8.0 * md);
  const double deep = std::exp(log_ball(rule, c.c_deep * md)) * log_ball(rule, (c.c_deep + c.K) * md);
  return lamps + flat + two_level + deep;
}

std::vector<std::int64_t> default_m_grid(std::int64_t n) {
  if (n < 1) throw std::invalid_argument("n must be >= 1");
  const double top = std::cbrt(static_cast<double>(n));
  std::vector<std::int64_t> grid{1};
  while (static_cast<double>(grid.back() * 2) <= top + 1e-9) grid.push_back(grid.back() * 2);
  return grid;
}

BoundTable bound_pipeline(const ScalingRule& rule, const std::vector<std::int64_t>& n_list,
                          const std::vector<std::int64_t>& m_grid, const CountingConstants& c,
                          unsigned threads) {
  if (n_list.empty()) throw std::invalid_argument("n_list must be nonempty");
  for (auto m : m_grid)
    if (m < 1) throw std::invalid_argument("m values must be >= 1");
  BoundTable table;
  table.rows.resize(n_list.size());
  parallel_for(n_list.size(), threads, [&](std::size_t i) {
    const std::int64_t n = n_list[i];
    if (n < 1) throw std::invalid_argument("n values must be >= 1");
    BoundRow best;
    best.n = n;
    best.log_bound = -std::numeric_limits<double>::infinity();
    for (auto m : m_grid.empty() ? default_m_grid(n) : m_grid) {
      const double p = log_confine_probability(n, m);
      const double a = log_A_upper(rule, m, c);
      if (2 * p - a > best.log_bound) {
        best.m_opt = m;
        best.log_pA_lower = p;
        best.log_A_upper = a;
        best.log_bound = 2 * p - a;
      }
    }
    table.rows[i] = best;
  });
  if (table.rows.size() >= 2) {
    std::vector<double> x, y, z;
    for (const auto& row : table.rows) {
      x.push_back(std::log(static_cast<double>(row.n)));
      y.push_back(std::log(-row.log_bound));
      z.push_back(std::log(static_cast<double>(row.m_opt)));
    }
    table.fitted_exponent = least_squares(x, y).first;
    table.m_opt_exponent = least_squares(x, z).first;
  }
  return table;
}

SetHitEstimate sws_set_probability(const ScalingRule& rule, std::int64_t n, std::int64_t m, double K,
                                   std::int64_t reps, std::uint64_t seed, unsigned threads) {
  if (n < 0 || m < 1 || reps < 1 || !(K > 0)) throw std::invalid_argument("need n >= 0, m >= 1, reps >= 1, K > 0");
  const auto radius = static_cast<std::int64_t>(std::ceil(K * static_cast<double>(m)));
  std::vector<std::uint8_t> hit(static_cast<std::size_t>(reps));
  parallel_for(hit.size(), threads, [&](std::size_t r) {
    Rng rng(seed, r);
    auto s = simulate_sws(rule, n, rng);
    bool in = true;
    for (const auto& x : s.final_lamps) in = in && dist_to_root(rule, x) <= radius;
    hit[r] = in && max_displacement(rule, s.walk, m) <= radius;
  });
  SetHitEstimate est;
  est.reps = reps;
  double sum = 0;
  for (auto h : hit) sum += h;
  est.p_hat = sum / static_cast<double>(reps);
  est.std_error = std::sqrt(est.p_hat * (1 - est.p_hat) / static_cast<double>(reps));
  est.p_confine = std::exp(log_confine_probability(n, m));
  return est;
}

}  // namespace bubblewalk
