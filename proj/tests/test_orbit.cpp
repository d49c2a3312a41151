#include <cmath>
#include <set>

#include "bubblewalk/orbit.hpp"
#include "bubblewalk/zline.hpp"
#include "doctest.h"

using namespace bubblewalk;

namespace {

const ScalingRule& fig1() {
  static const ScalingRule rule = ScalingRule::explicit_list({2, 3, 4});
  return rule;
}

std::set<VertexAddress> as_set(const std::vector<VertexAddress>& v) { return {v.begin(), v.end()}; }

// Displacement maximum by walking every vertex of the test ball.
std::int64_t brute_max_displacement(const ScalingRule& rule, const Word& w, std::int64_t r) {
  std::int64_t best = 0;
  for (const auto& x : ball(rule, VertexAddress{}, test_set_radius(rule, r)))
    best = std::max(best, *dist(rule, x, apply_word(rule, x, w), 1 << 20));
  return best;
}

}  // namespace

TEST_CASE("sample_word") {
  Rng rng(3);
  CHECK(sample_word(0, rng).empty());
  Rng a(77, 5), b(77, 5);
  CHECK(sample_word(500, a) == sample_word(500, b));

  Rng big(2024);
  const int draws = 1'000'000;
  auto w = sample_word(draws, big);
  std::int64_t counts[4] = {0, 0, 0, 0};
  for (Letter l : w) ++counts[static_cast<unsigned>(l)];
  double se = std::sqrt(0.25 * 0.75 / draws);
  for (auto c : counts) CHECK(std::abs(static_cast<double>(c) / draws - 0.25) < 4 * se);
}

TEST_CASE("inverted orbit oracle examples") {
  const auto& rule = fig1();
  VertexAddress o;
  auto three = parse_address(rule, ":3");
  CHECK(inverted_orbit_oracle(rule, {}).points == std::vector<VertexAddress>{o});
  CHECK(inverted_orbit_oracle(rule, parse_word("a")).points == std::vector<VertexAddress>{o, three});
  auto ab = inverted_orbit_oracle(rule, parse_word("ab"));
  CHECK(ab.points == std::vector<VertexAddress>{o, three, three});
  CHECK(ab.distinct_count == 2);
  CHECK(ab.radius == 1);
}

TEST_CASE("tracked orbit equals the oracle") {
  const auto& rule = fig1();
  for (const char* text : {"", "a", "ab"}) {
    auto w = parse_word(text);
    auto tracked = inverted_orbit_tracked(rule, w, 1);
    auto oracle = inverted_orbit_oracle(rule, w);
    CHECK(tracked.points == oracle.points);
    CHECK(tracked.radius == oracle.radius);
    CHECK(tracked.distinct_count == oracle.distinct_count);
  }

  auto canon = ScalingRule::canonical();
  Rng rng(101);
  for (int i = 0; i < 500; ++i) {
    auto n = static_cast<std::int64_t>(rng.below(301));
    auto w = sample_word(n, rng);
    auto tracked = inverted_orbit_tracked(canon, w, 1 + static_cast<std::int64_t>(rng.below(4)));
    auto oracle = inverted_orbit_oracle(canon, w);
    REQUIRE(tracked.points == oracle.points);
    CHECK(tracked.radius == oracle.radius);
    CHECK(tracked.distinct_count == oracle.distinct_count);
  }
}

TEST_CASE("all-a words force tracking expansions") {
  auto canon = ScalingRule::canonical();
  for (int n : {2, 10, 57, 200}) {
    Word w(static_cast<std::size_t>(n), Letter::a);
    auto tracked = inverted_orbit_tracked(canon, w, 1);
    CHECK(tracked.points == inverted_orbit_oracle(canon, w).points);
    CHECK(tracked.expansions >= 1);
  }
  Word w(300, Letter::a_inv);
  CHECK(inverted_orbit_tracked(fig1(), w, 1).points == inverted_orbit_oracle(fig1(), w).points);
}

TEST_CASE("tracking limit") {
  // a^alpha_k b for k = 1..8 walks o down to the start of level 9; its
  // inverse has that start as its last inverted orbit point.
  auto canon = ScalingRule::canonical();
  Word descent;
  for (int k = 1; k <= 8; ++k) {
    descent.insert(descent.end(), static_cast<std::size_t>(canon.alpha(k)), Letter::a);
    descent.push_back(Letter::b);
  }
  Word w = inverse(descent);
  auto trace = inverted_orbit_tracked(canon, w, 1);
  CHECK(trace.points.back() == VertexAddress::make(canon, 0, 8, 0));
  CHECK(trace.radius == canon.s(8));
  CHECK_THROWS_AS(inverted_orbit_tracked(canon, w, 1, 1000), ResourceGuardError);
}

TEST_CASE("max_displacement examples") {
  auto canon = ScalingRule::canonical();
  CHECK(max_displacement(canon, {}, 1) == 0);
  CHECK(max_displacement(canon, parse_word("a"), 1) == 1);
  CHECK(max_displacement(canon, parse_word("aA"), 1) == 0);
  CHECK(max_displacement(fig1(), parse_word("a"), 1) == 1);
  CHECK_THROWS_AS(max_displacement(canon, {}, 0), std::invalid_argument);
}

TEST_CASE("max_displacement equals brute force over the test ball") {
  Rng rng(8);
  for (const auto& rule : {ScalingRule::canonical(), fig1(), ScalingRule::explicit_list({1, 1, 2, 2, 3}),
                           ScalingRule::geometric(2.0)}) {
    for (int i = 0; i < 40; ++i) {
      auto w = sample_word(static_cast<std::int64_t>(rng.below(25)), rng);
      std::int64_t r = 1 + static_cast<std::int64_t>(rng.below(2));
      CHECK(max_displacement(rule, w, r) == brute_max_displacement(rule, w, r));
    }
  }
  // words that climb several levels and read deep branch bits
  auto canon = ScalingRule::canonical();
  for (const char* text : {"BaaBaab", "bAAbaaBBab", "aabaabaabaabAAbAAb", "babAbAbBBaaB"})
    CHECK(max_displacement(canon, parse_word(text), 1) == brute_max_displacement(canon, parse_word(text), 1));
}

TEST_CASE("inverted orbit differs from the ordinary orbit") {
  auto canon = ScalingRule::canonical();
  std::optional<Word> witness;
  for (int n = 1; n <= 6 && !witness; ++n) {
    std::int64_t total = std::int64_t{1} << (2 * n);
    for (std::int64_t code = 0; code < total && !witness; ++code) {
      Word w;
      for (int i = 0; i < n; ++i) w.push_back(letter_from_index(static_cast<unsigned>(code >> (2 * i))));
      if (as_set(inverted_orbit_oracle(canon, w).points) != as_set(forward_orbit(canon, w)))
        witness = w;
    }
  }
  REQUIRE(witness.has_value());
  CHECK(format_word(*witness) == "a");
  // the inverse of o.a is the other neighbour on the root cycle
  CHECK(inverted_orbit_oracle(canon, *witness).points[1] == parse_address(canon, ":3"));
  CHECK(forward_orbit(canon, *witness)[1] == parse_address(canon, ":1"));
}

TEST_CASE("conditioned stats: everything accepted when m >= n") {
  auto canon = ScalingRule::canonical();
  ConditionOptions opts;
  opts.seed = 4;
  auto report = conditioned_orbit_stats(canon, 30, 30, 200, opts);
  CHECK(report.accepted == 200);
  CHECK(report.acceptance_prob_exact == 1.0);
  for (const auto& s : report.samples) CHECK(s.orbit_radius <= 30);
  REQUIRE(report.empirical_K.has_value());
  CHECK(report.subword_violations == 0);
  CHECK(report.deep_spot_violations == 0);
}

TEST_CASE("conditioned stats: acceptance fraction matches the exact probability") {
  auto canon = ScalingRule::canonical();
  ConditionOptions opts;
  opts.seed = 12;
  const std::int64_t reps = 4000;
  auto report = conditioned_orbit_stats(canon, 60, 3, reps, opts);
  double p = report.acceptance_prob_exact;
  CHECK(p == doctest::Approx(confine_prob_exact({60, 3})));
  double se = std::sqrt(p * (1 - p) / reps);
  CHECK(std::abs(static_cast<double>(report.accepted) / reps - p) < 3 * se);
  CHECK(report.subword_violations == 0);
  CHECK(report.deep_spot_violations == 0);
  for (const auto& s : report.samples)
    if (s.accepted) CHECK(s.orbit_radius <= *report.empirical_K * 3);
}

TEST_CASE("conditioned stats: no data is reported as such") {
  ConditionOptions opts;
  auto report = conditioned_orbit_stats(ScalingRule::canonical(), 400, 1, 5, opts);
  CHECK(report.accepted == 0);
  CHECK(!report.empirical_K.has_value());
}

TEST_CASE("conditioned stats: exact mode and thread independence") {
  auto canon = ScalingRule::canonical();
  ConditionOptions opts;
  opts.mode = ConditionMode::exact;
  opts.seed = 99;
  opts.threads = 1;
  auto one = conditioned_orbit_stats(canon, 300, 4, 60, opts);
  opts.threads = 3;
  auto three = conditioned_orbit_stats(canon, 300, 4, 60, opts);
  CHECK(one.accepted == 60);
  CHECK(one.subword_violations == 0);
  CHECK(one.deep_spot_violations == 0);
  REQUIRE(one.samples.size() == three.samples.size());
  for (std::size_t i = 0; i < one.samples.size(); ++i) {
    CHECK(one.samples[i].orbit_radius == three.samples[i].orbit_radius);
    CHECK(one.samples[i].max_displacement == three.samples[i].max_displacement);
    CHECK(one.samples[i].distinct_count == three.samples[i].distinct_count);
  }
}

TEST_CASE("exact conditioning agrees with rejection in law") {
  // mean orbit radius under both samplers at a size where rejection is cheap
  auto canon = ScalingRule::canonical();
  ConditionOptions opts;
  opts.seed = 5;
  opts.deep_spot_checks = 0;
  auto rej = conditioned_orbit_stats(canon, 80, 4, 6000, opts);
  opts.mode = ConditionMode::exact;
  auto ex = conditioned_orbit_stats(canon, 80, 4, 1500, opts);
  auto moments = [](const ConfinementReport& r) {
    double s = 0, s2 = 0;
    for (const auto& x : r.samples)
      if (x.accepted) {
        s += static_cast<double>(x.orbit_radius);
        s2 += static_cast<double>(x.orbit_radius * x.orbit_radius);
      }
    double mean = s / static_cast<double>(r.accepted);
    return std::pair{mean, (s2 / static_cast<double>(r.accepted) - mean * mean) / static_cast<double>(r.accepted)};
  };
  auto [m1, v1] = moments(rej);
  auto [m2, v2] = moments(ex);
  CHECK(rej.accepted > 500);
  CHECK(std::abs(m1 - m2) < 4 * std::sqrt(v1 + v2));
}
