#include "bubblewalk/orbit.hpp"

#include <algorithm>
#include <stdexcept>
#include <unordered_set>

#include "bubblewalk/zline.hpp"

namespace bubblewalk {

Word sample_word(std::int64_t n, Rng& rng) {
  if (n < 0) throw std::invalid_argument("word length must be >= 0");
  Word w(static_cast<std::size_t>(n));
  for (auto& l : w) l = letter_from_index(rng.bits2());
  return w;
}

namespace {

void finish_trace(const ScalingRule& rule, InvertedOrbitTrace& trace) {
  std::unordered_set<VertexAddress, VertexHash> seen;
  trace.radius = 0;
  for (const auto& u : trace.points) {
    trace.radius = std::max(trace.radius, dist_to_root(rule, u));
    seen.insert(u);
  }
  trace.distinct_count = static_cast<std::int64_t>(seen.size());
}

}  // namespace

InvertedOrbitTrace inverted_orbit_oracle(const ScalingRule& rule, const Word& w) {
  InvertedOrbitTrace trace;
  trace.points.reserve(w.size() + 1);
  for (std::size_t k = 0; k <= w.size(); ++k) {
    VertexAddress x;
    for (std::size_t i = k; i-- > 0;) x = apply_letter(rule, x, inverse(w[i]));
    trace.points.push_back(x);
  }
  finish_trace(rule, trace);
  return trace;
}

std::vector<VertexAddress> forward_orbit(const ScalingRule& rule, const Word& w) {
  std::vector<VertexAddress> out{VertexAddress{}};
  VertexAddress x;
  for (Letter l : w) {
    x = apply_letter(rule, x, l);
    out.push_back(x);
  }
  return out;
}

InvertedOrbitTracker::InvertedOrbitTracker(const ScalingRule& rule, std::int64_t r0,
                                           std::uint64_t limit)
    : rule_(&rule), cache_(rule), limit_(limit), radius_(r0) {
  if (r0 < 1) throw std::invalid_argument("initial tracking radius must be >= 1");
  if (ball_count(rule, r0) > limit)
    throw ResourceGuardError("tracking-size", "initial tracking ball exceeds limit");
  root_ = cache_.id(VertexAddress{});
  for (const auto& v : ball(rule, VertexAddress{}, r0, limit)) points_.push_back(cache_.id(v));
  images_ = points_;
  found_ = static_cast<std::size_t>(std::find(points_.begin(), points_.end(), root_) - points_.begin());
}

void InvertedOrbitTracker::grow() {
  std::int64_t next = radius_ + std::max<std::int64_t>(1, radius_ / 8);
  if (ball_count(*rule_, next) > limit_)
    throw ResourceGuardError("tracking-size", "tracking ball of radius " + std::to_string(next) +
                                                  " exceeds limit " + std::to_string(limit_));
  for (const auto& v : ball(*rule_, VertexAddress{}, next, limit_)) {
    if (dist_to_root(*rule_, v) <= radius_) continue;
    std::uint32_t id = cache_.id(v), img = id;
    for (Letter l : prefix_) img = cache_.step(img, l);
    points_.push_back(id);
    images_.push_back(img);
  }
  radius_ = next;
  ++expansions_;
}

void InvertedOrbitTracker::push(Letter g) {
  prefix_.push_back(g);
  constexpr std::size_t kMissing = static_cast<std::size_t>(-1);
  std::size_t hit = kMissing;
  for (std::size_t i = 0; i < images_.size(); ++i) {
    images_[i] = cache_.step(images_[i], g);
    if (images_[i] == root_) hit = i;
  }
  while (hit == kMissing) {
    std::size_t old = images_.size();
    grow();
    for (std::size_t i = old; i < images_.size(); ++i)
      if (images_[i] == root_) hit = i;
  }
  found_ = hit;
}

InvertedOrbitTrace inverted_orbit_tracked(const ScalingRule& rule, const Word& w, std::int64_t r0,
                                          std::uint64_t limit) {
  InvertedOrbitTracker tracker(rule, r0, limit);
  InvertedOrbitTrace trace;
  trace.points.reserve(w.size() + 1);
  trace.points.push_back(tracker.current());
  for (Letter l : w) {
    tracker.push(l);
    trace.points.push_back(tracker.current());
  }
  trace.expansions = tracker.expansions();
  finish_trace(rule, trace);
  return trace;
}

namespace {

int deep_level(const ScalingRule& rule, std::int64_t test_radius) {
  for (int k = 1; k <= rule.max_level(); ++k)
    if (rule.alpha_unchecked(k) > 4 * test_radius) return k;
  return rule.max_level();
}

// A word as alternating a-shifts and b letters: each segment moves along the
// current cycle by `shift`, then applies `b` (if has_b).
struct Segment {
  std::int64_t shift = 0;
  bool has_b = false;
  Letter b = Letter::b;
};

std::vector<Segment> segments_of(const Word& w) {
  std::vector<Segment> out;
  Segment cur;
  for (Letter l : w) {
    if (is_b(l)) {
      cur.has_b = true;
      cur.b = l;
      out.push_back(cur);
      cur = Segment{};
    } else {
      cur.shift += project_letter(l);
    }
  }
  if (cur.shift != 0) out.push_back(cur);
  return out;
}

VertexAddress shift_on_cycle(const ScalingRule& rule, const VertexAddress& x, std::int64_t shift) {
  if (shift == 0) return x;
  const std::int64_t len = 2 * rule.alpha_unchecked(x.level());
  std::int64_t p = (x.pos() + shift) % len;
  if (p < 0) p += len;
  return VertexAddress::unchecked(x.path_bits(), x.path_len(), p);
}

// Max of d(x, x.w) over every x at level n with position p. The path bits of
// x are left open and fixed only when the trajectory reads one (b applied at
// the start of the cycle that bit selects); each read forks the run.
std::int64_t max_over_class(const ScalingRule& rule, const std::vector<Segment>& segs, int n,
                            std::int64_t p) {
  struct Frame {
    VertexAddress v;
    std::size_t t;
    std::uint64_t xbits, known, dirty;
    bool shifted;  // the shift of segment t is already applied
  };
  std::int64_t best = 0;
  std::vector<Frame> stack{{VertexAddress::unchecked(0, n - 1, p), 0, 0, 0, 0, false}};
  while (!stack.empty()) {
    Frame f = stack.back();
    stack.pop_back();
    for (; f.t < segs.size(); ++f.t, f.shifted = false) {
      const Segment& sg = segs[f.t];
      if (!f.shifted) f.v = shift_on_cycle(rule, f.v, sg.shift);
      if (!sg.has_b) continue;
      if (f.v.pos() == 0 && f.v.path_len() > 0) {
        const int i = f.v.path_len() - 1;
        const std::uint64_t bit = std::uint64_t{1} << i;
        if (!(f.dirty & bit) && !(f.known & bit)) {
          f.known |= bit;
          Frame other = f;
          other.xbits |= bit;
          other.v = VertexAddress::unchecked(f.v.path_bits() | bit, f.v.path_len(), 0);
          other.shifted = true;
          stack.push_back(other);
        }
      }
      VertexAddress next = apply_letter(rule, f.v, sg.b);
      if (next.path_len() > f.v.path_len())
        f.dirty |= std::uint64_t{1} << (next.path_len() - 1);
      else if (next.path_len() == f.v.path_len() && next.path_bits() != f.v.path_bits())
        f.dirty |= std::uint64_t{1} << (next.path_len() - 1);
      f.v = next;
    }
    auto x = VertexAddress::unchecked(f.xbits, n - 1, p);
    best = std::max(best, tree_distance(rule, x, f.v));
  }
  return best;
}

}  // namespace

std::int64_t test_set_radius(const ScalingRule& rule, std::int64_t test_radius) {
  if (test_radius < 1) throw std::invalid_argument("test radius must be >= 1");
  return rule.s(deep_level(rule, test_radius)) + 4 * test_radius;
}

std::int64_t displacement(const ScalingRule& rule, const VertexAddress& x, const Word& w) {
  return tree_distance(rule, x, apply_word(rule, x, w));
}

std::int64_t max_displacement(const ScalingRule& rule, const Word& w, std::int64_t test_radius) {
  const std::int64_t radius = test_set_radius(rule, test_radius);
  if (ball_size_bound(rule, radius) > kDefaultBallLimit)
    throw ResourceGuardError("ball-size", "test set radius " + std::to_string(radius) + " too large");
  const int top = std::min(rule.level_containing_distance(radius), rule.max_level());
  const auto segs = segments_of(w);
  std::int64_t best = 0;
  for (int n = 1; n <= top; ++n) {
    const std::int64_t alpha = rule.alpha_unchecked(n);
    const std::int64_t reach = radius - rule.s_unchecked(n - 1);
    if (reach < 0) break;
    auto visit = [&](std::int64_t p) { best = std::max(best, max_over_class(rule, segs, n, p)); };
    if (reach >= alpha) {
      for (std::int64_t p = 0; p < 2 * alpha; ++p) visit(p);
    } else {
      for (std::int64_t p = 0; p <= reach; ++p) visit(p);
      for (std::int64_t p = std::max(reach + 1, 2 * alpha - reach); p < 2 * alpha; ++p) visit(p);
    }
  }
  return best;
}

std::int64_t projected_range(const Word& w) {
  std::int64_t x = 0, lo = 0, hi = 0;
  for (Letter l : w) {
    x += project_letter(l);
    lo = std::min(lo, x);
    hi = std::max(hi, x);
  }
  return hi - lo;
}

namespace {

bool confined(const Word& w, std::int64_t m) {
  std::int64_t x = 0;
  for (Letter l : w) {
    x += project_letter(l);
    if (x > m || x < -m) return false;
  }
  return true;
}

Word word_from_steps(const std::vector<int>& steps, Rng& rng) {
  Word w;
  w.reserve(steps.size());
  for (int d : steps) {
    if (d > 0) w.push_back(Letter::a);
    else if (d < 0) w.push_back(Letter::a_inv);
    else w.push_back(rng.bit() ? Letter::b_inv : Letter::b);
  }
  return w;
}

}  // namespace

ConfinementReport conditioned_orbit_stats(const ScalingRule& rule, std::int64_t n, std::int64_t m,
                                          std::int64_t reps, const ConditionOptions& options) {
  if (n < 0 || m < 1 || reps < 0) throw std::invalid_argument("need n >= 0, m >= 1, reps >= 0");
  ConfinementReport report;
  report.n = n;
  report.m = m;
  report.reps = reps;
  report.mode = options.mode;
  report.acceptance_prob_exact = confine_prob_exact({n, m});

  std::optional<ConfinedStepSampler> sampler;
  if (options.mode == ConditionMode::exact) sampler.emplace(n, m);

  const int j = deep_level(rule, m);
  const int spot_levels = std::max(0, std::min(3, rule.max_level() - j));
  const int spots_each =
      options.deep_spot_checks <= 0
          ? 0
          : static_cast<int>((options.deep_spot_checks + std::max<std::int64_t>(reps, 1) - 1) /
                             std::max<std::int64_t>(reps, 1));

  struct Row {
    ConfinementSample sample;
    bool subword_violation = false;
    std::int64_t spot_violations = 0;
  };
  std::vector<Row> rows(static_cast<std::size_t>(reps));
  parallel_for(rows.size(), options.threads, [&](std::size_t r) {
    Rng rng(options.seed, r);
    Row& row = rows[r];
    row.sample.replica = static_cast<std::int64_t>(r);
    Word w = sampler ? word_from_steps(sampler->sample(rng), rng) : sample_word(n, rng);
    if (!confined(w, m)) return;
    row.sample.accepted = true;
    row.subword_violation = projected_range(w) > 2 * m;
    auto trace = inverted_orbit_tracked(rule, w, 2 * m);
    row.sample.orbit_radius = trace.radius;
    row.sample.distinct_count = trace.distinct_count;
    row.sample.max_displacement = max_displacement(rule, w, m);
    for (int i = 0; i < spots_each && spot_levels > 0; ++i) {
      int level = j + 1 + static_cast<int>(rng.below(static_cast<std::uint64_t>(spot_levels)));
      int len = level - 1;
      std::uint64_t bits = rng.next() & ((std::uint64_t{1} << len) - 1);
      auto pos = static_cast<std::int64_t>(rng.below(static_cast<std::uint64_t>(2 * rule.alpha(level))));
      auto x = VertexAddress::unchecked(bits, len, pos);
      if (displacement(rule, x, w) > row.sample.max_displacement) ++row.spot_violations;
    }
  });

  std::int64_t max_radius = 0, max_disp = 0;
  for (auto& row : rows) {
    report.samples.push_back(row.sample);
    if (!row.sample.accepted) continue;
    ++report.accepted;
    report.subword_violations += row.subword_violation;
    report.deep_spot_violations += row.spot_violations;
    max_radius = std::max(max_radius, row.sample.orbit_radius);
    max_disp = std::max(max_disp, row.sample.max_displacement);
  }
  if (report.accepted > 0) {
    report.max_orbit_radius_over_m = static_cast<double>(max_radius) / static_cast<double>(m);
    report.max_displacement_over_m = static_cast<double>(max_disp) / static_cast<double>(m);
    report.empirical_K = std::max(report.max_orbit_radius_over_m, report.max_displacement_over_m);
  }
  return report;
}

}  // namespace bubblewalk
