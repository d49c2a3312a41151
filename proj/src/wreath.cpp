#include "bubblewalk/wreath.hpp"

#include <algorithm>
#include <cmath>
#include <optional>
#include <sstream>
#include <stdexcept>

#include "bubblewalk/group.hpp"
#include "bubblewalk/orbit.hpp"

namespace bubblewalk {

namespace {

void toggle(LampConfig& lamps, const VertexAddress& x) {
  auto [it, inserted] = lamps.insert(x);
  if (!inserted) lamps.erase(it);
}

}  // namespace

WreathElement wreath_multiply(const ScalingRule& rule, const WreathElement& e1, const WreathElement& e2) {
  WreathElement out{e1.lamps, concat(e1.base, e2.base)};
  const Word back = inverse(e1.base);
  for (const auto& y : e2.lamps) toggle(out.lamps, apply_word(rule, y, back));
  return out;
}

WreathElement wreath_inverse(const ScalingRule& rule, const WreathElement& e) {
  WreathElement out{{}, inverse(e.base)};
  for (const auto& x : e.lamps) out.lamps.insert(apply_word(rule, x, e.base));
  return out;
}

bool wreath_equal(const ScalingRule& rule, const WreathElement& e1, const WreathElement& e2) {
  return e1.lamps == e2.lamps && elements_equal(rule, e1.base, e2.base);
}

WreathElement sws_step(const ScalingRule& rule, const WreathElement& state, Letter g, bool s1, bool s2) {
  WreathElement out = state;
  VertexAddress o;
  if (s1) toggle(out.lamps, apply_word(rule, o, inverse(out.base)));
  out.base.push_back(g);
  if (s2) toggle(out.lamps, apply_word(rule, o, inverse(out.base)));
  return out;
}

WreathElement parse_wreath_element(const ScalingRule& rule, std::string_view text) {
  WreathElement e;
  std::string spec(text);
  std::stringstream parts(spec);
  std::string part;
  while (std::getline(parts, part, ';')) {
    if (part.find_first_not_of(" \t") == std::string::npos) continue;
    auto eq = part.find('=');
    if (eq == std::string::npos) throw std::invalid_argument("expected key=value in '" + part + "'");
    std::string key = part.substr(0, eq), value = part.substr(eq + 1);
    if (key == "lamps") {
      std::stringstream addrs(value);
      std::string addr;
      while (std::getline(addrs, addr, ','))
        if (!addr.empty()) toggle(e.lamps, parse_address(rule, addr));
    } else if (key == "base") {
      e.base = parse_word(value);
    } else {
      throw std::invalid_argument("unknown wreath element key '" + key + "'");
    }
  }
  return e;
}

std::string format_wreath_element(const WreathElement& e) {
  std::string out = "lamps=";
  bool first = true;
  for (const auto& x : e.lamps) {
    out += (first ? "" : ",") + format_address(x);
    first = false;
  }
  return out + ";base=" + format_word(e.base);
}

Word deep_word(const ScalingRule& rule, int levels) {
  Word w;
  for (int k = 1; k <= levels; ++k) {
    w.insert(w.end(), static_cast<std::size_t>(rule.alpha(k)), Letter::a);
    w.push_back(Letter::b);
  }
  return w;
}

namespace {

// u_0, u_1, ... of the walk word. Tracked while the tracking ball is cheaper
// to update than the word is to re-read, and evaluated directly afterwards.
class OrbitFeed {
 public:
  OrbitFeed(const ScalingRule& rule, std::uint64_t limit) : rule_(&rule) {
    try {
      tracker_.emplace(rule, 1, limit);
    } catch (const ResourceGuardError&) {
      fell_back_ = true;
    }
  }

  void push(Letter g) {
    word_.push_back(g);
    if (tracker_) {
      try {
        tracker_->push(g);
        if (tracker_->tracked() <= 2 * word_.size() + 256) return;
      } catch (const ResourceGuardError&) {
      }
      tracker_.reset();
      fell_back_ = true;
    }
  }

  VertexAddress current() const {
    if (tracker_) return tracker_->current();
    VertexAddress x;
    for (std::size_t i = word_.size(); i-- > 0;) x = apply_letter(*rule_, x, inverse(word_[i]));
    return x;
  }

  bool fell_back() const noexcept { return fell_back_; }

 private:
  const ScalingRule* rule_;
  std::optional<InvertedOrbitTracker> tracker_;
  Word word_;
  bool fell_back_ = false;
};

}  // namespace

SwsSummary simulate_sws(const ScalingRule& rule, std::int64_t n, Rng& rng, const WreathElement& start,
                        const SwsOptions& options) {
  if (n < 0) throw std::invalid_argument("n must be >= 0");
  if (options.trace_every < 1) throw std::invalid_argument("trace_every must be >= 1");
  SwsSummary out;
  out.n = n;
  const VertexAddress o;

  // Lamps seen from the walker: y = x.(base of the current state). A switch
  // toggles o here, and each letter moves every lamp.
  std::vector<VertexAddress> moving;
  for (const auto& x : start.lamps) moving.push_back(apply_word(rule, x, start.base));
  std::size_t at_o = std::find(moving.begin(), moving.end(), o) - moving.begin();
  auto toggle_o = [&] {
    if (at_o < moving.size()) {
      moving[at_o] = moving.back();
      moving.pop_back();
      at_o = moving.size();
    } else {
      moving.push_back(o);
      at_o = moving.size() - 1;
    }
  };

  std::optional<OrbitFeed> feed;
  const Word start_back = inverse(start.base);
  if (options.record_sites) feed.emplace(rule, options.track_limit);
  auto site = [&] { return apply_word(rule, feed->current(), start_back); };

  out.support_size_trace.emplace_back(0, static_cast<std::int64_t>(moving.size()));
  out.walk.reserve(static_cast<std::size_t>(n));
  out.switches.reserve(static_cast<std::size_t>(n));
  for (std::int64_t k = 1; k <= n; ++k) {
    Letter g = letter_from_index(rng.bits2());
    bool s1 = rng.bit(), s2 = rng.bit();
    out.walk.push_back(g);
    out.switches.emplace_back(s1, s2);
    if (s1) {
      toggle_o();
      if (feed) out.toggle_sites.insert(site());
    }
    at_o = moving.size();
    for (std::size_t i = 0; i < moving.size(); ++i) {
      moving[i] = apply_letter(rule, moving[i], g);
      if (moving[i] == o) at_o = i;
    }
    if (feed) feed->push(g);
    if (s2) {
      toggle_o();
      if (feed) out.toggle_sites.insert(site());
    }
    out.toggles += s1 + s2;
    if (k % options.trace_every == 0 || k == n)
      out.support_size_trace.emplace_back(k, static_cast<std::int64_t>(moving.size()));
  }
  out.final_support = static_cast<std::int64_t>(moving.size());
  if (feed) out.tracker_fell_back = feed->fell_back();

  const Word base = concat(start.base, out.walk);
  if (options.record_sites) {
    const Word back = inverse(base);
    for (const auto& y : moving) out.final_lamps.insert(apply_word(rule, y, back));
  }
  if (moving.empty() && apply_word(rule, o, base) == o)
    out.returned_to_identity = free_reduce(base).empty() || elements_equal(rule, base, {});
  return out;
}

HarmonicEstimate harmonic_estimate(const ScalingRule& rule, const WreathElement& start,
                                   std::int64_t horizon, std::int64_t reps, std::uint64_t seed,
                                   unsigned threads) {
  if (horizon < 0) throw std::invalid_argument("horizon must be >= 0");
  if (reps < 1) throw std::invalid_argument("reps must be >= 1");
  const VertexAddress o;
  const VertexAddress v0 = apply_word(rule, o, start.base);
  const bool lit0 = start.lamps.count(o) > 0;
  const std::int64_t late_from = horizon - horizon / 10;

  std::vector<std::uint8_t> off(static_cast<std::size_t>(reps)), late(static_cast<std::size_t>(reps));
  parallel_for(off.size(), threads, [&](std::size_t r) {
    Rng rng(seed, r);
    bool lit = lit0;
    std::int64_t last = -1;
    VertexAddress v = v0;
    for (std::int64_t k = 1; k <= horizon; ++k) {
      if (v == o && rng.bit()) {
        lit = !lit;
        last = k;
      }
      v = apply_letter(rule, v, letter_from_index(rng.bits2()));
      if (v == o && rng.bit()) {
        lit = !lit;
        last = k;
      }
    }
    off[r] = !lit;
    late[r] = horizon > 0 && last > late_from;
  });

  HarmonicEstimate est;
  est.reps = reps;
  double hits = 0, late_hits = 0;
  for (std::size_t r = 0; r < off.size(); ++r) {
    hits += off[r];
    late_hits += late[r];
  }
  est.p_hat = hits / static_cast<double>(reps);
  est.std_error = std::sqrt(est.p_hat * (1 - est.p_hat) / static_cast<double>(reps));
  est.late_toggle_fraction = late_hits / static_cast<double>(reps);
  return est;
}

}  // namespace bubblewalk
