#include "bubblewalk/scaling.hpp"

#include <cmath>
#include <fstream>
#include <limits>
#include <sstream>
#include <stdexcept>

#include "bubblewalk/common.hpp"

namespace bubblewalk {

namespace {

constexpr std::int64_t kValueLimit = std::int64_t{1} << 62;

}  // namespace

ScalingRule::ScalingRule(Kind kind, double parameter,
                         std::vector<std::int64_t> alpha)
    : kind_(kind), parameter_(parameter), alpha_(std::move(alpha)) {
  s_.assign(alpha_.size() + 1, 0);
  for (std::size_t k = 0; k < alpha_.size(); ++k) {
    if (alpha_[k] < 1) throw std::invalid_argument("scaling values must be >= 1");
    if (k > 0 && alpha_[k] < alpha_[k - 1])
      throw std::invalid_argument("scaling values must be nondecreasing");
    s_[k + 1] = s_[k] + alpha_[k] + 1;
  }
}

ScalingRule ScalingRule::canonical() {
  std::vector<std::int64_t> a;
  std::int64_t running = 0;
  for (int k = 1; k <= kMaxLevel; ++k) {
    std::uint64_t num = std::uint64_t{1} << k;
    std::uint64_t den = static_cast<std::uint64_t>(k) * static_cast<std::uint64_t>(k);
    auto v = static_cast<std::int64_t>((num + den - 1) / den);
    running = std::max(running, v);
    a.push_back(running);
  }
  return ScalingRule(Kind::canonical, 0.0, std::move(a));
}

ScalingRule ScalingRule::geometric(double ratio) {
  if (!(ratio > 1.0)) throw std::invalid_argument("geometric ratio must be > 1");
  std::vector<std::int64_t> a;
  std::int64_t total = 0;
  for (int k = 1; k <= kMaxLevel; ++k) {
    long double v = std::pow(static_cast<long double>(ratio), k);
    if (v >= static_cast<long double>(kValueLimit)) break;
    auto rounded = std::max<std::int64_t>(1, std::llround(v));
    if (total + rounded + 1 >= kValueLimit) break;
    total += rounded + 1;
    a.push_back(rounded);
  }
  return ScalingRule(Kind::geometric, ratio, std::move(a));
}

ScalingRule ScalingRule::constant(std::int64_t c) {
  if (c < 1) throw std::invalid_argument("constant scaling value must be >= 1");
  return ScalingRule(Kind::constant, static_cast<double>(c),
                     std::vector<std::int64_t>(kMaxLevel, c));
}

ScalingRule ScalingRule::explicit_list(std::vector<std::int64_t> values) {
  if (values.empty()) throw std::invalid_argument("explicit scaling list is empty");
  if (values.size() > static_cast<std::size_t>(kMaxLevel))
    throw LevelCapError("explicit scaling list deeper than level cap 62");
  return ScalingRule(Kind::explicit_list, 0.0, std::move(values));
}

ScalingRule ScalingRule::parse(const std::string& spec) {
  if (spec == "canonical") return canonical();
  auto colon = spec.find(':');
  if (colon == std::string::npos)
    throw std::invalid_argument("invalid alpha spec '" + spec + "'");
  std::string head = spec.substr(0, colon), tail = spec.substr(colon + 1);
  try {
    if (head == "geometric") {
      std::size_t used = 0;
      double r = std::stod(tail, &used);
      if (used != tail.size()) throw std::invalid_argument(tail);
      return geometric(r);
    }
    if (head == "constant") {
      std::size_t used = 0;
      long long c = std::stoll(tail, &used);
      if (used != tail.size()) throw std::invalid_argument(tail);
      return constant(c);
    }
  } catch (const std::logic_error& e) {
    throw std::invalid_argument("invalid alpha spec '" + spec + "': " + e.what());
  }
  if (head == "file") {
    std::ifstream in(tail);
    if (!in) throw std::invalid_argument("cannot open alpha file '" + tail + "'");
    std::vector<std::int64_t> values;
    std::string line;
    while (std::getline(in, line)) {
      std::istringstream ls(line);
      long long v;
      if (!(ls >> v)) {
        if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
        throw std::invalid_argument("bad line in alpha file: '" + line + "'");
      }
      values.push_back(v);
    }
    return explicit_list(std::move(values));
  }
  throw std::invalid_argument("invalid alpha spec '" + spec + "'");
}

std::string ScalingRule::describe() const {
  std::ostringstream out;
  switch (kind_) {
    case Kind::canonical: return "canonical";
    case Kind::geometric: out << "geometric:" << parameter_; return out.str();
    case Kind::constant: out << "constant:" << static_cast<long long>(parameter_); return out.str();
    case Kind::explicit_list:
      out << "explicit:";
      for (std::size_t i = 0; i < alpha_.size(); ++i) out << (i ? "," : "") << alpha_[i];
      return out.str();
  }
  return {};
}

void ScalingRule::throw_range(int k) const {
  std::string msg = "level " + std::to_string(k) + " out of range for " + describe();
  if (kind_ == Kind::explicit_list) throw std::out_of_range(msg + " (explicit list length)");
  throw LevelCapError(msg + " (deepest representable level " + std::to_string(max_level()) + ")");
}

int ScalingRule::value_levels() const noexcept {
  if (kind_ == Kind::constant) return 1'000'000'000;
  return max_level();
}

std::int64_t ScalingRule::alpha(int k) const {
  if (k < 1) throw std::out_of_range("alpha index must be >= 1");
  if (k > value_levels()) throw_range(k);
  if (k > max_level()) return alpha_.back();
  return alpha_[k - 1];
}

std::int64_t ScalingRule::s(int k) const {
  if (k < 0) throw std::out_of_range("s index must be >= 0");
  if (k > value_levels()) throw_range(k);
  if (k > max_level()) return s_.back() + (k - max_level()) * (alpha_.back() + 1);
  return s_[k];
}

int ScalingRule::level_containing_distance(std::int64_t r) const {
  int n = 1;
  while (n <= max_level() && s_[n] <= r) ++n;
  return n;
}

std::int64_t alpha_at(const ScalingRule& rule, int k) { return rule.alpha(k); }
std::int64_t s_at(const ScalingRule& rule, int k) { return rule.s(k); }

AssumptionReport check_assumption(const ScalingRule& rule, double d, int k_max) {
  if (k_max < 2) throw std::invalid_argument("check_assumption needs k_max >= 2");
  AssumptionReport report;
  report.checked_up_to = std::min(k_max, rule.value_levels());
  report.max_feasible_d = std::numeric_limits<double>::infinity();
  for (int k = 2; k <= report.checked_up_to; ++k) {
    auto alpha = rule.alpha(k);
    auto prev = rule.s(k - 1);
    double ratio = static_cast<double>(alpha) / static_cast<double>(prev);
    if (ratio < report.max_feasible_d) {
      report.max_feasible_d = ratio;
      report.argmin_k = k;
    }
    if (!report.first_violation_k && ratio < d)
      report.first_violation_k = k;
  }
  return report;
}

}  // namespace bubblewalk
