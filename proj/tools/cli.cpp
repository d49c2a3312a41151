#include "cli.hpp"

#include <charconv>
#include <chrono>
#include <cmath>
#include <fstream>
#include <functional>
#include <memory>
#include <optional>
#include <sstream>
#include <thread>

#include "CLI11.hpp"
#include "json.hpp"

#include "bubblewalk/analysis.hpp"
#include "bubblewalk/common.hpp"
#include "bubblewalk/graph.hpp"
#include "bubblewalk/group.hpp"
#include "bubblewalk/orbit.hpp"
#include "bubblewalk/scaling.hpp"
#include "bubblewalk/wreath.hpp"
#include "bubblewalk/zline.hpp"

namespace bubblewalk::cli {

std::string format_number(double x) {
  if (std::isnan(x)) return "nan";
  if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
  char buf[64];
  auto res = std::to_chars(buf, buf + sizeof buf, x);
  return std::string(buf, res.ptr);
}

namespace {

std::string csv_cell(const Cell& c) {
  struct {
    std::string operator()(std::monostate) const { return ""; }
    std::string operator()(std::int64_t v) const { return std::to_string(v); }
    std::string operator()(double v) const { return format_number(v); }
    std::string operator()(bool v) const { return v ? "1" : "0"; }
    std::string operator()(const std::string& s) const {
      if (s.find_first_of(",\"\n") == std::string::npos) return s;
      std::string q = "\"";
      for (char ch : s) q += ch == '"' ? std::string("\"\"") : std::string(1, ch);
      return q + "\"";
    }
  } visit;
  return std::visit(visit, c);
}

}  // namespace

void write_csv(std::ostream& out, const Table& t) {
  for (std::size_t i = 0; i < t.columns.size(); ++i) out << (i ? "," : "") << t.columns[i];
  out << '\n';
  for (const auto& row : t.rows) {
    for (std::size_t i = 0; i < row.size(); ++i) out << (i ? "," : "") << csv_cell(row[i]);
    out << '\n';
  }
}

void write_json_lines(std::ostream& out, const Table& t) {
  for (const auto& row : t.rows) {
    nlohmann::ordered_json obj = nlohmann::ordered_json::object();
    for (std::size_t i = 0; i < row.size() && i < t.columns.size(); ++i) {
      const auto& c = row[i];
      if (std::holds_alternative<std::monostate>(c)) continue;
      if (auto* v = std::get_if<std::int64_t>(&c)) obj[t.columns[i]] = *v;
      else if (auto* d = std::get_if<double>(&c)) {
        if (std::isfinite(*d)) obj[t.columns[i]] = *d;
        else obj[t.columns[i]] = format_number(*d);
      } else if (auto* b = std::get_if<bool>(&c)) obj[t.columns[i]] = *b;
      else obj[t.columns[i]] = std::get<std::string>(c);
    }
    out << obj.dump() << '\n';
  }
}

std::int64_t parse_count(const std::string& text) {
  double v = 0;
  auto res = std::from_chars(text.data(), text.data() + text.size(), v);
  if (res.ec != std::errc() || res.ptr != text.data() + text.size())
    throw CLI::ValidationError("'" + text + "' is not a number");
  if (v != std::floor(v) || std::abs(v) > 9.0e15)
    throw CLI::ValidationError("'" + text + "' is not an integer");
  return static_cast<std::int64_t>(v);
}

namespace {

struct Global {
  std::string alpha = "canonical";
  std::uint64_t seed = 1;
  unsigned threads = std::max(1u, std::thread::hardware_concurrency());
  std::string out_path;
  std::string format = "auto";
  std::string log_path;
};

// Result of one command: either a bare scalar (printed as-is in automatic
// format) or a table.
struct Result {
  Table table;
  bool scalar = false;
};

Result scalar_result(const std::string& column, Cell value) {
  Result r;
  r.table.columns = {column};
  r.table.rows = {{std::move(value)}};
  r.scalar = true;
  return r;
}

// Adds a summary row "label" with value in column `col`.
void summary_row(Table& t, const std::string& label, std::size_t col, Cell value) {
  std::vector<Cell> row(t.columns.size());
  row[0] = label;
  row[col] = std::move(value);
  t.rows.push_back(std::move(row));
}

CLI::Option* add_count(CLI::App* app, const std::string& name, std::int64_t& target, const std::string& desc,
                       bool required = false) {
  auto* opt = app->add_option_function<std::string>(
      name, [&target](const std::string& s) { target = parse_count(s); }, desc);
  if (required) opt->required();
  else opt->default_str(std::to_string(target));
  return opt;
}

class Cli {
 public:
  Cli() : app_("Random walks on bubble groups and their lamplighters.", "bubblewalk") {
    app_.set_config("--config", "", "key=value config file; flags override it");
    app_.add_option("--alpha", g_.alpha, "scaling rule: canonical, geometric:<r>, constant:<c>, file:<path>")
        ->capture_default_str();
    app_.add_option("--seed", g_.seed, "base seed; replica r uses stream (seed, r)")->capture_default_str();
    app_.add_option("--threads", g_.threads, "worker threads")->check(CLI::PositiveNumber);
    app_.add_option("--out", g_.out_path, "write results to this file instead of stdout");
    app_.add_option("--format", g_.format, "auto, csv or json")
        ->check(CLI::IsMember({"auto", "csv", "json"}))
        ->capture_default_str();
    app_.add_option("--log", g_.log_path, "append wall-time records to this file");
    app_.require_subcommand(1);
    app_.fallthrough();

    add_graph();
    add_zline();
    add_orbit();
    add_group();
    add_wreath();
    add_analysis();
  }

  int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
    try {
      app_.parse(argc, argv);
    } catch (const CLI::CallForHelp&) {
      out << app_.help();
      return 0;
    } catch (const CLI::CallForAllHelp&) {
      out << app_.help("", CLI::AppFormatMode::All);
      return 0;
    } catch (const CLI::ParseError& e) {
      std::ostringstream msg, help;
      app_.exit(e, help, msg);
      err << msg.str();
      return 2;
    }
    if (!action_) {
      err << "error: no command given\n";
      return 2;
    }
    std::ofstream file;
    std::ostream* sink = &out;
    if (!g_.out_path.empty()) {
      file.open(g_.out_path, std::ios::binary);
      if (!file) {
        err << "error: cannot write '" << g_.out_path << "'\n";
        return 5;
      }
      sink = &file;
    }
    Result result;
    const auto start = std::chrono::steady_clock::now();
    try {
      rule_ = std::make_unique<ScalingRule>(ScalingRule::parse(g_.alpha));
      result = action_();
    } catch (const ResourceGuardError& e) {
      err << "error: resource guard exceeded: " << e.what() << '\n';
      return 3;
    } catch (const LevelCapError& e) {
      err << "error: level cap: " << e.what() << '\n';
      return 4;
    } catch (const std::exception& e) {
      err << "error: " << e.what() << '\n';
      return 2;
    }
    const double seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();

    if (g_.format == "json") write_json_lines(*sink, result.table);
    else if (g_.format == "auto" && result.scalar && g_.out_path.empty())
      *sink << csv_cell(result.table.rows[0][0]) << '\n';
    else write_csv(*sink, result.table);
    sink->flush();
    if (!*sink) {
      err << "error: writing results failed\n";
      return 5;
    }
    if (!g_.log_path.empty()) {
      std::ofstream log(g_.log_path, std::ios::app);
      if (!log) {
        err << "error: cannot write '" << g_.log_path << "'\n";
        return 5;
      }
      log << command_ << " alpha=" << g_.alpha << " seed=" << g_.seed << " threads=" << g_.threads
          << " wall_time_s=" << format_number(seconds) << '\n';
    }
    return 0;
  }

 private:
  const ScalingRule& rule() const { return *rule_; }

  CLI::App* command(CLI::App* parent, const std::string& name, const std::string& desc,
                    std::function<Result()> fn) {
    auto* sub = parent->add_subcommand(name, desc);
    sub->fallthrough();
    std::string full = parent == &app_ ? name : parent->get_name() + " " + name;
    sub->callback([this, fn, full] {
      action_ = fn;
      command_ = full;
    });
    return sub;
  }

  CLI::App* group(const std::string& name, const std::string& desc) {
    auto* sub = app_.add_subcommand(name, desc);
    sub->fallthrough();
    sub->require_subcommand(1);
    return sub;
  }

  void add_graph() {
    auto* graph = group("graph", "balls and distances in S(alpha)");
    auto* ball_cmd = command(graph, "ball", "vertices of B_r(center) in BFS order", [this] {
      Result r;
      r.table.columns = {"vertex", "dist"};
      auto c = parse_address(rule(), ball_center_);
      for (const auto& v : ball(rule(), c, ball_r_))
        r.table.rows.push_back({format_address(v), tree_distance(rule(), c, v)});
      return r;
    });
    ball_cmd->add_option("--center", ball_center_, "center address path:pos")->capture_default_str();
    add_count(ball_cmd, "--r", ball_r_, "radius", true);

    auto* dist_cmd = command(graph, "dist", "graph distance between two vertices", [this] {
      auto x = parse_address(rule(), dist_from_), y = parse_address(rule(), dist_to_);
      if (dist_bfs_) {
        auto d = dist(rule(), x, y, dist_cap_);
        if (!d) throw std::runtime_error("distance exceeds --cap " + std::to_string(dist_cap_));
        return scalar_result("dist", *d);
      }
      return scalar_result("dist", tree_distance(rule(), x, y));
    });
    dist_cmd->add_option("--from", dist_from_, "address path:pos")->required();
    dist_cmd->add_option("--to", dist_to_, "address path:pos")->required();
    dist_cmd->add_flag("--bfs", dist_bfs_, "breadth-first search instead of the closed form");
    add_count(dist_cmd, "--cap", dist_cap_, "BFS distance cap");
  }

  void add_zline() {
    auto* zline = group("zline", "confinement of the projected walk on Z");
    auto* confine = command(zline, "confine", "P(A_{n,m}) for the lazy walk", [this] {
      ConfineQuery q{zn_, zm_};
      double lp = zspectral_ ? confine_log_prob_spectral(q) : confine_log_prob_exact(q);
      if (zlog_) return scalar_result("log_probability", lp);
      return scalar_result("probability", std::exp(lp));
    });
    add_count(confine, "--n", zn_, "steps", true);
    add_count(confine, "--m", zm_, "half-width", true);
    confine->add_flag("--log", zlog_, "print log P instead of P");
    confine->add_flag("--spectral", zspectral_, "use the eigen-expansion instead of iterating");
  }

  void add_orbit() {
    auto* orbit = group("orbit", "inverted orbits of random words");
    auto* sample = command(orbit, "sample", "inverted orbit statistics of uniform random words", [this] {
      Result r;
      r.table.columns = {"replica", "n", "orbit_radius", "distinct_count", "expansions", "projected_range"};
      std::vector<std::vector<Cell>> rows(static_cast<std::size_t>(oreps_));
      parallel_for(rows.size(), g_.threads, [&](std::size_t i) {
        Rng rng(g_.seed, i);
        auto w = sample_word(on_, rng);
        auto t = inverted_orbit_tracked(rule(), w, 1);
        rows[i] = {static_cast<std::int64_t>(i), on_, t.radius, t.distinct_count, t.expansions, projected_range(w)};
      });
      r.table.rows = std::move(rows);
      return r;
    });
    add_count(sample, "--n", on_, "word length", true);
    add_count(sample, "--reps", oreps_, "replicas");

    auto* cond = command(orbit, "condition", "orbit radius and displacement given A_{n,m}", [this] {
      ConditionOptions opt;
      opt.mode = omode_ == "exact" ? ConditionMode::exact : ConditionMode::rejection;
      opt.seed = g_.seed;
      opt.threads = g_.threads;
      auto rep = conditioned_orbit_stats(rule(), on_, om_, oreps_, opt);
      Result r;
      if (osamples_) {
        r.table.columns = {"replica", "accepted", "orbit_radius", "max_displacement", "distinct_count"};
        for (const auto& s : rep.samples)
          r.table.rows.push_back({s.replica, s.accepted, s.orbit_radius, s.max_displacement, s.distinct_count});
        return r;
      }
      r.table.columns = {"n", "m", "reps", "accepted", "mode", "acceptance_prob_exact", "max_orbit_radius_over_m",
                         "max_displacement_over_m", "empirical_K", "subword_violations", "deep_spot_violations"};
      r.table.rows.push_back({rep.n, rep.m, rep.reps, rep.accepted, omode_, rep.acceptance_prob_exact,
                              rep.max_orbit_radius_over_m, rep.max_displacement_over_m,
                              rep.empirical_K ? Cell{*rep.empirical_K} : Cell{}, rep.subword_violations,
                              rep.deep_spot_violations});
      return r;
    });
    add_count(cond, "--n", on_, "word length", true);
    add_count(cond, "--m", om_, "confinement half-width", true);
    add_count(cond, "--reps", oreps_, "replicas");
    cond->add_option("--mode", omode_, "rejection or exact")
        ->check(CLI::IsMember({"rejection", "exact"}))
        ->capture_default_str();
    cond->add_flag("--samples", osamples_, "one row per replica instead of the summary");
  }

  void add_group() {
    auto* grp = group("group", "word problem and element counts in Gamma(alpha)");
    auto* eq = command(grp, "equal", "whether two words are the same element", [this] {
      return scalar_result("equal", elements_equal(rule(), parse_word(w1_), parse_word(w2_)));
    });
    eq->add_option("--w1", w1_, "word over aAbB")->required();
    eq->add_option("--w2", w2_, "word over aAbB")->required();

    auto* count = command(grp, "count", "distinct elements with small inverted orbits", [this] {
      auto c = count_small_orbit_elements(rule(), gn_, gm_, gk_, g_.threads);
      Result r;
      r.table.columns = {"n",           "m", "k_emp", "radius_limit", "distinct_elements", "words_examined",
                         "reduced_words_visited", "hash_collisions"};
      r.table.rows.push_back({c.n, c.m, c.k_emp, c.radius_limit, c.distinct_elements,
                              static_cast<std::int64_t>(c.words_examined),
                              static_cast<std::int64_t>(c.reduced_words_visited),
                              static_cast<std::int64_t>(c.hash_collisions)});
      return r;
    });
    add_count(count, "--n", gn_, "word length", true);
    add_count(count, "--m", gm_, "confinement half-width", true);
    count->add_option("--K", gk_, "radius constant")->capture_default_str();
  }

  void add_wreath() {
    auto* wr = group("wreath", "switch-walk-switch walk on the lamplighter");
    auto* sim = command(wr, "simulate", "final lamp support per replica", [this] {
      auto start = parse_wreath_element(rule(), wstart_);
      Result r;
      r.table.columns = {"replica", "final_support", "returned", "toggles"};
      SwsOptions opt;
      opt.record_sites = false;
      opt.trace_every = std::max<std::int64_t>(wn_, 1);
      std::vector<std::vector<Cell>> rows(static_cast<std::size_t>(wreps_));
      parallel_for(rows.size(), g_.threads, [&](std::size_t i) {
        Rng rng(g_.seed, i);
        auto s = simulate_sws(rule(), wn_, rng, start, opt);
        rows[i] = {static_cast<std::int64_t>(i), s.final_support, s.returned_to_identity, s.toggles};
      });
      r.table.rows = std::move(rows);
      return r;
    });
    add_count(sim, "--n", wn_, "steps", true);
    add_count(sim, "--reps", wreps_, "replicas");
    sim->add_option("--start", wstart_, "start element lamps=<addr>,...;base=<word>");

    auto* harm = command(wr, "harmonic", "P(lamp at o is off at the horizon)", [this] {
      auto start = parse_wreath_element(rule(), wstart_);
      auto h = harmonic_estimate(rule(), start, whorizon_, wreps_, g_.seed, g_.threads);
      Result r;
      r.table.columns = {"horizon", "reps", "p_hat", "stderr", "late_toggle_fraction"};
      r.table.rows.push_back({whorizon_, h.reps, h.p_hat, h.std_error, h.late_toggle_fraction});
      return r;
    });
    harm->add_option("--start", wstart_, "start element lamps=<addr>,...;base=<word>");
    add_count(harm, "--horizon", whorizon_, "steps", true);
    add_count(harm, "--reps", wreps_, "replicas");
  }

  void add_analysis() {
    auto* an = group("analysis", "transience, volume growth and the return-probability bound");
    auto* flow = command(an, "flow", "energy of the explicit unit flow", [this] {
      auto e = flow_energy(rule(), static_cast<int>(akmax_));
      Result r;
      r.table.columns = {"K", "level_term", "partial_sum", "displayed_partial_sum"};
      for (int k = 1; k <= e.k_max; ++k) {
        auto i = static_cast<std::size_t>(k - 1);
        r.table.rows.push_back({std::int64_t{k}, e.level_terms[i], e.partial_sums[i], e.displayed_partial_sums[i]});
      }
      summary_row(r.table, "tail_exponent", 2, e.tail_exponent);
      summary_row(r.table, "converges", 2, e.converges);
      if (akirchhoff_ > 0) summary_row(r.table, "kirchhoff", 2, kirchhoff_check(rule(), static_cast<int>(akirchhoff_)));
      return r;
    });
    add_count(flow, "--kmax", akmax_, "levels");
    add_count(flow, "--kirchhoff", akirchhoff_, "also check Kirchhoff's law up to this level (0: skip)");

    auto* green = command(an, "green", "expected visits to o up to n/4, n/2, n", [this] {
      auto est = green_function_estimate(rule(), an_, areps_, g_.seed, g_.threads);
      Result r;
      r.table.columns = {"T", "G", "stderr"};
      for (std::size_t i = 0; i < 3; ++i) r.table.rows.push_back({est.times[i], est.g[i], est.std_error[i]});
      summary_row(r.table, "saturation", 1, est.saturation());
      summary_row(r.table, "growth_ratio", 1, est.growth_ratio());
      return r;
    });
    add_count(green, "--n", an_, "steps", true);
    add_count(green, "--reps", areps_, "replicas");

    auto* volume = command(an, "volume", "log-log slope of |B_r(o)|", [this] {
      auto fit = volume_exponent_fit(rule(), log_spaced(armin_, armax_, static_cast<int>(apoints_)));
      Result r;
      r.table.columns = {"r", "ball_size"};
      for (std::size_t i = 0; i < fit.radii.size(); ++i) r.table.rows.push_back({fit.radii[i], fit.ball_sizes[i]});
      summary_row(r.table, "slope", 1, fit.slope);
      return r;
    });
    add_count(volume, "--rmin", armin_, "smallest radius");
    add_count(volume, "--rmax", armax_, "largest radius");
    add_count(volume, "--points", apoints_, "radii, log-spaced");

    auto* bound = command(an, "bound", "p_2n(e,e) >= P(A_{n,m})^2 / |A| optimized over m", [this] {
      CountingConstants c;
      c.K = aK_;
      if (acpath_ > 0) c.c_path = acpath_;
      c.c_deep = acdeep_;
      std::vector<std::int64_t> ns;
      for (std::int64_t n = anmin_; n <= anmax_; n *= 10) ns.push_back(n);
      std::vector<std::int64_t> grid;
      for (auto m : amgrid_) grid.push_back(parse_count(m));
      auto t = bound_pipeline(rule(), ns, grid, c, g_.threads);
      Result r;
      r.table.columns = {"n", "m_opt", "log_pA_lower", "log_A_upper", "log_bound"};
      for (const auto& row : t.rows)
        r.table.rows.push_back({row.n, row.m_opt, row.log_pA_lower, row.log_A_upper, row.log_bound});
      if (t.rows.size() >= 2) {
        summary_row(r.table, "fitted_exponent", 4, t.fitted_exponent);
        summary_row(r.table, "m_opt_exponent", 4, t.m_opt_exponent);
      }
      return r;
    });
    add_count(bound, "--nmin", anmin_, "smallest n");
    add_count(bound, "--nmax", anmax_, "largest n (n runs over nmin, 10 nmin, ...)");
    bound->add_option("--m-grid", amgrid_, "m values (default powers of 2 up to n^(1/3))");
    bound->add_option("--K", aK_, "radius constant")->capture_default_str();
    bound->add_option("--c-path", acpath_, "two-level constant (default 6 K)");
    bound->add_option("--c-deep", acdeep_, "deep-vertex radius constant")->capture_default_str();
  }

  CLI::App app_;
  Global g_;
  std::unique_ptr<ScalingRule> rule_;
  std::function<Result()> action_;
  std::string command_;

  std::string ball_center_ = ":0";
  std::int64_t ball_r_ = 0;
  std::string dist_from_, dist_to_;
  bool dist_bfs_ = false;
  std::int64_t dist_cap_ = 100000;

  std::int64_t zn_ = 0, zm_ = 1;
  bool zlog_ = false, zspectral_ = false;

  std::int64_t on_ = 0, om_ = 1, oreps_ = 1000;
  std::string omode_ = "exact";
  bool osamples_ = false;

  std::string w1_, w2_;
  std::int64_t gn_ = 0, gm_ = 1;
  double gk_ = 16.0;

  std::int64_t wn_ = 0, wreps_ = 100, whorizon_ = 0;
  std::string wstart_;

  std::int64_t akmax_ = 60, akirchhoff_ = 0;
  std::int64_t an_ = 1, areps_ = 100;
  std::int64_t armin_ = 1000, armax_ = 100000, apoints_ = 21;
  std::int64_t anmin_ = 1000, anmax_ = 10000000;
  std::vector<std::string> amgrid_;
  double aK_ = 16.0, acpath_ = 0.0, acdeep_ = 1.0;
};

}  // namespace

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  Cli cli;
  return cli.run(argc, argv, out, err);
}

}  // namespace bubblewalk::cli
