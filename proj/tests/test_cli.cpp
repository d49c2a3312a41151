#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "cli.hpp"
#include "doctest.h"

using bubblewalk::cli::run;

namespace {

struct Output {
  int status = 0;
  std::string out, err;
};

Output call(std::vector<std::string> args) {
  args.insert(args.begin(), "bubblewalk");
  std::vector<const char*> argv;
  for (const auto& a : args) argv.push_back(a.c_str());
  std::ostringstream out, err;
  Output o;
  o.status = run(static_cast<int>(argv.size()), argv.data(), out, err);
  o.out = out.str();
  o.err = err.str();
  return o;
}

const std::string fig1 = std::string("file:") + BUBBLEWALK_DATA_DIR + "/fig1.txt";

}  // namespace

TEST_CASE("number helpers") {
  using bubblewalk::cli::format_number;
  using bubblewalk::cli::parse_count;
  CHECK(format_number(0.875) == "0.875");
  CHECK(format_number(2.0) == "2");
  CHECK(format_number(0.1) == "0.1");
  CHECK(parse_count("1e3") == 1000);
  CHECK(parse_count("2500000") == 2500000);
  CHECK_THROWS(parse_count("1.5"));
  CHECK_THROWS(parse_count("ten"));
}

TEST_CASE("documented examples") {
  auto z = call({"zline", "confine", "--n", "2", "--m", "1"});
  CHECK(z.status == 0);
  CHECK(z.out == "0.875\n");
  auto d = call({"graph", "dist", "--alpha", fig1, "--from", ":1", "--to", ":3"});
  CHECK(d.status == 0);
  CHECK(d.out == "2\n");
  CHECK(call({"graph", "dist", "--alpha", fig1, "--from", ":1", "--to", ":3", "--bfs"}).out == "2\n");

  auto b = call({"analysis", "bound", "--alpha", "canonical", "--nmin", "1e3", "--nmax", "1e7"});
  CHECK(b.status == 0);
  CHECK(b.out.rfind("n,m_opt,log_pA_lower,log_A_upper,log_bound\n", 0) == 0);
  CHECK(b.out.find("\nfitted_exponent,") != std::string::npos);
}

TEST_CASE("formats") {
  CHECK(call({"zline", "confine", "--n", "2", "--m", "1", "--format", "csv"}).out == "probability\n0.875\n");
  CHECK(call({"zline", "confine", "--n", "2", "--m", "1", "--format", "json"}).out == "{\"probability\":0.875}\n");
  auto j = call({"analysis", "flow", "--alpha", fig1, "--kmax", "3", "--format", "json"});
  CHECK(j.out.find("{\"K\":3,\"level_term\":0.625,\"partial_sum\":3.125") != std::string::npos);
  CHECK(call({"group", "equal", "--w1", "bbb", "--w2", ""}).out == "1\n");
}

TEST_CASE("config file, overridden by flags") {
  const std::string path = "cli_test_config.ini";
  {
    std::ofstream cfg(path);
    cfg << "alpha=" << fig1 << "\n[zline.confine]\nn=4\nm=1\n";
  }
  CHECK(call({"--config", path, "zline", "confine"}).out == "0.640625\n");
  CHECK(call({"--config", path, "zline", "confine", "--n", "2"}).out == "0.875\n");
  CHECK(call({"--config", path, "graph", "dist", "--from", ":1", "--to", ":3"}).out == "2\n");
}

TEST_CASE("errors name their cause") {
  auto guard = call({"graph", "ball", "--r", "100000"});
  CHECK(guard.status == 3);
  CHECK(guard.err.find("ball-size") != std::string::npos);
  auto cap = call({"analysis", "green", "--alpha", "constant:3", "--n", "1e6", "--reps", "1"});
  CHECK(cap.status == 4);
  auto bad = call({"zline", "confine", "--n", "2", "--m", "1", "--alpha", "weird"});
  CHECK(bad.status == 2);
  CHECK(bad.err.find("alpha") != std::string::npos);
  CHECK(call({"zline", "confine", "--m", "1"}).status == 2);
  CHECK(call({"zline", "confine", "--n", "2", "--m", "1", "--out", "/nonexistent/dir/x.csv"}).status == 5);
}

TEST_CASE("output is identical across runs and thread counts") {
  const std::vector<std::vector<std::string>> commands = {
      {"orbit", "sample", "--n", "200", "--reps", "40"},
      {"orbit", "condition", "--n", "300", "--m", "3", "--reps", "30", "--samples"},
      {"wreath", "simulate", "--n", "500", "--reps", "30"},
      {"wreath", "harmonic", "--horizon", "500", "--reps", "500", "--start", "lamps=:0;base=ab"},
      {"analysis", "green", "--n", "2000", "--reps", "40"},
      {"group", "count", "--n", "6", "--m", "1", "--K", "4"},
  };
  for (const auto& cmd : commands) {
    std::vector<std::string> out;
    for (const char* threads : {"1", "1", "3"}) {
      auto args = cmd;
      args.insert(args.end(), {"--seed", "42", "--threads", threads});
      auto o = call(args);
      REQUIRE(o.status == 0);
      out.push_back(o.out);
    }
    CHECK(out[0] == out[1]);
    CHECK(out[0] == out[2]);
    auto other = cmd;
    other.insert(other.end(), {"--seed", "43"});
    if (cmd[0] != "group") CHECK(call(other).out != out[0]);
  }
}
