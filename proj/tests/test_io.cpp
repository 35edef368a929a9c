#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "bmp/cli.hpp"
#include "bmp/io.hpp"
#include "fixtures.hpp"

using namespace bmp;

namespace {

std::filesystem::path tmp_dir() {
  auto d = std::filesystem::temp_directory_path() / "bmp_io_tests";
  std::filesystem::create_directories(d);
  return d;
}

std::string write_tmp(const std::string& name, const std::string& text) {
  auto p = (tmp_dir() / name).string();
  std::ofstream(p) << text;
  return p;
}

struct CliRun {
  int code;
  std::string out, err;
};

CliRun run_cli(const std::vector<std::string>& args, const std::string& stdin_text = "") {
  std::istringstream in(stdin_text);
  std::ostringstream out, err;
  const int code = cli::run_command(args, in, out, err);
  return {code, out.str(), err.str()};
}

std::string fig1_doc() {
  auto [m, t] = fixtures::fig1_left();
  return emit_instance(m, t, nullptr);
}

double report_cost(const std::string& json_text) {
  return Json::parse(json_text).at("worst_case_cost").get<double>();
}

}  // namespace

TEST_CASE("instance parse recovers the fixture model") {
  auto pi = parse_instance(fig1_doc());
  auto [m, t] = fixtures::fig1_left();
  CHECK(pi.model.num_states() == m.num_states());
  CHECK(pi.model.state_names == m.state_names);
  CHECK(pi.model.initial == m.initial);
  CHECK(pi.model.is_target == m.is_target);
  CHECK(pi.model.avail == m.avail);
  CHECK(pi.types.type_names == t.type_names);
  CHECK(pi.types.reward == t.reward);
  CHECK(pi.config.eps_bar == doctest::Approx(0.01));  // default
}

TEST_CASE("round trip is the identity on canonical documents") {
  const std::string doc = fig1_doc();
  auto pi = parse_instance(doc);
  CHECK(emit_instance(pi.model, pi.types, nullptr) == doc);
  // and with a config block attached
  SolverConfig cfg;
  cfg.eps_bar = 0.02;
  cfg.ccp.max_iterations = 77;
  const std::string doc2 = emit_instance(pi.model, pi.types, &cfg);
  auto pi2 = parse_instance(doc2);
  CHECK(pi2.config.eps_bar == doctest::Approx(0.02));
  CHECK(pi2.config.ccp.max_iterations == 77);
  CHECK(emit_instance(pi2.model, pi2.types, &pi2.config) == doc2);
}

TEST_CASE("out-of-range probability is reported with the offending record") {
  auto doc = Json::parse(fig1_doc());
  doc["transitions"][0]["prob"] = 1.2;
  try {
    parse_instance(doc.dump());
    FAIL("expected a parse error");
  } catch (const IoError& e) {
    const std::string msg = e.what();
    CHECK(msg.find("transition (") != std::string::npos);
    CHECK(msg.find("probability out of [0,1]") != std::string::npos);
  }
}

TEST_CASE("unknown fields pass in lenient mode and fail under strict") {
  auto doc = Json::parse(fig1_doc());
  doc["comment"] = "scratch note";
  CHECK_NOTHROW(parse_instance(doc.dump(), false));
  CHECK_THROWS_AS(parse_instance(doc.dump(), true), IoError);
}

TEST_CASE("structural errors are rejected") {
  auto doc = Json::parse(fig1_doc());
  doc["initial"] = "no-such-state";
  CHECK_THROWS_AS(parse_instance(doc.dump()), IoError);
  auto doc2 = Json::parse(fig1_doc());
  doc2.erase("targets");
  CHECK_THROWS_AS(parse_instance(doc2.dump()), IoError);
  CHECK_THROWS_AS(parse_instance("{not json"), IoError);
}

TEST_CASE("solve bmpd on the fixture file exits zero with the known cost") {
  const auto path = write_tmp("fig1.json", fig1_doc());
  auto r = run_cli({"solve", "bmpd", "--epsilon-bar", "0.01", path});
  CHECK(r.code == 0);
  CHECK(report_cost(r.out) == doctest::Approx(1.01).epsilon(1e-6));
}

TEST_CASE("verify rejects the zero schedule with exit code two") {
  const auto inst = write_tmp("fig1.json", fig1_doc());
  auto [m, t] = fixtures::fig1_left();
  auto sched = IncentiveSchedule::zero(m);
  sched.epsilon = 0.01;
  const auto zpath = write_tmp("zero-schedule.json", emit_schedule(m, sched));
  auto r = run_cli({"verify", inst, zpath});
  CHECK(r.code == 2);
}

TEST_CASE("emitted schedules re-verify at the reported cost") {
  const auto inst = write_tmp("fig1.json", fig1_doc());
  const auto spath = (tmp_dir() / "fig1-sched.json").string();
  auto r = run_cli({"solve", "nbmp-milp", "--schedule-out", spath, inst});
  REQUIRE(r.code == 0);
  const double cost = report_cost(r.out);
  auto v = run_cli({"verify", inst, spath});
  CHECK(v.code == 0);
  CHECK(report_cost(v.out) == doctest::Approx(cost).epsilon(1e-5));
}

TEST_CASE("generated gap instance solves from stdin to the known value") {
  auto g = run_cli({"generate", "gap", "--x", "-5"});
  REQUIRE(g.code == 0);
  auto r = run_cli({"solve", "nsbmp-milp", "--epsilon-bar", "0.01", "-"}, g.out);
  REQUIRE(r.code == 0);
  CHECK(report_cost(r.out) == doctest::Approx(7.02).epsilon(1e-6));
}

TEST_CASE("generate subcommands emit valid instances") {
  for (auto args : {std::vector<std::string>{"generate", "qsat", "--n", "2", "--seed", "3"},
                    {"generate", "tsp", "--cities", "3", "--seed", "3"},
                    {"generate", "setcover", "--universe", "3", "--subsets", "3", "--budget",
                     "2", "--seed", "3"}}) {
    auto g = run_cli(args);
    REQUIRE(g.code == 0);
    CHECK_NOTHROW(parse_instance(g.out, true));
  }
}

TEST_CASE("transform subcommands emit valid instances with preserved reach") {
  const auto inst = write_tmp("fig1.json", fig1_doc());
  for (auto args : {std::vector<std::string>{"transform", "absorb", inst},
                    {"transform", "horizon", "--n", "2", inst}}) {
    auto r = run_cli(args);
    REQUIRE(r.code == 0);
    auto pi = parse_instance(r.out, true);
    auto part = partition_states(pi.model);
    CHECK(max_reach(pi.model, part).rmax == doctest::Approx(1.0));
  }
}

TEST_CASE("bench emits one row per solver with ratios at least one") {
  const auto inst = write_tmp("fig1.json", fig1_doc());
  auto r = run_cli({"bench", inst});
  REQUIRE(r.code == 0);
  std::istringstream lines(r.out);
  std::string line;
  std::getline(lines, line);
  CHECK(line == "instance,solver,build_time,solve_time,value,lower_bound,ratio,status");
  int rows = 0;
  while (std::getline(lines, line)) {
    ++rows;
    // ratio is the second-to-last column
    auto tail = line.substr(0, line.rfind(','));
    const double ratio = std::stod(tail.substr(tail.rfind(',') + 1));
    CHECK(ratio >= 1.0 - 1e-9);
    CHECK(line.find(",error") == std::string::npos);
  }
  CHECK(rows == 4);
}

TEST_CASE("gap sweep: single-offer to free-offer ratio strictly increases") {
  double prev = 0.0;
  for (const char* x : {"-2", "-5", "-10"}) {
    auto g = run_cli({"generate", "gap", "--x", x});
    REQUIRE(g.code == 0);
    const auto inst = write_tmp(std::string("gap") + x + ".json", g.out);
    auto rn = run_cli({"solve", "nbmp-milp", inst});
    auto rs = run_cli({"solve", "nsbmp-milp", inst});
    REQUIRE(rn.code == 0);
    REQUIRE(rs.code == 0);
    const double ratio = report_cost(rs.out) / report_cost(rn.out);
    CHECK(ratio > prev + 1e-9);
    prev = ratio;
  }
}

TEST_CASE("reports are deterministic across repeated runs") {
  const auto inst = write_tmp("fig1.json", fig1_doc());
  auto a = run_cli({"solve", "nbmp-milp", inst});
  auto b = run_cli({"solve", "nbmp-milp", inst});
  CHECK(a.code == b.code);
  CHECK(a.out == b.out);
}

TEST_CASE("usage errors exit with code one") {
  CHECK(run_cli({"solve", "unknown-method", "x.json"}).code == 1);
  CHECK(run_cli({"solve", "bmpd", "/nonexistent/file.json"}).code == 1);
  CHECK(run_cli({"frobnicate"}).code == 1);
  CHECK(run_cli({}).code == 1);
}
