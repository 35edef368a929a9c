#pragma once
// Command-line front end. All logic lives here as run_command() so the test
// suite can drive the tool in-process; tools/bmp_cli.cpp is a thin wrapper.
//
// Exit codes: 0 success, 1 usage or parse error, 2 problem infeasible (or a
// schedule that fails verification), 3 solver failure.

#include <chrono>
#include <cmath>
#include <fstream>
#include <iostream>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "bmp/bmpd.hpp"
#include "bmp/ccp.hpp"
#include "bmp/io.hpp"
#include "bmp/milp_builder.hpp"
#include "bmp/reachability.hpp"
#include "bmp/reductions.hpp"

namespace bmp::cli {

constexpr int kOk = 0;
constexpr int kUsage = 1;
constexpr int kInfeasible = 2;
constexpr int kSolverFailure = 3;

namespace detail {

inline std::string read_text(const std::string& path, std::istream& in) {
  std::ostringstream os;
  if (path == "-") {
    os << in.rdbuf();
  } else {
    std::ifstream f(path);
    if (!f) throw IoError("cannot open '" + path + "'");
    os << f.rdbuf();
  }
  return os.str();
}

inline void write_file(const std::string& path, const std::string& text) {
  std::ofstream f(path);
  if (!f) throw IoError("cannot write '" + path + "'");
  f << text;
}

inline double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

// shortest round-trip decimal form, shared by CSV and JSON output
inline std::string num(double v) {
  if (v == kInf) return "inf";
  if (v == -kInf) return "-inf";
  return Json(v).dump();
}

struct SolveOutcome {
  SolveReport rep;
  IncentiveSchedule sched;
  double build_time = 0.0;
  double solve_time = 0.0;
};

// Dispatch on method name; throws std::runtime_error on solver failure.
inline SolveOutcome run_solver(const std::string& method, const MdpModel& m, const TypeSet& t,
                               const SolverConfig& cfg, int theta_d) {
  auto part = partition_states(m);
  SolveOutcome out;
  const auto t0 = std::chrono::steady_clock::now();
  if (method == "bmpd") {
    std::tie(out.rep, out.sched) = solve_bmpd(m, t, theta_d, part, cfg.eps_bar);
  } else if (method == "nbmp-milp" || method == "nsbmp-milp") {
    const bool single = method == "nsbmp-milp";
    {
      const auto b0 = std::chrono::steady_clock::now();
      auto built = build_nbmp_milp(m, t, part, cfg.eps_bar, cfg.k_tilde, single);
      if (single) extend_ns_bmp(built.first, built.second, m, part);
      out.build_time = seconds_since(b0);
    }
    std::tie(out.rep, out.sched) =
        single ? solve_nsbmp(m, t, part, cfg.eps_bar) : solve_nbmp(m, t, part, cfg.eps_bar);
  } else if (method == "nbmp-ccp" || method == "nsbmp-ccp") {
    const bool single = method == "nsbmp-ccp";
    {
      const auto b0 = std::chrono::steady_clock::now();
      build_nbmp_nlp(m, t, part, cfg.eps_bar, single, cfg.k_tilde);
      out.build_time = seconds_since(b0);
    }
    auto [rep, sched, trace] = single ? solve_nsbmp_ccp(m, t, part, cfg.eps_bar, cfg.ccp)
                                      : solve_nbmp_ccp(m, t, part, cfg.eps_bar, cfg.ccp);
    out.rep = std::move(rep);
    out.sched = std::move(sched);
    if (!out.rep.feasible)
      throw std::runtime_error("ccp did not reach a feasible point: " + out.rep.diagnostics);
  } else {
    throw std::invalid_argument("unknown method '" + method + "'");
  }
  out.solve_time = seconds_since(t0) - out.build_time;
  return out;
}

}  // namespace detail

inline int run_command(const std::vector<std::string>& args, std::istream& in,
                       std::ostream& out, std::ostream& err) {
  CLI::App app{"incentive-schedule synthesis for MDP agents of unknown type"};
  app.name("bmp_cli");
  app.require_subcommand(1);
  app.fallthrough();  // parent options may appear after the subcommand name

  bool strict = false;
  app.add_flag("--strict", strict, "reject unknown fields in input documents");
  double eps_bar = -1.0;  // <0: use the value from the instance config block
  app.add_option("--epsilon-bar", eps_bar, "strict-preference margin (overrides config)");

  std::string instance_path, schedule_path, schedule_out, report_out;
  int theta_d = 0, horizon_n = 2;
  double gap_x = -5.0;
  int gen_n = 4, gen_clauses = 3, gen_cities = 4, gen_universe = 3, gen_subsets = 4,
      gen_budget = 2;
  unsigned gen_seed = 1;
  double tsp_k = -1.0;
  std::vector<std::string> bench_paths;

  auto* pre = app.add_subcommand("preprocess", "validate and canonicalize an instance");
  pre->add_option("instance", instance_path, "instance file or - for stdin")->required();

  auto* base = app.add_subcommand("baseline", "conservative feasible schedule");
  base->add_option("instance", instance_path)->required();
  base->add_option("--schedule-out", schedule_out, "write the schedule to this file");

  auto* solve = app.add_subcommand("solve", "synthesize a near-optimal schedule");
  std::string method;
  solve
      ->add_option("method", method, "bmpd | nbmp-milp | nsbmp-milp | nbmp-ccp | nsbmp-ccp")
      ->required()
      ->check(CLI::IsMember({"bmpd", "nbmp-milp", "nsbmp-milp", "nbmp-ccp", "nsbmp-ccp"}));
  solve->add_option("instance", instance_path)->required();
  solve->add_option("--type", theta_d, "agent type index for bmpd");
  solve->add_option("--schedule-out", schedule_out, "write the schedule to this file");
  solve->add_option("--report-out", report_out, "write the report to this file");

  auto* verify = app.add_subcommand("verify", "re-verify a schedule against an instance");
  verify->add_option("instance", instance_path)->required();
  verify->add_option("schedule", schedule_path)->required();

  auto* gen = app.add_subcommand("generate", "emit a generated instance");
  gen->require_subcommand(1);
  auto* g_qsat = gen->add_subcommand("qsat", "random quantified 3-CNF instance");
  g_qsat->add_option("--n", gen_n, "number of variables (even)");
  g_qsat->add_option("--clauses", gen_clauses, "number of clauses");
  g_qsat->add_option("--seed", gen_seed);
  auto* g_tsp = gen->add_subcommand("tsp", "random metric travelling-salesman instance");
  g_tsp->add_option("--cities", gen_cities);
  g_tsp->add_option("--seed", gen_seed);
  g_tsp->add_option("--k", tsp_k, "tour-length threshold (default: max pairwise cost)");
  auto* g_cover = gen->add_subcommand("setcover", "random set-cover instance");
  g_cover->add_option("--universe", gen_universe);
  g_cover->add_option("--subsets", gen_subsets);
  g_cover->add_option("--budget", gen_budget);
  g_cover->add_option("--seed", gen_seed);
  auto* g_gap = gen->add_subcommand("gap", "two-lane example separating N from NS");
  g_gap->add_option("--x", gap_x, "reward parameter, must be below -1");

  auto* trans = app.add_subcommand("transform", "model transformations");
  trans->require_subcommand(1);
  auto* t_hor = trans->add_subcommand("horizon", "expand to an N-step decision layer");
  t_hor->add_option("--n", horizon_n, "layer count")->required();
  t_hor->add_option("instance", instance_path)->required();
  auto* t_abs = trans->add_subcommand("absorb", "make target states absorbing");
  t_abs->add_option("instance", instance_path)->required();

  auto* bench = app.add_subcommand("bench", "run every solver on each instance, CSV output");
  bench->add_option("instances", bench_paths, "instance files")->required();

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(std::move(reversed));
  } catch (const CLI::CallForHelp& e) {
    out << app.help();
    return kOk;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << "\n";
    return kUsage;
  }

  auto load = [&](const std::string& path) {
    auto parsed = parse_instance(detail::read_text(path, in), strict);
    if (eps_bar > 0.0) parsed.config.eps_bar = eps_bar;
    return parsed;
  };
  auto emit_report = [&](const SolveReport& rep) {
    const std::string text = report_to_json(rep).dump(2) + "\n";
    if (!report_out.empty())
      detail::write_file(report_out, text);
    else
      out << text;
    err << human_summary(rep);
  };

  try {
    if (pre->parsed()) {
      auto [m, t, cfg] = load(instance_path);
      auto part = partition_states(m);
      out << emit_instance(m, t, &cfg);
      err << m.num_states() << " states, " << t.num_types() << " types, " << part.num_live()
          << " live states, max reach " << max_reach(m, part).rmax << "\n";
      return kOk;
    }

    if (base->parsed()) {
      auto [m, t, cfg] = load(instance_path);
      auto part = partition_states(m);
      auto [sched, cost] = conservative_baseline(m, t, part, cfg.eps_bar);
      SolveReport rep;
      rep.method = "baseline";
      rep.epsilon = cfg.eps_bar;
      rep.fill_from(verify_schedule(m, t, part, sched));
      rep.lower_bound = weak_duality_lower_bound(m, t, part);
      rep.diagnostics = "conservative baseline";
      (void)cost;
      if (!schedule_out.empty()) detail::write_file(schedule_out, emit_schedule(m, sched));
      emit_report(rep);
      return rep.feasible && rep.worst_case_cost < kInf ? kOk : kInfeasible;
    }

    if (solve->parsed()) {
      auto [m, t, cfg] = load(instance_path);
      if (theta_d < 0 || theta_d >= t.num_types()) {
        err << "error: --type out of range\n";
        return kUsage;
      }
      detail::SolveOutcome oc;
      try {
        oc = detail::run_solver(method, m, t, cfg, theta_d);
      } catch (const std::runtime_error& e) {
        err << "solver failure: " << e.what() << "\n";
        return kSolverFailure;
      }
      if (!schedule_out.empty())
        detail::write_file(schedule_out, emit_schedule(m, oc.sched));
      emit_report(oc.rep);
      return oc.rep.feasible && oc.rep.worst_case_cost < kInf ? kOk : kInfeasible;
    }

    if (verify->parsed()) {
      auto [m, t, cfg] = load(instance_path);
      auto part = partition_states(m);
      auto sched = parse_schedule(detail::read_text(schedule_path, in), m, strict);
      auto ver = verify_schedule(m, t, part, sched);
      SolveReport rep;
      rep.method = "verify";
      rep.epsilon = sched.epsilon;
      rep.fill_from(ver);
      emit_report(rep);
      const double rmax = max_reach(m, part).rmax;
      bool ok = ver.feasible && ver.worst_case_cost < kInf;
      for (const auto& pt : ver.per_type) ok = ok && pt.reach >= rmax - 1e-7;
      return ok ? kOk : kInfeasible;
    }

    if (gen->parsed()) {
      std::mt19937 rng(gen_seed);
      ReductionOutput ro;
      if (g_qsat->parsed()) {
        if (gen_n < 2 || gen_n % 2 != 0) {
          err << "error: --n must be even and positive\n";
          return kUsage;
        }
        QbfInstance q;
        q.n = gen_n;
        std::uniform_int_distribution<int> var(1, gen_n);
        std::uniform_int_distribution<int> sign(0, 1);
        for (int c = 0; c < gen_clauses; ++c) {
          std::array<int, 3> cl;
          for (auto& lit : cl) lit = var(rng) * (sign(rng) ? 1 : -1);
          q.clauses.push_back(cl);
        }
        ro = qsat_to_bmp(q);
      } else if (g_tsp->parsed()) {
        std::uniform_real_distribution<double> pos(0.0, 10.0);
        std::vector<double> p(gen_cities);
        for (auto& v : p) v = pos(rng);
        std::vector<std::vector<double>> c(gen_cities, std::vector<double>(gen_cities, 0.0));
        double max_c = 0.0;
        for (int i = 0; i < gen_cities; ++i)
          for (int j = 0; j < gen_cities; ++j) {
            c[i][j] = std::fabs(p[i] - p[j]);
            max_c = std::max(max_c, c[i][j]);
          }
        ro = tsp_to_nbmp(c, tsp_k > 0.0 ? tsp_k : max_c);
      } else if (g_cover->parsed()) {
        std::uniform_int_distribution<int> coin(0, 1);
        std::vector<std::vector<int>> subs(gen_subsets);
        for (int e = 1; e <= gen_universe; ++e)  // every element covered somewhere
          subs[rng() % gen_subsets].push_back(e);
        for (auto& s : subs)
          for (int e = 1; e <= gen_universe; ++e)
            if (coin(rng) && std::find(s.begin(), s.end(), e) == s.end()) s.push_back(e);
        for (auto& s : subs) {
          if (s.empty()) s.push_back(1 + static_cast<int>(rng() % gen_universe));
          std::sort(s.begin(), s.end());
        }
        ro = setcover_to_nsbmp(gen_universe, subs, gen_budget);
      } else {
        ro = gap_example(gap_x);
      }
      out << emit_instance(ro.model, ro.types, nullptr);
      err << ro.meaning << " (threshold " << ro.threshold << " + " << ro.eps_units
          << " eps)\n";
      return kOk;
    }

    if (trans->parsed()) {
      auto [m, t, cfg] = load(instance_path);
      auto [m2, t2] = t_hor->parsed() ? expand_horizon(m, t, horizon_n) : absorb_targets(m, t);
      out << emit_instance(m2, t2, &cfg);
      return kOk;
    }

    if (bench->parsed()) {
      out << "instance,solver,build_time,solve_time,value,lower_bound,ratio,status\n";
      const char* methods[] = {"nbmp-milp", "nsbmp-milp", "nbmp-ccp", "nsbmp-ccp"};
      bool any_row_failed = false;
      for (const auto& path : bench_paths) {
        ParsedInstance pi;
        try {
          pi = load(path);
        } catch (const IoError& e) {
          for (const char* mth : methods) out << path << "," << mth << ",,,,,,error\n";
          err << path << ": " << e.what() << "\n";
          any_row_failed = true;
          continue;
        }
        for (const char* mth : methods) {
          try {
            auto oc = detail::run_solver(mth, pi.model, pi.types, pi.config, 0);
            const bool ok = oc.rep.feasible && oc.rep.worst_case_cost < kInf;
            out << path << "," << mth << "," << detail::num(oc.build_time) << ","
                << detail::num(oc.solve_time) << "," << detail::num(oc.rep.worst_case_cost)
                << "," << detail::num(oc.rep.lower_bound) << ","
                << detail::num(oc.rep.suboptimality_ratio()) << ","
                << (!ok ? "infeasible" : oc.rep.proven_optimal ? "optimal" : "feasible")
                << "\n";
          } catch (const std::exception& e) {
            out << path << "," << mth << ",,,,,,error\n";
            err << path << " " << mth << ": " << e.what() << "\n";
            any_row_failed = true;
          }
        }
      }
      return any_row_failed ? kSolverFailure : kOk;
    }
  } catch (const IoError& e) {
    err << "error: " << e.what() << "\n";
    return kUsage;
  } catch (const std::invalid_argument& e) {
    err << "error: " << e.what() << "\n";
    return kUsage;
  } catch (const std::exception& e) {
    err << "solver failure: " << e.what() << "\n";
    return kSolverFailure;
  }
  return kUsage;
}

}  // namespace bmp::cli
