#pragma once
// JSON serialization of instances, schedules, and solve reports. Instances
// carry names at the boundary; indices are resolved on parse and re-expanded
// on emit, so round-trips are identity up to insignificant formatting.

#include <map>
#include <set>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "bmp/ccp.hpp"
#include "bmp/mdp.hpp"
#include "bmp/report.hpp"
#include "bmp/schedule.hpp"

namespace bmp {

using Json = nlohmann::ordered_json;

struct SolverConfig {
  double eps_bar = 0.01;
  double k_tilde = 100.0;
  CcpConfig ccp;
};

struct ParsedInstance {
  MdpModel model;
  TypeSet types;
  SolverConfig config;
};

class IoError : public std::runtime_error {
 public:
  explicit IoError(const std::string& what) : std::runtime_error(what) {}
};

namespace detail {

inline void reject_unknown(const Json& obj, const std::set<std::string>& known,
                           const std::string& where, bool strict) {
  if (!strict) return;
  for (const auto& [key, value] : obj.items())
    if (!known.count(key)) throw IoError(where + ": unknown field '" + key + "'");
}

inline const Json& need(const Json& obj, const char* key, const std::string& where) {
  auto it = obj.find(key);
  if (it == obj.end()) throw IoError(where + ": missing field '" + key + "'");
  return *it;
}

inline int name_index(const std::vector<std::string>& names, const std::string& name,
                      const std::string& what) {
  for (size_t i = 0; i < names.size(); ++i)
    if (names[i] == name) return static_cast<int>(i);
  throw IoError("unknown " + what + " '" + name + "'");
}

}  // namespace detail

inline ParsedInstance parse_instance(const std::string& text, bool strict = false) {
  Json doc;
  try {
    doc = Json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    throw IoError(std::string("syntax error: ") + e.what());
  }
  if (!doc.is_object()) throw IoError("instance document must be a JSON object");
  detail::reject_unknown(doc,
                         {"schema", "states", "actions", "availability", "transitions",
                          "initial", "targets", "types", "config"},
                         "instance", strict);
  ParsedInstance out;
  if (detail::need(doc, "schema", "instance").get<int>() != 1)
    throw IoError("unsupported schema version");

  MdpModel& m = out.model;
  for (const auto& s : detail::need(doc, "states", "instance"))
    m.state_names.push_back(s.get<std::string>());
  for (const auto& a : detail::need(doc, "actions", "instance"))
    m.action_names.push_back(a.get<std::string>());
  const int n = m.num_states();
  if (n == 0) throw IoError("instance has no states");

  m.initial =
      detail::name_index(m.state_names, detail::need(doc, "initial", "instance"), "state");
  m.is_target.assign(n, 0);
  for (const auto& s : detail::need(doc, "targets", "instance"))
    m.is_target[detail::name_index(m.state_names, s, "state")] = 1;

  m.avail.resize(n);
  m.trans.resize(n);
  {
    const Json& av = detail::need(doc, "availability", "instance");
    for (const auto& [sname, alist] : av.items()) {
      const int s = detail::name_index(m.state_names, sname, "state");
      for (const auto& a : alist)
        m.avail[s].push_back(detail::name_index(m.action_names, a, "action"));
      m.trans[s].resize(m.avail[s].size());
    }
  }
  for (int s = 0; s < n; ++s)
    if (m.avail[s].empty())
      throw IoError("state '" + m.state_names[s] + "' has no available actions");

  for (const auto& rec : detail::need(doc, "transitions", "instance")) {
    detail::reject_unknown(rec, {"state", "action", "to", "prob"}, "transition record", strict);
    const std::string sname = detail::need(rec, "state", "transition");
    const std::string aname = detail::need(rec, "action", "transition");
    const std::string tname = detail::need(rec, "to", "transition");
    const double p = detail::need(rec, "prob", "transition").get<double>();
    const std::string where =
        "transition (" + sname + ", " + aname + ", " + tname + ")";
    if (p < 0.0 || p > 1.0) throw IoError(where + ": probability out of [0,1]");
    const int s = detail::name_index(m.state_names, sname, "state");
    const int a = detail::name_index(m.action_names, aname, "action");
    const int to = detail::name_index(m.state_names, tname, "state");
    const int k = m.local_of(s, a);
    if (k < 0) throw IoError(where + ": action not available in state");
    m.trans[s][k].push_back({to, p});
  }
  m.finalize();

  TypeSet& t = out.types;
  for (const auto& ty : detail::need(doc, "types", "instance")) {
    detail::reject_unknown(ty, {"name", "rewards"}, "type record", strict);
    t.type_names.push_back(detail::need(ty, "name", "type").get<std::string>());
    std::vector<double> r(m.sa_total, 0.0);
    for (const auto& rec : detail::need(ty, "rewards", "type")) {
      detail::reject_unknown(rec, {"state", "action", "value"}, "reward record", strict);
      const int s =
          detail::name_index(m.state_names, detail::need(rec, "state", "reward"), "state");
      const int a =
          detail::name_index(m.action_names, detail::need(rec, "action", "reward"), "action");
      const int k = m.local_of(s, a);
      if (k < 0)
        throw IoError("reward record (" + m.state_names[s] + ", " + m.action_names[a] +
                      "): action not available in state");
      r[m.sa_index(s, k)] = detail::need(rec, "value", "reward").get<double>();
    }
    t.reward.push_back(std::move(r));
  }
  if (t.num_types() == 0) throw IoError("instance has no types");
  t.finalize(m);

  if (auto it = doc.find("config"); it != doc.end()) {
    const Json& c = *it;
    detail::reject_unknown(c, {"epsilon_bar", "big_m_k", "ccp"}, "config", strict);
    if (c.contains("epsilon_bar")) out.config.eps_bar = c["epsilon_bar"].get<double>();
    if (c.contains("big_m_k")) out.config.k_tilde = c["big_m_k"].get<double>();
    if (c.contains("ccp")) {
      const Json& cc = c["ccp"];
      detail::reject_unknown(cc,
                             {"tau0", "tau_max", "zeta", "delta_bar", "delta_violation",
                              "max_iterations"},
                             "ccp config", strict);
      CcpConfig& p = out.config.ccp;
      if (cc.contains("tau0")) p.tau0 = cc["tau0"].get<double>();
      if (cc.contains("tau_max")) p.tau_max = cc["tau_max"].get<double>();
      if (cc.contains("zeta")) p.zeta = cc["zeta"].get<double>();
      if (cc.contains("delta_bar")) p.delta_bar = cc["delta_bar"].get<double>();
      if (cc.contains("delta_violation"))
        p.delta_violation = cc["delta_violation"].get<double>();
      if (cc.contains("max_iterations")) p.max_iterations = cc["max_iterations"].get<long>();
    }
  }

  auto rep = validate(m, t);
  if (!rep.ok) {
    std::string msg = "validation failed:";
    for (const auto& v : rep.violations) msg += "\n  " + v;
    throw IoError(msg);
  }
  return out;
}

inline Json instance_to_json(const MdpModel& m, const TypeSet& t,
                             const SolverConfig* config = nullptr) {
  Json doc;
  doc["schema"] = 1;
  doc["states"] = m.state_names;
  doc["actions"] = m.action_names;
  doc["initial"] = m.state_names[m.initial];
  Json targets = Json::array();
  for (int s = 0; s < m.num_states(); ++s)
    if (m.is_target[s]) targets.push_back(m.state_names[s]);
  doc["targets"] = std::move(targets);
  Json av = Json::object();
  for (int s = 0; s < m.num_states(); ++s) {
    Json names = Json::array();
    for (int a : m.avail[s]) names.push_back(m.action_names[a]);
    av[m.state_names[s]] = std::move(names);
  }
  doc["availability"] = std::move(av);
  Json trs = Json::array();
  for (int s = 0; s < m.num_states(); ++s)
    for (int k = 0; k < m.num_local(s); ++k)
      for (const auto& o : m.trans[s][k])
        trs.push_back(Json{{"state", m.state_names[s]},
                           {"action", m.action_names[m.avail[s][k]]},
                           {"to", m.state_names[o.to]},
                           {"prob", o.prob}});
  doc["transitions"] = std::move(trs);
  Json types = Json::array();
  for (int theta = 0; theta < t.num_types(); ++theta) {
    Json recs = Json::array();
    for (int s = 0; s < m.num_states(); ++s)
      for (int k = 0; k < m.num_local(s); ++k) {
        const double v = t.reward[theta][m.sa_index(s, k)];
        if (v != 0.0)
          recs.push_back(Json{{"state", m.state_names[s]},
                              {"action", m.action_names[m.avail[s][k]]},
                              {"value", v}});
      }
    types.push_back(Json{{"name", t.type_names[theta]}, {"rewards", std::move(recs)}});
  }
  doc["types"] = std::move(types);
  if (config) {
    doc["config"] = Json{{"epsilon_bar", config->eps_bar},
                         {"big_m_k", config->k_tilde},
                         {"ccp",
                          Json{{"tau0", config->ccp.tau0},
                               {"tau_max", config->ccp.tau_max},
                               {"zeta", config->ccp.zeta},
                               {"delta_bar", config->ccp.delta_bar},
                               {"delta_violation", config->ccp.delta_violation},
                               {"max_iterations", config->ccp.max_iterations}}}};
  }
  return doc;
}

inline std::string emit_instance(const MdpModel& m, const TypeSet& t,
                                 const SolverConfig* config = nullptr) {
  return instance_to_json(m, t, config).dump(2) + "\n";
}

// Schedules reference pairs by name; zero offers are omitted.
inline std::string emit_schedule(const MdpModel& m, const IncentiveSchedule& sched) {
  Json doc;
  doc["schema"] = 1;
  doc["epsilon"] = sched.epsilon;
  doc["single_action"] = sched.single_action;
  Json offers = Json::array();
  for (int s = 0; s < m.num_states(); ++s)
    for (int k = 0; k < m.num_local(s); ++k) {
      const double v = sched.offers[m.sa_index(s, k)];
      if (v != 0.0)
        offers.push_back(Json{{"state", m.state_names[s]},
                              {"action", m.action_names[m.avail[s][k]]},
                              {"value", v}});
    }
  doc["offers"] = std::move(offers);
  return doc.dump(2) + "\n";
}

inline IncentiveSchedule parse_schedule(const std::string& text, const MdpModel& m,
                                        bool strict = false) {
  Json doc;
  try {
    doc = Json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    throw IoError(std::string("syntax error: ") + e.what());
  }
  detail::reject_unknown(doc, {"schema", "epsilon", "single_action", "offers"}, "schedule",
                         strict);
  if (detail::need(doc, "schema", "schedule").get<int>() != 1)
    throw IoError("unsupported schema version");
  IncentiveSchedule sched = IncentiveSchedule::zero(m);
  sched.epsilon = detail::need(doc, "epsilon", "schedule").get<double>();
  if (doc.contains("single_action")) sched.single_action = doc["single_action"].get<bool>();
  for (const auto& rec : detail::need(doc, "offers", "schedule")) {
    detail::reject_unknown(rec, {"state", "action", "value"}, "offer record", strict);
    const int s =
        detail::name_index(m.state_names, detail::need(rec, "state", "offer"), "state");
    const int a =
        detail::name_index(m.action_names, detail::need(rec, "action", "offer"), "action");
    const int k = m.local_of(s, a);
    if (k < 0) throw IoError("offer on unavailable action in state " + m.state_names[s]);
    const double v = detail::need(rec, "value", "offer").get<double>();
    if (v < 0.0) throw IoError("negative offer in state " + m.state_names[s]);
    sched.offers[m.sa_index(s, k)] = v;
  }
  return sched;
}

inline Json report_to_json(const SolveReport& rep) {
  Json doc;
  doc["schema"] = 1;
  doc["method"] = rep.method;
  doc["feasible"] = rep.feasible;
  doc["proven_optimal"] = rep.proven_optimal;
  doc["worst_case_cost"] = rep.worst_case_cost;
  doc["lower_bound"] = rep.lower_bound;
  doc["epsilon"] = rep.epsilon;
  doc["per_type_reach"] = rep.per_type_reach;
  doc["per_type_cost"] = rep.per_type_cost;
  doc["iterations"] = rep.iterations;
  doc["diagnostics"] = rep.diagnostics;
  return doc;
}

inline std::string human_summary(const SolveReport& rep) {
  std::ostringstream os;
  os << rep.method << ": "
     << (rep.feasible ? (rep.proven_optimal ? "optimal" : "feasible") : "infeasible");
  if (rep.feasible)
    os << ", worst-case cost " << rep.worst_case_cost << " (lower bound " << rep.lower_bound
       << ", epsilon " << rep.epsilon << ")";
  if (!rep.diagnostics.empty()) os << " [" << rep.diagnostics << "]";
  os << "\n";
  return os.str();
}

}  // namespace bmp
