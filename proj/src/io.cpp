#include "peakon/io.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <ostream>
#include <set>
#include <sstream>

#include "peakon/errors.hpp"

namespace peakon {

namespace {

std::vector<double> number_array(const json& j, const char* key) {
  if (!j.contains(key)) throw InvalidArgument(std::string("missing field '") + key + "'");
  const json& a = j.at(key);
  if (!a.is_array()) throw InvalidArgument(std::string("field '") + key + "' must be an array");
  std::vector<double> v;
  for (const auto& x : a) {
    if (!x.is_number()) throw InvalidArgument(std::string("field '") + key + "' must hold numbers");
    v.push_back(x.get<double>());
  }
  return v;
}

double number(const json& j, const char* key, double fallback) {
  if (!j.contains(key)) return fallback;
  if (!j.at(key).is_number()) throw InvalidArgument(std::string("field '") + key + "' must be a number");
  return j.at(key).get<double>();
}

json optional_number(double v) { return std::isfinite(v) ? json(v) : json(nullptr); }

}  // namespace

std::string format_double(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

void write_trajectory_csv(std::ostream& os, const Trajectory& traj) {
  for (std::size_t s = 0; s < traj.segments.size(); ++s) {
    const Segment& seg = traj.segments[s];
    if (seg.samples.empty()) continue;
    if (s > 0) {
      const CollisionEvent& ev = traj.events[s - 1];
      os << "# merged k=" << ev.pair + 1 << " t*=" << format_double(ev.t_star) << " psi=" << format_double(ev.psi)
         << "\n";
    }
    const std::size_t n = seg.peakons();
    const std::size_t m = seg.samples.front().integrals.size();
    os << "t";
    for (std::size_t i = 1; i <= n; ++i) os << ",q" << i;
    for (std::size_t i = 1; i <= n; ++i) os << ",p" << i;
    for (std::size_t i = 0; i < m; ++i) os << ",H" << i;
    os << ",event\n";
    for (std::size_t r = 0; r < seg.samples.size(); ++r) {
      const TrajectorySample& smp = seg.samples[r];
      os << format_double(smp.state.time());
      for (double x : smp.state.q()) os << "," << format_double(x);
      for (double x : smp.state.p()) os << "," << format_double(x);
      for (double x : smp.integrals) os << "," << format_double(x);
      os << ",";
      if (r + 1 == seg.samples.size() && s < traj.events.size()) os << "merge:" << traj.events[s].pair + 1;
      os << "\n";
    }
  }
}

json events_to_json(const Trajectory& traj) {
  json out = json::array();
  for (const auto& ev : traj.events) {
    json hist = json::array();
    for (const auto& a : ev.approach) hist.push_back({{"t", a.t}, {"gap", a.gap}, {"psi", a.psi}, {"xi", a.xi}});
    out.push_back({{"t_event", ev.t_event},
                   {"t_star", ev.t_star},
                   {"k", ev.pair + 1},
                   {"gap", ev.gap_at_event},
                   {"psi", ev.psi},
                   {"energy_drop", ev.energy_drop},
                   {"pre_state", state_to_json(ev.pre_state)},
                   {"post_state", state_to_json(ev.post_state)},
                   {"xi_history", hist}});
  }
  return out;
}

json report_to_json(const VerificationReport& r) {
  json j{{"check", r.check},
         {"pass", r.pass},
         {"samples", r.samples},
         {"max_residual", optional_number(r.max_residual)},
         {"tolerance", r.tolerance}};
  if (!r.worst_q.empty()) j["worst_case"] = {{"q", r.worst_q}, {"p", r.worst_p}, {"detail", r.worst_detail}};
  if (!r.failures.empty()) {
    json f = json::array();
    for (const auto& x : r.failures)
      f.push_back({{"sample", x.sample}, {"residual", optional_number(x.residual)}, {"detail", x.detail}});
    j["failures"] = f;
  }
  if (!r.components.empty()) {
    json c = json::array();
    for (const auto& x : r.components) c.push_back(report_to_json(x));
    j["components"] = c;
  }
  return j;
}

json integrals_to_json(const std::vector<IntegralValue>& values) {
  json out = json::array();
  for (const auto& v : values)
    out.push_back({{"order", v.order}, {"value", v.value}, {"convention", std::string(to_string(v.convention))}});
  return out;
}

json state_to_json(const PeakonState& state) {
  return {{"t", state.time()},
          {"q", std::vector<double>(state.q().begin(), state.q().end())},
          {"p", std::vector<double>(state.p().begin(), state.p().end())}};
}

PeakonState state_from_json(const json& j) {
  if (!j.is_object()) throw InvalidArgument("state must be a JSON object");
  const auto q = number_array(j, "q");
  const auto p = number_array(j, "p");
  return validate_state(q, p, number(j, "t", 0.0));
}

void write_profile_csv(std::ostream& os, const WaveProfile& w) {
  os << "x,u,ux\n";
  for (std::size_t i = 0; i < w.x.size(); ++i)
    os << format_double(w.x[i]) << "," << format_double(w.u[i]) << "," << format_double(w.ux[i]) << "\n";
}

json profile_sidecar(const PeakonState& state) {
  json j = state_to_json(state);
  j["n"] = state.size();
  return j;
}

IntegratorConfig ScenarioConfig::integrator() const {
  IntegratorConfig c;
  c.rtol = rtol;
  c.atol = atol;
  c.merge_gap = merge_gap;
  c.max_steps = max_steps;
  c.convention = convention;
  return c;
}

PeakonState ScenarioConfig::initial_state() const { return validate_state(q, p, 0.0); }

ScenarioConfig scenario_from_json(const json& j) {
  if (!j.is_object()) throw InvalidArgument("scenario must be a JSON object");
  static const std::set<std::string> known{"q",  "p",    "t_end",   "rtol",      "atol",
                                           "merge_gap", "max_steps", "seed", "outputs", "convention"};
  for (const auto& [key, _] : j.items()) {
    if (!known.contains(key)) throw InvalidArgument("unknown scenario field '" + key + "'");
  }
  ScenarioConfig c;
  c.q = number_array(j, "q");
  c.p = number_array(j, "p");
  if (c.q.size() != c.p.size()) throw InvalidArgument("q and p must have the same length");
  c.t_end = number(j, "t_end", c.t_end);
  c.rtol = number(j, "rtol", c.rtol);
  c.atol = number(j, "atol", c.atol);
  c.merge_gap = number(j, "merge_gap", c.merge_gap);
  if (!(c.t_end >= 0.0) || !std::isfinite(c.t_end)) throw InvalidArgument("t_end must be finite and non-negative");
  if (j.contains("max_steps")) {
    if (!j.at("max_steps").is_number_unsigned()) throw InvalidArgument("max_steps must be a positive integer");
    c.max_steps = j.at("max_steps").get<std::uint64_t>();
  }
  if (j.contains("seed")) {
    if (!j.at("seed").is_number_unsigned()) throw InvalidArgument("seed must be a non-negative integer");
    c.seed = j.at("seed").get<std::uint64_t>();
  }
  if (j.contains("convention")) {
    const auto& v = j.at("convention");
    if (v == "theorem") {
      c.convention = Convention::theorem;
    } else if (v == "rescaled") {
      c.convention = Convention::rescaled;
    } else {
      throw InvalidArgument("convention must be \"theorem\" or \"rescaled\"");
    }
  }
  if (j.contains("outputs")) {
    const auto& o = j.at("outputs");
    if (!o.is_object()) throw InvalidArgument("outputs must be an object");
    for (const auto& [key, val] : o.items()) {
      if (!val.is_string()) throw InvalidArgument("output paths must be strings");
      if (key == "trajectory") {
        c.trajectory_path = val.get<std::string>();
      } else if (key == "events") {
        c.events_path = val.get<std::string>();
      } else {
        throw InvalidArgument("unknown output '" + key + "'");
      }
    }
  }
  c.integrator().validate();
  (void)c.initial_state();
  return c;
}

json read_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw InvalidArgument("cannot open " + path);
  try {
    return json::parse(in);
  } catch (const json::exception& e) {
    throw InvalidArgument("malformed JSON in " + path + ": " + e.what());
  }
}

void write_text_file(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw InvalidArgument("cannot write " + path);
  out << text;
  if (!out) throw InvalidArgument("error writing " + path);
}

}  // namespace peakon
