#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"

#include "peakon/bihamiltonian.hpp"
#include "peakon/dynamics.hpp"
#include "peakon/field.hpp"
#include "peakon/first_integrals.hpp"
#include "peakon/state.hpp"

namespace peakon {

using nlohmann::json;

/// %.17g: enough digits to read every double back exactly.
std::string format_double(double v);

/// Trajectory CSV. Each constant-n block starts with the header
/// `t,q1..qn,p1..pn,H0..Hm,event`; the last row before a merge carries
/// `merge:k` (1-based) and the next block is preceded by
/// `# merged k=<k> t*=<t> psi=<v>`.
void write_trajectory_csv(std::ostream& os, const Trajectory& traj);

/// Event log: one object per collision with 1-based pair index.
json events_to_json(const Trajectory& traj);

json report_to_json(const VerificationReport& report);

json integrals_to_json(const std::vector<IntegralValue>& values);

json state_to_json(const PeakonState& state);

/// Reads {"q": [...], "p": [...], "t": optional}; validates through validate_state.
PeakonState state_from_json(const json& j);

/// CSV `x,u,ux`.
void write_profile_csv(std::ostream& os, const WaveProfile& profile);

/// Sidecar {t, n, q, p} for a profile.
json profile_sidecar(const PeakonState& state);

struct ScenarioConfig {
  std::vector<double> q;
  std::vector<double> p;
  double t_end = 1.0;
  double rtol = 1e-10;
  double atol = 1e-12;
  double merge_gap = 1e-9;
  std::uint64_t max_steps = IntegratorConfig{}.max_steps;
  std::uint64_t seed = 0;
  std::optional<std::string> trajectory_path;
  std::optional<std::string> events_path;
  Convention convention = Convention::theorem;

  [[nodiscard]] IntegratorConfig integrator() const;
  [[nodiscard]] PeakonState initial_state() const;
};

/// Parses and validates a scenario. Unknown keys are rejected so typos do not
/// silently fall back to defaults. Throws InvalidArgument (or DegeneracyError
/// for coincident positions).
ScenarioConfig scenario_from_json(const json& j);

/// Reads a JSON file; throws InvalidArgument if it cannot be opened or parsed.
json read_json_file(const std::string& path);

/// Writes text to a file in one piece; throws InvalidArgument on failure.
void write_text_file(const std::string& path, const std::string& text);

}  // namespace peakon
