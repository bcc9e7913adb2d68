#include "anguilla.h"

#include <cstdlib>
#include <cstring>
#include <fstream>
#include <memory>
#include <string>

#include "anguilla/analysis.hpp"
#include "anguilla/config.hpp"
#include "anguilla/protocol.hpp"
#include "anguilla/service.hpp"

struct ang_scenario {
  anguilla::ScenarioConfig config;
};

struct ang_sim {
  anguilla::Simulation sim;
};

struct ang_service {
  std::unique_ptr<anguilla::Service> service;
};

namespace {

thread_local std::string g_last_error;

ang_status to_status(anguilla::ErrorCode code) {
  return static_cast<ang_status>(static_cast<int>(code));
}

ang_status fail(ang_status status, const std::string& message) {
  g_last_error = message;
  return status;
}

template <typename F>
ang_status guarded(F&& body) {
  g_last_error.clear();
  try {
    return body();
  } catch (const anguilla::Error& e) {
    return fail(to_status(e.code()), e.what());
  } catch (const std::bad_alloc&) {
    return fail(ANG_E_INTERNAL, "out of memory");
  } catch (const std::exception& e) {
    return fail(ANG_E_INTERNAL, e.what());
  } catch (...) {
    return fail(ANG_E_INTERNAL, "unknown exception");
  }
}

char* dup_string(const std::string& s) {
  char* out = static_cast<char*>(std::malloc(s.size() + 1));
  if (!out) throw std::bad_alloc();
  std::memcpy(out, s.c_str(), s.size() + 1);
  return out;
}

#define ANG_REQUIRE(cond, what) \
  if (!(cond)) return fail(ANG_E_INVALID_ARGUMENT, what)

ang_outcome_kind to_c(anguilla::OutcomeKind k) {
  return static_cast<ang_outcome_kind>(static_cast<int>(k));
}

}  // namespace

extern "C" {

const char* ang_version(void) { return "0.1.0"; }

const char* ang_last_error(void) { return g_last_error.c_str(); }

const char* ang_status_name(ang_status status) {
  switch (status) {
    case ANG_OK: return "ok";
    case ANG_E_INTERNAL: return "internal";
    default:
      if (status >= ANG_E_INVALID_ARGUMENT && status <= ANG_E_PROTOCOL) {
        return anguilla::error_code_name(static_cast<anguilla::ErrorCode>(status));
      }
      return "unknown";
  }
}

const char* ang_outcome_name(ang_outcome_kind kind) {
  if (kind < ANG_OUTCOME_SUCCESS || kind > ANG_OUTCOME_TIMEOUT) return "None";
  return anguilla::outcome_name(static_cast<anguilla::OutcomeKind>(kind));
}

void ang_string_free(char* s) { std::free(s); }

ang_status ang_scenario_load(const char* path, ang_scenario** out) {
  return guarded([&] {
    ANG_REQUIRE(path && out, "path and out must be non-null");
    *out = new ang_scenario{anguilla::load_scenario(path)};
    return ANG_OK;
  });
}

ang_status ang_scenario_parse(const char* json, const char* base_dir, ang_scenario** out) {
  return guarded([&] {
    ANG_REQUIRE(json && out, "json and out must be non-null");
    *out = new ang_scenario{anguilla::parse_scenario(json, base_dir ? base_dir : "")};
    return ANG_OK;
  });
}

ang_scenario* ang_scenario_clone(const ang_scenario* scenario) {
  if (!scenario) return nullptr;
  try {
    return new ang_scenario{scenario->config};
  } catch (...) {
    g_last_error = "out of memory";
    return nullptr;
  }
}

void ang_scenario_free(ang_scenario* scenario) { delete scenario; }

ang_status ang_scenario_validate(const ang_scenario* scenario, char** report) {
  return guarded([&] {
    ANG_REQUIRE(scenario, "scenario must be non-null");
    if (report) *report = nullptr;
    const auto errors = anguilla::check_scenario(scenario->config);
    if (errors.empty()) return ANG_OK;
    nlohmann::json arr = nlohmann::json::array();
    std::string msg;
    for (const auto& e : errors) {
      arr.push_back({{"field", e.field}, {"message", e.message}});
      if (!msg.empty()) msg += "; ";
      msg += e.field + ": " + e.message;
    }
    if (report) *report = dup_string(arr.dump());
    return fail(ANG_E_VALIDATION, msg);
  });
}

ang_status ang_scenario_to_json(const ang_scenario* scenario, char** out) {
  return guarded([&] {
    ANG_REQUIRE(scenario && out, "scenario and out must be non-null");
    *out = dup_string(anguilla::scenario_to_json(scenario->config).dump(2));
    return ANG_OK;
  });
}

ang_status ang_scenario_hash(const ang_scenario* scenario, char out[65]) {
  return guarded([&] {
    ANG_REQUIRE(scenario && out, "scenario and out must be non-null");
    const std::string h = anguilla::config_hash(scenario->config);
    std::memcpy(out, h.c_str(), 65);
    return ANG_OK;
  });
}

ang_status ang_scenario_set_dt(ang_scenario* scenario, double dt) {
  return guarded([&] {
    ANG_REQUIRE(scenario, "scenario must be non-null");
    ANG_REQUIRE(dt > 0.0 && dt <= 0.02, "dt must be in (0, 0.02]");
    scenario->config.dt = dt;
    return ANG_OK;
  });
}

ang_status ang_scenario_set_duration(ang_scenario* scenario, double duration) {
  return guarded([&] {
    ANG_REQUIRE(scenario, "scenario must be non-null");
    ANG_REQUIRE(duration > 0.0, "duration must be > 0");
    scenario->config.duration = duration;
    return ANG_OK;
  });
}

ang_status ang_scenario_step_count(const ang_scenario* scenario, int64_t* out) {
  return guarded([&] {
    ANG_REQUIRE(scenario && out, "scenario and out must be non-null");
    *out = scenario->config.step_count();
    return ANG_OK;
  });
}

ang_status ang_run(const ang_scenario* scenario, const char* log_path, const char* csv_path,
                   int decimation, ang_run_result* result) {
  return guarded([&] {
    ANG_REQUIRE(scenario && result, "scenario and result must be non-null");
    ANG_REQUIRE(decimation >= 1, "decimation must be >= 1");
    std::ofstream log;
    std::ofstream csv;
    if (log_path) {
      log.open(log_path, std::ios::binary);
      if (!log) return fail(ANG_E_IO, std::string("cannot open ") + log_path);
    }
    if (csv_path) {
      csv.open(csv_path, std::ios::binary);
      if (!csv) return fail(ANG_E_IO, std::string("cannot open ") + csv_path);
    }
    *result = ang_run_result{};
    result->outcome = ANG_OUTCOME_NONE;
    const std::string hash = anguilla::config_hash(scenario->config);
    std::memcpy(result->config_hash, hash.c_str(), 65);
    anguilla::RunOptions options;
    options.decimation = decimation;
    const auto r = anguilla::run_scenario(scenario->config, log_path ? &log : nullptr,
                                          csv_path ? &csv : nullptr, options);
    result->outcome = to_c(r.outcome.kind);
    result->outcome_time = r.outcome.time;
    result->steps = r.steps;
    result->final_x = r.final_state.head_pose.x;
    result->final_y = r.final_state.head_pose.y;
    result->final_heading = r.final_state.head_pose.heading;
    result->final_depth = r.final_state.depth_z;
    return ANG_OK;
  });
}

ang_status ang_sim_create(const ang_scenario* scenario, ang_sim** out) {
  return guarded([&] {
    ANG_REQUIRE(scenario && out, "scenario and out must be non-null");
    anguilla::validate_scenario(scenario->config);
    *out = new ang_sim{anguilla::Simulation(scenario->config)};
    return ANG_OK;
  });
}

void ang_sim_free(ang_sim* sim) { delete sim; }

ang_status ang_sim_command(ang_sim* sim, const char* command_json, char** reply) {
  if (reply) *reply = nullptr;
  std::optional<std::int64_t> seq;
  const ang_status st = guarded([&] {
    ANG_REQUIRE(sim && command_json, "sim and command must be non-null");
    seq = anguilla::peek_seq(command_json);
    const auto m = anguilla::parse_command(std::string(command_json), sim->sim.state().gait);
    sim->sim.apply(m.command);
    if (reply) {
      *reply = dup_string(
          anguilla::make_ack(m.seq, anguilla::command_name(m.command), sim->sim.state().step)
              .dump());
    }
    return ANG_OK;
  });
  if (st != ANG_OK && reply && sim && command_json) {
    try {
      *reply = dup_string(anguilla::make_error(seq, ang_status_name(st), g_last_error).dump());
    } catch (...) {
    }
  }
  return st;
}

ang_status ang_sim_step(ang_sim* sim, int* produced, char** record) {
  return guarded([&] {
    ANG_REQUIRE(sim && produced, "sim and produced must be non-null");
    if (record) *record = nullptr;
    auto rec = sim->sim.step();
    *produced = rec ? 1 : 0;
    if (rec && record) *record = dup_string(anguilla::to_json(*rec).dump());
    return ANG_OK;
  });
}

ang_status ang_sim_finished(const ang_sim* sim, int* finished) {
  return guarded([&] {
    ANG_REQUIRE(sim && finished, "sim and finished must be non-null");
    *finished = sim->sim.finished() ? 1 : 0;
    return ANG_OK;
  });
}

ang_status ang_sim_outcome(const ang_sim* sim, ang_outcome_kind* kind, double* time) {
  return guarded([&] {
    ANG_REQUIRE(sim && kind, "sim and kind must be non-null");
    const auto& o = sim->sim.state().outcome;
    *kind = o ? to_c(o->kind) : ANG_OUTCOME_NONE;
    if (time) *time = o ? o->time : 0.0;
    return ANG_OK;
  });
}

ang_status ang_sim_state_json(const ang_sim* sim, char** out) {
  return guarded([&] {
    ANG_REQUIRE(sim && out, "sim and out must be non-null");
    *out = dup_string(anguilla::to_json(sim->sim.state().robot).dump());
    return ANG_OK;
  });
}

void ang_service_options_default(ang_service_options* options) {
  if (!options) return;
  const anguilla::ServiceOptions d;
  options->decimation = d.decimation;
  options->realtime_factor = d.realtime_factor;
  options->start_paused = d.start_paused ? 1 : 0;
  options->static_dir = nullptr;
}

ang_status ang_service_create(const ang_scenario* scenario, const ang_service_options* options,
                              ang_service** out) {
  return guarded([&] {
    ANG_REQUIRE(scenario && out, "scenario and out must be non-null");
    anguilla::ServiceOptions o;
    if (options) {
      o.decimation = options->decimation;
      o.realtime_factor = options->realtime_factor;
      o.start_paused = options->start_paused != 0;
      if (options->static_dir) o.static_dir = options->static_dir;
    }
    *out = new ang_service{std::make_unique<anguilla::Service>(scenario->config, o)};
    return ANG_OK;
  });
}

void ang_service_free(ang_service* service) { delete service; }

ang_status ang_service_start(ang_service* service, const char* host, int port, int* bound_port) {
  return guarded([&] {
    ANG_REQUIRE(service && host, "service and host must be non-null");
    ANG_REQUIRE(port >= 0 && port <= 65535, "port must be in [0, 65535]");
    const int p = service->service->start(host, port);
    if (bound_port) *bound_port = p;
    return ANG_OK;
  });
}

ang_status ang_service_wait(ang_service* service) {
  return guarded([&] {
    ANG_REQUIRE(service, "service must be non-null");
    service->service->wait();
    return ANG_OK;
  });
}

ang_status ang_service_stop(ang_service* service) {
  return guarded([&] {
    ANG_REQUIRE(service, "service must be non-null");
    service->service->stop();
    return ANG_OK;
  });
}

ang_status ang_calibrate_drag(const ang_scenario* scenario, double target_bl_per_cycle,
                              double cycles, ang_calibration* out) {
  return guarded([&] {
    ANG_REQUIRE(out, "out must be non-null");
    ANG_REQUIRE(cycles >= 3.0, "cycles must be >= 3");
    const anguilla::ScenarioConfig base = scenario ? scenario->config : anguilla::ScenarioConfig{};
    const auto r = anguilla::calibrate_drag(base.geometry, base.gait, target_bl_per_cycle, cycles);
    out->drag_tangent_Ct = r.drag_tangent_Ct;
    out->drag_normal_Cn = r.drag_normal_Cn;
    out->achieved_bl_per_cycle = r.achieved_bl_per_cycle;
    out->evaluations = r.evaluations;
    return ANG_OK;
  });
}

}  // extern "C"
