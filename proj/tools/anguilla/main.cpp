// Command-line front end. Uses only the C interface.

#include <pthread.h>
#include <signal.h>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <string>

#include <CLI11.hpp>
#include <json.hpp>

#include "anguilla.h"

namespace {

enum Exit {
  kExitSuccess = 0,
  kExitOther = 1,
  kExitConfig = 2,
  kExitTimeout = 3,
  kExitStuck = 4,
  kExitOverload = 5,
  kExitDiverged = 6,
};

int exit_for_status(ang_status st) {
  switch (st) {
    case ANG_OK: return kExitSuccess;
    case ANG_E_VALIDATION:
    case ANG_E_PARSE:
    case ANG_E_IO:
    case ANG_E_INFEASIBLE_CABLE:
    case ANG_E_JOINT_LIMIT:
      return kExitConfig;
    case ANG_E_DIVERGED: return kExitDiverged;
    default: return kExitOther;
  }
}

int exit_for_outcome(ang_outcome_kind k) {
  switch (k) {
    case ANG_OUTCOME_SUCCESS: return kExitSuccess;
    case ANG_OUTCOME_TIMEOUT: return kExitTimeout;
    case ANG_OUTCOME_STUCK: return kExitStuck;
    case ANG_OUTCOME_OVERLOAD: return kExitOverload;
    default: return kExitOther;
  }
}

int report(ang_status st, const char* context) {
  std::fprintf(stderr, "anguilla: %s: %s (%s)\n", context, ang_last_error(), ang_status_name(st));
  return exit_for_status(st);
}

void print_validation(const char* report_json) {
  const auto errs = nlohmann::json::parse(report_json, nullptr, false);
  if (!errs.is_array()) return;
  for (const auto& e : errs) {
    std::fprintf(stderr, "  %s: %s\n", e.value("field", "").c_str(),
                 e.value("message", "").c_str());
  }
}

/// Loads and validates; prints field errors. Returns ANG_OK or the failure.
ang_status load_checked(const std::string& path, ang_scenario** out) {
  ang_status st = ang_scenario_load(path.c_str(), out);
  if (st != ANG_OK) {
    std::fprintf(stderr, "anguilla: %s: %s\n", path.c_str(), ang_last_error());
    return st;
  }
  char* rep = nullptr;
  st = ang_scenario_validate(*out, &rep);
  if (st == ANG_E_VALIDATION) {
    std::fprintf(stderr, "anguilla: %s: invalid scenario\n", path.c_str());
    if (rep) print_validation(rep);
  } else if (st != ANG_OK) {
    std::fprintf(stderr, "anguilla: %s: %s\n", path.c_str(), ang_last_error());
  }
  ang_string_free(rep);
  if (st != ANG_OK) {
    ang_scenario_free(*out);
    *out = nullptr;
  }
  return st;
}

struct RunArgs {
  std::string scenario;
  std::string out = "-";
  double dt = 0.0;
  double duration = 0.0;
  bool csv = false;
  int decimation = 1;
};

int cmd_run(const RunArgs& a) {
  ang_scenario* sc = nullptr;
  ang_status st = ang_scenario_load(a.scenario.c_str(), &sc);
  if (st != ANG_OK) return report(st, a.scenario.c_str());
  if (a.dt > 0.0 && (st = ang_scenario_set_dt(sc, a.dt)) != ANG_OK) {
    ang_scenario_free(sc);
    return report(st, "--dt");
  }
  if (a.duration > 0.0 && (st = ang_scenario_set_duration(sc, a.duration)) != ANG_OK) {
    ang_scenario_free(sc);
    return report(st, "--duration");
  }
  char* rep = nullptr;
  st = ang_scenario_validate(sc, &rep);
  if (st != ANG_OK) {
    std::fprintf(stderr, "anguilla: %s: invalid scenario\n", a.scenario.c_str());
    if (rep) print_validation(rep);
    ang_string_free(rep);
    ang_scenario_free(sc);
    return exit_for_status(st);
  }

  const bool to_stdout = a.out == "-";
  std::string csv_path;
  if (a.csv) {
    if (to_stdout) {
      ang_scenario_free(sc);
      std::fprintf(stderr, "anguilla: --csv needs --out <path>\n");
      return kExitOther;
    }
    const auto dot = a.out.find_last_of('.');
    const auto slash = a.out.find_last_of('/');
    const bool has_ext = dot != std::string::npos && (slash == std::string::npos || dot > slash);
    csv_path = (has_ext ? a.out.substr(0, dot) : a.out) + ".csv";
  }
  ang_run_result r{};
  st = ang_run(sc, to_stdout ? "/dev/stdout" : a.out.c_str(), a.csv ? csv_path.c_str() : nullptr,
               a.decimation, &r);
  ang_scenario_free(sc);
  if (st != ANG_OK) return report(st, "run");
  std::fprintf(stderr, "outcome %s at t=%.3f s after %llu steps; head (%.3f, %.3f) m, depth %.3f m\n",
               ang_outcome_name(r.outcome), r.outcome_time,
               static_cast<unsigned long long>(r.steps), r.final_x, r.final_y, r.final_depth);
  std::fprintf(stderr, "config %s\n", r.config_hash);
  return exit_for_outcome(r.outcome);
}

struct ServeArgs {
  std::string bind = "127.0.0.1:8765";
  std::string scenario;
  double rate = 0.0;
  double realtime_factor = 1.0;
  std::string static_dir;
  bool paused = false;
};

int cmd_serve(const ServeArgs& a) {
  const auto colon = a.bind.rfind(':');
  if (colon == std::string::npos) {
    std::fprintf(stderr, "anguilla: --bind must be host:port\n");
    return kExitOther;
  }
  const std::string host = a.bind.substr(0, colon);
  int port = 0;
  try {
    port = std::stoi(a.bind.substr(colon + 1));
  } catch (const std::exception&) {
    std::fprintf(stderr, "anguilla: bad port in --bind\n");
    return kExitOther;
  }

  ang_scenario* sc = nullptr;
  ang_status st = a.scenario.empty() ? ang_scenario_parse("{}", nullptr, &sc)
                                     : load_checked(a.scenario, &sc);
  if (st != ANG_OK) return exit_for_status(st);

  ang_service_options opts;
  ang_service_options_default(&opts);
  opts.realtime_factor = a.realtime_factor;
  opts.start_paused = a.paused ? 1 : 0;
  opts.static_dir = a.static_dir.empty() ? nullptr : a.static_dir.c_str();
  if (a.rate > 0.0) {
    char* text = nullptr;
    ang_scenario_to_json(sc, &text);
    const double dt = nlohmann::json::parse(text).value("dt", 0.005);
    ang_string_free(text);
    opts.decimation = std::max(1, static_cast<int>(std::lround(1.0 / (a.rate * dt))));
  }

  // Block termination signals before any thread starts so they reach sigwait.
  sigset_t set;
  sigemptyset(&set);
  sigaddset(&set, SIGINT);
  sigaddset(&set, SIGTERM);
  pthread_sigmask(SIG_BLOCK, &set, nullptr);

  ang_service* svc = nullptr;
  st = ang_service_create(sc, &opts, &svc);
  ang_scenario_free(sc);
  if (st != ANG_OK) return report(st, "serve");
  int bound = 0;
  st = ang_service_start(svc, host.c_str(), port, &bound);
  if (st != ANG_OK) {
    ang_service_free(svc);
    return report(st, "serve");
  }
  std::fprintf(stderr, "serving on http://%s:%d (decimation %d, realtime x%.2f)\n", host.c_str(),
               bound, opts.decimation, opts.realtime_factor);
  int sig = 0;
  sigwait(&set, &sig);
  std::fprintf(stderr, "stopping\n");
  ang_service_stop(svc);
  ang_service_free(svc);
  return kExitSuccess;
}

int cmd_calibrate(double target, double cycles, const std::string& scenario) {
  ang_scenario* sc = nullptr;
  if (!scenario.empty()) {
    const ang_status st = load_checked(scenario, &sc);
    if (st != ANG_OK) return exit_for_status(st);
  }
  ang_calibration c{};
  const ang_status st = ang_calibrate_drag(sc, target, cycles, &c);
  ang_scenario_free(sc);
  if (st != ANG_OK) return report(st, "calibrate-drag");
  std::printf("drag_tangent_Ct %.6f\ndrag_normal_Cn %.6f\nachieved_bl_per_cycle %.6f\nevaluations %d\n",
              c.drag_tangent_Ct, c.drag_normal_Cn, c.achieved_bl_per_cycle, c.evaluations);
  return kExitSuccess;
}

int cmd_validate(const std::string& path) {
  ang_scenario* sc = nullptr;
  const ang_status st = load_checked(path, &sc);
  if (st != ANG_OK) return exit_for_status(st);
  char hash[65];
  ang_scenario_hash(sc, hash);
  int64_t steps = 0;
  ang_scenario_step_count(sc, &steps);
  std::printf("ok %s steps %lld\n", hash, static_cast<long long>(steps));
  ang_scenario_free(sc);
  return kExitSuccess;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Cable-driven undulatory swimming robot simulator"};
  app.set_version_flag("--version", std::string(ang_version()));
  app.require_subcommand(1);

  RunArgs run;
  auto* run_cmd = app.add_subcommand("run", "Run a scenario to completion");
  run_cmd->add_option("scenario", run.scenario, "Scenario JSON file")->required();
  run_cmd->add_option("--out", run.out, "Telemetry log path (NDJSON); '-' for stdout");
  run_cmd->add_option("--dt", run.dt, "Override time step, s");
  run_cmd->add_option("--duration", run.duration, "Override duration, s");
  run_cmd->add_flag("--csv", run.csv, "Also write CSV next to the log");
  run_cmd->add_option("--decimation", run.decimation, "Log every n-th step")
      ->check(CLI::PositiveNumber);

  ServeArgs serve;
  auto* serve_cmd = app.add_subcommand("serve", "Run the live control service");
  serve_cmd->add_option("--bind", serve.bind, "host:port (port 0 picks a free one)");
  serve_cmd->add_option("--scenario", serve.scenario, "Scenario JSON file");
  serve_cmd->add_option("--rate", serve.rate, "Telemetry rate, Hz (default every 4th step)");
  serve_cmd->add_option("--realtime-factor", serve.realtime_factor,
                        "Simulated seconds per wall second; 0 for unpaced")
      ->check(CLI::NonNegativeNumber);
  serve_cmd->add_option("--static", serve.static_dir, "Directory served at /");
  serve_cmd->add_flag("--paused", serve.paused, "Start paused");

  double target = 0.305;
  double cycles = 10.0;
  std::string calib_scenario;
  auto* cal_cmd = app.add_subcommand("calibrate-drag", "Tune Ct to a target open-water speed");
  cal_cmd->add_option("--target-blpc", target, "Target body lengths per cycle");
  cal_cmd->add_option("--cycles", cycles, "Cycles simulated per evaluation");
  cal_cmd->add_option("--scenario", calib_scenario, "Scenario supplying geometry and gait");

  std::string validate_path;
  auto* val_cmd = app.add_subcommand("validate", "Check a scenario file");
  val_cmd->add_option("scenario", validate_path, "Scenario JSON file")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kExitOther;
  }
  if (*run_cmd) return cmd_run(run);
  if (*serve_cmd) return cmd_serve(serve);
  if (*cal_cmd) return cmd_calibrate(target, cycles, calib_scenario);
  if (*val_cmd) return cmd_validate(validate_path);
  return kExitOther;
}
