#include "anguilla/service.hpp"

#include <httplib.h>

#include <atomic>
#include <future>
#include <random>
#include <sstream>
#include <thread>

#include "anguilla/config.hpp"
#include "anguilla/protocol.hpp"

namespace anguilla {

using nlohmann::json;
using Clock = std::chrono::steady_clock;

void Subscription::push(std::string line) {
  {
    std::lock_guard lock(mu_);
    if (closed_) return;
    lines_.push_back(std::move(line));
    while (lines_.size() > limit_) {
      lines_.pop_front();
      ++dropped_;
    }
  }
  cv_.notify_one();
}

std::vector<std::string> Subscription::pop_all(std::chrono::milliseconds timeout) {
  std::unique_lock lock(mu_);
  cv_.wait_for(lock, timeout, [&] { return !lines_.empty() || closed_; });
  std::vector<std::string> out(std::make_move_iterator(lines_.begin()),
                               std::make_move_iterator(lines_.end()));
  lines_.clear();
  return out;
}

void Subscription::close() {
  {
    std::lock_guard lock(mu_);
    closed_ = true;
  }
  cv_.notify_all();
}

bool Subscription::closed() const {
  std::lock_guard lock(mu_);
  return closed_;
}

std::uint64_t Subscription::dropped() const {
  std::lock_guard lock(mu_);
  return dropped_;
}

namespace {

std::string random_token() {
  std::random_device rd;
  std::ostringstream s;
  s << std::hex;
  for (int i = 0; i < 4; ++i) s << rd();
  return s.str();
}

bool is_finished(const EngineState& s) {
  if (s.outcome && s.config->outcome.stop_on_outcome) return true;
  return s.step >= static_cast<std::uint64_t>(s.config->step_count());
}

bool is_runnable(const EngineState& s, bool halted) {
  return !halted && !s.paused && !is_finished(s);
}

}  // namespace

struct Service::Impl {
  struct Pending {
    std::string token;
    std::string line;
    bool internal = false;
    std::promise<json> reply;
  };

  ServiceOptions options;
  EngineState engine;
  bool halted = false;

  // Inbox shared between the network threads and the simulation thread.
  std::mutex inbox_mu;
  std::condition_variable inbox_cv;
  std::deque<std::shared_ptr<Pending>> inbox;
  std::atomic<bool> stopping{false};

  // Subscribers and controller slot.
  mutable std::mutex subs_mu;
  std::vector<std::shared_ptr<Subscription>> subs;
  std::string controller_token;

  // Snapshot for status queries.
  mutable std::mutex snap_mu;
  json snapshot;
  std::string hash;
  std::shared_ptr<const ScenarioConfig> hashed_config;

  httplib::Server http;
  std::thread sim_thread;
  std::thread http_thread;
  int bound_port = -1;

  std::mutex done_mu;
  std::condition_variable done_cv;
  bool done = false;

  Impl(ScenarioConfig config, ServiceOptions opts) : options(std::move(opts)) {
    validate_scenario(config);
    if (options.decimation < 1) throw Error(ErrorCode::kInvalidArgument, "decimation must be >= 1");
    if (!(options.realtime_factor >= 0.0)) {
      throw Error(ErrorCode::kInvalidArgument, "realtime factor must be >= 0");
    }
    engine = initial_state(std::make_shared<const ScenarioConfig>(std::move(config)));
    engine.paused = options.start_paused;
    update_snapshot();
  }

  void update_snapshot() {
    json s{{"step", engine.step},
           {"sim_time", engine.robot.sim_time},
           {"paused", engine.paused},
           {"halted", halted},
           {"finished", is_finished(engine)},
           {"scenario", engine.config->name},
           {"dt", engine.config->dt},
           {"decimation", options.decimation}};
    s["outcome"] = engine.outcome ? to_json(*engine.outcome) : json(nullptr);
    std::string h;
    if (engine.config != hashed_config) {
      h = anguilla::config_hash(*engine.config);
      hashed_config = engine.config;
    }
    std::lock_guard lock(snap_mu);
    snapshot = std::move(s);
    if (!h.empty()) hash = std::move(h);
  }

  void broadcast(const std::string& line) {
    std::lock_guard lock(subs_mu);
    for (auto& s : subs) s->push(line);
  }

  json handle(Pending& p) {
    std::optional<std::int64_t> seq;
    try {
      seq = peek_seq(p.line);
      if (!p.internal) {
        std::lock_guard lock(subs_mu);
        if (controller_token.empty() || p.token != controller_token) {
          return make_error(seq, "not_controller", "only the controlling client may send commands");
        }
      }
      const CommandMessage m = parse_command(p.line, engine.gait);
      engine = apply_command(engine, m.command);
      if (std::holds_alternative<Reset>(m.command)) halted = false;
      return make_ack(m.seq, command_name(m.command), engine.step);
    } catch (const std::exception& e) {
      return make_error(seq, e);
    }
  }

  void run() {
    auto wall0 = Clock::now();
    double sim0 = engine.robot.sim_time;
    auto rebase = [&] {
      wall0 = Clock::now();
      sim0 = engine.robot.sim_time;
    };
    while (!stopping) {
      std::deque<std::shared_ptr<Pending>> batch;
      {
        std::unique_lock lock(inbox_mu);
        if (!is_runnable(engine, halted)) {
          inbox_cv.wait_for(lock, std::chrono::milliseconds(50),
                            [&] { return !inbox.empty() || stopping; });
        } else if (options.realtime_factor > 0.0) {
          const double ahead = (engine.robot.sim_time - sim0) / options.realtime_factor;
          const auto target =
              wall0 + std::chrono::duration_cast<Clock::duration>(std::chrono::duration<double>(ahead));
          inbox_cv.wait_until(lock, target, [&] { return !inbox.empty() || stopping; });
          if (inbox.empty() && Clock::now() < target) continue;
        }
        batch.swap(inbox);
      }
      if (stopping) {
        for (auto& p : batch) p->reply.set_value(make_error(peek_seq(p->line), "protocol", "service stopping"));
        break;
      }
      for (auto& p : batch) p->reply.set_value(handle(*p));
      if (!batch.empty()) {
        update_snapshot();
      }
      if (!is_runnable(engine, halted) || engine.robot.sim_time < sim0) {
        rebase();
        if (!is_runnable(engine, halted)) continue;
      }
      // Do not sleep past the step we owe when commands woke us early.
      if (options.realtime_factor > 0.0) {
        const double ahead = (engine.robot.sim_time - sim0) / options.realtime_factor;
        if (Clock::now() < wall0 + std::chrono::duration_cast<Clock::duration>(
                                       std::chrono::duration<double>(ahead))) {
          continue;
        }
      }
      try {
        // Copy, so a diverged step leaves the last valid state in place.
        StepResult r = step(engine);
        engine = std::move(r.state);
        if (r.record) {
          const bool terminal = r.record->outcome.has_value();
          if (terminal || r.record->step % static_cast<std::uint64_t>(options.decimation) == 0) {
            broadcast(to_json(*r.record).dump() + "\n");
          }
        }
      } catch (const Error& e) {
        halted = true;
        broadcast(make_error(std::nullopt, e).dump() + "\n");
      }
      if (engine.step % 50 == 0 || !is_runnable(engine, halted)) update_snapshot();
    }
  }

  std::shared_ptr<Pending> enqueue(std::string token, std::string line, bool internal) {
    auto p = std::make_shared<Pending>();
    p->token = std::move(token);
    p->line = std::move(line);
    p->internal = internal;
    {
      std::lock_guard lock(inbox_mu);
      inbox.push_back(p);
    }
    inbox_cv.notify_all();
    return p;
  }
};

Service::Service(ScenarioConfig config, ServiceOptions options)
    : impl_(std::make_unique<Impl>(std::move(config), std::move(options))) {
  auto& http = impl_->http;
  http.new_task_queue = [] { return new httplib::ThreadPool(32); };
  http.set_default_headers({{"Access-Control-Allow-Origin", "*"},
                            {"Access-Control-Allow-Headers", "Content-Type, X-Anguilla-Token"},
                            {"Access-Control-Expose-Headers",
                             "X-Anguilla-Role, X-Anguilla-Token, X-Anguilla-Config-Hash"}});
  http.Options(".*", [](const httplib::Request&, httplib::Response& res) { res.status = 204; });

  http.Get("/stream", [this](const httplib::Request& req, httplib::Response& res) {
    const std::string role = req.has_param("role") ? req.get_param_value("role") : "observer";
    if (role != "controller" && role != "observer") {
      res.status = 400;
      res.set_content(make_error(std::nullopt, "protocol", "role must be controller or observer").dump() + "\n",
                      "application/x-ndjson");
      return;
    }
    Attachment a = attach(role == "controller" ? Role::kController : Role::kObserver);
    res.set_header("X-Anguilla-Role", a.role == Role::kController ? "controller" : "observer");
    if (!a.token.empty()) res.set_header("X-Anguilla-Token", a.token);
    res.set_header("X-Anguilla-Config-Hash", config_hash());
    res.set_header("Cache-Control", "no-cache");
    auto sub = a.subscription;
    res.set_chunked_content_provider(
        "application/x-ndjson",
        [sub](std::size_t, httplib::DataSink& sink) {
          auto lines = sub->pop_all(std::chrono::milliseconds(1000));
          if (lines.empty()) {
            if (sub->closed()) {
              sink.done();
              return true;
            }
            // Blank keep-alive line; a failed write reveals a gone client.
            return sink.write("\n", 1);
          }
          for (const auto& l : lines) {
            if (!sink.write(l.data(), l.size())) return false;
          }
          return true;
        },
        [this, a](bool) { detach(a); });
  });

  http.Post("/command", [this](const httplib::Request& req, httplib::Response& res) {
    const std::string token = req.get_header_value("X-Anguilla-Token");
    std::istringstream in(req.body);
    std::string line;
    std::string out;
    while (std::getline(in, line)) {
      if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
      out += submit(token, line).dump() + "\n";
    }
    if (out.empty()) out = make_error(std::nullopt, "protocol", "empty command body").dump() + "\n";
    res.set_content(out, "application/x-ndjson");
  });

  http.Get("/status", [this](const httplib::Request&, httplib::Response& res) {
    res.set_content(status().dump(), "application/json");
  });

  if (!impl_->options.static_dir.empty() &&
      !http.set_mount_point("/", impl_->options.static_dir)) {
    throw Error(ErrorCode::kIo, "static directory not found: " + impl_->options.static_dir);
  }
}

Service::~Service() { stop(); }

int Service::start(const std::string& host, int port) {
  auto& im = *impl_;
  if (im.sim_thread.joinable()) throw Error(ErrorCode::kInvalidArgument, "service already started");
  const int p = port == 0 ? im.http.bind_to_any_port(host) : (im.http.bind_to_port(host, port) ? port : -1);
  if (p < 0) {
    throw Error(ErrorCode::kIo, "cannot bind " + host + ":" + std::to_string(port));
  }
  im.bound_port = p;
  im.sim_thread = std::thread([&im] { im.run(); });
  im.http_thread = std::thread([&im] { im.http.listen_after_bind(); });
  im.http.wait_until_ready();
  return p;
}

void Service::wait() {
  std::unique_lock lock(impl_->done_mu);
  impl_->done_cv.wait(lock, [&] { return impl_->done; });
}

void Service::stop() {
  auto& im = *impl_;
  if (im.stopping.exchange(true)) return;
  {
    std::lock_guard lock(im.subs_mu);
    for (auto& s : im.subs) s->close();
  }
  im.inbox_cv.notify_all();
  im.http.stop();
  if (im.http_thread.joinable()) im.http_thread.join();
  if (im.sim_thread.joinable()) im.sim_thread.join();
  {
    std::lock_guard lock(im.done_mu);
    im.done = true;
  }
  im.done_cv.notify_all();
}

int Service::port() const { return impl_->bound_port; }

Service::Attachment Service::attach(Role requested) {
  Attachment a;
  a.subscription = std::make_shared<Subscription>(impl_->options.queue_limit);
  std::lock_guard lock(impl_->subs_mu);
  if (requested == Role::kController && impl_->controller_token.empty()) {
    a.role = Role::kController;
    a.token = random_token();
    impl_->controller_token = a.token;
  }
  impl_->subs.push_back(a.subscription);
  return a;
}

void Service::detach(const Attachment& a) {
  a.subscription->close();
  bool was_controller = false;
  {
    std::lock_guard lock(impl_->subs_mu);
    std::erase(impl_->subs, a.subscription);
    if (a.role == Role::kController && impl_->controller_token == a.token) {
      impl_->controller_token.clear();
      was_controller = true;
    }
  }
  if (was_controller && !impl_->stopping) impl_->enqueue({}, R"({"type":"Pause"})", true);
}

json Service::submit(const std::string& token, const std::string& line,
                     std::chrono::milliseconds timeout) {
  if (impl_->stopping) return make_error(peek_seq(line), "protocol", "service stopping");
  auto p = impl_->enqueue(token, line, false);
  auto f = p->reply.get_future();
  if (f.wait_for(timeout) != std::future_status::ready) {
    return make_error(peek_seq(line), "protocol", "command not applied within timeout");
  }
  return f.get();
}

json Service::status() const {
  json s;
  {
    std::lock_guard lock(impl_->snap_mu);
    s = impl_->snapshot;
    s["config_hash"] = impl_->hash;
  }
  std::lock_guard lock(impl_->subs_mu);
  s["controller_connected"] = !impl_->controller_token.empty();
  s["subscribers"] = impl_->subs.size();
  return s;
}

std::string Service::config_hash() const {
  std::lock_guard lock(impl_->snap_mu);
  return impl_->hash;
}

}  // namespace anguilla
