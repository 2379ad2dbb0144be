// Copyright 2026 The inpipe Authors
//
// SPDX-License-Identifier: Apache-2.0

#include "gateway.hpp"

#include <atomic>
#include <boost/asio.hpp>
#include <boost/beast/core.hpp>
#include <boost/beast/websocket.hpp>
#include <chrono>
#include <deque>
#include <set>
#include <thread>

#include "error.hpp"

namespace inpipe {

namespace beast = boost::beast;
namespace websocket = beast::websocket;
namespace net = boost::asio;
using tcp = net::ip::tcp;
using nlohmann::json;

json telemetry_message(const TelemetryRow& r) {
  return {{"v", kGatewaySchemaVersion},
          {"type", "telemetry"},
          {"t_s", r.t_s},
          {"s_m", r.s_m},
          {"D_m", r.D_m},
          {"theta_mid_deg", r.theta_mid_deg},
          {"joint_duty", r.joint_duty},
          {"drive_duty", r.drive_duty},
          {"est_torque_Nm", r.est_torque_Nm},
          {"slip_margin_N", r.slip_margin_N},
          {"slip_flag", r.slip_flag},
          {"board_temp_C", r.board_temp_C},
          {"mode", firmware::to_string(r.mode)}};
}

json hello_message(const geometry::PipeNetwork& net, std::string_view role) {
  json profile = json::array();
  for (std::size_t i = 0; i < net.segments().size(); ++i) {
    const auto& seg = net.segments()[i];
    const char* kind = seg.kind == geometry::SegmentKind::Straight ? "straight"
                       : seg.kind == geometry::SegmentKind::Bend   ? "bend"
                                                                   : "increaser";
    profile.push_back({{"kind", kind},
                       {"s_from_m", net.offsets()[i]},
                       {"s_to_m", net.offsets()[i] + seg.arclength()},
                       {"D_in_m", seg.diameter_in_m},
                       {"D_out_m", seg.diameter_out_m},
                       {"inclination", seg.inclination}});
  }
  return {{"v", kGatewaySchemaVersion},
          {"type", "hello"},
          {"role", role},
          {"telemetry_period_s", 0.1},
          {"total_length_m", net.total_length()},
          {"profile", profile}};
}

json error_message(std::string_view error) {
  return {{"v", kGatewaySchemaVersion}, {"type", "error"}, {"error", error}};
}

namespace {

json role_message(std::string_view role) {
  return {{"v", kGatewaySchemaVersion}, {"type", "role"}, {"role", role}};
}

json busy_message() {
  return {{"v", kGatewaySchemaVersion},
          {"type", "busy"},
          {"error", "another client holds the commander role"}};
}

std::string frame(const json& j) { return j.dump() + "\n"; }

}  // namespace

ClientRequest parse_client_message(std::string_view text) {
  ClientRequest req;
  json j;
  try {
    j = json::parse(text);
  } catch (const json::exception&) {
    req.error = "malformed JSON";
    return req;
  }
  if (!j.is_object() || !j.contains("cmd") || !j["cmd"].is_string()) {
    req.error = "missing \"cmd\"";
    return req;
  }
  if (j.contains("v") && j["v"] != kGatewaySchemaVersion) {
    req.error = "unsupported schema version";
    return req;
  }
  req.verb = j["cmd"].get<std::string>();

  auto number = [&](const char* key) -> std::optional<double> {
    if (!j.contains(key) || !j[key].is_number()) {
      req.error = std::string("\"") + key + "\" must be a number";
      return std::nullopt;
    }
    return j[key].get<double>();
  };

  static const std::pair<const char*, ActionKind> kPlain[] = {
      {"stop", ActionKind::Stop},
      {"estop", ActionKind::Estop},
      {"reset_estop", ActionKind::ResetEstop}};
  static const std::tuple<const char*, ActionKind, const char*> kValued[] = {
      {"drive", ActionKind::Drive, "duty"},
      {"roll", ActionKind::Roll, "duty"},
      {"set_joint_duty", ActionKind::JointDuty, "duty"},
      {"set_joint_angle", ActionKind::JointAngle, "deg"}};

  if (req.verb == "claim" || req.verb == "release") return req;
  if (req.verb == "replay") {
    if (j.contains("seconds")) {
      auto s = number("seconds");
      if (!s) return req;
      if (!(*s > 0.0)) {
        req.error = "\"seconds\" must be positive";
        return req;
      }
      req.replay_seconds = *s;
    }
    return req;
  }
  for (const auto& [name, kind] : kPlain)
    if (req.verb == name) {
      req.action = Action{kind, 0.0};
      return req;
    }
  for (const auto& [name, kind, key] : kValued)
    if (req.verb == name) {
      auto v = number(key);
      if (!v) return req;
      Action a{kind, *v};
      try {
        validate(a);
      } catch (const Error& e) {
        req.error = e.what();
        return req;
      }
      req.action = a;
      return req;
    }
  req.error = "unknown cmd '" + req.verb + "'";
  return req;
}

class Session;

struct Gateway::Impl {
  Impl(Scenario sc, GatewayOptions opts);

  void start_accept();
  void join(const std::shared_ptr<Session>& s);
  void leave(Session* s);
  void handle(const std::shared_ptr<Session>& s, const std::string& text);
  void broadcast(std::string msg);
  void send_to(const std::weak_ptr<Session>& s, std::string msg);
  void run();

  struct Request {
    std::weak_ptr<Session> from;
    std::string verb;
    std::optional<Action> action;
    double replay_seconds = 60.0;
  };

  GatewayOptions options;
  Simulation sim;
  net::io_context ioc;
  tcp::acceptor acceptor;
  std::thread io_thread;
  std::atomic<bool> stop_requested{false};
  unsigned short bound_port = 0;

  // io thread only
  std::set<std::shared_ptr<Session>> sessions;
  Session* commander = nullptr;
  std::string final_result;  // sent to clients that join after the run ends

  OrderedQueue<Request> requests;
};

class Session : public std::enable_shared_from_this<Session> {
 public:
  Session(tcp::socket socket, Gateway::Impl& server)
      : ws_(std::move(socket)), server_(server) {}

  void start() {
    ws_.set_option(
        websocket::stream_base::timeout::suggested(beast::role_type::server));
    ws_.async_accept(
        [self = shared_from_this()](beast::error_code ec) {
          if (ec) return;
          self->server_.join(self);
          self->read();
        });
  }

  void send(std::string msg) {
    queue_.push_back(std::move(msg));
    if (queue_.size() == 1) write();
  }

  void close() {
    beast::get_lowest_layer(ws_).close();
  }

 private:
  void read() {
    ws_.async_read(buffer_, [self = shared_from_this()](beast::error_code ec,
                                                        std::size_t) {
      if (ec) {
        self->server_.leave(self.get());
        return;
      }
      std::string text = beast::buffers_to_string(self->buffer_.data());
      self->buffer_.consume(self->buffer_.size());
      self->server_.handle(self, text);
      self->read();
    });
  }

  void write() {
    ws_.text(true);
    ws_.async_write(net::buffer(queue_.front()),
                    [self = shared_from_this()](beast::error_code ec,
                                                std::size_t) {
                      if (ec) {
                        self->server_.leave(self.get());
                        return;
                      }
                      self->queue_.pop_front();
                      if (!self->queue_.empty()) self->write();
                    });
  }

  websocket::stream<beast::tcp_stream> ws_;
  beast::flat_buffer buffer_;
  std::deque<std::string> queue_;
  Gateway::Impl& server_;
};

Gateway::Impl::Impl(Scenario sc, GatewayOptions opts)
    : options(std::move(opts)),
      sim(std::move(sc), SimOptions{.stop_on_stall = false, .record_frames = true}),
      acceptor(ioc) {
  beast::error_code ec;
  const auto address = net::ip::make_address(options.address, ec);
  if (ec) throw Error(ErrorCode::InvalidArgument, "bad address " + options.address);
  const tcp::endpoint ep{address, options.port};
  acceptor.open(ep.protocol(), ec);
  if (!ec) acceptor.set_option(net::socket_base::reuse_address(true), ec);
  if (!ec) acceptor.bind(ep, ec);
  if (!ec) acceptor.listen(net::socket_base::max_listen_connections, ec);
  if (ec)
    throw Error(ErrorCode::Io, "cannot listen on port " +
                                   std::to_string(options.port) + ": " +
                                   ec.message());
  bound_port = acceptor.local_endpoint().port();
}

void Gateway::Impl::start_accept() {
  acceptor.async_accept(net::make_strand(ioc),
                        [this](beast::error_code ec, tcp::socket socket) {
                          if (ec) return;  // acceptor closed
                          std::make_shared<Session>(std::move(socket), *this)
                              ->start();
                          start_accept();
                        });
}

void Gateway::Impl::join(const std::shared_ptr<Session>& s) {
  sessions.insert(s);
  s->send(frame(hello_message(sim.network(), "observer")));
  if (!final_result.empty()) s->send(final_result);
}

void Gateway::Impl::leave(Session* s) {
  if (commander == s) commander = nullptr;
  for (auto it = sessions.begin(); it != sessions.end(); ++it)
    if (it->get() == s) {
      sessions.erase(it);
      break;
    }
}

void Gateway::Impl::handle(const std::shared_ptr<Session>& s,
                           const std::string& text) {
  ClientRequest req = parse_client_message(text);
  if (!req.error.empty()) {
    s->send(frame(error_message(req.error)));
    return;
  }
  if (req.verb == "claim") {
    if (commander != nullptr && commander != s.get()) {
      s->send(frame(busy_message()));
      return;
    }
    commander = s.get();
    s->send(frame(role_message("commander")));
    return;
  }
  if (req.verb == "release") {
    if (commander == s.get()) commander = nullptr;
    s->send(frame(role_message("observer")));
    return;
  }
  if (req.verb == "replay") {
    requests.push({s, req.verb, std::nullopt, req.replay_seconds});
    return;
  }

  const bool emergency = req.action && req.action->kind == ActionKind::Estop;
  if (!emergency) {
    if (commander == nullptr) {
      commander = s.get();
      s->send(frame(role_message("commander")));
    } else if (commander != s.get()) {
      s->send(frame(busy_message()));
      return;
    }
  }
  requests.push({s, req.verb, req.action, 0.0});
}

void Gateway::Impl::send_to(const std::weak_ptr<Session>& s, std::string msg) {
  net::post(ioc, [s, msg = std::move(msg)]() mutable {
    if (auto session = s.lock()) session->send(std::move(msg));
  });
}

void Gateway::Impl::broadcast(std::string msg) {
  net::post(ioc, [this, msg = std::move(msg)]() {
    for (const auto& s : sessions) s->send(msg);
  });
}

void Gateway::Impl::run() {
  start_accept();
  auto guard = net::make_work_guard(ioc);
  io_thread = std::thread([this] { ioc.run(); });

  sim.on_row = [this](const TelemetryRow& row) {
    broadcast(frame(telemetry_message(row)));
  };

  using clock = std::chrono::steady_clock;
  const auto wall_start = clock::now();
  bool announced = false;

  while (!stop_requested.load()) {
    for (auto& r : requests.drain()) {
      if (r.action) {
        sim.submit(*r.action);
        send_to(r.from, frame({{"v", kGatewaySchemaVersion},
                               {"type", "ack"},
                               {"cmd", r.verb},
                               {"t_s", sim.now_s()}}));
      } else {
        json rows = json::array();
        const double since = sim.now_s() - std::min(r.replay_seconds,
                                                    options.replay_window_s);
        for (const auto& row : sim.log())
          if (row.t_s >= since - 1e-9) rows.push_back(telemetry_message(row));
        send_to(r.from, frame({{"v", kGatewaySchemaVersion},
                               {"type", "replay"},
                               {"rows", rows}}));
      }
    }

    if (sim.finished()) {
      if (!announced) {
        std::string msg = frame({{"v", kGatewaySchemaVersion},
                                 {"type", "result"},
                                 {"result", to_string(sim.outcome().result)},
                                 {"t_s", sim.outcome().t_s}});
        net::post(ioc, [this, msg = std::move(msg)]() {
          final_result = msg;
          for (const auto& s : sessions) s->send(msg);
        });
        announced = true;
      }
      std::this_thread::sleep_for(std::chrono::milliseconds(5));
      continue;
    }

    sim.step();
    if (options.speed > 0.0) {
      const auto target =
          wall_start + std::chrono::duration_cast<clock::duration>(
                           std::chrono::duration<double>(sim.now_s() /
                                                         options.speed));
      if (target > clock::now()) std::this_thread::sleep_until(target);
    }
  }

  net::post(ioc, [this] {
    beast::error_code ec;
    acceptor.close(ec);
    for (const auto& s : sessions) s->close();
    sessions.clear();
    commander = nullptr;
  });
  guard.reset();
  // Give the close handlers a moment to run, then drop anything left.
  std::this_thread::sleep_for(std::chrono::milliseconds(50));
  ioc.stop();
  io_thread.join();
  sim.on_row = nullptr;
}

Gateway::Gateway(Scenario scenario, GatewayOptions options)
    : impl_(std::make_unique<Impl>(std::move(scenario), std::move(options))) {}

Gateway::~Gateway() {
  if (impl_->io_thread.joinable()) {
    impl_->ioc.stop();
    impl_->io_thread.join();
  }
}

unsigned short Gateway::port() const {
  return impl_->bound_port;
}

void Gateway::run() { impl_->run(); }

void Gateway::stop() { impl_->stop_requested.store(true); }

const Simulation& Gateway::simulation() const { return impl_->sim; }

}  // namespace inpipe
