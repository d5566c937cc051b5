// Copyright 2026 The mtraj Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

// Wire protocol for predictors running out of process.
//
// Frames are single-line UTF-8 JSON objects terminated by '\n'. The client
// opens with
//   {"type":"hello","protocol_version":1,"client":"mtraj"}
// and the predictor answers
//   {"type":"hello","protocol_version":1,"sut":<name>,"deterministic_given_seed":<bool>}
// Each request
//   {"type":"predict_request","id":<string>,
//    "scene":{"width":W,"height":H,"num_classes":C,"rescale_factor":r,
//             "cells":<base64, one byte per cell, row-major>},
//    "observed":[[x,y],...],"horizon":T,"k":K,"seed":<uint64>}
// is answered by
//   {"type":"predict_response","id":<same id>,"trajectories":[K][T][2]}
// or by {"type":"error","id":<same id>,"message":<string>}.
// Floating point values are written with 17 significant digits. At most one
// request is outstanding per connection.
//
// Transports: `cmd:<shell command>` runs the predictor as a child process
// speaking on its stdin/stdout; `tcp://host:port` connects to a listener.

#pragma once

#include <cerrno>
#include <chrono>
#include <csignal>
#include <cstdint>
#include <cstdio>
#include <cstring>
#include <functional>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <arpa/inet.h>
#include <fcntl.h>
#include <netdb.h>
#include <netinet/in.h>
#include <poll.h>
#include <sys/socket.h>
#include <sys/types.h>
#include <sys/wait.h>
#include <unistd.h>

#include <nlohmann/json.hpp>

#include "mtraj/core.hpp"
#include "mtraj/harness.hpp"

namespace mtraj::sutproto {

using nlohmann::json;

inline constexpr int kProtocolVersion = 1;
inline constexpr std::chrono::milliseconds kDefaultTimeout{30000};
inline constexpr std::size_t kMaxSceneCells = 16u << 20;  // 16 MiB at one byte per cell
// Largest accepted frame: a maximal scene in base64 plus generous room for trajectories.
inline constexpr std::size_t kMaxFrameBytes = 64u << 20;

// ---------------------------------------------------------------------------
// Encoding helpers
// ---------------------------------------------------------------------------

inline std::string base64_encode(std::span<const std::uint8_t> bytes) {
  static constexpr char kAlphabet[] =
      "ABCDEFGHIJKLMNOPQRSTUVWXYZabcdefghijklmnopqrstuvwxyz0123456789+/";
  std::string out;
  out.reserve((bytes.size() + 2) / 3 * 4);
  std::size_t i = 0;
  for (; i + 2 < bytes.size(); i += 3) {
    const std::uint32_t v = (bytes[i] << 16) | (bytes[i + 1] << 8) | bytes[i + 2];
    out += kAlphabet[(v >> 18) & 63];
    out += kAlphabet[(v >> 12) & 63];
    out += kAlphabet[(v >> 6) & 63];
    out += kAlphabet[v & 63];
  }
  if (i + 1 == bytes.size()) {
    const std::uint32_t v = bytes[i] << 16;
    out += kAlphabet[(v >> 18) & 63];
    out += kAlphabet[(v >> 12) & 63];
    out += "==";
  } else if (i + 2 == bytes.size()) {
    const std::uint32_t v = (bytes[i] << 16) | (bytes[i + 1] << 8);
    out += kAlphabet[(v >> 18) & 63];
    out += kAlphabet[(v >> 12) & 63];
    out += kAlphabet[(v >> 6) & 63];
    out += '=';
  }
  return out;
}

inline std::vector<std::uint8_t> base64_decode(std::string_view text) {
  auto value = [](char c) -> int {
    if (c >= 'A' && c <= 'Z') return c - 'A';
    if (c >= 'a' && c <= 'z') return c - 'a' + 26;
    if (c >= '0' && c <= '9') return c - '0' + 52;
    if (c == '+') return 62;
    if (c == '/') return 63;
    return -1;
  };
  if (text.size() % 4 != 0) throw Error(ErrorCode::kMalformedResponse, "bad base64 length");
  std::vector<std::uint8_t> out;
  out.reserve(text.size() / 4 * 3);
  for (std::size_t i = 0; i < text.size(); i += 4) {
    int v[4];
    int pad = 0;
    for (int j = 0; j < 4; ++j) {
      const char c = text[i + static_cast<std::size_t>(j)];
      if (c == '=' && i + 4 == text.size() && j >= 2) {
        v[j] = 0;
        ++pad;
      } else {
        if (pad > 0) throw Error(ErrorCode::kMalformedResponse, "bad base64 padding");
        v[j] = value(c);
        if (v[j] < 0) throw Error(ErrorCode::kMalformedResponse, "bad base64 character");
      }
    }
    const std::uint32_t bits = (static_cast<std::uint32_t>(v[0]) << 18) |
                               (static_cast<std::uint32_t>(v[1]) << 12) |
                               (static_cast<std::uint32_t>(v[2]) << 6) |
                               static_cast<std::uint32_t>(v[3]);
    out.push_back(static_cast<std::uint8_t>(bits >> 16));
    if (pad < 2) out.push_back(static_cast<std::uint8_t>(bits >> 8));
    if (pad < 1) out.push_back(static_cast<std::uint8_t>(bits));
  }
  return out;
}

namespace detail {

inline void write_compact(const json& j, std::string& out) {
  switch (j.type()) {
    case json::value_t::object: {
      out += '{';
      bool first = true;
      for (const auto& [key, val] : j.items()) {
        if (!first) out += ',';
        first = false;
        out += json(key).dump();
        out += ':';
        write_compact(val, out);
      }
      out += '}';
      return;
    }
    case json::value_t::array: {
      out += '[';
      for (std::size_t i = 0; i < j.size(); ++i) {
        if (i) out += ',';
        write_compact(j[i], out);
      }
      out += ']';
      return;
    }
    case json::value_t::number_float: {
      char buf[40];
      std::snprintf(buf, sizeof(buf), "%.17g", j.get<double>());
      out += buf;
      return;
    }
    default:
      out += j.dump();
  }
}

}  // namespace detail

/// One frame as it goes on the wire (without the trailing newline).
inline std::string to_wire(const json& frame) {
  std::string out;
  detail::write_compact(frame, out);
  return out;
}

inline json points_to_json(std::span<const Point2> pts) {
  json arr = json::array();
  for (const auto& p : pts) arr.push_back(json::array({p.x, p.y}));
  return arr;
}

inline json encode_hello_client() {
  return {{"type", "hello"}, {"protocol_version", kProtocolVersion}, {"client", "mtraj"}};
}

inline json encode_hello_server(const std::string& name, bool deterministic) {
  return {{"type", "hello"},
          {"protocol_version", kProtocolVersion},
          {"sut", name},
          {"deterministic_given_seed", deterministic}};
}

inline json encode_request(const std::string& id, const TestCase& tc, int k, std::uint64_t seed) {
  const auto& s = tc.scene;
  if (s.cells().size() > kMaxSceneCells) {
    throw Error(ErrorCode::kInvalidScene, "scene grid exceeds 16 MiB");
  }
  json scene = {{"width", s.width()},
                {"height", s.height()},
                {"num_classes", s.num_classes()},
                {"rescale_factor", s.rescale_factor()},
                {"cells", base64_encode(s.cells())}};
  return {{"type", "predict_request"}, {"id", id},
          {"scene", scene},            {"observed", points_to_json(tc.observed.points())},
          {"horizon", tc.horizon},     {"k", k},
          {"seed", seed}};
}

inline json encode_response(const std::string& id, const PredictionSet& preds) {
  json trajs = json::array();
  for (const auto& t : preds.trajectories()) trajs.push_back(points_to_json(t.points()));
  return {{"type", "predict_response"}, {"id", id}, {"trajectories", trajs}};
}

inline json encode_error(const std::string& id, const std::string& message) {
  json j = {{"type", "error"}, {"message", message}};
  if (!id.empty()) j["id"] = id;
  return j;
}

struct PredictRequest {
  std::string id;
  TestCase test_case;
  int k = 0;
  std::uint64_t seed = 0;
};

namespace detail {

inline Point2 point_from_json(const json& p) {
  if (!p.is_array() || p.size() != 2 || !p[0].is_number() || !p[1].is_number()) {
    throw Error(ErrorCode::kDimensionMismatch, "point is not a pair of numbers");
  }
  return {p[0].get<double>(), p[1].get<double>()};
}

}  // namespace detail

/// Server side. Throws mtraj::Error (kMalformedResponse / kDimensionMismatch
/// / scene and trajectory errors) on invalid requests.
inline PredictRequest decode_request(const json& j) {
  try {
    const auto id = j.at("id").get<std::string>();
    const auto& s = j.at("scene");
    const int w = s.at("width").get<int>();
    const int h = s.at("height").get<int>();
    if (w < 1 || h < 1 ||
        static_cast<std::size_t>(w) * static_cast<std::size_t>(h) > kMaxSceneCells) {
      throw Error(ErrorCode::kInvalidScene, "scene dimensions out of range");
    }
    auto cells = base64_decode(s.at("cells").get<std::string>());
    Scene scene(w, h, std::move(cells), s.at("num_classes").get<int>(),
                s.at("rescale_factor").get<double>());
    std::vector<Point2> obs;
    for (const auto& p : j.at("observed")) obs.push_back(detail::point_from_json(p));
    const int k = j.at("k").get<int>();
    const auto seed = j.at("seed").get<std::uint64_t>();
    const int horizon = j.at("horizon").get<int>();
    if (k < 1) throw Error(ErrorCode::kInvalidArgument, "k must be >= 1");
    PredictRequest r{id,
                     TestCase{"request/" + id, std::move(scene), Trajectory(std::move(obs)),
                              std::nullopt, horizon},
                     k, seed};
    validate(r.test_case);
    return r;
  } catch (const json::exception& e) {
    throw Error(ErrorCode::kMalformedResponse, std::string("bad predict_request: ") + e.what());
  }
}

/// Client side: checks the K x T x 2 shape.
inline PredictionSet decode_response(const json& j, int k, int horizon) {
  try {
    const auto& trajs = j.at("trajectories");
    if (!trajs.is_array() || trajs.size() != static_cast<std::size_t>(k)) {
      throw Error(ErrorCode::kDimensionMismatch,
                  "expected " + std::to_string(k) + " trajectories, got " +
                      std::to_string(trajs.is_array() ? trajs.size() : 0));
    }
    std::vector<Trajectory> out;
    out.reserve(trajs.size());
    for (const auto& t : trajs) {
      if (!t.is_array() || t.size() != static_cast<std::size_t>(horizon)) {
        throw Error(ErrorCode::kDimensionMismatch,
                    "expected " + std::to_string(horizon) + " points per trajectory");
      }
      std::vector<Point2> pts;
      pts.reserve(t.size());
      for (const auto& p : t) pts.push_back(detail::point_from_json(p));
      out.emplace_back(std::move(pts));
    }
    return PredictionSet(std::move(out));
  } catch (const json::exception& e) {
    throw Error(ErrorCode::kMalformedResponse, std::string("bad predict_response: ") + e.what());
  } catch (const Error& e) {
    if (e.code() == ErrorCode::kInvalidTrajectory) {
      throw Error(ErrorCode::kMalformedResponse, e.what());
    }
    throw;
  }
}

// ---------------------------------------------------------------------------
// Transports
// ---------------------------------------------------------------------------

class Transport {
 public:
  virtual ~Transport() = default;
  virtual void write_line(std::string_view line) = 0;
  /// Next line without its terminator; nullopt at end of stream. Throws
  /// Error(kTimeout) when nothing arrives within `timeout`.
  virtual std::optional<std::string> read_line(std::chrono::milliseconds timeout) = 0;
};

/// Line I/O over a pair of file descriptors.
class FdTransport : public Transport {
 public:
  FdTransport(int read_fd, int write_fd, bool owns_fds)
      : read_fd_(read_fd), write_fd_(write_fd), owns_(owns_fds) {}
  FdTransport(const FdTransport&) = delete;
  FdTransport& operator=(const FdTransport&) = delete;
  ~FdTransport() override { close_fds(); }

  void write_line(std::string_view line) override {
    std::string buf(line);
    buf += '\n';
    std::size_t off = 0;
    while (off < buf.size()) {
      const ssize_t n = ::write(write_fd_, buf.data() + off, buf.size() - off);
      if (n < 0) {
        if (errno == EINTR) continue;
        throw Error(ErrorCode::kTransportError, std::string("write failed: ") + std::strerror(errno));
      }
      off += static_cast<std::size_t>(n);
    }
  }

  std::optional<std::string> read_line(std::chrono::milliseconds timeout) override {
    const auto deadline = std::chrono::steady_clock::now() + timeout;
    while (true) {
      if (auto nl = buffer_.find('\n'); nl != std::string::npos) {
        std::string line = buffer_.substr(0, nl);
        buffer_.erase(0, nl + 1);
        if (!line.empty() && line.back() == '\r') line.pop_back();
        return line;
      }
      if (eof_) {
        if (buffer_.empty()) return std::nullopt;
        std::string line = std::move(buffer_);
        buffer_.clear();
        return line;
      }
      const auto remaining = std::chrono::duration_cast<std::chrono::milliseconds>(
          deadline - std::chrono::steady_clock::now());
      if (remaining.count() <= 0) {
        throw Error(ErrorCode::kTimeout, "no reply within " + std::to_string(timeout.count()) + " ms");
      }
      pollfd pfd{read_fd_, POLLIN, 0};
      const int rc = ::poll(&pfd, 1, static_cast<int>(remaining.count()));
      if (rc < 0) {
        if (errno == EINTR) continue;
        throw Error(ErrorCode::kTransportError, std::string("poll failed: ") + std::strerror(errno));
      }
      if (rc == 0) continue;
      char chunk[65536];
      const ssize_t n = ::read(read_fd_, chunk, sizeof(chunk));
      if (n < 0) {
        if (errno == EINTR || errno == EAGAIN) continue;
        throw Error(ErrorCode::kTransportError, std::string("read failed: ") + std::strerror(errno));
      }
      if (n == 0) {
        eof_ = true;
      } else {
        buffer_.append(chunk, static_cast<std::size_t>(n));
        if (buffer_.size() > kMaxFrameBytes && buffer_.find('\n') == std::string::npos) {
          throw Error(ErrorCode::kMalformedResponse, "frame exceeds " +
                                                         std::to_string(kMaxFrameBytes) + " bytes");
        }
      }
    }
  }

 protected:
  void reset(int read_fd, int write_fd) {
    close_fds();
    read_fd_ = read_fd;
    write_fd_ = write_fd;
    owns_ = true;
  }

  void close_fds() {
    if (!owns_) return;
    if (write_fd_ >= 0 && write_fd_ != read_fd_) ::close(write_fd_);
    if (read_fd_ >= 0) ::close(read_fd_);
    read_fd_ = write_fd_ = -1;
    owns_ = false;
  }

  void close_write() {
    if (owns_ && write_fd_ >= 0 && write_fd_ != read_fd_) {
      ::close(write_fd_);
      write_fd_ = -1;
    }
  }

 private:
  int read_fd_;
  int write_fd_;
  bool owns_;
  bool eof_ = false;
  std::string buffer_;
};

/// Runs `/bin/sh -c command` and talks to it over its stdin/stdout. Standard
/// error is inherited.
class ChildProcessTransport : public FdTransport {
 public:
  explicit ChildProcessTransport(const std::string& command) : FdTransport(-1, -1, false) {
    std::signal(SIGPIPE, SIG_IGN);
    int to_child[2];
    int from_child[2];
    if (::pipe2(to_child, O_CLOEXEC) != 0) {
      throw Error(ErrorCode::kTransportError, std::string("pipe: ") + std::strerror(errno));
    }
    if (::pipe2(from_child, O_CLOEXEC) != 0) {
      ::close(to_child[0]);
      ::close(to_child[1]);
      throw Error(ErrorCode::kTransportError, std::string("pipe: ") + std::strerror(errno));
    }
    pid_ = ::fork();
    if (pid_ < 0) {
      for (int fd : {to_child[0], to_child[1], from_child[0], from_child[1]}) ::close(fd);
      throw Error(ErrorCode::kTransportError, std::string("fork: ") + std::strerror(errno));
    }
    if (pid_ == 0) {
      ::dup2(to_child[0], STDIN_FILENO);
      ::dup2(from_child[1], STDOUT_FILENO);
      ::execl("/bin/sh", "sh", "-c", command.c_str(), static_cast<char*>(nullptr));
      ::_exit(127);
    }
    ::close(to_child[0]);
    ::close(from_child[1]);
    reset(from_child[0], to_child[1]);
  }

  ~ChildProcessTransport() override {
    close_write();
    // Give the predictor a moment to exit on end of input, then stop it.
    for (int i = 0; i < 100; ++i) {
      if (::waitpid(pid_, nullptr, WNOHANG) != 0) {
        close_fds();
        return;
      }
      ::usleep(10000);
    }
    ::kill(pid_, SIGKILL);
    ::waitpid(pid_, nullptr, 0);
    close_fds();
  }

 private:
  pid_t pid_ = -1;
};

class TcpTransport : public FdTransport {
 public:
  TcpTransport(const std::string& host, const std::string& port) : FdTransport(-1, -1, false) {
    std::signal(SIGPIPE, SIG_IGN);
    addrinfo hints{};
    hints.ai_family = AF_UNSPEC;
    hints.ai_socktype = SOCK_STREAM;
    addrinfo* res = nullptr;
    if (const int rc = ::getaddrinfo(host.c_str(), port.c_str(), &hints, &res); rc != 0) {
      throw Error(ErrorCode::kTransportError, "resolve " + host + ": " + ::gai_strerror(rc));
    }
    int fd = -1;
    for (auto* ai = res; ai != nullptr; ai = ai->ai_next) {
      fd = ::socket(ai->ai_family, ai->ai_socktype | SOCK_CLOEXEC, ai->ai_protocol);
      if (fd < 0) continue;
      if (::connect(fd, ai->ai_addr, ai->ai_addrlen) == 0) break;
      ::close(fd);
      fd = -1;
    }
    ::freeaddrinfo(res);
    if (fd < 0) throw Error(ErrorCode::kTransportError, "cannot connect to " + host + ":" + port);
    reset(fd, fd);
  }
};

/// Listening socket for serving the protocol over TCP.
class TcpListener {
 public:
  /// Port 0 picks a free port; see port().
  explicit TcpListener(std::uint16_t port, const std::string& bind_addr = "127.0.0.1") {
    fd_ = ::socket(AF_INET, SOCK_STREAM | SOCK_CLOEXEC, 0);
    if (fd_ < 0) throw Error(ErrorCode::kTransportError, "socket failed");
    const int one = 1;
    ::setsockopt(fd_, SOL_SOCKET, SO_REUSEADDR, &one, sizeof(one));
    sockaddr_in addr{};
    addr.sin_family = AF_INET;
    addr.sin_port = htons(port);
    if (::inet_pton(AF_INET, bind_addr.c_str(), &addr.sin_addr) != 1 ||
        ::bind(fd_, reinterpret_cast<sockaddr*>(&addr), sizeof(addr)) != 0 ||
        ::listen(fd_, 8) != 0) {
      ::close(fd_);
      throw Error(ErrorCode::kTransportError, "cannot listen on " + bind_addr + ":" +
                                                  std::to_string(port));
    }
    socklen_t len = sizeof(addr);
    ::getsockname(fd_, reinterpret_cast<sockaddr*>(&addr), &len);
    port_ = ntohs(addr.sin_port);
  }
  TcpListener(const TcpListener&) = delete;
  TcpListener& operator=(const TcpListener&) = delete;
  ~TcpListener() { ::close(fd_); }

  std::uint16_t port() const { return port_; }

  std::unique_ptr<FdTransport> accept() {
    const int c = ::accept4(fd_, nullptr, nullptr, SOCK_CLOEXEC);
    if (c < 0) throw Error(ErrorCode::kTransportError, "accept failed");
    return std::make_unique<FdTransport>(c, c, true);
  }

 private:
  int fd_ = -1;
  std::uint16_t port_ = 0;
};

/// `cmd:<command>` or `tcp://host:port`.
inline std::unique_ptr<Transport> open_transport(std::string_view uri) {
  if (uri.starts_with("cmd:")) {
    return std::make_unique<ChildProcessTransport>(std::string(uri.substr(4)));
  }
  if (uri.starts_with("tcp://")) {
    const auto rest = uri.substr(6);
    const auto colon = rest.rfind(':');
    if (colon == std::string_view::npos || colon == 0 || colon + 1 == rest.size()) {
      throw Error(ErrorCode::kUnknownSut, "expected tcp://host:port, got '" + std::string(uri) + "'");
    }
    return std::make_unique<TcpTransport>(std::string(rest.substr(0, colon)),
                                          std::string(rest.substr(colon + 1)));
  }
  throw Error(ErrorCode::kUnknownSut, "unknown predictor address '" + std::string(uri) + "'");
}

// ---------------------------------------------------------------------------
// Client
// ---------------------------------------------------------------------------

struct Capabilities {
  int protocol_version = kProtocolVersion;
  std::string name;
  bool deterministic_given_seed = false;
};

/// One connection to an external predictor. Calls are serialised, so at most
/// one request is in flight.
class Client {
 public:
  explicit Client(std::unique_ptr<Transport> transport,
                  std::chrono::milliseconds timeout = kDefaultTimeout)
      : transport_(std::move(transport)), timeout_(timeout) {}

  const Capabilities& handshake() {
    std::lock_guard lock(mu_);
    transport_->write_line(to_wire(encode_hello_client()));
    const auto reply = read_frame();
    const auto type = reply.value("type", "");
    if (type == "error") {
      throw Error(ErrorCode::kRemoteError, reply.value("message", "unspecified error"));
    }
    if (type != "hello" || !reply.contains("protocol_version")) {
      throw Error(ErrorCode::kMalformedResponse, "expected a hello frame");
    }
    try {
      caps_.protocol_version = reply.at("protocol_version").get<int>();
      if (caps_.protocol_version != kProtocolVersion) {
        throw Error(ErrorCode::kVersionMismatch,
                    "predictor speaks protocol version " + std::to_string(caps_.protocol_version) +
                        ", harness speaks " + std::to_string(kProtocolVersion));
      }
      caps_.name = reply.value("sut", std::string("remote"));
      caps_.deterministic_given_seed = reply.value("deterministic_given_seed", false);
    } catch (const json::exception& e) {
      throw Error(ErrorCode::kMalformedResponse, std::string("bad hello: ") + e.what());
    }
    handshaken_ = true;
    return caps_;
  }

  PredictionSet predict(const TestCase& tc, int k, std::uint64_t seed) {
    std::lock_guard lock(mu_);
    if (!handshaken_) throw Error(ErrorCode::kTransportError, "predict before handshake");
    const auto id = std::to_string(++next_id_);
    transport_->write_line(to_wire(encode_request(id, tc, k, seed)));
    const auto reply = read_frame();
    const auto type = reply.value("type", "");
    if (reply.value("id", "") != id) {
      throw Error(ErrorCode::kMalformedResponse, "reply id does not match request id " + id);
    }
    if (type == "error") {
      throw Error(ErrorCode::kRemoteError, reply.value("message", "unspecified error"));
    }
    if (type != "predict_response") {
      throw Error(ErrorCode::kMalformedResponse, "unexpected frame type '" + type + "'");
    }
    return decode_response(reply, k, tc.horizon);
  }

  const Capabilities& capabilities() const { return caps_; }

 private:
  json read_frame() {
    const auto line = transport_->read_line(timeout_);
    if (!line) throw Error(ErrorCode::kTransportError, "predictor closed the connection");
    try {
      auto j = json::parse(*line);
      if (!j.is_object()) throw Error(ErrorCode::kMalformedResponse, "frame is not an object");
      return j;
    } catch (const json::exception& e) {
      throw Error(ErrorCode::kMalformedResponse, std::string("unparseable frame: ") + e.what());
    }
  }

  std::mutex mu_;
  std::unique_ptr<Transport> transport_;
  std::chrono::milliseconds timeout_;
  Capabilities caps_;
  bool handshaken_ = false;
  std::uint64_t next_id_ = 0;
};

/// Connects, handshakes and wraps the connection as a SutHandle.
inline SutHandle make_remote_sut(std::string_view uri,
                                 std::chrono::milliseconds timeout = kDefaultTimeout) {
  auto client = std::make_shared<Client>(open_transport(uri), timeout);
  const auto caps = client->handshake();
  SutHandle h;
  h.name = caps.name;
  h.deterministic_given_seed = caps.deterministic_given_seed;
  h.concurrent_safe = false;
  h.invoke = [client](const TestCase& tc, int k, std::uint64_t seed) {
    return client->predict(tc, k, seed);
  };
  return h;
}

// ---------------------------------------------------------------------------
// Server
// ---------------------------------------------------------------------------

struct ServerInfo {
  std::string name = "echo";
  bool deterministic_given_seed = true;
};

using ServePredictor = std::function<PredictionSet(const TestCase&, int k, std::uint64_t seed)>;

/// Answers frames until the peer closes the stream. Bad requests and
/// predictor exceptions become error frames; serving continues.
inline void serve(Transport& transport, const ServePredictor& predictor, const ServerInfo& info) {
  while (auto line = transport.read_line(std::chrono::hours(24 * 365))) {
    if (line->empty()) continue;
    json frame;
    try {
      frame = json::parse(*line);
    } catch (const json::exception& e) {
      transport.write_line(to_wire(encode_error("", std::string("unparseable frame: ") + e.what())));
      continue;
    }
    const std::string id =
        frame.is_object() && frame.contains("id") && frame["id"].is_string() ? frame["id"].get<std::string>() : "";
    const std::string type =
        frame.is_object() && frame.contains("type") && frame["type"].is_string() ? frame["type"].get<std::string>() : "";
    if (type == "hello") {
      const auto version = frame.value("protocol_version", 0);
      if (version != kProtocolVersion) {
        transport.write_line(to_wire(encode_error(
            id, "unsupported protocol_version " + std::to_string(version))));
      } else {
        transport.write_line(to_wire(encode_hello_server(info.name, info.deterministic_given_seed)));
      }
    } else if (type == "predict_request") {
      try {
        const auto req = decode_request(frame);
        const auto preds = predictor(req.test_case, req.k, req.seed);
        if (preds.size() != static_cast<std::size_t>(req.k) ||
            preds.horizon() != static_cast<std::size_t>(req.test_case.horizon)) {
          throw Error(ErrorCode::kDimensionMismatch, "bad output shape");
        }
        transport.write_line(to_wire(encode_response(req.id, preds)));
      } catch (const std::exception& e) {
        transport.write_line(to_wire(encode_error(id, e.what())));
      }
    } else {
      transport.write_line(to_wire(encode_error(id, "unknown frame type '" + type + "'")));
    }
  }
}

// ---------------------------------------------------------------------------
// Conformance transcripts
// ---------------------------------------------------------------------------

/// A transcript alternates lines `> <frame>` (sent to the predictor) and
/// `< <frame>` (expected reply). Blank lines and lines starting with `#` are
/// ignored. In expected frames the string "<any>" matches any value.
struct TranscriptStep {
  bool send = true;
  json frame;
  std::string raw;  // the frame text exactly as written in the transcript
};

inline std::vector<TranscriptStep> parse_transcript(std::string_view text, const std::string& name) {
  std::vector<TranscriptStep> steps;
  std::size_t line_no = 0;
  while (!text.empty()) {
    auto nl = text.find('\n');
    auto line = text.substr(0, nl);
    text.remove_prefix(nl == std::string_view::npos ? text.size() : nl + 1);
    ++line_no;
    if (line.empty() || line.front() == '#') continue;
    if (line.size() < 2 || (line[0] != '>' && line[0] != '<') || line[1] != ' ') {
      throw Error(ErrorCode::kParseError,
                  name + ":" + std::to_string(line_no) + ": expected '> ' or '< ' prefix");
    }
    TranscriptStep step;
    step.send = line[0] == '>';
    step.raw = std::string(line.substr(2));
    try {
      step.frame = json::parse(step.raw);
    } catch (const json::exception& e) {
      throw Error(ErrorCode::kParseError, name + ":" + std::to_string(line_no) + ": " + e.what());
    }
    steps.push_back(std::move(step));
  }
  return steps;
}

/// Structural match; empty string on success, otherwise the first difference.
inline std::string match_frame(const json& expected, const json& actual, const std::string& path = "$") {
  if (expected.is_string() && expected.get<std::string>() == "<any>") return {};
  if (expected.is_number() && actual.is_number()) {
    return expected.get<double>() == actual.get<double>()
               ? std::string{}
               : path + ": expected " + expected.dump() + ", got " + actual.dump();
  }
  if (expected.type() != actual.type()) {
    return path + ": expected " + expected.dump() + ", got " + actual.dump();
  }
  if (expected.is_object()) {
    for (const auto& [key, val] : expected.items()) {
      if (!actual.contains(key)) return path + ": missing key '" + key + "'";
      if (auto d = match_frame(val, actual[key], path + "." + key); !d.empty()) return d;
    }
    for (const auto& [key, val] : actual.items()) {
      if (!expected.contains(key)) return path + ": unexpected key '" + key + "'";
    }
    return {};
  }
  if (expected.is_array()) {
    if (expected.size() != actual.size()) {
      return path + ": expected " + std::to_string(expected.size()) + " elements, got " +
             std::to_string(actual.size());
    }
    for (std::size_t i = 0; i < expected.size(); ++i) {
      if (auto d = match_frame(expected[i], actual[i], path + "[" + std::to_string(i) + "]");
          !d.empty()) {
        return d;
      }
    }
    return {};
  }
  return expected == actual ? std::string{}
                            : path + ": expected " + expected.dump() + ", got " + actual.dump();
}

struct ConformanceResult {
  bool passed = false;
  std::string message;
};

/// Replays one transcript against a fresh connection.
inline ConformanceResult run_transcript(Transport& transport,
                                        const std::vector<TranscriptStep>& steps,
                                        std::chrono::milliseconds timeout = kDefaultTimeout) {
  try {
    for (std::size_t i = 0; i < steps.size(); ++i) {
      const auto& step = steps[i];
      if (step.send) {
        transport.write_line(step.raw);
        continue;
      }
      const auto line = transport.read_line(timeout);
      if (!line) return {false, "step " + std::to_string(i) + ": connection closed"};
      json actual;
      try {
        actual = json::parse(*line);
      } catch (const json::exception& e) {
        return {false, "step " + std::to_string(i) + ": unparseable reply: " + e.what()};
      }
      if (auto diff = match_frame(step.frame, actual); !diff.empty()) {
        return {false, "step " + std::to_string(i) + ": " + diff};
      }
    }
  } catch (const Error& e) {
    return {false, e.what()};
  }
  return {true, "ok"};
}

}  // namespace mtraj::sutproto
