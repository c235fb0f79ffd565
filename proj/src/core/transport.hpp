// Copyright 2026 The vbqc Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <cstdint>
#include <deque>
#include <memory>
#include <optional>
#include <string>

#include "params.hpp"
#include "wire.hpp"

namespace vbqc::wire {

/// Anything that answers client messages: the server endpoint, or a test double.
class Endpoint {
public:
    virtual ~Endpoint() = default;
    /// Handles one decoded client message; returns the reply, if any.
    virtual std::optional<Message> handle(const Message &message) = 0;
};

/// Client side of a session. Frames are strictly ordered; the client must
/// receive each reply before sending its next dependent message.
class Transport {
public:
    virtual ~Transport() = default;
    virtual void send(const Message &message) = 0;
    /// Next server message. Throws Error(session) if none can arrive.
    virtual Message receive() = 0;
};

/// Ordered queue pair over a local endpoint. Every message is encoded and
/// decoded, so the endpoint sees exactly what a socket peer would.
class InProcessTransport final : public Transport {
public:
    explicit InProcessTransport(Endpoint &server, WireLog *log = nullptr) : server_(server), log_(log) {}
    void send(const Message &message) override;
    Message receive() override;

private:
    Endpoint &server_;
    WireLog *log_;
    std::deque<Message> inbox_;
    Bytes scratch_;
};

enum class TransportKind : std::uint8_t { in_process, tcp };

struct SessionConfig {
    std::uint64_t session_id = 0;
    ProtocolParams params;
    std::string pattern_ref;
    TransportKind transport = TransportKind::in_process;
    std::string host = "127.0.0.1";
    std::uint16_t port = 0;
};

/// Owned socket; closes on destruction.
class Socket {
public:
    Socket() = default;
    explicit Socket(int fd) : fd_(fd) {}
    Socket(Socket &&other) noexcept : fd_(other.release()) {}
    Socket &operator=(Socket &&other) noexcept;
    ~Socket();

    int fd() const { return fd_; }
    bool valid() const { return fd_ >= 0; }
    int release() {
        int fd = fd_;
        fd_ = -1;
        return fd;
    }

    void write_frame(const Bytes &frame);
    /// Reads one complete frame; nullopt on a clean end of stream.
    std::optional<Bytes> read_frame();

private:
    int fd_ = -1;
};

/// TCP client end of one session.
class TcpTransport final : public Transport {
public:
    static std::unique_ptr<TcpTransport> connect(const std::string &host, std::uint16_t port,
                                                 WireLog *log = nullptr);
    void send(const Message &message) override;
    Message receive() override;

private:
    TcpTransport(Socket socket, WireLog *log) : socket_(std::move(socket)), log_(log) {}
    Socket socket_;
    WireLog *log_;
};

class TcpListener {
public:
    /// Binds 127.0.0.1:`port` (0 picks a free port).
    explicit TcpListener(std::uint16_t port);
    std::uint16_t port() const { return port_; }
    Socket accept();

private:
    Socket socket_;
    std::uint16_t port_ = 0;
};

/// Answers one connection until the client sends Ok or Abort or hangs up.
void serve(Socket &connection, Endpoint &server, WireLog *log = nullptr);

/// "host:port" or "port".
std::pair<std::string, std::uint16_t> parse_address(const std::string &address);

}  // namespace vbqc::wire
