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

#include "transport.hpp"

#include <arpa/inet.h>
#include <netdb.h>
#include <netinet/in.h>
#include <netinet/tcp.h>
#include <sys/socket.h>
#include <unistd.h>

#include <cerrno>
#include <cstring>

#include "error.hpp"

namespace vbqc::wire {

namespace {

[[noreturn]] void sys_fail(const std::string &what) {
    fail(ErrorCode::session, what + ": " + std::strerror(errno));
}

bool is_final(const Message &m) { return std::holds_alternative<Ok>(m) || std::holds_alternative<Abort>(m); }

}  // namespace

void InProcessTransport::send(const Message &message) {
    scratch_.clear();
    encode_into(message, scratch_);
    if (log_) log_->record(Direction::client_to_server, scratch_);
    const auto reply = server_.handle(decode(scratch_));
    if (!reply) return;
    scratch_.clear();
    encode_into(*reply, scratch_);
    if (log_) log_->record(Direction::server_to_client, scratch_);
    inbox_.push_back(decode(scratch_));
}

Message InProcessTransport::receive() {
    if (inbox_.empty()) fail(ErrorCode::session, "no server message pending");
    Message m = std::move(inbox_.front());
    inbox_.pop_front();
    return m;
}

Socket &Socket::operator=(Socket &&other) noexcept {
    if (this != &other) {
        if (fd_ >= 0) ::close(fd_);
        fd_ = other.release();
    }
    return *this;
}

Socket::~Socket() {
    if (fd_ >= 0) ::close(fd_);
}

void Socket::write_frame(const Bytes &frame) {
    std::size_t done = 0;
    while (done < frame.size()) {
        const ssize_t k = ::send(fd_, frame.data() + done, frame.size() - done, MSG_NOSIGNAL);
        if (k < 0) {
            if (errno == EINTR) continue;
            sys_fail("send");
        }
        done += static_cast<std::size_t>(k);
    }
}

std::optional<Bytes> Socket::read_frame() {
    auto read_exact = [&](std::uint8_t *dst, std::size_t len, bool allow_eof) -> bool {
        std::size_t done = 0;
        while (done < len) {
            const ssize_t k = ::recv(fd_, dst + done, len - done, 0);
            if (k < 0) {
                if (errno == EINTR) continue;
                sys_fail("recv");
            }
            if (k == 0) {
                if (allow_eof && done == 0) return false;
                fail(ErrorCode::framing, "connection closed mid-frame");
            }
            done += static_cast<std::size_t>(k);
        }
        return true;
    };
    Bytes frame(4);
    if (!read_exact(frame.data(), 4, true)) return std::nullopt;
    const std::size_t total = frame_size(frame);
    if (total > 64) fail(ErrorCode::framing, "frame length " + std::to_string(total - 4) + " is implausible");
    frame.resize(total);
    read_exact(frame.data() + 4, total - 4, false);
    return frame;
}

std::unique_ptr<TcpTransport> TcpTransport::connect(const std::string &host, std::uint16_t port, WireLog *log) {
    addrinfo hints{};
    hints.ai_family = AF_INET;
    hints.ai_socktype = SOCK_STREAM;
    addrinfo *res = nullptr;
    if (int rc = ::getaddrinfo(host.c_str(), std::to_string(port).c_str(), &hints, &res); rc != 0) {
        fail(ErrorCode::session, "resolve " + host + ": " + ::gai_strerror(rc));
    }
    Socket s(::socket(res->ai_family, res->ai_socktype, res->ai_protocol));
    if (!s.valid()) {
        ::freeaddrinfo(res);
        sys_fail("socket");
    }
    const int rc = ::connect(s.fd(), res->ai_addr, res->ai_addrlen);
    ::freeaddrinfo(res);
    if (rc != 0) sys_fail("connect " + host + ":" + std::to_string(port));
    int one = 1;
    ::setsockopt(s.fd(), IPPROTO_TCP, TCP_NODELAY, &one, sizeof one);
    return std::unique_ptr<TcpTransport>(new TcpTransport(std::move(s), log));
}

void TcpTransport::send(const Message &message) {
    const Bytes frame = encode(message);
    if (log_) log_->record(Direction::client_to_server, frame);
    socket_.write_frame(frame);
}

Message TcpTransport::receive() {
    auto frame = socket_.read_frame();
    if (!frame) fail(ErrorCode::session, "server closed the connection");
    if (log_) log_->record(Direction::server_to_client, *frame);
    return decode(*frame);
}

TcpListener::TcpListener(std::uint16_t port) : socket_(::socket(AF_INET, SOCK_STREAM, 0)) {
    if (!socket_.valid()) sys_fail("socket");
    int one = 1;
    ::setsockopt(socket_.fd(), SOL_SOCKET, SO_REUSEADDR, &one, sizeof one);
    sockaddr_in addr{};
    addr.sin_family = AF_INET;
    addr.sin_addr.s_addr = htonl(INADDR_LOOPBACK);
    addr.sin_port = htons(port);
    if (::bind(socket_.fd(), reinterpret_cast<sockaddr *>(&addr), sizeof addr) != 0) {
        sys_fail("bind port " + std::to_string(port));
    }
    if (::listen(socket_.fd(), 16) != 0) sys_fail("listen");
    socklen_t len = sizeof addr;
    ::getsockname(socket_.fd(), reinterpret_cast<sockaddr *>(&addr), &len);
    port_ = ntohs(addr.sin_port);
}

Socket TcpListener::accept() {
    for (;;) {
        const int fd = ::accept(socket_.fd(), nullptr, nullptr);
        if (fd >= 0) {
            int one = 1;
            ::setsockopt(fd, IPPROTO_TCP, TCP_NODELAY, &one, sizeof one);
            return Socket(fd);
        }
        if (errno != EINTR) sys_fail("accept");
    }
}

void serve(Socket &connection, Endpoint &server, WireLog *log) {
    while (auto frame = connection.read_frame()) {
        if (log) log->record(Direction::client_to_server, *frame);
        const Message m = decode(*frame);
        if (auto reply = server.handle(m)) {
            const Bytes out = encode(*reply);
            if (log) log->record(Direction::server_to_client, out);
            connection.write_frame(out);
        }
        if (is_final(m)) return;
    }
}

std::pair<std::string, std::uint16_t> parse_address(const std::string &address) {
    std::string host = "127.0.0.1";
    std::string port = address;
    if (auto colon = address.rfind(':'); colon != std::string::npos) {
        host = address.substr(0, colon);
        port = address.substr(colon + 1);
    }
    try {
        std::size_t used = 0;
        const unsigned long p = std::stoul(port, &used);
        if (used != port.size() || p > 65535) throw std::out_of_range(port);
        return {host, static_cast<std::uint16_t>(p)};
    } catch (const std::logic_error &) {
        fail(ErrorCode::input, "bad address '" + address + "' (expected host:port)");
    }
}

}  // namespace vbqc::wire
