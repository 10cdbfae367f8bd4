#include "spmd/transport/socket.hpp"

#include "spmd/errors.hpp"
#include "spmd/transport/frame.hpp"

#include <arpa/inet.h>
#include <netdb.h>
#include <netinet/in.h>
#include <netinet/tcp.h>
#include <sys/socket.h>
#include <sys/wait.h>
#include <unistd.h>

#include <array>
#include <cerrno>
#include <csignal>
#include <charconv>
#include <cstdio>
#include <cstring>
#include <exception>
#include <fstream>
#include <sstream>

namespace spmd {

namespace {

std::string errno_text(const char* what) { return std::string(what) + ": " + std::strerror(errno); }

sockaddr_in resolve(const PeerAddress& peer)
{
    addrinfo hints{};
    hints.ai_family = AF_INET;
    hints.ai_socktype = SOCK_STREAM;
    addrinfo* found = nullptr;
    if (int rc = ::getaddrinfo(peer.host.c_str(), nullptr, &hints, &found); rc != 0) {
        throw TransportError("cannot resolve " + peer.host + ": " + ::gai_strerror(rc));
    }
    sockaddr_in addr{};
    std::memcpy(&addr, found->ai_addr, sizeof(addr));
    ::freeaddrinfo(found);
    addr.sin_port = htons(peer.port);
    return addr;
}

bool write_all(int fd, const std::byte* data, std::size_t size)
{
    while (size > 0) {
        const ssize_t n = ::send(fd, data, size, MSG_NOSIGNAL);
        if (n < 0) {
            if (errno == EINTR) {
                continue;
            }
            return false;
        }
        data += n;
        size -= static_cast<std::size_t>(n);
    }
    return true;
}

// Returns the number of bytes read; less than `size` only at end of stream.
std::size_t read_all(int fd, std::byte* data, std::size_t size)
{
    std::size_t done = 0;
    while (done < size) {
        const ssize_t n = ::recv(fd, data + done, size - done, 0);
        if (n < 0) {
            if (errno == EINTR) {
                continue;
            }
            return done;
        }
        if (n == 0) {
            return done;
        }
        done += static_cast<std::size_t>(n);
    }
    return done;
}

void set_nodelay(int fd)
{
    int one = 1;
    ::setsockopt(fd, IPPROTO_TCP, TCP_NODELAY, &one, sizeof(one));
}

}  // namespace

std::vector<PeerAddress> parse_peers(std::string_view text)
{
    std::vector<PeerAddress> peers;
    std::vector<std::string> lines;
    std::istringstream in{std::string(text)};
    for (std::string line; std::getline(in, line);) {
        if (!line.empty() && line.back() == '\r') {
            line.pop_back();
        }
        lines.push_back(line);
    }
    while (!lines.empty() && lines.back().find_first_not_of(" \t") == std::string::npos) {
        lines.pop_back();
    }
    for (std::size_t i = 0; i < lines.size(); ++i) {
        const std::string& line = lines[i];
        const auto colon = line.rfind(':');
        if (colon == std::string::npos || colon == 0) {
            throw TopologyError("peers line " + std::to_string(i + 1) + ": expected host:port, got '" +
                                line + "'");
        }
        unsigned port = 0;
        const char* first = line.data() + colon + 1;
        const char* last = line.data() + line.size();
        auto [ptr, ec] = std::from_chars(first, last, port);
        if (ec != std::errc() || ptr != last || first == last || port == 0 || port > 65535) {
            throw TopologyError("peers line " + std::to_string(i + 1) + ": bad port in '" + line + "'");
        }
        peers.push_back({line.substr(0, colon), static_cast<std::uint16_t>(port)});
    }
    if (peers.empty()) {
        throw TopologyError("peers list is empty");
    }
    return peers;
}

std::vector<PeerAddress> read_peers_file(const std::filesystem::path& path)
{
    std::ifstream in(path);
    if (!in) {
        throw TopologyError("cannot open peers file " + path.string());
    }
    std::ostringstream text;
    text << in.rdbuf();
    return parse_peers(text.str());
}

SocketEndpoint::SocketEndpoint(RankId rank, std::vector<PeerAddress> peers,
                               std::chrono::milliseconds connect_timeout)
    : Endpoint(rank, static_cast<int>(peers.size())),
      peers_(std::move(peers)),
      inbox_(static_cast<int>(peers_.size()))
{
    const int p = size();
    const int me = static_cast<int>(rank.value);
    connections_.resize(static_cast<std::size_t>(p));

    listener_ = ::socket(AF_INET, SOCK_STREAM, 0);
    if (listener_ < 0) {
        throw TransportError(errno_text("socket"));
    }
    int one = 1;
    ::setsockopt(listener_, SOL_SOCKET, SO_REUSEADDR, &one, sizeof(one));
    const sockaddr_in self = resolve(peers_[static_cast<std::size_t>(me)]);
    if (::bind(listener_, reinterpret_cast<const sockaddr*>(&self), sizeof(self)) < 0 ||
        ::listen(listener_, SOMAXCONN) < 0) {
        const std::string msg = errno_text("bind/listen");
        ::close(listener_);
        throw TransportError(msg + " on " + peers_[static_cast<std::size_t>(me)].host + ":" +
                             std::to_string(peers_[static_cast<std::size_t>(me)].port));
    }

    auto fail = [this](const std::string& msg) {
        for (auto& c : connections_) {
            if (c && c->fd >= 0) {
                ::close(c->fd);
            }
        }
        ::close(listener_);
        throw TransportError(msg);
    };

    // Connect downwards; the listen backlog completes these before the peer accepts.
    const auto deadline = std::chrono::steady_clock::now() + connect_timeout;
    for (int peer = 0; peer < me; ++peer) {
        const sockaddr_in addr = resolve(peers_[static_cast<std::size_t>(peer)]);
        int fd = -1;
        for (;;) {
            fd = ::socket(AF_INET, SOCK_STREAM, 0);
            if (fd < 0) {
                fail(errno_text("socket"));
            }
            if (::connect(fd, reinterpret_cast<const sockaddr*>(&addr), sizeof(addr)) == 0) {
                break;
            }
            ::close(fd);
            if (std::chrono::steady_clock::now() > deadline) {
                fail("timed out connecting to rank " + std::to_string(peer));
            }
            std::this_thread::sleep_for(std::chrono::milliseconds(20));
        }
        set_nodelay(fd);
        const auto hello = encode_header({0, 0, static_cast<std::uint32_t>(me)});
        if (!write_all(fd, hello.data(), hello.size())) {
            ::close(fd);
            fail(errno_text("handshake"));
        }
        connections_[static_cast<std::size_t>(peer)] = std::make_unique<Connection>();
        connections_[static_cast<std::size_t>(peer)]->fd = fd;
    }
    for (int accepted = 0; accepted < p - 1 - me; ++accepted) {
        const int fd = ::accept(listener_, nullptr, nullptr);
        if (fd < 0) {
            fail(errno_text("accept"));
        }
        std::array<std::byte, FrameHeader::kSize> hello{};
        if (read_all(fd, hello.data(), hello.size()) != hello.size()) {
            ::close(fd);
            fail("handshake truncated");
        }
        const auto peer = static_cast<int>(decode_header(hello).source);
        if (peer <= me || peer >= p || connections_[static_cast<std::size_t>(peer)]) {
            ::close(fd);
            fail("unexpected handshake from rank " + std::to_string(peer));
        }
        set_nodelay(fd);
        connections_[static_cast<std::size_t>(peer)] = std::make_unique<Connection>();
        connections_[static_cast<std::size_t>(peer)]->fd = fd;
    }
    for (int peer = 0; peer < p; ++peer) {
        if (peer != me) {
            connections_[static_cast<std::size_t>(peer)]->reader =
                std::thread([this, peer] { read_loop(peer); });
        }
    }
}

SocketEndpoint::~SocketEndpoint()
{
    for (auto& c : connections_) {
        if (c) {
            ::shutdown(c->fd, SHUT_WR);
        }
    }
    for (auto& c : connections_) {
        if (c) {
            if (c->reader.joinable()) {
                c->reader.join();
            }
            ::close(c->fd);
        }
    }
    inbox_.close();
    ::close(listener_);
}

void SocketEndpoint::read_loop(int peer)
{
    const int fd = connections_[static_cast<std::size_t>(peer)]->fd;
    for (;;) {
        std::array<std::byte, FrameHeader::kSize> raw{};
        if (read_all(fd, raw.data(), raw.size()) != raw.size()) {
            break;
        }
        const FrameHeader header = decode_header(raw);
        if (header.source != static_cast<std::uint32_t>(peer)) {
            break;
        }
        Bytes payload(header.length);
        if (read_all(fd, payload.data(), payload.size()) != payload.size()) {
            break;
        }
        inbox_.push(peer, header.tag, std::move(payload));
    }
    inbox_.close_source(peer);
}

void SocketEndpoint::deliver(int dest, Tag tag, std::span<const std::byte> payload)
{
    if (payload.size() > 0xffffffffu) {
        throw TransportError("payload exceeds 4 GiB frame limit");
    }
    Connection& c = *connections_[static_cast<std::size_t>(dest)];
    const auto header = encode_header(
        {static_cast<std::uint32_t>(payload.size()), tag, static_cast<std::uint32_t>(rank().value)});
    std::lock_guard lock(c.write_mutex);
    if (!write_all(c.fd, header.data(), header.size()) ||
        !write_all(c.fd, payload.data(), payload.size())) {
        throw TransportError(errno_text(("send to rank " + std::to_string(dest)).c_str()));
    }
}

std::vector<PeerAddress> local_peers(int count)
{
    std::vector<int> fds;
    std::vector<PeerAddress> peers;
    for (int i = 0; i < count; ++i) {
        const int fd = ::socket(AF_INET, SOCK_STREAM, 0);
        if (fd < 0) {
            throw TransportError(errno_text("socket"));
        }
        fds.push_back(fd);
        sockaddr_in addr{};
        addr.sin_family = AF_INET;
        addr.sin_addr.s_addr = htonl(INADDR_LOOPBACK);
        addr.sin_port = 0;
        socklen_t len = sizeof(addr);
        if (::bind(fd, reinterpret_cast<sockaddr*>(&addr), sizeof(addr)) < 0 ||
            ::getsockname(fd, reinterpret_cast<sockaddr*>(&addr), &len) < 0) {
            for (int f : fds) {
                ::close(f);
            }
            throw TransportError(errno_text("reserve port"));
        }
        peers.push_back({"127.0.0.1", ntohs(addr.sin_port)});
    }
    for (int f : fds) {
        ::close(f);
    }
    return peers;
}

std::vector<int> launch_local(int size, const std::function<int(Endpoint&)>& program)
{
    const std::vector<PeerAddress> peers = local_peers(size);
    std::fflush(nullptr);
    std::vector<pid_t> children;
    for (int r = 0; r < size; ++r) {
        const pid_t pid = ::fork();
        if (pid < 0) {
            for (pid_t c : children) {
                ::kill(c, SIGKILL);
                ::waitpid(c, nullptr, 0);
            }
            throw TransportError(errno_text("fork"));
        }
        if (pid == 0) {
            int code = 1;
            try {
                SocketEndpoint ep(RankId(static_cast<std::uint32_t>(r)), peers);
                code = program(ep);
            } catch (const std::exception& e) {
                std::fprintf(stderr, "rank %d: %s\n", r, e.what());
            } catch (...) {
                std::fprintf(stderr, "rank %d: unknown failure\n", r);
            }
            std::fflush(nullptr);
            ::_exit(code);
        }
        children.push_back(pid);
    }
    std::vector<int> codes;
    for (pid_t c : children) {
        int status = 0;
        ::waitpid(c, &status, 0);
        codes.push_back(WIFEXITED(status) ? WEXITSTATUS(status) : 128 + WTERMSIG(status));
    }
    return codes;
}

}  // namespace spmd
