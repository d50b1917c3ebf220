#pragma once

// Socket runners for the broker, agents and analyzers: newline-delimited
// records over TCP, POSIX sockets, one reader and one writer thread per broker
// connection.

#include <fcntl.h>
#include <netdb.h>
#include <netinet/in.h>
#include <netinet/tcp.h>
#include <poll.h>
#include <sys/socket.h>
#include <sys/stat.h>
#include <sys/types.h>
#include <unistd.h>

#include <algorithm>
#include <atomic>
#include <cerrno>
#include <charconv>
#include <chrono>
#include <condition_variable>
#include <cstring>
#include <deque>
#include <functional>
#include <list>
#include <memory>
#include <mutex>
#include <stop_token>
#include <string>
#include <string_view>
#include <thread>
#include <utility>

#include <spdlog/spdlog.h>

#include "sqlion/collab/agent.hpp"
#include "sqlion/collab/analyzer.hpp"
#include "sqlion/collab/broker.hpp"
#include "sqlion/error.hpp"

namespace sqlion::net {

struct HostPort {
    std::string host;
    std::uint16_t port = 0;

    std::string to_string() const {
        return host.find(':') != std::string::npos ? "[" + host + "]:" + std::to_string(port)
                                                   : host + ":" + std::to_string(port);
    }
};

/// Parses `HOST:PORT` or `[v6-address]:PORT`.
inline HostPort parse_host_port(std::string_view s) {
    HostPort hp;
    std::string_view port;
    if (!s.empty() && s.front() == '[') {
        auto close = s.find(']');
        if (close == std::string_view::npos || close + 1 >= s.size() || s[close + 1] != ':')
            throw InvalidArgument("bad address '" + std::string(s) + "', expected [HOST]:PORT");
        hp.host = std::string(s.substr(1, close - 1));
        port = s.substr(close + 2);
    } else {
        auto colon = s.rfind(':');
        if (colon == std::string_view::npos || colon == 0)
            throw InvalidArgument("bad address '" + std::string(s) + "', expected HOST:PORT");
        hp.host = std::string(s.substr(0, colon));
        port = s.substr(colon + 1);
    }
    unsigned value = 0;
    auto [ptr, ec] = std::from_chars(port.data(), port.data() + port.size(), value);
    if (ec != std::errc{} || ptr != port.data() + port.size() || port.empty() || value > 65535)
        throw InvalidArgument("bad port in address '" + std::string(s) + "'");
    hp.port = static_cast<std::uint16_t>(value);
    return hp;
}

class Socket {
public:
    Socket() = default;
    explicit Socket(int fd) : fd_(fd) {}
    Socket(Socket&& o) noexcept : fd_(std::exchange(o.fd_, -1)) {}
    Socket& operator=(Socket&& o) noexcept {
        if (this != &o) {
            reset();
            fd_ = std::exchange(o.fd_, -1);
        }
        return *this;
    }
    Socket(const Socket&) = delete;
    Socket& operator=(const Socket&) = delete;
    ~Socket() { reset(); }

    int fd() const { return fd_; }
    bool valid() const { return fd_ >= 0; }

    void shutdown_both() const {
        if (fd_ >= 0) ::shutdown(fd_, SHUT_RDWR);
    }

    void reset() {
        if (fd_ >= 0) ::close(fd_);
        fd_ = -1;
    }

private:
    int fd_ = -1;
};

inline bool send_all(int fd, std::string_view data) {
    while (!data.empty()) {
        ssize_t n = ::send(fd, data.data(), data.size(), MSG_NOSIGNAL);
        if (n < 0) {
            if (errno == EINTR) continue;
            return false;
        }
        data.remove_prefix(static_cast<std::size_t>(n));
    }
    return true;
}

// Splits a byte stream into lines, refusing lines above the wire limit.
class LineReader {
public:
    enum class Status { line, timeout, closed, too_long };

    explicit LineReader(int fd, std::size_t max_line = wire::max_line_bytes) : fd_(fd), max_line_(max_line) {}

    Status read(std::string& line, int timeout_ms) {
        while (true) {
            auto nl = buffer_.find('\n');
            if (nl != std::string::npos) {
                if (nl > max_line_) return Status::too_long;
                line.assign(buffer_, 0, nl);
                if (!line.empty() && line.back() == '\r') line.pop_back();
                buffer_.erase(0, nl + 1);
                return Status::line;
            }
            if (buffer_.size() > max_line_) return Status::too_long;

            pollfd p{fd_, POLLIN, 0};
            int r = ::poll(&p, 1, timeout_ms);
            if (r < 0) {
                if (errno == EINTR) continue;
                return Status::closed;
            }
            if (r == 0) return Status::timeout;
            char chunk[8192];
            ssize_t n = ::recv(fd_, chunk, sizeof chunk, 0);
            if (n < 0 && errno == EINTR) continue;
            if (n <= 0) return Status::closed;
            buffer_.append(chunk, static_cast<std::size_t>(n));
        }
    }

private:
    int fd_;
    std::size_t max_line_;
    std::string buffer_;
};

namespace detail {

struct AddrInfo {
    addrinfo* head = nullptr;
    ~AddrInfo() {
        if (head) freeaddrinfo(head);
    }
};

inline AddrInfo resolve(const HostPort& hp, bool passive) {
    addrinfo hints{};
    hints.ai_family = AF_UNSPEC;
    hints.ai_socktype = SOCK_STREAM;
    if (passive) hints.ai_flags = AI_PASSIVE;
    AddrInfo out;
    std::string port = std::to_string(hp.port);
    int rc = getaddrinfo(hp.host.empty() ? nullptr : hp.host.c_str(), port.c_str(), &hints, &out.head);
    if (rc != 0) throw NetworkError("cannot resolve " + hp.to_string() + ": " + gai_strerror(rc));
    return out;
}

} // namespace detail

inline Socket listen_tcp(const HostPort& hp) {
    auto ai = detail::resolve(hp, true);
    std::string last_error = "no usable address";
    for (addrinfo* a = ai.head; a; a = a->ai_next) {
        Socket s(::socket(a->ai_family, a->ai_socktype | SOCK_CLOEXEC, a->ai_protocol));
        if (!s.valid()) {
            last_error = std::strerror(errno);
            continue;
        }
        int one = 1;
        ::setsockopt(s.fd(), SOL_SOCKET, SO_REUSEADDR, &one, sizeof one);
        if (::bind(s.fd(), a->ai_addr, a->ai_addrlen) == 0 && ::listen(s.fd(), 64) == 0) return s;
        last_error = std::strerror(errno);
    }
    throw NetworkError("cannot listen on " + hp.to_string() + ": " + last_error);
}

inline Socket connect_tcp(const HostPort& hp) {
    auto ai = detail::resolve(hp, false);
    std::string last_error = "no usable address";
    for (addrinfo* a = ai.head; a; a = a->ai_next) {
        Socket s(::socket(a->ai_family, a->ai_socktype | SOCK_CLOEXEC, a->ai_protocol));
        if (!s.valid()) {
            last_error = std::strerror(errno);
            continue;
        }
        if (::connect(s.fd(), a->ai_addr, a->ai_addrlen) == 0) {
            int one = 1;
            ::setsockopt(s.fd(), IPPROTO_TCP, TCP_NODELAY, &one, sizeof one);
            return s;
        }
        last_error = std::strerror(errno);
    }
    throw NetworkError("cannot connect to " + hp.to_string() + ": " + last_error);
}

inline std::uint16_t local_port(const Socket& s) {
    sockaddr_storage addr{};
    socklen_t len = sizeof addr;
    if (::getsockname(s.fd(), reinterpret_cast<sockaddr*>(&addr), &len) != 0) return 0;
    if (addr.ss_family == AF_INET) return ntohs(reinterpret_cast<sockaddr_in*>(&addr)->sin_port);
    if (addr.ss_family == AF_INET6) return ntohs(reinterpret_cast<sockaddr_in6*>(&addr)->sin6_port);
    return 0;
}

// Broker over TCP. start() binds (throwing NetworkError) and returns; the
// accept loop and connection threads run until stop().
class BrokerServer {
public:
    explicit BrokerServer(HostPort listen, Clock clock = wall_clock_seconds)
        : address_(std::move(listen)), broker_(std::move(clock)) {}
    ~BrokerServer() { stop(); }

    BrokerServer(const BrokerServer&) = delete;
    BrokerServer& operator=(const BrokerServer&) = delete;

    void start() {
        listener_ = listen_tcp(address_);
        port_ = local_port(listener_);
        acceptor_ = std::jthread([this](std::stop_token st) { accept_loop(st); });
        spdlog::info("broker listening on {}:{}", address_.host, port_);
    }

    void stop() {
        if (acceptor_.joinable()) {
            acceptor_.request_stop();
            acceptor_.join();
        }
        std::list<std::shared_ptr<Connection>> conns;
        {
            std::lock_guard lock(conns_mutex_);
            conns.swap(connections_);
        }
        for (auto& c : conns) c->close_and_join();
        listener_.reset();
    }

    std::uint16_t port() const { return port_; }
    Broker& broker() { return broker_; }

private:
    struct Connection {
        Socket sock;
        Broker::SessionId session = 0;
        std::mutex mutex;
        std::condition_variable cv;
        std::deque<std::string> outbox;
        bool closing = false;
        std::atomic<bool> finished{false};
        std::jthread reader;
        std::thread writer;

        void enqueue(const std::string& line) {
            {
                std::lock_guard lock(mutex);
                if (closing) return;
                outbox.push_back(line + "\n");
            }
            cv.notify_one();
        }

        void begin_close() {
            {
                std::lock_guard lock(mutex);
                closing = true;
            }
            cv.notify_one();
        }

        void close_and_join() {
            if (reader.joinable()) {
                reader.request_stop();
                reader.join();
            }
            begin_close();
            if (writer.joinable()) writer.join();
        }

        void write_loop() {
            std::unique_lock lock(mutex);
            while (true) {
                cv.wait(lock, [&] { return closing || !outbox.empty(); });
                while (!outbox.empty()) {
                    std::string line = std::move(outbox.front());
                    outbox.pop_front();
                    lock.unlock();
                    bool ok = send_all(sock.fd(), line);
                    lock.lock();
                    if (!ok) {
                        outbox.clear();
                        closing = true;
                    }
                }
                if (closing) break;
            }
            lock.unlock();
            sock.shutdown_both();
            finished = true;
        }
    };

    void accept_loop(std::stop_token st) {
        while (!st.stop_requested()) {
            pollfd p{listener_.fd(), POLLIN, 0};
            int r = ::poll(&p, 1, 100);
            reap();
            if (r <= 0) continue;
            int fd = ::accept4(listener_.fd(), nullptr, nullptr, SOCK_CLOEXEC);
            if (fd < 0) continue;
            auto conn = std::make_shared<Connection>();
            conn->sock = Socket(fd);
            int one = 1;
            ::setsockopt(fd, IPPROTO_TCP, TCP_NODELAY, &one, sizeof one);
            std::weak_ptr<Connection> weak = conn;
            conn->session = broker_.connect([weak](const std::string& line) {
                if (auto c = weak.lock()) c->enqueue(line);
            });
            conn->writer = std::thread([c = conn.get()] { c->write_loop(); });
            conn->reader = std::jthread([this, c = conn.get()](std::stop_token rst) { read_loop(*c, rst); });
            std::lock_guard lock(conns_mutex_);
            connections_.push_back(std::move(conn));
        }
    }

    void read_loop(Connection& c, std::stop_token st) {
        LineReader reader(c.sock.fd());
        std::string line;
        while (!st.stop_requested()) {
            auto status = reader.read(line, 100);
            if (status == LineReader::Status::timeout) continue;
            if (status == LineReader::Status::closed) break;
            if (status == LineReader::Status::too_long) {
                c.enqueue(wire::encode(wire::Error{std::string(wire::code::too_long), "record exceeds 64 KiB"}));
                break;
            }
            if (!broker_.receive(c.session, line)) break;
        }
        broker_.disconnect(c.session);
        c.begin_close();
    }

    void reap() {
        std::list<std::shared_ptr<Connection>> done;
        {
            std::lock_guard lock(conns_mutex_);
            for (auto it = connections_.begin(); it != connections_.end();) {
                if ((*it)->finished) {
                    done.push_back(std::move(*it));
                    it = connections_.erase(it);
                } else {
                    ++it;
                }
            }
        }
        for (auto& c : done) c->close_and_join();
    }

    HostPort address_;
    Broker broker_;
    Socket listener_;
    std::uint16_t port_ = 0;
    std::jthread acceptor_;
    std::mutex conns_mutex_;
    std::list<std::shared_ptr<Connection>> connections_;
};

struct Backoff {
    std::chrono::milliseconds initial{500};
    std::chrono::milliseconds cap{30'000};
};

// A node's connection to the broker: connects with bounded exponential
// backoff, says hello, then pumps records both ways until stopped. Reconnects
// after a drop. send() queues; the queue survives reconnects.
class NodeLink {
public:
    using Handler = std::function<void(const wire::Message&)>;

    NodeLink(HostPort broker, wire::Hello hello, Handler on_message, Backoff backoff = {},
             std::size_t max_pending = 10'000)
        : broker_(std::move(broker)), hello_(std::move(hello)), on_message_(std::move(on_message)),
          backoff_(backoff), max_pending_(max_pending) {}

    /// Queues a record; false when the pending queue is full and it was dropped.
    bool send(const wire::Message& msg) {
        std::lock_guard lock(mutex_);
        if (pending_.size() >= max_pending_) return false;
        pending_.push_back(wire::encode(msg) + "\n");
        return true;
    }

    bool connected() const { return connected_; }
    std::uint64_t connections() const { return connections_; }

    void run(std::stop_token st) {
        auto delay = backoff_.initial;
        while (!st.stop_requested()) {
            Socket sock;
            try {
                sock = connect_tcp(broker_);
            } catch (const NetworkError& e) {
                spdlog::warn("{}; retrying in {} ms", e.what(), delay.count());
                sleep_for(st, delay);
                delay = std::min(delay * 2, backoff_.cap);
                continue;
            }
            delay = backoff_.initial;
            ++connections_;
            connected_ = true;
            spdlog::info("{} '{}' connected to {}", to_string(hello_.role), hello_.name, broker_.to_string());
            pump(sock, st);
            connected_ = false;
            if (!st.stop_requested()) spdlog::warn("lost connection to {}", broker_.to_string());
        }
    }

private:
    void pump(Socket& sock, std::stop_token st) {
        if (!send_all(sock.fd(), wire::encode(hello_) + "\n")) return;
        LineReader reader(sock.fd());
        std::string line;
        while (!st.stop_requested()) {
            if (!flush(sock)) return;
            auto status = reader.read(line, 20);
            if (status == LineReader::Status::timeout) continue;
            if (status != LineReader::Status::line) return;
            auto msg = wire::decode(line);
            if (!msg) {
                spdlog::warn("ignoring malformed record from broker");
                continue;
            }
            if (const auto* err = std::get_if<wire::Error>(&*msg))
                spdlog::warn("broker error {}: {}", err->code, err->text);
            on_message_(*msg);
        }
    }

    bool flush(Socket& sock) {
        std::deque<std::string> out;
        {
            std::lock_guard lock(mutex_);
            out.swap(pending_);
        }
        while (!out.empty()) {
            if (!send_all(sock.fd(), out.front())) {
                // Put back what was not sent; the record in flight may be lost.
                std::lock_guard lock(mutex_);
                out.pop_front();
                pending_.insert(pending_.begin(), out.begin(), out.end());
                return false;
            }
            out.pop_front();
        }
        return true;
    }

    static void sleep_for(std::stop_token st, std::chrono::milliseconds d) {
        std::mutex m;
        std::condition_variable_any cv;
        std::unique_lock lock(m);
        cv.wait_for(lock, st, d, [] { return false; });
    }

    HostPort broker_;
    wire::Hello hello_;
    Handler on_message_;
    Backoff backoff_;
    std::size_t max_pending_;
    std::mutex mutex_;
    std::deque<std::string> pending_;
    std::atomic<bool> connected_{false};
    std::atomic<std::uint64_t> connections_{0};
};

// Follows a growing file line by line, like `tail -f` from the start of the
// file. Waits for the file to appear and restarts from the top when it is
// truncated.
class FileTailer {
public:
    explicit FileTailer(std::string path) : path_(std::move(path)) {}
    ~FileTailer() {
        if (fd_ >= 0) ::close(fd_);
    }
    FileTailer(const FileTailer&) = delete;
    FileTailer& operator=(const FileTailer&) = delete;

    /// Next complete line; false when none is available right now.
    bool next(std::string& line) {
        while (true) {
            auto nl = buffer_.find('\n');
            if (nl != std::string::npos) {
                line.assign(buffer_, 0, nl);
                buffer_.erase(0, nl + 1);
                return true;
            }
            if (fd_ < 0) {
                fd_ = ::open(path_.c_str(), O_RDONLY | O_CLOEXEC);
                if (fd_ < 0) return false;
                offset_ = 0;
            }
            struct stat st {};
            if (::fstat(fd_, &st) == 0 && st.st_size < offset_) {
                ::lseek(fd_, 0, SEEK_SET);
                offset_ = 0;
                buffer_.clear();
            }
            char chunk[8192];
            ssize_t n = ::read(fd_, chunk, sizeof chunk);
            if (n <= 0) return false;
            offset_ += n;
            buffer_.append(chunk, static_cast<std::size_t>(n));
        }
    }

private:
    std::string path_;
    int fd_ = -1;
    off_t offset_ = 0;
    std::string buffer_;
};

/// Runs an agent until `st` is stopped: tails `log_path`, reports each record
/// and applies blocks from the broker.
inline void run_agent(Agent& agent, const HostPort& broker, const std::string& log_path, std::stop_token st,
                      Backoff backoff = {}, std::chrono::milliseconds poll = std::chrono::milliseconds(200)) {
    NodeLink link(broker, agent.hello(), [&agent](const wire::Message& m) { agent.handle(m); }, backoff);
    std::jthread net([&link](std::stop_token s) { link.run(s); });
    std::stop_callback stop_net(st, [&net] { net.request_stop(); });

    FileTailer tail(log_path);
    std::string line;
    std::mutex m;
    std::condition_variable_any cv;
    while (!st.stop_requested()) {
        bool any = false;
        while (tail.next(line)) {
            any = true;
            if (auto q = agent.ingest_line(line)) {
                if (!link.send(*q)) spdlog::warn("pending queue full; dropped query {}", q->id);
            }
        }
        if (!any) {
            std::unique_lock lock(m);
            cv.wait_for(lock, st, poll, [] { return false; });
        }
    }
}

/// Runs an analyzer until `st` is stopped.
inline void run_analyzer(const Analyzer& analyzer, const HostPort& broker, std::stop_token st, Backoff backoff = {}) {
    NodeLink* self = nullptr;
    NodeLink link(
        broker, analyzer.hello(),
        [&analyzer, &self](const wire::Message& m) {
            if (const auto* q = std::get_if<wire::Query>(&m)) self->send(analyzer.classify(*q));
        },
        backoff);
    self = &link;
    link.run(st);
}

} // namespace sqlion::net
