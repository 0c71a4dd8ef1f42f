#pragma once

#include <fcntl.h>
#include <poll.h>
#include <signal.h>
#include <sys/socket.h>
#include <sys/types.h>
#include <sys/wait.h>
#include <unistd.h>

#include <cerrno>
#include <chrono>
#include <cstring>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "gtsel/error.hpp"
#include "gtsel/order.hpp"
#include "gtsel/protocol.hpp"

namespace gtsel {

namespace detail {

class UniqueFd {
 public:
  UniqueFd() = default;
  explicit UniqueFd(int fd) : fd_(fd) {}
  UniqueFd(UniqueFd&& other) noexcept : fd_(std::exchange(other.fd_, -1)) {}
  UniqueFd& operator=(UniqueFd&& other) noexcept {
    if (this != &other) {
      reset();
      fd_ = std::exchange(other.fd_, -1);
    }
    return *this;
  }
  UniqueFd(const UniqueFd&) = delete;
  UniqueFd& operator=(const UniqueFd&) = delete;
  ~UniqueFd() { reset(); }

  int get() const noexcept { return fd_; }
  explicit operator bool() const noexcept { return fd_ >= 0; }
  void reset() noexcept {
    if (fd_ >= 0) ::close(fd_);
    fd_ = -1;
  }

 private:
  int fd_ = -1;
};

inline std::string errno_text(int err) { return std::strerror(err); }

}  // namespace detail

// Group-test oracle answered by a child process over the line protocol in
// protocol.hpp. Exclusive use: one query in flight, so one instance per
// worker. Protocol violations raise; they never turn into a false answer.
class ExternalOracle {
 public:
  using Clock = std::chrono::steady_clock;

  ExternalOracle(std::vector<std::string> command, std::size_t n,
                 std::chrono::milliseconds timeout = std::chrono::seconds(30))
      : command_(std::move(command)), n_(n), timeout_(timeout) {
    if (command_.empty()) throw SpawnError("external oracle command is empty");
    if (n_ == 0) throw InvalidParameter("external oracle universe must be nonempty");
    spawn();
    const std::string reply = exchange(protocol::format_init(n_));
    if (reply != "OK") {
      if (reply.rfind("ERR", 0) == 0) throw InvalidParameter("external oracle rejected INIT: " + reply);
      throw MalformedReply("expected OK after INIT, got '" + reply + "'");
    }
  }

  ExternalOracle(ExternalOracle&& other) noexcept
      : command_(std::move(other.command_)),
        n_(other.n_),
        timeout_(other.timeout_),
        channel_(std::move(other.channel_)),
        child_(std::exchange(other.child_, -1)),
        pending_(std::move(other.pending_)),
        broken_(other.broken_) {}
  ExternalOracle& operator=(ExternalOracle&&) = delete;
  ExternalOracle(const ExternalOracle&) = delete;
  ExternalOracle& operator=(const ExternalOracle&) = delete;

  ~ExternalOracle() { shutdown(); }

  std::size_t size() const noexcept { return n_; }

  bool left_test(ElementId u, std::span<const ElementId> v) const {
    return ask(protocol::format_query(protocol::TestKind::Left, u, v));
  }
  bool right_test(ElementId u, std::span<const ElementId> v) const {
    return ask(protocol::format_query(protocol::TestKind::Right, u, v));
  }

 private:
  bool ask(const std::string& request) const {
    const std::string reply = exchange(request);
    if (reply == "Y") return true;
    if (reply == "N") return false;
    if (reply == "ERR" || reply.rfind("ERR ", 0) == 0) {
      throw InvalidParameter("external oracle rejected query: " + reply);
    }
    throw MalformedReply("unexpected reply '" + reply + "'");
  }

  void spawn() {
    int pair[2];
    if (::socketpair(AF_UNIX, SOCK_STREAM | SOCK_CLOEXEC, 0, pair) != 0) {
      throw SpawnError("socketpair failed: " + detail::errno_text(errno));
    }
    detail::UniqueFd ours(pair[0]);
    detail::UniqueFd theirs(pair[1]);

    int status_pipe[2];
    if (::pipe2(status_pipe, O_CLOEXEC) != 0) throw SpawnError("pipe failed: " + detail::errno_text(errno));
    detail::UniqueFd status_read(status_pipe[0]);
    detail::UniqueFd status_write(status_pipe[1]);

    std::vector<char*> argv;
    argv.reserve(command_.size() + 1);
    for (auto& arg : command_) argv.push_back(arg.data());
    argv.push_back(nullptr);

    const pid_t pid = ::fork();
    if (pid < 0) throw SpawnError("fork failed: " + detail::errno_text(errno));
    if (pid == 0) {
      // Child: only async-signal-safe calls from here on.
      if (::dup2(theirs.get(), STDIN_FILENO) < 0 || ::dup2(theirs.get(), STDOUT_FILENO) < 0) {
        const int err = errno;
        (void)!::write(status_write.get(), &err, sizeof err);
        ::_exit(127);
      }
      ::execvp(argv[0], argv.data());
      const int err = errno;
      (void)!::write(status_write.get(), &err, sizeof err);
      ::_exit(127);
    }

    child_ = pid;
    theirs.reset();
    status_write.reset();
    int child_errno = 0;
    ssize_t got;
    do {
      got = ::read(status_read.get(), &child_errno, sizeof child_errno);
    } while (got < 0 && errno == EINTR);
    if (got > 0) {
      reap(true);
      throw SpawnError("cannot execute '" + command_[0] + "': " + detail::errno_text(child_errno));
    }
    channel_ = std::move(ours);
  }

  // After any transport failure the stream may hold a stale reply, so the
  // oracle refuses further queries.
  std::string exchange(const std::string& request) const {
    if (!channel_ || broken_) throw OracleDisconnected("external oracle channel is unusable");
    try {
      send_all(request);
      return read_line();
    } catch (const OracleError&) {
      broken_ = true;
      throw;
    }
  }

  void send_all(std::string_view data) const {
    while (!data.empty()) {
      const ssize_t sent = ::send(channel_.get(), data.data(), data.size(), MSG_NOSIGNAL);
      if (sent < 0) {
        if (errno == EINTR) continue;
        if (errno == EPIPE || errno == ECONNRESET) throw OracleDisconnected("external oracle exited");
        throw OracleError("send to external oracle failed: " + detail::errno_text(errno));
      }
      data.remove_prefix(static_cast<std::size_t>(sent));
    }
  }

  std::string read_line() const {
    constexpr std::size_t kMaxLine = 1 << 16;
    const auto deadline = Clock::now() + timeout_;
    for (;;) {
      if (const auto nl = pending_.find('\n'); nl != std::string::npos) {
        std::string line = pending_.substr(0, nl);
        pending_.erase(0, nl + 1);
        if (!line.empty() && line.back() == '\r') line.pop_back();
        return line;
      }
      if (pending_.size() > kMaxLine) throw MalformedReply("reply line exceeds 64 KiB");
      const auto left = std::chrono::duration_cast<std::chrono::milliseconds>(deadline - Clock::now());
      if (left.count() <= 0) throw OracleTimeout("external oracle did not reply within " +
                                                 std::to_string(timeout_.count()) + " ms");
      pollfd pfd{channel_.get(), POLLIN, 0};
      const int ready = ::poll(&pfd, 1, static_cast<int>(left.count()));
      if (ready < 0) {
        if (errno == EINTR) continue;
        throw OracleError("poll on external oracle failed: " + detail::errno_text(errno));
      }
      if (ready == 0) continue;
      char buf[4096];
      const ssize_t got = ::recv(channel_.get(), buf, sizeof buf, 0);
      if (got < 0) {
        if (errno == EINTR || errno == EAGAIN) continue;
        if (errno == ECONNRESET) throw OracleDisconnected("external oracle exited");
        throw OracleError("recv from external oracle failed: " + detail::errno_text(errno));
      }
      if (got == 0) throw OracleDisconnected("external oracle closed its output mid-reply");
      pending_.append(buf, static_cast<std::size_t>(got));
    }
  }

  void reap(bool force) noexcept {
    if (child_ <= 0) return;
    if (force) ::kill(child_, SIGKILL);
    int status = 0;
    while (::waitpid(child_, &status, 0) < 0 && errno == EINTR) {
    }
    child_ = -1;
  }

  void shutdown() noexcept {
    if (channel_) {
      ::shutdown(channel_.get(), SHUT_WR);
      channel_.reset();
    }
    if (child_ <= 0) return;
    // Give a well-behaved server a moment to exit on EOF.
    for (int i = 0; i < 50; ++i) {
      int status = 0;
      const pid_t r = ::waitpid(child_, &status, WNOHANG);
      if (r == child_ || (r < 0 && errno != EINTR)) {
        child_ = -1;
        return;
      }
      ::usleep(2000);
    }
    reap(true);
  }

  std::vector<std::string> command_;
  std::size_t n_;
  std::chrono::milliseconds timeout_;
  detail::UniqueFd channel_;
  pid_t child_ = -1;
  mutable std::string pending_;
  mutable bool broken_ = false;
};

// "a b  c" -> {"a", "b", "c"}
inline std::vector<std::string> split_command(std::string_view command) {
  std::vector<std::string> out;
  for (auto word : protocol::split_words(command)) out.emplace_back(word);
  return out;
}

}  // namespace gtsel
