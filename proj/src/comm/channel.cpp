#include "mrl/comm/channel.hpp"

#include <arpa/inet.h>
#include <netinet/in.h>
#include <netinet/tcp.h>
#include <poll.h>
#include <sys/socket.h>
#include <unistd.h>

#include <cerrno>
#include <cstring>
#include <deque>

#include "mrl/errors.hpp"

namespace mrl::comm {

namespace {

struct InProcBuffers {
  std::string a_to_b;
  std::string b_to_a;
};

class InProcChannel : public ByteChannel {
 public:
  InProcChannel(std::shared_ptr<InProcBuffers> buf, bool is_a) : buf_(std::move(buf)), is_a_(is_a) {}

  void send(std::string_view bytes) override {
    (is_a_ ? buf_->a_to_b : buf_->b_to_a).append(bytes);
  }

  size_t poll_recv(std::string* out) override {
    std::string& in = is_a_ ? buf_->b_to_a : buf_->a_to_b;
    const size_t n = in.size();
    out->append(in);
    in.clear();
    return n;
  }

  // Single-threaded lockstep: waiting cannot produce new data.
  bool wait_recv(std::string* out, int) override { return poll_recv(out) > 0; }

  bool closed() const override { return false; }

 private:
  std::shared_ptr<InProcBuffers> buf_;
  bool is_a_;
};

void throw_errno(const std::string& what) {
  throw Error(what + ": " + std::strerror(errno));
}

}  // namespace

std::pair<std::unique_ptr<ByteChannel>, std::unique_ptr<ByteChannel>> make_inproc_pair() {
  auto buf = std::make_shared<InProcBuffers>();
  return {std::make_unique<InProcChannel>(buf, true),
          std::make_unique<InProcChannel>(buf, false)};
}

TcpChannel::TcpChannel(int fd) : fd_(fd) {
  int one = 1;
  ::setsockopt(fd_, IPPROTO_TCP, TCP_NODELAY, &one, sizeof(one));
}

TcpChannel::~TcpChannel() {
  if (fd_ >= 0) ::close(fd_);
}

void TcpChannel::send(std::string_view bytes) {
  size_t off = 0;
  while (off < bytes.size()) {
    const ssize_t n = ::send(fd_, bytes.data() + off, bytes.size() - off, MSG_NOSIGNAL);
    if (n < 0) {
      if (errno == EINTR) continue;
      closed_ = true;
      throw_errno("tcp send");
    }
    off += static_cast<size_t>(n);
  }
}

size_t TcpChannel::poll_recv(std::string* out) {
  size_t total = 0;
  char buf[4096];
  while (true) {
    struct pollfd pfd{fd_, POLLIN, 0};
    const int pr = ::poll(&pfd, 1, 0);
    if (pr <= 0) break;
    const ssize_t n = ::recv(fd_, buf, sizeof(buf), 0);
    if (n > 0) {
      out->append(buf, static_cast<size_t>(n));
      total += static_cast<size_t>(n);
    } else if (n == 0) {
      closed_ = true;
      break;
    } else {
      if (errno == EINTR) continue;
      if (errno == EAGAIN || errno == EWOULDBLOCK) break;
      closed_ = true;
      break;
    }
  }
  return total;
}

bool TcpChannel::wait_recv(std::string* out, int timeout_ms) {
  struct pollfd pfd{fd_, POLLIN, 0};
  const int pr = ::poll(&pfd, 1, timeout_ms);
  if (pr <= 0) return false;
  return poll_recv(out) > 0;
}

TcpListener::TcpListener() {
  fd_ = ::socket(AF_INET, SOCK_STREAM, 0);
  if (fd_ < 0) throw_errno("socket");
  int one = 1;
  ::setsockopt(fd_, SOL_SOCKET, SO_REUSEADDR, &one, sizeof(one));
  sockaddr_in addr{};
  addr.sin_family = AF_INET;
  addr.sin_addr.s_addr = htonl(INADDR_LOOPBACK);
  addr.sin_port = 0;
  if (::bind(fd_, reinterpret_cast<sockaddr*>(&addr), sizeof(addr)) < 0)
    throw_errno("bind");
  if (::listen(fd_, 16) < 0) throw_errno("listen");
  socklen_t len = sizeof(addr);
  if (::getsockname(fd_, reinterpret_cast<sockaddr*>(&addr), &len) < 0)
    throw_errno("getsockname");
  port_ = ntohs(addr.sin_port);
}

TcpListener::~TcpListener() {
  if (fd_ >= 0) ::close(fd_);
}

std::unique_ptr<TcpChannel> TcpListener::accept(int timeout_ms) {
  struct pollfd pfd{fd_, POLLIN, 0};
  const int pr = ::poll(&pfd, 1, timeout_ms);
  if (pr <= 0) return nullptr;
  const int fd = ::accept(fd_, nullptr, nullptr);
  if (fd < 0) return nullptr;
  return std::make_unique<TcpChannel>(fd);
}

void wait_any(ByteChannel* a, ByteChannel* b, int timeout_ms) {
  struct pollfd fds[2];
  int n = 0;
  if (auto* t = dynamic_cast<TcpChannel*>(a)) fds[n++] = {t->fd(), POLLIN, 0};
  if (auto* t = dynamic_cast<TcpChannel*>(b)) fds[n++] = {t->fd(), POLLIN, 0};
  if (n == 0) return;  // in-process: data is either there or will never come
  ::poll(fds, static_cast<nfds_t>(n), timeout_ms);
}

std::unique_ptr<TcpChannel> tcp_connect(const std::string& host, int port, int timeout_ms) {
  const int fd = ::socket(AF_INET, SOCK_STREAM, 0);
  if (fd < 0) throw_errno("socket");
  sockaddr_in addr{};
  addr.sin_family = AF_INET;
  addr.sin_port = htons(static_cast<uint16_t>(port));
  if (::inet_pton(AF_INET, host.c_str(), &addr.sin_addr) != 1) {
    ::close(fd);
    throw Error("tcp connect: bad host " + host);
  }
  // Bounded retries cover the race between spawning and the peer listening.
  const int attempts = std::max(1, timeout_ms / 50);
  for (int i = 0; i < attempts; ++i) {
    if (::connect(fd, reinterpret_cast<sockaddr*>(&addr), sizeof(addr)) == 0)
      return std::make_unique<TcpChannel>(fd);
    if (errno != ECONNREFUSED && errno != EINTR) break;
    ::usleep(50 * 1000);
  }
  ::close(fd);
  throw Error("tcp connect: cannot reach " + host + ":" + std::to_string(port));
}

}  // namespace mrl::comm
