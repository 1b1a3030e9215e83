#pragma once

#include <memory>
#include <string>
#include <string_view>
#include <utility>

namespace mrl::comm {

// Duplex byte stream. In-process pairs back the single-threaded lockstep
// deployment; TCP channels back out-of-process endpoints.
class ByteChannel {
 public:
  virtual ~ByteChannel() = default;
  virtual void send(std::string_view bytes) = 0;
  // Appends whatever is available right now; returns bytes appended.
  virtual size_t poll_recv(std::string* out) = 0;
  // Blocks up to timeout_ms for data; false on timeout or closed peer with
  // nothing read.
  virtual bool wait_recv(std::string* out, int timeout_ms) = 0;
  virtual bool closed() const = 0;
};

// Paired in-memory channels: what one side sends, the other receives.
std::pair<std::unique_ptr<ByteChannel>, std::unique_ptr<ByteChannel>> make_inproc_pair();

class TcpChannel : public ByteChannel {
 public:
  explicit TcpChannel(int fd);
  ~TcpChannel() override;
  TcpChannel(const TcpChannel&) = delete;
  TcpChannel& operator=(const TcpChannel&) = delete;

  void send(std::string_view bytes) override;
  size_t poll_recv(std::string* out) override;
  bool wait_recv(std::string* out, int timeout_ms) override;
  bool closed() const override { return closed_; }

  int fd() const { return fd_; }

 private:
  int fd_ = -1;
  bool closed_ = false;
};

class TcpListener {
 public:
  TcpListener();  // binds 127.0.0.1 on an ephemeral port
  ~TcpListener();
  TcpListener(const TcpListener&) = delete;
  TcpListener& operator=(const TcpListener&) = delete;

  int port() const { return port_; }
  // nullptr on timeout.
  std::unique_ptr<TcpChannel> accept(int timeout_ms);

 private:
  int fd_ = -1;
  int port_ = 0;
};

std::unique_ptr<TcpChannel> tcp_connect(const std::string& host, int port, int timeout_ms);

// Blocks until either channel is readable or the timeout passes; returns
// immediately for in-process channels.
void wait_any(ByteChannel* a, ByteChannel* b, int timeout_ms);

}  // namespace mrl::comm
