#include "limase/external.hpp"

#include <fcntl.h>
#include <poll.h>
#include <signal.h>
#include <sys/wait.h>
#include <unistd.h>

#include <cerrno>
#include <cstring>
#include <vector>

#include <json.hpp>

#include "limase/random.hpp"

namespace limase {

namespace {

using Clock = std::chrono::steady_clock;
using Json = nlohmann::json;

std::string snippet(const std::string& line) {
  return line.size() > 200 ? line.substr(0, 200) + "..." : line;
}

int remaining_ms(Clock::time_point deadline) {
  const auto left =
      std::chrono::duration_cast<std::chrono::milliseconds>(deadline - Clock::now()).count();
  return left <= 0 ? 0 : static_cast<int>(std::min<long long>(left, 1 << 30));
}

void set_nonblocking(int fd) {
  const int flags = fcntl(fd, F_GETFL, 0);
  fcntl(fd, F_SETFL, flags | O_NONBLOCK);
}

bool take_line(std::string& inbox, std::string& line) {
  const auto pos = inbox.find('\n');
  if (pos == std::string::npos) return false;
  line = inbox.substr(0, pos);
  inbox.erase(0, pos + 1);
  if (!line.empty() && line.back() == '\r') line.pop_back();
  return true;
}

// Reads whatever is available; returns false on EOF.
bool drain(int fd, std::string& inbox) {
  char buf[65536];
  for (;;) {
    const ssize_t got = ::read(fd, buf, sizeof(buf));
    if (got > 0) {
      inbox.append(buf, static_cast<std::size_t>(got));
      continue;
    }
    if (got == 0) return false;
    if (errno == EINTR) continue;
    if (errno == EAGAIN || errno == EWOULDBLOCK) return true;
    throw ProtocolError(std::string("reading from external model failed: ") +
                        std::strerror(errno));
  }
}

}  // namespace

ExternalModel::ExternalModel(std::string command, std::size_t num_features, Task task,
                             ExternalOptions options)
    : command_(std::move(command)),
      num_features_(num_features),
      task_(task),
      options_(options) {}

ExternalModel::~ExternalModel() { shutdown(); }

void ExternalModel::shutdown() noexcept {
  if (to_child_ >= 0) ::close(to_child_);
  if (from_child_ >= 0) ::close(from_child_);
  to_child_ = from_child_ = -1;
  if (pid_ <= 0) return;
  int status = 0;
  for (int i = 0; i < 100; ++i) {
    if (::waitpid(pid_, &status, WNOHANG) == pid_) {
      pid_ = -1;
      return;
    }
    ::usleep(10000);
  }
  if (::kill(-pid_, SIGKILL) != 0) ::kill(pid_, SIGKILL);
  ::waitpid(pid_, &status, 0);
  pid_ = -1;
}

void ExternalModel::spawn() {
  // A child that dies mid-write must surface as an error, not kill us.
  ::signal(SIGPIPE, SIG_IGN);
  int in_pipe[2];
  int out_pipe[2];
  int err_pipe[2];
  if (::pipe(in_pipe) != 0 || ::pipe(out_pipe) != 0 || ::pipe2(err_pipe, O_CLOEXEC) != 0) {
    throw SpawnError(std::string("pipe() failed: ") + std::strerror(errno));
  }
  const pid_t pid = ::fork();
  if (pid < 0) throw SpawnError(std::string("fork() failed: ") + std::strerror(errno));
  if (pid == 0) {
    // Own process group, so shutdown also reaches whatever the shell starts.
    ::setpgid(0, 0);
    ::dup2(in_pipe[0], STDIN_FILENO);
    ::dup2(out_pipe[1], STDOUT_FILENO);
    ::close(in_pipe[0]);
    ::close(in_pipe[1]);
    ::close(out_pipe[0]);
    ::close(out_pipe[1]);
    ::close(err_pipe[0]);
    ::execl("/bin/sh", "sh", "-c", command_.c_str(), static_cast<char*>(nullptr));
    const int code = errno;
    [[maybe_unused]] auto n = ::write(err_pipe[1], &code, sizeof(code));
    ::_exit(127);
  }
  ::setpgid(pid, pid);
  ::close(in_pipe[0]);
  ::close(out_pipe[1]);
  ::close(err_pipe[1]);
  pid_ = pid;
  to_child_ = in_pipe[1];
  from_child_ = out_pipe[0];
  ::fcntl(to_child_, F_SETFD, FD_CLOEXEC);
  ::fcntl(from_child_, F_SETFD, FD_CLOEXEC);
  int code = 0;
  const auto got = ::read(err_pipe[0], &code, sizeof(code));
  ::close(err_pipe[0]);
  if (got == static_cast<ssize_t>(sizeof(code))) {
    throw SpawnError("cannot run /bin/sh for '" + command_ + "': " + std::strerror(code));
  }
  set_nonblocking(to_child_);
  set_nonblocking(from_child_);
}

std::string ExternalModel::read_line(Clock::time_point deadline) const {
  std::string line;
  while (!take_line(inbox_, line)) {
    pollfd pfd{from_child_, POLLIN, 0};
    const int ready = ::poll(&pfd, 1, remaining_ms(deadline));
    if (ready < 0 && errno == EINTR) continue;
    if (ready == 0) throw TimeoutError("external model did not answer within the timeout");
    if (!drain(from_child_, inbox_) && inbox_.find('\n') == std::string::npos) {
      throw ProtocolError("external model closed its output");
    }
  }
  return line;
}

void ExternalModel::handshake() {
  std::string line;
  try {
    line = read_line(Clock::now() + options_.timeout);
  } catch (const TimeoutError&) {
    throw TimeoutError("external model '" + command_ + "' sent no hello within " +
                       std::to_string(options_.timeout.count()) + " ms");
  } catch (const ProtocolError&) {
    throw SpawnError("external model '" + command_ + "' exited before its hello line");
  }
  Json hello;
  try {
    hello = Json::parse(line);
  } catch (const Json::parse_error&) {
    throw ProtocolError("malformed hello line from external model: '" + snippet(line) + "'");
  }
  try {
    if (hello.at("type").get<std::string>() != "hello") {
      throw ProtocolError("expected a hello message, got: '" + snippet(line) + "'");
    }
    const auto d = hello.at("d").get<std::size_t>();
    const auto kind = parse_task_kind(hello.at("task").get<std::string>());
    const auto k = hello.value("k", std::size_t{1});
    if (d != num_features_) {
      throw ProtocolError("external model reports d=" + std::to_string(d) + ", expected " +
                          std::to_string(num_features_));
    }
    if (kind != task_.kind) {
      throw ProtocolError("external model reports task " + to_string(kind) + ", expected " +
                          to_string(task_.kind));
    }
    if (k != task_.output_width()) {
      throw ProtocolError("external model reports k=" + std::to_string(k) + ", expected " +
                          std::to_string(task_.output_width()));
    }
  } catch (const Json::exception&) {
    throw ProtocolError("hello line is missing fields: '" + snippet(line) + "'");
  } catch (const InvalidArgument& err) {
    throw ProtocolError(std::string("bad hello line: ") + err.what());
  }
}

ModelOutput ExternalModel::predict(const Matrix& rows) const {
  std::lock_guard lock(mutex_);
  if (broken_) throw ProtocolError("external model is unusable after an earlier failure");
  if (rows.rows() > 0 && rows.cols() != num_features_) {
    throw InvalidArgument("external model expects " + std::to_string(num_features_) +
                          " features, got " + std::to_string(rows.cols()));
  }
  const auto k = task_.output_width();
  ModelOutput out(rows.rows(), k);
  if (rows.rows() == 0) return out;

  const auto chunk = std::max<std::size_t>(1, options_.chunk_rows);
  const auto n_chunks = (rows.rows() + chunk - 1) / chunk;
  std::map<std::int64_t, std::size_t> pending;  // request id -> first row
  std::size_t next_chunk = 0;
  std::string outbox;
  std::size_t out_pos = 0;

  try {
    auto deadline = Clock::now() + options_.timeout;
    while (next_chunk < n_chunks || !pending.empty() || out_pos < outbox.size()) {
      if (out_pos == outbox.size() && next_chunk < n_chunks) {
        const auto first = next_chunk * chunk;
        const auto last = std::min(rows.rows(), first + chunk);
        Json inputs = Json::array();
        for (std::size_t i = first; i < last; ++i) {
          const auto r = rows.row(i);
          inputs.push_back(std::vector<double>(r.begin(), r.end()));
        }
        const auto id = next_id_++;
        outbox = Json{{"type", "predict"}, {"id", id}, {"inputs", std::move(inputs)}}.dump();
        outbox += '\n';
        out_pos = 0;
        pending[id] = first;
        ++next_chunk;
      }

      std::string line;
      while (take_line(inbox_, line)) {
        Json msg;
        try {
          msg = Json::parse(line);
        } catch (const Json::parse_error&) {
          throw ProtocolError("malformed JSON from external model: '" + snippet(line) + "'");
        }
        const auto type = msg.value("type", std::string());
        if (!msg.contains("id") || !msg["id"].is_number_integer()) {
          throw ProtocolError("message without an integer id: '" + snippet(line) + "'");
        }
        const auto id = msg["id"].get<std::int64_t>();
        const auto it = pending.find(id);
        if (it == pending.end()) {
          throw ProtocolError("response for unknown request id " + std::to_string(id) + ": '" +
                              snippet(line) + "'");
        }
        if (type == "error") {
          throw ModelError("external model failed request " + std::to_string(id) + ": " +
                           msg.value("message", std::string("(no message)")));
        }
        if (type != "result" || !msg.contains("outputs") || !msg["outputs"].is_array()) {
          throw ProtocolError("unexpected message from external model: '" + snippet(line) + "'");
        }
        const auto first = it->second;
        const auto count = std::min(rows.rows(), first + chunk) - first;
        const auto& outputs = msg["outputs"];
        if (outputs.size() != count) {
          throw ProtocolError("request " + std::to_string(id) + " expected " +
                              std::to_string(count) + " outputs, got " +
                              std::to_string(outputs.size()));
        }
        for (std::size_t i = 0; i < count; ++i) {
          const auto& o = outputs[i];
          if (!o.is_array() || o.size() != k) {
            throw ProtocolError("request " + std::to_string(id) + " output " +
                                std::to_string(i) + " does not have " + std::to_string(k) +
                                " values");
          }
          for (std::size_t c = 0; c < k; ++c) {
            if (!o[c].is_number()) {
              throw ProtocolError("request " + std::to_string(id) + " has a non-numeric output");
            }
            out(first + i, c) = o[c].get<double>();
          }
        }
        pending.erase(it);
        deadline = Clock::now() + options_.timeout;
      }
      if (next_chunk >= n_chunks && pending.empty() && out_pos == outbox.size()) break;

      pollfd fds[2] = {{from_child_, POLLIN, 0}, {to_child_, 0, 0}};
      if (out_pos < outbox.size()) fds[1].events = POLLOUT;
      const int ready = ::poll(fds, 2, remaining_ms(deadline));
      if (ready < 0) {
        if (errno == EINTR) continue;
        throw ProtocolError(std::string("poll failed: ") + std::strerror(errno));
      }
      if (ready == 0) {
        throw TimeoutError("external model did not answer request " +
                           std::to_string(pending.begin()->first) + " within " +
                           std::to_string(options_.timeout.count()) + " ms");
      }
      if (fds[0].revents & (POLLIN | POLLHUP | POLLERR)) {
        if (!drain(from_child_, inbox_) && inbox_.find('\n') == std::string::npos) {
          throw ProtocolError("external model closed its output with " +
                              std::to_string(pending.size()) + " requests pending");
        }
      }
      if (fds[1].revents & (POLLERR | POLLHUP)) {
        throw ProtocolError("external model closed its input");
      }
      if (fds[1].revents & POLLOUT) {
        const ssize_t put = ::write(to_child_, outbox.data() + out_pos, outbox.size() - out_pos);
        if (put > 0) {
          out_pos += static_cast<std::size_t>(put);
          deadline = Clock::now() + options_.timeout;
        } else if (put < 0 && errno != EAGAIN && errno != EWOULDBLOCK && errno != EINTR) {
          throw ProtocolError(std::string("writing to external model failed: ") +
                              std::strerror(errno));
        }
      }
    }
  } catch (const ModelError&) {
    // Requests may still be in flight; the stream can no longer be trusted.
    broken_ = true;
    throw;
  }
  validate_output(out, rows.rows(), task_);
  return out;
}

std::unique_ptr<ExternalModel> attach_external(const std::string& command,
                                               std::size_t num_features, Task task,
                                               const ExternalOptions& options) {
  if (num_features == 0) throw InvalidArgument("external model needs d >= 1");
  std::unique_ptr<ExternalModel> model(new ExternalModel(command, num_features, task, options));
  model->spawn();
  model->handshake();
  if (options.check_purity) {
    RandomStream rng(0x5eed);
    Matrix probe(8, num_features);
    for (auto& v : probe.data()) v = rng.gaussian();
    const auto first = model->predict(probe);
    const auto second = model->predict(probe);
    if (!(first == second)) {
      throw PurityError("external model '" + command +
                        "' returned different outputs for the same probe batch");
    }
  }
  return model;
}

}  // namespace limase
