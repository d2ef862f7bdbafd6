#pragma once

#include <chrono>
#include <cstddef>
#include <cstdint>
#include <map>
#include <memory>
#include <mutex>
#include <string>

#include "limase/error.hpp"
#include "limase/model.hpp"

namespace limase {

// Failure classes of an external model.
class SpawnError : public ModelError {
 public:
  using ModelError::ModelError;
};
class TimeoutError : public ModelError {
 public:
  using ModelError::ModelError;
};
class ProtocolError : public ModelError {
 public:
  using ModelError::ModelError;
};
class PurityError : public ModelError {
 public:
  using ModelError::ModelError;
};

struct ExternalOptions {
  std::chrono::milliseconds timeout{30000};  // per request, and for the handshake
  std::size_t chunk_rows = 256;              // rows per predict request
  bool check_purity = true;
};

// A black box living in a child process, spoken to with one JSON object per
// line on its stdin/stdout:
//   child  -> {"type":"hello","d":20,"task":"classification","k":4}
//   parent -> {"type":"predict","id":7,"inputs":[[...],...]}
//   child  -> {"type":"result","id":7,"outputs":[[...],...]}
//          or {"type":"error","id":7,"message":"..."}
// Large batches are split into several requests that are all in flight at
// once; responses may come back in any order. After a protocol violation
// the model refuses further requests.
class ExternalModel : public BlackBoxModel {
 public:
  ~ExternalModel() override;
  ExternalModel(const ExternalModel&) = delete;
  ExternalModel& operator=(const ExternalModel&) = delete;

  ModelOutput predict(const Matrix& rows) const override;
  Task task() const override { return task_; }
  std::size_t num_features() const override { return num_features_; }
  const std::string& command() const { return command_; }

  friend std::unique_ptr<ExternalModel> attach_external(const std::string& command,
                                                        std::size_t num_features, Task task,
                                                        const ExternalOptions& options);

 private:
  ExternalModel(std::string command, std::size_t num_features, Task task,
                ExternalOptions options);

  void spawn();
  void handshake();
  std::string read_line(std::chrono::steady_clock::time_point deadline) const;
  void shutdown() noexcept;

  std::string command_;
  std::size_t num_features_;
  Task task_;
  ExternalOptions options_;

  int pid_ = -1;
  int to_child_ = -1;
  int from_child_ = -1;
  mutable std::mutex mutex_;
  mutable std::string inbox_;  // bytes read but not yet consumed as lines
  mutable std::int64_t next_id_ = 1;
  mutable bool broken_ = false;
};

// Spawns `command` through /bin/sh, verifies the hello line against
// (num_features, task) and, unless disabled, sends one probe batch twice and
// rejects the model if the answers differ.
std::unique_ptr<ExternalModel> attach_external(const std::string& command,
                                               std::size_t num_features, Task task,
                                               const ExternalOptions& options = {});

}  // namespace limase
