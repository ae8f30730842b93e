#pragma once

#include <cstdint>
#include <iosfwd>
#include <map>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace remlab {

struct ExecutionRecord {
  std::string name;
  std::uint64_t call_seq = 0;
  double submit_us = 0;
  double start_us = 0;
  double finish_us = 0;
};

/// Mock GPU: a single serial execution stream. Work starts at
/// max(submit_time, previous finish) and delays shift work, never shrink it.
class DeviceTimeline {
 public:
  /// Returns the finish time. Submissions must arrive in FIFO order.
  double submit(std::string_view name, std::uint64_t call_seq, double gpu_exec_us,
                double submit_us);

  void create_resource(std::string_view kind, std::uint64_t real_id);
  void destroy_resource(std::uint64_t real_id);
  bool has_resource(std::uint64_t real_id) const;
  std::size_t resource_count() const { return resources_.size(); }

  double busy_until() const { return busy_until_; }
  double busy_total() const { return busy_total_; }
  const std::vector<ExecutionRecord>& log() const { return log_; }

  /// CSV: name, submit, start, finish, delay_vs_local. `local_submits`
  /// supplies the matching local-run submit time per record (empty column
  /// when absent).
  void export_log_csv(std::ostream& out, std::span<const double> local_submits = {}) const;

 private:
  double busy_until_ = 0;
  double busy_total_ = 0;
  double last_submit_ = 0;
  bool any_submit_ = false;
  std::vector<ExecutionRecord> log_;
  std::map<std::uint64_t, std::string> resources_;
};

}  // namespace remlab
