#include "remlab/device.hpp"

#include <algorithm>
#include <ostream>
#include <stdexcept>

namespace remlab {

double DeviceTimeline::submit(std::string_view name, std::uint64_t call_seq,
                              double gpu_exec_us, double submit_us) {
  if (any_submit_ && submit_us < last_submit_)
    throw std::logic_error("out-of-order device submission: " + std::string(name));
  if (gpu_exec_us < 0) throw std::invalid_argument("negative execution time");
  any_submit_ = true;
  last_submit_ = submit_us;
  double start = std::max(submit_us, busy_until_);
  double finish = start + gpu_exec_us;
  busy_until_ = finish;
  busy_total_ += gpu_exec_us;
  log_.push_back({std::string(name), call_seq, submit_us, start, finish});
  return finish;
}

void DeviceTimeline::create_resource(std::string_view kind, std::uint64_t real_id) {
  auto [it, inserted] = resources_.emplace(real_id, std::string(kind));
  if (!inserted)
    throw std::invalid_argument("duplicate resource id " + std::to_string(real_id));
}

void DeviceTimeline::destroy_resource(std::uint64_t real_id) {
  if (resources_.erase(real_id) == 0)
    throw std::invalid_argument("unknown resource id " + std::to_string(real_id));
}

bool DeviceTimeline::has_resource(std::uint64_t real_id) const {
  return resources_.count(real_id) != 0;
}

void DeviceTimeline::export_log_csv(std::ostream& out,
                                    std::span<const double> local_submits) const {
  out << "name,submit_us,start_us,finish_us,delay_vs_local_us\n";
  for (std::size_t i = 0; i < log_.size(); ++i) {
    const ExecutionRecord& r = log_[i];
    out << r.name << ',' << r.submit_us << ',' << r.start_us << ',' << r.finish_us << ',';
    if (i < local_submits.size()) out << (r.submit_us - local_submits[i]);
    out << '\n';
  }
}

}  // namespace remlab
