#include "remlab/synth.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <random>
#include <sstream>

namespace remlab {

namespace {

double uniform01(std::mt19937_64& rng) {
  return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

// Deterministic across platforms (std::shuffle is not).
template <typename T>
void fisher_yates(std::vector<T>& v, std::mt19937_64& rng) {
  for (std::size_t i = v.size(); i > 1; --i)
    std::swap(v[i - 1], v[rng() % i]);
}

std::vector<double> partition_time(double total, std::uint64_t count, double spread,
                                   std::mt19937_64& rng) {
  std::vector<double> w(count);
  double sum = 0;
  for (auto& x : w) {
    x = spread > 0 ? std::max(0.05, 1.0 + spread * (2.0 * uniform01(rng) - 1.0)) : 1.0;
    sum += x;
  }
  for (auto& x : w) x = x / sum * total;
  return w;
}

std::vector<std::uint64_t> partition_bytes(std::uint64_t total, std::uint64_t count,
                                           double spread, std::mt19937_64& rng) {
  std::vector<double> w(count);
  double sum = 0;
  for (auto& x : w) {
    x = spread > 0 ? std::max(0.05, 1.0 + spread * (2.0 * uniform01(rng) - 1.0)) : 1.0;
    sum += x;
  }
  std::vector<std::uint64_t> out(count);
  double cum = 0;
  std::uint64_t allocated = 0;
  for (std::uint64_t i = 0; i < count; ++i) {
    cum += w[i];
    auto upto = static_cast<std::uint64_t>(std::floor(static_cast<double>(total) * cum / sum));
    upto = std::min(upto, total);
    out[i] = upto - allocated;
    allocated = upto;
  }
  out[count - 1] += total - allocated;
  return out;
}

std::string default_name(ApiClass cls, ApiClass base) {
  if (cls == ApiClass::Async) return base == ApiClass::Sync ? "Malloc" : "LaunchKernel";
  if (cls == ApiClass::Local) return base == ApiClass::Async ? "StreamQuery" : "GetDevice";
  return "StreamSynchronize";
}

}  // namespace

Trace synth_trace(const SynthProfile& profile) {
  std::mt19937_64 rng(profile.seed);
  std::vector<ApiCall> calls;
  std::vector<double> gap_means;

  for (std::size_t gi = 0; gi < profile.groups.size(); ++gi) {
    const GroupSpec& g = profile.groups[gi];
    if (g.count == 0) {
      if (g.total_gpu_us > 0 || g.total_local_us > 0 || g.total_payload_req > 0 ||
          g.total_payload_resp > 0)
        throw TraceError("group " + std::to_string(gi) + ": zero count with nonzero totals");
      continue;
    }
    ApiClass base = g.base_cls.value_or(g.cls);
    if (base == ApiClass::Local && g.cls != ApiClass::Local)
      throw TraceError("group " + std::to_string(gi) + ": local calls cannot convert");
    auto exec = partition_time(g.total_gpu_us, g.count, g.spread, rng);
    auto local = partition_time(g.total_local_us, g.count, g.spread, rng);
    auto preq = partition_bytes(g.total_payload_req, g.count, g.spread, rng);
    auto presp = partition_bytes(g.total_payload_resp, g.count, g.spread, rng);
    double mean_gap = g.gap_mean_us.value_or(profile.cpu_gap_mean_us);
    for (std::uint64_t i = 0; i < g.count; ++i) {
      ApiCall c;
      c.name = g.name.empty() ? default_name(g.cls, base) : g.name;
      c.cls = base;
      if (base != g.cls) c.sr_class = g.cls;
      c.gpu_exec_us = exec[i];
      c.local_exec_us = local[i];
      c.payload_req = preq[i];
      c.payload_resp = presp[i];
      calls.push_back(std::move(c));
      gap_means.push_back(mean_gap);
    }
  }

  // Gaps are drawn uniform on [0, 2*mean] and rescaled so the trace-wide gap
  // budget is met exactly.
  std::vector<double> gaps(calls.size());
  double expected = 0, actual = 0;
  for (std::size_t i = 0; i < calls.size(); ++i) {
    gaps[i] = 2.0 * gap_means[i] * uniform01(rng);
    expected += gap_means[i];
    actual += gaps[i];
  }
  if (actual > 0)
    for (auto& gp : gaps) gp *= expected / actual;
  for (std::size_t i = 0; i < calls.size(); ++i) calls[i].cpu_gap_us = gaps[i];

  if (profile.order == SynthProfile::Order::Shuffle) fisher_yates(calls, rng);
  for (std::size_t i = 0; i < calls.size(); ++i) calls[i].seq = i;

  Trace trace;
  trace.calls = std::move(calls);
  trace.meta.application = profile.application;
  trace.meta.source = "synth(seed=" + std::to_string(profile.seed) + ")";
  validate_trace(trace);
  return trace;
}

namespace {

std::string_view trim(std::string_view s) {
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
  return s;
}

double parse_num(std::string_view v, std::size_t line) {
  try {
    std::size_t pos = 0;
    std::string s(v);
    double x = std::stod(s, &pos);
    if (pos != s.size() || !std::isfinite(x)) throw std::invalid_argument("trailing");
    return x;
  } catch (const std::exception&) {
    throw TraceError("bad numeric value '" + std::string(v) + "'", line);
  }
}

std::uint64_t parse_u64(std::string_view v, std::size_t line) {
  double x = parse_num(v, line);
  if (x < 0 || x != std::floor(x)) throw TraceError("expected non-negative integer", line);
  return static_cast<std::uint64_t>(x);
}

}  // namespace

SynthProfile parse_profile(std::istream& in, std::string_view source) {
  SynthProfile profile;
  GroupSpec* current = nullptr;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    std::string_view s = trim(line);
    if (s.empty() || s.front() == '#') continue;
    if (s.front() == '[') {
      if (s.back() != ']') throw TraceError("unterminated section header", lineno);
      auto cls = api_class_from_string(trim(s.substr(1, s.size() - 2)));
      if (!cls) throw TraceError("section must be [async], [sync] or [local]", lineno);
      GroupSpec g;
      g.cls = *cls;
      profile.groups.push_back(std::move(g));
      current = &profile.groups.back();
      continue;
    }
    auto eq = s.find('=');
    if (eq == std::string_view::npos) throw TraceError("expected 'key = value'", lineno);
    std::string key(trim(s.substr(0, eq)));
    std::string_view val = trim(s.substr(eq + 1));
    if (!current) {
      if (key == "cpu_gap_mean_us") profile.cpu_gap_mean_us = parse_num(val, lineno);
      else if (key == "seed") profile.seed = parse_u64(val, lineno);
      else if (key == "application") profile.application = std::string(val);
      else if (key == "baseline_us") profile.baseline_us = parse_num(val, lineno);
      else if (key == "order") {
        if (val == "shuffle") profile.order = SynthProfile::Order::Shuffle;
        else if (val == "as_given") profile.order = SynthProfile::Order::AsGiven;
        else throw TraceError("order must be shuffle|as_given", lineno);
      } else throw TraceError("unknown profile key '" + key + "'", lineno);
      continue;
    }
    if (key == "count") current->count = parse_u64(val, lineno);
    else if (key == "total_gpu_us") current->total_gpu_us = parse_num(val, lineno);
    else if (key == "total_local_us") current->total_local_us = parse_num(val, lineno);
    else if (key == "total_payload_req") current->total_payload_req = parse_u64(val, lineno);
    else if (key == "total_payload_resp") current->total_payload_resp = parse_u64(val, lineno);
    else if (key == "spread") current->spread = parse_num(val, lineno);
    else if (key == "gap_mean_us") current->gap_mean_us = parse_num(val, lineno);
    else if (key == "name") current->name = std::string(val);
    else if (key == "base_class") {
      auto cls = api_class_from_string(val);
      if (!cls) throw TraceError("base_class must be async|sync|local", lineno);
      current->base_cls = *cls;
    } else throw TraceError("unknown group key '" + key + "'", lineno);
  }
  (void)source;
  return profile;
}

SynthProfile load_profile(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw TraceError("cannot open profile file: " + path.string());
  return parse_profile(in, path.string());
}

}  // namespace remlab
