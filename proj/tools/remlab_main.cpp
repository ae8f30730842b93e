// remlab: trace analysis, remoting-cost modeling, network-requirement
// solving and event-level replay for GPU API remoting studies.

#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "remlab/manifest.hpp"
#include "remlab/replay.hpp"
#include "remlab/solver.hpp"
#include "remlab/synth.hpp"

using namespace remlab;
using nlohmann::ordered_json;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitUsage = 1;
constexpr int kExitInput = 2;
constexpr int kExitInternal = 3;

struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

std::vector<std::string> outputs_of(const std::string& out) {
  if (out.empty() || out == "-") return {};
  return {out};
}

void write_text(const std::string& path, const std::string& text) {
  if (path.empty() || path == "-") {
    std::cout << text;
    return;
  }
  std::ofstream out(path);
  if (!out) throw TraceError("cannot open output file: " + path);
  out << text;
}

void write_manifest_sidecar(const std::string& path, const RunManifest& m) {
  if (path.empty() || path == "-") return;
  std::ofstream out(path + ".manifest.json");
  if (out) out << manifest_json(m).dump(2) << '\n';
}

Grid parse_grid(const std::string& spec) {
  if (spec.empty()) return Grid::default_grid();
  auto colon = spec.find(':');
  if (colon == std::string::npos)
    throw UsageError("--grid expects 'rtt,rtt,...:gbps,gbps,...'");
  auto parse_axis = [](const std::string& s, const char* what) {
    std::vector<double> vals;
    std::stringstream ss(s);
    std::string item;
    while (std::getline(ss, item, ',')) {
      try {
        vals.push_back(std::stod(item));
      } catch (const std::exception&) {
        throw UsageError(std::string("bad ") + what + " value '" + item + "'");
      }
    }
    return vals;
  };
  Grid g;
  g.rtts_us = parse_axis(spec.substr(0, colon), "rtt");
  for (double gbps : parse_axis(spec.substr(colon + 1), "bandwidth"))
    g.bandwidths_bytes_per_us.push_back(gbps_to_bytes_per_us(gbps));
  try {
    g.validate();
  } catch (const std::invalid_argument& e) {
    throw UsageError(e.what());
  }
  return g;
}

DispatchPolicy parse_dispatch(const std::string& spec) {
  if (spec == "or") return {DispatchPolicy::Mode::Outstanding, 1};
  if (spec.rfind("batch:", 0) == 0) {
    try {
      std::size_t n = std::stoull(spec.substr(6));
      if (n < 1) throw std::invalid_argument("n");
      return {DispatchPolicy::Mode::Batch, n};
    } catch (const std::exception&) {
      throw UsageError("--dispatch batch:N requires N >= 1");
    }
  }
  throw UsageError("--dispatch must be 'or' or 'batch:N'");
}

ordered_json stats_json(const ClassStats& s) {
  ordered_json j;
  j["count"] = s.count;
  j["payload_req_bytes"] = s.payload_req;
  j["payload_resp_bytes"] = s.payload_resp;
  j["gpu_exec_us"] = s.gpu_exec_us;
  j["local_exec_us"] = s.local_exec_us;
  return j;
}

ordered_json point_json(const GridPoint& p) {
  ordered_json j;
  j["rtt_us"] = p.rtt_us;
  j["bandwidth_gbps"] = bytes_per_us_to_gbps(p.bandwidth_bytes_per_us);
  j["total_cost_us"] = p.total_cost_us;
  j["satisfied"] = p.satisfied;
  return j;
}

int cmd_analyze(const std::string& trace_path, bool sr, const std::string& out) {
  Trace trace = apply_sr(load_trace(trace_path), sr);
  TraceSummary s = summarize(trace);
  RunManifest m =
      make_manifest("analyze", {trace_path}, sr ? "sr=1" : "sr=0", 0, outputs_of(out));
  ordered_json j;
  j["manifest"] = manifest_json(m);
  j["sr"] = sr;
  j["classes"]["async"] = stats_json(s.async_apis);
  j["classes"]["sync"] = stats_json(s.sync_apis);
  j["classes"]["local"] = stats_json(s.local_apis);
  j["total"] = stats_json(s.total);
  write_text(out, j.dump(2) + "\n");
  write_manifest_sidecar(out, m);
  return kExitOk;
}

int cmd_solve(const std::string& trace_path, double epsilon, double baseline_us,
              const std::string& grid_spec, const std::string& out) {
  Grid grid = parse_grid(grid_spec);
  Trace trace = apply_sr(load_trace(trace_path), true);
  Budget budget{epsilon, baseline_us};
  RequirementFrontier f = derive_requirements(trace, budget, grid);

  std::ostringstream canon;
  canon << "epsilon=" << epsilon << ";baseline=" << baseline_us << ";grid=" << grid_spec;
  RunManifest m = make_manifest("solve", {trace_path}, canon.str(), 0, outputs_of(out));
  ordered_json j;
  j["manifest"] = manifest_json(m);
  j["epsilon_fraction"] = epsilon;
  j["baseline_us"] = baseline_us;
  j["epsilon_us"] = budget.epsilon_us();
  j["points"] = ordered_json::array();
  for (const GridPoint& p : f.points) j["points"].push_back(point_json(p));
  j["frontier"] = ordered_json::array();
  for (const GridPoint& p : f.frontier) j["frontier"].push_back(point_json(p));
  if (!f.diagnostic.empty()) j["diagnostic"] = f.diagnostic;
  write_text(out, j.dump(2) + "\n");
  write_manifest_sidecar(out, m);
  return kExitOk;
}

int cmd_sweep(const std::string& trace_path, double baseline_us,
              const std::string& grid_spec, const std::string& out) {
  Grid grid = parse_grid(grid_spec);
  Trace trace = apply_sr(load_trace(trace_path), true);
  auto matrix = sweep(trace, grid, baseline_us);

  std::ostringstream canon;
  canon << "baseline=" << baseline_us << ";grid=" << grid_spec;
  RunManifest m = make_manifest("sweep", {trace_path}, canon.str(), 0, outputs_of(out));
  std::ostringstream csv;
  csv << "# manifest " << m.config_digest << "\n";
  csv.precision(10);
  csv << "rtt_us";
  for (double bw : grid.bandwidths_bytes_per_us) csv << ',' << bytes_per_us_to_gbps(bw);
  csv << '\n';
  for (std::size_t i = 0; i < grid.rtts_us.size(); ++i) {
    csv << grid.rtts_us[i];
    for (double cell : matrix[i]) csv << ',' << cell;
    csv << '\n';
  }
  write_text(out, csv.str());
  write_manifest_sidecar(out, m);
  return kExitOk;
}

struct ReplayArgs {
  std::string trace_path;
  double rtt_us = 10;
  double bw_gbps = 1;
  double start_us = 0;
  std::string dispatch = "or";
  bool no_sr = false;
  bool no_locality = false;
  bool compare = false;
  bool ideal = false;
  double baseline_us = 0;  // 0: use the simulated local run
  std::string out;
  std::string device_log, transport_log, message_log;
};

int cmd_replay(const ReplayArgs& a) {
  Trace trace = load_trace(a.trace_path);
  ReplayOptions opts;
  opts.sr = !a.no_sr;
  opts.locality = opts.sr && !a.no_locality;
  opts.dispatch = parse_dispatch(a.dispatch);
  opts.backend = a.ideal ? TransportBackend::Ideal : TransportBackend::Emulated;
  opts.net.rtt_us = a.rtt_us;
  opts.net.bandwidth_bytes_per_us = gbps_to_bytes_per_us(a.bw_gbps);
  opts.net.start_us = a.start_us;

  ReplayResult local = replay_local(trace);
  ReplayResult remote = replay_remote(trace, opts);
  double baseline = a.baseline_us > 0 ? a.baseline_us : local.end_to_end_us;

  std::ostringstream canon;
  canon << "rtt=" << a.rtt_us << ";bw=" << a.bw_gbps << ";start=" << a.start_us
        << ";dispatch=" << a.dispatch << ";sr=" << opts.sr
        << ";locality=" << opts.locality << ";ideal=" << a.ideal
        << ";compare=" << a.compare;
  RunManifest m = make_manifest("replay", {a.trace_path}, canon.str(), 0, outputs_of(a.out));
  ordered_json j;
  j["manifest"] = manifest_json(m);
  j["options"]["rtt_us"] = a.rtt_us;
  j["options"]["bandwidth_gbps"] = a.bw_gbps;
  j["options"]["start_us"] = a.start_us;
  j["options"]["dispatch"] = a.dispatch;
  j["options"]["sr"] = opts.sr;
  j["options"]["locality"] = opts.locality;
  j["options"]["transport"] = a.ideal ? "ideal" : "emulated";
  j["end_to_end_us"] = remote.end_to_end_us;
  j["local_end_to_end_us"] = local.end_to_end_us;
  j["baseline_us"] = baseline;
  j["degradation"] = (remote.end_to_end_us - local.end_to_end_us) / baseline;
  j["device_busy_us"] = remote.device_busy_us;
  j["message_count"] = remote.message_count;
  j["max_outstanding"] = remote.max_outstanding;
  j["barrier_appended"] = remote.barrier_appended;
  j["assertions"]["checked"] = remote.assertions_checked;
  j["assertions"]["violations"] = 0;  // a violation aborts the run with exit 3

  if (a.compare) {
    if (opts.dispatch.mode != DispatchPolicy::Mode::Outstanding || a.ideal)
      throw UsageError("--compare-model requires --dispatch or and the emulated transport");
    ModelComparison cmp = compare_model(trace, opts, baseline);
    j["model_comparison"]["replay_degradation"] = cmp.replay_degradation;
    j["model_comparison"]["model_degradation"] = cmp.model_degradation;
    j["model_comparison"]["gap"] = cmp.gap;
    j["model_comparison"]["model_total_cost_us"] = cmp.model.total_us;
  }

  if (!a.device_log.empty()) {
    std::ofstream dl(a.device_log);
    if (!dl) throw TraceError("cannot open output file: " + a.device_log);
    dl << "name,submit_us,start_us,finish_us,delay_vs_local_us\n";
    std::size_t di = 0;
    for (const auto& r : remote.device_log) {
      dl << r.name << ',' << r.submit_us << ',' << r.start_us << ',' << r.finish_us << ',';
      if (di < remote.arrival_delays.size() &&
          remote.arrival_delays[di].call_seq == r.call_seq) {
        dl << remote.arrival_delays[di].delay_us;
        ++di;
      }
      dl << '\n';
    }
  }
  if (!a.transport_log.empty()) {
    std::ofstream tl(a.transport_log);
    if (!tl) throw TraceError("cannot open output file: " + a.transport_log);
    export_transport_csv(tl, remote.fwd_events);
  }
  if (!a.message_log.empty()) {
    std::ofstream ml(a.message_log, std::ios::binary);
    if (!ml) throw TraceError("cannot open output file: " + a.message_log);
    write_message_log(ml, remote.messages);
  }

  write_text(a.out, j.dump(2) + "\n");
  write_manifest_sidecar(a.out, m);
  return kExitOk;
}

int cmd_synth(const std::string& profile_path, std::uint64_t seed, bool seed_given,
              const std::string& out) {
  SynthProfile profile = load_profile(profile_path);
  if (seed_given) profile.seed = seed;
  Trace trace = synth_trace(profile);
  RunManifest m = make_manifest("synth", {profile_path}, "profile=" + profile_path,
                                profile.seed, outputs_of(out));
  std::ostringstream body;
  save_trace(trace, body, "manifest " + m.config_digest);
  write_text(out, body.str());
  write_manifest_sidecar(out, m);
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"GPU API remoting lab: trace analysis, cost model, solver, replay"};
  app.require_subcommand(1);

  std::string an_trace, an_out;
  bool an_sr = false;
  auto* analyze = app.add_subcommand("analyze", "Classify and summarize a trace");
  analyze->add_option("trace", an_trace)->required();
  analyze->add_flag("--sr", an_sr, "Apply shadow-resource reclassification");
  analyze->add_option("-o,--output", an_out);

  std::string so_trace, so_grid, so_out;
  double so_eps = 0.05, so_base = 0;
  auto* solve = app.add_subcommand("solve", "Derive minimum network requirements");
  solve->add_option("trace", so_trace)->required();
  solve->add_option("--epsilon", so_eps, "Overhead budget fraction")->required();
  solve->add_option("--baseline-us", so_base, "Local execution time")->required();
  solve->add_option("--grid", so_grid, "rtt,...:gbps,... (default grid otherwise)");
  solve->add_option("-o,--output", so_out);

  std::string sw_trace, sw_grid, sw_out;
  double sw_base = 0;
  auto* sweep_cmd = app.add_subcommand("sweep", "Emit the degradation heatmap CSV");
  sweep_cmd->add_option("trace", sw_trace)->required();
  sweep_cmd->add_option("--baseline-us", sw_base)->required();
  sweep_cmd->add_option("--grid", sw_grid);
  sweep_cmd->add_option("-o,--output", sw_out);

  ReplayArgs ra;
  auto* replay = app.add_subcommand("replay", "Event-level replay through the protocol");
  replay->add_option("trace", ra.trace_path)->required();
  replay->add_option("--rtt", ra.rtt_us, "Round-trip time in us");
  replay->add_option("--bw", ra.bw_gbps, "Bandwidth in Gbps");
  replay->add_option("--start", ra.start_us, "Per-request start overhead in us");
  replay->add_option("--dispatch", ra.dispatch, "or | batch:N");
  replay->add_flag("--no-sr", ra.no_sr);
  replay->add_flag("--no-locality", ra.no_locality);
  replay->add_flag("--compare-model", ra.compare);
  replay->add_flag("--ideal", ra.ideal, "Zero-delay in-process transport");
  replay->add_option("--baseline-us", ra.baseline_us, "Degradation denominator");
  replay->add_option("-o,--output", ra.out);
  replay->add_option("--device-log", ra.device_log);
  replay->add_option("--transport-log", ra.transport_log);
  replay->add_option("--message-log", ra.message_log);

  std::string sy_profile, sy_out;
  std::uint64_t sy_seed = 0;
  auto* synth = app.add_subcommand("synth", "Generate a trace from a profile");
  synth->add_option("profile", sy_profile)->required();
  auto* seed_opt = synth->add_option("--seed", sy_seed);
  synth->add_option("-o,--output", sy_out);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitUsage;
  }

  try {
    if (*analyze) return cmd_analyze(an_trace, an_sr, an_out);
    if (*solve) return cmd_solve(so_trace, so_eps, so_base, so_grid, so_out);
    if (*sweep_cmd) return cmd_sweep(sw_trace, sw_base, sw_grid, sw_out);
    if (*replay) return cmd_replay(ra);
    if (*synth) return cmd_synth(sy_profile, sy_seed, !seed_opt->empty(), sy_out);
  } catch (const UsageError& e) {
    std::cerr << "usage error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const TraceError& e) {
    std::cerr << "input error: " << e.what() << '\n';
    return kExitInput;
  } catch (const std::invalid_argument& e) {
    std::cerr << "input error: " << e.what() << '\n';
    return kExitInput;
  } catch (const ProtocolFault& e) {
    std::cerr << "protocol fault: " << e.what() << '\n';
    return kExitInternal;
  } catch (const std::exception& e) {
    std::cerr << "internal error: " << e.what() << '\n';
    return kExitInternal;
  }
  return kExitUsage;
}
