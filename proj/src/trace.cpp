#include "remlab/trace.hpp"

#include <cmath>
#include <fstream>
#include <sstream>
#include <unordered_map>

#include <json.hpp>

namespace remlab {

using nlohmann::json;
using nlohmann::ordered_json;

const char* to_string(ApiClass cls) {
  switch (cls) {
    case ApiClass::Async: return "async";
    case ApiClass::Sync: return "sync";
    case ApiClass::Local: return "local";
  }
  return "?";
}

std::optional<ApiClass> api_class_from_string(std::string_view s) {
  if (s == "async") return ApiClass::Async;
  if (s == "sync") return ApiClass::Sync;
  if (s == "local") return ApiClass::Local;
  return std::nullopt;
}

const ClassStats& TraceSummary::of(ApiClass cls) const {
  switch (cls) {
    case ApiClass::Async: return async_apis;
    case ApiClass::Sync: return sync_apis;
    case ApiClass::Local: return local_apis;
  }
  return total;
}

ClassStats& TraceSummary::of(ApiClass cls) {
  switch (cls) {
    case ApiClass::Async: return async_apis;
    case ApiClass::Sync: return sync_apis;
    case ApiClass::Local: return local_apis;
  }
  return total;
}

TraceError::TraceError(const std::string& msg, std::size_t line)
    : std::runtime_error(line ? "line " + std::to_string(line) + ": " + msg : msg),
      line_(line) {}

namespace {

const char* const kKnownFields[] = {"seq",          "name",         "class",
                                    "sr_class",     "payload_req",  "payload_resp",
                                    "gpu_exec_us",  "local_exec_us", "cpu_gap_us"};

bool is_known_field(const std::string& key) {
  for (const char* f : kKnownFields)
    if (key == f) return true;
  return false;
}

std::uint64_t get_bytes(const json& rec, const char* field, std::size_t line) {
  const auto& v = rec.at(field);
  if (v.is_number_unsigned()) return v.get<std::uint64_t>();
  if (v.is_number_integer())
    throw TraceError(std::string("field '") + field + "' must be non-negative", line);
  throw TraceError(std::string("field '") + field + "' must be an integer byte count", line);
}

double get_time(const json& rec, const char* field, std::size_t line, bool required) {
  if (!rec.contains(field)) {
    if (required) throw TraceError(std::string("missing field '") + field + "'", line);
    return 0.0;
  }
  const auto& v = rec.at(field);
  if (!v.is_number())
    throw TraceError(std::string("field '") + field + "' must be a number", line);
  double t = v.get<double>();
  if (!std::isfinite(t) || t < 0)
    throw TraceError(std::string("field '") + field + "' must be finite and non-negative", line);
  return t;
}

ApiCall parse_record(const json& rec, std::size_t line) {
  if (!rec.is_object()) throw TraceError("record is not a JSON object", line);
  for (const auto& [key, _] : rec.items())
    if (!is_known_field(key)) throw TraceError("unknown field '" + key + "'", line);
  for (const char* f : {"seq", "name", "class", "payload_req", "payload_resp", "gpu_exec_us"})
    if (!rec.contains(f)) throw TraceError(std::string("missing field '") + f + "'", line);

  ApiCall call;
  if (!rec.at("seq").is_number_unsigned())
    throw TraceError("field 'seq' must be a non-negative integer", line);
  call.seq = rec.at("seq").get<std::uint64_t>();
  if (!rec.at("name").is_string() || rec.at("name").get<std::string>().empty())
    throw TraceError("field 'name' must be a nonempty string", line);
  call.name = rec.at("name").get<std::string>();

  auto cls = rec.at("class").is_string()
                 ? api_class_from_string(rec.at("class").get<std::string>())
                 : std::nullopt;
  if (!cls) throw TraceError("field 'class' must be one of async|sync|local", line);
  call.cls = *cls;

  if (rec.contains("sr_class")) {
    auto sr = rec.at("sr_class").is_string()
                  ? api_class_from_string(rec.at("sr_class").get<std::string>())
                  : std::nullopt;
    if (!sr || *sr == ApiClass::Sync)
      throw TraceError("field 'sr_class' must be one of async|local", line);
    if (call.cls == ApiClass::Local)
      throw TraceError("field 'sr_class' not allowed on a local call", line);
    if (*sr == call.cls)
      throw TraceError("field 'sr_class' must differ from 'class'", line);
    call.sr_class = *sr;
  }

  call.payload_req = get_bytes(rec, "payload_req", line);
  call.payload_resp = get_bytes(rec, "payload_resp", line);
  call.gpu_exec_us = get_time(rec, "gpu_exec_us", line, true);
  call.local_exec_us = get_time(rec, "local_exec_us", line, false);
  call.cpu_gap_us = get_time(rec, "cpu_gap_us", line, false);
  return call;
}

}  // namespace

Trace parse_trace(std::istream& in, std::string_view source) {
  Trace trace;
  trace.meta.source = std::string(source);
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty() || line[0] == '#') continue;
    json rec;
    try {
      rec = json::parse(line);
    } catch (const json::parse_error& e) {
      throw TraceError(std::string("bad JSON record: ") + e.what(), lineno);
    }
    ApiCall call = parse_record(rec, lineno);
    call.seq = trace.calls.size();  // normalize to input order
    trace.calls.push_back(std::move(call));
  }
  return trace;
}

Trace load_trace(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw TraceError("cannot open trace file: " + path.string());
  return parse_trace(in, path.string());
}

void save_trace(const Trace& trace, std::ostream& out, std::string_view header_comment) {
  if (!header_comment.empty()) out << "# " << header_comment << '\n';
  for (const ApiCall& c : trace.calls) {
    ordered_json rec;
    rec["seq"] = c.seq;
    rec["name"] = c.name;
    rec["class"] = to_string(c.cls);
    if (c.sr_class) rec["sr_class"] = to_string(*c.sr_class);
    rec["payload_req"] = c.payload_req;
    rec["payload_resp"] = c.payload_resp;
    rec["gpu_exec_us"] = c.gpu_exec_us;
    rec["local_exec_us"] = c.local_exec_us;
    rec["cpu_gap_us"] = c.cpu_gap_us;
    out << rec.dump() << '\n';
  }
}

void save_trace(const Trace& trace, const std::filesystem::path& path,
                std::string_view header_comment) {
  std::ofstream out(path);
  if (!out) throw TraceError("cannot open output file: " + path.string());
  save_trace(trace, out, header_comment);
}

void validate_trace(const Trace& trace) {
  for (std::size_t i = 0; i < trace.calls.size(); ++i) {
    const ApiCall& c = trace.calls[i];
    if (c.seq != i)
      throw TraceError("call " + std::to_string(i) + ": seq not dense (got " +
                       std::to_string(c.seq) + ")");
    if (c.name.empty()) throw TraceError("call " + std::to_string(i) + ": empty name");
    if (c.cls == ApiClass::Local && c.sr_class)
      throw TraceError("call " + std::to_string(i) + ": local call with sr_class");
    if (c.sr_class && *c.sr_class == ApiClass::Sync)
      throw TraceError("call " + std::to_string(i) + ": sr_class sync is not a conversion");
    for (auto [v, f] : {std::pair{c.gpu_exec_us, "gpu_exec_us"},
                        {c.local_exec_us, "local_exec_us"},
                        {c.cpu_gap_us, "cpu_gap_us"}}) {
      if (!std::isfinite(v) || v < 0)
        throw TraceError("call " + std::to_string(i) + ": field '" + f +
                         "' must be finite and non-negative");
    }
  }
}

Trace resolve_classes(Trace trace, bool sr, bool locality) {
  for (ApiCall& c : trace.calls) {
    if (sr && c.sr_class) {
      if (*c.sr_class == ApiClass::Async || locality) c.cls = *c.sr_class;
    }
    c.sr_class.reset();
  }
  return trace;
}

Trace apply_sr(Trace trace, bool enabled) {
  return resolve_classes(std::move(trace), enabled, enabled);
}

TraceSummary summarize(const Trace& trace) {
  TraceSummary s;
  for (const ApiCall& c : trace.calls) {
    for (ClassStats* st : {&s.of(c.cls), &s.total}) {
      st->count += 1;
      st->payload_req += c.payload_req;
      st->payload_resp += c.payload_resp;
      st->gpu_exec_us += c.gpu_exec_us;
      st->local_exec_us += c.local_exec_us;
    }
  }
  return s;
}

std::optional<ApiClass> default_sr_conversion(std::string_view name) {
  // Resource-creating APIs become async behind a shadow descriptor;
  // read-only state queries become local. Everything else keeps its class.
  static const std::unordered_map<std::string_view, ApiClass> table = {
      {"Malloc", ApiClass::Async},
      {"Free", ApiClass::Async},
      {"CreateTensorDescriptor", ApiClass::Async},
      {"CreateStream", ApiClass::Async},
      {"GetDevice", ApiClass::Local},
      {"StreamQuery", ApiClass::Local},
  };
  auto it = table.find(name);
  if (it == table.end()) return std::nullopt;
  return it->second;
}

Trace annotate_sr_defaults(Trace trace) {
  for (ApiCall& c : trace.calls) {
    if (c.sr_class || c.cls == ApiClass::Local) continue;
    auto conv = default_sr_conversion(c.name);
    if (conv && *conv != c.cls) c.sr_class = conv;
  }
  return trace;
}

}  // namespace remlab
