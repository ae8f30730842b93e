#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace remlab {

enum class ApiClass { Async, Sync, Local };

const char* to_string(ApiClass cls);
std::optional<ApiClass> api_class_from_string(std::string_view s);

/// One recorded GPU API invocation. `cls` is the call's current class;
/// `sr_class` is a pending shadow-resource conversion target that
/// apply_sr() resolves into `cls`.
struct ApiCall {
  std::uint64_t seq = 0;
  std::string name;
  ApiClass cls = ApiClass::Sync;
  std::optional<ApiClass> sr_class;
  std::uint64_t payload_req = 0;   // request argument bytes
  std::uint64_t payload_resp = 0;  // response bytes, charged only when the effective class is Sync
  double gpu_exec_us = 0;          // execution time against the real resource
  double local_exec_us = 0;        // execution time against the shadow resource
  double cpu_gap_us = 0;           // CPU think time between the previous return and this call

  friend bool operator==(const ApiCall&, const ApiCall&) = default;
};

struct TraceMeta {
  std::string application;
  int batch_size = 1;
  std::string source;
};

struct Trace {
  std::vector<ApiCall> calls;
  TraceMeta meta;
};

struct ClassStats {
  std::uint64_t count = 0;
  std::uint64_t payload_req = 0;
  std::uint64_t payload_resp = 0;
  double gpu_exec_us = 0;
  double local_exec_us = 0;
};

/// Per-class aggregate counts and cumulative sizes/times plus totals.
struct TraceSummary {
  ClassStats async_apis;
  ClassStats sync_apis;
  ClassStats local_apis;
  ClassStats total;

  const ClassStats& of(ApiClass cls) const;
  ClassStats& of(ApiClass cls);
};

/// Trace parse or validation failure; carries the 1-based line number when known.
class TraceError : public std::runtime_error {
 public:
  explicit TraceError(const std::string& msg, std::size_t line = 0);
  std::size_t line() const { return line_; }

 private:
  std::size_t line_;
};

Trace load_trace(const std::filesystem::path& path);
Trace parse_trace(std::istream& in, std::string_view source);

/// Writes one record per line; `header_comment`, when nonempty, is emitted
/// first as a '#' line (used for manifest references).
void save_trace(const Trace& trace, std::ostream& out, std::string_view header_comment = {});
void save_trace(const Trace& trace, const std::filesystem::path& path,
                std::string_view header_comment = {});

void validate_trace(const Trace& trace);

/// Resolve SR annotations: when enabled, every call with a conversion target
/// takes it; annotations are consumed either way. Count, order, payload and
/// time fields are preserved.
Trace apply_sr(Trace trace, bool enabled);

/// apply_sr with the locality optimization controlled separately: with
/// locality off, conversions targeting Local are not taken (the query still
/// needs the real resource) while conversions to Async still apply.
Trace resolve_classes(Trace trace, bool sr, bool locality);

TraceSummary summarize(const Trace& trace);

/// Conversion table for the API names the classifier knows; unknown names
/// are treated as non-convertible.
std::optional<ApiClass> default_sr_conversion(std::string_view name);

/// Fill missing sr_class annotations from the default conversion table.
Trace annotate_sr_defaults(Trace trace);

}  // namespace remlab
