#pragma once

#include <json.hpp>

#include <string>
#include <vector>

namespace fracvortex {

using Json = nlohmann::json;

/// Machine-readable run summary. Serialized as
///
///   { "schema": "fracvortex-report/1", "experiment": str, "status": "ok" | "failed",
///     "stage": str, "exit_code": int, "error": str | null,
///     "config": { dotted key: str }, "input_hash": 40 hex chars,
///     "metrics": object, "artifacts": [str], "warnings": [str] }
///
/// Keys are emitted in sorted order, so equal reports serialize to equal bytes.
struct Report {
  std::string experiment;
  std::string status = "ok";
  std::string stage = "setup";
  int exit_code = 0;
  std::string error;
  Json config = Json::object();
  std::string input_hash;
  Json metrics = Json::object();
  std::vector<std::string> artifacts;
  std::vector<std::string> warnings;

  void fail(const std::string& message, int code) {
    status = "failed";
    error = message;
    exit_code = code;
  }
};

inline constexpr const char* report_schema = "fracvortex-report/1";

Json to_json(const Report& report);

/// Problems found when checking a document against the report schema; empty
/// when it conforms.
std::vector<std::string> validate_report(const Json& document);

void write_report(const std::string& path, const Report& report);

/// Git blob id of the bytes: SHA-1 over "blob <size>\0" followed by the content.
std::string git_blob_sha1(const std::string& content);

}  // namespace fracvortex
