#include "fracvortex/report.hpp"

#include "fracvortex/errors.hpp"

#include <openssl/evp.h>

#include <algorithm>
#include <fstream>

namespace fracvortex {

Json to_json(const Report& r) {
  Json j;
  j["schema"] = report_schema;
  j["experiment"] = r.experiment;
  j["status"] = r.status;
  j["stage"] = r.stage;
  j["exit_code"] = r.exit_code;
  j["error"] = r.error.empty() ? Json(nullptr) : Json(r.error);
  j["config"] = r.config;
  j["input_hash"] = r.input_hash;
  j["metrics"] = r.metrics;
  j["artifacts"] = r.artifacts;
  j["warnings"] = r.warnings;
  return j;
}

std::vector<std::string> validate_report(const Json& doc) {
  std::vector<std::string> problems;
  if (!doc.is_object()) return {"report is not a JSON object"};
  auto require = [&](const char* key, auto check, const char* type) {
    if (!doc.contains(key)) {
      problems.push_back(std::string("missing key '") + key + "'");
    } else if (!check(doc.at(key))) {
      problems.push_back(std::string("key '") + key + "' must be " + type);
    }
  };
  require("schema", [](const Json& v) { return v.is_string() && v.get<std::string>() == report_schema; },
          "the schema tag");
  require("experiment", [](const Json& v) { return v.is_string(); }, "a string");
  require("status", [](const Json& v) {
    return v.is_string() && (v.get<std::string>() == "ok" || v.get<std::string>() == "failed");
  }, "'ok' or 'failed'");
  require("stage", [](const Json& v) { return v.is_string(); }, "a string");
  require("exit_code", [](const Json& v) { return v.is_number_integer(); }, "an integer");
  require("error", [](const Json& v) { return v.is_null() || v.is_string(); }, "null or a string");
  require("config", [](const Json& v) {
    if (!v.is_object()) return false;
    for (const auto& item : v.items()) {
      if (!item.value().is_string()) return false;
    }
    return true;
  }, "an object of strings");
  require("input_hash", [](const Json& v) {
    if (!v.is_string()) return false;
    const auto s = v.get<std::string>();
    return s.size() == 40 && s.find_first_not_of("0123456789abcdef") == std::string::npos;
  }, "40 lowercase hex digits");
  require("metrics", [](const Json& v) { return v.is_object(); }, "an object");
  auto strings = [](const Json& v) {
    if (!v.is_array()) return false;
    for (const auto& e : v) {
      if (!e.is_string()) return false;
    }
    return true;
  };
  require("artifacts", strings, "an array of strings");
  require("warnings", strings, "an array of strings");
  if (problems.empty()) {
    const bool ok = doc.at("status") == "ok";
    if (ok != (doc.at("exit_code") == 0)) problems.push_back("status and exit_code disagree");
    if (ok != doc.at("error").is_null()) problems.push_back("status and error disagree");
  }
  for (const auto& item : doc.items()) {
    static const char* known[] = {"schema", "experiment", "status", "stage", "exit_code", "error",
                                  "config", "input_hash", "metrics", "artifacts", "warnings"};
    if (std::find(std::begin(known), std::end(known), item.key()) == std::end(known)) {
      problems.push_back("unexpected key '" + item.key() + "'");
    }
  }
  return problems;
}

void write_report(const std::string& path, const Report& r) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot open report for writing", path);
  out << to_json(r).dump(2) << '\n';
  if (!out) throw IoError("failed writing report", path);
}

std::string git_blob_sha1(const std::string& content) {
  const std::string header = "blob " + std::to_string(content.size()) + std::string(1, '\0');
  EVP_MD_CTX* ctx = EVP_MD_CTX_new();
  unsigned char digest[EVP_MAX_MD_SIZE];
  unsigned int length = 0;
  const bool ok = ctx != nullptr && EVP_DigestInit_ex(ctx, EVP_sha1(), nullptr) == 1 &&
                  EVP_DigestUpdate(ctx, header.data(), header.size()) == 1 &&
                  EVP_DigestUpdate(ctx, content.data(), content.size()) == 1 &&
                  EVP_DigestFinal_ex(ctx, digest, &length) == 1;
  EVP_MD_CTX_free(ctx);
  if (!ok) throw Error("SHA-1 digest failed");
  static const char* hex = "0123456789abcdef";
  std::string s;
  for (unsigned int i = 0; i < length; ++i) {
    const unsigned char b = digest[i];
    s += hex[b >> 4];
    s += hex[b & 15];
  }
  return s;
}

}  // namespace fracvortex
