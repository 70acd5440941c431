#include "fieldgen/report/manifest.hpp"

#include <chrono>
#include <cstdio>
#include <ctime>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include "json.hpp"

#ifndef FIELDGEN_BUILD_ID
#define FIELDGEN_BUILD_ID "untracked"
#endif

namespace fieldgen::report {

using nlohmann::json;

std::string build_id() { return FIELDGEN_BUILD_ID; }

std::string file_checksum(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("checksum: cannot open " + path);
  std::uint64_t hash = 0xcbf29ce484222325ULL;
  char buf[8192];
  while (in.read(buf, sizeof(buf)) || in.gcount() > 0) {
    const std::streamsize n = in.gcount();
    for (std::streamsize i = 0; i < n; ++i) {
      hash ^= static_cast<unsigned char>(buf[i]);
      hash *= 0x100000001b3ULL;
    }
    if (!in) break;
  }
  char hex[24];
  std::snprintf(hex, sizeof(hex), "fnv1a64:%016llx", static_cast<unsigned long long>(hash));
  return hex;
}

namespace {

std::string now_iso8601() {
  const auto now = std::chrono::system_clock::now();
  const std::time_t t = std::chrono::system_clock::to_time_t(now);
  char buf[32];
  std::tm tm_utc{};
  gmtime_r(&t, &tm_utc);
  std::strftime(buf, sizeof(buf), "%Y-%m-%dT%H:%M:%SZ", &tm_utc);
  return buf;
}

}  // namespace

RunManifest::RunManifest(std::string out_dir, std::string command, std::string config_json)
    : out_dir_(std::move(out_dir)),
      command_(std::move(command)),
      config_json_(std::move(config_json)),
      started_(now_iso8601()) {}

void RunManifest::add_output(const std::string& filename) { outputs_.push_back(filename); }

void RunManifest::note(const std::string& key, const std::string& value) {
  notes_.emplace_back(key, value);
}

void RunManifest::write(const std::string& status, const std::string& error) {
  json j;
  j["artifact_format_version"] = kArtifactFormatVersion;
  j["command"] = command_;
  j["config"] = json::parse(config_json_, nullptr, false);
  if (j["config"].is_discarded()) j["config"] = config_json_;
  j["build_id"] = build_id();
  j["started"] = started_;
  j["finished"] = now_iso8601();
  j["status"] = status;
  if (!error.empty()) j["error"] = error;
  json checks = json::object();
  for (const std::string& f : outputs_) {
    try {
      checks[f] = file_checksum(out_dir_ + "/" + f);
    } catch (const std::exception&) {
      checks[f] = "missing";
    }
  }
  j["outputs"] = checks;
  for (const auto& [k, v] : notes_) j["notes"][k] = v;

  std::ofstream out(out_dir_ + "/manifest.json");
  if (!out) throw std::runtime_error("cannot write manifest in " + out_dir_);
  out << j.dump(2) << "\n";
}

}  // namespace fieldgen::report
