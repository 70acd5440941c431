#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace fieldgen::report {

inline constexpr int kArtifactFormatVersion = 1;

/// FNV-1a 64-bit checksum of a file's bytes, hex encoded.
std::string file_checksum(const std::string& path);

/// Run record written next to every command's outputs, on success and
/// failure: the exact configuration, timestamps, build id, and a checksum per
/// emitted file. Enough to re-run the command bit-for-bit.
class RunManifest {
 public:
  RunManifest(std::string out_dir, std::string command, std::string config_json);

  void add_output(const std::string& filename);
  void note(const std::string& key, const std::string& value);

  /// Writes manifest.json. status: "success" or "failure"; error message kept
  /// on the failure path.
  void write(const std::string& status, const std::string& error = "");

 private:
  std::string out_dir_;
  std::string command_;
  std::string config_json_;
  std::string started_;
  std::vector<std::string> outputs_;
  std::vector<std::pair<std::string, std::string>> notes_;
};

/// Build identifier baked at configure time (git describe when available).
std::string build_id();

}  // namespace fieldgen::report
