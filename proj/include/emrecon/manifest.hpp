#pragma once

#include <cstdint>
#include <map>
#include <string>

namespace emrecon {

/// Record of one CLI invocation: command, every resolved parameter, and
/// checksums of inputs and outputs. Written atomically next to the outputs;
/// re-running the recorded command reproduces the outputs bit-identically.
struct RunManifest {
  std::string command;
  std::map<std::string, std::string> params;
  std::map<std::string, std::string> inputs;   // path -> fnv1a64 hex
  std::map<std::string, std::string> outputs;  // path -> fnv1a64 hex
};

uint64_t fnv1a64(const void* data, size_t len);
std::string file_checksum(const std::string& path);

void save_manifest(const RunManifest& manifest, const std::string& path);
RunManifest load_manifest(const std::string& path);

}  // namespace emrecon
