#pragma once

#include <map>
#include <string>
#include <vector>

namespace netreplica {

// Provenance record written next to every artifact-producing subcommand's
// output as "<output>.manifest.json".
struct RunManifest {
  std::string tool_version;
  std::string subcommand;
  std::map<std::string, std::string> parameters;  // resolved, after defaults
  std::map<std::string, std::string> input_digests;   // path -> sha256
  std::map<std::string, std::string> output_digests;  // path -> sha256
  double duration_s = 0.0;

  void add_input(const std::string& path);
  void add_output(const std::string& path);
  void write(const std::string& output_path) const;  // writes <output_path>.manifest.json
};

}  // namespace netreplica
