#include "netreplica/manifest.hpp"

#include <fstream>
#include <stdexcept>

#include <nlohmann/json.hpp>

#include "netreplica/hash.hpp"

namespace netreplica {

void RunManifest::add_input(const std::string& path) {
  input_digests[path] = sha256_file_hex(path);
}

void RunManifest::add_output(const std::string& path) {
  output_digests[path] = sha256_file_hex(path);
}

void RunManifest::write(const std::string& output_path) const {
  nlohmann::ordered_json j;
  j["tool_version"] = tool_version;
  j["subcommand"] = subcommand;
  j["parameters"] = parameters;
  j["inputs"] = input_digests;
  j["outputs"] = output_digests;
  j["duration_s"] = duration_s;
  const std::string path = output_path + ".manifest.json";
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw std::runtime_error("cannot write " + path);
  out << j.dump(2) << '\n';
}

}  // namespace netreplica
