#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

namespace mapper {

std::string library_version();

// 64-bit FNV-1a, lowercase hex.
std::string fnv1a_hex(std::string_view bytes);
std::string hash_file(const std::string& path);

struct RunManifest {
  std::string command;
  std::vector<std::string> arguments;
  std::map<std::string, std::string> input_hashes;   // path -> hash
  std::map<std::string, std::string> output_hashes;  // path (or "stdout") -> hash
  nlohmann::json config = nlohmann::json::object();
  std::string version = library_version();
  std::optional<std::uint64_t> seed;
  double wall_seconds = 0;

  void add_input(const std::string& path);
  // Everything except wall time and output hashes; equal keys mean equal outputs.
  nlohmann::json reproducibility_key() const;
};

nlohmann::json to_json(const RunManifest& m);
RunManifest manifest_from_json(const nlohmann::json& j);

}  // namespace mapper
