#include "mapper/manifest.hpp"

#include <cstdio>
#include <fstream>
#include <iterator>
#include <stdexcept>

#ifndef MAPPER_VERSION
#define MAPPER_VERSION "0.0.0"
#endif

namespace mapper {

std::string library_version() { return MAPPER_VERSION; }

std::string fnv1a_hex(std::string_view bytes) {
  std::uint64_t h = 14695981039346656037ull;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 1099511628211ull;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

std::string hash_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open '" + path + "'");
  const std::string bytes((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  return fnv1a_hex(bytes);
}

void RunManifest::add_input(const std::string& path) { input_hashes[path] = hash_file(path); }

nlohmann::json RunManifest::reproducibility_key() const {
  nlohmann::json j = {{"command", command}, {"arguments", arguments}, {"inputs", input_hashes},
                      {"config", config},   {"version", version}};
  j["seed"] = seed ? nlohmann::json(*seed) : nlohmann::json(nullptr);
  return j;
}

nlohmann::json to_json(const RunManifest& m) {
  nlohmann::json j = m.reproducibility_key();
  j["outputs"] = m.output_hashes;
  j["wall_seconds"] = m.wall_seconds;
  return j;
}

RunManifest manifest_from_json(const nlohmann::json& j) {
  RunManifest m;
  m.command = j.at("command").get<std::string>();
  m.arguments = j.at("arguments").get<std::vector<std::string>>();
  m.input_hashes = j.at("inputs").get<std::map<std::string, std::string>>();
  m.output_hashes = j.value("outputs", std::map<std::string, std::string>{});
  m.config = j.value("config", nlohmann::json::object());
  m.version = j.at("version").get<std::string>();
  if (!j.at("seed").is_null()) m.seed = j.at("seed").get<std::uint64_t>();
  m.wall_seconds = j.value("wall_seconds", 0.0);
  return m;
}

}  // namespace mapper
