#pragma once
// Reader for the golden key-value fixture: `key = value` lines, `#` comments.

#include <fstream>
#include <map>
#include <stdexcept>
#include <string>

namespace fixture {

inline std::map<std::string, std::string> load(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open fixture " + path);
  std::map<std::string, std::string> kv;
  std::string line;
  while (std::getline(in, line)) {
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    const auto eq = line.find('=');
    if (eq == std::string::npos) continue;
    auto trim = [](std::string s) {
      const auto b = s.find_first_not_of(" \t\r");
      const auto e = s.find_last_not_of(" \t\r");
      return b == std::string::npos ? std::string() : s.substr(b, e - b + 1);
    };
    kv[trim(line.substr(0, eq))] = trim(line.substr(eq + 1));
  }
  return kv;
}

inline double number(const std::map<std::string, std::string>& kv, const std::string& key) {
  const auto it = kv.find(key);
  if (it == kv.end()) throw std::runtime_error("fixture key missing: " + key);
  return std::stod(it->second);
}

inline std::string golden_path() { return std::string(EAMAC_FIXTURE_DIR) + "/golden_mi.txt"; }

}  // namespace fixture
