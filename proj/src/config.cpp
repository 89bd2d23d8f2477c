// Copyright 2026 cmaf authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "cmaf/config.hpp"

#include <fstream>
#include <sstream>

#include "cmaf/error.hpp"

namespace cmaf {

namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

}  // namespace

KvConfig KvConfig::from_file(const std::string& path) {
  std::ifstream is(path);
  if (!is.good()) fail_config("config file not found or unreadable: ", path);
  std::ostringstream ss;
  ss << is.rdbuf();
  return from_string(ss.str(), path);
}

KvConfig KvConfig::from_string(const std::string& text,
                               const std::string& origin) {
  KvConfig cfg;
  cfg.origin_ = origin;
  std::istringstream is(text);
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(is, line)) {
    ++lineno;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line = line.substr(0, hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos)
      fail_config(origin, ":", lineno, ": expected 'key = value', got '", line,
                  "'");
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    if (key.empty()) fail_config(origin, ":", lineno, ": empty key");
    if (cfg.values_.count(key) > 0)
      fail_config(origin, ":", lineno, ": duplicate key '", key, "'");
    cfg.values_[key] = value;
    cfg.consumed_[key] = false;
  }
  return cfg;
}

void KvConfig::set(const std::string& key, const std::string& value) {
  values_[key] = value;
  consumed_[key] = false;
}

const std::string* KvConfig::find(const std::string& key) {
  auto it = values_.find(key);
  if (it == values_.end()) return nullptr;
  consumed_[key] = true;
  return &it->second;
}

std::string KvConfig::get_string(const std::string& key,
                                 const std::string& def) {
  const std::string* v = find(key);
  return v != nullptr ? *v : def;
}

double KvConfig::get_double(const std::string& key, double def) {
  const std::string* v = find(key);
  if (v == nullptr) return def;
  try {
    std::size_t pos = 0;
    const double d = std::stod(*v, &pos);
    if (pos != v->size()) throw std::invalid_argument("");
    return d;
  } catch (const std::exception&) {
    fail_config(origin_, ": key '", key, "' expects a number, got '", *v, "'");
  }
}

int KvConfig::get_int(const std::string& key, int def) {
  const std::string* v = find(key);
  if (v == nullptr) return def;
  try {
    std::size_t pos = 0;
    const int d = std::stoi(*v, &pos);
    if (pos != v->size()) throw std::invalid_argument("");
    return d;
  } catch (const std::exception&) {
    fail_config(origin_, ": key '", key, "' expects an integer, got '", *v,
                "'");
  }
}

std::uint64_t KvConfig::get_u64(const std::string& key, std::uint64_t def) {
  const std::string* v = find(key);
  if (v == nullptr) return def;
  try {
    std::size_t pos = 0;
    const unsigned long long d = std::stoull(*v, &pos);
    if (pos != v->size()) throw std::invalid_argument("");
    return static_cast<std::uint64_t>(d);
  } catch (const std::exception&) {
    fail_config(origin_, ": key '", key,
                "' expects an unsigned integer, got '", *v, "'");
  }
}

bool KvConfig::get_bool(const std::string& key, bool def) {
  const std::string* v = find(key);
  if (v == nullptr) return def;
  if (*v == "true" || *v == "1" || *v == "yes") return true;
  if (*v == "false" || *v == "0" || *v == "no") return false;
  fail_config(origin_, ": key '", key, "' expects true/false, got '", *v, "'");
}

void KvConfig::reject_unknown() const {
  std::string unknown;
  for (const auto& [key, used] : consumed_) {
    if (!used) unknown += (unknown.empty() ? "" : ", ") + key;
  }
  if (!unknown.empty())
    fail_config(origin_, ": unknown configuration keys: ", unknown);
}

}  // namespace cmaf
