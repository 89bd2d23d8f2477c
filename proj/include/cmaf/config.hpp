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
//
// Key-value run configuration: one `key = value` pair per line, `#` starts
// a comment. Keys are dotted (training.learning_rate). Every key must be
// consumed by a getter; reject_unknown() turns leftovers into errors.

#ifndef CMAF_CONFIG_HPP_
#define CMAF_CONFIG_HPP_

#include <cstdint>
#include <map>
#include <string>

namespace cmaf {

class KvConfig {
 public:
  KvConfig() = default;

  static KvConfig from_file(const std::string& path);
  static KvConfig from_string(const std::string& text,
                              const std::string& origin = "<string>");

  // Command-line overrides win over file contents.
  void set(const std::string& key, const std::string& value);

  bool has(const std::string& key) const { return values_.count(key) > 0; }

  std::string get_string(const std::string& key, const std::string& def);
  double get_double(const std::string& key, double def);
  int get_int(const std::string& key, int def);
  std::uint64_t get_u64(const std::string& key, std::uint64_t def);
  bool get_bool(const std::string& key, bool def);

  // Throws ConfigError naming every key no getter consumed.
  void reject_unknown() const;

 private:
  const std::string* find(const std::string& key);

  std::map<std::string, std::string> values_;
  std::map<std::string, bool> consumed_;
  std::string origin_ = "<empty>";
};

}  // namespace cmaf

#endif  // CMAF_CONFIG_HPP_
