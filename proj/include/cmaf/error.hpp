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

#ifndef CMAF_ERROR_HPP_
#define CMAF_ERROR_HPP_

#include <sstream>
#include <stdexcept>
#include <string>

namespace cmaf {

// Runtime failure inside the pipeline (bad data, numeric blowup, I/O).
class Error : public std::runtime_error {
 public:
  explicit Error(const std::string& msg) : std::runtime_error(msg) {}
};

// User-facing configuration / usage problem. CLI maps this to exit code 2.
class ConfigError : public std::runtime_error {
 public:
  explicit ConfigError(const std::string& msg) : std::runtime_error(msg) {}
};

namespace detail {
inline void format_into(std::ostringstream&) {}
template <typename T, typename... Rest>
void format_into(std::ostringstream& os, T&& v, Rest&&... rest) {
  os << std::forward<T>(v);
  format_into(os, std::forward<Rest>(rest)...);
}
}  // namespace detail

template <typename... Args>
std::string strcat_msg(Args&&... args) {
  std::ostringstream os;
  detail::format_into(os, std::forward<Args>(args)...);
  return os.str();
}

template <typename... Args>
[[noreturn]] void fail(Args&&... args) {
  throw Error(strcat_msg(std::forward<Args>(args)...));
}

template <typename... Args>
[[noreturn]] void fail_config(Args&&... args) {
  throw ConfigError(strcat_msg(std::forward<Args>(args)...));
}

template <typename... Args>
void check(bool cond, Args&&... args) {
  if (!cond) fail(std::forward<Args>(args)...);
}

}  // namespace cmaf

#endif  // CMAF_ERROR_HPP_
