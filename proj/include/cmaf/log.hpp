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

#ifndef CMAF_LOG_HPP_
#define CMAF_LOG_HPP_

#include <iostream>
#include <string>

namespace cmaf {

inline void log_warn(const std::string& msg) {
  std::cerr << "[warn] " << msg << "\n";
}

inline void log_info(const std::string& msg) {
  std::cerr << "[info] " << msg << "\n";
}

}  // namespace cmaf

#endif  // CMAF_LOG_HPP_
