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

#include "cmaf/kernels.hpp"

#include <atomic>
#include <cstdlib>
#include <cstring>

#include "cmaf/error.hpp"

namespace cmaf::kernels {

bool avx2_available() {
#if defined(CMAF_BUILD_AVX2) && (defined(__GNUC__) || defined(__clang__))
  return __builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma");
#else
  return false;
#endif
}

namespace {

const KernelTable* probe() {
  const char* env = std::getenv("CMAF_KERNELS");
  if (env != nullptr) {
    if (std::strcmp(env, "scalar") == 0) return &kScalarTable;
#if defined(CMAF_BUILD_AVX2)
    if (std::strcmp(env, "avx2") == 0 && avx2_available()) return &kAvx2Table;
#endif
    if (std::strcmp(env, "avx2") == 0) {
      fail("CMAF_KERNELS=avx2 requested but AVX2+FMA is unavailable on this host");
    }
    fail("unknown CMAF_KERNELS value '", env, "' (expected scalar or avx2)");
  }
#if defined(CMAF_BUILD_AVX2)
  if (avx2_available()) return &kAvx2Table;
#endif
  return &kScalarTable;
}

std::atomic<const KernelTable*> g_active{nullptr};

}  // namespace

const KernelTable& active() {
  const KernelTable* t = g_active.load(std::memory_order_acquire);
  if (t == nullptr) {
    t = probe();
    g_active.store(t, std::memory_order_release);
  }
  return *t;
}

void force(const char* name) {
  if (std::strcmp(name, "scalar") == 0) {
    g_active.store(&kScalarTable, std::memory_order_release);
    return;
  }
#if defined(CMAF_BUILD_AVX2)
  if (std::strcmp(name, "avx2") == 0) {
    if (!avx2_available()) fail("AVX2 kernels not available on this host");
    g_active.store(&kAvx2Table, std::memory_order_release);
    return;
  }
#endif
  fail("unknown kernel table '", name, "'");
}

}  // namespace cmaf::kernels
