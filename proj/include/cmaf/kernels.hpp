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
// Double-precision arithmetic kernels behind the autodiff, signal and
// retrieval code. Two implementations exist: a scalar reference and an AVX2
// variant, selected once at startup. Elementwise kernels (vadd, vmul, scale,
// axpy, adam_update) keep the scalar rounding order (no FMA contraction), so
// both variants produce bit-identical results; reduction kernels (dot, sumsq,
// sq_dist, mm_nt_acc) reassociate and are equivalence-tested to tight
// tolerances instead.

#ifndef CMAF_KERNELS_HPP_
#define CMAF_KERNELS_HPP_

#include <cstddef>

namespace cmaf::kernels {

struct KernelTable {
  const char* name;

  // sum_i a[i]*b[i]
  double (*dot)(const double* a, const double* b, std::size_t n);
  // y[i] += alpha * x[i]
  void (*axpy)(double alpha, const double* x, double* y, std::size_t n);
  // x[i] *= alpha
  void (*scale)(double alpha, double* x, std::size_t n);
  // out[i] = a[i] + b[i]
  void (*vadd)(const double* a, const double* b, double* out, std::size_t n);
  // out[i] = a[i] * b[i]
  void (*vmul)(const double* a, const double* b, double* out, std::size_t n);
  double (*vsum)(const double* a, std::size_t n);
  double (*sumsq)(const double* a, std::size_t n);
  // sum_i (a[i]-b[i])^2
  double (*sq_dist)(const double* a, const double* b, std::size_t n);
  // C(m x n) = A(m x k) * B(k x n), C overwritten. Row-major.
  void (*mm_nn)(const double* a, const double* b, double* c, std::size_t m,
                std::size_t k, std::size_t n);
  // C(m x k) += A(m x n) * B(k x n)^T. Row-major.
  void (*mm_nt_acc)(const double* a, const double* b, double* c, std::size_t m,
                    std::size_t n, std::size_t k);
  // C(k x n) += A(m x k)^T * B(m x n). Row-major.
  void (*mm_tn_acc)(const double* a, const double* b, double* c, std::size_t m,
                    std::size_t k, std::size_t n);
  // Bias-corrected Adam update, all buffers length n:
  //   m = b1*m + (1-b1)*g;  v = b2*v + (1-b2)*g*g
  //   p -= lr * (m*c1) / (sqrt(v*c2) + eps)     with c1=1/(1-b1^t), c2=1/(1-b2^t)
  void (*adam_update)(double* p, const double* g, double* m, double* v,
                      std::size_t n, double lr, double b1, double b2, double c1,
                      double c2, double eps);
};

extern const KernelTable kScalarTable;
#if defined(CMAF_BUILD_AVX2)
extern const KernelTable kAvx2Table;
#endif

// Table in use. Chosen on first call: AVX2 when the CPU supports avx2+fma and
// the variant was compiled in, scalar otherwise. CMAF_KERNELS=scalar|avx2 in
// the environment overrides the probe.
const KernelTable& active();

// Force a specific table ("scalar" or "avx2"); throws if unavailable.
// Used by the equivalence tests.
void force(const char* name);

bool avx2_available();

}  // namespace cmaf::kernels

#endif  // CMAF_KERNELS_HPP_
