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
// Scalar reference kernels. These define the semantics the AVX2 variants are
// tested against.

#include <cmath>
#include <cstring>

#include "cmaf/kernels.hpp"

namespace cmaf::kernels {
namespace scalar {

double dot(const double* a, const double* b, std::size_t n) {
  double s = 0.0;
  for (std::size_t i = 0; i < n; ++i) s += a[i] * b[i];
  return s;
}

void axpy(double alpha, const double* x, double* y, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) y[i] += alpha * x[i];
}

void scale(double alpha, double* x, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) x[i] *= alpha;
}

void vadd(const double* a, const double* b, double* out, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) out[i] = a[i] + b[i];
}

void vmul(const double* a, const double* b, double* out, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) out[i] = a[i] * b[i];
}

double vsum(const double* a, std::size_t n) {
  double s = 0.0;
  for (std::size_t i = 0; i < n; ++i) s += a[i];
  return s;
}

double sumsq(const double* a, std::size_t n) {
  double s = 0.0;
  for (std::size_t i = 0; i < n; ++i) s += a[i] * a[i];
  return s;
}

double sq_dist(const double* a, const double* b, std::size_t n) {
  double s = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double d = a[i] - b[i];
    s += d * d;
  }
  return s;
}

// Row-streaming matmul: C row i accumulates axpy over rows of B. Keeps the
// rounding order identical to the AVX2 variant.
void mm_nn(const double* a, const double* b, double* c, std::size_t m,
           std::size_t k, std::size_t n) {
  std::memset(c, 0, m * n * sizeof(double));
  for (std::size_t i = 0; i < m; ++i) {
    const double* arow = a + i * k;
    double* crow = c + i * n;
    for (std::size_t l = 0; l < k; ++l) axpy(arow[l], b + l * n, crow, n);
  }
}

void mm_nt_acc(const double* a, const double* b, double* c, std::size_t m,
               std::size_t n, std::size_t k) {
  for (std::size_t i = 0; i < m; ++i) {
    const double* arow = a + i * n;
    double* crow = c + i * k;
    for (std::size_t l = 0; l < k; ++l) crow[l] += dot(arow, b + l * n, n);
  }
}

void mm_tn_acc(const double* a, const double* b, double* c, std::size_t m,
               std::size_t k, std::size_t n) {
  for (std::size_t i = 0; i < m; ++i) {
    const double* arow = a + i * k;
    const double* brow = b + i * n;
    for (std::size_t l = 0; l < k; ++l) axpy(arow[l], brow, c + l * n, n);
  }
}

void adam_update(double* p, const double* g, double* m, double* v,
                 std::size_t n, double lr, double b1, double b2, double c1,
                 double c2, double eps) {
  for (std::size_t i = 0; i < n; ++i) {
    m[i] = b1 * m[i] + (1.0 - b1) * g[i];
    v[i] = b2 * v[i] + (1.0 - b2) * (g[i] * g[i]);
    const double mhat = m[i] * c1;
    const double vhat = v[i] * c2;
    p[i] -= lr * (mhat / (std::sqrt(vhat) + eps));
  }
}

}  // namespace scalar

const KernelTable kScalarTable = {
    "scalar",         scalar::dot,    scalar::axpy,      scalar::scale,
    scalar::vadd,     scalar::vmul,   scalar::vsum,      scalar::sumsq,
    scalar::sq_dist,  scalar::mm_nn,  scalar::mm_nt_acc, scalar::mm_tn_acc,
    scalar::adam_update,
};

}  // namespace cmaf::kernels
