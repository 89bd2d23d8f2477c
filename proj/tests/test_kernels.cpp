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

#include <cmath>
#include <string>
#include <vector>

#include "cmaf/error.hpp"
#include "cmaf/kernels.hpp"
#include "cmaf/rng.hpp"
#include "doctest.h"

using cmaf::Rng;
using cmaf::kernels::KernelTable;
using cmaf::kernels::kScalarTable;

namespace {

std::vector<double> rand_vec(Rng& rng, std::size_t n, double scale = 2.0) {
  std::vector<double> v(n);
  for (double& x : v) x = rng.uniform(-scale, scale);
  return v;
}

// Reductions reassociate; 1e-12 relative covers double-width lanes + FMA.
void close(double a, double b, double rel = 1e-12) {
  CHECK(std::fabs(a - b) <= rel * std::max({1.0, std::fabs(a), std::fabs(b)}));
}

}  // namespace

TEST_SUITE_BEGIN("kernels");

TEST_CASE("scalar reference semantics") {
  const KernelTable& K = kScalarTable;
  const double a[] = {1.0, 2.0, 3.0};
  const double b[] = {4.0, -5.0, 6.0};
  CHECK(K.dot(a, b, 3) == doctest::Approx(1 * 4 - 2 * 5 + 3 * 6));
  CHECK(K.vsum(a, 3) == doctest::Approx(6.0));
  CHECK(K.sumsq(b, 3) == doctest::Approx(16 + 25 + 36));
  CHECK(K.sq_dist(a, b, 3) == doctest::Approx(9 + 49 + 9));

  double y[] = {1.0, 1.0, 1.0};
  K.axpy(2.0, a, y, 3);
  CHECK(y[0] == 3.0);
  CHECK(y[2] == 7.0);

  const double m1[] = {1.0, 2.0};
  const double m2[] = {1.0, 2.0, 3.0, 4.0};
  double out[2];
  K.mm_nn(m1, m2, out, 1, 2, 2);
  CHECK(out[0] == doctest::Approx(7.0));
  CHECK(out[1] == doctest::Approx(10.0));
}

TEST_CASE("matmul identity") {
  const KernelTable& K = cmaf::kernels::active();
  const double m[] = {1.0, 2.0, 3.0, 4.0};
  const double eye[] = {1.0, 0.0, 0.0, 1.0};
  double out[4];
  K.mm_nn(m, eye, out, 2, 2, 2);
  for (int i = 0; i < 4; ++i) CHECK(out[i] == m[i]);
}

TEST_CASE("mm_nt and mm_tn against naive") {
  Rng rng(7);
  const std::size_t m = 5, n = 7, k = 3;
  auto A = rand_vec(rng, m * n);
  auto B = rand_vec(rng, k * n);
  std::vector<double> got(m * k, 0.5), want(m * k, 0.5);
  kScalarTable.mm_nt_acc(A.data(), B.data(), got.data(), m, n, k);
  for (std::size_t i = 0; i < m; ++i)
    for (std::size_t l = 0; l < k; ++l)
      for (std::size_t j = 0; j < n; ++j)
        want[i * k + l] += A[i * n + j] * B[l * n + j];
  for (std::size_t i = 0; i < m * k; ++i) close(got[i], want[i]);

  auto C = rand_vec(rng, m * k);
  auto D = rand_vec(rng, m * n);
  std::vector<double> got2(k * n, -0.25), want2(k * n, -0.25);
  kScalarTable.mm_tn_acc(C.data(), D.data(), got2.data(), m, k, n);
  for (std::size_t i = 0; i < m; ++i)
    for (std::size_t l = 0; l < k; ++l)
      for (std::size_t j = 0; j < n; ++j)
        want2[l * n + j] += C[i * k + l] * D[i * n + j];
  for (std::size_t i = 0; i < k * n; ++i) close(got2[i], want2[i]);
}

#if defined(CMAF_BUILD_AVX2)
TEST_CASE("avx2 equivalence" * doctest::skip(!cmaf::kernels::avx2_available())) {
  const KernelTable& S = kScalarTable;
  const KernelTable& V = cmaf::kernels::kAvx2Table;
  Rng rng(42);

  for (std::size_t n : {1u, 3u, 4u, 7u, 8u, 12u, 64u, 129u, 1000u}) {
    auto a = rand_vec(rng, n);
    auto b = rand_vec(rng, n);

    // reductions: tolerance equivalence (reassociation + FMA)
    close(S.dot(a.data(), b.data(), n), V.dot(a.data(), b.data(), n));
    close(S.vsum(a.data(), n), V.vsum(a.data(), n));
    close(S.sumsq(a.data(), n), V.sumsq(a.data(), n));
    close(S.sq_dist(a.data(), b.data(), n), V.sq_dist(a.data(), b.data(), n));

    // elementwise: bit-identical (no FMA, same rounding order)
    std::vector<double> s_out(n), v_out(n);
    S.vadd(a.data(), b.data(), s_out.data(), n);
    V.vadd(a.data(), b.data(), v_out.data(), n);
    CHECK(s_out == v_out);
    S.vmul(a.data(), b.data(), s_out.data(), n);
    V.vmul(a.data(), b.data(), v_out.data(), n);
    CHECK(s_out == v_out);

    auto ys = a;
    auto yv = a;
    S.axpy(1.7, b.data(), ys.data(), n);
    V.axpy(1.7, b.data(), yv.data(), n);
    CHECK(ys == yv);

    auto xs = a;
    auto xv = a;
    S.scale(-0.3, xs.data(), n);
    V.scale(-0.3, xv.data(), n);
    CHECK(xs == xv);
  }
}

TEST_CASE("avx2 matmul equivalence" *
          doctest::skip(!cmaf::kernels::avx2_available())) {
  const KernelTable& S = kScalarTable;
  const KernelTable& V = cmaf::kernels::kAvx2Table;
  Rng rng(43);
  for (int trial = 0; trial < 20; ++trial) {
    const std::size_t m = 1 + rng.below(9);
    const std::size_t k = 1 + rng.below(9);
    const std::size_t n = 1 + rng.below(9);
    auto A = rand_vec(rng, m * k);
    auto B = rand_vec(rng, k * n);
    std::vector<double> cs(m * n), cv(m * n);
    S.mm_nn(A.data(), B.data(), cs.data(), m, k, n);
    V.mm_nn(A.data(), B.data(), cv.data(), m, k, n);
    CHECK(cs == cv);  // axpy-based on both sides, no FMA

    auto G = rand_vec(rng, m * n);
    std::vector<double> ds(m * k, 0.0), dv(m * k, 0.0);
    S.mm_nt_acc(G.data(), B.data(), ds.data(), m, n, k);
    V.mm_nt_acc(G.data(), B.data(), dv.data(), m, n, k);
    for (std::size_t i = 0; i < m * k; ++i) close(ds[i], dv[i]);

    std::vector<double> es(k * n, 0.0), ev(k * n, 0.0);
    S.mm_tn_acc(A.data(), G.data(), es.data(), m, k, n);
    V.mm_tn_acc(A.data(), G.data(), ev.data(), m, k, n);
    CHECK(es == ev);
  }
}

TEST_CASE("avx2 adam_update bit-identical" *
          doctest::skip(!cmaf::kernels::avx2_available())) {
  const KernelTable& S = kScalarTable;
  const KernelTable& V = cmaf::kernels::kAvx2Table;
  Rng rng(44);
  for (std::size_t n : {1u, 5u, 8u, 33u}) {
    auto g = rand_vec(rng, n, 0.5);
    auto p0 = rand_vec(rng, n);
    auto m0 = rand_vec(rng, n, 0.1);
    auto v0 = rand_vec(rng, n, 0.01);
    for (double& x : v0) x = std::fabs(x);
    auto ps = p0, ms = m0, vs = v0;
    auto pv = p0, mv = m0, vv = v0;
    S.adam_update(ps.data(), g.data(), ms.data(), vs.data(), n, 1e-3, 0.9,
                  0.999, 1.0 / (1 - 0.9), 1.0 / (1 - 0.999), 1e-8);
    V.adam_update(pv.data(), g.data(), mv.data(), vv.data(), n, 1e-3, 0.9,
                  0.999, 1.0 / (1 - 0.9), 1.0 / (1 - 0.999), 1e-8);
    CHECK(ps == pv);
    CHECK(ms == mv);
    CHECK(vs == vv);
  }
}
#endif  // CMAF_BUILD_AVX2

TEST_CASE("force and active table") {
  cmaf::kernels::force("scalar");
  CHECK(std::string(cmaf::kernels::active().name) == "scalar");
  if (cmaf::kernels::avx2_available()) {
    cmaf::kernels::force("avx2");
    CHECK(std::string(cmaf::kernels::active().name) == "avx2");
  }
  CHECK_THROWS_AS(cmaf::kernels::force("neon"), cmaf::Error);
}

TEST_SUITE_END();
