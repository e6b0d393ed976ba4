#pragma once

#include <algorithm>
#include <cstddef>

namespace hake::net {

// Row-major matrix kernels tuned for the conv/dense shapes this project
// trains: accumulators live in fixed-size register tiles so the compiler
// vectorizes the hot loops. All training math funnels through these three.

/// C[M,N] (+)= A[M,K] * B[K,N]
template <class T>
void gemm_nn(const T* a, const T* b, T* c, int m, int k, int n, bool accumulate) {
  constexpr int JT = 32;  // output-column tile held in registers
  if (!accumulate) {
    for (std::size_t i = 0; i < static_cast<std::size_t>(m) * n; ++i) c[i] = T(0);
  }
  int i0 = 0;
  for (; i0 + 4 <= m; i0 += 4) {
    const T* a0 = a + static_cast<std::size_t>(i0) * k;
    const T* a1 = a0 + k;
    const T* a2 = a1 + k;
    const T* a3 = a2 + k;
    int j0 = 0;
    for (; j0 + JT <= n; j0 += JT) {
      T acc0[JT] = {}, acc1[JT] = {}, acc2[JT] = {}, acc3[JT] = {};
      for (int p = 0; p < k; ++p) {
        const T* bp = b + static_cast<std::size_t>(p) * n + j0;
        const T w0 = a0[p], w1 = a1[p], w2 = a2[p], w3 = a3[p];
        for (int v = 0; v < JT; ++v) {
          const T bv = bp[v];
          acc0[v] += w0 * bv;
          acc1[v] += w1 * bv;
          acc2[v] += w2 * bv;
          acc3[v] += w3 * bv;
        }
      }
      T* c0 = c + static_cast<std::size_t>(i0) * n + j0;
      T* c1 = c0 + n;
      T* c2 = c1 + n;
      T* c3 = c2 + n;
      for (int v = 0; v < JT; ++v) {
        c0[v] += acc0[v];
        c1[v] += acc1[v];
        c2[v] += acc2[v];
        c3[v] += acc3[v];
      }
    }
    if (j0 < n) {
      T* c0 = c + static_cast<std::size_t>(i0) * n;
      T* c1 = c0 + n;
      T* c2 = c1 + n;
      T* c3 = c2 + n;
      for (int p = 0; p < k; ++p) {
        const T* bp = b + static_cast<std::size_t>(p) * n;
        const T w0 = a0[p], w1 = a1[p], w2 = a2[p], w3 = a3[p];
        for (int j = j0; j < n; ++j) {
          const T bv = bp[j];
          c0[j] += w0 * bv;
          c1[j] += w1 * bv;
          c2[j] += w2 * bv;
          c3[j] += w3 * bv;
        }
      }
    }
  }
  for (; i0 < m; ++i0) {
    const T* ai = a + static_cast<std::size_t>(i0) * k;
    T* ci = c + static_cast<std::size_t>(i0) * n;
    for (int p = 0; p < k; ++p) {
      const T w = ai[p];
      const T* bp = b + static_cast<std::size_t>(p) * n;
      for (int j = 0; j < n; ++j) ci[j] += w * bp[j];
    }
  }
}

/// C[M,N] (+)= A^T * B with A stored [K,M]
template <class T>
void gemm_tn(const T* a, const T* b, T* c, int m, int k, int n, bool accumulate) {
  constexpr int JT = 32;
  if (!accumulate) {
    for (std::size_t i = 0; i < static_cast<std::size_t>(m) * n; ++i) c[i] = T(0);
  }
  int i0 = 0;
  for (; i0 + 4 <= m; i0 += 4) {
    int j0 = 0;
    for (; j0 + JT <= n; j0 += JT) {
      T acc0[JT] = {}, acc1[JT] = {}, acc2[JT] = {}, acc3[JT] = {};
      for (int p = 0; p < k; ++p) {
        const T* ap = a + static_cast<std::size_t>(p) * m + i0;
        const T* bp = b + static_cast<std::size_t>(p) * n + j0;
        const T w0 = ap[0], w1 = ap[1], w2 = ap[2], w3 = ap[3];
        for (int v = 0; v < JT; ++v) {
          const T bv = bp[v];
          acc0[v] += w0 * bv;
          acc1[v] += w1 * bv;
          acc2[v] += w2 * bv;
          acc3[v] += w3 * bv;
        }
      }
      T* c0 = c + static_cast<std::size_t>(i0) * n + j0;
      T* c1 = c0 + n;
      T* c2 = c1 + n;
      T* c3 = c2 + n;
      for (int v = 0; v < JT; ++v) {
        c0[v] += acc0[v];
        c1[v] += acc1[v];
        c2[v] += acc2[v];
        c3[v] += acc3[v];
      }
    }
    if (j0 < n) {
      T* c0 = c + static_cast<std::size_t>(i0) * n;
      T* c1 = c0 + n;
      T* c2 = c1 + n;
      T* c3 = c2 + n;
      for (int p = 0; p < k; ++p) {
        const T* ap = a + static_cast<std::size_t>(p) * m + i0;
        const T* bp = b + static_cast<std::size_t>(p) * n;
        for (int j = j0; j < n; ++j) {
          const T bv = bp[j];
          c0[j] += ap[0] * bv;
          c1[j] += ap[1] * bv;
          c2[j] += ap[2] * bv;
          c3[j] += ap[3] * bv;
        }
      }
    }
  }
  for (; i0 < m; ++i0) {
    T* ci = c + static_cast<std::size_t>(i0) * n;
    for (int p = 0; p < k; ++p) {
      const T w = a[static_cast<std::size_t>(p) * m + i0];
      const T* bp = b + static_cast<std::size_t>(p) * n;
      for (int j = 0; j < n; ++j) ci[j] += w * bp[j];
    }
  }
}

/// C[M,N] (+)= A * B^T with B stored [N,K]
template <class T>
void gemm_nt(const T* a, const T* b, T* c, int m, int k, int n, bool accumulate) {
  constexpr int V = 16;  // reduction lanes per accumulator array
  auto tail_dot = [](const T* x, const T* y, int from, int to) {
    T s = T(0);
    for (int p = from; p < to; ++p) s += x[p] * y[p];
    return s;
  };
  auto store = [&](T* dst, T value) {
    if (accumulate)
      *dst += value;
    else
      *dst = value;
  };
  int i0 = 0;
  for (; i0 + 4 <= m; i0 += 4) {
    const T* a0 = a + static_cast<std::size_t>(i0) * k;
    const T* a1 = a0 + k;
    const T* a2 = a1 + k;
    const T* a3 = a2 + k;
    int j0 = 0;
    for (; j0 + 2 <= n; j0 += 2) {
      const T* b0 = b + static_cast<std::size_t>(j0) * k;
      const T* b1 = b0 + k;
      T v00[V] = {}, v01[V] = {}, v10[V] = {}, v11[V] = {};
      T v20[V] = {}, v21[V] = {}, v30[V] = {}, v31[V] = {};
      int p = 0;
      for (; p + V <= k; p += V) {
        for (int v = 0; v < V; ++v) {
          const T x0 = b0[p + v], x1 = b1[p + v];
          v00[v] += a0[p + v] * x0;
          v01[v] += a0[p + v] * x1;
          v10[v] += a1[p + v] * x0;
          v11[v] += a1[p + v] * x1;
          v20[v] += a2[p + v] * x0;
          v21[v] += a2[p + v] * x1;
          v30[v] += a3[p + v] * x0;
          v31[v] += a3[p + v] * x1;
        }
      }
      T c00 = 0, c01 = 0, c10 = 0, c11 = 0, c20 = 0, c21 = 0, c30 = 0, c31 = 0;
      for (int v = 0; v < V; ++v) {
        c00 += v00[v];
        c01 += v01[v];
        c10 += v10[v];
        c11 += v11[v];
        c20 += v20[v];
        c21 += v21[v];
        c30 += v30[v];
        c31 += v31[v];
      }
      c00 += tail_dot(a0, b0, p, k);
      c01 += tail_dot(a0, b1, p, k);
      c10 += tail_dot(a1, b0, p, k);
      c11 += tail_dot(a1, b1, p, k);
      c20 += tail_dot(a2, b0, p, k);
      c21 += tail_dot(a2, b1, p, k);
      c30 += tail_dot(a3, b0, p, k);
      c31 += tail_dot(a3, b1, p, k);
      T* r0 = c + static_cast<std::size_t>(i0) * n + j0;
      store(r0, c00);
      store(r0 + 1, c01);
      store(r0 + n, c10);
      store(r0 + n + 1, c11);
      store(r0 + 2 * n, c20);
      store(r0 + 2 * n + 1, c21);
      store(r0 + 3 * n, c30);
      store(r0 + 3 * n + 1, c31);
    }
    for (; j0 < n; ++j0) {
      const T* bs = b + static_cast<std::size_t>(j0) * k;
      const T* rows[4] = {a0, a1, a2, a3};
      for (int r = 0; r < 4; ++r)
        store(c + static_cast<std::size_t>(i0 + r) * n + j0, tail_dot(rows[r], bs, 0, k));
    }
  }
  for (; i0 < m; ++i0) {
    const T* ar = a + static_cast<std::size_t>(i0) * k;
    for (int j = 0; j < n; ++j)
      store(c + static_cast<std::size_t>(i0) * n + j,
            tail_dot(ar, b + static_cast<std::size_t>(j) * k, 0, k));
  }
}

}  // namespace hake::net
