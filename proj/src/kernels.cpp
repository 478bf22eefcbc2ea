#include "unicon/kernels.hpp"

#if defined(__x86_64__) || defined(_M_X64)
#include <immintrin.h>
#define UNICON_X86_64 1
#else
#define UNICON_X86_64 0
#endif

namespace unicon::kernels {

namespace ref {

cplx dot_conj(const cplx* a, const cplx* b, std::size_t n) {
  double re = 0.0, im = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double ar = a[i].real(), ai = a[i].imag();
    const double br = b[i].real(), bi = b[i].imag();
    re += ar * br + ai * bi;
    im += ar * bi - ai * br;
  }
  return {re, im};
}

double norm_sq(const cplx* a, std::size_t n) {
  double s = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    s += a[i].real() * a[i].real() + a[i].imag() * a[i].imag();
  }
  return s;
}

}  // namespace ref

#if UNICON_X86_64

namespace avx2 {

__attribute__((target("avx2,fma"))) static double hsum(__m256d v) {
  __m128d lo = _mm256_castpd256_pd128(v);
  __m128d hi = _mm256_extractf128_pd(v, 1);
  __m128d s = _mm_add_pd(lo, hi);
  return _mm_cvtsd_f64(_mm_add_sd(s, _mm_unpackhi_pd(s, s)));
}

__attribute__((target("avx2,fma"))) cplx dot_conj(const cplx* a, const cplx* b, std::size_t n) {
  const double* pa = reinterpret_cast<const double*>(a);
  const double* pb = reinterpret_cast<const double*>(b);
  __m256d acc_re = _mm256_setzero_pd();
  __m256d acc_im = _mm256_setzero_pd();
  // Flips the sign of the ai*br lanes so the imaginary accumulator holds
  // ar*bi - ai*br per element.
  const __m256d sign = _mm256_set_pd(-0.0, 0.0, -0.0, 0.0);
  std::size_t i = 0;
  for (; i + 2 <= n; i += 2) {
    __m256d va = _mm256_loadu_pd(pa + 2 * i);  // ar0 ai0 ar1 ai1
    __m256d vb = _mm256_loadu_pd(pb + 2 * i);  // br0 bi0 br1 bi1
    acc_re = _mm256_fmadd_pd(va, vb, acc_re);
    __m256d vbs = _mm256_permute_pd(vb, 0b0101);  // bi0 br0 bi1 br1
    vbs = _mm256_xor_pd(vbs, sign);               // bi0 -br0 bi1 -br1
    acc_im = _mm256_fmadd_pd(va, vbs, acc_im);
  }
  double re = hsum(acc_re);
  double im = hsum(acc_im);
  for (; i < n; ++i) {
    const double ar = a[i].real(), ai = a[i].imag();
    const double br = b[i].real(), bi = b[i].imag();
    re += ar * br + ai * bi;
    im += ar * bi - ai * br;
  }
  return {re, im};
}

__attribute__((target("avx2,fma"))) double norm_sq(const cplx* a, std::size_t n) {
  const double* pa = reinterpret_cast<const double*>(a);
  __m256d acc = _mm256_setzero_pd();
  std::size_t i = 0;
  for (; i + 2 <= n; i += 2) {
    __m256d v = _mm256_loadu_pd(pa + 2 * i);
    acc = _mm256_fmadd_pd(v, v, acc);
  }
  double s = hsum(acc);
  for (; i < n; ++i) {
    s += a[i].real() * a[i].real() + a[i].imag() * a[i].imag();
  }
  return s;
}

}  // namespace avx2

#endif  // UNICON_X86_64

namespace {

using DotFn = cplx (*)(const cplx*, const cplx*, std::size_t);
using NormFn = double (*)(const cplx*, std::size_t);

struct Dispatch {
  DotFn dot = &ref::dot_conj;
  NormFn norm = &ref::norm_sq;
  const char* name = "scalar";

  Dispatch() {
#if UNICON_X86_64
    if (__builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma")) {
      dot = &avx2::dot_conj;
      norm = &avx2::norm_sq;
      name = "avx2";
    }
#endif
  }
};

const Dispatch& dispatch() {
  static const Dispatch d;
  return d;
}

}  // namespace

cplx dot_conj(const cplx* a, const cplx* b, std::size_t n) { return dispatch().dot(a, b, n); }

double norm_sq(const cplx* a, std::size_t n) { return dispatch().norm(a, n); }

void gram(const cplx* y, std::size_t m, std::size_t k, cplx* g) {
  for (std::size_t i = 0; i < k; ++i) {
    g[i * k + i] = {norm_sq(y + i * m, m), 0.0};
    for (std::size_t j = i + 1; j < k; ++j) {
      const cplx v = dot_conj(y + i * m, y + j * m, m);
      g[i * k + j] = v;
      g[j * k + i] = std::conj(v);
    }
  }
}

const char* active_backend() { return dispatch().name; }

}  // namespace unicon::kernels
