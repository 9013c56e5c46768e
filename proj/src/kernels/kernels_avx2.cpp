#include "magbill/kernels/kernels.hpp"

// AVX2+FMA variants, two interleaved complex<double> per 256-bit register.
// Built with per-function target attributes so the TU compiles on any x86
// toolchain; callers must check supported() first.

#if defined(__x86_64__) || defined(__i386__)
#define MAGBILL_X86 1
#include <immintrin.h>
#else
#define MAGBILL_X86 0
#endif

namespace magbill::kernels::avx2 {

#if MAGBILL_X86

#define MAGBILL_AVX2_FN __attribute__((target("avx2,fma")))

bool supported() {
  return __builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma");
}

namespace {

// [re0,im0,re1,im1] -> (re0+re1) + i(im0+im1)
MAGBILL_AVX2_FN inline cplx reduce_c(__m256d acc) {
  __m128d lo = _mm256_castpd256_pd128(acc);
  __m128d hi = _mm256_extractf128_pd(acc, 1);
  __m128d s = _mm_add_pd(lo, hi);
  alignas(16) double out[2];
  _mm_store_pd(out, s);
  return {out[0], out[1]};
}

// a*b for packed complex pairs
MAGBILL_AVX2_FN inline __m256d cmul(__m256d a, __m256d b) {
  __m256d ar = _mm256_movedup_pd(a);
  __m256d ai = _mm256_unpackhi_pd(a, a);
  __m256d bs = _mm256_permute_pd(b, 0x5);
  return _mm256_fmaddsub_pd(ar, b, _mm256_mul_pd(ai, bs));
}

// conj(a)*b
MAGBILL_AVX2_FN inline __m256d cmulc(__m256d a, __m256d b) {
  __m256d ar = _mm256_movedup_pd(a);
  __m256d ai = _mm256_unpackhi_pd(a, a);
  __m256d bs = _mm256_permute_pd(b, 0x5);
  return _mm256_fmsubadd_pd(ar, b, _mm256_mul_pd(ai, bs));
}

}  // namespace

MAGBILL_AVX2_FN void axpy(cplx a, const cplx* x, cplx* y, std::size_t n) {
  const __m256d ar = _mm256_set1_pd(a.real());
  const __m256d ai = _mm256_set1_pd(a.imag());
  std::size_t i = 0;
  for (; i + 2 <= n; i += 2) {
    __m256d xv = _mm256_loadu_pd(reinterpret_cast<const double*>(x + i));
    __m256d yv = _mm256_loadu_pd(reinterpret_cast<double*>(y + i));
    __m256d xs = _mm256_permute_pd(xv, 0x5);
    __m256d p = _mm256_fmaddsub_pd(ar, xv, _mm256_mul_pd(ai, xs));
    _mm256_storeu_pd(reinterpret_cast<double*>(y + i), _mm256_add_pd(yv, p));
  }
  for (; i < n; ++i) y[i] += a * x[i];
}

MAGBILL_AVX2_FN void scal(cplx a, cplx* x, std::size_t n) {
  const __m256d ar = _mm256_set1_pd(a.real());
  const __m256d ai = _mm256_set1_pd(a.imag());
  std::size_t i = 0;
  for (; i + 2 <= n; i += 2) {
    __m256d xv = _mm256_loadu_pd(reinterpret_cast<const double*>(x + i));
    __m256d xs = _mm256_permute_pd(xv, 0x5);
    __m256d p = _mm256_fmaddsub_pd(ar, xv, _mm256_mul_pd(ai, xs));
    _mm256_storeu_pd(reinterpret_cast<double*>(x + i), p);
  }
  for (; i < n; ++i) x[i] *= a;
}

MAGBILL_AVX2_FN cplx dotc(const cplx* x, const cplx* y, std::size_t n) {
  __m256d acc = _mm256_setzero_pd();
  std::size_t i = 0;
  for (; i + 2 <= n; i += 2) {
    __m256d xv = _mm256_loadu_pd(reinterpret_cast<const double*>(x + i));
    __m256d yv = _mm256_loadu_pd(reinterpret_cast<const double*>(y + i));
    acc = _mm256_add_pd(acc, cmulc(xv, yv));
  }
  cplx s = reduce_c(acc);
  for (; i < n; ++i) {
    const double xr = x[i].real(), xi = x[i].imag();
    const double yr = y[i].real(), yi = y[i].imag();
    s += cplx{xr * yr + xi * yi, xr * yi - xi * yr};
  }
  return s;
}

MAGBILL_AVX2_FN double nrm2sq(const cplx* x, std::size_t n) {
  __m256d acc = _mm256_setzero_pd();
  std::size_t i = 0;
  for (; i + 2 <= n; i += 2) {
    __m256d xv = _mm256_loadu_pd(reinterpret_cast<const double*>(x + i));
    acc = _mm256_fmadd_pd(xv, xv, acc);
  }
  __m128d lo = _mm256_castpd256_pd128(acc);
  __m128d hi = _mm256_extractf128_pd(acc, 1);
  __m128d s2 = _mm_add_pd(lo, hi);
  alignas(16) double out[2];
  _mm_store_pd(out, s2);
  double s = out[0] + out[1];
  for (; i < n; ++i) s += x[i].real() * x[i].real() + x[i].imag() * x[i].imag();
  return s;
}

MAGBILL_AVX2_FN void hadamard(const cplx* d, const cplx* x, cplx* y, std::size_t n) {
  std::size_t i = 0;
  for (; i + 2 <= n; i += 2) {
    __m256d dv = _mm256_loadu_pd(reinterpret_cast<const double*>(d + i));
    __m256d xv = _mm256_loadu_pd(reinterpret_cast<const double*>(x + i));
    _mm256_storeu_pd(reinterpret_cast<double*>(y + i), cmul(dv, xv));
  }
  for (; i < n; ++i) y[i] = d[i] * x[i];
}

MAGBILL_AVX2_FN void spmv_csr(std::size_t rows, const std::int64_t* rowptr,
                              const std::int32_t* col, const cplx* val, const cplx* x, cplx* y) {
  for (std::size_t r = 0; r < rows; ++r) {
    __m256d acc = _mm256_setzero_pd();
    std::int64_t p = rowptr[r];
    const std::int64_t pe = rowptr[r + 1];
    for (; p + 2 <= pe; p += 2) {
      __m256d vv = _mm256_loadu_pd(reinterpret_cast<const double*>(val + p));
      __m128d x0 = _mm_loadu_pd(reinterpret_cast<const double*>(x + col[p]));
      __m128d x1 = _mm_loadu_pd(reinterpret_cast<const double*>(x + col[p + 1]));
      __m256d xx = _mm256_insertf128_pd(_mm256_castpd128_pd256(x0), x1, 1);
      acc = _mm256_add_pd(acc, cmul(vv, xx));
    }
    cplx s = reduce_c(acc);
    for (; p < pe; ++p) {
      const cplx v = val[p];
      const cplx xx = x[col[p]];
      s += cplx{v.real() * xx.real() - v.imag() * xx.imag(),
                v.real() * xx.imag() + v.imag() * xx.real()};
    }
    y[r] = s;
  }
}

#undef MAGBILL_AVX2_FN

#else  // !MAGBILL_X86

bool supported() { return false; }
void axpy(cplx a, const cplx* x, cplx* y, std::size_t n) { scalar::axpy(a, x, y, n); }
void scal(cplx a, cplx* x, std::size_t n) { scalar::scal(a, x, n); }
cplx dotc(const cplx* x, const cplx* y, std::size_t n) { return scalar::dotc(x, y, n); }
double nrm2sq(const cplx* x, std::size_t n) { return scalar::nrm2sq(x, n); }
void hadamard(const cplx* d, const cplx* x, cplx* y, std::size_t n) {
  scalar::hadamard(d, x, y, n);
}
void spmv_csr(std::size_t rows, const std::int64_t* rowptr, const std::int32_t* col,
              const cplx* val, const cplx* x, cplx* y) {
  scalar::spmv_csr(rows, rowptr, col, val, x, y);
}

#endif

}  // namespace magbill::kernels::avx2
