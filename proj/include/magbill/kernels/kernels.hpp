#pragma once

// Complex vector kernels used by the eigensolver hot path. Scalar reference
// implementations plus AVX2 variants selected at runtime; both are exposed so
// the test suite can check them against each other on the same data.

#include <complex>
#include <cstddef>
#include <cstdint>

namespace magbill::kernels {

using cplx = std::complex<double>;

enum class Backend { Scalar, Avx2 };

// Selected once per process. MAGBILL_SIMD=scalar forces the reference path.
Backend active_backend();
const char* backend_name();

// y += a*x
void axpy(cplx a, const cplx* x, cplx* y, std::size_t n);
// x *= a
void scal(cplx a, cplx* x, std::size_t n);
// sum conj(x)*y
cplx dotc(const cplx* x, const cplx* y, std::size_t n);
// sum |x|^2
double nrm2sq(const cplx* x, std::size_t n);
// y = d .* x  (pointwise)
void hadamard(const cplx* d, const cplx* x, cplx* y, std::size_t n);
// y = A x for CSR (rowptr has rows+1 entries)
void spmv_csr(std::size_t rows, const std::int64_t* rowptr, const std::int32_t* col,
              const cplx* val, const cplx* x, cplx* y);

namespace scalar {
void axpy(cplx a, const cplx* x, cplx* y, std::size_t n);
void scal(cplx a, cplx* x, std::size_t n);
cplx dotc(const cplx* x, const cplx* y, std::size_t n);
double nrm2sq(const cplx* x, std::size_t n);
void hadamard(const cplx* d, const cplx* x, cplx* y, std::size_t n);
void spmv_csr(std::size_t rows, const std::int64_t* rowptr, const std::int32_t* col,
              const cplx* val, const cplx* x, cplx* y);
}  // namespace scalar

namespace avx2 {
// False when the binary was built without x86 support or the CPU lacks AVX2.
bool supported();
void axpy(cplx a, const cplx* x, cplx* y, std::size_t n);
void scal(cplx a, cplx* x, std::size_t n);
cplx dotc(const cplx* x, const cplx* y, std::size_t n);
double nrm2sq(const cplx* x, std::size_t n);
void hadamard(const cplx* d, const cplx* x, cplx* y, std::size_t n);
void spmv_csr(std::size_t rows, const std::int64_t* rowptr, const std::int32_t* col,
              const cplx* val, const cplx* x, cplx* y);
}  // namespace avx2

}  // namespace magbill::kernels
