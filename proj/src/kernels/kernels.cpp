#include "magbill/kernels/kernels.hpp"

#include <cstdlib>
#include <cstring>

namespace magbill::kernels {

namespace {

Backend select() {
  if (const char* env = std::getenv("MAGBILL_SIMD")) {
    if (std::strcmp(env, "scalar") == 0) return Backend::Scalar;
    if (std::strcmp(env, "avx2") == 0 && avx2::supported()) return Backend::Avx2;
  }
  return avx2::supported() ? Backend::Avx2 : Backend::Scalar;
}

}  // namespace

Backend active_backend() {
  static const Backend b = select();
  return b;
}

const char* backend_name() {
  return active_backend() == Backend::Avx2 ? "avx2" : "scalar";
}

void axpy(cplx a, const cplx* x, cplx* y, std::size_t n) {
  active_backend() == Backend::Avx2 ? avx2::axpy(a, x, y, n) : scalar::axpy(a, x, y, n);
}

void scal(cplx a, cplx* x, std::size_t n) {
  active_backend() == Backend::Avx2 ? avx2::scal(a, x, n) : scalar::scal(a, x, n);
}

cplx dotc(const cplx* x, const cplx* y, std::size_t n) {
  return active_backend() == Backend::Avx2 ? avx2::dotc(x, y, n) : scalar::dotc(x, y, n);
}

double nrm2sq(const cplx* x, std::size_t n) {
  return active_backend() == Backend::Avx2 ? avx2::nrm2sq(x, n) : scalar::nrm2sq(x, n);
}

void hadamard(const cplx* d, const cplx* x, cplx* y, std::size_t n) {
  active_backend() == Backend::Avx2 ? avx2::hadamard(d, x, y, n) : scalar::hadamard(d, x, y, n);
}

void spmv_csr(std::size_t rows, const std::int64_t* rowptr, const std::int32_t* col,
              const cplx* val, const cplx* x, cplx* y) {
  active_backend() == Backend::Avx2 ? avx2::spmv_csr(rows, rowptr, col, val, x, y)
                                    : scalar::spmv_csr(rows, rowptr, col, val, x, y);
}

}  // namespace magbill::kernels
