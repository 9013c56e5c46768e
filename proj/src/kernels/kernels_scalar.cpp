#include "magbill/kernels/kernels.hpp"

namespace magbill::kernels::scalar {

void axpy(cplx a, const cplx* x, cplx* y, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) y[i] += a * x[i];
}

void scal(cplx a, cplx* x, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) x[i] *= a;
}

cplx dotc(const cplx* x, const cplx* y, std::size_t n) {
  double re = 0.0, im = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double xr = x[i].real(), xi = x[i].imag();
    const double yr = y[i].real(), yi = y[i].imag();
    re += xr * yr + xi * yi;
    im += xr * yi - xi * yr;
  }
  return {re, im};
}

double nrm2sq(const cplx* x, std::size_t n) {
  double s = 0.0;
  for (std::size_t i = 0; i < n; ++i) s += x[i].real() * x[i].real() + x[i].imag() * x[i].imag();
  return s;
}

void hadamard(const cplx* d, const cplx* x, cplx* y, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) y[i] = d[i] * x[i];
}

void spmv_csr(std::size_t rows, const std::int64_t* rowptr, const std::int32_t* col,
              const cplx* val, const cplx* x, cplx* y) {
  for (std::size_t r = 0; r < rows; ++r) {
    double re = 0.0, im = 0.0;
    for (std::int64_t p = rowptr[r]; p < rowptr[r + 1]; ++p) {
      const cplx v = val[p];
      const cplx xx = x[col[p]];
      re += v.real() * xx.real() - v.imag() * xx.imag();
      im += v.real() * xx.imag() + v.imag() * xx.real();
    }
    y[r] = {re, im};
  }
}

}  // namespace magbill::kernels::scalar
