#pragma once
// Arithmetic inner-loop kernels: scalar reference implementations plus an
// AVX2 variant selected once at startup from CPU capabilities. Every SIMD
// variant is equivalence-tested against the reference in the unit suite.

#include <cstddef>

#include "unicon/types.hpp"

namespace unicon::kernels {

// Reference implementations, always available.
namespace ref {
cplx dot_conj(const cplx* a, const cplx* b, std::size_t n);
double norm_sq(const cplx* a, std::size_t n);
}  // namespace ref

// sum_i conj(a[i]) * b[i], dispatched.
cplx dot_conj(const cplx* a, const cplx* b, std::size_t n);

// sum_i |a[i]|^2, dispatched.
double norm_sq(const cplx* a, std::size_t n);

// g = y^H y for a column-major m-by-k matrix y; g is k-by-k row-major,
// exactly Hermitian with a real diagonal.
void gram(const cplx* y, std::size_t m, std::size_t k, cplx* g);

// Name of the variant chosen at startup ("scalar" or "avx2").
const char* active_backend();

}  // namespace unicon::kernels
