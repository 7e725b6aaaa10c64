#pragma once

#include "biotdsp/sparse/csr_matrix.hpp"
#include "biotdsp/sparse/linear_operator.hpp"

#include <cstddef>
#include <string>

namespace biotdsp
{

/// Double saddle-point system
///
///     [ A  B^T  0  ] [x]   [f]
///     [ B  -D   C^T] [y] = [g]
///     [ 0   C   E  ] [z]   [h]
///
/// with A (n x n) SPD, B (m x n), C (p x m), D (m x m) SPSD, E (p x p) SPD.
struct DspSystem
{
   CsrMatrix A, B, C, D, E;
   Vector rhs;

   // Provenance, informational only.
   std::string discretization;
   int dim = 0;
   std::size_t cells_per_side = 0;

   std::size_t n() const { return A.rows(); }
   std::size_t m() const { return D.rows(); }
   std::size_t p() const { return E.rows(); }
   std::size_t size() const { return n() + m() + p(); }
   /// Stored nonzeros of the full 3x3 block operator.
   std::size_t nnz() const { return A.nnz() + 2 * B.nnz() + D.nnz() + 2 * C.nnz() + E.nnz(); }

   /// Throws DimensionError when the block shapes do not conform.
   void check_shapes() const;

   /// y = calA x, block-wise.
   void apply(std::span<const double> x, std::span<double> y) const;
   Vector apply(std::span<const double> x) const;
   LinearOperator as_operator() const;

   /// Assembled 3x3 block matrix.
   CsrMatrix assemble_full() const;
};

/// Result of a definiteness probe.
struct DefinitenessCheck
{
   bool passed = false;
   /// Smallest eigenvalue (dense), or the Gershgorin lower bound when that
   /// alone settles the question.
   double lambda_min = 0.0;
   /// "gershgorin", "dense" or "rayleigh" (randomized necessary condition,
   /// used above the dense size limit).
   std::string method;
};

/// SPD check: symmetric to 1e-12 and lambda_min > 0.
DefinitenessCheck check_spd(const CsrMatrix &M, std::size_t dense_limit = 3000);
/// SPSD check: symmetric to 1e-12 and lambda_min >= -rel_tol * max|M|.
DefinitenessCheck check_spsd(const CsrMatrix &M, double rel_tol = 1e-10,
                             std::size_t dense_limit = 3000);

/// Validates the structural invariants of a DspSystem (SPD A and E, SPSD D,
/// full row rank B, n >= max(m, p)). Dense checks run up to dense_limit;
/// beyond it only the randomized necessary conditions are applied. Throws
/// AssemblyError naming the failed invariant.
void validate_dsp(const DspSystem &sys, std::size_t dense_limit = 3000);

} // namespace biotdsp
