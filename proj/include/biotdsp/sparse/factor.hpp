#pragma once

#include "biotdsp/sparse/csr_matrix.hpp"

#include <cstddef>
#include <span>

namespace biotdsp
{

enum class FactorKind
{
   complete_cholesky,
   ic0
};

/// Lower-triangular factor L with M ≈ L L^T.
struct TriangularFactor
{
   CsrMatrix L;
   FactorKind kind = FactorKind::ic0;
   /// Diagonal shift sigma actually used, L L^T ≈ M + sigma*diag(M).
   double shift = 0.0;
};

/// Incomplete Cholesky with no fill-in on the lower pattern of M. Throws
/// BreakdownError (with row and pivot) when a nonpositive pivot appears.
TriangularFactor ic0(const CsrMatrix &M);

/// ic0 with the shift retry M + sigma*diag(M): sigma starts at
/// initial_shift and doubles after each breakdown, at most max_retries times.
TriangularFactor ic0_shifted(const CsrMatrix &M, double initial_shift = 1e-3,
                             int max_retries = 10);

/// Complete Cholesky factor (dense elimination, stored sparse); desk scale.
TriangularFactor complete_cholesky(const CsrMatrix &M);

/// Forward substitution L x = b, or backward L^T x = b when transposed.
/// Throws SingularFactorError on a zero diagonal.
Vector solve_triangular(const TriangularFactor &F, std::span<const double> b, bool transposed);

/// (L L^T)^{-1} b
Vector factor_solve(const TriangularFactor &F, std::span<const double> b);

/// L b, or L^T b when transposed.
Vector factor_apply(const TriangularFactor &F, std::span<const double> b, bool transposed);

} // namespace biotdsp
