#pragma once

#include "biotdsp/assembly/dsp_system.hpp"
#include "biotdsp/schur/inner_operator.hpp"
#include "biotdsp/sparse/dense.hpp"

#include <string>

namespace biotdsp
{

/// Closed interval [min, max].
struct Interval
{
   double min = 0.0;
   double max = 0.0;

   bool contains(double x, double slack = 0.0) const { return x >= min - slack && x <= max + slack; }
};

/// Indicator intervals of the inner approximations:
///   A: A-hat^{-1} A          S: S-hat^{-1} S-tilde     X: X-hat^{-1} X-tilde
///   D: S-hat^{-1} D          E: X-hat^{-1} E
///   R: pencil (B A-hat^{-1} B^T, S-hat)
///   K: pencil (C S-hat^{-1} C^T, X-hat)
/// with S-tilde = D + B A-hat^{-1} B^T and X-tilde = E + C S-hat^{-1} C^T.
struct IndicatorSet
{
   Interval A, S, X, D, E, R, K;
   /// Notes on linear surrogates substituted for nonlinear inner operators.
   std::string note;
};

/// Extreme eigenvalues of L^{-1} M L^{-T} with P = L L^T the half factor of
/// op; M symmetric n x n.
Extremes pencil_extremes(const DenseMatrix &M, const InnerOperator &op);

/// Dense L^{-1} M L^{-T} for symmetric M.
DenseMatrix pencil_matrix(const DenseMatrix &M, const InnerOperator &op);

/// All seven indicator intervals by dense pencils; desk scale. Nonlinear
/// inner operators are replaced by their linear surrogates and the
/// substitution is recorded in the note. Eigenvalues of the semidefinite
/// pencils D and K within 1e-12 relative of zero are reported as 0.
IndicatorSet compute_indicators(const DspSystem &sys, const InnerPtr &a_hat, const InnerPtr &s_hat,
                                const InnerPtr &x_hat);

} // namespace biotdsp
