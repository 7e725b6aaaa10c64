#pragma once

#include "biotdsp/assembly/dsp_system.hpp"
#include "biotdsp/schur/inner_operator.hpp"
#include "biotdsp/schur/schur.hpp"

#include <span>

namespace biotdsp
{

/// Upper block-triangular preconditioner
///
///     [ A-hat  B^T     0     ]
///     [ 0     -S-hat   C^T   ]
///     [ 0      0       X-hat ]
class BlockTriangular
{
public:
   BlockTriangular(InnerPtr a_hat, InnerPtr s_hat, InnerPtr x_hat, const CsrMatrix &B,
                   const CsrMatrix &C);
   BlockTriangular(const DspSystem &sys, const RealizedRecipe &r);

   std::size_t n() const { return a_hat_->size(); }
   std::size_t m() const { return s_hat_->size(); }
   std::size_t p() const { return x_hat_->size(); }
   std::size_t size() const { return n() + m() + p(); }

   /// v = P^{-1} r by back substitution: z = X^{-1} r3, y = S^{-1}(C^T z - r2),
   /// x = A^{-1}(r1 - B^T y).
   void apply_inverse(std::span<const double> r, std::span<double> v) const;
   Vector apply_inverse(std::span<const double> r) const;
   /// v = P v' (forward product); desk-scale checks.
   Vector apply_forward(std::span<const double> v) const;
   LinearOperator inverse_operator() const;

   const InnerPtr &a_hat() const { return a_hat_; }
   const InnerPtr &s_hat() const { return s_hat_; }
   const InnerPtr &x_hat() const { return x_hat_; }

private:
   InnerPtr a_hat_, s_hat_, x_hat_;
   CsrMatrix B_, C_;
};

/// Block diagonal SPD preconditioner blockdiag(A-hat, S-hat, X-hat).
class BlockDiagonal
{
public:
   BlockDiagonal(InnerPtr a_hat, InnerPtr s_hat, InnerPtr x_hat);
   explicit BlockDiagonal(const RealizedRecipe &r);

   std::size_t n() const { return a_hat_->size(); }
   std::size_t m() const { return s_hat_->size(); }
   std::size_t p() const { return x_hat_->size(); }
   std::size_t size() const { return n() + m() + p(); }

   void apply_inverse(std::span<const double> r, std::span<double> v) const;
   Vector apply_inverse(std::span<const double> r) const;
   LinearOperator inverse_operator() const;

   /// P^{-1/2} r from dense symmetric eigendecompositions of the blocks.
   /// Throws UnsupportedError for nonlinear blocks.
   Vector split_sqrt_apply(std::span<const double> r) const;

   const InnerPtr &a_hat() const { return a_hat_; }
   const InnerPtr &s_hat() const { return s_hat_; }
   const InnerPtr &x_hat() const { return x_hat_; }

private:
   InnerPtr a_hat_, s_hat_, x_hat_;
};

/// Dense M^{-1/2} of an SPD matrix via its eigendecomposition.
DenseMatrix dense_inverse_sqrt(const DenseMatrix &M);

} // namespace biotdsp
