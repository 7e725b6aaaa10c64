#pragma once

#include "biotdsp/sparse/csr_matrix.hpp"
#include "biotdsp/sparse/dense.hpp"
#include "biotdsp/sparse/factor.hpp"
#include "biotdsp/sparse/linear_operator.hpp"

#include <cstddef>
#include <memory>
#include <optional>
#include <span>
#include <string>

namespace biotdsp
{

/// SPD approximation P of a target matrix, used through P^{-1}. Linear
/// kinds also expose a half factor L with P = L L^T so that dense pencils
/// L^{-1} M L^{-T} can be formed for the indicators.
class InnerOperator
{
public:
   virtual ~InnerOperator() = default;

   virtual std::size_t size() const = 0;
   /// "jacobi", "ic0", "inner-pcg", "exact-dense", "scaled"
   virtual std::string kind() const = 0;
   /// Human-readable parameters, e.g. "ic0(shift=0)".
   virtual std::string describe() const = 0;

   /// z = P^{-1} r
   virtual void apply_inverse(std::span<const double> r, std::span<double> z) const = 0;
   Vector apply_inverse(std::span<const double> r) const;

   virtual bool is_linear() const { return true; }

   /// In place X <- L^{-1} X for a dense block X with size() rows.
   /// Throws UnsupportedError for nonlinear kinds.
   virtual void half_solve(DenseMatrix &X) const = 0;
   /// L^T v, so that ||L^T v||^2 = v^T P v. Throws UnsupportedError for
   /// nonlinear kinds.
   virtual Vector half_apply_transpose(std::span<const double> v) const = 0;

   /// Explicit P (dense); desk scale. Throws UnsupportedError for nonlinear kinds.
   virtual DenseMatrix dense_matrix() const = 0;

   /// Explicit diagonal of P^{-1} when P is diagonal.
   virtual std::optional<Vector> inverse_diagonal() const { return std::nullopt; }
};

using InnerPtr = std::shared_ptr<const InnerOperator>;

/// P = diag(d), d > 0.
InnerPtr make_diagonal(Vector d, std::string kind = "jacobi");
/// P = diag(M); throws ContractError on a nonpositive diagonal entry.
InnerPtr make_jacobi(const CsrMatrix &M);
/// P = L L^T from ic0_shifted(M).
InnerPtr make_ic0(const CsrMatrix &M);
/// P = M exactly, dense Cholesky; desk scale.
InnerPtr make_exact_dense(const DenseMatrix &M);
InnerPtr make_exact_dense(const CsrMatrix &M);
/// P^{-1} r = approximate solution of M z = r by PCG (zero initial guess)
/// preconditioned with `prec`. Nonlinear; its linear surrogate is `prec`.
InnerPtr make_inner_pcg(const CsrMatrix &M, InnerPtr prec, double tol, std::size_t maxit);
/// P(omega) = omega^{-1} P. Throws ConfigError when omega <= 0.
InnerPtr apply_omega(InnerPtr op, double omega);

/// The operator itself when linear, its declared linear surrogate otherwise.
InnerPtr linear_surrogate(const InnerPtr &op);

/// r -> P^{-1} r as a LinearOperator sharing ownership of op.
LinearOperator inverse_operator(const InnerPtr &op);

} // namespace biotdsp
