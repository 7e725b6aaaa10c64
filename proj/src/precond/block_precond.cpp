#include "biotdsp/precond/block_precond.hpp"

#include "biotdsp/errors.hpp"

#include <cmath>
#include <memory>

namespace biotdsp
{

namespace
{
const char *kModule = "precond";

void check_size(std::size_t n, std::span<const double> r, std::span<double> v)
{
   if (r.size() != n || v.size() != n) { throw DimensionError(kModule, "apply_inverse: vector length differs from n+m+p"); }
}

void labelled_inverse(const InnerOperator &op, const char *label, std::span<const double> r, std::span<double> z)
{
   try
   {
      op.apply_inverse(r, z);
   }
   catch (const Error &e)
   {
      throw ContractError(kModule, std::string(label) + " block: " + e.what());
   }
}

DenseMatrix linear_dense(const InnerPtr &op, const char *label)
{
   if (!op->is_linear())
   {
      throw UnsupportedError(kModule, std::string("split_sqrt_apply: ") + label + " block '" + op->describe() + "' is not linear");
   }
   return op->dense_matrix();
}
} // namespace

BlockTriangular::BlockTriangular(InnerPtr a_hat, InnerPtr s_hat, InnerPtr x_hat, const CsrMatrix &B,
                                 const CsrMatrix &C)
   : a_hat_(std::move(a_hat)), s_hat_(std::move(s_hat)), x_hat_(std::move(x_hat)), B_(B), C_(C)
{
   if (B_.rows() != m() || B_.cols() != n() || C_.rows() != p() || C_.cols() != m())
   {
      throw DimensionError(kModule, "BlockTriangular: B must be m x n and C p x m");
   }
}

BlockTriangular::BlockTriangular(const DspSystem &sys, const RealizedRecipe &r)
   : BlockTriangular(r.a_hat, r.s_hat, r.x_hat, sys.B, sys.C) {}

void BlockTriangular::apply_inverse(std::span<const double> r, std::span<double> v) const
{
   const std::size_t n_ = n(), m_ = m(), p_ = p();
   check_size(size(), r, v);
   auto r1 = r.subspan(0, n_), r2 = r.subspan(n_, m_), r3 = r.subspan(n_ + m_, p_);
   auto x = v.subspan(0, n_), y = v.subspan(n_, m_), z = v.subspan(n_ + m_, p_);

   labelled_inverse(*x_hat_, "X-hat", r3, z);
   Vector t2 = spmv_transpose(C_, z);
   for (std::size_t i = 0; i < m_; ++i) { t2[i] -= r2[i]; }
   labelled_inverse(*s_hat_, "S-hat", t2, y);
   Vector t1 = spmv_transpose(B_, y);
   for (std::size_t i = 0; i < n_; ++i) { t1[i] = r1[i] - t1[i]; }
   labelled_inverse(*a_hat_, "A-hat", t1, x);
}

Vector BlockTriangular::apply_inverse(std::span<const double> r) const
{
   Vector v(r.size());
   apply_inverse(r, v);
   return v;
}

Vector BlockTriangular::apply_forward(std::span<const double> v) const
{
   const std::size_t n_ = n(), m_ = m(), p_ = p();
   if (v.size() != size()) { throw DimensionError(kModule, "apply_forward: vector length differs from n+m+p"); }
   auto x = v.subspan(0, n_), y = v.subspan(n_, m_), z = v.subspan(n_ + m_, p_);
   Vector out(size(), 0.0);
   const DenseMatrix A = a_hat_->dense_matrix(), S = s_hat_->dense_matrix(), X = x_hat_->dense_matrix();
   Vector ax = matvec(A, x), by = spmv_transpose(B_, y);
   Vector sy = matvec(S, y), cz = spmv_transpose(C_, z);
   Vector xz = matvec(X, z);
   for (std::size_t i = 0; i < n_; ++i) { out[i] = ax[i] + by[i]; }
   for (std::size_t i = 0; i < m_; ++i) { out[n_ + i] = -sy[i] + cz[i]; }
   for (std::size_t i = 0; i < p_; ++i) { out[n_ + m_ + i] = xz[i]; }
   return out;
}

LinearOperator BlockTriangular::inverse_operator() const
{
   auto self = std::make_shared<BlockTriangular>(*this);
   return {size(), size(), [self](std::span<const double> r, std::span<double> v) { self->apply_inverse(r, v); }};
}

BlockDiagonal::BlockDiagonal(InnerPtr a_hat, InnerPtr s_hat, InnerPtr x_hat)
   : a_hat_(std::move(a_hat)), s_hat_(std::move(s_hat)), x_hat_(std::move(x_hat)) {}

BlockDiagonal::BlockDiagonal(const RealizedRecipe &r) : BlockDiagonal(r.a_hat, r.s_hat, r.x_hat) {}

void BlockDiagonal::apply_inverse(std::span<const double> r, std::span<double> v) const
{
   const std::size_t n_ = n(), m_ = m(), p_ = p();
   check_size(size(), r, v);
   labelled_inverse(*a_hat_, "A-hat", r.subspan(0, n_), v.subspan(0, n_));
   labelled_inverse(*s_hat_, "S-hat", r.subspan(n_, m_), v.subspan(n_, m_));
   labelled_inverse(*x_hat_, "X-hat", r.subspan(n_ + m_, p_), v.subspan(n_ + m_, p_));
}

Vector BlockDiagonal::apply_inverse(std::span<const double> r) const
{
   Vector v(r.size());
   apply_inverse(r, v);
   return v;
}

LinearOperator BlockDiagonal::inverse_operator() const
{
   auto self = std::make_shared<BlockDiagonal>(*this);
   return {size(), size(), [self](std::span<const double> r, std::span<double> v) { self->apply_inverse(r, v); }};
}

Vector BlockDiagonal::split_sqrt_apply(std::span<const double> r) const
{
   if (r.size() != size()) { throw DimensionError(kModule, "split_sqrt_apply: vector length differs from n+m+p"); }
   const std::size_t n_ = n(), m_ = m(), p_ = p();
   Vector out(size());
   auto put = [&](const DenseMatrix &R, std::size_t off, std::size_t len) {
      Vector y = matvec(R, r.subspan(off, len));
      std::copy(y.begin(), y.end(), out.begin() + static_cast<std::ptrdiff_t>(off));
   };
   put(dense_inverse_sqrt(linear_dense(a_hat_, "A-hat")), 0, n_);
   put(dense_inverse_sqrt(linear_dense(s_hat_, "S-hat")), n_, m_);
   put(dense_inverse_sqrt(linear_dense(x_hat_, "X-hat")), n_ + m_, p_);
   return out;
}

DenseMatrix dense_inverse_sqrt(const DenseMatrix &M)
{
   DenseMatrix Ms(M.rows(), M.cols());
   for (std::size_t i = 0; i < M.rows(); ++i)
   {
      for (std::size_t j = 0; j < M.cols(); ++j) { Ms(i, j) = 0.5 * (M(i, j) + M(j, i)); }
   }
   auto eig = dense_eig_symmetric(Ms, true);
   const std::size_t n = M.rows();
   DenseMatrix Q(n, n), Qs(n, n);
   for (std::size_t k = 0; k < n; ++k)
   {
      const double lam = eig.values[k].real();
      if (!(lam > 0.0)) { throw ContractError(kModule, "dense_inverse_sqrt: matrix is not positive definite"); }
      const double s = 1.0 / std::sqrt(lam);
      for (std::size_t i = 0; i < n; ++i)
      {
         Q(i, k) = (*eig.vectors)[k][i].real();
         Qs(i, k) = Q(i, k) * s;
      }
   }
   return matmul(Qs, Q.transposed());
}

} // namespace biotdsp
