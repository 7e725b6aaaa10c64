#include "biotdsp/schur/inner_operator.hpp"

#include "biotdsp/errors.hpp"
#include "biotdsp/krylov/krylov.hpp"

#include <cmath>
#include <sstream>

namespace biotdsp
{

namespace
{
const char *kModule = "schur-approx";

void check_block(const InnerOperator &op, const DenseMatrix &X)
{
   if (X.rows() != op.size()) { throw DimensionError(kModule, "half_solve: block row count differs from operator size"); }
}

void check_vectors(std::size_t n, std::span<const double> r, std::span<double> z)
{
   if (r.size() != n || z.size() != n) { throw DimensionError(kModule, "apply_inverse: vector length differs from operator size"); }
}

class DiagonalInner final : public InnerOperator
{
public:
   DiagonalInner(Vector d, std::string kind) : d_(std::move(d)), kind_(std::move(kind))
   {
      for (std::size_t i = 0; i < d_.size(); ++i)
      {
         if (!(d_[i] > 0.0))
         {
            throw ContractError(kModule, "degenerate diagonal: entry " + std::to_string(i) + " is not positive");
         }
      }
   }

   std::size_t size() const override { return d_.size(); }
   std::string kind() const override { return kind_; }
   std::string describe() const override { return kind_; }

   void apply_inverse(std::span<const double> r, std::span<double> z) const override
   {
      check_vectors(d_.size(), r, z);
      for (std::size_t i = 0; i < d_.size(); ++i) { z[i] = r[i] / d_[i]; }
   }

   void half_solve(DenseMatrix &X) const override
   {
      check_block(*this, X);
      for (std::size_t i = 0; i < d_.size(); ++i)
      {
         const double s = 1.0 / std::sqrt(d_[i]);
         for (double &v : X.row(i)) { v *= s; }
      }
   }

   Vector half_apply_transpose(std::span<const double> v) const override
   {
      Vector y(v.begin(), v.end());
      for (std::size_t i = 0; i < y.size(); ++i) { y[i] *= std::sqrt(d_[i]); }
      return y;
   }

   DenseMatrix dense_matrix() const override
   {
      DenseMatrix M(d_.size(), d_.size());
      for (std::size_t i = 0; i < d_.size(); ++i) { M(i, i) = d_[i]; }
      return M;
   }

   std::optional<Vector> inverse_diagonal() const override
   {
      Vector inv(d_.size());
      for (std::size_t i = 0; i < d_.size(); ++i) { inv[i] = 1.0 / d_[i]; }
      return inv;
   }

private:
   Vector d_;
   std::string kind_;
};

class Ic0Inner final : public InnerOperator
{
public:
   explicit Ic0Inner(const CsrMatrix &M) : F_(ic0_shifted(M)) {}

   std::size_t size() const override { return F_.L.rows(); }
   std::string kind() const override { return "ic0"; }
   std::string describe() const override
   {
      std::ostringstream os;
      os << "ic0(shift=" << F_.shift << ")";
      return os.str();
   }

   void apply_inverse(std::span<const double> r, std::span<double> z) const override
   {
      check_vectors(size(), r, z);
      Vector t = factor_solve(F_, r);
      std::copy(t.begin(), t.end(), z.begin());
   }

   void half_solve(DenseMatrix &X) const override
   {
      check_block(*this, X);
      const CsrMatrix &L = F_.L;
      for (std::size_t i = 0; i < L.rows(); ++i)
      {
         auto c = L.row_cols(i);
         auto v = L.row_vals(i);
         auto xi = X.row(i);
         double diag = 0.0;
         for (std::size_t k = 0; k < c.size(); ++k)
         {
            if (c[k] == i)
            {
               diag = v[k];
               continue;
            }
            auto xj = X.row(c[k]);
            const double a = v[k];
            for (std::size_t q = 0; q < xi.size(); ++q) { xi[q] -= a * xj[q]; }
         }
         if (diag == 0.0) { throw SingularFactorError(kModule, "ic0 factor has a zero diagonal at row " + std::to_string(i)); }
         for (double &x : xi) { x /= diag; }
      }
   }

   Vector half_apply_transpose(std::span<const double> v) const override
   {
      return factor_apply(F_, v, true);
   }

   DenseMatrix dense_matrix() const override
   {
      DenseMatrix L = DenseMatrix::from_sparse(F_.L);
      return matmul(L, L.transposed());
   }

private:
   TriangularFactor F_;
};

class DenseInner final : public InnerOperator
{
public:
   explicit DenseInner(const DenseMatrix &M) : M_(M), chol_(M) {}

   std::size_t size() const override { return M_.rows(); }
   std::string kind() const override { return "exact-dense"; }
   std::string describe() const override { return "exact-dense"; }

   void apply_inverse(std::span<const double> r, std::span<double> z) const override
   {
      check_vectors(size(), r, z);
      Vector t = chol_.solve(r);
      std::copy(t.begin(), t.end(), z.begin());
   }

   void half_solve(DenseMatrix &X) const override
   {
      check_block(*this, X);
      chol_.half_solve_columns(X, false);
   }

   Vector half_apply_transpose(std::span<const double> v) const override
   {
      return chol_.half_apply(v, true);
   }

   DenseMatrix dense_matrix() const override { return M_; }

private:
   DenseMatrix M_;
   DenseCholesky chol_;
};

class PcgInner final : public InnerOperator
{
public:
   PcgInner(const CsrMatrix &M, InnerPtr prec, double tol, std::size_t maxit)
      : M_(M), prec_(std::move(prec)), tol_(tol), maxit_(maxit)
   {
      if (!prec_ || prec_->size() != M_.rows()) { throw DimensionError(kModule, "inner-pcg: preconditioner size differs from matrix"); }
   }

   std::size_t size() const override { return M_.rows(); }
   std::string kind() const override { return "inner-pcg"; }
   std::string describe() const override
   {
      std::ostringstream os;
      os << "inner-pcg(tol=" << tol_ << ", maxit=" << maxit_ << ", " << prec_->describe() << ")";
      return os.str();
   }

   void apply_inverse(std::span<const double> r, std::span<double> z) const override
   {
      check_vectors(size(), r, z);
      auto res = pcg(LinearOperator::from_csr(M_), inverse_operator(prec_), r, tol_, maxit_);
      std::copy(res.x.begin(), res.x.end(), z.begin());
   }

   bool is_linear() const override { return false; }

   void half_solve(DenseMatrix &) const override
   {
      throw UnsupportedError(kModule, "inner-pcg has no half factor; use its linear surrogate");
   }
   Vector half_apply_transpose(std::span<const double>) const override
   {
      throw UnsupportedError(kModule, "inner-pcg has no half factor; use its linear surrogate");
   }
   DenseMatrix dense_matrix() const override
   {
      throw UnsupportedError(kModule, "inner-pcg has no explicit matrix; use its linear surrogate");
   }

   const InnerPtr &surrogate() const { return prec_; }

private:
   CsrMatrix M_;
   InnerPtr prec_;
   double tol_;
   std::size_t maxit_;
};

class ScaledInner final : public InnerOperator
{
public:
   ScaledInner(InnerPtr base, double omega) : base_(std::move(base)), omega_(omega) {}

   std::size_t size() const override { return base_->size(); }
   std::string kind() const override { return "scaled"; }
   std::string describe() const override
   {
      std::ostringstream os;
      os << "scaled(omega=" << omega_ << ", " << base_->describe() << ")";
      return os.str();
   }

   void apply_inverse(std::span<const double> r, std::span<double> z) const override
   {
      base_->apply_inverse(r, z);
      for (double &v : z) { v *= omega_; }
   }

   bool is_linear() const override { return base_->is_linear(); }

   void half_solve(DenseMatrix &X) const override
   {
      base_->half_solve(X);
      const double s = std::sqrt(omega_);
      for (std::size_t i = 0; i < X.rows(); ++i)
      {
         for (double &v : X.row(i)) { v *= s; }
      }
   }

   Vector half_apply_transpose(std::span<const double> v) const override
   {
      Vector y = base_->half_apply_transpose(v);
      const double s = 1.0 / std::sqrt(omega_);
      for (double &x : y) { x *= s; }
      return y;
   }

   DenseMatrix dense_matrix() const override
   {
      DenseMatrix M = base_->dense_matrix();
      for (std::size_t i = 0; i < M.rows(); ++i)
      {
         for (double &v : M.row(i)) { v /= omega_; }
      }
      return M;
   }

   std::optional<Vector> inverse_diagonal() const override
   {
      auto d = base_->inverse_diagonal();
      if (d)
      {
         for (double &v : *d) { v *= omega_; }
      }
      return d;
   }

   const InnerPtr &base() const { return base_; }
   double omega() const { return omega_; }

private:
   InnerPtr base_;
   double omega_;
};
} // namespace

Vector InnerOperator::apply_inverse(std::span<const double> r) const
{
   Vector z(size());
   apply_inverse(r, z);
   return z;
}

InnerPtr make_diagonal(Vector d, std::string kind)
{
   return std::make_shared<DiagonalInner>(std::move(d), std::move(kind));
}

InnerPtr make_jacobi(const CsrMatrix &M)
{
   if (M.rows() != M.cols()) { throw DimensionError(kModule, "jacobi: matrix is not square"); }
   return make_diagonal(diagonal_of(M), "jacobi");
}

InnerPtr make_ic0(const CsrMatrix &M)
{
   if (M.rows() != M.cols()) { throw DimensionError(kModule, "ic0: matrix is not square"); }
   return std::make_shared<Ic0Inner>(M);
}

InnerPtr make_exact_dense(const DenseMatrix &M)
{
   if (M.rows() != M.cols()) { throw DimensionError(kModule, "exact-dense: matrix is not square"); }
   return std::make_shared<DenseInner>(M);
}

InnerPtr make_exact_dense(const CsrMatrix &M)
{
   return make_exact_dense(DenseMatrix::from_sparse(M));
}

InnerPtr make_inner_pcg(const CsrMatrix &M, InnerPtr prec, double tol, std::size_t maxit)
{
   if (M.rows() != M.cols()) { throw DimensionError(kModule, "inner-pcg: matrix is not square"); }
   if (!(tol > 0.0) || maxit == 0) { throw ConfigError(kModule, "inner-pcg: tol and maxit must be positive"); }
   return std::make_shared<PcgInner>(M, std::move(prec), tol, maxit);
}

InnerPtr apply_omega(InnerPtr op, double omega)
{
   if (!(omega > 0.0)) { throw ConfigError(kModule, "recipe.omega must be positive"); }
   if (omega == 1.0) { return op; }
   return std::make_shared<ScaledInner>(std::move(op), omega);
}

InnerPtr linear_surrogate(const InnerPtr &op)
{
   if (op->is_linear()) { return op; }
   if (auto p = std::dynamic_pointer_cast<const PcgInner>(op)) { return p->surrogate(); }
   if (auto s = std::dynamic_pointer_cast<const ScaledInner>(op))
   {
      return apply_omega(linear_surrogate(s->base()), s->omega());
   }
   throw UnsupportedError(kModule, "operator '" + op->describe() + "' has no linear surrogate");
}

LinearOperator inverse_operator(const InnerPtr &op)
{
   InnerPtr keep = op;
   return {op->size(), op->size(), [keep](std::span<const double> x, std::span<double> y) { keep->apply_inverse(x, y); }};
}

} // namespace biotdsp
