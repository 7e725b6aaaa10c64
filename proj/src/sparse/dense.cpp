#include "biotdsp/sparse/dense.hpp"

#include "biotdsp/errors.hpp"

#include <cblas.h>
#include <lapacke.h>

#include <algorithm>
#include <cmath>
#include <string>

namespace biotdsp
{

namespace
{
const char *kModule = "sparse-core";

void require_square(const DenseMatrix &M, const char *what)
{
   if (M.rows() != M.cols())
   {
      throw DimensionError(kModule, std::string(what) + ": matrix is " +
                           std::to_string(M.rows()) + "x" + std::to_string(M.cols()));
   }
}

lapack_int to_int(std::size_t n)
{
   return static_cast<lapack_int>(n);
}
} // namespace

DenseMatrix DenseMatrix::identity(std::size_t n)
{
   DenseMatrix I(n, n);
   for (std::size_t i = 0; i < n; ++i) { I(i, i) = 1.0; }
   return I;
}

DenseMatrix DenseMatrix::from_sparse(const CsrMatrix &M)
{
   DenseMatrix D(M.rows(), M.cols());
   for (std::size_t i = 0; i < M.rows(); ++i)
   {
      auto c = M.row_cols(i);
      auto v = M.row_vals(i);
      for (std::size_t k = 0; k < c.size(); ++k) { D(i, c[k]) = v[k]; }
   }
   return D;
}

DenseMatrix DenseMatrix::transposed() const
{
   DenseMatrix T(cols_, rows_);
   for (std::size_t i = 0; i < rows_; ++i)
   {
      for (std::size_t j = 0; j < cols_; ++j) { T(j, i) = (*this)(i, j); }
   }
   return T;
}

double DenseMatrix::norm_fro() const
{
   double s = 0.0;
   for (double v : data_) { s += v * v; }
   return std::sqrt(s);
}

double DenseMatrix::max_abs() const
{
   double m = 0.0;
   for (double v : data_) { m = std::max(m, std::abs(v)); }
   return m;
}

DenseMatrix matmul(const DenseMatrix &X, const DenseMatrix &Y)
{
   if (X.cols() != Y.rows()) { throw DimensionError(kModule, "matmul: inner dimensions differ"); }
   DenseMatrix Z(X.rows(), Y.cols());
   if (Z.rows() == 0 || Z.cols() == 0 || X.cols() == 0) { return Z; }
   cblas_dgemm(CblasRowMajor, CblasNoTrans, CblasNoTrans, to_int(X.rows()), to_int(Y.cols()),
               to_int(X.cols()), 1.0, X.data(), to_int(X.cols()), Y.data(), to_int(Y.cols()), 0.0,
               Z.data(), to_int(Z.cols()));
   return Z;
}

Vector matvec(const DenseMatrix &M, std::span<const double> x)
{
   if (x.size() != M.cols()) { throw DimensionError(kModule, "matvec: length mismatch"); }
   Vector y(M.rows(), 0.0);
   for (std::size_t i = 0; i < M.rows(); ++i)
   {
      double s = 0.0;
      for (std::size_t j = 0; j < M.cols(); ++j) { s += M(i, j) * x[j]; }
      y[i] = s;
   }
   return y;
}

DenseMatrix add(const DenseMatrix &X, const DenseMatrix &Y, double alpha, double beta)
{
   if (X.rows() != Y.rows() || X.cols() != Y.cols())
   {
      throw DimensionError(kModule, "add: operand shapes differ");
   }
   DenseMatrix Z(X.rows(), X.cols());
   for (std::size_t i = 0; i < X.rows(); ++i)
   {
      for (std::size_t j = 0; j < X.cols(); ++j) { Z(i, j) = alpha * X(i, j) + beta * Y(i, j); }
   }
   return Z;
}

double symmetry_defect(const DenseMatrix &M)
{
   if (M.rows() != M.cols()) { return INFINITY; }
   const double scale = M.max_abs();
   if (scale == 0.0) { return 0.0; }
   double d = 0.0;
   for (std::size_t i = 0; i < M.rows(); ++i)
   {
      for (std::size_t j = i + 1; j < M.cols(); ++j) { d = std::max(d, std::abs(M(i, j) - M(j, i))); }
   }
   return d / scale;
}

DenseCholesky::DenseCholesky(const DenseMatrix &M) : L_(M)
{
   require_square(M, "cholesky");
   const std::size_t n = M.rows();
   if (n == 0) { return; }
   // Column-major upper factor of the symmetric input is the row-major lower factor.
   const lapack_int info = LAPACKE_dpotrf(LAPACK_COL_MAJOR, 'U', to_int(n), L_.data(), to_int(n));
   if (info > 0)
   {
      const std::size_t row = static_cast<std::size_t>(info - 1);
      throw BreakdownError(kModule, row, L_(row, row));
   }
   if (info < 0) { throw ContractError(kModule, "dpotrf rejected argument " + std::to_string(-info)); }
   for (std::size_t i = 0; i < n; ++i)
   {
      for (std::size_t j = i + 1; j < n; ++j) { L_(i, j) = 0.0; }
   }
}

Vector DenseCholesky::half_solve(std::span<const double> b, bool transposed) const
{
   if (b.size() != size()) { throw DimensionError(kModule, "cholesky half_solve: length mismatch"); }
   Vector x(b.begin(), b.end());
   if (x.empty()) { return x; }
   cblas_dtrsv(CblasRowMajor, CblasLower, transposed ? CblasTrans : CblasNoTrans, CblasNonUnit,
               to_int(size()), L_.data(), to_int(size()), x.data(), 1);
   return x;
}

Vector DenseCholesky::half_apply(std::span<const double> b, bool transposed) const
{
   if (b.size() != size()) { throw DimensionError(kModule, "cholesky half_apply: length mismatch"); }
   Vector x(b.begin(), b.end());
   if (x.empty()) { return x; }
   cblas_dtrmv(CblasRowMajor, CblasLower, transposed ? CblasTrans : CblasNoTrans, CblasNonUnit,
               to_int(size()), L_.data(), to_int(size()), x.data(), 1);
   return x;
}

Vector DenseCholesky::solve(std::span<const double> b) const
{
   return half_solve(half_solve(b, false), true);
}

void DenseCholesky::half_solve_columns(DenseMatrix &X, bool transposed) const
{
   if (X.rows() != size()) { throw DimensionError(kModule, "cholesky half_solve_columns: shape"); }
   if (X.rows() == 0 || X.cols() == 0) { return; }
   cblas_dtrsm(CblasRowMajor, CblasLeft, CblasLower, transposed ? CblasTrans : CblasNoTrans,
               CblasNonUnit, to_int(X.rows()), to_int(X.cols()), 1.0, L_.data(), to_int(size()),
               X.data(), to_int(X.cols()));
}

void DenseCholesky::half_solve_rows(DenseMatrix &X, bool transposed) const
{
   if (X.cols() != size()) { throw DimensionError(kModule, "cholesky half_solve_rows: shape"); }
   if (X.rows() == 0 || X.cols() == 0) { return; }
   // X L^{-T} when transposed is false, X L^{-1} otherwise.
   cblas_dtrsm(CblasRowMajor, CblasRight, CblasLower, transposed ? CblasNoTrans : CblasTrans,
               CblasNonUnit, to_int(X.rows()), to_int(X.cols()), 1.0, L_.data(), to_int(size()),
               X.data(), to_int(X.cols()));
}

Vector dense_solve(const DenseMatrix &M, std::span<const double> b)
{
   require_square(M, "dense_solve");
   if (b.size() != M.rows()) { throw DimensionError(kModule, "dense_solve: length mismatch"); }
   const std::size_t n = M.rows();
   Vector x(b.begin(), b.end());
   if (n == 0) { return x; }
   DenseMatrix LU = M;
   std::vector<lapack_int> piv(n);
   const lapack_int info = LAPACKE_dgesv(LAPACK_ROW_MAJOR, to_int(n), 1, LU.data(), to_int(n),
                                         piv.data(), x.data(), 1);
   if (info > 0) { throw SingularFactorError(kModule, "dense_solve: exactly singular matrix"); }
   return x;
}

DenseMatrix dense_inverse(const DenseMatrix &M)
{
   require_square(M, "dense_inverse");
   const std::size_t n = M.rows();
   DenseMatrix Inv = M;
   if (n == 0) { return Inv; }
   std::vector<lapack_int> piv(n);
   lapack_int info = LAPACKE_dgetrf(LAPACK_ROW_MAJOR, to_int(n), to_int(n), Inv.data(), to_int(n),
                                    piv.data());
   if (info > 0) { throw SingularFactorError(kModule, "dense_inverse: exactly singular matrix"); }
   info = LAPACKE_dgetri(LAPACK_ROW_MAJOR, to_int(n), Inv.data(), to_int(n), piv.data());
   if (info > 0) { throw SingularFactorError(kModule, "dense_inverse: exactly singular matrix"); }
   return Inv;
}

EigenSpectrum dense_eig_symmetric(const DenseMatrix &M, bool want_vectors)
{
   require_square(M, "dense_eig_symmetric");
   if (symmetry_defect(M) > 1e-12)
   {
      throw ContractError(kModule, "dense_eig_symmetric: input is not symmetric");
   }
   const std::size_t n = M.rows();
   EigenSpectrum out;
   if (!want_vectors)
   {
      for (double v : dense_eigvals_symmetric(M)) { out.values.emplace_back(v, 0.0); }
      return out;
   }
   DenseMatrix Z = M;
   std::vector<double> w(n);
   if (n > 0)
   {
      const lapack_int info = LAPACKE_dsyevd(LAPACK_ROW_MAJOR, 'V', 'L', to_int(n), Z.data(),
                                             to_int(n), w.data());
      if (info > 0) { throw ConvergenceError(kModule, "dsyevd failed to converge", NAN); }
   }
   out.values.reserve(n);
   for (double v : w) { out.values.emplace_back(v, 0.0); }
   std::vector<std::vector<std::complex<double>>> vecs(n, std::vector<std::complex<double>>(n));
   for (std::size_t k = 0; k < n; ++k)
   {
      for (std::size_t i = 0; i < n; ++i) { vecs[k][i] = Z(i, k); }
   }
   out.vectors = std::move(vecs);
   return out;
}

std::vector<double> dense_eigvals_symmetric(DenseMatrix M)
{
   require_square(M, "dense_eigvals_symmetric");
   const std::size_t n = M.rows();
   std::vector<double> w(n);
   if (n == 0) { return w; }
   // Symmetric storage is layout-agnostic, so the column-major call avoids a transpose copy.
   const lapack_int info = LAPACKE_dsyevd(LAPACK_COL_MAJOR, 'N', 'U', to_int(n), M.data(),
                                          to_int(n), w.data());
   if (info > 0) { throw ConvergenceError(kModule, "dsyevd failed to converge", NAN); }
   return w;
}

std::vector<double> dense_singular_values(DenseMatrix M)
{
   const std::size_t r = M.rows(), c = M.cols();
   std::vector<double> s(std::min(r, c));
   if (s.empty()) { return s; }
   // Singular values of M^T equal those of M, so the row-major data is passed as column-major.
   const lapack_int info = LAPACKE_dgesdd(LAPACK_COL_MAJOR, 'N', to_int(c), to_int(r), M.data(), to_int(c),
                                          s.data(), nullptr, 1, nullptr, 1);
   if (info > 0) { throw ConvergenceError(kModule, "dgesdd failed to converge", NAN); }
   return s;
}

namespace
{
double subdiagonal_norm(const DenseMatrix &Hcol, std::size_t n)
{
   // Hcol holds a column-major Hessenberg matrix; H(i+1,i) sits at [i*n + i+1].
   double s = 0.0;
   for (std::size_t i = 0; i + 1 < n; ++i)
   {
      const double v = Hcol.data()[i * n + i + 1];
      s += v * v;
   }
   return std::sqrt(s);
}
} // namespace

EigenSpectrum dense_eig_general(DenseMatrix M, bool want_vectors)
{
   require_square(M, "dense_eig_general");
   const std::size_t n = M.rows();
   EigenSpectrum out;
   if (n == 0) { return out; }
   const lapack_int N = to_int(n);
   std::vector<double> wr(n), wi(n);
   if (!want_vectors)
   {
      // Read as column-major the buffer holds M^T, which has the same spectrum.
      lapack_int ilo = 1, ihi = N;
      std::vector<double> scale(n), tau(n > 1 ? n - 1 : 1);
      lapack_int info = LAPACKE_dgebal(LAPACK_COL_MAJOR, 'B', N, M.data(), N, &ilo, &ihi,
                                       scale.data());
      if (info != 0) { throw ContractError(kModule, "dgebal failed"); }
      info = LAPACKE_dgehrd(LAPACK_COL_MAJOR, N, ilo, ihi, M.data(), N, tau.data());
      if (info != 0) { throw ContractError(kModule, "dgehrd failed"); }
      // Entries below the first subdiagonal hold Householder data; clear them for dhseqr.
      for (std::size_t j = 0; j < n; ++j)
      {
         for (std::size_t i = j + 2; i < n; ++i) { M.data()[j * n + i] = 0.0; }
      }
      info = LAPACKE_dhseqr(LAPACK_COL_MAJOR, 'E', 'N', N, ilo, ihi, M.data(), N, wr.data(),
                            wi.data(), nullptr, N);
      if (info > 0)
      {
         throw ConvergenceError(kModule, "shifted QR iteration did not converge",
                                subdiagonal_norm(M, n));
      }
   }
   else
   {
      DenseMatrix Mt = M.transposed(); // column-major image of M
      std::vector<double> vr(n * n);
      const lapack_int info = LAPACKE_dgeev(LAPACK_COL_MAJOR, 'N', 'V', N, Mt.data(), N,
                                            wr.data(), wi.data(), nullptr, N, vr.data(), N);
      if (info > 0)
      {
         throw ConvergenceError(kModule, "shifted QR iteration did not converge",
                                subdiagonal_norm(Mt, n));
      }
      std::vector<std::vector<std::complex<double>>> vecs(n, std::vector<std::complex<double>>(n));
      for (std::size_t k = 0; k < n; ++k)
      {
         if (wi[k] != 0.0 && k + 1 < n)
         {
            for (std::size_t i = 0; i < n; ++i)
            {
               const double re = vr[k * n + i], im = vr[(k + 1) * n + i];
               vecs[k][i] = {re, im};
               vecs[k + 1][i] = {re, -im};
            }
            ++k;
         }
         else
         {
            for (std::size_t i = 0; i < n; ++i) { vecs[k][i] = vr[k * n + i]; }
         }
      }
      out.vectors = std::move(vecs);
   }
   out.values.resize(n);
   for (std::size_t k = 0; k < n; ++k)
   {
      if (wi[k] != 0.0 && k + 1 < n)
      {
         // LAPACK returns pairs with positive imaginary part first; enforce exact conjugacy.
         const double re = 0.5 * (wr[k] + wr[k + 1]);
         const double im = 0.5 * (std::abs(wi[k]) + std::abs(wi[k + 1]));
         out.values[k] = {re, im};
         out.values[k + 1] = {re, -im};
         ++k;
      }
      else
      {
         out.values[k] = {wr[k], 0.0};
      }
   }
   return out;
}

Extremes generalized_sym_eig_extremes(const DenseMatrix &M, const DenseCholesky &N)
{
   require_square(M, "generalized_sym_eig_extremes");
   if (M.rows() != N.size())
   {
      throw DimensionError(kModule, "generalized_sym_eig_extremes: pencil sizes differ");
   }
   if (M.rows() == 0) { return {}; }
   DenseMatrix T = M;
   N.half_solve_columns(T, false);
   N.half_solve_rows(T, false);
   // Remove rounding asymmetry before the symmetric solver.
   for (std::size_t i = 0; i < T.rows(); ++i)
   {
      for (std::size_t j = i + 1; j < T.cols(); ++j)
      {
         const double s = 0.5 * (T(i, j) + T(j, i));
         T(i, j) = s;
         T(j, i) = s;
      }
   }
   auto w = dense_eigvals_symmetric(std::move(T));
   return {w.front(), w.back()};
}

Extremes generalized_sym_eig_extremes(const DenseMatrix &M, const DenseMatrix &N)
{
   return generalized_sym_eig_extremes(M, DenseCholesky(N));
}

} // namespace biotdsp
