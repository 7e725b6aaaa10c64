#pragma once

#include "biotdsp/sparse/csr_matrix.hpp"

#include <complex>
#include <cstddef>
#include <optional>
#include <span>
#include <vector>

namespace biotdsp
{

/// Row-major dense real matrix for desk-scale computations.
class DenseMatrix
{
public:
   DenseMatrix() = default;
   DenseMatrix(std::size_t rows, std::size_t cols, double fill = 0.0)
      : rows_(rows), cols_(cols), data_(rows * cols, fill) {}

   std::size_t rows() const { return rows_; }
   std::size_t cols() const { return cols_; }

   double &operator()(std::size_t i, std::size_t j) { return data_[i * cols_ + j]; }
   double operator()(std::size_t i, std::size_t j) const { return data_[i * cols_ + j]; }

   double *data() { return data_.data(); }
   const double *data() const { return data_.data(); }
   std::span<double> row(std::size_t i) { return {data_.data() + i * cols_, cols_}; }
   std::span<const double> row(std::size_t i) const { return {data_.data() + i * cols_, cols_}; }

   static DenseMatrix identity(std::size_t n);
   static DenseMatrix from_sparse(const CsrMatrix &M);

   DenseMatrix transposed() const;
   /// Frobenius norm.
   double norm_fro() const;
   double max_abs() const;

private:
   std::size_t rows_ = 0;
   std::size_t cols_ = 0;
   std::vector<double> data_;
};

DenseMatrix matmul(const DenseMatrix &X, const DenseMatrix &Y);
Vector matvec(const DenseMatrix &M, std::span<const double> x);
/// alpha*X + beta*Y
DenseMatrix add(const DenseMatrix &X, const DenseMatrix &Y, double alpha = 1.0,
                double beta = 1.0);
/// Largest entrywise |M - M^T| relative to max|M|.
double symmetry_defect(const DenseMatrix &M);

/// Dense Cholesky factor M = L L^T (LAPACK dpotrf).
class DenseCholesky
{
public:
   /// Throws BreakdownError with the failing row when M is not SPD.
   explicit DenseCholesky(const DenseMatrix &M);

   std::size_t size() const { return L_.rows(); }
   const DenseMatrix &L() const { return L_; }

   /// (L L^T)^{-1} b
   Vector solve(std::span<const double> b) const;
   /// L^{-1} b, or L^{-T} b when transposed is set.
   Vector half_solve(std::span<const double> b, bool transposed) const;
   /// L b, or L^T b when transposed is set.
   Vector half_apply(std::span<const double> b, bool transposed) const;
   /// In-place L^{-1} X (or L^{-T} X) for all columns of X.
   void half_solve_columns(DenseMatrix &X, bool transposed) const;
   /// In-place X L^{-T} (or X L^{-1}) for all rows of X.
   void half_solve_rows(DenseMatrix &X, bool transposed) const;

private:
   DenseMatrix L_;
};

/// Solves a general square system by LU with partial pivoting (LAPACK dgesv).
Vector dense_solve(const DenseMatrix &M, std::span<const double> b);
/// Explicit inverse via LU; desk scale only.
DenseMatrix dense_inverse(const DenseMatrix &M);

/// Eigenvalues (and optionally right eigenvectors) of a real matrix.
struct EigenSpectrum
{
   std::vector<std::complex<double>> values;
   /// Column k holds the eigenvector of values[k]; present only when requested.
   std::optional<std::vector<std::vector<std::complex<double>>>> vectors;

   std::size_t size() const { return values.size(); }
};

/// Symmetric eigenproblem, ascending real eigenvalues. Eigenvectors are
/// stored as real-valued complex columns when requested. Throws
/// ContractError when M is not symmetric to 1e-12 relative.
EigenSpectrum dense_eig_symmetric(const DenseMatrix &M, bool want_vectors = false);

/// Ascending eigenvalues only; takes the matrix by value so that the
/// storage can be reused as LAPACK workspace.
std::vector<double> dense_eigvals_symmetric(DenseMatrix M);

/// General real eigenproblem via Hessenberg reduction and shifted QR
/// (LAPACK dgehrd/dhseqr). Conjugate pairs are exactly conjugate. Throws
/// ConvergenceError carrying the subdiagonal norm left by the iteration.
EigenSpectrum dense_eig_general(DenseMatrix M, bool want_vectors = false);

/// Singular values in descending order (LAPACK dgesdd).
std::vector<double> dense_singular_values(DenseMatrix M);

/// Extreme eigenvalues of the symmetric pencil (M, N), N = L L^T SPD, from
/// the dense eigenvalues of L^{-1} M L^{-T}.
struct Extremes
{
   double min = 0.0;
   double max = 0.0;
};
Extremes generalized_sym_eig_extremes(const DenseMatrix &M, const DenseMatrix &N);
Extremes generalized_sym_eig_extremes(const DenseMatrix &M, const DenseCholesky &N);

} // namespace biotdsp
