#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace biotdsp
{

using Vector = std::vector<double>;

/// Real sparse matrix in compressed-sparse-row layout.
///
/// Column indices are strictly increasing within each row. Symmetric matrices
/// are always stored with both triangles. Instances are immutable once built;
/// use TripletList or the free functions below to produce new matrices.
class CsrMatrix
{
public:
   CsrMatrix() = default;
   CsrMatrix(std::size_t rows, std::size_t cols);
   /// Takes ownership of raw CSR arrays; validates the layout invariants.
   CsrMatrix(std::size_t rows, std::size_t cols, std::vector<std::size_t> row_ptr,
             std::vector<std::size_t> col_idx, Vector values);

   std::size_t rows() const { return rows_; }
   std::size_t cols() const { return cols_; }
   std::size_t nnz() const { return values_.size(); }

   std::span<const std::size_t> row_ptr() const { return row_ptr_; }
   std::span<const std::size_t> col_idx() const { return col_idx_; }
   std::span<const double> values() const { return values_; }

   std::span<const std::size_t> row_cols(std::size_t i) const
   {
      return {col_idx_.data() + row_ptr_[i], row_ptr_[i + 1] - row_ptr_[i]};
   }
   std::span<const double> row_vals(std::size_t i) const
   {
      return {values_.data() + row_ptr_[i], row_ptr_[i + 1] - row_ptr_[i]};
   }

   /// Entry (i,j), zero when not stored. Binary search in row i.
   double at(std::size_t i, std::size_t j) const;

   /// Largest absolute stored value.
   double max_abs() const;

   static CsrMatrix identity(std::size_t n);
   static CsrMatrix diagonal(std::span<const double> d);

private:
   std::size_t rows_ = 0;
   std::size_t cols_ = 0;
   std::vector<std::size_t> row_ptr_{0};
   std::vector<std::size_t> col_idx_;
   Vector values_;
};

/// Coordinate-format accumulator. Duplicate entries are summed on conversion
/// in a canonical order, so the result does not depend on insertion order.
class TripletList
{
public:
   TripletList(std::size_t rows, std::size_t cols) : rows_(rows), cols_(cols) {}

   void add(std::size_t i, std::size_t j, double v);
   void reserve(std::size_t n) { entries_.reserve(n); }

   std::size_t rows() const { return rows_; }
   std::size_t cols() const { return cols_; }

   /// Builds the CSR matrix. Exact zeros that result from summation are kept
   /// unless drop_zeros is set.
   CsrMatrix to_csr(bool drop_zeros = false) const;

private:
   struct Entry
   {
      std::size_t i, j;
      double v;
   };
   std::size_t rows_, cols_;
   std::vector<Entry> entries_;
};

/// y = M x
Vector spmv(const CsrMatrix &M, std::span<const double> x);
void spmv(const CsrMatrix &M, std::span<const double> x, std::span<double> y);
/// y = M^T x
Vector spmv_transpose(const CsrMatrix &M, std::span<const double> x);
void spmv_transpose(const CsrMatrix &M, std::span<const double> x, std::span<double> y);

CsrMatrix transpose(const CsrMatrix &M);
/// alpha*X + beta*Y
CsrMatrix add(const CsrMatrix &X, const CsrMatrix &Y, double alpha = 1.0, double beta = 1.0);
/// X*Y
CsrMatrix multiply(const CsrMatrix &X, const CsrMatrix &Y);
/// X * diag(d) * X^T, the workhorse of the explicit Schur approximations.
CsrMatrix multiply_scaled_transpose(const CsrMatrix &X, std::span<const double> d);
CsrMatrix scale(const CsrMatrix &M, double alpha);
/// diag(left) * M * diag(right); empty spans mean identity.
CsrMatrix scale_rows_cols(const CsrMatrix &M, std::span<const double> left,
                          std::span<const double> right);
Vector diagonal_of(const CsrMatrix &M);
/// Removes stored entries with |value| <= tol.
CsrMatrix drop_small(const CsrMatrix &M, double tol = 0.0);
/// Lower triangle including the diagonal.
CsrMatrix lower_triangle(const CsrMatrix &M);
/// Submatrix with the given (sorted or unsorted) row and column index lists.
CsrMatrix extract(const CsrMatrix &M, std::span<const std::size_t> rows,
                  std::span<const std::size_t> cols);

/// max |M - M^T| entrywise, relative to max|M| (0 for the zero matrix).
double symmetry_defect(const CsrMatrix &M);
bool is_symmetric(const CsrMatrix &M, double rel_tol = 1e-12);

// Dense vector helpers.
double dot(std::span<const double> x, std::span<const double> y);
double norm2(std::span<const double> x);
void axpy(double alpha, std::span<const double> x, std::span<double> y);

} // namespace biotdsp
