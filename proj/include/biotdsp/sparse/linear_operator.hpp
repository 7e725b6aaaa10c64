#pragma once

#include "biotdsp/sparse/csr_matrix.hpp"
#include "biotdsp/sparse/dense.hpp"

#include <cstddef>
#include <functional>
#include <span>

namespace biotdsp
{

/// Matrix-free square-or-rectangular linear map y = Op(x).
class LinearOperator
{
public:
   using ApplyFn = std::function<void(std::span<const double>, std::span<double>)>;

   LinearOperator() = default;
   LinearOperator(std::size_t rows, std::size_t cols, ApplyFn fn)
      : rows_(rows), cols_(cols), fn_(std::move(fn)) {}

   std::size_t rows() const { return rows_; }
   std::size_t cols() const { return cols_; }

   void apply(std::span<const double> x, std::span<double> y) const;
   Vector operator()(std::span<const double> x) const;

   static LinearOperator identity(std::size_t n);
   static LinearOperator from_csr(const CsrMatrix &M);
   static LinearOperator from_dense(const DenseMatrix &M);

private:
   std::size_t rows_ = 0;
   std::size_t cols_ = 0;
   ApplyFn fn_;
};

/// Dense image of the operator, built column by column; desk scale only.
DenseMatrix to_dense(const LinearOperator &Op);

} // namespace biotdsp
