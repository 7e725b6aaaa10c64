#include "biotdsp/sparse/linear_operator.hpp"

#include "biotdsp/errors.hpp"

#include <algorithm>
#include <memory>

namespace biotdsp
{

void LinearOperator::apply(std::span<const double> x, std::span<double> y) const
{
   if (x.size() != cols_ || y.size() != rows_)
   {
      throw DimensionError("sparse-core", "operator apply: expected " + std::to_string(cols_) +
                           " -> " + std::to_string(rows_) + ", got " + std::to_string(x.size()) +
                           " -> " + std::to_string(y.size()));
   }
   fn_(x, y);
}

Vector LinearOperator::operator()(std::span<const double> x) const
{
   Vector y(rows_);
   apply(x, y);
   return y;
}

LinearOperator LinearOperator::identity(std::size_t n)
{
   return {n, n, [](std::span<const double> x, std::span<double> y) {
              std::copy(x.begin(), x.end(), y.begin());
           }};
}

LinearOperator LinearOperator::from_csr(const CsrMatrix &M)
{
   auto shared = std::make_shared<const CsrMatrix>(M);
   return {M.rows(), M.cols(),
           [shared](std::span<const double> x, std::span<double> y) { spmv(*shared, x, y); }};
}

LinearOperator LinearOperator::from_dense(const DenseMatrix &M)
{
   auto shared = std::make_shared<const DenseMatrix>(M);
   return {M.rows(), M.cols(), [shared](std::span<const double> x, std::span<double> y) {
              Vector r = matvec(*shared, x);
              std::copy(r.begin(), r.end(), y.begin());
           }};
}

DenseMatrix to_dense(const LinearOperator &Op)
{
   DenseMatrix D(Op.rows(), Op.cols());
   Vector e(Op.cols(), 0.0), col(Op.rows());
   for (std::size_t j = 0; j < Op.cols(); ++j)
   {
      e[j] = 1.0;
      Op.apply(e, col);
      e[j] = 0.0;
      for (std::size_t i = 0; i < Op.rows(); ++i) { D(i, j) = col[i]; }
   }
   return D;
}

} // namespace biotdsp
