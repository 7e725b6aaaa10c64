#include "biotdsp/spectral/indicators.hpp"

#include "biotdsp/errors.hpp"
#include "biotdsp/schur/schur.hpp"

#include <algorithm>
#include <cmath>

namespace biotdsp
{

namespace
{
const char *kModule = "spectral";

Interval to_interval(const Extremes &e, bool semidefinite)
{
   Interval I{e.min, e.max};
   if (semidefinite && I.min < 0.0 && std::abs(I.min) <= 1e-12 * std::max(1.0, std::abs(I.max))) { I.min = 0.0; }
   return I;
}

InnerPtr surrogate_noted(const InnerPtr &op, const char *label, std::string &note)
{
   InnerPtr lin = linear_surrogate(op);
   if (lin != op)
   {
      if (!note.empty()) { note += "; "; }
      note += std::string(label) + " replaced by linear surrogate " + lin->describe();
   }
   return lin;
}
} // namespace

DenseMatrix pencil_matrix(const DenseMatrix &M, const InnerOperator &op)
{
   if (M.rows() != op.size() || M.cols() != op.size())
   {
      throw DimensionError(kModule, "pencil: matrix size differs from operator size");
   }
   DenseMatrix Y = M;
   op.half_solve(Y);
   DenseMatrix T = Y.transposed();
   op.half_solve(T);
   for (std::size_t i = 0; i < T.rows(); ++i)
   {
      for (std::size_t j = i + 1; j < T.cols(); ++j)
      {
         const double s = 0.5 * (T(i, j) + T(j, i));
         T(i, j) = s;
         T(j, i) = s;
      }
   }
   return T;
}

Extremes pencil_extremes(const DenseMatrix &M, const InnerOperator &op)
{
   auto w = dense_eigvals_symmetric(pencil_matrix(M, op));
   if (w.empty()) { return {}; }
   return {w.front(), w.back()};
}

IndicatorSet compute_indicators(const DspSystem &sys, const InnerPtr &a_hat, const InnerPtr &s_hat,
                                const InnerPtr &x_hat)
{
   sys.check_shapes();
   if (a_hat->size() != sys.n() || s_hat->size() != sys.m() || x_hat->size() != sys.p())
   {
      throw DimensionError(kModule, "compute_indicators: inner operator sizes differ from (n, m, p)");
   }
   IndicatorSet ind;
   const InnerPtr a = surrogate_noted(a_hat, "A-hat", ind.note);
   const InnerPtr s = surrogate_noted(s_hat, "S-hat", ind.note);
   const InnerPtr x = surrogate_noted(x_hat, "X-hat", ind.note);

   ind.A = to_interval(pencil_extremes(DenseMatrix::from_sparse(sys.A), *a), false);

   const DenseMatrix BAB = dense_schur_product(sys.B, *a);
   const DenseMatrix D = DenseMatrix::from_sparse(sys.D);
   ind.R = to_interval(pencil_extremes(BAB, *s), false);
   ind.D = to_interval(pencil_extremes(D, *s), true);
   ind.S = to_interval(pencil_extremes(add(D, BAB), *s), false);

   const DenseMatrix CSC = dense_schur_product(sys.C, *s);
   const DenseMatrix E = DenseMatrix::from_sparse(sys.E);
   ind.K = to_interval(pencil_extremes(CSC, *x), true);
   ind.E = to_interval(pencil_extremes(E, *x), false);
   ind.X = to_interval(pencil_extremes(add(E, CSC), *x), false);
   return ind;
}

} // namespace biotdsp
