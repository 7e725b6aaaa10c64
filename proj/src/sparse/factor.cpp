#include "biotdsp/sparse/factor.hpp"

#include "biotdsp/errors.hpp"
#include "biotdsp/sparse/dense.hpp"

#include <cmath>
#include <string>
#include <vector>

namespace biotdsp
{

namespace
{
const char *kModule = "sparse-core";

CsrMatrix shifted(const CsrMatrix &M, double sigma)
{
   if (sigma == 0.0) { return M; }
   Vector d = diagonal_of(M);
   for (double &v : d) { v *= sigma; }
   return add(M, CsrMatrix::diagonal(d));
}
} // namespace

TriangularFactor ic0(const CsrMatrix &M)
{
   if (M.rows() != M.cols()) { throw DimensionError(kModule, "ic0: matrix is not square"); }
   const std::size_t n = M.rows();
   CsrMatrix Lpat = lower_triangle(M);
   auto rp = Lpat.row_ptr();
   auto ci = Lpat.col_idx();
   Vector val(Lpat.values().begin(), Lpat.values().end());

   // Row-oriented IC(0): L(i,j) = (M(i,j) - sum_{k<j} L(i,k) L(j,k)) / L(j,j)
   // restricted to the lower pattern of M.
   std::vector<std::size_t> diag_pos(n);
   std::vector<long> marker(n, -1);
   for (std::size_t i = 0; i < n; ++i)
   {
      if (rp[i + 1] == rp[i] || ci[rp[i + 1] - 1] != i)
      {
         throw BreakdownError(kModule, i, 0.0);
      }
      diag_pos[i] = rp[i + 1] - 1;
   }
   for (std::size_t i = 0; i < n; ++i)
   {
      for (std::size_t k = rp[i]; k < rp[i + 1]; ++k) { marker[ci[k]] = static_cast<long>(k); }
      for (std::size_t a = rp[i]; a < diag_pos[i]; ++a)
      {
         const std::size_t j = ci[a];
         // Sparse dot of rows i and j over columns < j.
         double s = val[a];
         for (std::size_t b = rp[j]; b < diag_pos[j]; ++b)
         {
            const long pos = marker[ci[b]];
            if (pos >= 0 && static_cast<std::size_t>(pos) < a) { s -= val[pos] * val[b]; }
         }
         val[a] = s / val[diag_pos[j]];
      }
      double d = val[diag_pos[i]];
      for (std::size_t a = rp[i]; a < diag_pos[i]; ++a) { d -= val[a] * val[a]; }
      if (!(d > 0.0)) { throw BreakdownError(kModule, i, d); }
      val[diag_pos[i]] = std::sqrt(d);
      for (std::size_t k = rp[i]; k < rp[i + 1]; ++k) { marker[ci[k]] = -1; }
   }
   TriangularFactor F;
   F.L = CsrMatrix(n, n, {rp.begin(), rp.end()}, {ci.begin(), ci.end()}, std::move(val));
   F.kind = FactorKind::ic0;
   return F;
}

TriangularFactor ic0_shifted(const CsrMatrix &M, double initial_shift, int max_retries)
{
   try
   {
      return ic0(M);
   }
   catch (const BreakdownError &)
   {
      if (max_retries <= 0) { throw; }
   }
   double sigma = initial_shift;
   for (int attempt = 1;; ++attempt, sigma *= 2.0)
   {
      try
      {
         TriangularFactor F = ic0(shifted(M, sigma));
         F.shift = sigma;
         return F;
      }
      catch (const BreakdownError &)
      {
         if (attempt >= max_retries) { throw; }
      }
   }
}

TriangularFactor complete_cholesky(const CsrMatrix &M)
{
   DenseCholesky C(DenseMatrix::from_sparse(M));
   const DenseMatrix &L = C.L();
   TripletList t(L.rows(), L.cols());
   for (std::size_t i = 0; i < L.rows(); ++i)
   {
      for (std::size_t j = 0; j <= i; ++j)
      {
         if (L(i, j) != 0.0) { t.add(i, j, L(i, j)); }
      }
   }
   TriangularFactor F;
   F.L = t.to_csr();
   F.kind = FactorKind::complete_cholesky;
   return F;
}

Vector solve_triangular(const TriangularFactor &F, std::span<const double> b, bool transposed)
{
   const CsrMatrix &L = F.L;
   const std::size_t n = L.rows();
   if (b.size() != n) { throw DimensionError(kModule, "solve_triangular: length mismatch"); }
   auto rp = L.row_ptr();
   auto ci = L.col_idx();
   auto v = L.values();
   auto diag = [&](std::size_t i) {
      if (rp[i + 1] == rp[i] || ci[rp[i + 1] - 1] != i || v[rp[i + 1] - 1] == 0.0)
      {
         throw SingularFactorError(kModule, "zero diagonal in triangular factor at row " +
                                   std::to_string(i));
      }
      return v[rp[i + 1] - 1];
   };
   Vector x(b.begin(), b.end());
   if (!transposed)
   {
      for (std::size_t i = 0; i < n; ++i)
      {
         double s = x[i];
         for (std::size_t k = rp[i]; k + 1 < rp[i + 1]; ++k) { s -= v[k] * x[ci[k]]; }
         x[i] = s / diag(i);
      }
   }
   else
   {
      for (std::size_t i = n; i-- > 0;)
      {
         x[i] /= diag(i);
         for (std::size_t k = rp[i]; k + 1 < rp[i + 1]; ++k) { x[ci[k]] -= v[k] * x[i]; }
      }
   }
   return x;
}

Vector factor_solve(const TriangularFactor &F, std::span<const double> b)
{
   return solve_triangular(F, solve_triangular(F, b, false), true);
}

Vector factor_apply(const TriangularFactor &F, std::span<const double> b, bool transposed)
{
   return transposed ? spmv_transpose(F.L, b) : spmv(F.L, b);
}

} // namespace biotdsp
