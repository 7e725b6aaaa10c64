#include "biotdsp/assembly/dsp_system.hpp"

#include "biotdsp/errors.hpp"
#include "biotdsp/sparse/dense.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <sstream>

namespace biotdsp
{

namespace
{
const char *kModule = "biot-assembly";

double gershgorin_lower(const CsrMatrix &M)
{
   double lo = INFINITY;
   for (std::size_t i = 0; i < M.rows(); ++i)
   {
      auto c = M.row_cols(i);
      auto v = M.row_vals(i);
      double d = 0.0, r = 0.0;
      for (std::size_t k = 0; k < c.size(); ++k)
      {
         if (c[k] == i) { d = v[k]; }
         else { r += std::abs(v[k]); }
      }
      lo = std::min(lo, d - r);
   }
   return M.rows() == 0 ? 0.0 : lo;
}

double rayleigh_min(const CsrMatrix &M, int samples)
{
   std::mt19937_64 rng(12345);
   std::uniform_real_distribution<double> u(-1.0, 1.0);
   double lo = INFINITY;
   Vector v(M.rows());
   for (int s = 0; s < samples; ++s)
   {
      for (double &x : v) { x = u(rng); }
      lo = std::min(lo, dot(v, spmv(M, v)) / dot(v, v));
   }
   return lo;
}

DefinitenessCheck probe(const CsrMatrix &M, double threshold, bool strict, std::size_t dense_limit)
{
   DefinitenessCheck r;
   if (M.rows() != M.cols() || !is_symmetric(M))
   {
      r.method = "symmetry";
      r.lambda_min = NAN;
      return r;
   }
   const double g = gershgorin_lower(M);
   if (strict ? g > threshold : g >= threshold)
   {
      r.method = "gershgorin";
      r.lambda_min = g;
      r.passed = true;
      return r;
   }
   if (M.rows() <= dense_limit)
   {
      r.method = "dense";
      auto w = dense_eigvals_symmetric(DenseMatrix::from_sparse(M));
      r.lambda_min = w.empty() ? 0.0 : w.front();
   }
   else
   {
      r.method = "rayleigh";
      r.lambda_min = rayleigh_min(M, 20);
   }
   r.passed = strict ? r.lambda_min > threshold : r.lambda_min >= threshold;
   return r;
}
} // namespace

void DspSystem::check_shapes() const
{
   const std::size_t n_ = A.rows(), m_ = D.rows(), p_ = E.rows();
   auto bad = [](const std::string &what) { throw DimensionError(kModule, what); };
   if (A.cols() != n_) { bad("A is not square"); }
   if (D.cols() != m_) { bad("D is not square"); }
   if (E.cols() != p_) { bad("E is not square"); }
   if (B.rows() != m_ || B.cols() != n_) { bad("B must be m x n"); }
   if (C.rows() != p_ || C.cols() != m_) { bad("C must be p x m"); }
   if (!rhs.empty() && rhs.size() != n_ + m_ + p_) { bad("rhs length differs from n+m+p"); }
}

void DspSystem::apply(std::span<const double> x, std::span<double> y) const
{
   const std::size_t n_ = n(), m_ = m(), p_ = p();
   if (x.size() != n_ + m_ + p_ || y.size() != x.size())
   {
      throw DimensionError(kModule, "apply: vector length differs from n+m+p");
   }
   auto x1 = x.subspan(0, n_), x2 = x.subspan(n_, m_), x3 = x.subspan(n_ + m_, p_);
   auto y1 = y.subspan(0, n_), y2 = y.subspan(n_, m_), y3 = y.subspan(n_ + m_, p_);
   Vector t1(n_), t2(m_), t3(p_);
   spmv(A, x1, y1);
   spmv_transpose(B, x2, t1);
   axpy(1.0, t1, y1);

   spmv(B, x1, y2);
   spmv(D, x2, t2);
   axpy(-1.0, t2, y2);
   spmv_transpose(C, x3, t2);
   axpy(1.0, t2, y2);

   spmv(C, x2, y3);
   spmv(E, x3, t3);
   axpy(1.0, t3, y3);
}

Vector DspSystem::apply(std::span<const double> x) const
{
   Vector y(x.size());
   apply(x, y);
   return y;
}

LinearOperator DspSystem::as_operator() const
{
   const DspSystem *self = this;
   return {size(), size(), [self](std::span<const double> x, std::span<double> y) { self->apply(x, y); }};
}

CsrMatrix DspSystem::assemble_full() const
{
   const std::size_t n_ = n(), m_ = m();
   TripletList t(size(), size());
   t.reserve(nnz());
   auto put = [&](const CsrMatrix &M, std::size_t r0, std::size_t c0, double s, bool tr) {
      for (std::size_t i = 0; i < M.rows(); ++i)
      {
         auto c = M.row_cols(i);
         auto v = M.row_vals(i);
         for (std::size_t k = 0; k < c.size(); ++k)
         {
            if (tr) { t.add(c0 + c[k], r0 + i, s * v[k]); }
            else { t.add(r0 + i, c0 + c[k], s * v[k]); }
         }
      }
   };
   put(A, 0, 0, 1.0, false);
   put(B, n_, 0, 1.0, false);
   put(B, n_, 0, 1.0, true);
   put(D, n_, n_, -1.0, false);
   put(C, n_ + m_, n_, 1.0, false);
   put(C, n_ + m_, n_, 1.0, true);
   put(E, n_ + m_, n_ + m_, 1.0, false);
   return t.to_csr();
}

DefinitenessCheck check_spd(const CsrMatrix &M, std::size_t dense_limit)
{
   return probe(M, 0.0, true, dense_limit);
}

DefinitenessCheck check_spsd(const CsrMatrix &M, double rel_tol, std::size_t dense_limit)
{
   return probe(M, -rel_tol * M.max_abs(), false, dense_limit);
}

void validate_dsp(const DspSystem &sys, std::size_t dense_limit)
{
   try
   {
      sys.check_shapes();
   }
   catch (const DimensionError &e)
   {
      throw AssemblyError(kModule, e.what());
   }
   auto fail = [](const std::string &block, const DefinitenessCheck &c, const char *what) {
      std::ostringstream os;
      os << block << " is not " << what << " (lambda_min=" << c.lambda_min << ", method=" << c.method << ")";
      throw AssemblyError(kModule, os.str());
   };
   if (auto c = check_spd(sys.A, dense_limit); !c.passed) { fail("A", c, "SPD"); }
   if (auto c = check_spd(sys.E, dense_limit); !c.passed) { fail("E", c, "SPD"); }
   if (auto c = check_spsd(sys.D, 1e-10, dense_limit); !c.passed) { fail("D", c, "SPSD"); }
   if (sys.m() <= dense_limit)
   {
      CsrMatrix BBt = multiply(sys.B, transpose(sys.B));
      auto w = dense_eigvals_symmetric(DenseMatrix::from_sparse(BBt));
      if (!w.empty() && !(w.front() > 1e-12 * w.back()))
      {
         std::ostringstream os;
         os << "B is not of full row rank (lambda_min(B B^T)=" << w.front() << ")";
         throw AssemblyError(kModule, os.str());
      }
   }
   if (sys.n() < std::max(sys.m(), sys.p()))
   {
      throw AssemblyError(kModule, "n < max(m, p)");
   }
}

} // namespace biotdsp
