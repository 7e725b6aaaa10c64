#include "biotdsp/spectral/spectrum.hpp"

#include "biotdsp/errors.hpp"
#include "biotdsp/precond/block_precond.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <sstream>

namespace biotdsp
{

namespace
{
const char *kModule = "spectral";

DenseMatrix dense_transpose_of(const CsrMatrix &M)
{
   DenseMatrix T(M.cols(), M.rows());
   for (std::size_t i = 0; i < M.rows(); ++i)
   {
      auto c = M.row_cols(i);
      auto v = M.row_vals(i);
      for (std::size_t k = 0; k < c.size(); ++k) { T(c[k], i) += v[k]; }
   }
   return T;
}

/// L_left^{-1} M L_right^{-T}.
DenseMatrix scaled_coupling(const CsrMatrix &M, const InnerOperator &right, const InnerOperator &left)
{
   DenseMatrix W = dense_transpose_of(M);
   right.half_solve(W);
   DenseMatrix R = W.transposed();
   left.half_solve(R);
   return R;
}

double sq_norm(const Vector &v)
{
   return dot(v, v);
}

std::string fmt(double v)
{
   char buf[40];
   std::snprintf(buf, sizeof buf, "%.10e", v);
   return buf;
}
} // namespace

std::string to_string(SpectrumMode m)
{
   return m == SpectrumMode::triangular ? "triangular" : "diagonal";
}

bool is_complex_eigenvalue(std::complex<double> v)
{
   return std::abs(v.imag()) > 1e-8 * std::max(1.0, std::abs(v));
}

std::vector<std::complex<double>> preconditioned_eigenvalues(const LinearOperator &A,
                                                             const LinearOperator &Pinv)
{
   const std::size_t N = A.rows();
   if (A.cols() != N || Pinv.rows() != N || Pinv.cols() != N)
   {
      throw DimensionError(kModule, "preconditioned_eigenvalues: operator sizes differ");
   }
   DenseMatrix M(N, N);
   Vector e(N, 0.0), v(N), u(N);
   for (std::size_t j = 0; j < N; ++j)
   {
      e[j] = 1.0;
      Pinv.apply(e, v);
      A.apply(v, u);
      e[j] = 0.0;
      for (std::size_t i = 0; i < N; ++i) { M(i, j) = u[i]; }
   }
   return dense_eig_general(std::move(M), false).values;
}

PreconditionedSpectrum full_spectrum(const DspSystem &sys, const InnerPtr &a_hat, const InnerPtr &s_hat,
                                     const InnerPtr &x_hat, SpectrumMode mode,
                                     const SpectrumOptions &opts, std::string provenance)
{
   sys.check_shapes();
   const std::size_t n = sys.n(), m = sys.m(), p = sys.p(), N = sys.size();
   if (N > opts.max_dense_n)
   {
      throw UnsupportedError(kModule, "full_spectrum: N=" + std::to_string(N) + " exceeds the dense limit " +
                                         std::to_string(opts.max_dense_n) +
                                         "; use a coarser mesh or raise --max-dense-n");
   }
   const InnerPtr a = linear_surrogate(a_hat), s = linear_surrogate(s_hat), x = linear_surrogate(x_hat);
   PreconditionedSpectrum out;
   out.mode = mode;
   out.provenance = std::move(provenance);

   if (mode == SpectrumMode::diagonal)
   {
      DenseMatrix T(N, N);
      auto put = [&T](const DenseMatrix &Blk, std::size_t r0, std::size_t c0, double sgn, bool mirror) {
         for (std::size_t i = 0; i < Blk.rows(); ++i)
         {
            for (std::size_t j = 0; j < Blk.cols(); ++j)
            {
               T(r0 + i, c0 + j) = sgn * Blk(i, j);
               if (mirror) { T(c0 + j, r0 + i) = sgn * Blk(i, j); }
            }
         }
      };
      put(pencil_matrix(DenseMatrix::from_sparse(sys.A), *a), 0, 0, 1.0, false);
      put(scaled_coupling(sys.B, *a, *s), n, 0, 1.0, true);
      put(pencil_matrix(DenseMatrix::from_sparse(sys.D), *s), n, n, -1.0, false);
      put(scaled_coupling(sys.C, *s, *x), n + m, n, 1.0, true);
      put(pencil_matrix(DenseMatrix::from_sparse(sys.E), *x), n + m, n + m, 1.0, false);
      for (double w : dense_eigvals_symmetric(std::move(T))) { out.values.emplace_back(w, 0.0); }
      return out;
   }

   const BlockTriangular P(a, s, x, sys.B, sys.C);
   DenseMatrix M(N, N);
   {
      Vector e(N, 0.0), v(N), u(N);
      for (std::size_t j = 0; j < N; ++j)
      {
         e[j] = 1.0;
         P.apply_inverse(e, v);
         sys.apply(v, u);
         e[j] = 0.0;
         for (std::size_t i = 0; i < N; ++i) { M(i, j) = u[i]; }
      }
   }
   const bool vectors = opts.want_vectors && N <= opts.max_vector_n;
   EigenSpectrum eig = dense_eig_general(std::move(M), vectors);
   out.values = std::move(eig.values);
   if (vectors)
   {
      out.block_norms.reserve(out.values.size());
      Vector re(N), im(N);
      for (const auto &col : *eig.vectors)
      {
         for (std::size_t i = 0; i < N; ++i)
         {
            re[i] = col[i].real();
            im[i] = col[i].imag();
         }
         const Vector vr = P.apply_inverse(re), vi = P.apply_inverse(im);
         auto block = [&](const InnerOperator &op, std::size_t off, std::size_t len) {
            std::span<const double> r(vr.data() + off, len), q(vi.data() + off, len);
            return sq_norm(op.half_apply_transpose(r)) + sq_norm(op.half_apply_transpose(q));
         };
         out.block_norms.push_back({block(*a, 0, n), block(*s, n, m), block(*x, n + m, p)});
      }
   }
   return out;
}

bool BoundVerdict::passed() const
{
   return std::all_of(checks.begin(), checks.end(), [](const CheckResult &c) { return !c.applicable || c.passed; });
}

BoundVerdict verify_bounds(const PreconditionedSpectrum &spec, const BoundReport &report, double slack)
{
   if (!spec.provenance.empty() && !report.provenance.empty() && spec.provenance != report.provenance)
   {
      throw ConfigError(kModule, "verify_bounds: spectrum provenance '" + spec.provenance +
                                    "' differs from report provenance '" + report.provenance + "'");
   }
   BoundVerdict v;
   for (const auto &z : spec.values)
   {
      if (is_complex_eigenvalue(z)) { ++v.num_complex; }
      else { ++v.num_real; }
   }
   auto record = [](CheckResult &c, double excess, std::complex<double> z) {
      ++c.checked;
      if (excess > 0.0)
      {
         c.passed = false;
         if (excess > c.worst_excess)
         {
            c.worst_excess = excess;
            c.worst_value = z;
         }
      }
   };
   const bool tri = spec.mode == SpectrumMode::triangular;

   CheckResult disc;
   disc.name = "complex-disc";
   CheckResult real;
   real.name = "real-interval";
   CheckResult repart;
   repart.name = "complex-real-part";
   CheckResult diag;
   diag.name = "diagonal-intervals";
   disc.applicable = real.applicable = tri;
   repart.applicable = tri && spec.block_norms.size() == spec.values.size();
   diag.applicable = !tri;

   const auto &tb = report.triangular;
   const auto &db = report.diagonal;
   std::ostringstream dd;
   if (report.disc.all_real) { dd << "all real required"; }
   else { dd << "radius " << report.disc.radius; }
   disc.detail = dd.str();
   std::ostringstream rd;
   rd << "[" << tb.lo << ", " << tb.hi << "] outside window [" << tb.exclusion.min << ", " << tb.exclusion.max << "]";
   real.detail = rd.str();
   repart.detail = repart.applicable ? "Re >= rho/2 per eigenvector" : "eigenvectors not computed";
   std::ostringstream gd;
   gd << "[" << db.minus.min << ", " << db.minus.max << "] U [" << db.plus.min << ", " << db.plus.max << "]";
   diag.detail = gd.str();

   for (std::size_t k = 0; k < spec.values.size(); ++k)
   {
      const auto z = spec.values[k];
      if (tri)
      {
         if (is_complex_eigenvalue(z))
         {
            const double excess = report.disc.all_real ? std::abs(z.imag()) : std::abs(z - 1.0) - report.disc.radius - slack;
            record(disc, excess, z);
            if (repart.applicable)
            {
               const auto &b = spec.block_norms[k];
               const double rho = rho_lower(report.indicators, b[0], b[1], b[2]);
               record(repart, rho / 2.0 - slack - z.real(), z);
            }
         }
         else
         {
            const double x = z.real();
            if (tb.exclusion.contains(x))
            {
               ++real.exempt;
               continue;
            }
            record(real, std::max(tb.lo - slack - x, x - tb.hi - slack), z);
         }
      }
      else
      {
         const double x = z.real();
         const double e_minus = std::max(db.minus.min - slack - x, x - db.minus.max - slack);
         const double e_plus = std::max(db.plus.min - slack - x, x - db.plus.max - slack);
         record(diag, std::max(std::min(e_minus, e_plus), std::abs(z.imag())), z);
      }
   }
   v.checks = {disc, real, repart, diag};
   return v;
}

std::string spectrum_csv(const PreconditionedSpectrum &spec)
{
   std::ostringstream os;
   os << "re,im,class\n";
   for (const auto &z : spec.values)
   {
      os << fmt(z.real()) << "," << fmt(z.imag()) << "," << (is_complex_eigenvalue(z) ? "complex" : "real") << "\n";
   }
   return os.str();
}

std::string verdict_csv(const BoundVerdict &v)
{
   std::ostringstream os;
   os << "check,status,checked,exempt,worst_excess,worst_re,worst_im,detail\n";
   for (const auto &c : v.checks)
   {
      const char *status = !c.applicable ? "skip" : (c.passed ? "pass" : "fail");
      os << c.name << "," << status << "," << c.checked << "," << c.exempt << "," << fmt(c.worst_excess) << ","
         << fmt(c.worst_value.real()) << "," << fmt(c.worst_value.imag()) << ",\"" << c.detail << "\"\n";
   }
   return os.str();
}

std::string verdict_text(const BoundVerdict &v)
{
   std::ostringstream os;
   char line[256];
   std::snprintf(line, sizeof line, "%-20s %-6s %8s %8s %14s  %s\n", "check", "status", "checked", "exempt",
                 "worst excess", "detail");
   os << line;
   for (const auto &c : v.checks)
   {
      const char *status = !c.applicable ? "skip" : (c.passed ? "pass" : "fail");
      std::snprintf(line, sizeof line, "%-20s %-6s %8zu %8zu %14.4e  ", c.name.c_str(), status, c.checked, c.exempt,
                    c.worst_excess);
      os << line << c.detail << "\n";
   }
   os << "eigenvalues: " << v.num_real << " real, " << v.num_complex << " complex\n";
   return os.str();
}

} // namespace biotdsp
