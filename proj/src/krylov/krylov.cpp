#include "biotdsp/krylov/krylov.hpp"

#include "biotdsp/errors.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <limits>

namespace biotdsp
{

namespace
{
const char *kModule = "krylov";

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0)
{
   return std::chrono::duration<double>(Clock::now() - t0).count();
}

void require_square(const LinearOperator &A, std::size_t n, const char *who)
{
   if (A.rows() != A.cols() || A.rows() != n)
   {
      throw DimensionError(kModule, std::string(who) + ": operator and right-hand side sizes differ");
   }
}

double true_residual(const LinearOperator &A, std::span<const double> x, std::span<const double> b)
{
   Vector r = A(x);
   for (std::size_t i = 0; i < r.size(); ++i) { r[i] = b[i] - r[i]; }
   const double nb = norm2(b);
   return nb > 0.0 ? norm2(r) / nb : norm2(r);
}
} // namespace

double SolveStats::final_relative_residual() const
{
   if (residual_history.empty() || residual_history.front() == 0.0) { return 0.0; }
   return residual_history.back() / residual_history.front();
}

std::size_t default_maxit(std::size_t n)
{
   return std::min<std::size_t>(n, 2000);
}

double relative_error(std::span<const double> x, std::span<const double> x_true)
{
   if (x.size() != x_true.size()) { throw DimensionError(kModule, "relative_error: length mismatch"); }
   double num = 0.0;
   for (std::size_t i = 0; i < x.size(); ++i) { num += (x[i] - x_true[i]) * (x[i] - x_true[i]); }
   const double den = norm2(x_true);
   return den > 0.0 ? std::sqrt(num) / den : std::sqrt(num);
}

SolveResult gmres_right(const LinearOperator &A, const LinearOperator &Pinv,
                        std::span<const double> b, double tol, std::size_t maxit, std::size_t restart)
{
   const auto t0 = Clock::now();
   const std::size_t n = b.size();
   require_square(A, n, "gmres");
   require_square(Pinv, n, "gmres preconditioner");
   SolveResult res;
   res.stats.method = "gmres";
   res.x.assign(n, 0.0);
   const double bnorm = norm2(b);
   res.stats.residual_history.push_back(bnorm);
   if (bnorm == 0.0)
   {
      res.stats.converged = true;
      res.stats.wall_time = seconds_since(t0);
      return res;
   }
   const std::size_t cycle = (restart == 0 || restart > maxit) ? maxit : restart;
   Vector r(b.begin(), b.end());
   double beta = bnorm;
   std::size_t total = 0;
   bool done = false;

   while (!done && total < maxit)
   {
      const std::size_t mcap = std::min(cycle, maxit - total);
      std::vector<Vector> V;
      V.reserve(mcap + 1);
      V.emplace_back(r);
      for (double &v : V[0]) { v /= beta; }
      // Column-wise Hessenberg storage H[j] has length j+2.
      std::vector<Vector> H;
      Vector cs, sn, g{beta};
      std::size_t k = 0;
      Vector z(n), w(n);
      for (; k < mcap; ++k)
      {
         Pinv.apply(V[k], z);
         A.apply(z, w);
         Vector h(k + 2, 0.0);
         for (std::size_t i = 0; i <= k; ++i)
         {
            h[i] = dot(w, V[i]);
            axpy(-h[i], V[i], w);
         }
         h[k + 1] = norm2(w);
         const double hsub = h[k + 1];
         for (std::size_t i = 0; i < k; ++i)
         {
            const double t = cs[i] * h[i] + sn[i] * h[i + 1];
            h[i + 1] = -sn[i] * h[i] + cs[i] * h[i + 1];
            h[i] = t;
         }
         const double rho = std::hypot(h[k], h[k + 1]);
         const double c = rho == 0.0 ? 1.0 : h[k] / rho;
         const double s = rho == 0.0 ? 0.0 : h[k + 1] / rho;
         cs.push_back(c);
         sn.push_back(s);
         h[k] = rho;
         h[k + 1] = 0.0;
         g.push_back(-s * g[k]);
         g[k] = c * g[k];
         H.push_back(std::move(h));
         ++total;
         const double est = std::abs(g[k + 1]);
         res.stats.residual_history.push_back(est);
         if (est / bnorm <= tol)
         {
            res.stats.converged = true;
            done = true;
            ++k;
            break;
         }
         if (hsub < 1e-14 * bnorm)
         {
            res.stats.lucky_breakdown = true;
            res.stats.converged = true;
            done = true;
            ++k;
            break;
         }
         V.emplace_back(w);
         for (double &v : V.back()) { v /= hsub; }
      }
      // Back substitution for the k x k triangular system.
      Vector y(k, 0.0);
      for (std::size_t i = k; i-- > 0;)
      {
         double s = g[i];
         for (std::size_t j = i + 1; j < k; ++j) { s -= H[j][i] * y[j]; }
         y[i] = H[i][i] != 0.0 ? s / H[i][i] : 0.0;
      }
      Vector u(n, 0.0);
      for (std::size_t j = 0; j < k; ++j) { axpy(y[j], V[j], u); }
      Pinv.apply(u, z);
      axpy(1.0, z, res.x);
      if (!done && total < maxit)
      {
         // Restart from the true residual.
         Vector Ax = A(res.x);
         for (std::size_t i = 0; i < n; ++i) { r[i] = b[i] - Ax[i]; }
         beta = norm2(r);
         if (beta / bnorm <= tol)
         {
            res.stats.converged = true;
            done = true;
         }
      }
   }
   res.stats.iterations = total;
   res.stats.true_relative_residual = true_residual(A, res.x, b);
   res.stats.wall_time = seconds_since(t0);
   return res;
}

SolveResult minres(const LinearOperator &A, const LinearOperator &Pinv, std::span<const double> b,
                   double tol, std::size_t maxit)
{
   const auto t0 = Clock::now();
   const std::size_t n = b.size();
   require_square(A, n, "minres");
   require_square(Pinv, n, "minres preconditioner");
   SolveResult res;
   res.stats.method = "minres";
   res.x.assign(n, 0.0);

   Vector r1(b.begin(), b.end());
   Vector y = Pinv(r1);
   double beta1 = dot(r1, y);
   if (beta1 < 0.0) { throw ContractError(kModule, "minres: preconditioner is not positive definite"); }
   beta1 = std::sqrt(beta1);
   res.stats.residual_history.push_back(beta1);
   if (beta1 == 0.0)
   {
      res.stats.converged = true;
      res.stats.wall_time = seconds_since(t0);
      return res;
   }
   const double eps = std::numeric_limits<double>::epsilon();
   double oldb = 0.0, beta = beta1, dbar = 0.0, epsln = 0.0, phibar = beta1;
   double cs = -1.0, sn = 0.0;
   Vector w(n, 0.0), w1(n), w2(n, 0.0), r2 = r1, v(n);
   std::size_t itn = 0;
   while (itn < maxit)
   {
      ++itn;
      const double s = 1.0 / beta;
      for (std::size_t i = 0; i < n; ++i) { v[i] = s * y[i]; }
      A.apply(v, y);
      if (itn >= 2) { axpy(-beta / oldb, r1, y); }
      const double alfa = dot(v, y);
      axpy(-alfa / beta, r2, y);
      r1.swap(r2);
      r2 = y;
      Pinv.apply(r2, y);
      oldb = beta;
      beta = dot(r2, y);
      if (beta < 0.0) { throw ContractError(kModule, "minres: preconditioner is not positive definite"); }
      beta = std::sqrt(beta);

      const double oldeps = epsln;
      const double delta = cs * dbar + sn * alfa;
      const double gbar = sn * dbar - cs * alfa;
      epsln = sn * beta;
      dbar = -cs * beta;
      const double gamma = std::max(std::hypot(gbar, beta), eps);
      cs = gbar / gamma;
      sn = beta / gamma;
      const double phi = cs * phibar;
      phibar = sn * phibar;

      w1.swap(w2);
      w2.swap(w);
      for (std::size_t i = 0; i < n; ++i) { w[i] = (v[i] - oldeps * w1[i] - delta * w2[i]) / gamma; }
      axpy(phi, w, res.x);
      res.stats.residual_history.push_back(phibar);
      if (phibar / beta1 <= tol)
      {
         res.stats.converged = true;
         break;
      }
      if (beta < 1e-14 * beta1)
      {
         res.stats.lucky_breakdown = true;
         res.stats.converged = true;
         break;
      }
   }
   res.stats.iterations = itn;
   res.stats.true_relative_residual = true_residual(A, res.x, b);
   res.stats.wall_time = seconds_since(t0);
   return res;
}

SolveResult pcg(const LinearOperator &A, const LinearOperator &Pinv, std::span<const double> b,
                double tol, std::size_t maxit)
{
   const auto t0 = Clock::now();
   const std::size_t n = b.size();
   require_square(A, n, "pcg");
   require_square(Pinv, n, "pcg preconditioner");
   SolveResult res;
   res.stats.method = "pcg";
   res.x.assign(n, 0.0);
   Vector r(b.begin(), b.end());
   const double bnorm = norm2(b);
   res.stats.residual_history.push_back(bnorm);
   if (bnorm == 0.0)
   {
      res.stats.converged = true;
      res.stats.wall_time = seconds_since(t0);
      return res;
   }
   Vector z = Pinv(r);
   double rz = dot(r, z);
   if (rz < 0.0) { throw ContractError(kModule, "pcg: preconditioner is not positive definite"); }
   Vector p = z, Ap(n);
   std::size_t it = 0;
   while (it < maxit)
   {
      ++it;
      A.apply(p, Ap);
      const double pAp = dot(p, Ap);
      if (!(pAp > 0.0)) { throw ContractError(kModule, "pcg: operator is not positive definite (p^T A p <= 0)"); }
      const double alpha = rz / pAp;
      axpy(alpha, p, res.x);
      axpy(-alpha, Ap, r);
      const double rn = norm2(r);
      res.stats.residual_history.push_back(rn);
      if (rn / bnorm <= tol)
      {
         res.stats.converged = true;
         break;
      }
      Pinv.apply(r, z);
      const double rz_new = dot(r, z);
      if (rz_new < 0.0) { throw ContractError(kModule, "pcg: preconditioner is not positive definite"); }
      const double beta = rz_new / rz;
      rz = rz_new;
      for (std::size_t i = 0; i < n; ++i) { p[i] = z[i] + beta * p[i]; }
   }
   res.stats.iterations = it;
   res.stats.true_relative_residual = true_residual(A, res.x, b);
   res.stats.wall_time = seconds_since(t0);
   return res;
}

} // namespace biotdsp
