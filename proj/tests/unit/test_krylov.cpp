#include "biotdsp/errors.hpp"
#include "biotdsp/krylov/krylov.hpp"

#include "test_util.hpp"

#include <catch_amalgamated.hpp>

#include <cmath>

using namespace biotdsp;
using namespace testutil;

namespace
{
LinearOperator diag_op(const Vector &d)
{
   return {d.size(), d.size(), [d](std::span<const double> x, std::span<double> y) {
              for (std::size_t i = 0; i < d.size(); ++i) { y[i] = d[i] * x[i]; }
           }};
}

bool nonincreasing(const std::vector<double> &h)
{
   for (std::size_t i = 1; i < h.size(); ++i)
   {
      if (h[i] > h[i - 1] * (1.0 + 1e-12)) { return false; }
   }
   return true;
}

/// Symmetric indefinite saddle matrix [[G, F^T], [F, -H]] with G, H SPD.
DenseMatrix random_saddle(std::size_t n, std::size_t m, std::mt19937_64 &rng)
{
   DenseMatrix G = random_spd(n, rng), H = random_spd(m, rng), F = random_dense(m, n, rng);
   DenseMatrix M(n + m, n + m);
   for (std::size_t i = 0; i < n; ++i)
   {
      for (std::size_t j = 0; j < n; ++j) { M(i, j) = G(i, j); }
   }
   for (std::size_t i = 0; i < m; ++i)
   {
      for (std::size_t j = 0; j < n; ++j)
      {
         M(n + i, j) = F(i, j);
         M(j, n + i) = F(i, j);
      }
      for (std::size_t j = 0; j < m; ++j) { M(n + i, n + j) = -H(i, j); }
   }
   return M;
}
} // namespace

TEST_CASE("gmres on trivial operators", "[krylov]")
{
   const Vector b{1.0, -2.0, 0.5};
   auto r = gmres_right(LinearOperator::identity(3), LinearOperator::identity(3), b, 1e-13, 10);
   CHECK(r.stats.converged);
   CHECK(r.stats.iterations == 1);
   CHECK(max_abs_diff(r.x, b) < 1e-15);

   auto d = gmres_right(diag_op({1.0, 2.0, 3.0}), LinearOperator::identity(3), b, 1e-14, 10);
   CHECK(d.stats.converged);
   CHECK(d.stats.iterations <= 3);
   CHECK(max_abs_diff(d.x, Vector{1.0, -1.0, 0.5 / 3.0}) < 1e-14);
   CHECK(d.stats.residual_history.size() == d.stats.iterations + 1);
}

TEST_CASE("minres and pcg on trivial operators", "[krylov]")
{
   const Vector b{1.0, -2.0, 0.5};
   auto r = minres(LinearOperator::identity(3), LinearOperator::identity(3), b, 1e-12, 10);
   CHECK(r.stats.iterations == 1);
   CHECK(max_abs_diff(r.x, b) < 1e-14);

   auto s = minres(diag_op({1.0, -1.0, 2.0}), LinearOperator::identity(3), b, 1e-12, 10);
   CHECK(s.stats.converged);
   CHECK(s.stats.iterations <= 3);
   CHECK(max_abs_diff(s.x, Vector{1.0, 2.0, 0.25}) < 1e-12);

   auto p = pcg(LinearOperator::identity(3), LinearOperator::identity(3), b, 1e-12, 10);
   CHECK(p.stats.iterations == 1);

   Vector d(8), ones(8, 1.0);
   for (std::size_t i = 0; i < 8; ++i) { d[i] = static_cast<double>(i + 1); }
   auto q = pcg(diag_op(d), LinearOperator::identity(8), ones, 1e-12, 50);
   CHECK(q.stats.converged);
   CHECK(q.stats.iterations <= 8);
}

TEST_CASE("contract violations are detected", "[krylov]")
{
   const Vector b{1.0, 1.0};
   CHECK_THROWS_AS(pcg(diag_op({1.0, -1.0}), LinearOperator::identity(2), b, 1e-12, 10), ContractError);
   CHECK_THROWS_AS(minres(LinearOperator::identity(2), diag_op({1.0, -3.0}), b, 1e-12, 10), ContractError);
   CHECK_THROWS_AS(gmres_right(LinearOperator::identity(3), LinearOperator::identity(3), b, 1e-12, 10),
                   DimensionError);
}

TEST_CASE("maxit exhaustion returns non-converged stats", "[krylov]")
{
   Vector d(50);
   for (std::size_t i = 0; i < d.size(); ++i) { d[i] = 1.0 + static_cast<double>(i); }
   const Vector b(50, 1.0);
   auto r = gmres_right(diag_op(d), LinearOperator::identity(50), b, 1e-14, 5);
   CHECK_FALSE(r.stats.converged);
   CHECK(r.stats.iterations == 5);
   CHECK(r.stats.residual_history.size() == 6);
}

TEST_CASE("solutions match a dense direct solve", "[krylov]")
{
   std::mt19937_64 rng(7);
   const std::size_t n = 40, m = 15;
   DenseMatrix M = random_saddle(n, m, rng);
   Vector b = random_vector(n + m, rng);
   Vector xd = gauss_solve(M, b);
   const auto op = LinearOperator::from_dense(M);

   auto g = gmres_right(op, LinearOperator::identity(n + m), b, 1e-13, 200);
   CHECK(g.stats.converged);
   CHECK(relative_error(g.x, xd) <= 1e-11);
   CHECK(g.stats.iterations <= n + m + 5);
   CHECK(nonincreasing(g.stats.residual_history));

   auto mr = minres(op, LinearOperator::identity(n + m), b, 1e-10, 400);
   CHECK(mr.stats.converged);
   CHECK(relative_error(mr.x, xd) <= 1e-8);
   CHECK(nonincreasing(mr.stats.residual_history));

   DenseMatrix G = random_spd(60, rng);
   Vector c = random_vector(60, rng);
   Vector xg = gauss_solve(G, c);
   Vector dinv(60);
   for (std::size_t i = 0; i < 60; ++i) { dinv[i] = 1.0 / G(i, i); }
   auto p = pcg(LinearOperator::from_dense(G), diag_op(dinv), c, 1e-10, 200);
   CHECK(p.stats.converged);
   CHECK(relative_error(p.x, xg) <= 1e-8);
}

TEST_CASE("preconditioning and restarts", "[krylov]")
{
   std::mt19937_64 rng(11);
   DenseMatrix M = random_dense(30, 30, rng);
   for (std::size_t i = 0; i < 30; ++i) { M(i, i) += 40.0; }
   Vector b = random_vector(30, rng);
   Vector xd = gauss_solve(M, b);
   const auto op = LinearOperator::from_dense(M);
   const auto exact = LinearOperator::from_dense(dense_inverse(M));

   auto e = gmres_right(op, exact, b, 1e-12, 30);
   CHECK(e.stats.iterations <= 2);
   CHECK(relative_error(e.x, xd) < 1e-11);

   auto r = gmres_right(op, LinearOperator::identity(30), b, 1e-12, 300, 5);
   CHECK(r.stats.converged);
   CHECK(relative_error(r.x, xd) < 1e-10);
   CHECK(r.stats.residual_history.size() == r.stats.iterations + 1);
}

TEST_CASE("iteration counts are deterministic", "[krylov]")
{
   std::mt19937_64 rng(3);
   DenseMatrix M = random_saddle(25, 10, rng);
   Vector b = random_vector(35, rng);
   const auto op = LinearOperator::from_dense(M);
   auto a = gmres_right(op, LinearOperator::identity(35), b, 1e-12, 100);
   auto c = gmres_right(op, LinearOperator::identity(35), b, 1e-12, 100);
   CHECK(a.stats.iterations == c.stats.iterations);
   CHECK(a.x == c.x);
   CHECK(relative_error(Vector{3.0, 4.0}, Vector{3.0, 4.0}) == 0.0);
   CHECK(default_maxit(10) == 10);
   CHECK(default_maxit(100000) == 2000);
}
