#include "biotdsp/assembly/assemble.hpp"
#include "biotdsp/errors.hpp"
#include "biotdsp/schur/schur.hpp"
#include "biotdsp/spectral/bounds.hpp"
#include "biotdsp/spectral/indicators.hpp"
#include "biotdsp/spectral/spectrum.hpp"

#include "test_dsp.hpp"

#include <catch_amalgamated.hpp>

#include <algorithm>
#include <cmath>

using namespace biotdsp;
using namespace testutil;
using Catch::Approx;

namespace
{
const MaterialProps kProps{};

const DspSystem &mfe(std::size_t cells)
{
   static const DspSystem s4 = build_system(Discretization::mfe2d, 4, kProps, {});
   static const DspSystem s10 = build_system(Discretization::mfe2d, 10, kProps, {});
   return cells == 4 ? s4 : s10;
}

IndicatorSet unit_indicators()
{
   IndicatorSet s;
   s.A = s.S = s.X = s.E = s.R = {1.0, 1.0};
   s.D = s.K = {0.0, 0.0};
   return s;
}

IndicatorSet printed(Interval S, Interval R, Interval D, Interval X, Interval K, Interval E)
{
   IndicatorSet s;
   s.A = {5.01e-5, 1.035};
   s.S = S;
   s.R = R;
   s.D = D;
   s.X = X;
   s.K = K;
   s.E = E;
   return s;
}

/// C^{-1} M C^{-T} with C the lower Cholesky factor, by forward substitution.
DenseMatrix oracle_congruence(const DenseMatrix &M, const DenseMatrix &P)
{
   const DenseMatrix C = cholesky_oracle(P);
   const std::size_t n = M.rows();
   auto lower_solve = [&](DenseMatrix X) {
      for (std::size_t j = 0; j < X.cols(); ++j)
      {
         for (std::size_t i = 0; i < n; ++i)
         {
            double v = X(i, j);
            for (std::size_t k = 0; k < i; ++k) { v -= C(i, k) * X(k, j); }
            X(i, j) = v / C(i, i);
         }
      }
      return X;
   };
   DenseMatrix Y = lower_solve(M);
   return lower_solve(naive_transpose(Y));
}

Interval oracle_pencil(const DenseMatrix &M, const DenseMatrix &P)
{
   auto w = jacobi_eigvals(oracle_congruence(M, P));
   return {w.front(), w.back()};
}

void check_interval(const Interval &got, const Interval &want, double rel)
{
   const double scale = std::max(std::abs(want.min), std::abs(want.max));
   CHECK(std::abs(got.min - want.min) <= rel * scale);
   CHECK(std::abs(got.max - want.max) <= rel * scale);
}

bool within_rel(double got, double want, double rel)
{
   return std::abs(got - want) <= rel * std::abs(want);
}

/// Greedy nearest matching of two spectra; largest scaled distance.
double spectrum_distance(std::vector<std::complex<double>> a, std::vector<std::complex<double>> b)
{
   double worst = 0.0;
   std::vector<bool> used(b.size(), false);
   for (const auto &z : a)
   {
      double best = INFINITY;
      std::size_t arg = 0;
      for (std::size_t k = 0; k < b.size(); ++k)
      {
         if (!used[k] && std::abs(z - b[k]) < best)
         {
            best = std::abs(z - b[k]);
            arg = k;
         }
      }
      used[arg] = true;
      worst = std::max(worst, best / std::max(1.0, std::abs(z)));
   }
   return worst;
}

} // namespace

TEST_CASE("unit indicators", "[spectral][bounds]")
{
   const IndicatorSet u = unit_indicators();
   TriangularRealBounds t = triangular_real_bounds(u);
   CHECK(t.lo == 0.5);
   CHECK(t.hi == 3.0);
   DiagonalBounds d = diagonal_bounds(u);
   CHECK(d.minus.min == -1.0);
   CHECK(d.minus.max == -0.5);
   CHECK(d.plus.min == 1.0);
   CHECK(d.plus.max == 3.0);
   CHECK(d.minus.max < 0.0);
   CHECK(d.plus.min > 0.0);
}

TEST_CASE("complex disc", "[spectral][bounds]")
{
   IndicatorSet s = unit_indicators();
   s.D = {0.75, 1.0};
   ComplexDisc c = triangular_complex_disc(s);
   CHECK_FALSE(c.all_real);
   CHECK(c.radius == Approx(0.5).epsilon(1e-15));
   s.D = {1.0, 2.0};
   CHECK(triangular_complex_disc(s).all_real);
   s.D = {3.1e-3, 0.536};
   CHECK(triangular_complex_disc(s).radius == Approx(0.998).margin(5e-4));
   s.D = {0.0, 0.5};
   CHECK(triangular_complex_disc(s).radius == 1.0);

   IndicatorSet r = unit_indicators();
   r.A = {0.5, 2.0};
   r.D = {0.25, 1.0};
   r.E = {2.0, 3.0};
   CHECK(rho_lower(r, 1.0, 1.0, 1.0) == Approx((0.5 + 0.25 + 2.0) / 3.0).epsilon(1e-15));
   CHECK(rho_lower(r, 0.0, 1.0, 0.0) == Approx(0.25).epsilon(1e-15));
}

TEST_CASE("cubic bracket examples", "[spectral][bounds]")
{
   auto [a, b] = cubic_bracket(1.0, 1.0, 1.0);
   CHECK(a == 1.0);
   CHECK(b == 1.0);
   auto [c, d] = cubic_bracket(3.0, 2.0, 4.0);
   CHECK(c == 2.0);
   CHECK(d == 3.0);
   CHECK_THROWS_AS(cubic_bracket(0.0, 1.0, 1.0), ContractError);
   CHECK_THROWS_AS(cubic_bracket(1.0, -1.0, 1.0), ContractError);

   const CubicCoefficients p{1.0, 1.0, 1.0, false};
   for (double x : {0.1, 0.5, 0.9}) { CHECK(p.eval(x) < 0.0); }
   for (double x : {1.1, 2.0, 5.0}) { CHECK(p.eval(x) > 0.0); }
}

TEST_CASE("cubic bracket sign pattern on random triples", "[spectral][bounds][property]")
{
   std::mt19937_64 rng(17);
   std::uniform_real_distribution<double> U(-3.0, 3.0);
   for (int t = 0; t < 1000; ++t)
   {
      const double a2 = std::pow(10.0, U(rng)), a1 = std::pow(10.0, U(rng)), a0 = std::pow(10.0, U(rng));
      auto [alpha, beta] = cubic_bracket(a2, a1, a0);
      const CubicCoefficients p{a2, a1, a0, false};
      bool ok = true;
      for (int k = 1; k < 50; ++k)
      {
         const double x = alpha * k / 50.0;
         ok = ok && p.eval(x) < 0.0;
         const double y = beta * (1.0 + 9.0 * k / 49.0);
         ok = ok && (p.eval(y) > 0.0 || y == beta);
      }
      CHECK(ok);
   }
}

TEST_CASE("cubic coefficients", "[spectral][bounds]")
{
   IndicatorPoint g;
   g.A = 2.0;
   g.S = 3.0;
   g.X = 5.0;
   g.D = 0.5;
   g.E = 7.0;
   g.R = 1.5;
   g.K = 0.25;
   CubicCoefficients t = triangular_cubic(g);
   CHECK(t.a2 == 10.0);
   CHECK(t.a1 == Approx(2.0 * 5.0 + 0.25 + 7.0 * 3.0 + 0.5 * 2.0 + 1.5).epsilon(1e-15));
   CHECK(t.a0 == Approx(2.0 * 0.25 + 7.0 * 2.0 * 0.5 + 7.0 * 1.5).epsilon(1e-15));
   CHECK_FALSE(t.diagonal_form);
   CubicCoefficients d = diagonal_cubic(g);
   CHECK(d.a2 == Approx(2.0 + 7.0 - 0.5).epsilon(1e-15));
   CHECK(d.a1 == Approx(1.5 + 0.25 + 7.0 * 0.5 + 2.0 * 0.5 - 7.0 * 2.0).epsilon(1e-15));
   CHECK(d.a0 == Approx(2.0 * 0.25 + 7.0 * 1.5 + 7.0 * 2.0 * 0.5).epsilon(1e-15));
   CHECK(d.diagonal_form);
   CHECK(d.eval(2.0) == Approx(8.0 - d.a2 * 4.0 - d.a1 * 2.0 + d.a0).epsilon(1e-14));
}

TEST_CASE("bounds from printed indicator tables", "[spectral][bounds][regression]")
{
   const IndicatorSet p1 = printed({0.448, 3.515}, {7.7e-3, 3.470}, {5.3e-3, 0.983}, {0.999, 1.030},
                                   {4.3e-5, 0.035}, {0.995, 1.000});
   TriangularRealBounds t1 = triangular_real_bounds(p1);
   CHECK(within_rel(t1.lo, 5.0098e-05, 0.02));
   CHECK(within_rel(t1.hi, 5.5536, 0.02));
   DiagonalBounds d1 = diagonal_bounds(p1);
   CHECK(within_rel(d1.minus.min, -2.8548, 0.02));
   CHECK(within_rel(d1.minus.max, -0.3021, 0.02));
   CHECK(within_rel(d1.plus.min, 5.0098e-05, 0.02));
   CHECK(within_rel(d1.plus.max, 3.9014, 0.02));

   const IndicatorSet p2 = printed({0.439, 1.489}, {3.4e-3, 1.310}, {4.7e-3, 0.559}, {0.998, 1.001},
                                   {4.0e-6, 0.005}, {0.993, 1.003});
   CHECK(within_rel(triangular_real_bounds(p2).hi, 3.5249, 0.02));
   DiagonalBounds d2 = diagonal_bounds(p2);
   CHECK(within_rel(d2.plus.max, 3.1750, 0.02));
   CHECK(within_rel(d2.minus.min, -1.7058, 0.02));
   CHECK(within_rel(d2.minus.max, -0.2978, 0.02));

   const IndicatorSet mh = printed({0.286, 1.086}, {3.4e-3, 0.655}, {3.1e-3, 0.536}, {0.797, 1.186},
                                   {0.0, 0.005}, {0.795, 1.186});
   CHECK(within_rel(triangular_real_bounds(mh).hi, 3.3065, 0.02));
   DiagonalBounds dm = diagonal_bounds(mh);
   CHECK(within_rel(dm.minus.min, -1.3486, 0.02));
   CHECK(within_rel(dm.minus.max, -0.2166, 0.02));
   CHECK(within_rel(dm.plus.max, 3.0332, 0.02));
}

TEST_CASE("bounds are monotone in the indicators", "[spectral][bounds][property]")
{
   std::mt19937_64 rng(23);
   std::uniform_real_distribution<double> U(0.0, 1.0);
   auto interval = [&](double lo) {
      const double a = lo + U(rng), b = a + 2.0 * U(rng);
      return Interval{a, b};
   };
   auto widen = [&](Interval i, bool nonneg) {
      Interval w{i.min * (1.0 - 0.5 * U(rng)), i.max * (1.0 + U(rng))};
      if (!nonneg) { w.min = std::max(w.min, 1e-6); }
      return w;
   };
   for (int t = 0; t < 500; ++t)
   {
      IndicatorSet s;
      s.A = interval(1e-3);
      s.S = interval(1e-3);
      s.X = interval(1e-3);
      s.E = interval(1e-3);
      s.R = interval(1e-3);
      s.D = interval(0.0);
      s.K = interval(0.0);
      IndicatorSet w = s;
      w.A = widen(s.A, false);
      w.S = widen(s.S, false);
      w.X = widen(s.X, false);
      w.E = widen(s.E, false);
      w.R = widen(s.R, false);
      w.D = widen(s.D, true);
      w.K = widen(s.K, true);
      TriangularRealBounds a = triangular_real_bounds(s), b = triangular_real_bounds(w);
      CHECK(b.lo <= a.lo);
      CHECK(b.hi >= a.hi);
      DiagonalBounds c = diagonal_bounds(s), d = diagonal_bounds(w);
      CHECK(d.minus.min <= c.minus.min);
      CHECK(d.plus.min <= c.plus.min);
      CHECK(d.plus.max >= c.plus.max);
      CHECK(d.minus.max >= std::min(c.minus.max, d.minus.max));
   }
}

TEST_CASE("indicators against a dense pencil oracle", "[spectral][indicators]")
{
   const DspSystem &sys = mfe(10);
   RealizedRecipe r = realize(sys, recipe_s1(), kProps);
   IndicatorSet ind = compute_indicators(sys, r.a_hat, r.s_hat, r.x_hat);

   const DenseMatrix Ah = r.a_hat->dense_matrix(), Sh = r.s_hat->dense_matrix(), Xh = r.x_hat->dense_matrix();
   const DenseMatrix B = DenseMatrix::from_sparse(sys.B), C = DenseMatrix::from_sparse(sys.C);
   const DenseMatrix D = DenseMatrix::from_sparse(sys.D), E = DenseMatrix::from_sparse(sys.E);
   const DenseMatrix BAB = naive_matmul(naive_matmul(B, gauss_inverse(Ah)), naive_transpose(B));
   const DenseMatrix CSC = naive_matmul(naive_matmul(C, gauss_inverse(Sh)), naive_transpose(C));

   check_interval(ind.A, oracle_pencil(DenseMatrix::from_sparse(sys.A), Ah), 1e-9);
   check_interval(ind.S, oracle_pencil(add(D, BAB), Sh), 1e-9);
   check_interval(ind.X, oracle_pencil(add(E, CSC), Xh), 1e-9);
   check_interval(ind.D, oracle_pencil(D, Sh), 1e-9);
   check_interval(ind.E, oracle_pencil(E, Xh), 1e-9);
   check_interval(ind.R, oracle_pencil(BAB, Sh), 1e-9);
   check_interval(ind.K, oracle_pencil(CSC, Xh), 1e-9);

   CHECK(ind.A.min > 0.0);
   CHECK(ind.D.min >= 0.0);
   CHECK(ind.K.min >= 0.0);
   CHECK(ind.S.min >= ind.R.min + ind.D.min - 1e-9 * ind.S.max);
   CHECK(ind.S.max <= ind.R.max + ind.D.max + 1e-9 * ind.S.max);
   CHECK(ind.X.min >= ind.K.min + ind.E.min - 1e-9 * ind.X.max);
   CHECK(ind.X.max <= ind.K.max + ind.E.max + 1e-9 * ind.X.max);
}

TEST_CASE("exact inner operators give unit indicators", "[spectral][indicators]")
{
   std::mt19937_64 rng(29);
   DspSystem sys = random_dsp(12, 5, 4, 2, rng);
   RealizedRecipe r = realize(sys, recipe_exact(), kProps);
   IndicatorSet ind = compute_indicators(sys, r.a_hat, r.s_hat, r.x_hat);
   check_interval(ind.A, {1.0, 1.0}, 1e-10);
   check_interval(ind.S, {1.0, 1.0}, 1e-10);
   check_interval(ind.X, {1.0, 1.0}, 1e-10);
}

TEST_CASE("shift identity with D = alpha I and S-hat = I", "[spectral][indicators]")
{
   std::mt19937_64 rng(31);
   DspSystem sys = random_dsp(9, 4, 3, 0, rng);
   sys.D = CsrMatrix::diagonal(Vector(4, 0.3));
   InnerPtr a = make_exact_dense(DenseMatrix::from_sparse(sys.A));
   InnerPtr s = make_diagonal(Vector(4, 1.0), "id");
   InnerPtr x = make_exact_dense(DenseMatrix::from_sparse(sys.E));
   IndicatorSet ind = compute_indicators(sys, a, s, x);
   CHECK(ind.S.min == Approx(ind.R.min + 0.3).epsilon(1e-12));
   CHECK(ind.S.max == Approx(ind.R.max + 0.3).epsilon(1e-12));
   CHECK(ind.D.min == Approx(0.3).epsilon(1e-12));
}

TEST_CASE("R R^T identity", "[spectral][indicators]")
{
   const DspSystem &sys = mfe(10);
   RealizedRecipe r = realize(sys, recipe_s2(), kProps);
   const DenseMatrix Ah = r.a_hat->dense_matrix(), Sh = r.s_hat->dense_matrix();
   const DenseMatrix B = DenseMatrix::from_sparse(sys.B), D = DenseMatrix::from_sparse(sys.D);
   // R = L_S^{-1} B L_A^{-T}.
   DenseMatrix W = naive_transpose(B);
   r.a_hat->half_solve(W);
   DenseMatrix R = naive_transpose(W);
   r.s_hat->half_solve(R);
   const DenseMatrix RRt = naive_matmul(R, naive_transpose(R));
   const DenseMatrix St = add(D, naive_matmul(naive_matmul(B, gauss_inverse(Ah)), naive_transpose(B)));
   const DenseMatrix lhs = oracle_congruence(St, Sh);
   const DenseMatrix rhs = add(RRt, oracle_congruence(D, Sh));
   CHECK(rel_max_diff(lhs, rhs) < 1e-10);
}

TEST_CASE("omega scaling law", "[spectral][indicators]")
{
   const DspSystem &sys = mfe(10);
   RealizedRecipe r1 = realize(sys, recipe_s1(), kProps), rw = realize(sys, recipe_s1(0.1), kProps);
   IndicatorSet a = compute_indicators(sys, r1.a_hat, r1.s_hat, r1.x_hat);
   IndicatorSet b = compute_indicators(sys, rw.a_hat, rw.s_hat, rw.x_hat);
   auto scaled = [](Interval x, Interval y, double w) {
      const double s = std::max(std::abs(x.max), 1e-300);
      return std::abs(y.min - w * x.min) <= 1e-10 * w * s && std::abs(y.max - w * x.max) <= 1e-10 * w * s;
   };
   CHECK(scaled(a.S, b.S, 0.1));
   CHECK(scaled(a.R, b.R, 0.1));
   CHECK(scaled(a.D, b.D, 0.1));
   CHECK(scaled(a.A, b.A, 1.0));
}

TEST_CASE("pencil helpers", "[spectral][indicators]")
{
   std::mt19937_64 rng(37);
   DenseMatrix M = random_symmetric(10, rng), P = random_spd(10, rng);
   InnerPtr op = make_exact_dense(P);
   Extremes e = pencil_extremes(M, *op);
   Interval o = oracle_pencil(M, P);
   CHECK(e.min == Approx(o.min).margin(1e-10));
   CHECK(e.max == Approx(o.max).margin(1e-10));
   CHECK(rel_max_diff(pencil_matrix(M, *op), oracle_congruence(M, P)) < 1e-10);
}

TEST_CASE("inner-pcg indicators use the surrogate", "[spectral][indicators]")
{
   const DspSystem &sys = mfe(4);
   SchurRecipe rec = recipe_s1();
   rec.a_form = AForm::inner_pcg;
   RealizedRecipe r = realize(sys, rec, kProps);
   IndicatorSet ind = compute_indicators(sys, r.a_hat, r.s_hat, r.x_hat);
   CHECK_FALSE(ind.note.empty());
   RealizedRecipe q = realize(sys, recipe_s1(), kProps);
   IndicatorSet ref = compute_indicators(sys, q.a_hat, q.s_hat, q.x_hat);
   CHECK(ind.A.min == Approx(ref.A.min).epsilon(1e-12));
   CHECK(ind.A.max == Approx(ref.A.max).epsilon(1e-12));
}

TEST_CASE("generic preconditioned spectrum with the exact inverse", "[spectral][spectrum]")
{
   std::mt19937_64 rng(41);
   DenseMatrix M = random_dense(20, 20, rng);
   for (std::size_t i = 0; i < 20; ++i) { M(i, i) += 10.0; }
   auto w = preconditioned_eigenvalues(LinearOperator::from_dense(M), LinearOperator::from_dense(gauss_inverse(M)));
   for (const auto &z : w) { CHECK(std::abs(z - 1.0) < 1e-9); }
}

TEST_CASE("full spectrum against an explicit inverse oracle", "[spectral][spectrum]")
{
   const DspSystem &sys = mfe(4);
   RealizedRecipe r = realize(sys, recipe_s1(), kProps);
   const std::size_t N = sys.size();
   const DenseMatrix K = DenseMatrix::from_sparse(sys.assemble_full());

   // Explicit dense block preconditioners.
   const std::size_t n = sys.n(), m = sys.m();
   const DenseMatrix Ah = r.a_hat->dense_matrix(), Sh = r.s_hat->dense_matrix(), Xh = r.x_hat->dense_matrix();
   const DenseMatrix B = DenseMatrix::from_sparse(sys.B), C = DenseMatrix::from_sparse(sys.C);
   DenseMatrix Pt(N, N), Pd(N, N);
   auto place = [](DenseMatrix &T, const DenseMatrix &X, std::size_t r0, std::size_t c0, double s) {
      for (std::size_t i = 0; i < X.rows(); ++i)
      {
         for (std::size_t j = 0; j < X.cols(); ++j) { T(r0 + i, c0 + j) = s * X(i, j); }
      }
   };
   place(Pt, Ah, 0, 0, 1.0);
   place(Pt, naive_transpose(B), 0, n, 1.0);
   place(Pt, Sh, n, n, -1.0);
   place(Pt, naive_transpose(C), n, n + m, 1.0);
   place(Pt, Xh, n + m, n + m, 1.0);
   place(Pd, Ah, 0, 0, 1.0);
   place(Pd, Sh, n, n, 1.0);
   place(Pd, Xh, n + m, n + m, 1.0);

   PreconditionedSpectrum tri = full_spectrum(sys, r.a_hat, r.s_hat, r.x_hat, SpectrumMode::triangular);
   auto oracle_t = dense_eig_general(naive_matmul(K, gauss_inverse(Pt)), false).values;
   CHECK(tri.values.size() == N);
   CHECK(spectrum_distance(tri.values, oracle_t) < 1e-8);
   CHECK(tri.block_norms.size() == N);

   PreconditionedSpectrum dia = full_spectrum(sys, r.a_hat, r.s_hat, r.x_hat, SpectrumMode::diagonal);
   for (const auto &z : dia.values) { CHECK(z.imag() == 0.0); }
   auto oracle_d = dense_eig_general(naive_matmul(K, gauss_inverse(Pd)), false).values;
   CHECK(spectrum_distance(dia.values, oracle_d) < 1e-8);

   SpectrumOptions small;
   small.max_dense_n = 10;
   CHECK_THROWS_AS(full_spectrum(sys, r.a_hat, r.s_hat, r.x_hat, SpectrumMode::diagonal, small), UnsupportedError);
}

TEST_CASE("block norms are scaled coordinates of P^{-1} u", "[spectral][spectrum]")
{
   std::mt19937_64 rng(43);
   DspSystem sys = random_dsp(6, 3, 2, 1, rng);
   InnerPtr a = make_diagonal(Vector(6, 4.0), "d"), s = make_diagonal(Vector(3, 1.0), "d"),
            x = make_diagonal(Vector(2, 9.0), "d");
   PreconditionedSpectrum sp = full_spectrum(sys, a, s, x, SpectrumMode::triangular);
   REQUIRE(sp.block_norms.size() == sp.values.size());
   for (const auto &b : sp.block_norms)
   {
      CHECK(b[0] >= 0.0);
      CHECK(b[1] >= 0.0);
      CHECK(b[2] >= 0.0);
      CHECK(b[0] + b[1] + b[2] > 0.0);
   }
}

TEST_CASE("verify bounds on the assembled system", "[spectral][verify]")
{
   const DspSystem &sys = mfe(4);
   for (const SchurRecipe &rec : {recipe_s1(), recipe_s1(0.1), recipe_s2()})
   {
      RealizedRecipe r = realize(sys, rec, kProps);
      BoundReport rep = make_bound_report(compute_indicators(sys, r.a_hat, r.s_hat, r.x_hat), "mfe4", rec.id());
      for (SpectrumMode mode : {SpectrumMode::triangular, SpectrumMode::diagonal})
      {
         PreconditionedSpectrum sp = full_spectrum(sys, r.a_hat, r.s_hat, r.x_hat, mode, {}, "mfe4");
         BoundVerdict v = verify_bounds(sp, rep);
         INFO(rec.id() << " " << to_string(mode) << "\n" << verdict_text(v));
         CHECK(v.passed());
      }
   }
}

TEST_CASE("verify bounds edge cases", "[spectral][verify]")
{
   PreconditionedSpectrum ones;
   ones.values.assign(12, {1.0, 0.0});
   BoundReport rep = make_bound_report(unit_indicators());
   rep.triangular.exclusion = {0.0, 0.0};
   CHECK(verify_bounds(ones, rep).passed());

   PreconditionedSpectrum spread;
   spread.values = {{0.8, 0.0}, {2.5, 0.0}, {1.0, 0.3}, {1.0, -0.3}};
   BoundReport shrunk = rep;
   shrunk.disc.radius = 0.5;
   CHECK(verify_bounds(spread, shrunk).passed());
   shrunk.triangular.hi = 2.0;
   BoundVerdict v = verify_bounds(spread, shrunk);
   CHECK_FALSE(v.passed());
   const CheckResult &real = v.checks[1];
   CHECK(real.name == "real-interval");
   CHECK_FALSE(real.passed);
   CHECK(real.worst_value == std::complex<double>(2.5, 0.0));
   CHECK(real.worst_excess == Approx(0.5 - 1e-8).epsilon(1e-12));
   CHECK(v.num_complex == 2);
   CHECK(verdict_csv(v).find("real-interval,fail") != std::string::npos);

   shrunk.disc.radius = 0.2;
   CHECK_FALSE(verify_bounds(spread, shrunk).checks[0].passed);
   shrunk.disc.all_real = true;
   CHECK_FALSE(verify_bounds(spread, shrunk).checks[0].passed);

   PreconditionedSpectrum tagged = ones;
   tagged.provenance = "a";
   BoundReport other = rep;
   other.provenance = "b";
   CHECK_THROWS_AS(verify_bounds(tagged, other), ConfigError);

   PreconditionedSpectrum diag;
   diag.mode = SpectrumMode::diagonal;
   diag.values = {{-0.75, 0.0}, {2.0, 0.0}};
   CHECK(verify_bounds(diag, rep).passed());
   diag.values.push_back({0.0, 0.0});
   CHECK_FALSE(verify_bounds(diag, rep).passed());
}

TEST_CASE("classification and serialization", "[spectral]")
{
   CHECK_FALSE(is_complex_eigenvalue({2.0, 1e-9}));
   CHECK(is_complex_eigenvalue({2.0, 1e-6}));
   CHECK_FALSE(is_complex_eigenvalue({1e3, 1e-6}));
   PreconditionedSpectrum s;
   s.values = {{1.0, 0.0}, {1.0, 0.5}};
   const std::string csv = spectrum_csv(s);
   CHECK(csv.rfind("re,im,class\n", 0) == 0);
   CHECK(csv.find(",real\n") != std::string::npos);
   CHECK(csv.find(",complex\n") != std::string::npos);
   const std::string txt = bound_report_text(make_bound_report(unit_indicators(), "x", "r"));
   CHECK(txt.find("5.0000e-01") != std::string::npos);
}
