#include "biotdsp/assembly/assemble.hpp"
#include "biotdsp/errors.hpp"

#include "test_util.hpp"

#include <catch_amalgamated.hpp>

#include <cmath>

using namespace biotdsp;
using namespace testutil;
using Catch::Approx;

namespace
{
double rel_diff(const DenseMatrix &a, const DenseMatrix &b)
{
   return max_abs_diff(a, b) / std::max(1e-300, std::max(a.max_abs(), b.max_abs()));
}

/// 4-point Gauss-Legendre on [0,1].
const double kGl4x[4] = {0.0694318442029737, 0.3300094782075719, 0.6699905217924281, 0.9305681557970263};
const double kGl4w[4] = {0.1739274225687269, 0.3260725774312731, 0.3260725774312731, 0.1739274225687269};

/// Component k of the local RT0 basis function for face (axis a, side s) at reference xi.
double rt0_basis(int face_axis, int side, bool outward, int k, const double *xi)
{
   if (k != face_axis) { return 0.0; }
   const double t = xi[face_axis];
   if (side == 1) { return t; }
   return outward ? -(1.0 - t) : (1.0 - t);
}
} // namespace

TEST_CASE("mesh counts and configuration errors", "[assembly][mesh]")
{
   StructuredMesh m2(2, 40);
   CHECK(m2.num_cells() == 1600);
   CHECK(m2.num_nodes() == 41 * 41);
   CHECK(m2.num_faces() == 2 * 41 * 40);
   StructuredMesh m3(3, 10);
   CHECK(m3.num_faces() == 3300);
   CHECK(m3.num_nodes() == 1331);
   CHECK_THROWS_AS(StructuredMesh(4, 10), ConfigError);
   CHECK_THROWS_AS(StructuredMesh(1, 10), ConfigError);

   for (std::size_t c = 0; c < m3.num_cells(); c += 37) { CHECK(m3.cell_index(m3.cell_coords(c)) == c); }

   MaterialProps bad;
   bad.poisson = 0.5;
   CHECK_THROWS_AS(bad.validate(), ConfigError);
   MaterialProps def;
   CHECK(def.dt == 1e-5);
   CHECK(def.young == 1e5);
   CHECK(def.poisson == 0.4);
   CHECK(def.biot_b == 1.0);
   CHECK(def.s_eps == 0.0);
   CHECK(def.kappa == 1e-7);
   CHECK(def.mu == 1e3);
}

TEST_CASE("MFE block sizes", "[assembly][mfe]")
{
   MaterialProps props;
   DspSystem sys = build_system(Discretization::mfe2d, 40, props);
   CHECK(sys.n() == 3362);
   CHECK(sys.m() == 1600);
   CHECK(sys.p() == 3200);

   // Refinement multiplies m by 2^dim.
   DspSystem coarse = build_system(Discretization::mfe2d, 20, props);
   CHECK(sys.m() == 4 * coarse.m());
   DspSystem c3 = build_system(Discretization::mfe3d, 4, props);
   DspSystem f3 = build_system(Discretization::mfe3d, 8, props);
   CHECK(f3.m() == 8 * c3.m());
   CHECK(f3.n() == 3 * 9 * 9 * 9);
}

TEST_CASE("MFE adjointness and block invariants", "[assembly][mfe]")
{
   MaterialProps props;
   for (int dim : {2, 3})
   {
      StructuredMesh mesh(dim, dim == 2 ? 10 : 4);
      MfeBlocks b = assemble_mfe(mesh, props);
      CHECK(add(b.A_up, transpose(b.A_pu)).max_abs() == 0.0);
      CHECK(add(b.A_pq, transpose(b.A_qp)).max_abs() == 0.0);
      CHECK(check_spd(b.A_uu).passed);
      CHECK(check_spd(b.A_qq).passed);
      CHECK(check_spsd(b.A_pp).passed);
      CHECK(check_spsd(b.A_stab).passed);

      DspSystem sys = mfe_to_dsp(b, props);
      CHECK_NOTHROW(validate_dsp(sys));
      // C = dt * A_qp = -dt * A_pq^T entrywise.
      CHECK(add(sys.C, transpose(b.A_pq), 1.0, props.dt).max_abs() == 0.0);
      CHECK(is_symmetric(sys.assemble_full(), 1e-12));
   }
}

TEST_CASE("MFE operator matches block-wise product", "[assembly][mfe][oracle]")
{
   MaterialProps props;
   DspSystem sys = build_system(Discretization::mfe2d, 10, props);
   std::mt19937_64 rng(11);
   Vector x = random_vector(sys.size(), rng);
   // Oracle: dense blocks, explicit block products.
   const std::size_t n = sys.n(), m = sys.m(), p = sys.p();
   DenseMatrix A = DenseMatrix::from_sparse(sys.A), B = DenseMatrix::from_sparse(sys.B);
   DenseMatrix C = DenseMatrix::from_sparse(sys.C), D = DenseMatrix::from_sparse(sys.D);
   DenseMatrix E = DenseMatrix::from_sparse(sys.E);
   Vector x1(x.begin(), x.begin() + n), x2(x.begin() + n, x.begin() + n + m), x3(x.begin() + n + m, x.end());
   Vector y1 = matvec(A, x1), t = matvec(B.transposed(), x2);
   for (std::size_t i = 0; i < n; ++i) { y1[i] += t[i]; }
   Vector y2 = matvec(B, x1), d2 = matvec(D, x2), c2 = matvec(C.transposed(), x3);
   for (std::size_t i = 0; i < m; ++i) { y2[i] += -d2[i] + c2[i]; }
   Vector y3 = matvec(C, x2), e3 = matvec(E, x3);
   for (std::size_t i = 0; i < p; ++i) { y3[i] += e3[i]; }
   Vector ref(y1);
   ref.insert(ref.end(), y2.begin(), y2.end());
   ref.insert(ref.end(), y3.begin(), y3.end());
   Vector got = sys.apply(x);
   CHECK(max_abs_diff(got, ref) <= 1e-13 * max_abs(ref));
   Vector got_full = spmv(sys.assemble_full(), x);
   CHECK(max_abs_diff(got_full, ref) <= 1e-13 * max_abs(ref));
}

TEST_CASE("RT0 local mass matches quadrature", "[assembly][rt0][oracle]")
{
   const double h = 0.25, mk = 1e10;
   for (int dim : {2, 3})
   {
      for (bool outward : {false, true})
      {
         DenseMatrix M = rt0_local_mass(dim, h, mk, outward);
         const int nloc = 2 * dim;
         for (int a = 0; a < nloc; ++a)
         {
            for (int b = 0; b < nloc; ++b)
            {
               double s = 0.0;
               const int npts = dim == 2 ? 16 : 64;
               for (int q = 0; q < npts; ++q)
               {
                  double xi[3] = {0, 0, 0}, w = 1.0;
                  int r = q;
                  for (int k = 0; k < dim; ++k)
                  {
                     xi[k] = kGl4x[r % 4];
                     w *= kGl4w[r % 4];
                     r /= 4;
                  }
                  for (int k = 0; k < dim; ++k)
                  {
                     s += w * rt0_basis(a / 2, a % 2, outward, k, xi) * rt0_basis(b / 2, b % 2, outward, k, xi);
                  }
               }
               s *= mk * std::pow(h, dim);
               CHECK(std::abs(M(static_cast<std::size_t>(a), static_cast<std::size_t>(b)) - s) <= 1e-12 * mk * std::pow(h, dim));
            }
         }
      }
   }
}

TEST_CASE("Q1 stiffness annihilates rigid motions", "[assembly][q1]")
{
   MaterialProps props;
   for (int dim : {2, 3})
   {
      const double h = 0.1;
      DenseMatrix K = q1_local_stiffness(dim, h, props);
      CHECK(symmetry_defect(K) <= 1e-14);
      const int nloc = 1 << dim;
      // Translations and the infinitesimal rotation in the (x,y) plane.
      for (int mode = 0; mode <= dim; ++mode)
      {
         Vector u(K.rows(), 0.0);
         for (int a = 0; a < nloc; ++a)
         {
            const double x = h * ((a >> 0) & 1), y = h * ((a >> 1) & 1);
            if (mode < dim) { u[static_cast<std::size_t>(dim * a + mode)] = 1.0; }
            else
            {
               u[static_cast<std::size_t>(dim * a + 0)] = -y;
               u[static_cast<std::size_t>(dim * a + 1)] = x;
            }
         }
         CHECK(max_abs(matvec(K, u)) <= 1e-10 * K.max_abs());
      }
      // Divergence of a uniform dilation u = x equals the cell volume times dim.
      Vector div = q1_local_divergence(dim, h);
      double s = 0.0;
      for (int a = 0; a < nloc; ++a)
      {
         for (int k = 0; k < dim; ++k) { s += div[static_cast<std::size_t>(dim * a + k)] * h * ((a >> k) & 1); }
      }
      CHECK(s == Approx(dim * std::pow(h, dim)).epsilon(1e-13));
   }
}

TEST_CASE("stabilization matrix", "[assembly][stab]")
{
   MaterialProps props;
   AssemblyOptions opt;
   opt.stab_coefficient = 1.0;
   // Single 2x2 macro-element with unit weight: cycle graph Laplacian.
   StructuredMesh one(2, 2);
   CsrMatrix S = assemble_stabilization(one, props, opt);
   DenseMatrix Sd = DenseMatrix::from_sparse(S);
   for (std::size_t i = 0; i < 4; ++i)
   {
      for (std::size_t j = 0; j < 4; ++j) { Sd(i, j) /= one.cell_measure(); }
   }
   auto w = jacobi_eigvals(Sd);
   CHECK(std::abs(w[0]) <= 1e-12);
   CHECK(w[1] == Approx(2.0));
   CHECK(w[2] == Approx(2.0));
   CHECK(w[3] == Approx(4.0));

   for (int dim : {2, 3})
   {
      StructuredMesh mesh(dim, dim == 2 ? 8 : 4);
      CsrMatrix St = assemble_stabilization(mesh, props);
      Vector ones(mesh.num_cells(), 1.0);
      CHECK(max_abs(spmv(St, ones)) <= 1e-14 * St.max_abs());
      auto ev = dense_eigvals_symmetric(DenseMatrix::from_sparse(St));
      CHECK(ev.front() >= -1e-12 * St.max_abs());
      // Default coefficient b^2/K_dr scaled by h^dim.
      CHECK(St.at(0, 0) == Approx(dim * props.biot_b * props.biot_b / props.drained_bulk_modulus() * mesh.cell_measure()));
   }
   CHECK_THROWS_AS(assemble_stabilization(StructuredMesh(2, 5), props), ConfigError);
}

TEST_CASE("MHFE blocks", "[assembly][mhfe]")
{
   MaterialProps props;
   StructuredMesh mesh(3, 4);
   MhfeBlocks b = assemble_mhfe(mesh, props);
   CHECK(add(b.A_wp, transpose(b.A_pw)).max_abs() == 0.0);
   CHECK(add(b.A_wpi, transpose(b.A_piw), 1.0, -1.0).max_abs() == 0.0);
   // A_ww block diagonal with one 6x6 block per element.
   for (std::size_t i = 0; i < b.A_ww.rows(); ++i)
   {
      for (std::size_t j : b.A_ww.row_cols(i)) { CHECK(i / 6 == j / 6); }
   }
   CHECK(check_spd(b.A_ww).passed);
   CHECK(b.A_wpi.cols() == mesh.num_faces());
}

TEST_CASE("MHFE 3-D sizes", "[assembly][mhfe]")
{
   MaterialProps props;
   DspSystem sys = build_system(Discretization::mhfe3d, 10, props);
   CHECK(sys.n() == 3993);
   CHECK(sys.m() == 1000);
   CHECK(sys.p() == 3300);
   CHECK(sys.size() == 8293);
   CHECK(sys.nnz() > 200000);
   CHECK(sys.nnz() < 400000);
}

TEST_CASE("MHFE condensation matches dense elimination", "[assembly][mhfe][oracle]")
{
   MaterialProps props;
   for (int dim : {2, 3})
   {
      StructuredMesh mesh(dim, 4);
      MhfeBlocks b = assemble_mhfe(mesh, props);
      DspSystem sys = condense_mhfe(b, props);
      DenseMatrix Aww = DenseMatrix::from_sparse(b.A_ww);
      DenseMatrix Winv(Aww.rows(), Aww.cols());
      for (std::size_t j = 0; j < Aww.cols(); ++j)
      {
         Vector e(Aww.rows(), 0.0);
         e[j] = 1.0;
         Vector c = gauss_solve(Aww, e);
         for (std::size_t i = 0; i < Aww.rows(); ++i) { Winv(i, j) = c[i]; }
      }
      DenseMatrix Apw = DenseMatrix::from_sparse(b.A_pw), Awp = DenseMatrix::from_sparse(b.A_wp);
      DenseMatrix Apiw = DenseMatrix::from_sparse(b.A_piw), Awpi = DenseMatrix::from_sparse(b.A_wpi);
      DenseMatrix Cref = matmul(matmul(Apiw, Winv), Awp);
      DenseMatrix Eref = matmul(matmul(Apiw, Winv), Awpi);
      DenseMatrix Dc = matmul(matmul(Apw, Winv), Apw.transposed());
      for (std::size_t i = 0; i < Cref.rows(); ++i)
      {
         for (std::size_t j = 0; j < Cref.cols(); ++j) { Cref(i, j) *= props.dt; }
      }
      for (std::size_t i = 0; i < Eref.rows(); ++i)
      {
         for (std::size_t j = 0; j < Eref.cols(); ++j) { Eref(i, j) *= props.dt; }
      }
      DenseMatrix Dref = add(DenseMatrix::from_sparse(add(b.A_pp, b.A_stab)), Dc, 1.0, props.dt);
      CHECK(rel_diff(DenseMatrix::from_sparse(sys.C), Cref) <= 1e-10);
      CHECK(rel_diff(DenseMatrix::from_sparse(sys.E), Eref) <= 1e-10);
      CHECK(rel_diff(DenseMatrix::from_sparse(sys.D), Dref) <= 1e-10);
      CHECK(symmetry_defect(sys.E) <= 1e-12);
      CHECK(check_spd(sys.E).passed);
      CHECK_NOTHROW(validate_dsp(sys));
      CHECK(is_symmetric(sys.assemble_full(), 1e-12));
   }
}

TEST_CASE("condensation rejects a non-SPSD pressure block", "[assembly][mhfe]")
{
   MaterialProps props;
   StructuredMesh mesh(2, 4);
   MhfeBlocks b = assemble_mhfe(mesh, props);
   b.A_stab = scale(b.A_stab, -1.0);
   b.A_pp = scale(CsrMatrix::identity(mesh.num_cells()), -1.0);
   CHECK_THROWS_AS(condense_mhfe(b, props), AssemblyError);
}

TEST_CASE("right-hand sides", "[assembly][rhs]")
{
   MaterialProps props;
   DspSystem sys = build_system(Discretization::mfe2d, 8, props);
   ManufacturedRhs a = manufactured_rhs(sys, 42), b = manufactured_rhs(sys, 42);
   CHECK(a.rhs == b.rhs);
   CHECK(a.x_true == b.x_true);
   for (double x : a.x_true) { CHECK((x >= -1.0 && x < 1.0)); }
   CHECK(sys.apply(a.x_true) == a.rhs);

   ManufacturedRhs o = ones_rhs(sys);
   CsrMatrix F = sys.assemble_full();
   for (std::size_t i = 0; i < F.rows(); ++i)
   {
      double s = 0.0;
      for (double v : F.row_vals(i)) { s += v; }
      CHECK(std::abs(o.rhs[i] - s) <= 1e-12 * std::max(1.0, std::abs(s)) + 1e-12 * F.max_abs());
   }

   // Load-free problem gives zero rhs; the loaded problem does not.
   AssemblyOptions noload;
   noload.top_load = 0.0;
   DspSystem z = build_system(Discretization::mhfe2d, 4, props, noload);
   CHECK(max_abs(z.rhs) == 0.0);
   CHECK(max_abs(sys.rhs) > 0.0);
   // Total vertical load on the free top nodes: clamped corner excluded.
   double fy = 0.0;
   for (std::size_t i = 1; i < sys.n(); i += 2) { fy += sys.rhs[i]; }
   CHECK(fy == Approx(-1e4 * (1.0 - 0.5 / 8.0)));
}
