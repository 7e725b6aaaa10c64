#include "biotdsp/assembly/assemble.hpp"

#include "biotdsp/errors.hpp"
#include "biotdsp/sparse/matrix_market.hpp"

#include <cmath>
#include <fstream>
#include <random>
#include <sstream>

namespace biotdsp
{

namespace
{
const char *kModule = "biot-assembly";

/// 2-point Gauss rule on [0,1].
constexpr double kGaussPt[2] = {0.5 - 0.5 / 1.7320508075688772935, 0.5 + 0.5 / 1.7320508075688772935};

/// Reference Q1 shape function gradients at xi, scaled to a cell of side h.
void q1_gradients(int dim, double h, const double *xi, double grad[8][3])
{
   const int nloc = 1 << dim;
   for (int a = 0; a < nloc; ++a)
   {
      for (int j = 0; j < dim; ++j)
      {
         double g = 1.0;
         for (int k = 0; k < dim; ++k)
         {
            const bool up = (a >> k) & 1;
            if (k == j) { g *= (up ? 1.0 : -1.0) / h; }
            else { g *= up ? xi[k] : 1.0 - xi[k]; }
         }
         grad[a][j] = g;
      }
   }
}

template <class Fn>
void for_each_gauss_point(int dim, Fn &&fn)
{
   const int npts = 1 << dim;
   for (int q = 0; q < npts; ++q)
   {
      double xi[3] = {0.5, 0.5, 0.5};
      for (int k = 0; k < dim; ++k) { xi[k] = kGaussPt[(q >> k) & 1]; }
      fn(xi, std::pow(0.5, dim));
   }
}

double stab_coefficient(const MaterialProps &props, const AssemblyOptions &opt)
{
   if (opt.stab_coefficient > 0.0) { return opt.stab_coefficient; }
   const double kdr = props.drained_bulk_modulus();
   return props.biot_b * props.biot_b / kdr;
}

void check_adjoint(const CsrMatrix &X, const CsrMatrix &Y, const char *what)
{
   // X + Y^T must vanish.
   CsrMatrix R = add(X, transpose(Y));
   const double scale = std::max(X.max_abs(), Y.max_abs());
   if (R.max_abs() > 1e-12 * std::max(scale, 1e-300))
   {
      throw AssemblyError(kModule, std::string(what) + " adjointness violated");
   }
}
} // namespace

DenseMatrix q1_local_stiffness(int dim, double h, const MaterialProps &props)
{
   const int nloc = 1 << dim;
   const std::size_t ndof = static_cast<std::size_t>(dim * nloc);
   const double lam = props.lame_lambda(), mu = props.lame_mu();
   const double vol = std::pow(h, dim);
   DenseMatrix K(ndof, ndof);
   for_each_gauss_point(dim, [&](const double *xi, double w) {
      double g[8][3];
      q1_gradients(dim, h, xi, g);
      const double jw = w * vol;
      for (int a = 0; a < nloc; ++a)
      {
         for (int b = 0; b < nloc; ++b)
         {
            double gg = 0.0;
            for (int k = 0; k < dim; ++k) { gg += g[a][k] * g[b][k]; }
            for (int i = 0; i < dim; ++i)
            {
               for (int j = 0; j < dim; ++j)
               {
                  double v = lam * g[a][i] * g[b][j] + mu * g[a][j] * g[b][i];
                  if (i == j) { v += mu * gg; }
                  K(static_cast<std::size_t>(dim * a + i), static_cast<std::size_t>(dim * b + j)) += jw * v;
               }
            }
         }
      }
   });
   return K;
}

Vector q1_local_divergence(int dim, double h)
{
   const int nloc = 1 << dim;
   Vector d(static_cast<std::size_t>(dim * nloc), 0.0);
   const double vol = std::pow(h, dim);
   for_each_gauss_point(dim, [&](const double *xi, double w) {
      double g[8][3];
      q1_gradients(dim, h, xi, g);
      for (int a = 0; a < nloc; ++a)
      {
         for (int k = 0; k < dim; ++k) { d[static_cast<std::size_t>(dim * a + k)] += w * vol * g[a][k]; }
      }
   });
   return d;
}

DenseMatrix rt0_local_mass(int dim, double h, double mu_over_kappa, bool outward)
{
   const std::size_t nloc = static_cast<std::size_t>(2 * dim);
   DenseMatrix M(nloc, nloc);
   const double s = mu_over_kappa * std::pow(h, dim);
   const double off = (outward ? -1.0 : 1.0) / 6.0;
   for (int k = 0; k < dim; ++k)
   {
      const std::size_t lo = static_cast<std::size_t>(2 * k), hi = lo + 1;
      M(lo, lo) = s / 3.0;
      M(hi, hi) = s / 3.0;
      M(lo, hi) = s * off;
      M(hi, lo) = s * off;
   }
   return M;
}

DisplacementBlocks assemble_displacement(const StructuredMesh &mesh, const MaterialProps &props,
                                         const AssemblyOptions &opt)
{
   props.validate();
   const int d = mesh.dim();
   const std::size_t du = static_cast<std::size_t>(d);
   const std::size_t N = mesh.cells_per_side();
   const std::size_t n = du * mesh.num_nodes();
   const std::size_t m = mesh.num_cells();
   const double h = mesh.h();
   const int nloc = 1 << d;

   DisplacementBlocks out;
   out.clamped.assign(n, 0);
   for (std::size_t v = 0; v < mesh.num_nodes(); ++v)
   {
      if (mesh.node_coords(v)[0] == 0)
      {
         for (std::size_t k = 0; k < du; ++k) { out.clamped[du * v + k] = 1; }
      }
   }

   const DenseMatrix K = q1_local_stiffness(d, h, props);
   const Vector div = q1_local_divergence(d, h);
   TripletList tA(n, n), tB(m, n);
   tA.reserve(m * K.rows() * K.cols());
   tB.reserve(m * div.size());
   for (std::size_t c = 0; c < m; ++c)
   {
      const auto nodes = mesh.cell_nodes(c);
      for (int a = 0; a < nloc; ++a)
      {
         for (std::size_t i = 0; i < du; ++i)
         {
            const std::size_t la = du * static_cast<std::size_t>(a) + i;
            const std::size_t ga = du * nodes[a] + i;
            if (!out.clamped[ga]) { tB.add(c, ga, props.biot_b * div[la]); }
            for (int b = 0; b < nloc; ++b)
            {
               for (std::size_t j = 0; j < du; ++j)
               {
                  const std::size_t lb = du * static_cast<std::size_t>(b) + j;
                  const std::size_t gb = du * nodes[b] + j;
                  if (ga != gb && (out.clamped[ga] || out.clamped[gb])) { continue; }
                  tA.add(ga, gb, K(la, lb));
               }
            }
         }
      }
   }
   out.A_uu = drop_small(tA.to_csr());
   out.A_pu = drop_small(tB.to_csr());

   // Uniform downward traction on the top face (last axis at position N).
   out.b_u.assign(n, 0.0);
   const int top = d - 1;
   const double share = -opt.top_load * mesh.face_measure() / static_cast<double>(1 << (d - 1));
   for (std::size_t c = 0; c < m; ++c)
   {
      const auto cc = mesh.cell_coords(c);
      if (cc[static_cast<std::size_t>(top)] != N - 1) { continue; }
      const auto nodes = mesh.cell_nodes(c);
      for (int a = 0; a < nloc; ++a)
      {
         if (!((a >> top) & 1)) { continue; }
         const std::size_t g = du * nodes[a] + static_cast<std::size_t>(top);
         if (!out.clamped[g]) { out.b_u[g] += share; }
      }
   }
   return out;
}

CsrMatrix assemble_stabilization(const StructuredMesh &mesh, const MaterialProps &props,
                                 const AssemblyOptions &opt)
{
   const std::size_t N = mesh.cells_per_side();
   if (N % 2 != 0)
   {
      throw ConfigError(kModule, "stabilization needs an even number of cells per side, got " +
                        std::to_string(N));
   }
   const double w = stab_coefficient(props, opt) * mesh.cell_measure();
   const std::size_t m = mesh.num_cells();
   TripletList t(m, m);
   for (std::size_t c = 0; c < m; ++c)
   {
      const auto cc = mesh.cell_coords(c);
      for (int k = 0; k < mesh.dim(); ++k)
      {
         const std::size_t ku = static_cast<std::size_t>(k);
         if (cc[ku] % 2 != 0) { continue; }
         auto nc = cc;
         nc[ku] += 1;
         const std::size_t j = mesh.cell_index(nc);
         t.add(c, c, w);
         t.add(j, j, w);
         t.add(c, j, -w);
         t.add(j, c, -w);
      }
   }
   return t.to_csr();
}

MfeBlocks assemble_mfe(const StructuredMesh &mesh, const MaterialProps &props,
                       const AssemblyOptions &opt)
{
   props.validate();
   const int d = mesh.dim();
   const std::size_t N = mesh.cells_per_side();
   const std::size_t m = mesh.num_cells();
   const std::size_t p = static_cast<std::size_t>(d) * m;
   const double fm = mesh.face_measure();

   DisplacementBlocks disp = assemble_displacement(mesh, props, opt);
   MfeBlocks out;
   out.A_uu = std::move(disp.A_uu);
   out.A_pu = std::move(disp.A_pu);
   out.A_up = scale(transpose(out.A_pu), -1.0);
   out.b_u = std::move(disp.b_u);

   Vector spp(m, props.s_eps * mesh.cell_measure());
   out.A_pp = drop_small(CsrMatrix::diagonal(spp));
   out.A_stab = assemble_stabilization(mesh, props, opt);

   // Velocity unknown (axis k, owner cell c) -> k*m + c; upper-boundary faces are decoupled.
   const DenseMatrix Mloc = rt0_local_mass(d, mesh.h(), props.mu / props.kappa, false);
   auto is_far = [&](std::size_t q) {
      const std::size_t k = q / m, c = q % m;
      return mesh.cell_coords(c)[k] == N - 1;
   };
   TripletList tq(p, p), tpq(m, p);
   for (std::size_t c = 0; c < m; ++c)
   {
      const auto cc = mesh.cell_coords(c);
      for (int k = 0; k < d; ++k)
      {
         const std::size_t ku = static_cast<std::size_t>(k);
         const std::size_t upper = ku * m + c;
         long lower = -1;
         if (cc[ku] > 0)
         {
            auto nc = cc;
            nc[ku] -= 1;
            lower = static_cast<long>(ku * m + mesh.cell_index(nc));
         }
         const std::size_t lo = 2 * ku, hi = lo + 1;
         tq.add(upper, upper, Mloc(hi, hi));
         if (!is_far(upper)) { tpq.add(c, upper, fm); }
         if (lower >= 0)
         {
            const std::size_t l = static_cast<std::size_t>(lower);
            tq.add(l, l, Mloc(lo, lo));
            tpq.add(c, l, -fm);
            if (!is_far(upper))
            {
               tq.add(l, upper, Mloc(lo, hi));
               tq.add(upper, l, Mloc(hi, lo));
            }
         }
      }
   }
   out.A_qq = tq.to_csr();
   out.A_pq = tpq.to_csr();
   out.A_qp = scale(transpose(out.A_pq), -1.0);
   out.b_p.assign(m, 0.0);
   out.b_q.assign(p, 0.0);
   return out;
}

DspSystem mfe_to_dsp(const MfeBlocks &blocks, const MaterialProps &props)
{
   check_adjoint(blocks.A_up, blocks.A_pu, "A_up = -A_pu^T");
   check_adjoint(blocks.A_pq, blocks.A_qp, "A_pq = -A_qp^T");
   DspSystem sys;
   sys.A = blocks.A_uu;
   sys.B = scale(blocks.A_pu, -1.0);
   sys.C = scale(blocks.A_qp, props.dt);
   sys.D = add(blocks.A_pp, blocks.A_stab);
   sys.E = scale(blocks.A_qq, props.dt);
   const std::size_t n = sys.n(), m = sys.m(), p = sys.p();
   sys.rhs.assign(n + m + p, 0.0);
   for (std::size_t i = 0; i < n; ++i) { sys.rhs[i] = blocks.b_u[i]; }
   for (std::size_t i = 0; i < m; ++i) { sys.rhs[n + i] = -blocks.b_p[i]; }
   for (std::size_t i = 0; i < p; ++i) { sys.rhs[n + m + i] = props.dt * blocks.b_q[i]; }
   sys.check_shapes();
   return sys;
}

MhfeBlocks assemble_mhfe(const StructuredMesh &mesh, const MaterialProps &props,
                         const AssemblyOptions &opt)
{
   props.validate();
   const int d = mesh.dim();
   const std::size_t nloc = static_cast<std::size_t>(2 * d);
   const std::size_t m = mesh.num_cells();
   const std::size_t nw = nloc * m;
   const std::size_t nf = mesh.num_faces();
   const double fm = mesh.face_measure();

   DisplacementBlocks disp = assemble_displacement(mesh, props, opt);
   MhfeBlocks out;
   out.A_uu = std::move(disp.A_uu);
   out.A_pu = std::move(disp.A_pu);
   out.A_up = scale(transpose(out.A_pu), -1.0);
   out.b_u = std::move(disp.b_u);
   Vector spp(m, props.s_eps * mesh.cell_measure());
   out.A_pp = drop_small(CsrMatrix::diagonal(spp));
   out.A_stab = assemble_stabilization(mesh, props, opt);

   const DenseMatrix Mloc = rt0_local_mass(d, mesh.h(), props.mu / props.kappa, true);
   TripletList tww(nw, nw), twp(nw, m), twpi(nw, nf);
   for (std::size_t c = 0; c < m; ++c)
   {
      const auto cc = mesh.cell_coords(c);
      for (std::size_t a = 0; a < nloc; ++a)
      {
         const std::size_t wa = c * nloc + a;
         for (std::size_t b = 0; b < nloc; ++b)
         {
            if (Mloc(a, b) != 0.0) { tww.add(wa, c * nloc + b, Mloc(a, b)); }
         }
         const int k = static_cast<int>(a / 2);
         auto fc = cc;
         fc[static_cast<std::size_t>(k)] += a % 2;
         twp.add(wa, c, -fm);
         twpi.add(wa, mesh.face_index(k, fc), fm);
      }
   }
   out.A_ww = tww.to_csr();
   out.A_wp = twp.to_csr();
   out.A_pw = scale(transpose(out.A_wp), -1.0);
   out.A_wpi = twpi.to_csr();
   out.A_piw = transpose(out.A_wpi);
   out.b_p.assign(m, 0.0);
   out.b_pi.assign(nf, 0.0);
   return out;
}

DspSystem condense_mhfe(const MhfeBlocks &blocks, const MaterialProps &props,
                        const AssemblyOptions &opt)
{
   const std::size_t m = blocks.A_pp.rows();
   const std::size_t nw = blocks.A_ww.rows();
   const std::size_t nf = blocks.A_wpi.cols();
   if (m == 0 || nw % m != 0)
   {
      throw AssemblyError(kModule, "A_ww size is not a multiple of the cell count");
   }
   check_adjoint(blocks.A_wp, blocks.A_pw, "A_wp = -A_pw^T");
   if (add(blocks.A_wpi, transpose(blocks.A_piw), 1.0, -1.0).max_abs() != 0.0)
   {
      throw AssemblyError(kModule, "A_wpi = A_piw^T violated");
   }
   const std::size_t nloc = nw / m;
   const double dt = props.dt;
   const CsrMatrix PwT = transpose(blocks.A_pw); // nw x m

   TripletList tC(nf, m), tD(m, m), tE(nf, nf);
   for (std::size_t c = 0; c < m; ++c)
   {
      const std::size_t w0 = c * nloc;
      DenseMatrix Mt(nloc, nloc);
      for (std::size_t a = 0; a < nloc; ++a)
      {
         auto cols = blocks.A_ww.row_cols(w0 + a);
         auto vals = blocks.A_ww.row_vals(w0 + a);
         for (std::size_t k = 0; k < cols.size(); ++k)
         {
            if (cols[k] < w0 || cols[k] >= w0 + nloc)
            {
               throw AssemblyError(kModule, "A_ww is not block diagonal per element");
            }
            Mt(a, cols[k] - w0) = vals[k];
         }
      }
      DenseCholesky F(Mt);
      // Local columns: pressure couplings (from A_wp and A_pw^T) and face couplings.
      auto gather = [&](const CsrMatrix &X, std::size_t a, std::vector<std::pair<std::size_t, double>> &dst) {
         auto cols = X.row_cols(w0 + a);
         auto vals = X.row_vals(w0 + a);
         for (std::size_t k = 0; k < cols.size(); ++k) { dst.emplace_back(cols[k], vals[k]); }
      };
      std::vector<std::vector<std::pair<std::size_t, double>>> wp(nloc), pwT(nloc), wpi(nloc);
      for (std::size_t a = 0; a < nloc; ++a)
      {
         gather(blocks.A_wp, a, wp[a]);
         gather(PwT, a, pwT[a]);
         gather(blocks.A_wpi, a, wpi[a]);
      }
      // Minv explicitly (tiny).
      DenseMatrix Minv(nloc, nloc);
      for (std::size_t j = 0; j < nloc; ++j)
      {
         Vector e(nloc, 0.0);
         e[j] = 1.0;
         Vector col = F.solve(e);
         for (std::size_t i = 0; i < nloc; ++i) { Minv(i, j) = col[i]; }
      }
      for (std::size_t a = 0; a < nloc; ++a)
      {
         for (std::size_t b = 0; b < nloc; ++b)
         {
            const double mab = dt * Minv(a, b);
            // D += dt A_pw Minv A_pw^T
            for (auto [i, vi] : pwT[a])
            {
               for (auto [j, vj] : pwT[b]) { tD.add(i, j, vi * mab * vj); }
            }
            // C = dt A_piw Minv A_wp
            for (auto [f, vf] : wpi[a])
            {
               for (auto [j, vj] : wp[b]) { tC.add(f, j, vf * mab * vj); }
               // E = dt A_piw Minv A_wpi
               for (auto [g, vg] : wpi[b]) { tE.add(f, g, vf * mab * vg); }
            }
         }
      }
   }
   DspSystem sys;
   sys.A = blocks.A_uu;
   sys.B = scale(blocks.A_pu, -1.0);
   sys.C = drop_small(tC.to_csr());
   sys.D = drop_small(add(add(blocks.A_pp, blocks.A_stab), tD.to_csr()));
   sys.E = drop_small(tE.to_csr());
   // Enforce exact symmetry of the condensed symmetric blocks.
   sys.D = add(sys.D, transpose(sys.D), 0.5, 0.5);
   sys.E = add(sys.E, transpose(sys.E), 0.5, 0.5);

   DefinitenessCheck chk = check_spsd(sys.D, opt.spsd_tol, opt.dense_check_limit);
   if (!chk.passed)
   {
      std::ostringstream os;
      os << "condensed D is not SPSD: lambda_min=" << chk.lambda_min << " (" << chk.method
         << "); check the sign of the condensed pressure block";
      throw AssemblyError(kModule, os.str());
   }

   const std::size_t n = sys.n();
   sys.rhs.assign(n + m + nf, 0.0);
   for (std::size_t i = 0; i < n; ++i) { sys.rhs[i] = blocks.b_u[i]; }
   for (std::size_t i = 0; i < m; ++i) { sys.rhs[n + i] = -blocks.b_p[i]; }
   for (std::size_t i = 0; i < nf; ++i) { sys.rhs[n + m + i] = -dt * blocks.b_pi[i]; }
   sys.check_shapes();
   return sys;
}

ManufacturedRhs manufactured_rhs(const DspSystem &sys, std::uint64_t seed)
{
   std::mt19937_64 rng(seed);
   ManufacturedRhs out;
   out.x_true.resize(sys.size());
   for (double &x : out.x_true)
   {
      x = -1.0 + 2.0 * static_cast<double>(rng() >> 11) * 0x1.0p-53;
   }
   out.rhs = sys.apply(out.x_true);
   return out;
}

ManufacturedRhs ones_rhs(const DspSystem &sys)
{
   ManufacturedRhs out;
   out.x_true.assign(sys.size(), 1.0);
   out.rhs = sys.apply(out.x_true);
   return out;
}

Discretization parse_discretization(const std::string &name)
{
   if (name == "mfe2d") { return Discretization::mfe2d; }
   if (name == "mfe3d") { return Discretization::mfe3d; }
   if (name == "mhfe2d") { return Discretization::mhfe2d; }
   if (name == "mhfe3d") { return Discretization::mhfe3d; }
   throw ConfigError(kModule, "unknown discretization '" + name + "' (expected mfe2d, mfe3d, mhfe2d, mhfe3d)");
}

std::string to_string(Discretization d)
{
   switch (d)
   {
   case Discretization::mfe2d: return "mfe2d";
   case Discretization::mfe3d: return "mfe3d";
   case Discretization::mhfe2d: return "mhfe2d";
   case Discretization::mhfe3d: return "mhfe3d";
   }
   return "?";
}

int dimension_of(Discretization d)
{
   return (d == Discretization::mfe2d || d == Discretization::mhfe2d) ? 2 : 3;
}

DspSystem build_system(Discretization d, std::size_t cells_per_side, const MaterialProps &props,
                       const AssemblyOptions &opt)
{
   StructuredMesh mesh(dimension_of(d), cells_per_side);
   DspSystem sys;
   if (d == Discretization::mfe2d || d == Discretization::mfe3d)
   {
      sys = mfe_to_dsp(assemble_mfe(mesh, props, opt), props);
   }
   else
   {
      sys = condense_mhfe(assemble_mhfe(mesh, props, opt), props, opt);
   }
   sys.discretization = to_string(d);
   sys.dim = mesh.dim();
   sys.cells_per_side = cells_per_side;
   return sys;
}

void export_system(const DspSystem &sys, const MaterialProps &props, const std::filesystem::path &dir)
{
   std::filesystem::create_directories(dir);
   mm_write(sys.A, dir / "A.mtx");
   mm_write(sys.B, dir / "B.mtx");
   mm_write(sys.C, dir / "C.mtx");
   mm_write(sys.D, dir / "D.mtx");
   mm_write(sys.E, dir / "E.mtx");
   mm_write_vector(sys.rhs, dir / "rhs.vec");
   std::ofstream man(dir / "manifest.txt");
   if (!man) { throw ConfigError(kModule, "cannot write manifest in '" + dir.string() + "'"); }
   man.precision(17);
   man << "discretization=" << sys.discretization << "\n"
       << "dim=" << sys.dim << "\n"
       << "cells=" << sys.cells_per_side << "\n"
       << "h=" << (sys.cells_per_side ? 1.0 / static_cast<double>(sys.cells_per_side) : 0.0) << "\n"
       << "n=" << sys.n() << "\nm=" << sys.m() << "\np=" << sys.p() << "\nN=" << sys.size() << "\n"
       << "nnz=" << sys.nnz() << "\n"
       << "props.dt=" << props.dt << "\nprops.young=" << props.young << "\nprops.poisson=" << props.poisson
       << "\nprops.biot_b=" << props.biot_b << "\nprops.s_eps=" << props.s_eps << "\nprops.kappa=" << props.kappa
       << "\nprops.mu=" << props.mu << "\n";
}

} // namespace biotdsp
