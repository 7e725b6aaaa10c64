#include "biotdsp/schur/schur.hpp"

#include "biotdsp/errors.hpp"

#include <cmath>
#include <sstream>

namespace biotdsp
{

namespace
{
const char *kModule = "schur-approx";

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

DenseMatrix symmetrized(const DenseMatrix &M)
{
   DenseMatrix S(M.rows(), M.cols());
   for (std::size_t i = 0; i < M.rows(); ++i)
   {
      for (std::size_t j = 0; j < M.cols(); ++j) { S(i, j) = 0.5 * (M(i, j) + M(j, i)); }
   }
   return S;
}
} // namespace

CsrMatrix build_s1(const DspSystem &sys)
{
   sys.check_shapes();
   Vector d = diagonal_of(sys.A);
   for (std::size_t i = 0; i < d.size(); ++i)
   {
      if (!(d[i] > 0.0))
      {
         throw ContractError(kModule, "degenerate diagonal: A(" + std::to_string(i) + "," + std::to_string(i) + ") is not positive");
      }
      d[i] = 1.0 / d[i];
   }
   return add(sys.D, multiply_scaled_transpose(sys.B, d));
}

CsrMatrix build_sk_physical(const StructuredMesh &mesh, const MaterialProps &props)
{
   const double K = props.drained_bulk_modulus();
   if (!(K > 0.0) || !std::isfinite(K))
   {
      throw ConfigError(kModule, "props: drained bulk modulus must be positive");
   }
   const double v = props.biot_b * props.biot_b * mesh.cell_measure() / K;
   return CsrMatrix::diagonal(Vector(mesh.num_cells(), v));
}

CsrMatrix build_sk_algebraic(const DspSystem &sys)
{
   sys.check_shapes();
   const std::size_t m = sys.m();
   Vector sk(m);
   for (std::size_t i = 0; i < m; ++i)
   {
      auto c = sys.B.row_cols(i);
      auto v = sys.B.row_vals(i);
      std::vector<std::size_t> J;
      Vector r;
      for (std::size_t k = 0; k < c.size(); ++k)
      {
         if (v[k] != 0.0)
         {
            J.push_back(c[k]);
            r.push_back(v[k]);
         }
      }
      if (J.empty()) { throw ContractError(kModule, "rank error: row " + std::to_string(i) + " of B is empty"); }
      DenseMatrix Asub(J.size(), J.size());
      for (std::size_t a = 0; a < J.size(); ++a)
      {
         for (std::size_t b = 0; b < J.size(); ++b) { Asub(a, b) = sys.A.at(J[a], J[b]); }
      }
      DenseCholesky ch(Asub);
      Vector w = ch.half_solve(r, false);
      sk[i] = dot(w, w);
   }
   return CsrMatrix::diagonal(sk);
}

CsrMatrix build_s2(const DspSystem &sys, const CsrMatrix &sk)
{
   if (sk.rows() != sys.m() || sk.cols() != sys.m()) { throw DimensionError(kModule, "build_s2: S_K must be m x m"); }
   return add(sys.D, sk);
}

CsrMatrix build_xtilde(const DspSystem &sys, std::span<const double> s_inv)
{
   sys.check_shapes();
   if (s_inv.size() != sys.m()) { throw DimensionError(kModule, "build_xtilde: S^{-1} diagonal must have length m"); }
   return add(sys.E, multiply_scaled_transpose(sys.C, s_inv));
}

CsrMatrix build_xtilde(const DspSystem &sys, const InnerOperator &s_hat)
{
   auto d = s_hat.inverse_diagonal();
   if (!d) { throw UnsupportedError(kModule, "build_xtilde: explicit product needs a diagonal S-hat, got " + s_hat.describe()); }
   return build_xtilde(sys, *d);
}

DenseMatrix dense_schur_product(const CsrMatrix &B, const InnerOperator &a_hat)
{
   if (B.cols() != a_hat.size()) { throw DimensionError(kModule, "dense_schur_product: B columns differ from operator size"); }
   DenseMatrix W = dense_transpose_of(B);
   a_hat.half_solve(W);
   return symmetrized(matmul(W.transposed(), W));
}

SForm SchurRecipe::resolved_s_form() const
{
   if (s_form) { return *s_form; }
   return s_variant == SVariant::s1 ? SForm::ic0 : SForm::diag;
}

std::string SchurRecipe::id() const
{
   std::ostringstream os;
   switch (s_variant)
   {
   case SVariant::s1: os << "S1"; break;
   case SVariant::s2_physical: os << "S2phys"; break;
   case SVariant::s2_algebraic: os << "S2alg"; break;
   }
   os << "-" << to_string(resolved_s_form());
   if (omega != 1.0) { os << "-w" << omega; }
   os << "-X" << to_string(x_form) << "-A" << to_string(a_form);
   return os.str();
}

void SchurRecipe::validate() const
{
   if (!(omega > 0.0) || !std::isfinite(omega)) { throw ConfigError(kModule, "recipe.omega must be positive"); }
   if (a_form == AForm::inner_pcg && (!(a_pcg_tol > 0.0) || a_pcg_maxit == 0))
   {
      throw ConfigError(kModule, "recipe.a_pcg_tol and recipe.a_pcg_maxit must be positive");
   }
}

SchurRecipe recipe_s1(double omega)
{
   SchurRecipe r;
   r.s_variant = SVariant::s1;
   r.s_form = SForm::ic0;
   r.omega = omega;
   r.x_form = XForm::ic0;
   return r;
}

SchurRecipe recipe_s2()
{
   SchurRecipe r;
   r.s_variant = SVariant::s2_algebraic;
   r.s_form = SForm::diag;
   r.x_form = XForm::ic0;
   return r;
}

SchurRecipe recipe_exact()
{
   SchurRecipe r;
   r.a_form = AForm::exact_dense;
   r.s_variant = SVariant::s1;
   r.s_form = SForm::exact_dense;
   r.x_form = XForm::exact_dense;
   return r;
}

RealizedRecipe realize(const DspSystem &sys, const SchurRecipe &recipe, const MaterialProps &props)
{
   recipe.validate();
   sys.check_shapes();
   RealizedRecipe out;
   out.recipe = recipe;

   switch (recipe.a_form)
   {
   case AForm::ic0: out.a_hat = make_ic0(sys.A); break;
   case AForm::jacobi: out.a_hat = make_jacobi(sys.A); break;
   case AForm::exact_dense: out.a_hat = make_exact_dense(sys.A); break;
   case AForm::inner_pcg:
      out.a_hat = make_inner_pcg(sys.A, make_ic0(sys.A), recipe.a_pcg_tol, recipe.a_pcg_maxit);
      break;
   }

   const SForm sform = recipe.resolved_s_form();
   InnerPtr s_base;
   // Diagonal of the S-tilde matrix, used as S-hat proxy inside X-tilde.
   Vector proxy_diag;
   if (sform == SForm::exact_dense)
   {
      InnerPtr a_lin = linear_surrogate(out.a_hat);
      if (a_lin != out.a_hat) { out.note = "A-hat replaced by its linear surrogate " + a_lin->describe() + " in S-tilde"; }
      DenseMatrix S = add(DenseMatrix::from_sparse(sys.D), dense_schur_product(sys.B, *a_lin));
      proxy_diag.resize(S.rows());
      for (std::size_t i = 0; i < S.rows(); ++i) { proxy_diag[i] = S(i, i); }
      s_base = make_exact_dense(S);
   }
   else
   {
      CsrMatrix St;
      switch (recipe.s_variant)
      {
      case SVariant::s1: St = build_s1(sys); break;
      case SVariant::s2_physical:
      {
         if (sys.dim != 2 && sys.dim != 3)
         {
            throw ConfigError(kModule, "recipe.s_variant=s2-physical needs the mesh provenance of the system");
         }
         StructuredMesh mesh(sys.dim, sys.cells_per_side);
         CsrMatrix sk = build_sk_physical(mesh, props);
         if (sk.rows() != sys.m()) { throw DimensionError(kModule, "s2-physical: mesh cells differ from m"); }
         St = build_s2(sys, sk);
         break;
      }
      case SVariant::s2_algebraic: St = build_s2(sys, build_sk_algebraic(sys)); break;
      }
      proxy_diag = diagonal_of(St);
      s_base = sform == SForm::ic0 ? make_ic0(St) : make_jacobi(St);
   }
   out.s_hat = apply_omega(s_base, recipe.omega);

   if (recipe.x_form == XForm::exact_dense)
   {
      DenseMatrix X = add(DenseMatrix::from_sparse(sys.E), dense_schur_product(sys.C, *out.s_hat));
      out.x_hat = make_exact_dense(X);
   }
   else
   {
      Vector s_inv;
      if (auto d = out.s_hat->inverse_diagonal()) { s_inv = std::move(*d); }
      else
      {
         s_inv.resize(proxy_diag.size());
         for (std::size_t i = 0; i < s_inv.size(); ++i)
         {
            if (!(proxy_diag[i] > 0.0)) { throw ContractError(kModule, "degenerate diagonal in the S-tilde proxy at row " + std::to_string(i)); }
            s_inv[i] = recipe.omega / proxy_diag[i];
         }
      }
      CsrMatrix X = build_xtilde(sys, s_inv);
      out.x_hat = recipe.x_form == XForm::ic0 ? make_ic0(X) : make_jacobi(X);
   }
   return out;
}

std::string to_string(AForm f)
{
   switch (f)
   {
   case AForm::ic0: return "ic0";
   case AForm::jacobi: return "jacobi";
   case AForm::inner_pcg: return "inner-pcg";
   case AForm::exact_dense: return "exact-dense";
   }
   return "?";
}

std::string to_string(SVariant v)
{
   switch (v)
   {
   case SVariant::s1: return "s1";
   case SVariant::s2_physical: return "s2-physical";
   case SVariant::s2_algebraic: return "s2-algebraic";
   }
   return "?";
}

std::string to_string(SForm f)
{
   switch (f)
   {
   case SForm::ic0: return "ic0";
   case SForm::diag: return "diag";
   case SForm::exact_dense: return "exact-dense";
   }
   return "?";
}

std::string to_string(XForm f)
{
   switch (f)
   {
   case XForm::ic0: return "ic0";
   case XForm::diag: return "diag";
   case XForm::exact_dense: return "exact-dense";
   }
   return "?";
}

AForm parse_a_form(const std::string &s)
{
   if (s == "ic0") { return AForm::ic0; }
   if (s == "jacobi") { return AForm::jacobi; }
   if (s == "inner-pcg") { return AForm::inner_pcg; }
   if (s == "exact-dense") { return AForm::exact_dense; }
   throw ConfigError(kModule, "recipe.a_hat: unknown value '" + s + "'");
}

SVariant parse_s_variant(const std::string &s)
{
   if (s == "s1") { return SVariant::s1; }
   if (s == "s2-physical") { return SVariant::s2_physical; }
   if (s == "s2-algebraic" || s == "s2") { return SVariant::s2_algebraic; }
   throw ConfigError(kModule, "recipe.s_variant: unknown value '" + s + "'");
}

SForm parse_s_form(const std::string &s)
{
   if (s == "ic0") { return SForm::ic0; }
   if (s == "diag") { return SForm::diag; }
   if (s == "exact-dense") { return SForm::exact_dense; }
   throw ConfigError(kModule, "recipe.s_form: unknown value '" + s + "'");
}

XForm parse_x_form(const std::string &s)
{
   if (s == "ic0") { return XForm::ic0; }
   if (s == "diag") { return XForm::diag; }
   if (s == "exact-dense") { return XForm::exact_dense; }
   throw ConfigError(kModule, "recipe.x_form: unknown value '" + s + "'");
}

} // namespace biotdsp
