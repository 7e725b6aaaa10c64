#pragma once

#include "biotdsp/assembly/dsp_system.hpp"
#include "biotdsp/assembly/mesh.hpp"
#include "biotdsp/schur/inner_operator.hpp"

#include <cstddef>
#include <optional>
#include <string>

namespace biotdsp
{

/// S1 = D + B diag(A)^{-1} B^T. Throws ContractError when diag(A) has a
/// nonpositive entry.
CsrMatrix build_s1(const DspSystem &sys);

/// Diagonal fixed-stress matrix with entries b^2 |Omega_i| / K_dr,
/// K_dr the drained bulk modulus. Throws ConfigError for K_dr <= 0.
CsrMatrix build_sk_physical(const StructuredMesh &mesh, const MaterialProps &props);

/// Diagonal fixed-stress matrix with entries r_i A_ii^{-1} r_i^T, r_i the
/// nonzero entries of row i of B and A_ii the matching principal subblock
/// of A. Throws ContractError for an empty row of B.
CsrMatrix build_sk_algebraic(const DspSystem &sys);

/// S2 = D + S_K
CsrMatrix build_s2(const DspSystem &sys, const CsrMatrix &sk);

/// X = E + C diag(s_inv) C^T
CsrMatrix build_xtilde(const DspSystem &sys, std::span<const double> s_inv);
/// X = E + C S^{-1} C^T for a diagonal S; throws UnsupportedError otherwise.
CsrMatrix build_xtilde(const DspSystem &sys, const InnerOperator &s_hat);

/// B A^{-1} B^T formed densely through the half factor of A.
DenseMatrix dense_schur_product(const CsrMatrix &B, const InnerOperator &a_hat);

enum class AForm
{
   ic0,
   jacobi,
   inner_pcg,
   exact_dense
};

enum class SVariant
{
   s1,
   s2_physical,
   s2_algebraic
};

/// How S-hat is realized from the chosen S-tilde variant. exact_dense
/// ignores the variant and uses D + B A^{-1} B^T with the actual A-hat.
enum class SForm
{
   ic0,
   diag,
   exact_dense
};

/// How X-hat is realized. ic0 and diag act on the explicit sparse
/// X = E + C diag^{-1} C^T (diagonal proxy for a non-diagonal S-hat);
/// exact_dense uses E + C S^{-1} C^T with the actual S-hat.
enum class XForm
{
   ic0,
   diag,
   exact_dense
};

struct SchurRecipe
{
   AForm a_form = AForm::ic0;
   double a_pcg_tol = 1e-2;
   std::size_t a_pcg_maxit = 50;
   SVariant s_variant = SVariant::s2_algebraic;
   /// Defaults to ic0 for S1 and diag for S2.
   std::optional<SForm> s_form;
   double omega = 1.0;
   XForm x_form = XForm::ic0;

   SForm resolved_s_form() const;
   /// Short identifier, e.g. "S1-ic0-w0.1".
   std::string id() const;
   /// Throws ConfigError on invalid fields.
   void validate() const;
};

SchurRecipe recipe_s1(double omega = 1.0);
SchurRecipe recipe_s2();
/// Fully exact inner operators (A-hat = A, S-hat = S-tilde, X-hat = X-tilde).
SchurRecipe recipe_exact();

struct RealizedRecipe
{
   SchurRecipe recipe;
   InnerPtr a_hat, s_hat, x_hat;
   /// Non-empty when a nonlinear A-hat was replaced by its linear
   /// surrogate inside the S-hat construction.
   std::string note;
};

/// Builds A-hat, S-hat, X-hat for sys. The physical S_K needs the mesh
/// provenance of sys (dim, cells_per_side) and props.
RealizedRecipe realize(const DspSystem &sys, const SchurRecipe &recipe, const MaterialProps &props);

std::string to_string(AForm f);
std::string to_string(SVariant v);
std::string to_string(SForm f);
std::string to_string(XForm f);
AForm parse_a_form(const std::string &s);
SVariant parse_s_variant(const std::string &s);
SForm parse_s_form(const std::string &s);
XForm parse_x_form(const std::string &s);

} // namespace biotdsp
