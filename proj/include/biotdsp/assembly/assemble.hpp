#pragma once

#include "biotdsp/assembly/dsp_system.hpp"
#include "biotdsp/assembly/mesh.hpp"
#include "biotdsp/sparse/dense.hpp"

#include <cstdint>
#include <filesystem>
#include <utility>

namespace biotdsp
{

/// Knobs that the discretization leaves open.
struct AssemblyOptions
{
   /// Jump-jump stabilization coefficient c_stab; a nonpositive value selects
   /// the default b^2 / K_dr.
   double stab_coefficient = 0.0;
   /// Uniform downward traction on the top face [Pa].
   double top_load = 1e4;
   /// Tolerance of the condensed-D SPSD check, relative to max|D|.
   double spsd_tol = 1e-10;
   /// Largest block size for which dense definiteness checks run.
   std::size_t dense_check_limit = 3000;
};

/// Three-field MFE blocks (Q1 displacement, RT0 velocity, P0 pressure).
///
/// Velocity unknowns: each cell owns the face on its upper side along every
/// axis, so p = dim * N^dim. Faces on the upper boundary carry the no-flow
/// condition as decoupled rows; faces on the lower boundary are not
/// unknowns. Displacement keeps every Q1 node; the clamped dofs are
/// decoupled rows holding their original diagonal.
struct MfeBlocks
{
   CsrMatrix A_uu, A_up, A_pu, A_pp, A_pq, A_qp, A_qq, A_stab;
   Vector b_u, b_p, b_q;
};

/// Four-field MHFE blocks before condensation.
///
/// Velocity w: 2*dim local dofs per cell with outward orientation, local
/// index 2k+s (axis k, s=1 for the upper face). Multipliers pi live on every
/// face of the grid.
struct MhfeBlocks
{
   CsrMatrix A_uu, A_up, A_pu, A_pp, A_stab, A_ww, A_wp, A_pw, A_wpi, A_piw;
   Vector b_u, b_p, b_pi;
};

/// Q1 elasticity contributions shared by both discretizations.
struct DisplacementBlocks
{
   CsrMatrix A_uu; ///< n x n, Dirichlet dofs decoupled
   CsrMatrix A_pu; ///< m x n, entry b * int chi div eta
   Vector b_u;
   std::vector<char> clamped; ///< per displacement dof
};

DisplacementBlocks assemble_displacement(const StructuredMesh &mesh, const MaterialProps &props,
                                         const AssemblyOptions &opt = {});

MfeBlocks assemble_mfe(const StructuredMesh &mesh, const MaterialProps &props,
                       const AssemblyOptions &opt = {});

/// Jump-jump penalty over 2x2(x2) macro-elements: for every pair of
/// face-adjacent cells inside a macro-element adds w (e_i - e_j)(e_i - e_j)^T
/// with w = c_stab * h^dim. Throws ConfigError for odd cells per side.
CsrMatrix assemble_stabilization(const StructuredMesh &mesh, const MaterialProps &props,
                                 const AssemblyOptions &opt = {});

/// A = A_uu, B = -A_pu, C = dt * A_qp (= -dt * A_pq^T), D = A_pp + A_stab,
/// E = dt * A_qq; rhs = (b_u, -b_p, dt * b_q).
DspSystem mfe_to_dsp(const MfeBlocks &blocks, const MaterialProps &props);

MhfeBlocks assemble_mhfe(const StructuredMesh &mesh, const MaterialProps &props,
                         const AssemblyOptions &opt = {});

/// Static condensation of w using per-element dense factorizations:
/// A = A_uu, B = -A_pu, C = dt A_piw A_ww^-1 A_wp,
/// D = A_pp + A_stab + dt A_pw A_ww^-1 A_pw^T, E = dt A_piw A_ww^-1 A_wpi.
/// Throws AssemblyError when D fails the SPSD check.
DspSystem condense_mhfe(const MhfeBlocks &blocks, const MaterialProps &props,
                        const AssemblyOptions &opt = {});

/// Local RT0 mass on a cell of side h: per axis (mu/kappa) h^dim
/// [[1/3, s/6], [s/6, 1/3]] with s = -1 for outward orientation and s = +1
/// for a common global orientation.
DenseMatrix rt0_local_mass(int dim, double h, double mu_over_kappa, bool outward);

/// Element matrices of Q1 elasticity on a cell of side h (2-point Gauss),
/// dof ordering node-major (node a, component k) -> dim*a + k.
DenseMatrix q1_local_stiffness(int dim, double h, const MaterialProps &props);
/// int_T div(eta_{a,k}) dx for every local dof.
Vector q1_local_divergence(int dim, double h);

/// x_true with entries uniform in [-1, 1]: u = -1 + 2 * (r >> 11) * 2^-53
/// from std::mt19937_64(seed). rhs = calA x_true.
struct ManufacturedRhs
{
   Vector rhs;
   Vector x_true;
};
ManufacturedRhs manufactured_rhs(const DspSystem &sys, std::uint64_t seed);
/// Variant with x_true = ones.
ManufacturedRhs ones_rhs(const DspSystem &sys);

/// Convenience front ends used by the harness.
enum class Discretization
{
   mfe2d,
   mfe3d,
   mhfe2d,
   mhfe3d
};
Discretization parse_discretization(const std::string &name);
std::string to_string(Discretization d);
int dimension_of(Discretization d);
DspSystem build_system(Discretization d, std::size_t cells_per_side, const MaterialProps &props,
                       const AssemblyOptions &opt = {});

/// Writes A.mtx ... E.mtx, rhs.vec and manifest.txt into dir.
void export_system(const DspSystem &sys, const MaterialProps &props,
                   const std::filesystem::path &dir);

} // namespace biotdsp
