#pragma once

#include <array>
#include <cstddef>

namespace biotdsp
{

/// Homogeneous poroelastic material data and time step.
struct MaterialProps
{
   double dt = 1e-5;      ///< time step [s]
   double young = 1e5;    ///< Young's modulus [Pa]
   double poisson = 0.4;  ///< Poisson ratio [-]
   double biot_b = 1.0;   ///< Biot coefficient [-]
   double s_eps = 0.0;    ///< constrained specific storage [1/Pa]
   double kappa = 1e-7;   ///< isotropic permeability [m^2]
   double mu = 1e3;       ///< fluid viscosity [Pa s]

   /// Throws ConfigError naming the first violated bound.
   void validate() const;

   /// Lamé parameters (lambda, shear modulus).
   double lame_lambda() const;
   double lame_mu() const;
   /// Drained bulk modulus E / (3 (1 - 2 nu)).
   double drained_bulk_modulus() const;
};

/// Uniform tensor-product grid of the unit square (dim 2) or cube (dim 3).
///
/// Cells, nodes and faces are numbered lexicographically with the x index
/// running fastest. Faces normal to axis k carry index i_k in [0, N] and the
/// remaining indices in [0, N-1].
class StructuredMesh
{
public:
   using Index = std::array<std::size_t, 3>;

   /// Throws ConfigError unless dim is 2 or 3 and cells_per_side >= 1.
   StructuredMesh(int dim, std::size_t cells_per_side);

   int dim() const { return dim_; }
   std::size_t cells_per_side() const { return n_; }
   double h() const { return 1.0 / static_cast<double>(n_); }
   /// |Omega_i| = h^dim
   double cell_measure() const;
   /// Face measure h^(dim-1)
   double face_measure() const;

   std::size_t num_cells() const;
   std::size_t num_nodes() const;
   /// Faces normal to one axis: (N+1) N^(dim-1).
   std::size_t num_faces_per_axis() const;
   std::size_t num_faces() const { return static_cast<std::size_t>(dim_) * num_faces_per_axis(); }

   std::size_t cell_index(const Index &c) const;
   Index cell_coords(std::size_t cell) const;
   std::size_t node_index(const Index &v) const;
   Index node_coords(std::size_t node) const;
   /// Face normal to axis k at grid position f (f[k] in [0,N]).
   std::size_t face_index(int axis, const Index &f) const;

   /// Nodes of a cell in tensor order (bit k of the local index selects +1 along axis k).
   std::array<std::size_t, 8> cell_nodes(std::size_t cell) const;

private:
   int dim_;
   std::size_t n_;
};

} // namespace biotdsp
