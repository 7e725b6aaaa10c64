#include "biotdsp/assembly/mesh.hpp"

#include "biotdsp/errors.hpp"

#include <cmath>
#include <string>

namespace biotdsp
{

namespace
{
const char *kModule = "biot-assembly";

std::size_t ipow(std::size_t b, int e)
{
   std::size_t r = 1;
   for (int i = 0; i < e; ++i) { r *= b; }
   return r;
}
} // namespace

void MaterialProps::validate() const
{
   auto fail = [](const std::string &what) { throw ConfigError(kModule, what); };
   if (!(dt > 0.0)) { fail("props.dt must be > 0"); }
   if (!(young > 0.0)) { fail("props.young must be > 0"); }
   if (!(poisson >= 0.0 && poisson < 0.5)) { fail("props.poisson must lie in [0, 0.5)"); }
   if (!(biot_b > 0.0 && biot_b <= 1.0)) { fail("props.biot_b must lie in (0, 1]"); }
   if (!(s_eps >= 0.0)) { fail("props.s_eps must be >= 0"); }
   if (!(kappa > 0.0)) { fail("props.kappa must be > 0"); }
   if (!(mu > 0.0)) { fail("props.mu must be > 0"); }
}

double MaterialProps::lame_lambda() const
{
   return young * poisson / ((1.0 + poisson) * (1.0 - 2.0 * poisson));
}

double MaterialProps::lame_mu() const
{
   return young / (2.0 * (1.0 + poisson));
}

double MaterialProps::drained_bulk_modulus() const
{
   return young / (3.0 * (1.0 - 2.0 * poisson));
}

StructuredMesh::StructuredMesh(int dim, std::size_t cells_per_side) : dim_(dim), n_(cells_per_side)
{
   if (dim != 2 && dim != 3)
   {
      throw ConfigError(kModule, "unsupported dimension " + std::to_string(dim));
   }
   if (cells_per_side == 0) { throw ConfigError(kModule, "cells per side must be >= 1"); }
}

double StructuredMesh::cell_measure() const
{
   return std::pow(h(), dim_);
}

double StructuredMesh::face_measure() const
{
   return std::pow(h(), dim_ - 1);
}

std::size_t StructuredMesh::num_cells() const
{
   return ipow(n_, dim_);
}

std::size_t StructuredMesh::num_nodes() const
{
   return ipow(n_ + 1, dim_);
}

std::size_t StructuredMesh::num_faces_per_axis() const
{
   return (n_ + 1) * ipow(n_, dim_ - 1);
}

std::size_t StructuredMesh::cell_index(const Index &c) const
{
   std::size_t idx = 0;
   for (int k = dim_ - 1; k >= 0; --k) { idx = idx * n_ + c[k]; }
   return idx;
}

StructuredMesh::Index StructuredMesh::cell_coords(std::size_t cell) const
{
   Index c{0, 0, 0};
   for (int k = 0; k < dim_; ++k)
   {
      c[k] = cell % n_;
      cell /= n_;
   }
   return c;
}

std::size_t StructuredMesh::node_index(const Index &v) const
{
   std::size_t idx = 0;
   for (int k = dim_ - 1; k >= 0; --k) { idx = idx * (n_ + 1) + v[k]; }
   return idx;
}

StructuredMesh::Index StructuredMesh::node_coords(std::size_t node) const
{
   Index v{0, 0, 0};
   for (int k = 0; k < dim_; ++k)
   {
      v[k] = node % (n_ + 1);
      node /= (n_ + 1);
   }
   return v;
}

std::size_t StructuredMesh::face_index(int axis, const Index &f) const
{
   std::size_t idx = 0;
   for (int k = dim_ - 1; k >= 0; --k)
   {
      const std::size_t extent = (k == axis) ? n_ + 1 : n_;
      idx = idx * extent + f[k];
   }
   return static_cast<std::size_t>(axis) * num_faces_per_axis() + idx;
}

std::array<std::size_t, 8> StructuredMesh::cell_nodes(std::size_t cell) const
{
   std::array<std::size_t, 8> nodes{};
   const Index c = cell_coords(cell);
   const int nloc = 1 << dim_;
   for (int a = 0; a < nloc; ++a)
   {
      Index v = c;
      for (int k = 0; k < dim_; ++k) { v[k] += (a >> k) & 1; }
      nodes[a] = node_index(v);
   }
   return nodes;
}

} // namespace biotdsp
