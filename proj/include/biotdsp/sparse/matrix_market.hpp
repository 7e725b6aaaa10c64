#pragma once

#include "biotdsp/sparse/csr_matrix.hpp"

#include <filesystem>
#include <iosfwd>

namespace biotdsp
{

/// Reads a real coordinate Matrix Market matrix (general or symmetric).
/// Symmetric files are expanded to full storage. Throws ParseError with the
/// offending line number on malformed input.
CsrMatrix mm_read(std::istream &in);
CsrMatrix mm_read(const std::filesystem::path &path);

/// Writes M as coordinate real general (or symmetric, lower triangle only)
/// with 17 significant digits, so that mm_read reproduces M bit-exactly.
void mm_write(const CsrMatrix &M, std::ostream &out, bool as_symmetric = false);
void mm_write(const CsrMatrix &M, const std::filesystem::path &path, bool as_symmetric = false);

/// Dense column vector in Matrix Market array format.
Vector mm_read_vector(std::istream &in);
Vector mm_read_vector(const std::filesystem::path &path);
void mm_write_vector(std::span<const double> v, std::ostream &out);
void mm_write_vector(std::span<const double> v, const std::filesystem::path &path);

} // namespace biotdsp
