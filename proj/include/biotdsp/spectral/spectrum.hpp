#pragma once

#include "biotdsp/assembly/dsp_system.hpp"
#include "biotdsp/schur/inner_operator.hpp"
#include "biotdsp/spectral/bounds.hpp"

#include <array>
#include <complex>
#include <cstddef>
#include <string>
#include <vector>

namespace biotdsp
{

enum class SpectrumMode
{
   triangular,
   diagonal
};

std::string to_string(SpectrumMode m);

struct SpectrumOptions
{
   /// Refuse dense spectra above this size.
   std::size_t max_dense_n = 9000;
   /// Eigenvectors (for the per-eigenvector rho check) only up to this size.
   std::size_t max_vector_n = 2500;
   bool want_vectors = true;
};

struct PreconditionedSpectrum
{
   SpectrumMode mode = SpectrumMode::triangular;
   std::vector<std::complex<double>> values;
   /// Squared block norms (|x|^2, |y|^2, |z|^2) of each eigenvector in the
   /// scaled coordinates w = L^T P^{-1} u; empty when vectors were not computed.
   std::vector<std::array<double, 3>> block_norms;
   std::string provenance;
};

/// Complex classification |Im| > 1e-8 max(1, |lambda|).
bool is_complex_eigenvalue(std::complex<double> v);

/// Eigenvalues of A P^{-1} from its dense image; desk scale.
std::vector<std::complex<double>> preconditioned_eigenvalues(const LinearOperator &A,
                                                             const LinearOperator &Pinv);

/// Full spectrum of calA P^{-1} (triangular) or calA P_D^{-1} (diagonal,
/// via the similar symmetric matrix L^{-1} calA L^{-T}). Nonlinear inner
/// operators are replaced by their linear surrogates. Throws
/// UnsupportedError when N exceeds opts.max_dense_n.
PreconditionedSpectrum full_spectrum(const DspSystem &sys, const InnerPtr &a_hat, const InnerPtr &s_hat,
                                     const InnerPtr &x_hat, SpectrumMode mode,
                                     const SpectrumOptions &opts = {}, std::string provenance = {});

struct CheckResult
{
   std::string name;
   bool applicable = true;
   bool passed = true;
   std::size_t checked = 0;
   /// Eigenvalues exempt from the check (inside the exclusion window).
   std::size_t exempt = 0;
   /// Largest violation beyond the slack (0 when passed).
   double worst_excess = 0.0;
   std::complex<double> worst_value{0.0, 0.0};
   std::string detail;
};

struct BoundVerdict
{
   std::vector<CheckResult> checks;
   std::size_t num_real = 0;
   std::size_t num_complex = 0;

   bool passed() const;
};

/// Containment checks of a computed spectrum against the bounds:
///   complex-disc       |lambda - 1| <= radius for complex eigenvalues
///   real-interval      real eigenvalues outside the window lie in [lo, hi]
///   complex-real-part  Re lambda >= rho / 2 with the per-eigenvector rho
///   diagonal-intervals every eigenvalue in I- U I+
/// Triangular spectra run the first three, diagonal spectra the last.
/// Throws ConfigError when both provenances are set and differ.
BoundVerdict verify_bounds(const PreconditionedSpectrum &spec, const BoundReport &report,
                           double slack = 1e-8);

/// "re,im,class" rows with class real or complex.
std::string spectrum_csv(const PreconditionedSpectrum &spec);
/// One row per check.
std::string verdict_csv(const BoundVerdict &v);
/// Aligned text table of the checks.
std::string verdict_text(const BoundVerdict &v);

} // namespace biotdsp
