#pragma once

#include "biotdsp/spectral/indicators.hpp"

#include <string>
#include <utility>

namespace biotdsp
{

/// Coefficients of the eigenvalue cubic. Triangular form:
/// p(x) = x^3 - a2 x^2 + a1 x - a0; block diagonal form:
/// pi(x) = x^3 - a2 x^2 - a1 x + a0.
struct CubicCoefficients
{
   double a2 = 0.0;
   double a1 = 0.0;
   double a0 = 0.0;
   bool diagonal_form = false;

   double eval(double x) const
   {
      return diagonal_form ? ((x - a2) * x - a1) * x + a0 : ((x - a2) * x + a1) * x - a0;
   }
};

/// Pointwise indicator values (one sample of each gamma).
struct IndicatorPoint
{
   double A = 1.0, S = 1.0, X = 1.0, D = 0.0, E = 1.0, R = 1.0, K = 0.0;
};

/// Triangular case: a2 = gX + gS + gA, a1 = gA gX + gK + gE gS + gD gA + gR,
/// a0 = gA gK + gE gA gD + gE gR.
CubicCoefficients triangular_cubic(const IndicatorPoint &g);
/// Block diagonal case: a2 = gA + gE - gD, a1 = gR + gK + gE gD + gA gD - gE gA,
/// a0 = gA gK + gE gR + gE gA gD.
CubicCoefficients diagonal_cubic(const IndicatorPoint &g);

/// (alpha, beta) with alpha = min{a2, a0/a1}, beta = max{a2, a0/a1}: the
/// cubic is negative on (0, alpha) and positive beyond beta. Throws
/// ContractError unless a0, a1, a2 > 0.
std::pair<double, double> cubic_bracket(double a2, double a1, double a0);

struct TriangularRealBounds
{
   double lo = 0.0;
   double hi = 0.0;
   /// Hypothesis window of the real-eigenvalue bound; real eigenvalues
   /// inside it are exempt from [lo, hi].
   Interval exclusion;
};

/// lo = min{gE_min, gA_min, gR_min / (gA_max + gR_min + gD_max)},
/// hi = gA_max + gS_max + gX_max,
/// window = [min{gA_min, gR_min / (gA_max + gR_min + gD_max)}, gA_max + gS_max].
TriangularRealBounds triangular_real_bounds(const IndicatorSet &ind);

struct ComplexDisc
{
   /// gD_min >= 1: no complex eigenvalues are possible.
   bool all_real = false;
   /// sqrt(1 - gD_min), centre (1, 0).
   double radius = 0.0;
};

ComplexDisc triangular_complex_disc(const IndicatorSet &ind);

/// rho = (gA_min |x|^2 + gD_min |y|^2 + gE_min |z|^2) / (|y|^2 + gE_min |z|^2)
/// from squared block norms of an eigenvector in the scaled coordinates.
double rho_lower(const IndicatorSet &ind, double x2, double y2, double z2);

struct DiagonalBounds
{
   Interval minus;
   Interval plus;
};

/// I- = [-gD_max - sqrt(gR_max + gK_max), -gS_min / (gA_max + gS_min)],
/// I+ = [min{gE_min, gA_min},
///       max{gA_max + gE_max + sqrt(gK_max + gR_max),
///           sqrt(gR_max + gK_max + gD_max (gE_max + gA_max))}].
DiagonalBounds diagonal_bounds(const IndicatorSet &ind);

/// Indicator set, bounds and provenance for one (system, recipe) pair.
struct BoundReport
{
   IndicatorSet indicators;
   TriangularRealBounds triangular;
   ComplexDisc disc;
   DiagonalBounds diagonal;
   std::string provenance;
   std::string recipe;
   std::string note;
};

BoundReport make_bound_report(const IndicatorSet &ind, std::string provenance = {},
                              std::string recipe = {});

/// Human-readable indicator list and bound table.
std::string bound_report_text(const BoundReport &r);

} // namespace biotdsp
