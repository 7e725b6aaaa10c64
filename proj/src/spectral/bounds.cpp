#include "biotdsp/spectral/bounds.hpp"

#include "biotdsp/errors.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <sstream>

namespace biotdsp
{

namespace
{
const char *kModule = "spectral";

std::string fmt(double v)
{
   char buf[32];
   std::snprintf(buf, sizeof buf, "%.4e", v);
   return buf;
}

std::string fmt_interval(const Interval &I)
{
   return "[" + fmt(I.min) + ", " + fmt(I.max) + "]";
}
} // namespace

CubicCoefficients triangular_cubic(const IndicatorPoint &g)
{
   CubicCoefficients c;
   c.a2 = g.X + g.S + g.A;
   c.a1 = g.A * g.X + g.K + g.E * g.S + g.D * g.A + g.R;
   c.a0 = g.A * g.K + g.E * g.A * g.D + g.E * g.R;
   return c;
}

CubicCoefficients diagonal_cubic(const IndicatorPoint &g)
{
   CubicCoefficients c;
   c.diagonal_form = true;
   c.a2 = g.A + g.E - g.D;
   c.a1 = g.R + g.K + g.E * g.D + g.A * g.D - g.E * g.A;
   c.a0 = g.A * g.K + g.E * g.R + g.E * g.A * g.D;
   return c;
}

std::pair<double, double> cubic_bracket(double a2, double a1, double a0)
{
   if (!(a2 > 0.0) || !(a1 > 0.0) || !(a0 > 0.0))
   {
      throw ContractError(kModule, "cubic_bracket: coefficients must be positive");
   }
   const double r = a0 / a1;
   return {std::min(a2, r), std::max(a2, r)};
}

TriangularRealBounds triangular_real_bounds(const IndicatorSet &ind)
{
   TriangularRealBounds b;
   const double q = ind.R.min / (ind.A.max + ind.R.min + ind.D.max);
   b.lo = std::min({ind.E.min, ind.A.min, q});
   b.hi = ind.A.max + ind.S.max + ind.X.max;
   b.exclusion = {std::min(ind.A.min, q), ind.A.max + ind.S.max};
   return b;
}

ComplexDisc triangular_complex_disc(const IndicatorSet &ind)
{
   ComplexDisc d;
   if (ind.D.min >= 1.0)
   {
      d.all_real = true;
      return d;
   }
   d.radius = std::sqrt(1.0 - std::max(0.0, ind.D.min));
   return d;
}

double rho_lower(const IndicatorSet &ind, double x2, double y2, double z2)
{
   const double den = y2 + ind.E.min * z2;
   return (ind.A.min * x2 + ind.D.min * y2 + ind.E.min * z2) / den;
}

DiagonalBounds diagonal_bounds(const IndicatorSet &ind)
{
   DiagonalBounds b;
   const double rk = std::sqrt(ind.R.max + ind.K.max);
   b.minus = {-ind.D.max - rk, -ind.S.min / (ind.A.max + ind.S.min)};
   b.plus.min = std::min(ind.E.min, ind.A.min);
   b.plus.max = std::max(ind.A.max + ind.E.max + rk,
                         std::sqrt(ind.R.max + ind.K.max + ind.D.max * (ind.E.max + ind.A.max)));
   return b;
}

BoundReport make_bound_report(const IndicatorSet &ind, std::string provenance, std::string recipe)
{
   BoundReport r;
   r.indicators = ind;
   r.triangular = triangular_real_bounds(ind);
   r.disc = triangular_complex_disc(ind);
   r.diagonal = diagonal_bounds(ind);
   r.provenance = std::move(provenance);
   r.recipe = std::move(recipe);
   r.note = ind.note;
   return r;
}

std::string bound_report_text(const BoundReport &r)
{
   std::ostringstream os;
   os << "provenance: " << r.provenance << "\n";
   os << "recipe:     " << r.recipe << "\n";
   if (!r.note.empty()) { os << "note:       " << r.note << "\n"; }
   const IndicatorSet &g = r.indicators;
   os << "\nindicator  interval\n";
   os << "I_A        " << fmt_interval(g.A) << "\n";
   os << "I_S        " << fmt_interval(g.S) << "\n";
   os << "I_R        " << fmt_interval(g.R) << "\n";
   os << "I_D        " << fmt_interval(g.D) << "\n";
   os << "I_X        " << fmt_interval(g.X) << "\n";
   os << "I_K        " << fmt_interval(g.K) << "\n";
   os << "I_E        " << fmt_interval(g.E) << "\n";
   os << "\npreconditioner  bounds\n";
   os << "triangular      [" << fmt(r.triangular.lo) << ", " << fmt(r.triangular.hi) << "]"
      << "  window " << fmt_interval(r.triangular.exclusion) << "\n";
   if (r.disc.all_real) { os << "complex disc    all real\n"; }
   else { os << "complex disc    |lambda-1| <= " << fmt(r.disc.radius) << "\n"; }
   os << "diagonal        " << fmt_interval(r.diagonal.minus) << " U " << fmt_interval(r.diagonal.plus) << "\n";
   return os.str();
}

} // namespace biotdsp
