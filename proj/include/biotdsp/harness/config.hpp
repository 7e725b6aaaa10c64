#pragma once

#include "biotdsp/assembly/assemble.hpp"
#include "biotdsp/schur/schur.hpp"

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>

namespace biotdsp
{

enum class SolverKind
{
   gmres,
   minres,
   pcg_block11
};

enum class RhsMode
{
   manufactured,
   ones
};

enum class AnalysisKind
{
   none,
   indicators,
   bounds,
   spectrum,
   verify
};

std::string to_string(SolverKind s);
std::string to_string(RhsMode r);
std::string to_string(AnalysisKind a);
SolverKind parse_solver(const std::string &s);
RhsMode parse_rhs_mode(const std::string &s);
AnalysisKind parse_analysis(const std::string &s);

/// One experiment: discretization, material data, recipe, solver and analysis.
struct ExperimentConfig
{
   std::string name = "experiment";
   Discretization discretization = Discretization::mfe2d;
   std::size_t cells_per_side = 10;
   MaterialProps props;
   AssemblyOptions assembly;
   SchurRecipe recipe = recipe_s1();
   SolverKind solver = SolverKind::gmres;
   /// Unset: 1e-13 for GMRES, 1e-10 otherwise.
   std::optional<double> tol;
   /// 0: min(N, 2000).
   std::size_t maxit = 0;
   /// GMRES restart length, 0 for full GMRES.
   std::size_t restart = 0;
   RhsMode rhs_mode = RhsMode::manufactured;
   std::uint64_t seed = 1;
   AnalysisKind analysis = AnalysisKind::none;
   std::size_t max_dense_n = 9000;

   double h() const { return 1.0 / static_cast<double>(cells_per_side); }
   double effective_tol() const;
   /// Throws ConfigError on inconsistent fields.
   void validate() const;
};

/// Applies one dotted key; throws ConfigError naming the key on an unknown
/// key or an invalid value.
void apply_setting(ExperimentConfig &cfg, const std::string &key, const std::string &value);

/// Flat "key = value" text; '#' starts a comment. recipe.preset is applied
/// before the other recipe keys regardless of its position. Throws
/// ParseError with the line number on malformed lines, unknown keys and
/// invalid values.
ExperimentConfig parse_config(std::istream &in, ExperimentConfig base = {});
ExperimentConfig parse_config_text(const std::string &text, ExperimentConfig base = {});
ExperimentConfig load_config(const std::filesystem::path &file, ExperimentConfig base = {});

/// Canonical key = value listing that parses back to the same config.
std::string config_echo(const ExperimentConfig &cfg);

} // namespace biotdsp
