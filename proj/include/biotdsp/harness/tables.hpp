#pragma once

#include "biotdsp/harness/config.hpp"

#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

namespace biotdsp
{

enum class TableKind
{
   eigen_bounds,
   iterations,
   sizes,
   scalability
};

std::string to_string(TableKind t);
TableKind parse_table_kind(const std::string &s);

struct TableOutput
{
   std::string text;
   /// Missing runs or gaps; the table still lists what was found.
   std::vector<std::string> warnings;
};

/// Aligned text table from every run directory (one holding config.txt)
/// below results_dir. Missing values print as "--" and are listed in the
/// warnings; an empty directory gives the header only.
TableOutput emit_table(const std::filesystem::path &results_dir, TableKind which);

/// Preconditioner label of a recipe, e.g. "P(1)", "P_D(1,w)", "P(2)".
std::string recipe_label(const SchurRecipe &r, bool diagonal);

struct ReproduceOptions
{
   /// Cells per side; empty selects the table default (base h for
   /// eigen-bounds and iterations, {10, 20} for sizes and scalability).
   std::vector<std::size_t> cells;
};

/// Runs the experiments behind a table into one subdirectory each of dir,
/// then emits the table into dir/table.txt. Settings of base other than
/// discretization, h, recipe, solver and analysis carry over.
TableOutput reproduce_table(TableKind which, const ExperimentConfig &base, const std::filesystem::path &dir,
                            std::ostream &log, const ReproduceOptions &opts = {});

} // namespace biotdsp
