#pragma once

#include "biotdsp/harness/config.hpp"
#include "biotdsp/krylov/krylov.hpp"
#include "biotdsp/spectral/spectrum.hpp"

#include <filesystem>
#include <iosfwd>
#include <memory>
#include <optional>
#include <string>
#include <vector>

namespace biotdsp
{

/// Sizes of one assembled system.
struct SizesRecord
{
   std::string discretization;
   int dim = 0;
   std::size_t cells = 0;
   std::size_t n = 0, m = 0, p = 0, N = 0, nnz = 0;
};

/// One solve: the SolveStats CSV row plus its context.
struct SolveRecord
{
   std::string recipe_id;
   double h = 0.0;
   int dim = 0;
   SolveStats stats;
};

/// Real and complex extent of one computed spectrum.
struct SpectrumSummary
{
   SpectrumMode mode = SpectrumMode::triangular;
   std::size_t num_real = 0;
   std::size_t num_complex = 0;
   /// Ranges of the negative and positive real eigenvalues; NaN when empty.
   Interval negative{NAN, NAN};
   Interval positive{NAN, NAN};
   /// max |lambda - 1| over complex eigenvalues (0 when none).
   double complex_radius = 0.0;
   bool verified = false;
   bool passed = false;
};

SpectrumSummary summarize(const PreconditionedSpectrum &spec, const BoundVerdict *verdict);

struct AnalysisResult
{
   AnalysisKind kind = AnalysisKind::none;
   BoundReport report;
   std::vector<PreconditionedSpectrum> spectra;
   std::vector<BoundVerdict> verdicts;
   std::vector<SpectrumSummary> summaries;

   /// False only when a verification ran and failed.
   bool passed() const;
};

/// Lazily assembled system, right-hand side and realized recipe of one config.
class Experiment
{
public:
   explicit Experiment(ExperimentConfig cfg);

   const ExperimentConfig &config() const { return cfg_; }
   const DspSystem &system();
   const Vector &x_true();
   const RealizedRecipe &realized();

   SizesRecord sizes();
   SolveRecord solve(SolverKind method);
   SolveRecord solve() { return solve(cfg_.solver); }
   /// none and indicators compute the bound report only; spectrum adds both
   /// dense spectra with their verdicts.
   AnalysisResult analyze(AnalysisKind kind);

private:
   ExperimentConfig cfg_;
   std::optional<DspSystem> sys_;
   Vector x_true_;
   std::optional<RealizedRecipe> realized_;
};

/// "method,recipe-id,h,dim,n_it,converged,rel_err,wall_time"
std::string results_csv_header();
std::string results_csv_row(const SolveRecord &r);

/// root/name/<UTC timestamp>, with a numeric suffix when it already exists.
std::filesystem::path make_run_dir(const std::filesystem::path &root, const std::string &name);

enum class Command
{
   assemble,
   solve,
   analyze,
   export_mm
};

/// Artifacts of one run directory.
struct RunArtifacts
{
   std::optional<SizesRecord> sizes;
   std::vector<SolveRecord> solves;
   std::optional<AnalysisResult> analysis;
};

/// Writes config.txt, sizes.csv, results.csv, convergence.csv,
/// bound_report.txt, bounds.csv, spectrum.csv, spectrum_summary.csv and
/// verdict.csv into dir. Files without content keep their header.
void write_artifacts(const std::filesystem::path &dir, const ExperimentConfig &cfg, const RunArtifacts &art);

/// Runs one subcommand and writes its artifacts into dir. solve also runs the
/// configured analysis; analyze defaults to bounds when analysis = none.
/// Returns 0, or 2 when a verification failed. Errors propagate.
int run_experiment(const ExperimentConfig &cfg, Command cmd, const std::filesystem::path &dir, std::ostream &log);

} // namespace biotdsp
