#include "biotdsp/errors.hpp"
#include "biotdsp/harness/config.hpp"
#include "biotdsp/harness/experiment.hpp"
#include "biotdsp/harness/tables.hpp"

#include <CLI11.hpp>

#include <iostream>
#include <optional>
#include <string>
#include <vector>

using namespace biotdsp;

namespace
{

struct GlobalOptions
{
   std::string config;
   std::string out = "out";
   std::optional<std::uint64_t> seed;
   std::optional<std::size_t> max_dense_n;
   std::vector<std::string> settings;
};

ExperimentConfig build_config(const GlobalOptions &g)
{
   ExperimentConfig cfg = g.config.empty() ? ExperimentConfig{} : load_config(g.config);
   for (const std::string &kv : g.settings)
   {
      const auto eq = kv.find('=');
      if (eq == std::string::npos) { throw ConfigError("cli-harness", "--set expects key=value, got '" + kv + "'"); }
      apply_setting(cfg, kv.substr(0, eq), kv.substr(eq + 1));
   }
   if (g.seed) { cfg.seed = *g.seed; }
   if (g.max_dense_n) { cfg.max_dense_n = *g.max_dense_n; }
   cfg.validate();
   return cfg;
}

void report_error(const Error &e, const std::optional<ExperimentConfig> &cfg, const GlobalOptions &g)
{
   std::cerr << "error: " << e.what() << "\n";
   if (cfg) { std::cerr << "config:\n" << config_echo(*cfg); }
   else if (!g.config.empty()) { std::cerr << "config file: " << g.config << "\n"; }
}

void print_table(const TableOutput &t)
{
   std::cout << t.text;
   for (const auto &w : t.warnings) { std::cerr << "warning: " << w << "\n"; }
}

} // namespace

int main(int argc, char **argv)
{
   CLI::App app{"Block preconditioners for double saddle-point poroelasticity systems"};
   app.require_subcommand(1);
   GlobalOptions g;
   app.add_option("--config", g.config, "Experiment config file (key = value)")->check(CLI::ExistingFile);
   app.add_option("--out", g.out, "Output root; runs go to <out>/<name>/<UTC timestamp>");
   app.add_option("--seed", g.seed, "Seed of the manufactured right-hand side");
   app.add_option("--max-dense-n", g.max_dense_n, "Largest N for dense spectra");
   app.add_option("--set", g.settings, "Override one config key (key=value), repeatable");

   auto *assemble = app.add_subcommand("assemble", "Assemble the system and write sizes.csv");
   auto *solve = app.add_subcommand("solve", "Solve with the configured Krylov method");
   auto *analyze = app.add_subcommand("analyze", "Indicators, bounds, spectra or verification");
   auto *export_mm = app.add_subcommand("export-mm", "Write the system blocks in Matrix Market format");

   auto *reproduce = app.add_subcommand("reproduce", "Run every experiment behind a table and emit it");
   std::string table_id;
   std::vector<std::size_t> cells;
   reproduce->add_option("table-id", table_id, "eigen-bounds, iterations, sizes or scalability")->required();
   reproduce->add_option("--cells", cells, "Cells per side (overrides the table default)");

   auto *emit = app.add_subcommand("emit-table", "Emit a table from existing run directories");
   std::string results_dir, emit_id;
   emit->add_option("results-dir", results_dir, "Directory searched for run directories")->required();
   emit->add_option("table-id", emit_id, "eigen-bounds, iterations, sizes or scalability")->required();

   for (auto *sub : {assemble, solve, analyze, export_mm, reproduce, emit}) { sub->fallthrough(); }

   CLI11_PARSE(app, argc, argv);

   std::optional<ExperimentConfig> cfg;
   try
   {
      if (emit->parsed())
      {
         print_table(emit_table(results_dir, parse_table_kind(emit_id)));
         return 0;
      }
      cfg = build_config(g);
      std::cerr << "cli-harness: config\n" << config_echo(*cfg);
      if (reproduce->parsed())
      {
         const TableKind kind = parse_table_kind(table_id);
         const auto dir = make_run_dir(g.out, "reproduce-" + table_id);
         ReproduceOptions opts;
         opts.cells = cells;
         const TableOutput t = reproduce_table(kind, *cfg, dir, std::cerr, opts);
         print_table(t);
         std::cerr << "output: " << dir.string() << "\n";
         for (const auto &w : t.warnings)
         {
            if (w.rfind("verification failed", 0) == 0) { return 2; }
         }
         return 0;
      }
      Command cmd = Command::assemble;
      if (solve->parsed()) { cmd = Command::solve; }
      else if (analyze->parsed()) { cmd = Command::analyze; }
      else if (export_mm->parsed()) { cmd = Command::export_mm; }
      const auto dir = make_run_dir(g.out, cfg->name);
      const int code = run_experiment(*cfg, cmd, dir, std::cerr);
      std::cerr << "output: " << dir.string() << "\n";
      return code;
   }
   catch (const Error &e)
   {
      report_error(e, cfg, g);
      return 1;
   }
   catch (const std::exception &e)
   {
      std::cerr << "error [cli-harness]: " << e.what() << "\n";
      if (cfg) { std::cerr << "config:\n" << config_echo(*cfg); }
      return 1;
   }
}
