#include "biotdsp/harness/tables.hpp"

#include "biotdsp/errors.hpp"
#include "biotdsp/harness/csv.hpp"
#include "biotdsp/harness/experiment.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <ostream>
#include <sstream>

namespace biotdsp
{

namespace
{
const char *kModule = "cli-harness";
const std::string kGap = "--";

struct Run
{
   std::filesystem::path dir;
   ExperimentConfig cfg;
   CsvTable results, sizes, bounds, summary;
};

CsvTable read_if_present(const std::filesystem::path &file)
{
   if (!std::filesystem::exists(file)) { return {}; }
   return read_csv(file);
}

int disc_rank(Discretization d)
{
   switch (d)
   {
   case Discretization::mfe2d: return 0;
   case Discretization::mfe3d: return 1;
   case Discretization::mhfe2d: return 2;
   case Discretization::mhfe3d: return 3;
   }
   return 4;
}

int recipe_rank(const SchurRecipe &r)
{
   if (r.s_variant == SVariant::s1) { return r.omega == 1.0 ? 0 : 1; }
   return 2;
}

std::vector<Run> collect_runs(const std::filesystem::path &root)
{
   std::vector<Run> runs;
   if (!std::filesystem::is_directory(root)) { return runs; }
   for (const auto &entry : std::filesystem::recursive_directory_iterator(root))
   {
      if (!entry.is_regular_file() || entry.path().filename() != "config.txt") { continue; }
      Run r;
      r.dir = entry.path().parent_path();
      r.cfg = load_config(entry.path());
      r.results = read_if_present(r.dir / "results.csv");
      r.sizes = read_if_present(r.dir / "sizes.csv");
      r.bounds = read_if_present(r.dir / "bounds.csv");
      r.summary = read_if_present(r.dir / "spectrum_summary.csv");
      runs.push_back(std::move(r));
   }
   std::sort(runs.begin(), runs.end(), [](const Run &a, const Run &b) {
      const auto ka = std::make_tuple(disc_rank(a.cfg.discretization), a.cfg.cells_per_side, recipe_rank(a.cfg.recipe),
                                      static_cast<int>(a.cfg.recipe.a_form), a.dir.string());
      const auto kb = std::make_tuple(disc_rank(b.cfg.discretization), b.cfg.cells_per_side, recipe_rank(b.cfg.recipe),
                                      static_cast<int>(b.cfg.recipe.a_form), b.dir.string());
      return ka < kb;
   });
   return runs;
}

std::string disc_label(Discretization d)
{
   switch (d)
   {
   case Discretization::mfe2d: return "MFE";
   case Discretization::mfe3d: return "MFE-3D";
   case Discretization::mhfe2d: return "MHFE";
   case Discretization::mhfe3d: return "MHFE-3D";
   }
   return "?";
}

/// 4 significant decimals; scientific below 1e-2.
std::string fmt4(const std::string &field)
{
   if (field.empty()) { return kGap; }
   const double v = std::stod(field);
   char buf[40];
   if (v != 0.0 && std::abs(v) < 1e-2) { std::snprintf(buf, sizeof buf, "%.4e", v); }
   else { std::snprintf(buf, sizeof buf, "%.4f", v); }
   return buf;
}

std::string interval(const std::string &lo, const std::string &hi)
{
   return "[" + fmt4(lo) + ", " + fmt4(hi) + "]";
}

std::string seconds(const std::string &field)
{
   if (field.empty()) { return kGap; }
   char buf[32];
   std::snprintf(buf, sizeof buf, "%.2f", std::stod(field));
   return buf;
}

std::string sci2(const std::string &field)
{
   if (field.empty()) { return kGap; }
   char buf[32];
   std::snprintf(buf, sizeof buf, "%.2e", std::stod(field));
   return buf;
}

/// Column-aligned rendering with " | " separators; numbers right-aligned.
std::string render(const std::vector<std::string> &header, const std::vector<std::vector<std::string>> &rows)
{
   std::vector<std::size_t> w(header.size(), 0);
   for (std::size_t c = 0; c < header.size(); ++c) { w[c] = header[c].size(); }
   for (const auto &r : rows)
   {
      for (std::size_t c = 0; c < r.size() && c < w.size(); ++c) { w[c] = std::max(w[c], r[c].size()); }
   }
   auto numeric = [](const std::string &s) {
      return !s.empty() && s.find_first_not_of("0123456789.e+-*") == std::string::npos;
   };
   auto line = [&](const std::vector<std::string> &r) {
      std::string out;
      for (std::size_t c = 0; c < w.size(); ++c)
      {
         const std::string cell = c < r.size() ? r[c] : "";
         const std::string pad(w[c] - cell.size(), ' ');
         if (c > 0) { out += " | "; }
         out += numeric(cell) ? pad + cell : cell + pad;
      }
      while (!out.empty() && out.back() == ' ') { out.pop_back(); }
      return out + "\n";
   };
   std::vector<std::string> head = header;
   for (std::size_t c = 0; c < head.size() && !rows.empty(); ++c)
   {
      if (c < rows.front().size() && numeric(rows.front()[c]))
      {
         head[c] = std::string(w[c] - head[c].size(), ' ') + head[c];
      }
   }
   std::string text = line(head);
   std::size_t total = 0;
   for (std::size_t c = 0; c < w.size(); ++c) { total += w[c] + (c > 0 ? 3 : 0); }
   text += std::string(total, '-') + "\n";
   for (const auto &r : rows) { text += line(r); }
   return text;
}

/// First results row of a run for one method; -1 when absent.
long find_method(const Run &r, const std::string &method)
{
   for (std::size_t i = 0; i < r.results.rows.size(); ++i)
   {
      if (r.results.get(i, "method") == method) { return static_cast<long>(i); }
   }
   return -1;
}

std::string run_name(const Run &r)
{
   return (r.dir.parent_path().filename() / r.dir.filename()).string();
}

TableOutput eigen_bounds_table(const std::vector<Run> &runs)
{
   TableOutput out;
   std::vector<std::vector<std::string>> rows;
   for (const Run &r : runs)
   {
      if (r.bounds.rows.empty()) { continue; }
      const std::string disc = disc_label(r.cfg.discretization);
      auto get = [&](const char *k) { return r.bounds.get(0, k); };
      long tri = -1, dia = -1;
      for (std::size_t i = 0; i < r.summary.rows.size(); ++i)
      {
         if (r.summary.get(i, "mode") == "triangular") { tri = static_cast<long>(i); }
         if (r.summary.get(i, "mode") == "diagonal") { dia = static_cast<long>(i); }
      }
      if (tri < 0 || dia < 0) { out.warnings.push_back("no spectrum for run " + run_name(r)); }
      auto spectral_range = [&](long row) -> std::string {
         if (row < 0) { return kGap; }
         const auto i = static_cast<std::size_t>(row);
         std::string s;
         if (!r.summary.get(i, "neg_min").empty())
         {
            s = interval(r.summary.get(i, "neg_min"), r.summary.get(i, "neg_max"));
         }
         if (!r.summary.get(i, "pos_min").empty())
         {
            s += (s.empty() ? "" : " U ") + interval(r.summary.get(i, "pos_min"), r.summary.get(i, "pos_max"));
         }
         return s.empty() ? kGap : s;
      };
      auto status = [&](long row) { return row < 0 ? kGap : r.summary.get(static_cast<std::size_t>(row), "status"); };
      std::string disc_bound = get("all_real") == "true" ? "all real" : "<= " + fmt4(get("disc_radius"));
      std::string complex = kGap;
      if (tri >= 0)
      {
         const auto i = static_cast<std::size_t>(tri);
         complex = r.summary.get(i, "num_complex") + " (max " + fmt4(r.summary.get(i, "complex_radius")) + ")";
      }
      rows.push_back({disc + " A" + recipe_label(r.cfg.recipe, false) + "^-1", interval(get("tri_lo"), get("tri_hi")),
                      spectral_range(tri), disc_bound, complex, status(tri)});
      rows.push_back({disc + " A" + recipe_label(r.cfg.recipe, true) + "^-1",
                      interval(get("minus_lo"), get("minus_hi")) + " U " + interval(get("plus_lo"), get("plus_hi")),
                      spectral_range(dia), "", "", status(dia)});
   }
   out.text = render({"preconditioned matrix", "bounds", "true eigenvalues", "disc radius", "complex (max dist. to 1)",
                      "check"},
                     rows);
   return out;
}

/// Runs with the same discretization, h and recipe share one table row.
std::string row_key(const Run &r)
{
   return to_string(r.cfg.discretization) + "/" + std::to_string(r.cfg.cells_per_side) + "/" + r.cfg.recipe.id();
}

TableOutput iterations_table(const std::vector<Run> &runs)
{
   TableOutput out;
   std::vector<std::vector<std::string>> rows;
   std::vector<std::string> seen;
   for (const Run &first : runs)
   {
      const std::string key = row_key(first);
      if (std::find(seen.begin(), seen.end(), key) != seen.end()) { continue; }
      const Run *g = nullptr, *m = nullptr;
      long gi = -1, mi = -1;
      for (const Run &r : runs)
      {
         if (row_key(r) != key) { continue; }
         if (const long i = find_method(r, "gmres"); i >= 0)
         {
            g = &r;
            gi = i;
         }
         if (const long i = find_method(r, "minres"); i >= 0)
         {
            m = &r;
            mi = i;
         }
      }
      if (!g && !m) { continue; }
      seen.push_back(key);
      const std::string where =
         disc_label(first.cfg.discretization) + " h=1/" + std::to_string(first.cfg.cells_per_side);
      auto cells = [&](const Run *r, long i, bool diag) -> std::vector<std::string> {
         const std::string label = recipe_label(first.cfg.recipe, diag);
         if (!r)
         {
            out.warnings.push_back(std::string("missing ") + (diag ? "minres" : "gmres") + " for " + where + " " +
                                   first.cfg.recipe.id());
            return {label, kGap, kGap};
         }
         const auto k = static_cast<std::size_t>(i);
         std::string nit = r->results.get(k, "n_it");
         if (r->results.get(k, "converged") != "true") { nit += "*"; }
         return {label, nit, seconds(r->results.get(k, "wall_time"))};
      };
      std::vector<std::string> row{where};
      for (auto &c : cells(g, gi, false)) { row.push_back(c); }
      for (auto &c : cells(m, mi, true)) { row.push_back(c); }
      rows.push_back(std::move(row));
   }
   out.text = render({"", "GMRES prec.", "n_it", "T [s]", "MINRES prec.", "n_it", "T [s]"}, rows);
   if (!rows.empty()) { out.text += "(* not converged within maxit)\n"; }
   return out;
}

TableOutput sizes_table(const std::vector<Run> &runs)
{
   TableOutput out;
   std::map<std::pair<int, std::size_t>, std::vector<std::string>> unique;
   bool several = false;
   for (const Run &r : runs)
   {
      if (r.sizes.rows.empty()) { continue; }
      several = several || (!unique.empty() && unique.begin()->first.first != disc_rank(r.cfg.discretization));
      std::vector<std::string> row{r.sizes.get(0, "discretization"), r.sizes.get(0, "cells"), r.sizes.get(0, "n"),
                                   r.sizes.get(0, "m"), r.sizes.get(0, "p"), r.sizes.get(0, "N"),
                                   r.sizes.get(0, "nnz")};
      unique.emplace(std::make_pair(disc_rank(r.cfg.discretization), r.cfg.cells_per_side), std::move(row));
   }
   std::vector<std::vector<std::string>> rows;
   for (auto &[key, row] : unique)
   {
      if (!several) { row.erase(row.begin()); }
      rows.push_back(row);
   }
   std::vector<std::string> header{"1/h", "n", "m", "p", "N", "nonzeros"};
   if (several) { header.insert(header.begin(), "discretization"); }
   out.text = render(header, rows);
   return out;
}

TableOutput scalability_table(const std::vector<Run> &runs)
{
   TableOutput out;
   std::vector<AForm> forms;
   std::vector<std::size_t> levels;
   for (const Run &r : runs)
   {
      if (r.results.rows.empty()) { continue; }
      if (std::find(forms.begin(), forms.end(), r.cfg.recipe.a_form) == forms.end())
      {
         forms.push_back(r.cfg.recipe.a_form);
      }
      if (std::find(levels.begin(), levels.end(), r.cfg.cells_per_side) == levels.end())
      {
         levels.push_back(r.cfg.cells_per_side);
      }
   }
   std::sort(forms.begin(), forms.end());
   std::sort(levels.begin(), levels.end());
   std::vector<std::string> header{"1/h", "solver"};
   for (AForm f : forms)
   {
      header.push_back(to_string(f) + " n_it");
      header.push_back("T [s]");
      header.push_back("rel. err.");
   }
   std::vector<std::vector<std::string>> rows;
   const std::vector<std::pair<std::string, std::string>> solvers = {
      {"gmres", "GMRES"}, {"minres", "MINRES"}, {"pcg-block11", "PCG(A)"}};
   for (std::size_t lv : levels)
   {
      bool first = true;
      for (const auto &[method, label] : solvers)
      {
         std::vector<std::string> row{first ? std::to_string(lv) : "", label};
         bool any = false;
         for (AForm f : forms)
         {
            const Run *hit = nullptr;
            long idx = -1;
            for (const Run &r : runs)
            {
               if (r.cfg.cells_per_side == lv && r.cfg.recipe.a_form == f)
               {
                  const long i = find_method(r, method);
                  if (i >= 0)
                  {
                     hit = &r;
                     idx = i;
                     break;
                  }
               }
            }
            if (!hit)
            {
               row.insert(row.end(), {kGap, kGap, kGap});
               continue;
            }
            any = true;
            const auto k = static_cast<std::size_t>(idx);
            std::string nit = hit->results.get(k, "n_it");
            if (hit->results.get(k, "converged") != "true") { nit += "*"; }
            row.push_back(nit);
            row.push_back(seconds(hit->results.get(k, "wall_time")));
            row.push_back(sci2(hit->results.get(k, "rel_err")));
         }
         if (any)
         {
            for (std::size_t c = 2; c < row.size(); ++c)
            {
               if (row[c] == kGap)
               {
                  out.warnings.push_back("missing " + method + " at h=1/" + std::to_string(lv));
                  break;
               }
            }
            rows.push_back(std::move(row));
            first = false;
         }
      }
   }
   out.text = render(header, rows);
   return out;
}

/// Runs one configuration with the given solvers and analysis; failures
/// become warnings so that the table keeps its other rows.
void run_into(const ExperimentConfig &cfg, const std::vector<SolverKind> &solvers, AnalysisKind analysis,
              const std::filesystem::path &dir, std::ostream &log, TableOutput &out, bool &verify_failed)
{
   log << "run " << dir.filename().string() << " ..." << std::flush;
   try
   {
      Experiment exp(cfg);
      RunArtifacts art;
      art.sizes = exp.sizes();
      for (SolverKind s : solvers) { art.solves.push_back(exp.solve(s)); }
      if (analysis != AnalysisKind::none) { art.analysis = exp.analyze(analysis); }
      write_artifacts(dir, cfg, art);
      for (const auto &s : art.solves) { log << " " << s.stats.method << "=" << s.stats.iterations; }
      if (art.analysis && !art.analysis->passed())
      {
         verify_failed = true;
         out.warnings.push_back("verification failed for run " + dir.filename().string());
         log << " verify=FAIL";
      }
      log << "\n";
   }
   catch (const Error &e)
   {
      log << " error\n";
      out.warnings.push_back("run " + dir.filename().string() + " failed: " + e.what());
   }
}
} // namespace

std::string to_string(TableKind t)
{
   switch (t)
   {
   case TableKind::eigen_bounds: return "eigen-bounds";
   case TableKind::iterations: return "iterations";
   case TableKind::sizes: return "sizes";
   case TableKind::scalability: return "scalability";
   }
   return "?";
}

TableKind parse_table_kind(const std::string &s)
{
   for (TableKind k : {TableKind::eigen_bounds, TableKind::iterations, TableKind::sizes, TableKind::scalability})
   {
      if (to_string(k) == s) { return k; }
   }
   throw ConfigError(kModule, "unknown table '" + s + "' (eigen-bounds, iterations, sizes, scalability)");
}

std::string recipe_label(const SchurRecipe &r, bool diagonal)
{
   const std::string p = diagonal ? "P_D" : "P";
   if (r.a_form == AForm::exact_dense && r.resolved_s_form() == SForm::exact_dense &&
       r.x_form == XForm::exact_dense)
   {
      return p + "(exact)";
   }
   if (r.s_variant == SVariant::s1) { return p + (r.omega == 1.0 ? "(1)" : "(1,w)"); }
   return p + "(2)";
}

TableOutput emit_table(const std::filesystem::path &results_dir, TableKind which)
{
   const std::vector<Run> runs = collect_runs(results_dir);
   TableOutput out;
   switch (which)
   {
   case TableKind::eigen_bounds: out = eigen_bounds_table(runs); break;
   case TableKind::iterations: out = iterations_table(runs); break;
   case TableKind::sizes: out = sizes_table(runs); break;
   case TableKind::scalability: out = scalability_table(runs); break;
   }
   if (runs.empty()) { out.warnings.insert(out.warnings.begin(), "no runs found under " + results_dir.string()); }
   return out;
}

TableOutput reproduce_table(TableKind which, const ExperimentConfig &base, const std::filesystem::path &dir,
                            std::ostream &log, const ReproduceOptions &opts)
{
   TableOutput collected;
   bool verify_failed = false;
   std::filesystem::create_directories(dir);
   auto with_recipe = [&](SchurRecipe r) {
      r.a_form = base.recipe.a_form;
      r.a_pcg_tol = base.recipe.a_pcg_tol;
      r.a_pcg_maxit = base.recipe.a_pcg_maxit;
      return r;
   };
   const std::vector<std::size_t> two_levels = opts.cells.empty() ? std::vector<std::size_t>{10, 20} : opts.cells;
   const std::vector<std::size_t> one_level =
      opts.cells.empty() ? std::vector<std::size_t>{base.cells_per_side} : opts.cells;

   if (which == TableKind::eigen_bounds || which == TableKind::iterations)
   {
      const std::vector<std::pair<Discretization, SchurRecipe>> set = {
         {Discretization::mfe2d, with_recipe(recipe_s1())},
         {Discretization::mfe2d, with_recipe(recipe_s1(0.1))},
         {Discretization::mfe2d, with_recipe(recipe_s2())},
         {Discretization::mhfe2d, with_recipe(recipe_s2())}};
      for (std::size_t cells : one_level)
      {
         for (const auto &[disc, recipe] : set)
         {
            ExperimentConfig cfg = base;
            cfg.discretization = disc;
            cfg.cells_per_side = cells;
            cfg.recipe = recipe;
            cfg.name = to_string(disc) + "-h" + std::to_string(cells) + "-" + recipe.id();
            if (which == TableKind::eigen_bounds)
            {
               cfg.analysis = AnalysisKind::verify;
               run_into(cfg, {}, AnalysisKind::verify, dir / cfg.name, log, collected, verify_failed);
            }
            else
            {
               cfg.analysis = AnalysisKind::none;
               run_into(cfg, {SolverKind::gmres, SolverKind::minres}, AnalysisKind::none, dir / cfg.name, log,
                        collected, verify_failed);
            }
         }
      }
   }
   else if (which == TableKind::sizes)
   {
      for (std::size_t cells : two_levels)
      {
         ExperimentConfig cfg = base;
         cfg.discretization = Discretization::mhfe3d;
         cfg.cells_per_side = cells;
         cfg.analysis = AnalysisKind::none;
         cfg.name = "mhfe3d-h" + std::to_string(cells);
         run_into(cfg, {}, AnalysisKind::none, dir / cfg.name, log, collected, verify_failed);
      }
   }
   else
   {
      for (std::size_t cells : two_levels)
      {
         for (AForm form : {AForm::ic0, AForm::inner_pcg})
         {
            ExperimentConfig cfg = base;
            cfg.discretization = Discretization::mhfe3d;
            cfg.cells_per_side = cells;
            cfg.recipe = recipe_s2();
            cfg.recipe.a_form = form;
            cfg.recipe.a_pcg_tol = base.recipe.a_pcg_tol;
            cfg.recipe.a_pcg_maxit = base.recipe.a_pcg_maxit;
            cfg.rhs_mode = RhsMode::ones;
            cfg.analysis = AnalysisKind::none;
            cfg.name = "mhfe3d-h" + std::to_string(cells) + "-" + to_string(form);
            run_into(cfg, {SolverKind::gmres, SolverKind::minres, SolverKind::pcg_block11}, AnalysisKind::none,
                     dir / cfg.name, log, collected, verify_failed);
         }
      }
   }

   TableOutput out = emit_table(dir, which);
   out.warnings.insert(out.warnings.begin(), collected.warnings.begin(), collected.warnings.end());
   std::ofstream(dir / "table.txt") << out.text;
   if (verify_failed) { out.warnings.push_back("one or more verifications failed"); }
   return out;
}

} // namespace biotdsp
