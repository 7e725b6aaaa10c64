#include "biotdsp/errors.hpp"
#include "biotdsp/harness/config.hpp"
#include "biotdsp/harness/csv.hpp"
#include "biotdsp/harness/experiment.hpp"
#include "biotdsp/harness/tables.hpp"
#include "biotdsp/krylov/krylov.hpp"

#include <catch_amalgamated.hpp>

#include <filesystem>
#include <fstream>
#include <sstream>

using namespace biotdsp;
namespace fs = std::filesystem;

namespace
{

fs::path scratch(const std::string &name)
{
   const fs::path p = fs::temp_directory_path() / ("bdsp_harness_" + name);
   fs::remove_all(p);
   fs::create_directories(p);
   return p;
}

std::string slurp(const fs::path &p)
{
   std::ifstream in(p);
   std::stringstream ss;
   ss << in.rdbuf();
   return ss.str();
}

ExperimentConfig small_config()
{
   ExperimentConfig cfg;
   cfg.name = "small";
   cfg.cells_per_side = 4;
   return cfg;
}

} // namespace

TEST_CASE("config defaults are the cantilever material properties")
{
   const ExperimentConfig cfg;
   CHECK(cfg.props.dt == 1e-5);
   CHECK(cfg.props.young == 1e5);
   CHECK(cfg.props.poisson == 0.4);
   CHECK(cfg.props.biot_b == 1.0);
   CHECK(cfg.props.s_eps == 0.0);
   CHECK(cfg.props.kappa == 1e-7);
   CHECK(cfg.props.mu == 1e3);
   CHECK(cfg.effective_tol() == 1e-13);
   ExperimentConfig m = cfg;
   m.solver = SolverKind::minres;
   CHECK(m.effective_tol() == 1e-10);
}

TEST_CASE("config parsing")
{
   const auto cfg = parse_config_text("# comment\n"
                                      "name = beam\n"
                                      "discretization = mhfe2d   # trailing\n"
                                      "h = 1/20\n"
                                      "\n"
                                      "recipe.omega = 0.1\n"
                                      "recipe.preset = s1\n"
                                      "solver.method = minres\n"
                                      "solver.tol = 1e-8\n"
                                      "rhs.mode = ones\n"
                                      "analysis = verify\n");
   CHECK(cfg.name == "beam");
   CHECK(cfg.discretization == Discretization::mhfe2d);
   CHECK(cfg.cells_per_side == 20);
   CHECK(cfg.recipe.s_variant == SVariant::s1);
   CHECK(cfg.recipe.omega == 0.1);
   CHECK(cfg.solver == SolverKind::minres);
   CHECK(cfg.effective_tol() == 1e-8);
   CHECK(cfg.rhs_mode == RhsMode::ones);
   CHECK(cfg.analysis == AnalysisKind::verify);

   CHECK(parse_config_text("h = 0.05\n").cells_per_side == 20);
   CHECK(parse_config_text("h = 1/8\n").cells_per_side == 8);
   CHECK(parse_config_text("recipe.preset = s2\n").recipe.s_variant == SVariant::s2_algebraic);
}

TEST_CASE("config errors name the line and key")
{
   try
   {
      parse_config_text("h = 1/4\n\nrecipe.bogus = 1\n");
      FAIL("expected ParseError");
   }
   catch (const ParseError &e)
   {
      const std::string w = e.what();
      CHECK(w.find("line 3") != std::string::npos);
      CHECK(w.find("recipe.bogus") != std::string::npos);
      CHECK(e.module() == "cli-harness");
   }
   try
   {
      parse_config_text("solver.method = cg\n");
      FAIL("expected ParseError");
   }
   catch (const ParseError &e)
   {
      CHECK(std::string(e.what()).find("solver.method") != std::string::npos);
   }
   CHECK_THROWS_AS(parse_config_text("h = 1/4\nnot a setting\n"), ParseError);
   CHECK_THROWS_AS(parse_config_text("h = 0\n"), ParseError);
   CHECK_THROWS_AS(load_config("/nonexistent/dir/x.cfg"), ConfigError);
}

TEST_CASE("config echo parses back to the same config")
{
   ExperimentConfig cfg;
   cfg.name = "echo";
   cfg.discretization = Discretization::mhfe3d;
   cfg.cells_per_side = 7;
   cfg.props.kappa = 3.3e-9;
   cfg.recipe = recipe_s1(0.1);
   cfg.recipe.a_form = AForm::inner_pcg;
   cfg.solver = SolverKind::pcg_block11;
   cfg.tol = 1e-7;
   cfg.restart = 30;
   cfg.seed = 42;
   cfg.analysis = AnalysisKind::bounds;
   const std::string echo = config_echo(cfg);
   const auto back = parse_config_text(echo);
   CHECK(config_echo(back) == echo);
   CHECK(back.props.kappa == cfg.props.kappa);
   CHECK(back.recipe.id() == cfg.recipe.id());
   CHECK(config_echo(parse_config_text(config_echo(ExperimentConfig{}))) == config_echo(ExperimentConfig{}));
}

TEST_CASE("csv quoting round trip")
{
   const std::vector<std::string> f{"plain", "with,comma", "with \"quote\"", ""};
   CHECK(csv_line(f) == "plain,\"with,comma\",\"with \"\"quote\"\"\",");
   CHECK(csv_split(csv_line(f)) == f);

   const auto dir = scratch("csv");
   std::ofstream(dir / "bad.csv") << "a,b\n1,2\n3\n";
   try
   {
      read_csv(dir / "bad.csv");
      FAIL("expected ParseError");
   }
   catch (const ParseError &e)
   {
      CHECK(std::string(e.what()).find("line 3") != std::string::npos);
   }
   CHECK_THROWS_AS(read_csv(dir / "missing.csv"), ConfigError);
}

TEST_CASE("identity operator converges in one iteration")
{
   const Vector b{1.0, -2.0, 0.5};
   const auto r = gmres_right(LinearOperator::identity(3), LinearOperator::identity(3), b, 1e-13, 10);
   CHECK(r.stats.iterations == 1);
   CHECK(r.stats.converged);
}

TEST_CASE("run_experiment writes every artifact with consistent CSV")
{
   const auto root = scratch("run");
   ExperimentConfig cfg = small_config();
   cfg.analysis = AnalysisKind::verify;
   std::ostringstream log;
   const auto dir = make_run_dir(root, cfg.name);
   CHECK(dir.parent_path() == root / "small");
   CHECK(run_experiment(cfg, Command::solve, dir, log) == 0);

   for (const char *f : {"config.txt", "sizes.csv", "results.csv", "convergence.csv", "bound_report.txt",
                         "bounds.csv", "spectrum.csv", "spectrum_summary.csv", "verdict.csv"})
   {
      INFO(f);
      REQUIRE(fs::exists(dir / f));
   }
   for (const char *f : {"sizes.csv", "results.csv", "convergence.csv", "bounds.csv", "spectrum.csv",
                         "spectrum_summary.csv", "verdict.csv"})
   {
      INFO(f);
      const CsvTable t = read_csv(dir / f);
      CHECK_FALSE(t.header.empty());
      CHECK_FALSE(t.rows.empty());
   }
   const CsvTable results = read_csv(dir / "results.csv");
   CHECK(results.header == csv_split(results_csv_header()));
   CHECK(results.get(0, "method") == "gmres");
   CHECK(results.get(0, "converged") == "true");

   const CsvTable verdict = read_csv(dir / "verdict.csv");
   for (std::size_t i = 0; i < verdict.rows.size(); ++i)
   {
      CHECK(verdict.get(i, "status") != "fail");
   }
   CHECK(load_config(dir / "config.txt").cells_per_side == 4);

   SECTION("rerun is identical except wall time")
   {
      const auto again = make_run_dir(root, cfg.name);
      CHECK(again != dir);
      CHECK(run_experiment(cfg, Command::solve, again, log) == 0);
      const CsvTable a = read_csv(dir / "results.csv");
      const CsvTable b = read_csv(again / "results.csv");
      const auto wall = *a.column("wall_time");
      REQUIRE(a.rows.size() == b.rows.size());
      for (std::size_t i = 0; i < a.rows.size(); ++i)
      {
         for (std::size_t c = 0; c < a.header.size(); ++c)
         {
            if (c != wall) { CHECK(a.rows[i][c] == b.rows[i][c]); }
         }
      }
      CHECK(slurp(dir / "convergence.csv") == slurp(again / "convergence.csv"));
      CHECK(slurp(dir / "spectrum.csv") == slurp(again / "spectrum.csv"));
   }
}

TEST_CASE("run_experiment assemble and export")
{
   const auto root = scratch("export");
   ExperimentConfig cfg = small_config();
   cfg.discretization = Discretization::mhfe2d;
   std::ostringstream log;
   CHECK(run_experiment(cfg, Command::assemble, root / "a", log) == 0);
   const CsvTable sizes = read_csv(root / "a" / "sizes.csv");
   CHECK(sizes.get(0, "discretization") == "mhfe2d");
   CHECK(std::stoul(sizes.get(0, "N")) ==
         std::stoul(sizes.get(0, "n")) + std::stoul(sizes.get(0, "m")) + std::stoul(sizes.get(0, "p")));
   CHECK(read_csv(root / "a" / "results.csv").rows.empty());

   CHECK(run_experiment(cfg, Command::export_mm, root / "b", log) == 0);
   std::size_t mtx = 0;
   for (const auto &e : fs::directory_iterator(root / "b" / "matrices"))
   {
      if (e.path().extension() == ".mtx") { ++mtx; }
   }
   CHECK(mtx >= 5);
}

TEST_CASE("emit_table")
{
   SECTION("empty directory gives the header only")
   {
      const auto root = scratch("empty");
      for (TableKind k : {TableKind::eigen_bounds, TableKind::iterations, TableKind::sizes, TableKind::scalability})
      {
         const auto t = emit_table(root, k);
         CHECK_FALSE(t.warnings.empty());
         CHECK(std::count(t.text.begin(), t.text.end(), '\n') == 2);
      }
   }

   SECTION("sizes rows")
   {
      const auto root = scratch("sizes");
      std::ostringstream log;
      ExperimentConfig cfg = small_config();
      cfg.discretization = Discretization::mhfe3d;
      cfg.cells_per_side = 2;
      run_experiment(cfg, Command::assemble, root / "h2", log);
      const auto t = emit_table(root, TableKind::sizes);
      CHECK(t.warnings.empty());
      const CsvTable s = read_csv(root / "h2" / "sizes.csv");
      const std::string row = " 2 | " + s.get(0, "n") + " | " + s.get(0, "m") + " | " + s.get(0, "p");
      CHECK(t.text.find(row) != std::string::npos);
   }

   SECTION("iterations table matches the CSV")
   {
      const auto root = scratch("iters");
      std::ostringstream log;
      ExperimentConfig cfg = small_config();
      cfg.solver = SolverKind::gmres;
      run_experiment(cfg, Command::solve, root / "g", log);
      cfg.solver = SolverKind::minres;
      run_experiment(cfg, Command::solve, root / "m", log);
      const auto t = emit_table(root, TableKind::iterations);
      CHECK(t.warnings.empty());
      const std::string g = read_csv(root / "g" / "results.csv").get(0, "n_it");
      const std::string m = read_csv(root / "m" / "results.csv").get(0, "n_it");
      std::istringstream lines(t.text);
      std::string header, rule, row;
      std::getline(lines, header);
      std::getline(lines, rule);
      std::getline(lines, row);
      const auto cells = [&] {
         std::vector<std::string> out;
         std::stringstream ss(row);
         std::string c;
         while (std::getline(ss, c, '|'))
         {
            c.erase(0, c.find_first_not_of(' '));
            c.erase(c.find_last_not_of(' ') + 1);
            out.push_back(c);
         }
         return out;
      }();
      REQUIRE(cells.size() == 7);
      CHECK(cells[1] == "P(1)");
      CHECK(cells[2] == g);
      CHECK(cells[4] == "P_D(1)");
      CHECK(cells[5] == m);
   }

   SECTION("partial runs are flagged")
   {
      const auto root = scratch("partial");
      std::ostringstream log;
      run_experiment(small_config(), Command::solve, root / "g", log);
      const auto t = emit_table(root, TableKind::iterations);
      CHECK(t.text.find("--") != std::string::npos);
      REQUIRE(t.warnings.size() == 1);
      CHECK(t.warnings[0].find("minres") != std::string::npos);
   }
}

TEST_CASE("table kinds and labels")
{
   CHECK(parse_table_kind("eigen-bounds") == TableKind::eigen_bounds);
   CHECK(to_string(TableKind::scalability) == "scalability");
   CHECK_THROWS_AS(parse_table_kind("table9"), ConfigError);
   CHECK(recipe_label(recipe_s1(), false) == "P(1)");
   CHECK(recipe_label(recipe_s1(0.1), true) == "P_D(1,w)");
   CHECK(recipe_label(recipe_s2(), false) == "P(2)");
}
