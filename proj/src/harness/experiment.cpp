#include "biotdsp/harness/experiment.hpp"

#include "biotdsp/errors.hpp"
#include "biotdsp/harness/csv.hpp"
#include "biotdsp/precond/block_precond.hpp"
#include "biotdsp/spectral/indicators.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <ctime>
#include <fstream>
#include <ostream>
#include <sstream>

namespace biotdsp
{

namespace
{
const char *kModule = "cli-harness";

std::string sci(double v)
{
   if (std::isnan(v)) { return ""; }
   char buf[40];
   std::snprintf(buf, sizeof buf, "%.10e", v);
   return buf;
}

std::string fixed(double v, int digits)
{
   char buf[40];
   std::snprintf(buf, sizeof buf, "%.*f", digits, v);
   return buf;
}

std::string provenance_of(const ExperimentConfig &cfg)
{
   return cfg.name + ":" + to_string(cfg.discretization) + ":h=1/" + std::to_string(cfg.cells_per_side);
}

void write_file(const std::filesystem::path &file, const std::string &text)
{
   std::ofstream out(file, std::ios::binary);
   if (!out) { throw ConfigError(kModule, "cannot write '" + file.string() + "'"); }
   out << text;
}

void widen(Interval &i, double x)
{
   if (std::isnan(i.min))
   {
      i.min = i.max = x;
      return;
   }
   i.min = std::min(i.min, x);
   i.max = std::max(i.max, x);
}
} // namespace

SpectrumSummary summarize(const PreconditionedSpectrum &spec, const BoundVerdict *verdict)
{
   SpectrumSummary s;
   s.mode = spec.mode;
   for (const auto &z : spec.values)
   {
      if (is_complex_eigenvalue(z))
      {
         ++s.num_complex;
         s.complex_radius = std::max(s.complex_radius, std::abs(z - 1.0));
      }
      else
      {
         ++s.num_real;
         widen(z.real() < 0.0 ? s.negative : s.positive, z.real());
      }
   }
   if (verdict)
   {
      s.verified = true;
      s.passed = verdict->passed();
   }
   return s;
}

bool AnalysisResult::passed() const
{
   if (kind != AnalysisKind::verify) { return true; }
   for (const auto &v : verdicts)
   {
      if (!v.passed()) { return false; }
   }
   return true;
}

Experiment::Experiment(ExperimentConfig cfg) : cfg_(std::move(cfg))
{
   cfg_.validate();
}

const DspSystem &Experiment::system()
{
   if (!sys_)
   {
      DspSystem s = build_system(cfg_.discretization, cfg_.cells_per_side, cfg_.props, cfg_.assembly);
      ManufacturedRhs r = cfg_.rhs_mode == RhsMode::ones ? ones_rhs(s) : manufactured_rhs(s, cfg_.seed);
      s.rhs = std::move(r.rhs);
      x_true_ = std::move(r.x_true);
      sys_ = std::move(s);
   }
   return *sys_;
}

const Vector &Experiment::x_true()
{
   system();
   return x_true_;
}

const RealizedRecipe &Experiment::realized()
{
   if (!realized_) { realized_ = realize(system(), cfg_.recipe, cfg_.props); }
   return *realized_;
}

SizesRecord Experiment::sizes()
{
   const DspSystem &s = system();
   SizesRecord r;
   r.discretization = to_string(cfg_.discretization);
   r.dim = dimension_of(cfg_.discretization);
   r.cells = cfg_.cells_per_side;
   r.n = s.n();
   r.m = s.m();
   r.p = s.p();
   r.N = s.size();
   r.nnz = s.nnz();
   return r;
}

SolveRecord Experiment::solve(SolverKind method)
{
   const DspSystem &sys = system();
   const RealizedRecipe &rr = realized();
   const double tol = cfg_.tol ? *cfg_.tol : (method == SolverKind::gmres ? 1e-13 : 1e-10);
   SolveRecord rec;
   rec.recipe_id = cfg_.recipe.id();
   rec.h = cfg_.h();
   rec.dim = dimension_of(cfg_.discretization);
   if (method == SolverKind::pcg_block11)
   {
      const Vector xu(x_true_.begin(), x_true_.begin() + static_cast<std::ptrdiff_t>(sys.n()));
      const Vector f = spmv(sys.A, xu);
      const std::size_t maxit = cfg_.maxit ? cfg_.maxit : default_maxit(sys.n());
      SolveResult r = pcg(LinearOperator::from_csr(sys.A), inverse_operator(rr.a_hat), f, tol, maxit);
      r.stats.method = to_string(method);
      r.stats.relative_error = relative_error(r.x, xu);
      rec.stats = std::move(r.stats);
      return rec;
   }
   const std::size_t maxit = cfg_.maxit ? cfg_.maxit : default_maxit(sys.size());
   SolveResult r;
   if (method == SolverKind::gmres)
   {
      const BlockTriangular P(sys, rr);
      r = gmres_right(sys.as_operator(), P.inverse_operator(), sys.rhs, tol, maxit, cfg_.restart);
   }
   else
   {
      const BlockDiagonal P(rr);
      r = minres(sys.as_operator(), P.inverse_operator(), sys.rhs, tol, maxit);
   }
   r.stats.method = to_string(method);
   r.stats.relative_error = relative_error(r.x, x_true_);
   rec.stats = std::move(r.stats);
   return rec;
}

AnalysisResult Experiment::analyze(AnalysisKind kind)
{
   const DspSystem &sys = system();
   const RealizedRecipe &rr = realized();
   AnalysisResult out;
   out.kind = kind;
   const std::string prov = provenance_of(cfg_);
   out.report = make_bound_report(compute_indicators(sys, rr.a_hat, rr.s_hat, rr.x_hat), prov, cfg_.recipe.id());
   if (!rr.note.empty()) { out.report.note = rr.note + (out.report.note.empty() ? "" : "; " + out.report.note); }
   if (kind != AnalysisKind::spectrum && kind != AnalysisKind::verify) { return out; }
   SpectrumOptions opts;
   opts.max_dense_n = cfg_.max_dense_n;
   for (SpectrumMode mode : {SpectrumMode::triangular, SpectrumMode::diagonal})
   {
      out.spectra.push_back(full_spectrum(sys, rr.a_hat, rr.s_hat, rr.x_hat, mode, opts, prov));
      out.verdicts.push_back(verify_bounds(out.spectra.back(), out.report));
      out.summaries.push_back(summarize(out.spectra.back(), &out.verdicts.back()));
   }
   return out;
}

std::string results_csv_header()
{
   return "method,recipe-id,h,dim,n_it,converged,rel_err,wall_time";
}

std::string results_csv_row(const SolveRecord &r)
{
   char h[32];
   std::snprintf(h, sizeof h, "%.10g", r.h);
   return csv_line({r.stats.method, r.recipe_id, h, std::to_string(r.dim), std::to_string(r.stats.iterations),
                    r.stats.converged ? "true" : "false",
                    r.stats.relative_error ? sci(*r.stats.relative_error) : std::string(),
                    fixed(r.stats.wall_time, 6)});
}

std::filesystem::path make_run_dir(const std::filesystem::path &root, const std::string &name)
{
   const std::time_t now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
   std::tm tm{};
   gmtime_r(&now, &tm);
   char stamp[32];
   std::strftime(stamp, sizeof stamp, "%Y%m%dT%H%M%SZ", &tm);
   const std::filesystem::path base = root / name;
   std::filesystem::create_directories(base);
   std::filesystem::path dir = base / stamp;
   for (int k = 1; !std::filesystem::create_directory(dir); ++k)
   {
      dir = base / (std::string(stamp) + "-" + std::to_string(k));
   }
   return dir;
}

void write_artifacts(const std::filesystem::path &dir, const ExperimentConfig &cfg, const RunArtifacts &art)
{
   std::filesystem::create_directories(dir);
   write_file(dir / "config.txt", config_echo(cfg));

   std::ostringstream sz;
   sz << "discretization,dim,cells,h,n,m,p,N,nnz\n";
   if (art.sizes)
   {
      const SizesRecord &s = *art.sizes;
      char h[32];
      std::snprintf(h, sizeof h, "%.10g", 1.0 / static_cast<double>(s.cells));
      sz << csv_line({s.discretization, std::to_string(s.dim), std::to_string(s.cells), h, std::to_string(s.n),
                      std::to_string(s.m), std::to_string(s.p), std::to_string(s.N), std::to_string(s.nnz)})
         << "\n";
   }
   write_file(dir / "sizes.csv", sz.str());

   std::ostringstream res, conv;
   res << results_csv_header() << "\n";
   conv << "method,iteration,residual\n";
   for (const auto &r : art.solves)
   {
      res << results_csv_row(r) << "\n";
      for (std::size_t k = 0; k < r.stats.residual_history.size(); ++k)
      {
         conv << r.stats.method << "," << k << "," << sci(r.stats.residual_history[k]) << "\n";
      }
   }
   write_file(dir / "results.csv", res.str());
   write_file(dir / "convergence.csv", conv.str());

   std::ostringstream rep, bounds, spec, summ, ver;
   bounds << "recipe,A_min,A_max,S_min,S_max,X_min,X_max,D_min,D_max,E_min,E_max,R_min,R_max,K_min,K_max,"
             "tri_lo,tri_hi,window_lo,window_hi,disc_radius,all_real,minus_lo,minus_hi,plus_lo,plus_hi\n";
   spec << "mode,re,im,class\n";
   summ << "mode,num_real,num_complex,neg_min,neg_max,pos_min,pos_max,complex_radius,verified,status\n";
   ver << "mode,check,status,checked,exempt,worst_excess,worst_re,worst_im,detail\n";
   if (art.analysis)
   {
      const AnalysisResult &a = *art.analysis;
      const BoundReport &b = a.report;
      const IndicatorSet &g = b.indicators;
      rep << bound_report_text(b);
      bounds << csv_line({b.recipe, sci(g.A.min), sci(g.A.max), sci(g.S.min), sci(g.S.max), sci(g.X.min), sci(g.X.max),
                          sci(g.D.min), sci(g.D.max), sci(g.E.min), sci(g.E.max), sci(g.R.min), sci(g.R.max),
                          sci(g.K.min), sci(g.K.max), sci(b.triangular.lo), sci(b.triangular.hi),
                          sci(b.triangular.exclusion.min), sci(b.triangular.exclusion.max), sci(b.disc.radius),
                          b.disc.all_real ? "true" : "false", sci(b.diagonal.minus.min), sci(b.diagonal.minus.max),
                          sci(b.diagonal.plus.min), sci(b.diagonal.plus.max)})
             << "\n";
      for (std::size_t k = 0; k < a.spectra.size(); ++k)
      {
         const std::string mode = to_string(a.spectra[k].mode);
         for (const auto &z : a.spectra[k].values)
         {
            spec << mode << "," << sci(z.real()) << "," << sci(z.imag()) << ","
                 << (is_complex_eigenvalue(z) ? "complex" : "real") << "\n";
         }
         const SpectrumSummary &s = a.summaries[k];
         summ << csv_line({mode, std::to_string(s.num_real), std::to_string(s.num_complex), sci(s.negative.min),
                           sci(s.negative.max), sci(s.positive.min), sci(s.positive.max), sci(s.complex_radius),
                           s.verified ? "true" : "false", s.passed ? "pass" : "fail"})
              << "\n";
         rep << "\nspectrum (" << mode << "): " << s.num_real << " real, " << s.num_complex << " complex\n";
         rep << verdict_text(a.verdicts[k]);
         for (const auto &c : a.verdicts[k].checks)
         {
            const char *status = !c.applicable ? "skip" : (c.passed ? "pass" : "fail");
            ver << csv_line({mode, c.name, status, std::to_string(c.checked), std::to_string(c.exempt),
                             sci(c.worst_excess), sci(c.worst_value.real()), sci(c.worst_value.imag()), c.detail})
                << "\n";
         }
      }
   }
   else { rep << "analysis: none\n"; }
   write_file(dir / "bound_report.txt", rep.str());
   write_file(dir / "bounds.csv", bounds.str());
   write_file(dir / "spectrum.csv", spec.str());
   write_file(dir / "spectrum_summary.csv", summ.str());
   write_file(dir / "verdict.csv", ver.str());
}

int run_experiment(const ExperimentConfig &cfg, Command cmd, const std::filesystem::path &dir, std::ostream &log)
{
   Experiment exp(cfg);
   RunArtifacts art;
   art.sizes = exp.sizes();
   const SizesRecord &s = *art.sizes;
   log << cfg.name << ": " << s.discretization << " h=1/" << s.cells << "  n=" << s.n << " m=" << s.m << " p=" << s.p
       << " N=" << s.N << " nnz=" << s.nnz << "\n";
   if (cmd == Command::export_mm)
   {
      export_system(exp.system(), cfg.props, dir / "matrices");
      log << "exported Matrix Market files to " << (dir / "matrices").string() << "\n";
   }
   if (cmd == Command::solve)
   {
      art.solves.push_back(exp.solve());
      const SolveStats &st = art.solves.back().stats;
      log << st.method << " [" << cfg.recipe.id() << "]: " << st.iterations << " iterations, "
          << (st.converged ? "converged" : "not converged") << ", rel_err "
          << (st.relative_error ? sci(*st.relative_error) : std::string("n/a")) << ", " << fixed(st.wall_time, 3)
          << " s\n";
   }
   AnalysisKind kind = cfg.analysis;
   if (cmd == Command::analyze && kind == AnalysisKind::none) { kind = AnalysisKind::bounds; }
   if ((cmd == Command::solve || cmd == Command::analyze) && kind != AnalysisKind::none)
   {
      art.analysis = exp.analyze(kind);
      log << bound_report_text(art.analysis->report);
      for (std::size_t k = 0; k < art.analysis->verdicts.size(); ++k)
      {
         log << "\nspectrum (" << to_string(art.analysis->spectra[k].mode) << ")\n"
             << verdict_text(art.analysis->verdicts[k]);
      }
   }
   write_artifacts(dir, cfg, art);
   log << "artifacts: " << dir.string() << "\n";
   if (art.analysis && !art.analysis->passed())
   {
      log << "verification FAILED\n";
      return 2;
   }
   return 0;
}

} // namespace biotdsp
