#include "biotdsp/harness/config.hpp"

#include "biotdsp/errors.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <functional>
#include <map>
#include <sstream>
#include <vector>

namespace biotdsp
{

namespace
{
const char *kModule = "cli-harness";

std::string trim(const std::string &s)
{
   const auto b = s.find_first_not_of(" \t\r");
   if (b == std::string::npos) { return {}; }
   const auto e = s.find_last_not_of(" \t\r");
   return s.substr(b, e - b + 1);
}

[[noreturn]] void bad_value(const std::string &key, const std::string &value, const std::string &what)
{
   throw ConfigError(kModule, "key '" + key + "': " + what + " '" + value + "'");
}

double to_double(const std::string &key, const std::string &v)
{
   double x = 0.0;
   const auto *end = v.data() + v.size();
   auto [p, ec] = std::from_chars(v.data(), end, x);
   if (ec != std::errc() || p != end || !std::isfinite(x)) { bad_value(key, v, "invalid number"); }
   return x;
}

std::uint64_t to_uint(const std::string &key, const std::string &v)
{
   std::uint64_t x = 0;
   const auto *end = v.data() + v.size();
   auto [p, ec] = std::from_chars(v.data(), end, x);
   if (ec != std::errc() || p != end) { bad_value(key, v, "invalid nonnegative integer"); }
   return x;
}

/// Spacing "1/10" or "0.1" to cells per side.
std::size_t to_cells(const std::string &key, const std::string &v)
{
   double h = 0.0;
   if (const auto slash = v.find('/'); slash != std::string::npos)
   {
      const double num = to_double(key, trim(v.substr(0, slash)));
      const double den = to_double(key, trim(v.substr(slash + 1)));
      if (den == 0.0) { bad_value(key, v, "invalid spacing"); }
      h = num / den;
   }
   else { h = to_double(key, v); }
   if (!(h > 0.0 && h <= 1.0)) { bad_value(key, v, "spacing must lie in (0, 1]"); }
   const double cells = std::round(1.0 / h);
   if (std::abs(cells * h - 1.0) > 1e-9) { bad_value(key, v, "spacing must be 1/N for an integer N"); }
   return static_cast<std::size_t>(cells);
}

template <class Fn>
auto wrap_enum(const std::string &key, const std::string &v, Fn parse)
{
   try
   {
      return parse(v);
   }
   catch (const ConfigError &)
   {
      bad_value(key, v, "invalid value");
   }
}

using Setter = std::function<void(ExperimentConfig &, const std::string &, const std::string &)>;

const std::map<std::string, Setter> &setters()
{
   static const std::map<std::string, Setter> table = {
      {"name", [](ExperimentConfig &c, const std::string &k, const std::string &v) {
          if (v.empty() || v.find_first_of("/\\") != std::string::npos) { bad_value(k, v, "invalid name"); }
          c.name = v;
       }},
      {"discretization", [](ExperimentConfig &c, const std::string &k, const std::string &v) {
          c.discretization = wrap_enum(k, v, parse_discretization);
       }},
      {"h", [](ExperimentConfig &c, const std::string &k, const std::string &v) { c.cells_per_side = to_cells(k, v); }},
      {"props.dt", [](ExperimentConfig &c, const std::string &k, const std::string &v) { c.props.dt = to_double(k, v); }},
      {"props.young",
       [](ExperimentConfig &c, const std::string &k, const std::string &v) { c.props.young = to_double(k, v); }},
      {"props.poisson",
       [](ExperimentConfig &c, const std::string &k, const std::string &v) { c.props.poisson = to_double(k, v); }},
      {"props.biot_b",
       [](ExperimentConfig &c, const std::string &k, const std::string &v) { c.props.biot_b = to_double(k, v); }},
      {"props.s_eps",
       [](ExperimentConfig &c, const std::string &k, const std::string &v) { c.props.s_eps = to_double(k, v); }},
      {"props.kappa",
       [](ExperimentConfig &c, const std::string &k, const std::string &v) { c.props.kappa = to_double(k, v); }},
      {"props.mu", [](ExperimentConfig &c, const std::string &k, const std::string &v) { c.props.mu = to_double(k, v); }},
      {"assembly.stab", [](ExperimentConfig &c, const std::string &k,
                           const std::string &v) { c.assembly.stab_coefficient = to_double(k, v); }},
      {"assembly.top_load",
       [](ExperimentConfig &c, const std::string &k, const std::string &v) { c.assembly.top_load = to_double(k, v); }},
      {"recipe.preset", [](ExperimentConfig &c, const std::string &k, const std::string &v) {
          if (v == "s1") { c.recipe = recipe_s1(); }
          else if (v == "s1-omega") { c.recipe = recipe_s1(0.1); }
          else if (v == "s2") { c.recipe = recipe_s2(); }
          else if (v == "exact") { c.recipe = recipe_exact(); }
          else { bad_value(k, v, "invalid value (s1, s1-omega, s2, exact)"); }
       }},
      {"recipe.a_form", [](ExperimentConfig &c, const std::string &k,
                           const std::string &v) { c.recipe.a_form = wrap_enum(k, v, parse_a_form); }},
      {"recipe.a_pcg_tol",
       [](ExperimentConfig &c, const std::string &k, const std::string &v) { c.recipe.a_pcg_tol = to_double(k, v); }},
      {"recipe.a_pcg_maxit",
       [](ExperimentConfig &c, const std::string &k, const std::string &v) { c.recipe.a_pcg_maxit = to_uint(k, v); }},
      {"recipe.s_variant", [](ExperimentConfig &c, const std::string &k,
                              const std::string &v) { c.recipe.s_variant = wrap_enum(k, v, parse_s_variant); }},
      {"recipe.s_form", [](ExperimentConfig &c, const std::string &k, const std::string &v) {
          if (v == "default") { c.recipe.s_form.reset(); }
          else { c.recipe.s_form = wrap_enum(k, v, parse_s_form); }
       }},
      {"recipe.omega",
       [](ExperimentConfig &c, const std::string &k, const std::string &v) { c.recipe.omega = to_double(k, v); }},
      {"recipe.x_form", [](ExperimentConfig &c, const std::string &k,
                           const std::string &v) { c.recipe.x_form = wrap_enum(k, v, parse_x_form); }},
      {"solver.method", [](ExperimentConfig &c, const std::string &k,
                           const std::string &v) { c.solver = wrap_enum(k, v, parse_solver); }},
      {"solver.tol", [](ExperimentConfig &c, const std::string &k, const std::string &v) {
          if (v == "default") { c.tol.reset(); }
          else { c.tol = to_double(k, v); }
       }},
      {"solver.maxit", [](ExperimentConfig &c, const std::string &k, const std::string &v) { c.maxit = to_uint(k, v); }},
      {"solver.restart",
       [](ExperimentConfig &c, const std::string &k, const std::string &v) { c.restart = to_uint(k, v); }},
      {"rhs.mode", [](ExperimentConfig &c, const std::string &k,
                      const std::string &v) { c.rhs_mode = wrap_enum(k, v, parse_rhs_mode); }},
      {"rhs.seed", [](ExperimentConfig &c, const std::string &k, const std::string &v) { c.seed = to_uint(k, v); }},
      {"analysis", [](ExperimentConfig &c, const std::string &k,
                      const std::string &v) { c.analysis = wrap_enum(k, v, parse_analysis); }},
      {"spectrum.max_dense_n",
       [](ExperimentConfig &c, const std::string &k, const std::string &v) { c.max_dense_n = to_uint(k, v); }},
   };
   return table;
}

std::string num(double v)
{
   char buf[40];
   std::snprintf(buf, sizeof buf, "%.17g", v);
   return buf;
}
} // namespace

std::string to_string(SolverKind s)
{
   switch (s)
   {
   case SolverKind::gmres: return "gmres";
   case SolverKind::minres: return "minres";
   case SolverKind::pcg_block11: return "pcg-block11";
   }
   return "?";
}

std::string to_string(RhsMode r)
{
   return r == RhsMode::manufactured ? "manufactured" : "ones";
}

std::string to_string(AnalysisKind a)
{
   switch (a)
   {
   case AnalysisKind::none: return "none";
   case AnalysisKind::indicators: return "indicators";
   case AnalysisKind::bounds: return "bounds";
   case AnalysisKind::spectrum: return "spectrum";
   case AnalysisKind::verify: return "verify";
   }
   return "?";
}

SolverKind parse_solver(const std::string &s)
{
   for (SolverKind k : {SolverKind::gmres, SolverKind::minres, SolverKind::pcg_block11})
   {
      if (to_string(k) == s) { return k; }
   }
   throw ConfigError(kModule, "unknown solver '" + s + "' (gmres, minres, pcg-block11)");
}

RhsMode parse_rhs_mode(const std::string &s)
{
   if (s == "manufactured") { return RhsMode::manufactured; }
   if (s == "ones") { return RhsMode::ones; }
   throw ConfigError(kModule, "unknown rhs mode '" + s + "' (manufactured, ones)");
}

AnalysisKind parse_analysis(const std::string &s)
{
   for (AnalysisKind k : {AnalysisKind::none, AnalysisKind::indicators, AnalysisKind::bounds, AnalysisKind::spectrum,
                          AnalysisKind::verify})
   {
      if (to_string(k) == s) { return k; }
   }
   throw ConfigError(kModule, "unknown analysis '" + s + "' (none, indicators, bounds, spectrum, verify)");
}

double ExperimentConfig::effective_tol() const
{
   if (tol) { return *tol; }
   return solver == SolverKind::gmres ? 1e-13 : 1e-10;
}

void ExperimentConfig::validate() const
{
   props.validate();
   recipe.validate();
   if (cells_per_side == 0) { throw ConfigError(kModule, "h must be 1/N with N >= 1"); }
   if (!(effective_tol() > 0.0 && effective_tol() < 1.0)) { throw ConfigError(kModule, "solver.tol must lie in (0, 1)"); }
   if (max_dense_n == 0) { throw ConfigError(kModule, "spectrum.max_dense_n must be positive"); }
}

void apply_setting(ExperimentConfig &cfg, const std::string &key, const std::string &value)
{
   const auto &table = setters();
   const auto it = table.find(key);
   if (it == table.end()) { throw ConfigError(kModule, "unknown key '" + key + "'"); }
   it->second(cfg, key, value);
}

ExperimentConfig parse_config(std::istream &in, ExperimentConfig base)
{
   struct Entry
   {
      std::size_t line;
      std::string key, value;
   };
   std::vector<Entry> entries;
   std::string raw;
   std::size_t lineno = 0;
   while (std::getline(in, raw))
   {
      ++lineno;
      const std::string line = trim(raw.substr(0, raw.find('#')));
      if (line.empty()) { continue; }
      const auto eq = line.find('=');
      if (eq == std::string::npos) { throw ParseError(kModule, lineno, "expected key = value, got '" + line + "'"); }
      Entry e{lineno, trim(line.substr(0, eq)), trim(line.substr(eq + 1))};
      if (e.key.empty()) { throw ParseError(kModule, lineno, "empty key"); }
      entries.push_back(std::move(e));
   }
   std::stable_partition(entries.begin(), entries.end(), [](const Entry &e) { return e.key == "recipe.preset"; });
   for (const auto &e : entries)
   {
      try
      {
         apply_setting(base, e.key, e.value);
      }
      catch (const ConfigError &err)
      {
         std::string what = err.what();
         const std::string prefix = std::string(kModule) + ": ";
         if (what.rfind(prefix, 0) == 0) { what = what.substr(prefix.size()); }
         throw ParseError(kModule, e.line, what);
      }
   }
   return base;
}

ExperimentConfig parse_config_text(const std::string &text, ExperimentConfig base)
{
   std::istringstream in(text);
   return parse_config(in, std::move(base));
}

ExperimentConfig load_config(const std::filesystem::path &file, ExperimentConfig base)
{
   std::ifstream in(file);
   if (!in) { throw ConfigError(kModule, "cannot open config file '" + file.string() + "'"); }
   ExperimentConfig cfg = parse_config(in, std::move(base));
   if (cfg.name == "experiment") { cfg.name = file.stem().string(); }
   return cfg;
}

std::string config_echo(const ExperimentConfig &c)
{
   std::ostringstream os;
   os << "name = " << c.name << "\n"
      << "discretization = " << to_string(c.discretization) << "\n"
      << "h = 1/" << c.cells_per_side << "\n"
      << "props.dt = " << num(c.props.dt) << "\n"
      << "props.young = " << num(c.props.young) << "\n"
      << "props.poisson = " << num(c.props.poisson) << "\n"
      << "props.biot_b = " << num(c.props.biot_b) << "\n"
      << "props.s_eps = " << num(c.props.s_eps) << "\n"
      << "props.kappa = " << num(c.props.kappa) << "\n"
      << "props.mu = " << num(c.props.mu) << "\n"
      << "assembly.stab = " << num(c.assembly.stab_coefficient) << "\n"
      << "assembly.top_load = " << num(c.assembly.top_load) << "\n"
      << "recipe.a_form = " << to_string(c.recipe.a_form) << "\n"
      << "recipe.a_pcg_tol = " << num(c.recipe.a_pcg_tol) << "\n"
      << "recipe.a_pcg_maxit = " << c.recipe.a_pcg_maxit << "\n"
      << "recipe.s_variant = " << to_string(c.recipe.s_variant) << "\n"
      << "recipe.s_form = " << (c.recipe.s_form ? to_string(*c.recipe.s_form) : std::string("default")) << "\n"
      << "recipe.omega = " << num(c.recipe.omega) << "\n"
      << "recipe.x_form = " << to_string(c.recipe.x_form) << "\n"
      << "solver.method = " << to_string(c.solver) << "\n"
      << "solver.tol = " << (c.tol ? num(*c.tol) : std::string("default")) << "\n"
      << "solver.maxit = " << c.maxit << "\n"
      << "solver.restart = " << c.restart << "\n"
      << "rhs.mode = " << to_string(c.rhs_mode) << "\n"
      << "rhs.seed = " << c.seed << "\n"
      << "analysis = " << to_string(c.analysis) << "\n"
      << "spectrum.max_dense_n = " << c.max_dense_n << "\n";
   return os.str();
}

} // namespace biotdsp
