#include "biotdsp/sparse/matrix_market.hpp"

#include "biotdsp/errors.hpp"

#include <algorithm>
#include <cctype>
#include <cstdio>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>
#include <string>

namespace biotdsp
{

namespace
{
const char *kModule = "sparse-core";

std::string lower(std::string s)
{
   std::transform(s.begin(), s.end(), s.begin(),
                  [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
   return s;
}

struct Banner
{
   std::string format; // coordinate | array
   bool symmetric = false;
};

Banner read_banner(std::istream &in, std::size_t &lineno)
{
   std::string line;
   if (!std::getline(in, line)) { throw ParseError(kModule, 1, "empty input"); }
   lineno = 1;
   std::istringstream ss(line);
   std::string tag, object, format, field, symmetry;
   ss >> tag >> object >> format >> field >> symmetry;
   if (tag != "%%MatrixMarket") { throw ParseError(kModule, lineno, "missing %%MatrixMarket banner"); }
   object = lower(object);
   format = lower(format);
   field = lower(field);
   symmetry = lower(symmetry);
   if (object != "matrix") { throw ParseError(kModule, lineno, "unsupported object '" + object + "'"); }
   if (format != "coordinate" && format != "array")
   {
      throw ParseError(kModule, lineno, "unsupported format '" + format + "'");
   }
   if (field != "real" && field != "double" && field != "integer")
   {
      throw ParseError(kModule, lineno, "unsupported field '" + field + "'");
   }
   if (symmetry != "general" && symmetry != "symmetric")
   {
      throw ParseError(kModule, lineno, "unsupported symmetry '" + symmetry + "'");
   }
   return {format, symmetry == "symmetric"};
}

/// Next non-comment, non-blank line.
bool next_data_line(std::istream &in, std::string &line, std::size_t &lineno)
{
   while (std::getline(in, line))
   {
      ++lineno;
      auto pos = line.find_first_not_of(" \t\r");
      if (pos == std::string::npos || line[pos] == '%') { continue; }
      return true;
   }
   return false;
}

std::ofstream open_out(const std::filesystem::path &path)
{
   std::ofstream out(path);
   if (!out) { throw ConfigError(kModule, "cannot open '" + path.string() + "' for writing"); }
   return out;
}

std::ifstream open_in(const std::filesystem::path &path)
{
   std::ifstream in(path);
   if (!in) { throw ConfigError(kModule, "cannot open '" + path.string() + "'"); }
   return in;
}

std::string fmt17(double v)
{
   char buf[40];
   std::snprintf(buf, sizeof buf, "%.17g", v);
   return buf;
}
} // namespace

CsrMatrix mm_read(std::istream &in)
{
   std::size_t lineno = 0;
   Banner b = read_banner(in, lineno);
   if (b.format != "coordinate") { throw ParseError(kModule, lineno, "expected coordinate format"); }
   std::string line;
   if (!next_data_line(in, line, lineno)) { throw ParseError(kModule, lineno + 1, "missing size line"); }
   std::istringstream sz(line);
   long long rows = -1, cols = -1, nnz = -1;
   if (!(sz >> rows >> cols >> nnz) || rows < 0 || cols < 0 || nnz < 0)
   {
      throw ParseError(kModule, lineno, "malformed size line");
   }
   if (b.symmetric && rows != cols) { throw ParseError(kModule, lineno, "symmetric matrix must be square"); }
   TripletList t(static_cast<std::size_t>(rows), static_cast<std::size_t>(cols));
   t.reserve(static_cast<std::size_t>(b.symmetric ? 2 * nnz : nnz));
   for (long long k = 0; k < nnz; ++k)
   {
      if (!next_data_line(in, line, lineno))
      {
         throw ParseError(kModule, lineno + 1, "expected " + std::to_string(nnz) + " entries, got " +
                          std::to_string(k));
      }
      std::istringstream es(line);
      long long i = 0, j = 0;
      double v = 0.0;
      if (!(es >> i >> j >> v)) { throw ParseError(kModule, lineno, "malformed entry"); }
      if (i < 1 || j < 1 || i > rows || j > cols) { throw ParseError(kModule, lineno, "index out of range"); }
      if (b.symmetric && j > i) { throw ParseError(kModule, lineno, "symmetric entry above the diagonal"); }
      t.add(static_cast<std::size_t>(i - 1), static_cast<std::size_t>(j - 1), v);
      if (b.symmetric && i != j) { t.add(static_cast<std::size_t>(j - 1), static_cast<std::size_t>(i - 1), v); }
   }
   if (next_data_line(in, line, lineno)) { throw ParseError(kModule, lineno, "trailing data after entries"); }
   return t.to_csr();
}

CsrMatrix mm_read(const std::filesystem::path &path)
{
   auto in = open_in(path);
   return mm_read(in);
}

void mm_write(const CsrMatrix &M, std::ostream &out, bool as_symmetric)
{
   if (as_symmetric && !is_symmetric(M))
   {
      throw ContractError(kModule, "mm_write: matrix is not symmetric");
   }
   std::size_t count = 0;
   for (std::size_t i = 0; i < M.rows(); ++i)
   {
      for (std::size_t j : M.row_cols(i))
      {
         if (!as_symmetric || j <= i) { ++count; }
      }
   }
   out << "%%MatrixMarket matrix coordinate real " << (as_symmetric ? "symmetric" : "general") << "\n";
   out << M.rows() << " " << M.cols() << " " << count << "\n";
   for (std::size_t i = 0; i < M.rows(); ++i)
   {
      auto c = M.row_cols(i);
      auto v = M.row_vals(i);
      for (std::size_t k = 0; k < c.size(); ++k)
      {
         if (as_symmetric && c[k] > i) { continue; }
         out << i + 1 << " " << c[k] + 1 << " " << fmt17(v[k]) << "\n";
      }
   }
}

void mm_write(const CsrMatrix &M, const std::filesystem::path &path, bool as_symmetric)
{
   auto out = open_out(path);
   mm_write(M, out, as_symmetric);
}

Vector mm_read_vector(std::istream &in)
{
   std::size_t lineno = 0;
   Banner b = read_banner(in, lineno);
   if (b.format != "array") { throw ParseError(kModule, lineno, "expected array format"); }
   std::string line;
   if (!next_data_line(in, line, lineno)) { throw ParseError(kModule, lineno + 1, "missing size line"); }
   std::istringstream sz(line);
   long long rows = -1, cols = -1;
   if (!(sz >> rows >> cols) || rows < 0 || cols != 1)
   {
      throw ParseError(kModule, lineno, "array size line must read '<n> 1'");
   }
   Vector v(static_cast<std::size_t>(rows));
   for (auto &x : v)
   {
      if (!next_data_line(in, line, lineno)) { throw ParseError(kModule, lineno + 1, "too few values"); }
      std::istringstream es(line);
      if (!(es >> x)) { throw ParseError(kModule, lineno, "malformed value"); }
   }
   return v;
}

Vector mm_read_vector(const std::filesystem::path &path)
{
   auto in = open_in(path);
   return mm_read_vector(in);
}

void mm_write_vector(std::span<const double> v, std::ostream &out)
{
   out << "%%MatrixMarket matrix array real general\n" << v.size() << " 1\n";
   for (double x : v) { out << fmt17(x) << "\n"; }
}

void mm_write_vector(std::span<const double> v, const std::filesystem::path &path)
{
   auto out = open_out(path);
   mm_write_vector(v, out);
}

} // namespace biotdsp
