#include "biotdsp/sparse/csr_matrix.hpp"

#include "biotdsp/errors.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

namespace biotdsp
{

namespace
{
const char *kModule = "sparse-core";

void require_size(std::size_t got, std::size_t want, const char *what)
{
   if (got != want)
   {
      throw DimensionError(kModule, std::string(what) + ": expected length " +
                           std::to_string(want) + ", got " + std::to_string(got));
   }
}
} // namespace

CsrMatrix::CsrMatrix(std::size_t rows, std::size_t cols)
   : rows_(rows), cols_(cols), row_ptr_(rows + 1, 0) {}

CsrMatrix::CsrMatrix(std::size_t rows, std::size_t cols, std::vector<std::size_t> row_ptr,
                     std::vector<std::size_t> col_idx, Vector values)
   : rows_(rows), cols_(cols), row_ptr_(std::move(row_ptr)), col_idx_(std::move(col_idx)),
     values_(std::move(values))
{
   if (row_ptr_.size() != rows_ + 1 || row_ptr_.front() != 0 ||
       row_ptr_.back() != col_idx_.size() || col_idx_.size() != values_.size())
   {
      throw ContractError(kModule, "inconsistent CSR arrays");
   }
   for (std::size_t i = 0; i < rows_; ++i)
   {
      if (row_ptr_[i] > row_ptr_[i + 1])
      {
         throw ContractError(kModule, "row pointers decrease at row " + std::to_string(i));
      }
      for (std::size_t k = row_ptr_[i]; k < row_ptr_[i + 1]; ++k)
      {
         if (col_idx_[k] >= cols_ || (k > row_ptr_[i] && col_idx_[k] <= col_idx_[k - 1]))
         {
            throw ContractError(kModule, "column indices not strictly increasing in row " +
                                std::to_string(i));
         }
      }
   }
}

double CsrMatrix::at(std::size_t i, std::size_t j) const
{
   auto cols = row_cols(i);
   auto it = std::lower_bound(cols.begin(), cols.end(), j);
   if (it == cols.end() || *it != j) { return 0.0; }
   return values_[row_ptr_[i] + static_cast<std::size_t>(it - cols.begin())];
}

double CsrMatrix::max_abs() const
{
   double m = 0.0;
   for (double v : values_) { m = std::max(m, std::abs(v)); }
   return m;
}

CsrMatrix CsrMatrix::identity(std::size_t n)
{
   return diagonal(Vector(n, 1.0));
}

CsrMatrix CsrMatrix::diagonal(std::span<const double> d)
{
   const std::size_t n = d.size();
   std::vector<std::size_t> rp(n + 1), ci(n);
   std::iota(rp.begin(), rp.end(), std::size_t{0});
   std::iota(ci.begin(), ci.end(), std::size_t{0});
   return CsrMatrix(n, n, std::move(rp), std::move(ci), Vector(d.begin(), d.end()));
}

void TripletList::add(std::size_t i, std::size_t j, double v)
{
   if (i >= rows_ || j >= cols_)
   {
      throw DimensionError(kModule, "triplet (" + std::to_string(i) + "," + std::to_string(j) +
                           ") outside " + std::to_string(rows_) + "x" + std::to_string(cols_));
   }
   entries_.push_back({i, j, v});
}

CsrMatrix TripletList::to_csr(bool drop_zeros) const
{
   std::vector<Entry> e = entries_;
   // Sorting on the value as well makes the summation order canonical.
   std::sort(e.begin(), e.end(), [](const Entry &a, const Entry &b) {
      if (a.i != b.i) { return a.i < b.i; }
      if (a.j != b.j) { return a.j < b.j; }
      return a.v < b.v;
   });
   std::vector<std::size_t> rp(rows_ + 1, 0), ci;
   Vector vals;
   ci.reserve(e.size());
   vals.reserve(e.size());
   std::size_t k = 0;
   while (k < e.size())
   {
      const std::size_t i = e[k].i, j = e[k].j;
      double s = 0.0;
      while (k < e.size() && e[k].i == i && e[k].j == j) { s += e[k++].v; }
      if (drop_zeros && s == 0.0) { continue; }
      ci.push_back(j);
      vals.push_back(s);
      ++rp[i + 1];
   }
   for (std::size_t i = 0; i < rows_; ++i) { rp[i + 1] += rp[i]; }
   return CsrMatrix(rows_, cols_, std::move(rp), std::move(ci), std::move(vals));
}

void spmv(const CsrMatrix &M, std::span<const double> x, std::span<double> y)
{
   require_size(x.size(), M.cols(), "spmv input");
   require_size(y.size(), M.rows(), "spmv output");
   auto rp = M.row_ptr();
   auto ci = M.col_idx();
   auto v = M.values();
   for (std::size_t i = 0; i < M.rows(); ++i)
   {
      double s = 0.0;
      for (std::size_t k = rp[i]; k < rp[i + 1]; ++k) { s += v[k] * x[ci[k]]; }
      y[i] = s;
   }
}

Vector spmv(const CsrMatrix &M, std::span<const double> x)
{
   Vector y(M.rows());
   spmv(M, x, y);
   return y;
}

void spmv_transpose(const CsrMatrix &M, std::span<const double> x, std::span<double> y)
{
   require_size(x.size(), M.rows(), "spmv_transpose input");
   require_size(y.size(), M.cols(), "spmv_transpose output");
   std::fill(y.begin(), y.end(), 0.0);
   auto rp = M.row_ptr();
   auto ci = M.col_idx();
   auto v = M.values();
   for (std::size_t i = 0; i < M.rows(); ++i)
   {
      for (std::size_t k = rp[i]; k < rp[i + 1]; ++k) { y[ci[k]] += v[k] * x[i]; }
   }
}

Vector spmv_transpose(const CsrMatrix &M, std::span<const double> x)
{
   Vector y(M.cols());
   spmv_transpose(M, x, y);
   return y;
}

CsrMatrix transpose(const CsrMatrix &M)
{
   std::vector<std::size_t> rp(M.cols() + 1, 0);
   for (std::size_t c : M.col_idx()) { ++rp[c + 1]; }
   for (std::size_t j = 0; j < M.cols(); ++j) { rp[j + 1] += rp[j]; }
   std::vector<std::size_t> ci(M.nnz()), next(rp.begin(), rp.end() - 1);
   Vector vals(M.nnz());
   for (std::size_t i = 0; i < M.rows(); ++i)
   {
      auto cols = M.row_cols(i);
      auto rv = M.row_vals(i);
      for (std::size_t k = 0; k < cols.size(); ++k)
      {
         const std::size_t dst = next[cols[k]]++;
         ci[dst] = i;
         vals[dst] = rv[k];
      }
   }
   return CsrMatrix(M.cols(), M.rows(), std::move(rp), std::move(ci), std::move(vals));
}

CsrMatrix add(const CsrMatrix &X, const CsrMatrix &Y, double alpha, double beta)
{
   if (X.rows() != Y.rows() || X.cols() != Y.cols())
   {
      throw DimensionError(kModule, "add: operand shapes differ");
   }
   std::vector<std::size_t> rp(X.rows() + 1, 0), ci;
   Vector vals;
   ci.reserve(X.nnz() + Y.nnz());
   vals.reserve(X.nnz() + Y.nnz());
   for (std::size_t i = 0; i < X.rows(); ++i)
   {
      auto xc = X.row_cols(i);
      auto xv = X.row_vals(i);
      auto yc = Y.row_cols(i);
      auto yv = Y.row_vals(i);
      std::size_t a = 0, b = 0;
      while (a < xc.size() || b < yc.size())
      {
         if (b == yc.size() || (a < xc.size() && xc[a] < yc[b]))
         {
            ci.push_back(xc[a]);
            vals.push_back(alpha * xv[a++]);
         }
         else if (a == xc.size() || yc[b] < xc[a])
         {
            ci.push_back(yc[b]);
            vals.push_back(beta * yv[b++]);
         }
         else
         {
            ci.push_back(xc[a]);
            vals.push_back(alpha * xv[a++] + beta * yv[b++]);
         }
      }
      rp[i + 1] = ci.size();
   }
   return CsrMatrix(X.rows(), X.cols(), std::move(rp), std::move(ci), std::move(vals));
}

CsrMatrix multiply(const CsrMatrix &X, const CsrMatrix &Y)
{
   if (X.cols() != Y.rows())
   {
      throw DimensionError(kModule, "multiply: inner dimensions differ");
   }
   std::vector<std::size_t> rp(X.rows() + 1, 0), ci;
   Vector vals;
   Vector acc(Y.cols(), 0.0);
   std::vector<char> used(Y.cols(), 0);
   std::vector<std::size_t> touched;
   for (std::size_t i = 0; i < X.rows(); ++i)
   {
      touched.clear();
      auto xc = X.row_cols(i);
      auto xv = X.row_vals(i);
      for (std::size_t a = 0; a < xc.size(); ++a)
      {
         auto yc = Y.row_cols(xc[a]);
         auto yv = Y.row_vals(xc[a]);
         for (std::size_t b = 0; b < yc.size(); ++b)
         {
            if (!used[yc[b]])
            {
               used[yc[b]] = 1;
               touched.push_back(yc[b]);
            }
            acc[yc[b]] += xv[a] * yv[b];
         }
      }
      std::sort(touched.begin(), touched.end());
      for (std::size_t j : touched)
      {
         ci.push_back(j);
         vals.push_back(acc[j]);
         acc[j] = 0.0;
         used[j] = 0;
      }
      rp[i + 1] = ci.size();
   }
   return CsrMatrix(X.rows(), Y.cols(), std::move(rp), std::move(ci), std::move(vals));
}

CsrMatrix multiply_scaled_transpose(const CsrMatrix &X, std::span<const double> d)
{
   require_size(d.size(), X.cols(), "multiply_scaled_transpose scaling");
   CsrMatrix Xs = scale_rows_cols(X, {}, d);
   return multiply(Xs, transpose(X));
}

CsrMatrix scale(const CsrMatrix &M, double alpha)
{
   Vector v(M.values().begin(), M.values().end());
   for (double &x : v) { x *= alpha; }
   return CsrMatrix(M.rows(), M.cols(), {M.row_ptr().begin(), M.row_ptr().end()},
                    {M.col_idx().begin(), M.col_idx().end()}, std::move(v));
}

CsrMatrix scale_rows_cols(const CsrMatrix &M, std::span<const double> left,
                          std::span<const double> right)
{
   if (!left.empty()) { require_size(left.size(), M.rows(), "row scaling"); }
   if (!right.empty()) { require_size(right.size(), M.cols(), "column scaling"); }
   Vector v(M.values().begin(), M.values().end());
   auto rp = M.row_ptr();
   auto ci = M.col_idx();
   for (std::size_t i = 0; i < M.rows(); ++i)
   {
      for (std::size_t k = rp[i]; k < rp[i + 1]; ++k)
      {
         if (!left.empty()) { v[k] *= left[i]; }
         if (!right.empty()) { v[k] *= right[ci[k]]; }
      }
   }
   return CsrMatrix(M.rows(), M.cols(), {rp.begin(), rp.end()}, {ci.begin(), ci.end()},
                    std::move(v));
}

Vector diagonal_of(const CsrMatrix &M)
{
   const std::size_t n = std::min(M.rows(), M.cols());
   Vector d(n, 0.0);
   for (std::size_t i = 0; i < n; ++i) { d[i] = M.at(i, i); }
   return d;
}

CsrMatrix drop_small(const CsrMatrix &M, double tol)
{
   std::vector<std::size_t> rp(M.rows() + 1, 0), ci;
   Vector vals;
   for (std::size_t i = 0; i < M.rows(); ++i)
   {
      auto c = M.row_cols(i);
      auto v = M.row_vals(i);
      for (std::size_t k = 0; k < c.size(); ++k)
      {
         if (std::abs(v[k]) > tol)
         {
            ci.push_back(c[k]);
            vals.push_back(v[k]);
         }
      }
      rp[i + 1] = ci.size();
   }
   return CsrMatrix(M.rows(), M.cols(), std::move(rp), std::move(ci), std::move(vals));
}

CsrMatrix lower_triangle(const CsrMatrix &M)
{
   std::vector<std::size_t> rp(M.rows() + 1, 0), ci;
   Vector vals;
   for (std::size_t i = 0; i < M.rows(); ++i)
   {
      auto c = M.row_cols(i);
      auto v = M.row_vals(i);
      for (std::size_t k = 0; k < c.size() && c[k] <= i; ++k)
      {
         ci.push_back(c[k]);
         vals.push_back(v[k]);
      }
      rp[i + 1] = ci.size();
   }
   return CsrMatrix(M.rows(), M.cols(), std::move(rp), std::move(ci), std::move(vals));
}

CsrMatrix extract(const CsrMatrix &M, std::span<const std::size_t> rows,
                  std::span<const std::size_t> cols)
{
   std::vector<std::size_t> colmap(M.cols(), static_cast<std::size_t>(-1));
   for (std::size_t k = 0; k < cols.size(); ++k)
   {
      if (cols[k] >= M.cols()) { throw DimensionError(kModule, "extract: column out of range"); }
      colmap[cols[k]] = k;
   }
   TripletList t(rows.size(), cols.size());
   for (std::size_t r = 0; r < rows.size(); ++r)
   {
      if (rows[r] >= M.rows()) { throw DimensionError(kModule, "extract: row out of range"); }
      auto c = M.row_cols(rows[r]);
      auto v = M.row_vals(rows[r]);
      for (std::size_t k = 0; k < c.size(); ++k)
      {
         if (colmap[c[k]] != static_cast<std::size_t>(-1)) { t.add(r, colmap[c[k]], v[k]); }
      }
   }
   return t.to_csr();
}

double symmetry_defect(const CsrMatrix &M)
{
   if (M.rows() != M.cols()) { return INFINITY; }
   const double scale = M.max_abs();
   if (scale == 0.0) { return 0.0; }
   CsrMatrix D = add(M, transpose(M), 1.0, -1.0);
   return D.max_abs() / scale;
}

bool is_symmetric(const CsrMatrix &M, double rel_tol)
{
   return symmetry_defect(M) <= rel_tol;
}

double dot(std::span<const double> x, std::span<const double> y)
{
   require_size(y.size(), x.size(), "dot");
   double s = 0.0;
   for (std::size_t i = 0; i < x.size(); ++i) { s += x[i] * y[i]; }
   return s;
}

double norm2(std::span<const double> x)
{
   return std::sqrt(dot(x, x));
}

void axpy(double alpha, std::span<const double> x, std::span<double> y)
{
   require_size(y.size(), x.size(), "axpy");
   for (std::size_t i = 0; i < x.size(); ++i) { y[i] += alpha * x[i]; }
}

} // namespace biotdsp
