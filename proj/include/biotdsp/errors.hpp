#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace biotdsp
{

/// Base class of every error raised by the library. The module label names
/// the component that detected the problem (e.g. "sparse-core").
class Error : public std::runtime_error
{
public:
   Error(std::string module, const std::string &what)
      : std::runtime_error(module + ": " + what), module_(std::move(module)) {}

   const std::string &module() const { return module_; }

private:
   std::string module_;
};

/// Operand sizes do not conform.
class DimensionError : public Error
{
public:
   using Error::Error;
};

/// A documented precondition of an operation was violated by the caller.
class ContractError : public Error
{
public:
   using Error::Error;
};

/// Nonpositive pivot during a Cholesky-type factorization.
class BreakdownError : public Error
{
public:
   BreakdownError(std::string module, std::size_t row, double pivot)
      : Error(std::move(module), "nonpositive pivot " + std::to_string(pivot) +
              " at row " + std::to_string(row)),
        row_(row), pivot_(pivot) {}

   std::size_t row() const { return row_; }
   double pivot() const { return pivot_; }

private:
   std::size_t row_;
   double pivot_;
};

/// Zero diagonal in a triangular factor.
class SingularFactorError : public Error
{
public:
   using Error::Error;
};

/// An iterative kernel (e.g. the QR eigenvalue iteration) did not converge.
class ConvergenceError : public Error
{
public:
   ConvergenceError(std::string module, const std::string &what, double residual)
      : Error(std::move(module), what), residual_(residual) {}

   double residual() const { return residual_; }

private:
   double residual_;
};

/// Malformed input text; carries the 1-based line number.
class ParseError : public Error
{
public:
   ParseError(std::string module, std::size_t line, const std::string &what)
      : Error(std::move(module), "line " + std::to_string(line) + ": " + what),
        line_(line) {}

   std::size_t line() const { return line_; }

private:
   std::size_t line_;
};

/// Invalid configuration value (material data, mesh size, recipe, ...).
class ConfigError : public Error
{
public:
   using Error::Error;
};

/// The assembled blocks fail a structural invariant.
class AssemblyError : public Error
{
public:
   using Error::Error;
};

/// The requested operation is not available for this operand kind or scale.
class UnsupportedError : public Error
{
public:
   using Error::Error;
};

} // namespace biotdsp
