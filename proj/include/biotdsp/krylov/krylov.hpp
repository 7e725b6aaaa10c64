#pragma once

#include "biotdsp/sparse/linear_operator.hpp"

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace biotdsp
{

/// Outcome of one iterative solve. residual_history[0] is the initial
/// residual norm and residual_history[k] the norm after iteration k, so the
/// history has iterations + 1 entries. The norm is the one the method
/// minimizes or monitors: 2-norm for GMRES and PCG, preconditioned norm for
/// MINRES.
struct SolveStats
{
   std::string method;
   std::size_t iterations = 0;
   std::vector<double> residual_history;
   bool converged = false;
   /// ||x - x_true|| / ||x_true|| when the caller supplies x_true.
   std::optional<double> relative_error;
   /// ||b - A x|| / ||b|| recomputed after the solve.
   double true_relative_residual = 0.0;
   double wall_time = 0.0;
   /// Set when the iteration stopped on an invariant-subspace breakdown.
   bool lucky_breakdown = false;

   double final_relative_residual() const;
};

struct SolveResult
{
   Vector x;
   SolveStats stats;
};

/// Right-preconditioned GMRES with modified Gram-Schmidt Arnoldi and Givens
/// rotations, zero initial guess. Stops when the residual estimate relative
/// to ||b|| drops to tol, on a happy breakdown (subdiagonal below
/// 1e-14 ||b||), or after maxit iterations (not converged, no exception).
/// restart = 0 runs full GMRES.
SolveResult gmres_right(const LinearOperator &A, const LinearOperator &Pinv,
                        std::span<const double> b, double tol, std::size_t maxit,
                        std::size_t restart = 0);

/// Preconditioned MINRES for symmetric A with SPD preconditioner, zero
/// initial guess; stops on the preconditioned residual norm relative to its
/// initial value. Throws ContractError when r^T P^{-1} r < 0 is observed.
SolveResult minres(const LinearOperator &A, const LinearOperator &Pinv, std::span<const double> b,
                   double tol, std::size_t maxit);

/// Preconditioned conjugate gradients, zero initial guess, stops on
/// ||r|| / ||b|| <= tol. Throws ContractError on p^T A p <= 0 or
/// r^T P^{-1} r < 0.
SolveResult pcg(const LinearOperator &A, const LinearOperator &Pinv, std::span<const double> b,
                double tol, std::size_t maxit);

/// ||x - x_true|| / ||x_true||
double relative_error(std::span<const double> x, std::span<const double> x_true);

/// Default iteration cap min(N, 2000).
std::size_t default_maxit(std::size_t n);

} // namespace biotdsp
