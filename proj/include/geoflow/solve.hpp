#pragma once

#include <geoflow/types.hpp>

#include <Eigen/Core>

#include <memory>
#include <string>

namespace geoflow {

enum class SolverMethod { ConjugateGradient, DirectFactorization };

std::string to_string(SolverMethod method);
SolverMethod solver_method_from_string(const std::string& name);

struct SolverConfig
{
    SolverMethod method = SolverMethod::DirectFactorization;
    /// Bound on ||A x - b|| / ||b||, checked against a freshly recomputed residual.
    double tolerance = 1e-10;
    /// 0 selects 10 * n.
    long max_iterations = 0;
    /// Jacobi preconditioning for conjugate gradient.
    bool jacobi = true;

    /// Throws ConfigError.
    void validate() const;
};

struct SolveResult
{
    Eigen::MatrixXd x;
    /// Worst relative residual over the columns.
    double residual = 0.0;
    long iterations = 0;
};

/// ||A x - b|| / ||b|| recomputed from scratch (absolute residual when b = 0).
double relative_residual(const SparseOperator& A, const Eigen::VectorXd& x, const Eigen::VectorXd& b);

/// Symmetric positive definite solver. The factorization (or preconditioner)
/// is built once and reused for every right-hand-side column.
class SpdSolver
{
public:
    SpdSolver(const SparseOperator& A, SolverConfig config);
    ~SpdSolver();
    SpdSolver(SpdSolver&&) noexcept;
    SpdSolver& operator=(SpdSolver&&) noexcept;

    /// Throws SolverError on dimension mismatch or when the tolerance cannot be met.
    SolveResult solve(const Eigen::MatrixXd& B) const;

    const SolverConfig& config() const { return config_; }

private:
    struct Impl;
    SolverConfig config_;
    std::unique_ptr<Impl> impl_;
};

SolveResult solve_spd(const SparseOperator& A, const Eigen::MatrixXd& B, const SolverConfig& config);

} // namespace geoflow
