#include <geoflow/error.hpp>
#include <geoflow/solve.hpp>

#include <Eigen/IterativeLinearSolvers>
#include <Eigen/SparseCholesky>

#include <algorithm>
#include <cmath>
#include <limits>
#include <optional>

namespace geoflow {

namespace {

constexpr int kMaxRefinements = 3;

using JacobiCG = Eigen::ConjugateGradient<SparseOperator, Eigen::Lower | Eigen::Upper,
    Eigen::DiagonalPreconditioner<double>>;
using PlainCG = Eigen::ConjugateGradient<SparseOperator, Eigen::Lower | Eigen::Upper, Eigen::IdentityPreconditioner>;

template <typename CG>
Eigen::VectorXd run_cg(const CG& cg, const SparseOperator& A, const Eigen::VectorXd& b, double tol, long max_iter,
    long& iterations, double& residual)
{
    // Eigen's recursive residual can drift from the true one; restart from the
    // current iterate until the recomputed residual meets the tolerance.
    Eigen::VectorXd x = Eigen::VectorXd::Zero(b.size());
    long used = 0;
    residual = relative_residual(A, x, b);
    while (residual > tol && used < max_iter) {
        x = cg.solveWithGuess(b, x);
        used += std::max<long>(1, cg.iterations());
        residual = relative_residual(A, x, b);
        if (cg.iterations() == 0) break;
    }
    iterations = used;
    return x;
}

} // namespace

std::string to_string(SolverMethod method)
{
    return method == SolverMethod::ConjugateGradient ? "cg" : "direct";
}

SolverMethod solver_method_from_string(const std::string& name)
{
    if (name == "cg" || name == "conjugate-gradient") return SolverMethod::ConjugateGradient;
    if (name == "direct" || name == "direct-factorization" || name == "ldlt") return SolverMethod::DirectFactorization;
    throw ConfigError("unknown solver method '" + name + "'");
}

void SolverConfig::validate() const
{
    if (!(tolerance > 0.0 && tolerance < 1.0)) throw ConfigError("solver tolerance must lie in (0, 1)");
    if (max_iterations < 0) throw ConfigError("solver max iterations must be >= 1 (or 0 for the default)");
}

double relative_residual(const SparseOperator& A, const Eigen::VectorXd& x, const Eigen::VectorXd& b)
{
    const Eigen::VectorXd r = A * x - b;
    const double bn = b.norm();
    return bn > 0.0 ? r.norm() / bn : r.norm();
}

struct SpdSolver::Impl
{
    SparseOperator A;
    std::optional<Eigen::SimplicialLDLT<SparseOperator>> ldlt;
    std::optional<JacobiCG> jacobi_cg;
    std::optional<PlainCG> plain_cg;
};

SpdSolver::SpdSolver(const SparseOperator& A, SolverConfig config)
    : config_(config)
    , impl_(std::make_unique<Impl>())
{
    config_.validate();
    if (A.rows() != A.cols()) {
        throw SolverError("matrix is not square", std::numeric_limits<double>::quiet_NaN(), 0);
    }
    impl_->A = A;
    const long max_iter = config_.max_iterations > 0 ? config_.max_iterations : 10 * std::max<long>(1, A.rows());
    switch (config_.method) {
    case SolverMethod::DirectFactorization:
        impl_->ldlt.emplace(impl_->A);
        if (impl_->ldlt->info() != Eigen::Success || !(impl_->ldlt->vectorD().array() > 0.0).all()) {
            throw SolverError("factorization failed: matrix is not positive definite",
                std::numeric_limits<double>::quiet_NaN(), 0);
        }
        break;
    case SolverMethod::ConjugateGradient:
        if (config_.jacobi) {
            impl_->jacobi_cg.emplace();
            impl_->jacobi_cg->setTolerance(config_.tolerance);
            impl_->jacobi_cg->setMaxIterations(max_iter);
            impl_->jacobi_cg->compute(impl_->A);
        } else {
            impl_->plain_cg.emplace();
            impl_->plain_cg->setTolerance(config_.tolerance);
            impl_->plain_cg->setMaxIterations(max_iter);
            impl_->plain_cg->compute(impl_->A);
        }
        break;
    }
}

SpdSolver::~SpdSolver() = default;
SpdSolver::SpdSolver(SpdSolver&&) noexcept = default;
SpdSolver& SpdSolver::operator=(SpdSolver&&) noexcept = default;

SolveResult SpdSolver::solve(const Eigen::MatrixXd& B) const
{
    const SparseOperator& A = impl_->A;
    if (B.rows() != A.rows()) {
        throw SolverError("dimension mismatch: matrix has " + std::to_string(A.rows()) + " rows, right-hand side " +
                              std::to_string(B.rows()),
            std::numeric_limits<double>::quiet_NaN(), 0);
    }
    const long max_iter = config_.max_iterations > 0 ? config_.max_iterations : 10 * std::max<long>(1, A.rows());
    SolveResult result;
    result.x.resize(B.rows(), B.cols());
    for (Eigen::Index c = 0; c < B.cols(); ++c) {
        const Eigen::VectorXd b = B.col(c);
        Eigen::VectorXd x;
        double residual = 0.0;
        long iterations = 0;
        if (impl_->ldlt) {
            x = impl_->ldlt->solve(b);
            residual = relative_residual(A, x, b);
            for (int k = 0; k < kMaxRefinements && residual > config_.tolerance; ++k) {
                x += impl_->ldlt->solve(b - A * x);
                residual = relative_residual(A, x, b);
            }
        } else if (impl_->jacobi_cg) {
            x = run_cg(*impl_->jacobi_cg, A, b, config_.tolerance, max_iter, iterations, residual);
        } else {
            x = run_cg(*impl_->plain_cg, A, b, config_.tolerance, max_iter, iterations, residual);
        }
        if (!(residual <= config_.tolerance)) {
            throw SolverError("solver did not reach tolerance " + std::to_string(config_.tolerance) +
                                  " (achieved " + std::to_string(residual) + ")",
                residual, iterations);
        }
        result.x.col(c) = x;
        result.residual = std::max(result.residual, residual);
        result.iterations = std::max(result.iterations, iterations);
    }
    return result;
}

SolveResult solve_spd(const SparseOperator& A, const Eigen::MatrixXd& B, const SolverConfig& config)
{
    return SpdSolver(A, config).solve(B);
}

} // namespace geoflow
