#pragma once

#include "amgmatch/csr.hpp"
#include "amgmatch/types.hpp"

#include <nlohmann/json_fwd.hpp>

#include <functional>
#include <string>
#include <utility>
#include <vector>

namespace amgmatch {

// Residuals are Euclidean norms relative to the initial residual
// ||b - A x0||_2. residual_history[0] is the (relative) starting residual;
// one entry is appended per iteration.
struct SolveReport {
    int iterations = 0;
    std::vector<double> residual_history;
    bool converged = false;
    double setup_seconds = 0.0;
    double solve_seconds = 0.0;
    std::string residual_convention = "relative_to_initial_residual";
};

nlohmann::json report_to_json(const SolveReport& r);

enum class CgPreconditioner { none, jacobi };

// Preconditioner application z = M^-1 r.
using PrecApply = std::function<Vector(const Vector&)>;

std::pair<Vector, SolveReport> cg_solve(const CsrMatrix& a, const Vector& b,
                                        CgPreconditioner prec, double tol,
                                        int max_iters, const Vector& x0);

// Flexible CG: each new direction is explicitly A-orthogonalized against the
// previous `window` directions, which tolerates variable preconditioners.
// With a fixed linear preconditioner the iterates coincide with cg_solve.
std::pair<Vector, SolveReport> fcg_solve(const CsrMatrix& a, const Vector& b,
                                         const PrecApply& prec, double tol,
                                         int max_iters, const Vector& x0,
                                         int window = 1);

} // namespace amgmatch
