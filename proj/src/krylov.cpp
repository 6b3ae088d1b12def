#include "amgmatch/krylov.hpp"

#include <nlohmann/json.hpp>

#include <chrono>
#include <deque>
#include <stdexcept>

namespace amgmatch {

namespace {

using clock_type = std::chrono::steady_clock;

double seconds_since(clock_type::time_point t0) {
    return std::chrono::duration<double>(clock_type::now() - t0).count();
}

void check_inputs(const CsrMatrix& a, const Vector& b, double tol,
                  const Vector& x0) {
    if (a.nrows != a.ncols)
        throw std::invalid_argument("solver: matrix not square");
    if (b.size() != a.nrows || x0.size() != a.nrows)
        throw std::invalid_argument("solver: vector length mismatch");
    if (!(tol > 0.0)) throw std::invalid_argument("solver: tol must be > 0");
}

constexpr int kTrueResidualEvery = 25;

} // namespace

nlohmann::json report_to_json(const SolveReport& r) {
    return {{"iterations", r.iterations},
            {"residual_history", r.residual_history},
            {"converged", r.converged},
            {"residual_convention", r.residual_convention},
            {"timing",
             {{"setup_seconds", r.setup_seconds},
              {"solve_seconds", r.solve_seconds}}}};
}

std::pair<Vector, SolveReport> cg_solve(const CsrMatrix& a, const Vector& b,
                                        CgPreconditioner prec, double tol,
                                        int max_iters, const Vector& x0) {
    check_inputs(a, b, tol, x0);
    const auto t0 = clock_type::now();
    SolveReport report;

    Vector invdiag;
    if (prec == CgPreconditioner::jacobi) {
        invdiag.resize(a.nrows);
        for (index_t i = 0; i < a.nrows; ++i) {
            const double d = a.coeff(i, i);
            if (d == 0.0)
                throw std::invalid_argument("cg_solve: zero diagonal entry");
            invdiag[i] = 1.0 / d;
        }
    }

    Vector x = x0;
    Vector r = b - spmv(a, x);
    const double nrm0 = r.norm();
    if (nrm0 == 0.0) {
        report.converged = true;
        report.residual_history = {0.0};
        report.solve_seconds = seconds_since(t0);
        return {x, report};
    }
    report.residual_history.push_back(1.0);

    Vector z = (prec == CgPreconditioner::jacobi)
                   ? Vector(invdiag.cwiseProduct(r))
                   : r;
    Vector p = z;
    double rho = r.dot(z);
    for (int k = 0; k < max_iters; ++k) {
        const Vector q = spmv(a, p);
        const double p_ap = p.dot(q);
        if (p_ap <= 0.0)
            throw std::runtime_error(
                "cg_solve: non-positive curvature (matrix not SPD)");
        const double alpha = rho / p_ap;
        x += alpha * p;
        if ((k + 1) % kTrueResidualEvery == 0)
            r = b - spmv(a, x);
        else
            r -= alpha * q;
        ++report.iterations;
        const double rel = r.norm() / nrm0;
        report.residual_history.push_back(rel);
        if (rel <= tol) {
            report.converged = true;
            break;
        }
        z = (prec == CgPreconditioner::jacobi)
                ? Vector(invdiag.cwiseProduct(r))
                : r;
        const double rho_next = r.dot(z);
        p = z + (rho_next / rho) * p;
        rho = rho_next;
    }
    report.solve_seconds = seconds_since(t0);
    return {x, report};
}

std::pair<Vector, SolveReport> fcg_solve(const CsrMatrix& a, const Vector& b,
                                         const PrecApply& prec, double tol,
                                         int max_iters, const Vector& x0,
                                         int window) {
    check_inputs(a, b, tol, x0);
    if (window < 1)
        throw std::invalid_argument("fcg_solve: window must be >= 1");
    const auto t0 = clock_type::now();
    SolveReport report;

    Vector x = x0;
    Vector r = b - spmv(a, x);
    const double nrm0 = r.norm();
    if (nrm0 == 0.0) {
        report.converged = true;
        report.residual_history = {0.0};
        report.solve_seconds = seconds_since(t0);
        return {x, report};
    }
    report.residual_history.push_back(1.0);

    struct Direction {
        Vector p;
        Vector ap;
        double p_ap;
    };
    std::deque<Direction> history;

    for (int k = 0; k < max_iters; ++k) {
        Vector p = prec(r);
        for (const Direction& d : history)
            p -= (p.dot(d.ap) / d.p_ap) * d.p;
        const Vector ap = spmv(a, p);
        const double p_ap = p.dot(ap);
        if (p_ap <= 0.0)
            throw std::runtime_error(
                "fcg_solve: non-positive curvature (matrix not SPD)");
        const double alpha = r.dot(p) / p_ap;
        x += alpha * p;
        if ((k + 1) % kTrueResidualEvery == 0)
            r = b - spmv(a, x);
        else
            r -= alpha * ap;
        ++report.iterations;
        const double rel = r.norm() / nrm0;
        report.residual_history.push_back(rel);
        if (rel <= tol) {
            report.converged = true;
            break;
        }
        history.push_back({std::move(p), std::move(ap), p_ap});
        if (static_cast<int>(history.size()) > window) history.pop_front();
    }
    report.solve_seconds = seconds_since(t0);
    return {x, report};
}

} // namespace amgmatch
