#include "amgmatch/study.hpp"

#include "amgmatch/krylov.hpp"
#include "amgmatch/poisson.hpp"
#include "amgmatch/vcycle.hpp"

#include <nlohmann/json.hpp>

#include <chrono>
#include <cmath>
#include <cstdio>
#include <memory>
#include <numbers>
#include <random>
#include <sstream>
#include <stdexcept>

namespace amgmatch {

StudyMode study_mode_from_string(const std::string& s) {
    if (s == "strong") return StudyMode::strong;
    if (s == "weak") return StudyMode::weak;
    throw std::invalid_argument("unknown study mode: " + s);
}

ProblemKind problem_from_string(const std::string& s) {
    if (s == "poisson1d") return ProblemKind::poisson1d;
    if (s == "poisson2d") return ProblemKind::poisson2d;
    if (s == "poisson3d") return ProblemKind::poisson3d;
    throw std::invalid_argument("unknown problem: " + s);
}

std::string to_string(StudyMode m) {
    return m == StudyMode::strong ? "strong" : "weak";
}

std::string to_string(ProblemKind p) {
    switch (p) {
    case ProblemKind::poisson1d: return "poisson1d";
    case ProblemKind::poisson2d: return "poisson2d";
    case ProblemKind::poisson3d: return "poisson3d";
    }
    return "unknown";
}

int problem_dim(ProblemKind p) {
    switch (p) {
    case ProblemKind::poisson1d: return 1;
    case ProblemKind::poisson2d: return 2;
    case ProblemKind::poisson3d: return 3;
    }
    return 0;
}

namespace {

using clock_type = std::chrono::steady_clock;

index_t dofs_for(ProblemKind p, index_t n_per_side) {
    index_t d = 1;
    for (int k = 0; k < problem_dim(p); ++k) d *= n_per_side;
    return d;
}

// Smooth seeded perturbation: one random low-frequency sine mode per step,
// scaled to a small fraction of the base rhs magnitude.
Vector perturbation(const GridDims& dims, int dim, std::mt19937_64& rng,
                    double amplitude) {
    std::uniform_int_distribution<int> mode(1, 3);
    std::uniform_real_distribution<double> coef(-1.0, 1.0);
    const int kx = mode(rng);
    const int ky = dim >= 2 ? mode(rng) : 0;
    const int kz = dim >= 3 ? mode(rng) : 0;
    const double a = coef(rng) * amplitude;
    const double fx = std::numbers::pi / static_cast<double>(dims.nx + 1);
    const double fy = std::numbers::pi / static_cast<double>(dims.ny + 1);
    const double fz = std::numbers::pi / static_cast<double>(dims.nz + 1);
    Vector delta(dims.count());
    for (index_t z = 0, g = 0; z < dims.nz; ++z)
        for (index_t y = 0; y < dims.ny; ++y)
            for (index_t x = 0; x < dims.nx; ++x, ++g) {
                double v = a * std::sin(fx * kx * static_cast<double>(x + 1));
                if (dim >= 2)
                    v *= std::sin(fy * ky * static_cast<double>(y + 1));
                if (dim >= 3)
                    v *= std::sin(fz * kz * static_cast<double>(z + 1));
                delta[g] = v;
            }
    return delta;
}

StudyCell run_cell(const StudySpec& spec, const PreconditionerConfig& config,
                   index_t n_per_side, int ranks) {
    const int dim = problem_dim(spec.problem);
    StudyCell cell;
    cell.config_label = to_string(config.label);
    cell.n_per_side = n_per_side;
    cell.ranks = ranks;

    const GridDims dims = poisson_dims(dim, n_per_side);
    cell.n_dofs = dims.count();
    RankPartition part =
        make_partition(dims.count(), ranks, spec.scheme, dims);
    PartialRowMatrix pm = gen_poisson_partial(dim, n_per_side, part);
    discover_halo(pm, part);
    const FullRowMatrix full = assemble_full_rows(pm, part);
    const CsrMatrix a = concatenate_global(full, part);
    const PoissonProblem base = gen_poisson(dim, n_per_side);

    const bool multilevel = config.label != PrecLabel::JACOBI &&
                            config.label != PrecLabel::NONE;
    AmgHierarchy hierarchy;
    std::unique_ptr<VCyclePreconditioner> prec;
    const auto t_setup = clock_type::now();
    if (multilevel) {
        hierarchy = build_hierarchy(a, part, config);
        prec = std::make_unique<VCyclePreconditioner>(hierarchy);
        cell.n_levels = hierarchy.n_levels();
        cell.coarsest_size = hierarchy.coarsest_size();
        double nnz_total = 0.0;
        for (const auto& lvl : hierarchy.levels)
            nnz_total += static_cast<double>(lvl.a.nnz());
        cell.operator_complexity =
            nnz_total / static_cast<double>(hierarchy.levels.front().a.nnz());
    }
    cell.setup_seconds =
        std::chrono::duration<double>(clock_type::now() - t_setup).count();

    std::mt19937_64 rng(spec.seed);
    const double amplitude = 1e-2 * inf_norm(base.rhs);
    Vector rhs = base.rhs;
    Vector x = Vector::Zero(dims.count());
    for (int s = 0; s < spec.time_steps; ++s) {
        if (s > 0) rhs += perturbation(dims, dim, rng, amplitude);
        std::pair<Vector, SolveReport> result;
        if (config.label == PrecLabel::NONE)
            result = cg_solve(a, rhs, CgPreconditioner::none, spec.tol,
                              spec.max_iters, x);
        else if (config.label == PrecLabel::JACOBI)
            result = cg_solve(a, rhs, CgPreconditioner::jacobi, spec.tol,
                              spec.max_iters, x);
        else
            result = fcg_solve(a, rhs, prec->as_prec(), spec.tol,
                               spec.max_iters, x);
        x = std::move(result.first);
        const SolveReport& rep = result.second;
        StudyStep step;
        step.step = s;
        step.iterations = rep.iterations;
        step.converged = rep.converged;
        step.final_relative_residual = rep.residual_history.back();
        step.solve_seconds = rep.solve_seconds;
        cell.steps.push_back(step);
        cell.total_iterations += rep.iterations;
        cell.total_solve_seconds += rep.solve_seconds;
        if (!rep.converged) cell.all_converged = false;
    }
    cell.avg_iterations = spec.time_steps > 0
                              ? static_cast<double>(cell.total_iterations) /
                                    static_cast<double>(spec.time_steps)
                              : 0.0;
    cell.time_per_iteration_seconds =
        cell.total_iterations > 0
            ? cell.total_solve_seconds /
                  static_cast<double>(cell.total_iterations)
            : 0.0;
    return cell;
}

} // namespace

StudyReport run_study(const StudySpec& spec,
                      const std::vector<PreconditionerConfig>& configs) {
    if (spec.sizes.empty() || spec.ranks.empty())
        throw std::invalid_argument("run_study: sizes and ranks required");
    if (configs.empty())
        throw std::invalid_argument("run_study: at least one config required");
    if (spec.time_steps < 1)
        throw std::invalid_argument("run_study: time_steps must be >= 1");

    // (size, ranks) cells per config
    std::vector<std::pair<index_t, int>> grid;
    if (spec.mode == StudyMode::weak) {
        if (spec.sizes.size() != spec.ranks.size())
            throw std::invalid_argument(
                "run_study: weak mode pairs sizes with ranks (equal counts)");
        const index_t d0 = dofs_for(spec.problem, spec.sizes[0]);
        for (std::size_t k = 0; k < spec.sizes.size(); ++k) {
            const index_t dk = dofs_for(spec.problem, spec.sizes[k]);
            if (dk * spec.ranks[0] != d0 * spec.ranks[k])
                throw std::invalid_argument(
                    "run_study: weak mode requires constant dofs per rank");
            grid.emplace_back(spec.sizes[k], spec.ranks[k]);
        }
    } else {
        for (index_t n : spec.sizes)
            for (int r : spec.ranks) grid.emplace_back(n, r);
    }

    StudyReport report;
    report.spec = spec;
    for (const PreconditionerConfig& config : configs)
        for (const auto& [n, r] : grid)
            report.cells.push_back(run_cell(spec, config, n, r));

    // Speedups within each (config, size-group): reference is the smallest
    // rank count; in weak mode the group is the whole per-config ladder and
    // the scale factor is the dofs ratio.
    for (StudyCell& cell : report.cells) {
        const StudyCell* ref = nullptr;
        for (const StudyCell& other : report.cells) {
            if (other.config_label != cell.config_label) continue;
            if (spec.mode == StudyMode::strong &&
                other.n_per_side != cell.n_per_side)
                continue;
            if (!ref || other.ranks < ref->ranks) ref = &other;
        }
        cell.speedup = cell.total_solve_seconds > 0.0
                           ? ref->total_solve_seconds / cell.total_solve_seconds
                           : 0.0;
        const double scalfactor = static_cast<double>(cell.n_dofs) /
                                  static_cast<double>(ref->n_dofs);
        cell.scaled_speedup = scalfactor * cell.speedup;
        if (!cell.all_converged) report.all_converged = false;
    }
    return report;
}

nlohmann::json study_to_json(const StudyReport& report) {
    const StudySpec& spec = report.spec;
    nlohmann::json cells = nlohmann::json::array();
    for (const StudyCell& cell : report.cells) {
        nlohmann::json steps = nlohmann::json::array();
        for (const StudyStep& s : cell.steps)
            steps.push_back(
                {{"step", s.step},
                 {"iterations", s.iterations},
                 {"converged", s.converged},
                 {"final_relative_residual", s.final_relative_residual},
                 {"timing", {{"solve_seconds", s.solve_seconds}}}});
        nlohmann::json jc = {
            {"config", cell.config_label},
            {"problem", to_string(spec.problem)},
            {"n_per_side", cell.n_per_side},
            {"n_dofs", cell.n_dofs},
            {"ranks", cell.ranks},
            {"all_converged", cell.all_converged},
            {"total_iterations", cell.total_iterations},
            {"avg_iterations", cell.avg_iterations},
            {"steps", steps},
            {"timing",
             {{"setup_seconds", cell.setup_seconds},
              {"total_solve_seconds", cell.total_solve_seconds},
              {"time_per_iteration_seconds", cell.time_per_iteration_seconds},
              {"speedup", cell.speedup},
              {"scaled_speedup", cell.scaled_speedup}}}};
        if (cell.n_levels > 0)
            jc["hierarchy"] = {{"n_levels", cell.n_levels},
                               {"operator_complexity", cell.operator_complexity},
                               {"coarsest_size", cell.coarsest_size}};
        cells.push_back(jc);
    }
    return {{"spec",
             {{"mode", to_string(spec.mode)},
              {"problem", to_string(spec.problem)},
              {"sizes", spec.sizes},
              {"ranks", spec.ranks},
              {"tol", spec.tol},
              {"max_iters", spec.max_iters},
              {"time_steps", spec.time_steps},
              {"seed", spec.seed},
              {"scheme",
               spec.scheme == PartitionScheme::contiguous ? "contiguous"
                                                          : "sfc_morton"},
              {"rhs_model",
               "seeded smooth perturbation proxy; warm-started steps"}}},
            {"all_converged", report.all_converged},
            {"cells", cells}};
}

std::string study_to_csv(const StudyReport& report) {
    std::ostringstream out;
    out << "config,problem,n,ranks,step,iters,solve_s,setup_s\n";
    char buf[64];
    for (const StudyCell& cell : report.cells)
        for (const StudyStep& s : cell.steps) {
            out << cell.config_label << ',' << to_string(report.spec.problem)
                << ',' << cell.n_per_side << ',' << cell.ranks << ',' << s.step
                << ',' << s.iterations << ',';
            std::snprintf(buf, sizeof buf, "%.9e", s.solve_seconds);
            out << buf << ',';
            std::snprintf(buf, sizeof buf, "%.9e", cell.setup_seconds);
            out << buf << '\n';
        }
    return out.str();
}

nlohmann::json strip_timing(const nlohmann::json& j) {
    if (j.is_object()) {
        nlohmann::json out = nlohmann::json::object();
        for (const auto& [key, value] : j.items())
            if (key != "timing") out[key] = strip_timing(value);
        return out;
    }
    if (j.is_array()) {
        nlohmann::json out = nlohmann::json::array();
        for (const auto& value : j) out.push_back(strip_timing(value));
        return out;
    }
    return j;
}

} // namespace amgmatch
