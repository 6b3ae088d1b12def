#pragma once

#include "amgmatch/hierarchy.hpp"
#include "amgmatch/partition.hpp"
#include "amgmatch/types.hpp"

#include <nlohmann/json_fwd.hpp>

#include <cstdint>
#include <string>
#include <vector>

namespace amgmatch {

enum class StudyMode { strong, weak };
enum class ProblemKind { poisson1d, poisson2d, poisson3d };

StudyMode study_mode_from_string(const std::string& s);
ProblemKind problem_from_string(const std::string& s);
std::string to_string(StudyMode m);
std::string to_string(ProblemKind p);
int problem_dim(ProblemKind p);

struct StudySpec {
    StudyMode mode = StudyMode::strong;
    ProblemKind problem = ProblemKind::poisson3d;
    std::vector<index_t> sizes; // n_per_side; pairs with `ranks` in weak mode
    std::vector<int> ranks;
    double tol = 1e-3;
    int max_iters = 1000;
    int time_steps = 20; // repeated solves against perturbed right-hand sides
    std::uint64_t seed = 0;
    PartitionScheme scheme = PartitionScheme::contiguous;
};

struct StudyStep {
    int step = 0;
    int iterations = 0;
    bool converged = false;
    double final_relative_residual = 0.0;
    double solve_seconds = 0.0;
};

struct StudyCell {
    std::string config_label;
    index_t n_per_side = 0;
    index_t n_dofs = 0;
    int ranks = 1;
    std::vector<StudyStep> steps;
    bool all_converged = true;
    long total_iterations = 0;
    double avg_iterations = 0.0;
    // hierarchy shape (multilevel labels only)
    int n_levels = 0;
    double operator_complexity = 0.0;
    index_t coarsest_size = 0;
    // wall-clock derived
    double setup_seconds = 0.0;
    double total_solve_seconds = 0.0;
    double time_per_iteration_seconds = 0.0;
    double speedup = 0.0;
    double scaled_speedup = 0.0;
};

struct StudyReport {
    StudySpec spec;
    std::vector<StudyCell> cells;
    bool all_converged = true;
};

// Runs every (config, size, ranks) cell: partition, partial-row assembly to a
// global matrix, one hierarchy build (the operator is reused across steps),
// then `time_steps` warm-started solves with seeded smooth rhs perturbations.
// Non-convergent solves flag the cell and the study continues. Weak mode
// requires dofs-per-rank to be constant across the size/rank pairing.
StudyReport run_study(const StudySpec& spec,
                      const std::vector<PreconditionerConfig>& configs);

nlohmann::json study_to_json(const StudyReport& report);

// config,problem,n,ranks,step,iters,solve_s,setup_s
std::string study_to_csv(const StudyReport& report);

// Removes every object member named "timing" recursively; what remains is the
// seeded-deterministic portion of a report.
nlohmann::json strip_timing(const nlohmann::json& j);

} // namespace amgmatch
