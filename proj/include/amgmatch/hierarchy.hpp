#pragma once

#include "amgmatch/csr.hpp"
#include "amgmatch/matching.hpp"
#include "amgmatch/partition.hpp"
#include "amgmatch/prolongation.hpp"
#include "amgmatch/smoothers.hpp"
#include "amgmatch/types.hpp"

#include <nlohmann/json_fwd.hpp>

#include <string>
#include <vector>

namespace amgmatch {

enum class PrecLabel { MLVSMATCH3, MLVSMATCH4, MLVSBM, JACOBI, NONE };

PrecLabel prec_label_from_string(const std::string& s);
std::string to_string(PrecLabel label);

struct CoarsestSolverSpec {
    enum class Method { fcg_block_jacobi_ilu, dense_direct };
    Method method = Method::fcg_block_jacobi_ilu;
    double rel_tol = 1e-3;
    int max_iters = 30;
};

struct PreconditionerConfig {
    PrecLabel label = PrecLabel::MLVSMATCH3;
    int match_sweeps = 3;        // pairwise matching rounds per level
    double theta = 0.08;         // decoupled-aggregation strength, scaled 0.5^l
    int smoother_sweeps = 4;
    double smoother_damping = 1.0;
    index_t coarsest_per_rank = 200;
    int max_levels = 20;
    CoarsestSolverSpec coarsest;

    static PreconditionerConfig from_label(PrecLabel label);
};

struct HierarchyLevel {
    CsrMatrix a;
    RankPartition part;
    Vector w;
    SmootherSpec pre_smoother;
    SmootherSpec post_smoother;
    // Interpolation from the next-coarser level; absent on the coarsest.
    bool has_p = false;
    Prolongator p;
    AggregationMap aggregates;
};

struct AmgHierarchy {
    std::vector<HierarchyLevel> levels; // levels[0] finest, back() coarsest
    PreconditionerConfig config;
    bool stalled = false; // coarsening stopped before reaching the size target

    index_t coarsest_size() const { return levels.back().a.nrows; }
    int n_levels() const { return static_cast<int>(levels.size()); }
};

// Builds levels until the coarse size drops to coarsest_per_rank * n_ranks or
// max_levels is hit. Per level: aggregation per config label, prolongator
// smoothing applied once to the composed tentative operator, then the Galerkin
// product. Rejects matrices with nonpositive diagonal or asymmetry beyond
// 1e-12 relative, and the JACOBI/NONE labels (single-level by definition).
AmgHierarchy build_hierarchy(const CsrMatrix& a, const RankPartition& part,
                             const PreconditionerConfig& config);
AmgHierarchy build_hierarchy(const CsrMatrix& a, const RankPartition& part,
                             const PreconditionerConfig& config,
                             const Vector& w0);

nlohmann::json hierarchy_summary(const AmgHierarchy& h);

} // namespace amgmatch
