#include "amgmatch/hierarchy.hpp"

#include <nlohmann/json.hpp>

#include <algorithm>
#include <cmath>
#include <map>
#include <stdexcept>

namespace amgmatch {

PrecLabel prec_label_from_string(const std::string& s) {
    std::string up;
    for (char c : s) up.push_back(static_cast<char>(std::toupper(c)));
    if (up == "MLVSMATCH3") return PrecLabel::MLVSMATCH3;
    if (up == "MLVSMATCH4") return PrecLabel::MLVSMATCH4;
    if (up == "MLVSBM") return PrecLabel::MLVSBM;
    if (up == "JACOBI") return PrecLabel::JACOBI;
    if (up == "NONE") return PrecLabel::NONE;
    throw std::invalid_argument("unknown preconditioner label: " + s);
}

std::string to_string(PrecLabel label) {
    switch (label) {
    case PrecLabel::MLVSMATCH3: return "MLVSMATCH3";
    case PrecLabel::MLVSMATCH4: return "MLVSMATCH4";
    case PrecLabel::MLVSBM: return "MLVSBM";
    case PrecLabel::JACOBI: return "JACOBI";
    case PrecLabel::NONE: return "NONE";
    }
    return "UNKNOWN";
}

PreconditionerConfig PreconditionerConfig::from_label(PrecLabel label) {
    PreconditionerConfig c;
    c.label = label;
    switch (label) {
    case PrecLabel::MLVSMATCH3: c.match_sweeps = 3; break;
    case PrecLabel::MLVSMATCH4: c.match_sweeps = 4; break;
    default: break;
    }
    return c;
}

namespace {

void require_spd_shape(const CsrMatrix& a) {
    if (a.nrows != a.ncols)
        throw std::invalid_argument("build_hierarchy: matrix not square");
    for (index_t i = 0; i < a.nrows; ++i)
        if (a.coeff(i, i) <= 0.0)
            throw std::invalid_argument(
                "build_hierarchy: nonpositive diagonal at row " +
                std::to_string(i));
    const CsrMatrix defect = csr_axpby(1.0, a, -1.0, transpose(a));
    if (max_abs(defect) > 1e-12 * max_abs(a))
        throw std::invalid_argument(
            "build_hierarchy: matrix asymmetry exceeds 1e-12 relative");
}

RankPartition coarse_partition(const RankPartition& fine,
                               const AggregationMap& agg) {
    RankPartition coarse;
    coarse.n = agg.n_coarse;
    coarse.n_ranks = fine.n_ranks;
    coarse.owner.assign(agg.n_coarse, -1);
    coarse.local_rows.resize(fine.n_ranks);
    coarse.halo_map.resize(fine.n_ranks);
    // An aggregate lands on the rank owning its smallest fine index.
    for (index_t i = 0; i < agg.n_fine; ++i)
        if (coarse.owner[agg.assign[i]] == -1)
            coarse.owner[agg.assign[i]] = fine.owner[i];
    for (index_t c = 0; c < agg.n_coarse; ++c)
        coarse.local_rows[coarse.owner[c]].push_back(c);
    return coarse;
}

} // namespace

AmgHierarchy build_hierarchy(const CsrMatrix& a, const RankPartition& part,
                             const PreconditionerConfig& config) {
    return build_hierarchy(a, part, config, Vector::Ones(a.nrows));
}

AmgHierarchy build_hierarchy(const CsrMatrix& a, const RankPartition& part,
                             const PreconditionerConfig& config,
                             const Vector& w0) {
    if (config.label == PrecLabel::JACOBI || config.label == PrecLabel::NONE)
        throw std::invalid_argument(
            "build_hierarchy: label " + to_string(config.label) +
            " is not a multilevel preconditioner");
    if (a.nrows != part.n)
        throw std::invalid_argument("build_hierarchy: partition size mismatch");
    if (w0.size() != a.nrows)
        throw std::invalid_argument("build_hierarchy: w0 length mismatch");
    require_spd_shape(a);

    AmgHierarchy h;
    h.config = config;
    const index_t coarse_target = config.coarsest_per_rank * part.n_ranks;

    CsrMatrix a_l = a;
    RankPartition part_l = part;
    Vector w_l = w0;
    while (a_l.nrows > coarse_target &&
           static_cast<int>(h.levels.size()) + 1 < config.max_levels) {
        Prolongator p_hat;
        AggregationMap agg;
        Vector w_coarse;
        if (config.label == PrecLabel::MLVSBM) {
            const double theta =
                config.theta * std::pow(0.5, static_cast<double>(h.levels.size()));
            agg = decoupled_smoothed_aggregation(a_l, part_l, theta);
            if (agg.n_coarse >= a_l.nrows) {
                h.stalled = true;
                break;
            }
            p_hat = tentative_from_aggregates(agg, w_l);
            w_coarse = coarse_weights(agg, w_l);
        } else {
            PairwiseComposition comp =
                compose_pairwise(a_l, w_l, config.match_sweeps);
            if (comp.rounds_done == 0) {
                h.stalled = true;
                break;
            }
            p_hat = std::move(comp.p_hat);
            agg = std::move(comp.aggregates);
            w_coarse = std::move(comp.w_coarse);
            if (comp.stalled) h.stalled = true;
        }

        const Prolongator p = smooth_prolongator(a_l, p_hat);
        CsrMatrix a_next = spgemm(spgemm(transpose(p.p), a_l), p.p);
        RankPartition part_next = coarse_partition(part_l, agg);

        HierarchyLevel lvl;
        lvl.a = std::move(a_l);
        lvl.part = std::move(part_l);
        lvl.w = std::move(w_l);
        lvl.pre_smoother = {SmootherSpec::Kind::hybrid_fgs,
                            config.smoother_sweeps, config.smoother_damping};
        lvl.post_smoother = {SmootherSpec::Kind::hybrid_bgs,
                             config.smoother_sweeps, config.smoother_damping};
        lvl.has_p = true;
        lvl.p = std::move(p);
        lvl.aggregates = std::move(agg);
        h.levels.push_back(std::move(lvl));

        a_l = std::move(a_next);
        part_l = std::move(part_next);
        w_l = std::move(w_coarse);
    }

    HierarchyLevel coarsest;
    coarsest.a = std::move(a_l);
    coarsest.part = std::move(part_l);
    coarsest.w = std::move(w_l);
    coarsest.pre_smoother = {SmootherSpec::Kind::hybrid_fgs,
                             config.smoother_sweeps, config.smoother_damping};
    coarsest.post_smoother = {SmootherSpec::Kind::hybrid_bgs,
                              config.smoother_sweeps, config.smoother_damping};
    h.levels.push_back(std::move(coarsest));
    return h;
}

nlohmann::json hierarchy_summary(const AmgHierarchy& h) {
    nlohmann::json levels = nlohmann::json::array();
    const double nnz0 = static_cast<double>(h.levels.front().a.nnz());
    double nnz_total = 0.0;
    for (std::size_t l = 0; l < h.levels.size(); ++l) {
        const HierarchyLevel& lvl = h.levels[l];
        nnz_total += static_cast<double>(lvl.a.nnz());
        nlohmann::json entry = {{"level", l},
                                {"n", lvl.a.nrows},
                                {"nnz", lvl.a.nnz()}};
        if (lvl.has_p) {
            std::map<index_t, index_t> hist;
            for (index_t s : lvl.aggregates.aggregate_sizes) ++hist[s];
            nlohmann::json histogram = nlohmann::json::object();
            for (const auto& [size, count] : hist)
                histogram[std::to_string(size)] = count;
            entry["aggregate_size_histogram"] = histogram;
            entry["n_coarse"] = lvl.aggregates.n_coarse;
        }
        levels.push_back(entry);
    }
    return {{"label", to_string(h.config.label)},
            {"n_levels", h.n_levels()},
            {"coarsest_size", h.coarsest_size()},
            {"operator_complexity", nnz_total / nnz0},
            {"stalled", h.stalled},
            {"levels", levels}};
}

} // namespace amgmatch
