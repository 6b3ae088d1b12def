#include "amgmatch/prolongation.hpp"

#include <cmath>
#include <stdexcept>
#include <string>
#include <vector>

namespace amgmatch {

Prolongator tentative_from_aggregates(const AggregationMap& agg, const Vector& w) {
    validate_aggregation(agg);
    if (w.size() != agg.n_fine)
        throw std::invalid_argument("tentative_from_aggregates: w length mismatch");

    std::vector<double> norm2(agg.n_coarse, 0.0);
    for (index_t i = 0; i < agg.n_fine; ++i)
        norm2[agg.assign[i]] += w[i] * w[i];
    for (index_t a = 0; a < agg.n_coarse; ++a)
        if (norm2[a] == 0.0)
            throw std::invalid_argument(
                "tentative_from_aggregates: w vanishes on aggregate " +
                std::to_string(a));

    // One stored entry per fine row, including explicit zeros where a single
    // component of w vanishes inside a larger aggregate.
    Prolongator out;
    out.kind = ProlongatorKind::tentative;
    CsrMatrix& p = out.p;
    p.nrows = agg.n_fine;
    p.ncols = agg.n_coarse;
    p.row_offsets.resize(agg.n_fine + 1);
    p.col_indices.resize(agg.n_fine);
    p.values.resize(agg.n_fine);
    for (index_t i = 0; i < agg.n_fine; ++i) {
        p.row_offsets[i] = i;
        p.col_indices[i] = agg.assign[i];
        p.values[i] = w[i] / std::sqrt(norm2[agg.assign[i]]);
    }
    p.row_offsets[agg.n_fine] = agg.n_fine;
    validate_canonical(p);
    return out;
}

Prolongator build_tentative_prolongator(const Matching& m, const Vector& w) {
    return tentative_from_aggregates(
        matching_to_aggregates(m, static_cast<index_t>(w.size())), w);
}

Vector coarse_weights(const AggregationMap& agg, const Vector& w) {
    Vector norm2 = Vector::Zero(agg.n_coarse);
    for (index_t i = 0; i < agg.n_fine; ++i)
        norm2[agg.assign[i]] += w[i] * w[i];
    return norm2.cwiseSqrt();
}

double prolongation_smoothing_weight(const CsrMatrix& a) {
    double max_row_sum = 0.0;
    for (index_t i = 0; i < a.nrows; ++i) {
        const double d = a.coeff(i, i);
        if (d == 0.0)
            throw std::invalid_argument(
                "smooth_prolongator: zero diagonal at row " + std::to_string(i));
        double s = 0.0;
        for (index_t k = a.row_offsets[i]; k < a.row_offsets[i + 1]; ++k)
            s += std::abs(a.values[k]);
        max_row_sum = std::max(max_row_sum, s / std::abs(d));
    }
    if (max_row_sum == 0.0)
        throw std::invalid_argument("smooth_prolongator: matrix has no entries");
    return 1.0 / max_row_sum;
}

Prolongator smooth_prolongator(const CsrMatrix& a, const Prolongator& p_hat) {
    if (a.nrows != a.ncols || a.nrows != p_hat.p.nrows)
        throw std::invalid_argument("smooth_prolongator: dimension mismatch");
    const double omega = prolongation_smoothing_weight(a);

    CsrMatrix ap = spgemm(a, p_hat.p);
    for (index_t i = 0; i < ap.nrows; ++i) {
        const double scale = omega / a.coeff(i, i);
        for (index_t k = ap.row_offsets[i]; k < ap.row_offsets[i + 1]; ++k)
            ap.values[k] *= scale;
    }

    Prolongator out;
    out.kind = ProlongatorKind::smoothed;
    out.p = csr_axpby(1.0, p_hat.p, -1.0, ap);
    if (max_abs(out.p) == 0.0)
        throw std::invalid_argument(
            "smooth_prolongator: smoothed prolongator is identically zero "
            "(omega*D^-1*A acts as the identity; A is effectively diagonal)");
    return out;
}

namespace {

AggregationMap compose_maps(const AggregationMap& fine_to_mid,
                            const AggregationMap& mid_to_coarse) {
    AggregationMap out;
    out.n_fine = fine_to_mid.n_fine;
    out.n_coarse = mid_to_coarse.n_coarse;
    out.assign.resize(out.n_fine);
    out.aggregate_sizes.assign(out.n_coarse, 0);
    for (index_t i = 0; i < out.n_fine; ++i) {
        out.assign[i] = mid_to_coarse.assign[fine_to_mid.assign[i]];
        ++out.aggregate_sizes[out.assign[i]];
    }
    validate_aggregation(out);
    return out;
}

AggregationMap identity_map(index_t n) {
    AggregationMap id;
    id.n_fine = id.n_coarse = n;
    id.assign.resize(n);
    id.aggregate_sizes.assign(n, 1);
    for (index_t i = 0; i < n; ++i) id.assign[i] = i;
    return id;
}

} // namespace

PairwiseComposition compose_pairwise(const CsrMatrix& a, const Vector& w,
                                     int sweeps) {
    if (sweeps < 1)
        throw std::invalid_argument("compose_pairwise: sweeps must be >= 1");
    if (w.size() != a.nrows)
        throw std::invalid_argument("compose_pairwise: w length mismatch");

    PairwiseComposition comp;
    comp.aggregates = identity_map(a.nrows);

    CsrMatrix a_work = a;
    Vector w_work = w;
    bool have_p = false;
    for (int round = 0; round < sweeps; ++round) {
        const WeightedGraph g = build_edge_weights(a_work, w_work);
        const Matching m = half_approx_matching(g);
        if (m.pairs.empty()) {
            comp.stalled = true;
            break;
        }
        const AggregationMap round_map =
            matching_to_aggregates(m, a_work.nrows);
        const Prolongator p_round = tentative_from_aggregates(round_map, w_work);

        w_work = coarse_weights(round_map, w_work);
        comp.aggregates = compose_maps(comp.aggregates, round_map);
        if (!have_p) {
            comp.p_hat = p_round;
            have_p = true;
        } else {
            comp.p_hat.p = spgemm(comp.p_hat.p, p_round.p);
        }
        ++comp.rounds_done;
        if (round + 1 < sweeps)
            a_work = spgemm(spgemm(transpose(p_round.p), a_work), p_round.p);
    }

    if (!have_p) {
        // Nothing matched in the first round: identity composition.
        comp.p_hat = tentative_from_aggregates(comp.aggregates, w);
        comp.w_coarse = coarse_weights(comp.aggregates, w);
    } else {
        comp.p_hat.kind = ProlongatorKind::tentative;
        comp.w_coarse = w_work;
    }
    return comp;
}

} // namespace amgmatch
