#pragma once

#include "amgmatch/csr.hpp"
#include "amgmatch/matching.hpp"
#include "amgmatch/types.hpp"

namespace amgmatch {

enum class ProlongatorKind { tentative, smoothed };

// n_fine x n_coarse interpolation operator. Tentative prolongators store
// exactly one entry per row and have unit-Euclidean-norm columns.
struct Prolongator {
    CsrMatrix p;
    ProlongatorKind kind = ProlongatorKind::tentative;
};

// Column per aggregate: w restricted to the aggregate, scaled to unit norm.
// For a matched pair (i, j) that is (w_i, w_j)/sqrt(w_i^2+w_j^2); for a
// singleton s it is w_s/|w_s|. Throws when an aggregate of w is all zero.
Prolongator tentative_from_aggregates(const AggregationMap& agg, const Vector& w);
Prolongator build_tentative_prolongator(const Matching& m, const Vector& w);

// The coefficients c with P_hat * c = w exactly: per-aggregate Euclidean norms
// of w. Used both as the coarse-level w and as the solvability witness.
Vector coarse_weights(const AggregationMap& agg, const Vector& w);

// P = (I - omega D^-1 A) P_hat with omega = 1/||D^-1 A||_inf. Throws on zero
// diagonal and when P comes out identically zero (A effectively diagonal).
Prolongator smooth_prolongator(const CsrMatrix& a, const Prolongator& p_hat);
double prolongation_smoothing_weight(const CsrMatrix& a);

// `sweeps` rounds of edge-weight build, matching, and tentative prolongation,
// composed by multiplication with Galerkin coarsening between rounds.
// Aggregate sizes are bounded by 2^sweeps. A round that matches nothing stops
// the composition early with `stalled` set.
struct PairwiseComposition {
    Prolongator p_hat;
    Vector w_coarse;
    AggregationMap aggregates;
    int rounds_done = 0;
    bool stalled = false;
};

PairwiseComposition compose_pairwise(const CsrMatrix& a, const Vector& w,
                                     int sweeps);

} // namespace amgmatch
