#pragma once

/// @file partition.hpp
/// @brief Simulated row-block rank decomposition and the partial-row to
///        full-row assembly conversion.
///
/// Ranks are simulated in-process: the exchange that a distributed code
/// would do over the network is expressed as explicit message records so
/// message volume can be counted. Discovery (which entries must move where)
/// runs once per matrix structure; value retrieval can then be repeated for
/// every coefficient update against the recorded structure fingerprint.

#include "amgmatch/csr.hpp"

#include <nlohmann/json_fwd.hpp>

#include <cstdint>
#include <vector>

namespace amgmatch {

enum class PartitionScheme { contiguous, sfc_morton };

/// Grid extents for sfc_morton partitioning of grid-structured index sets.
/// Global index convention: g = x + nx*(y + ny*z), x fastest.
struct GridDims {
    index_t nx = 0;
    index_t ny = 1;
    index_t nz = 1;
    index_t count() const { return nx * ny * nz; }
};

/// A contribution held by one rank for a row owned by another rank.
struct HaloEntry {
    int owner_rank = 0;  ///< rank that owns `row`
    index_t row = 0;
    index_t col = 0;
    friend bool operator==(const HaloEntry&, const HaloEntry&) = default;
};

/// Message records for the two exchange phases (index requests, then values).
struct ExchangeStats {
    struct Message {
        int from = 0;
        int to = 0;
        index_t entry_count = 0;
    };
    std::vector<Message> request_messages;
    std::vector<Message> value_messages;
    index_t total_requested_entries() const;
    index_t total_transferred_entries() const;
};

struct RankPartition {
    index_t n = 0;
    int n_ranks = 1;
    std::vector<int> owner;                        ///< size n
    std::vector<std::vector<index_t>> local_rows;  ///< per rank, ascending
    /// per holding rank: contributions it stores for rows it does not own
    std::vector<std::vector<HaloEntry>> halo_map;
    bool halo_built = false;
    std::uint64_t structure_fingerprint = 0;

    index_t owned_count(int rank) const {
        return static_cast<index_t>(local_rows[rank].size());
    }
};

/// Per-rank fragments over global indices. The true matrix entry is the sum
/// of the rank contributions; a row near a subdomain boundary is typically
/// split across several fragments.
struct PartialRowMatrix {
    index_t n = 0;
    std::vector<CsrMatrix> fragments;  ///< one n-by-n fragment per rank
};

/// Per-rank blocks holding complete rows for owned indices only.
struct FullRowMatrix {
    index_t n = 0;
    std::vector<CsrMatrix> blocks;  ///< rows follow local_rows order, global columns
    std::vector<std::vector<index_t>> col_halo;  ///< referenced but unowned columns
};

/// Balanced ownership; for contiguous, max owned - min owned <= 1. The
/// sfc_morton scheme orders grid points along a Morton curve before the
/// balanced split and requires dims with dims.count() == n.
RankPartition make_partition(index_t n, int n_ranks, PartitionScheme scheme,
                             const GridDims& dims = {});

/// Structure hash over fragment patterns; value changes do not affect it.
std::uint64_t structure_fingerprint(const PartialRowMatrix& pm);

/// Fills part.halo_map with exactly the off-rank contributions present in
/// pm, records the structure fingerprint, and logs one request message per
/// (holder, owner) pair. Idempotent.
void discover_halo(const PartialRowMatrix& pm, RankPartition& part,
                   ExchangeStats* stats = nullptr);

/// Sums rank contributions into owner rows, ascending rank id per entry.
/// Requires a prior discover_halo whose fingerprint still matches pm; a
/// structural change without re-discovery is rejected. Value-only updates
/// reuse the recorded halo structure.
FullRowMatrix assemble_full_rows(const PartialRowMatrix& pm,
                                 const RankPartition& part,
                                 ExchangeStats* stats = nullptr);

/// Stitches per-rank full-row blocks back into one global matrix.
CsrMatrix concatenate_global(const FullRowMatrix& full, const RankPartition& part);

/// Entrywise sum of all fragments, ascending rank id (single-process view).
CsrMatrix global_from_partial(const PartialRowMatrix& pm);

nlohmann::json partition_to_json(const RankPartition& part);
RankPartition partition_from_json(const nlohmann::json& j);

} // namespace amgmatch
