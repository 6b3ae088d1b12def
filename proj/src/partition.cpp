#include "amgmatch/partition.hpp"

#include <nlohmann/json.hpp>

#include <algorithm>
#include <numeric>
#include <stdexcept>
#include <string>

namespace amgmatch {

index_t ExchangeStats::total_requested_entries() const {
    index_t s = 0;
    for (const auto& m : request_messages) s += m.entry_count;
    return s;
}

index_t ExchangeStats::total_transferred_entries() const {
    index_t s = 0;
    for (const auto& m : value_messages) s += m.entry_count;
    return s;
}

namespace {

std::uint64_t morton_code(index_t x, index_t y, index_t z) {
    std::uint64_t code = 0;
    for (int b = 0; b < 21; ++b) {
        code |= ((static_cast<std::uint64_t>(x) >> b) & 1u) << (3 * b);
        code |= ((static_cast<std::uint64_t>(y) >> b) & 1u) << (3 * b + 1);
        code |= ((static_cast<std::uint64_t>(z) >> b) & 1u) << (3 * b + 2);
    }
    return code;
}

void split_balanced(const std::vector<index_t>& order, RankPartition& part) {
    const index_t n = static_cast<index_t>(order.size());
    const index_t base = n / part.n_ranks;
    const index_t rem = n % part.n_ranks;
    index_t pos = 0;
    for (int r = 0; r < part.n_ranks; ++r) {
        const index_t count = base + (r < rem ? 1 : 0);
        auto& rows = part.local_rows[r];
        rows.assign(order.begin() + pos, order.begin() + pos + count);
        std::sort(rows.begin(), rows.end());
        for (index_t g : rows) part.owner[g] = r;
        pos += count;
    }
}

std::uint64_t fnv1a(std::uint64_t h, std::uint64_t x) {
    for (int i = 0; i < 8; ++i) {
        h ^= (x >> (8 * i)) & 0xffu;
        h *= 0x100000001b3ull;
    }
    return h;
}

} // namespace

RankPartition make_partition(index_t n, int n_ranks, PartitionScheme scheme,
                             const GridDims& dims) {
    if (n_ranks < 1 || n_ranks > n)
        throw std::invalid_argument("make_partition: need 1 <= n_ranks <= n");
    RankPartition part;
    part.n = n;
    part.n_ranks = n_ranks;
    part.owner.assign(n, 0);
    part.local_rows.resize(n_ranks);
    part.halo_map.resize(n_ranks);

    std::vector<index_t> order(n);
    std::iota(order.begin(), order.end(), index_t{0});
    if (scheme == PartitionScheme::sfc_morton) {
        if (dims.count() != n)
            throw std::invalid_argument(
                "make_partition: sfc_morton requires grid dims with nx*ny*nz == n");
        std::vector<std::uint64_t> code(n);
        for (index_t z = 0, g = 0; z < dims.nz; ++z)
            for (index_t y = 0; y < dims.ny; ++y)
                for (index_t x = 0; x < dims.nx; ++x, ++g)
                    code[g] = morton_code(x, y, z);
        std::sort(order.begin(), order.end(), [&](index_t a, index_t b) {
            if (code[a] != code[b]) return code[a] < code[b];
            return a < b;
        });
    }
    split_balanced(order, part);
    return part;
}

std::uint64_t structure_fingerprint(const PartialRowMatrix& pm) {
    std::uint64_t h = 0xcbf29ce484222325ull;
    h = fnv1a(h, static_cast<std::uint64_t>(pm.n));
    h = fnv1a(h, pm.fragments.size());
    for (const CsrMatrix& f : pm.fragments) {
        h = fnv1a(h, static_cast<std::uint64_t>(f.nrows));
        h = fnv1a(h, static_cast<std::uint64_t>(f.ncols));
        for (index_t o : f.row_offsets) h = fnv1a(h, static_cast<std::uint64_t>(o));
        for (index_t c : f.col_indices) h = fnv1a(h, static_cast<std::uint64_t>(c));
    }
    return h;
}

void discover_halo(const PartialRowMatrix& pm, RankPartition& part,
                   ExchangeStats* stats) {
    if (static_cast<int>(pm.fragments.size()) != part.n_ranks)
        throw std::invalid_argument("discover_halo: fragment count != n_ranks");
    for (const CsrMatrix& f : pm.fragments) {
        if (f.nrows != part.n || f.ncols != part.n)
            throw std::invalid_argument(
                "discover_halo: fragment references out-of-range global index");
        validate_canonical(f);
    }

    for (int r = 0; r < part.n_ranks; ++r) {
        auto& halo = part.halo_map[r];
        halo.clear();
        const CsrMatrix& f = pm.fragments[r];
        for (index_t g = 0; g < f.nrows; ++g) {
            const int owner = part.owner[g];
            if (owner == r) continue;
            for (index_t k = f.row_offsets[g]; k < f.row_offsets[g + 1]; ++k)
                halo.push_back({owner, g, f.col_indices[k]});
        }
        // CSR traversal already orders by (row, col); order by owner first so
        // the per-destination request lists are contiguous.
        std::stable_sort(halo.begin(), halo.end(),
                         [](const HaloEntry& a, const HaloEntry& b) {
                             return a.owner_rank < b.owner_rank;
                         });
        if (stats) {
            std::size_t i = 0;
            while (i < halo.size()) {
                std::size_t j = i;
                while (j < halo.size() && halo[j].owner_rank == halo[i].owner_rank)
                    ++j;
                stats->request_messages.push_back(
                    {r, halo[i].owner_rank, static_cast<index_t>(j - i)});
                i = j;
            }
        }
    }
    part.structure_fingerprint = structure_fingerprint(pm);
    part.halo_built = true;
}

FullRowMatrix assemble_full_rows(const PartialRowMatrix& pm,
                                 const RankPartition& part,
                                 ExchangeStats* stats) {
    if (!part.halo_built)
        throw std::invalid_argument("assemble_full_rows: halo not discovered");
    if (structure_fingerprint(pm) != part.structure_fingerprint)
        throw std::invalid_argument(
            "assemble_full_rows: matrix structure changed since discovery; "
            "re-run discover_halo");

    FullRowMatrix full;
    full.n = part.n;
    full.blocks.resize(part.n_ranks);
    full.col_halo.resize(part.n_ranks);

    // Local row position of each owned global row.
    std::vector<index_t> local_pos(part.n, 0);
    for (int r = 0; r < part.n_ranks; ++r)
        for (std::size_t li = 0; li < part.local_rows[r].size(); ++li)
            local_pos[part.local_rows[r][li]] = static_cast<index_t>(li);

    // Contributions reaching each owner, gathered in ascending holder rank so
    // duplicate (row, col) pairs are summed in that fixed order.
    std::vector<std::vector<Triplet>> inbox(part.n_ranks);
    for (int holder = 0; holder < part.n_ranks; ++holder) {
        const CsrMatrix& f = pm.fragments[holder];
        for (index_t g : part.local_rows[holder])
            for (index_t k = f.row_offsets[g]; k < f.row_offsets[g + 1]; ++k)
                inbox[holder].push_back(
                    {local_pos[g], f.col_indices[k], f.values[k]});
        // Off-rank contributions travel exactly as recorded by discovery.
        std::size_t i = 0;
        const auto& halo = part.halo_map[holder];
        while (i < halo.size()) {
            std::size_t j = i;
            const int owner = halo[i].owner_rank;
            while (j < halo.size() && halo[j].owner_rank == owner) {
                inbox[owner].push_back({local_pos[halo[j].row], halo[j].col,
                                        f.coeff(halo[j].row, halo[j].col)});
                ++j;
            }
            if (stats)
                stats->value_messages.push_back(
                    {holder, owner, static_cast<index_t>(j - i)});
            i = j;
        }
    }

    for (int r = 0; r < part.n_ranks; ++r) {
        full.blocks[r] = csr_from_triplets(
            static_cast<index_t>(part.local_rows[r].size()), part.n, inbox[r]);
        auto& halo_cols = full.col_halo[r];
        for (index_t c : full.blocks[r].col_indices)
            if (part.owner[c] != r) halo_cols.push_back(c);
        std::sort(halo_cols.begin(), halo_cols.end());
        halo_cols.erase(std::unique(halo_cols.begin(), halo_cols.end()),
                        halo_cols.end());
    }
    return full;
}

CsrMatrix concatenate_global(const FullRowMatrix& full, const RankPartition& part) {
    CsrMatrix a;
    a.nrows = a.ncols = part.n;
    a.row_offsets.assign(part.n + 1, 0);

    std::vector<index_t> local_pos(part.n, 0);
    for (int r = 0; r < part.n_ranks; ++r)
        for (std::size_t li = 0; li < part.local_rows[r].size(); ++li)
            local_pos[part.local_rows[r][li]] = static_cast<index_t>(li);

    for (index_t g = 0; g < part.n; ++g) {
        const CsrMatrix& blk = full.blocks[part.owner[g]];
        const index_t li = local_pos[g];
        for (index_t k = blk.row_offsets[li]; k < blk.row_offsets[li + 1]; ++k) {
            a.col_indices.push_back(blk.col_indices[k]);
            a.values.push_back(blk.values[k]);
        }
        a.row_offsets[g + 1] = static_cast<index_t>(a.values.size());
    }
    validate_canonical(a);
    return a;
}

CsrMatrix global_from_partial(const PartialRowMatrix& pm) {
    std::vector<Triplet> entries;
    for (const CsrMatrix& f : pm.fragments)
        for (index_t i = 0; i < f.nrows; ++i)
            for (index_t k = f.row_offsets[i]; k < f.row_offsets[i + 1]; ++k)
                entries.push_back({i, f.col_indices[k], f.values[k]});
    return csr_from_triplets(pm.n, pm.n, entries);
}

nlohmann::json partition_to_json(const RankPartition& part) {
    nlohmann::json ranks = nlohmann::json::array();
    for (int r = 0; r < part.n_ranks; ++r) {
        nlohmann::json ranges = nlohmann::json::array();
        const auto& rows = part.local_rows[r];
        std::size_t i = 0;
        while (i < rows.size()) {
            std::size_t j = i + 1;
            while (j < rows.size() && rows[j] == rows[j - 1] + 1) ++j;
            ranges.push_back({rows[i], rows[j - 1] + 1});
            i = j;
        }
        ranks.push_back(ranges);
    }
    return {{"n", part.n}, {"n_ranks", part.n_ranks}, {"owned_ranges", ranks}};
}

RankPartition partition_from_json(const nlohmann::json& j) {
    RankPartition part;
    part.n = j.at("n").get<index_t>();
    part.n_ranks = j.at("n_ranks").get<int>();
    part.owner.assign(part.n, -1);
    part.local_rows.resize(part.n_ranks);
    part.halo_map.resize(part.n_ranks);
    const auto& ranks = j.at("owned_ranges");
    if (static_cast<int>(ranks.size()) != part.n_ranks)
        throw std::invalid_argument("partition_from_json: rank count mismatch");
    for (int r = 0; r < part.n_ranks; ++r) {
        for (const auto& range : ranks[r]) {
            index_t lo = range.at(0).get<index_t>();
            index_t hi = range.at(1).get<index_t>();
            for (index_t g = lo; g < hi; ++g) {
                if (g < 0 || g >= part.n || part.owner[g] != -1)
                    throw std::invalid_argument(
                        "partition_from_json: invalid or overlapping ranges");
                part.owner[g] = r;
                part.local_rows[r].push_back(g);
            }
        }
        std::sort(part.local_rows[r].begin(), part.local_rows[r].end());
    }
    for (index_t g = 0; g < part.n; ++g)
        if (part.owner[g] == -1)
            throw std::invalid_argument("partition_from_json: uncovered index " +
                                        std::to_string(g));
    return part;
}

} // namespace amgmatch
