#include "amgmatch/poisson.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

namespace amgmatch {

namespace {

void check_size(int dim, index_t n_per_side) {
    if (dim < 1 || dim > 3)
        throw std::invalid_argument("gen_poisson: dim must be 1, 2, or 3");
    if (n_per_side < 2)
        throw std::invalid_argument("gen_poisson: n_per_side must be >= 2");
    index_t total = 1;
    for (int d = 0; d < dim; ++d) {
        if (total > (index_t{1} << 31) / n_per_side)
            throw std::invalid_argument("gen_poisson: problem size overflow");
        total *= n_per_side;
    }
}

} // namespace

GridDims poisson_dims(int dim, index_t n_per_side) {
    check_size(dim, n_per_side);
    GridDims dims;
    dims.nx = n_per_side;
    dims.ny = dim >= 2 ? n_per_side : 1;
    dims.nz = dim >= 3 ? n_per_side : 1;
    return dims;
}

PoissonProblem gen_poisson(int dim, index_t n_per_side) {
    const GridDims dims = poisson_dims(dim, n_per_side);
    const index_t n = dims.count();
    const index_t sx = 1, sy = dims.nx, sz = dims.nx * dims.ny;

    PoissonProblem prob;
    prob.dims = dims;
    CsrMatrix& a = prob.a;
    a.nrows = a.ncols = n;
    a.symmetric_hint = true;
    a.row_offsets.assign(n + 1, 0);
    const double diag = 2.0 * dim;
    for (index_t z = 0, g = 0; z < dims.nz; ++z)
        for (index_t y = 0; y < dims.ny; ++y)
            for (index_t x = 0; x < dims.nx; ++x, ++g) {
                if (dim >= 3 && z > 0) {
                    a.col_indices.push_back(g - sz);
                    a.values.push_back(-1.0);
                }
                if (dim >= 2 && y > 0) {
                    a.col_indices.push_back(g - sy);
                    a.values.push_back(-1.0);
                }
                if (x > 0) {
                    a.col_indices.push_back(g - sx);
                    a.values.push_back(-1.0);
                }
                a.col_indices.push_back(g);
                a.values.push_back(diag);
                if (x + 1 < dims.nx) {
                    a.col_indices.push_back(g + sx);
                    a.values.push_back(-1.0);
                }
                if (dim >= 2 && y + 1 < dims.ny) {
                    a.col_indices.push_back(g + sy);
                    a.values.push_back(-1.0);
                }
                if (dim >= 3 && z + 1 < dims.nz) {
                    a.col_indices.push_back(g + sz);
                    a.values.push_back(-1.0);
                }
                a.row_offsets[g + 1] = static_cast<index_t>(a.values.size());
            }
    validate_canonical(a);

    const double scale = std::numbers::pi / static_cast<double>(n_per_side + 1);
    prob.x_exact.resize(n);
    for (index_t z = 0, g = 0; z < dims.nz; ++z)
        for (index_t y = 0; y < dims.ny; ++y)
            for (index_t x = 0; x < dims.nx; ++x, ++g) {
                double v = std::sin(scale * static_cast<double>(x + 1));
                if (dim >= 2) v *= std::sin(scale * static_cast<double>(y + 1));
                if (dim >= 3) v *= std::sin(scale * static_cast<double>(z + 1));
                prob.x_exact[g] = v;
            }
    prob.rhs = spmv(a, prob.x_exact);
    return prob;
}

PartialRowMatrix gen_poisson_partial(int dim, index_t n_per_side,
                                     const RankPartition& part) {
    const GridDims dims = poisson_dims(dim, n_per_side);
    const index_t n = dims.count();
    if (part.n != n)
        throw std::invalid_argument(
            "gen_poisson_partial: partition size mismatch");
    const index_t strides[3] = {1, dims.nx, dims.nx * dims.ny};
    const index_t extents[3] = {dims.nx, dims.ny, dims.nz};

    std::vector<std::vector<Triplet>> contrib(part.n_ranks);
    for (index_t z = 0, g = 0; z < dims.nz; ++z)
        for (index_t y = 0; y < dims.ny; ++y)
            for (index_t x = 0; x < dims.nx; ++x, ++g) {
                const index_t coord[3] = {x, y, z};
                for (int d = 0; d < dim; ++d) {
                    // interior edge toward the positive direction
                    if (coord[d] + 1 < extents[d]) {
                        const index_t h = g + strides[d];
                        auto& dst = contrib[part.owner[std::min(g, h)]];
                        dst.push_back({g, g, 1.0});
                        dst.push_back({g, h, -1.0});
                        dst.push_back({h, h, 1.0});
                        dst.push_back({h, g, -1.0});
                    }
                    // boundary faces contribute to the diagonal only
                    if (coord[d] == 0)
                        contrib[part.owner[g]].push_back({g, g, 1.0});
                    if (coord[d] + 1 == extents[d])
                        contrib[part.owner[g]].push_back({g, g, 1.0});
                }
            }

    PartialRowMatrix pm;
    pm.n = n;
    pm.fragments.resize(part.n_ranks);
    for (int r = 0; r < part.n_ranks; ++r)
        pm.fragments[r] = csr_from_triplets(n, n, contrib[r]);
    return pm;
}

} // namespace amgmatch
