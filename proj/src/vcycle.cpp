#include "amgmatch/vcycle.hpp"

#include <stdexcept>

namespace amgmatch {

VCyclePreconditioner::VCyclePreconditioner(const AmgHierarchy& h) : h_(&h) {
    if (h.levels.empty())
        throw std::invalid_argument("VCyclePreconditioner: empty hierarchy");
    for (std::size_t l = 0; l + 1 < h.levels.size(); ++l) {
        const HierarchyLevel& lvl = h.levels[l];
        if (!lvl.has_p || lvl.p.p.nrows != lvl.a.nrows ||
            lvl.p.p.ncols != h.levels[l + 1].a.nrows)
            throw std::invalid_argument(
                "VCyclePreconditioner: prolongator dimensions corrupt at level " +
                std::to_string(l));
        pre_.emplace_back(lvl.a, lvl.part, lvl.pre_smoother);
        post_.emplace_back(lvl.a, lvl.part, lvl.post_smoother);
        pt_.push_back(transpose(lvl.p.p));
    }
    const HierarchyLevel& bottom = h.levels.back();
    if (h.config.coarsest.method == CoarsestSolverSpec::Method::dense_direct) {
        coarse_dense_.compute(to_dense(bottom.a));
        if (coarse_dense_.info() != Eigen::Success)
            throw std::runtime_error(
                "VCyclePreconditioner: dense coarse factorization failed");
    } else {
        coarse_prec_ = std::make_unique<BlockJacobiIlu>(bottom.a, bottom.part);
    }
}

Vector VCyclePreconditioner::coarsest_solve(const Vector& r) const {
    const HierarchyLevel& bottom = h_->levels.back();
    if (h_->config.coarsest.method == CoarsestSolverSpec::Method::dense_direct)
        return coarse_dense_.solve(r);
    auto [z, report] = fcg_solve(
        bottom.a, r, [this](const Vector& v) { return coarse_prec_->apply(v); },
        h_->config.coarsest.rel_tol, h_->config.coarsest.max_iters,
        Vector::Zero(r.size()));
    return z;
}

Vector VCyclePreconditioner::cycle(std::size_t level, const Vector& r) const {
    if (level + 1 == h_->levels.size()) return coarsest_solve(r);
    const HierarchyLevel& lvl = h_->levels[level];

    Vector z = pre_[level].apply(r, SweepDirection::forward);
    const Vector residual = r - spmv(lvl.a, z);
    const Vector coarse_r = spmv(pt_[level], residual);
    const Vector coarse_z = cycle(level + 1, coarse_r);
    z += spmv(lvl.p.p, coarse_z);
    for (int s = 0; s < post_[level].spec().sweeps; ++s)
        post_[level].sweep(z, r, SweepDirection::backward);
    return z;
}

Vector VCyclePreconditioner::apply(const Vector& r) const {
    if (r.size() != h_->levels.front().a.nrows)
        throw std::invalid_argument("VCyclePreconditioner: rhs length mismatch");
    return cycle(0, r);
}

PrecApply VCyclePreconditioner::as_prec() const {
    return [this](const Vector& r) { return apply(r); };
}

Vector v_cycle_apply(const AmgHierarchy& h, const Vector& r) {
    return VCyclePreconditioner(h).apply(r);
}

} // namespace amgmatch
