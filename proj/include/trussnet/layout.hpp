#pragma once

#include "trussnet/model.hpp"

#include <map>
#include <vector>

namespace trussnet {

// Which joint DOFs enter a reduced system and in which basis.
// Anchored joints may be dropped; joints whose rods do not span the ambient
// dimension can be restricted to that span (the rest is a mechanism).
class DofLayout {
public:
    struct Block {
        std::size_t joint;
        Eigen::Index offset;
        Matrix basis;  // dim x size, orthonormal columns
        bool projected;
        Eigen::Index size() const { return basis.cols(); }
    };

    DofLayout() = default;
    DofLayout(const Truss& t, bool reduce_anchors, bool project_degenerate)
        : dim_(t.dimension()), reduced_(reduce_anchors), block_of_(t.joint_count(), -1) {
        Eigen::Index offset = 0;
        for (std::size_t j = 0; j < t.joint_count(); ++j) {
            const auto& joint = t.joints()[j];
            if (reduce_anchors && joint.anchored) continue;
            Matrix basis = Matrix::Identity(dim_, dim_);
            bool projected = false;
            if (project_degenerate) {
                const auto& inc = t.incident(j);
                Matrix e(dim_, Eigen::Index(inc.size()));
                for (std::size_t c = 0; c < inc.size(); ++c) e.col(Eigen::Index(c)) = t.properties(inc[c]).unit_vector;
                Matrix span = column_span(e);
                if (span.cols() < dim_) {
                    basis = span;
                    projected = true;
                    mechanism_.push_back(joint.id);
                }
            }
            if (basis.cols() == 0) continue;
            block_of_[j] = int(blocks_.size());
            blocks_.push_back({j, offset, std::move(basis), projected});
            offset += blocks_.back().size();
        }
        size_ = offset;
    }

    Eigen::Index size() const { return size_; }
    int dimension() const { return dim_; }
    bool reduced() const { return reduced_; }
    const std::vector<Block>& blocks() const { return blocks_; }
    const Block* block(std::size_t joint) const {
        int b = block_of_[joint];
        return b < 0 ? nullptr : &blocks_[std::size_t(b)];
    }
    // joints restricted to the span of their rods
    const std::vector<std::string>& mechanism_joints() const { return mechanism_; }
    bool plain() const { return mechanism_.empty(); }

    std::map<std::string, Eigen::Index> index_map(const Truss& t) const {
        std::map<std::string, Eigen::Index> m;
        for (const auto& b : blocks_) m[t.joints()[b.joint].id] = b.offset;
        return m;
    }

    // reduced coordinates -> one global vector per included joint
    std::vector<std::pair<std::size_t, Vector>> expand(const Vector& x) const {
        std::vector<std::pair<std::size_t, Vector>> out;
        for (const auto& b : blocks_) out.emplace_back(b.joint, b.basis * x.segment(b.offset, b.size()));
        return out;
    }

    // projector from reduced coordinates to the full dim*J joint vector
    Matrix prolongation(std::size_t joint_count) const {
        Matrix p = Matrix::Zero(Eigen::Index(joint_count) * dim_, size_);
        for (const auto& b : blocks_) p.block(Eigen::Index(b.joint) * dim_, b.offset, dim_, b.size()) = b.basis;
        return p;
    }

private:
    int dim_ = 2;
    bool reduced_ = false;
    Eigen::Index size_ = 0;
    std::vector<int> block_of_;
    std::vector<Block> blocks_;
    std::vector<std::string> mechanism_;
};

// Rod end directions expressed in the layout basis of each end.
struct RodStencil {
    std::size_t rod;
    Eigen::Index a = -1, b = -1;  // block offsets, -1 when that end is not in the layout
    Vector pa, pb;                // basis^T e at each end, e pointing from joints[0] to joints[1]

    bool active() const { return a >= 0 || b >= 0; }
};

inline std::vector<RodStencil> make_stencils(const Truss& t, const DofLayout& layout) {
    std::vector<RodStencil> out;
    out.reserve(t.rod_count());
    for (std::size_t r = 0; r < t.rod_count(); ++r) {
        RodStencil s;
        s.rod = r;
        const auto& e = t.properties(r).unit_vector;
        if (auto* ba = layout.block(t.ends(r)[0])) {
            s.a = ba->offset;
            s.pa = ba->basis.transpose() * e;
        }
        if (auto* bb = layout.block(t.ends(r)[1])) {
            s.b = bb->offset;
            s.pb = bb->basis.transpose() * e;
        }
        out.push_back(std::move(s));
    }
    return out;
}

// diag * e e^T on both diagonal blocks, off * e e^T on both off-diagonal blocks
inline void add_rod(Matrix& m, const RodStencil& s, double diag, double off) {
    const auto na = s.pa.size(), nb = s.pb.size();
    if (s.a >= 0) m.block(s.a, s.a, na, na).noalias() += diag * s.pa * s.pa.transpose();
    if (s.b >= 0) m.block(s.b, s.b, nb, nb).noalias() += diag * s.pb * s.pb.transpose();
    if (s.a >= 0 && s.b >= 0) {
        m.block(s.a, s.b, na, nb).noalias() += off * s.pa * s.pb.transpose();
        m.block(s.b, s.a, nb, na).noalias() += off * s.pb * s.pa.transpose();
    }
}

} // namespace trussnet
