#pragma once

#include "trussnet/assembly.hpp"
#include "trussnet/sweep.hpp"

namespace trussnet {

enum class MassKind { consistent, lumped };

inline const char* to_string(MassKind k) { return k == MassKind::consistent ? "consistent" : "lumped"; }

struct MassMatrix {
    Matrix entries;
    MassKind kind = MassKind::consistent;
    std::map<std::string, Eigen::Index> index_map;
};

// consistent: linear shape functions, (m/3) e e^T diagonal and (m/6) e e^T off-diagonal blocks
// lumped: half of each rod's mass at each end, isotropic
inline Matrix mass_on_layout(const Truss& t, const DofLayout& layout, MassKind kind) {
    Matrix m = Matrix::Zero(layout.size(), layout.size());
    if (kind == MassKind::consistent) {
        for (const auto& s : make_stencils(t, layout)) {
            const double rm = t.properties(s.rod).mass;
            add_rod(m, s, rm / 3.0, rm / 6.0);
        }
        return m;
    }
    for (const auto& b : layout.blocks()) {
        double mj = 0;
        for (auto r : t.incident(b.joint)) mj += t.properties(r).mass;
        m.block(b.offset, b.offset, b.size(), b.size()) = 0.5 * mj * (b.basis.transpose() * b.basis);
    }
    return m;
}

inline MassMatrix assemble_mass(const Truss& t, MassKind kind, bool reduce_anchors) {
    DofLayout layout(t, reduce_anchors, false);
    return {mass_on_layout(t, layout, kind), kind, layout.index_map(t)};
}

// K - omega^2 M on a fixed layout
class FemOperator {
public:
    FemOperator(const Truss& t, DofLayout layout, MassKind kind)
        : layout_(std::move(layout)),
          k_(LaplacianOperator(t, layout_).stiffness()),
          m_(mass_on_layout(t, layout_, kind)) {}

    const DofLayout& layout() const { return layout_; }
    const Matrix& stiffness() const { return k_; }
    const Matrix& mass() const { return m_; }
    Matrix assemble(double omega) const { return k_ - omega * omega * m_; }

private:
    DofLayout layout_;
    Matrix k_, m_;
};

inline double fem_determinant(const Truss& t, double omega, MassKind kind, bool reduce_anchors) {
    FemOperator op(t, DofLayout(t, reduce_anchors, false), kind);
    return symmetric_inertia(op.assemble(omega)).determinant();
}

// Roots of det(K - omega^2 M) after subdividing every rod `divisions` times.
// Joints whose rods do not span the dimension are restricted to that span.
inline std::vector<Root> fem_frequencies(const Truss& t, const FrequencyWindow& window, MassKind kind, int divisions,
                                         bool reduce_anchors = true, SweepDiagnostics* diag = nullptr) {
    window.validate();
    if (divisions < 1) throw InputError("divisions must be >= 1");
    const Truss fine = subdivide(t, divisions);
    FemOperator op(fine, DofLayout(fine, reduce_anchors, true), kind);
    if (diag) diag->mechanism_joints = op.layout().mechanism_joints();
    if (op.layout().size() == 0) return {};
    auto count = [&](double w) { return symmetric_inertia(op.assemble(w)).negative; };
    return bracket_roots(count, window.omega_min, window.omega_max, window.points_for(t.min_transit_time()),
                         window.tolerance(), window.threads, diag);
}

} // namespace trussnet
