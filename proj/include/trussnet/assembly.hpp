#pragma once

#include "trussnet/layout.hpp"

#include <cmath>
#include <map>
#include <numbers>

namespace trussnet {

inline constexpr double kPoleGuard = 1e-5;
inline constexpr double kRcondThreshold = 1e-12;

struct RodSpectralFactors {
    double cot_term;
    double csc_term;
    double eta;
    double pole_distance;
    long nearest_order;  // n >= 1 of the nearest pole
};

inline RodSpectralFactors rod_spectral_factors(const RodProperties& p, double omega) {
    const double x = omega * p.transit_time;
    long n = std::lround(x / std::numbers::pi);
    if (n < 1) n = 1;
    const double s = std::sin(x), c = std::cos(x);
    return {c / s, 1.0 / s, c / s / p.line_impedance, std::abs(x - double(n) * std::numbers::pi), n};
}

struct SpectralMatrix {
    double omega = 0;
    Matrix entries;
    std::map<std::string, Eigen::Index> index_map;
    bool reduced = false;
};

struct StiffnessMatrix {
    Matrix entries;
    std::map<std::string, Eigen::Index> index_map;
};

// D(omega) on a fixed DOF layout. Cheap to evaluate repeatedly.
class LaplacianOperator {
public:
    LaplacianOperator(const Truss& t, DofLayout layout)
        : truss_(&t), layout_(std::move(layout)), stencils_(make_stencils(t, layout_)) {}
    LaplacianOperator(const Truss& t, bool reduce_anchors, bool project_degenerate = false)
        : LaplacianOperator(t, DofLayout(t, reduce_anchors, project_degenerate)) {}

    const Truss& truss() const { return *truss_; }
    const DofLayout& layout() const { return layout_; }
    const std::vector<RodStencil>& stencils() const { return stencils_; }

    // throws PoleProximity when an active rod sits within `pole_guard` of n*pi (guard <= 0 disables)
    void check_poles(double omega, double pole_guard) const {
        if (pole_guard <= 0) return;
        for (const auto& s : stencils_) {
            if (!s.active()) continue;
            auto f = rod_spectral_factors(truss_->properties(s.rod), omega);
            if (f.pole_distance <= pole_guard) throw PoleProximity(truss_->rods()[s.rod].id, f.nearest_order, omega);
        }
    }

    Matrix assemble(double omega, double pole_guard = kPoleGuard) const {
        check_poles(omega, pole_guard);
        Matrix d = Matrix::Zero(layout_.size(), layout_.size());
        for (const auto& s : stencils_) {
            if (!s.active()) continue;
            const auto& p = truss_->properties(s.rod);
            const double x = omega * p.transit_time;
            const double scale = p.line_impedance * omega / std::sin(x);
            add_rod(d, s, scale * std::cos(x), -scale);
        }
        return d;
    }

    Matrix stiffness() const {
        Matrix k = Matrix::Zero(layout_.size(), layout_.size());
        for (const auto& s : stencils_) {
            const double kk = truss_->properties(s.rod).spring_stiffness;
            add_rod(k, s, kk, -kk);
        }
        return k;
    }

private:
    const Truss* truss_;
    DofLayout layout_;
    std::vector<RodStencil> stencils_;
};

inline SpectralMatrix assemble_laplacian(const Truss& t, double omega, bool reduce_anchors,
                                         double pole_guard = kPoleGuard) {
    if (!(omega > 0)) throw InputError("omega must be positive");
    LaplacianOperator op(t, reduce_anchors);
    return {omega, op.assemble(omega, pole_guard), op.layout().index_map(t), reduce_anchors};
}

inline StiffnessMatrix assemble_stiffness(const Truss& t, bool reduce_anchors) {
    LaplacianOperator op(t, reduce_anchors);
    return {op.stiffness(), op.layout().index_map(t)};
}

inline double laplacian_determinant(const Truss& t, double omega, bool reduce_anchors,
                                    double pole_guard = kPoleGuard) {
    return symmetric_inertia(assemble_laplacian(t, omega, reduce_anchors, pole_guard).entries).determinant();
}

using JointVectors = std::map<std::string, Vector>;

// Solves D(omega) U = P over the free joints. Joints whose rods do not span the
// dimension are solved within that span; a load outside it cannot be carried.
inline JointVectors solve_forced_response(const Truss& t, double omega, const JointVectors& forces,
                                          double pole_guard = kPoleGuard) {
    if (!(omega > 0)) throw InputError("omega must be positive");
    LaplacianOperator op(t, true, true);
    const auto& layout = op.layout();
    const int dim = t.dimension();

    Vector p = Vector::Zero(layout.size());
    double pnorm = 0;
    for (const auto& [id, f] : forces) {
        const auto j = t.joint_index(id);
        if (f.size() != dim) throw DimensionMismatch("force on joint " + id + " has wrong dimension");
        if (t.joints()[j].anchored) throw InputError("force given on anchored joint " + id);
        pnorm += f.squaredNorm();
        const auto* b = layout.block(j);
        Vector carried = b ? Vector(b->basis * (b->basis.transpose() * f)) : Vector::Zero(dim);
        if ((f - carried).norm() > 1e-12 * std::max(1.0, f.norm()))
            throw SingularAtFrequency("load at joint " + id + " has a component no rod can carry");
        if (b) p.segment(b->offset, b->size()) = b->basis.transpose() * f;
    }
    pnorm = std::sqrt(pnorm);

    Matrix d = op.assemble(omega, pole_guard);
    Eigen::PartialPivLU<Matrix> lu(d);
    if (d.size() == 0 || lu.rcond() < kRcondThreshold)
        throw SingularAtFrequency("D(omega) is singular at omega = " + std::to_string(omega));
    Vector u = lu.solve(p);
    if (pnorm > 0 && (d * u - p).norm() > 1e-9 * pnorm)
        throw SingularAtFrequency("forced response residual too large at omega = " + std::to_string(omega));

    JointVectors out;
    for (const auto& j : t.joints())
        if (!j.anchored) out[j.id] = Vector::Zero(dim);
    for (auto& [j, v] : layout.expand(u)) out[t.joints()[j].id] = v;
    return out;
}

} // namespace trussnet
