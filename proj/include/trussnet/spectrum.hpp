#pragma once

#include "trussnet/assembly.hpp"
#include "trussnet/sweep.hpp"

#include <iterator>
#include <limits>
#include <numbers>
#include <optional>
#include <set>

namespace trussnet {

inline constexpr double kModeTol = 1e-7;
inline constexpr double kFeasTol = 1e-8;

enum class ModeKind { regular, resonant };

inline const char* to_string(ModeKind k) { return k == ModeKind::regular ? "regular" : "resonant"; }

struct ModeResult {
    double omega = 0;
    ModeKind kind = ModeKind::regular;
    int multiplicity = 1;
    JointVectors displacements;  // free joints, unit norm overall
    JointVectors anchor_forces;
    std::optional<long> resonant_order;
    JointVectors displacement_rate;  // resonant modes: the d/domega parameters balancing the limit forces
};

struct Pole {
    double omega;
    std::vector<std::size_t> rods;
    std::vector<long> orders;
};

// All omega in [omega_min, omega_max] with omega * tau = n pi for some rod, grouped when shared.
inline std::vector<Pole> pole_set(const Truss& t, const FrequencyWindow& window,
                                  const std::vector<char>* rod_filter = nullptr) {
    std::vector<std::tuple<double, std::size_t, long>> raw;
    for (std::size_t r = 0; r < t.rod_count(); ++r) {
        if (rod_filter && !(*rod_filter)[r]) continue;
        const double tau = t.properties(r).transit_time;
        long n = std::max<long>(1, long(std::ceil(window.omega_min * tau / std::numbers::pi)));
        for (; double(n) * std::numbers::pi / tau <= window.omega_max; ++n) {
            const double w = double(n) * std::numbers::pi / tau;
            if (w >= window.omega_min) raw.emplace_back(w, r, n);
        }
    }
    std::sort(raw.begin(), raw.end());
    std::vector<Pole> out;
    for (const auto& [w, r, n] : raw) {
        if (!out.empty() && w - out.back().omega <= 1e-9 * w) {
            out.back().rods.push_back(r);
            out.back().orders.push_back(n);
        } else {
            out.push_back({w, {r}, {n}});
        }
    }
    return out;
}

namespace detail {

// Orders the joint vectors of a layout vector, scales to unit norm and makes the
// first clearly nonzero component positive. Returns the factor applied.
inline double normalize_mode(const DofLayout& layout, Vector& x) {
    const double n = x.norm();
    if (n == 0) return 1.0;
    double f = 1.0 / n;
    x *= f;
    auto parts = layout.expand(x);
    double big = 0;
    for (const auto& [j, v] : parts) big = std::max(big, v.cwiseAbs().maxCoeff());
    for (const auto& [j, v] : parts) {
        bool done = false;
        for (Eigen::Index i = 0; i < v.size(); ++i) {
            if (std::abs(v(i)) > 1e-9 * big) {
                if (v(i) < 0) {
                    x = -x;
                    f = -f;
                }
                done = true;
                break;
            }
        }
        if (done) break;
    }
    return f;
}

inline JointVectors to_joint_vectors(const Truss& t, const DofLayout& layout, const Vector& x) {
    JointVectors out;
    for (const auto& j : t.joints())
        if (!(layout.reduced() && j.anchored)) out[j.id] = Vector::Zero(t.dimension());
    for (auto& [j, v] : layout.expand(x)) out[t.joints()[j].id] = v;
    return out;
}

inline Vector joint_or_zero(const JointVectors& m, const std::string& id, int dim) {
    auto it = m.find(id);
    return it == m.end() ? Vector::Zero(dim) : it->second;
}

// Rows of D at anchored joints applied to a displacement field. Rods in `resonant`
// contribute their limit force from the displacement rate instead.
inline JointVectors anchor_rows(const Truss& t, double omega, const JointVectors& w, const JointVectors& rate,
                                const std::map<std::size_t, long>& resonant) {
    JointVectors out;
    const int dim = t.dimension();
    for (std::size_t j = 0; j < t.joint_count(); ++j) {
        if (!t.joints()[j].anchored) continue;
        Vector f = Vector::Zero(dim);
        for (auto r : t.incident(j)) {
            const auto& p = t.properties(r);
            const auto& e = p.unit_vector;
            const bool at_mu = t.ends(r)[0] == j;
            const auto& mu = t.joints()[t.ends(r)[0]].id;
            const auto& nu = t.joints()[t.ends(r)[1]].id;
            auto res = resonant.find(r);
            if (res == resonant.end()) {
                const double x = omega * p.transit_time;
                const double scale = p.line_impedance * omega / std::sin(x);
                const Vector wj = joint_or_zero(w, t.joints()[j].id, dim);
                const Vector wo = joint_or_zero(w, at_mu ? nu : mu, dim);
                f += scale * e * (std::cos(x) * e.dot(wj) - e.dot(wo));
            } else {
                const double sign = (res->second % 2 == 0) ? 1.0 : -1.0;
                const Vector dmu = joint_or_zero(rate, mu, dim);
                const Vector dnu = joint_or_zero(rate, nu, dim);
                const double s = (e.dot(dmu) - sign * e.dot(dnu)) / p.transit_time;
                const double lw = p.line_impedance * omega;
                f += at_mu ? Vector(lw * s * e) : Vector(-sign * lw * s * e);
            }
        }
        out[t.joints()[j].id] = f;
    }
    return out;
}

} // namespace detail

inline JointVectors anchor_forces(const Truss& t, const ModeResult& mode) {
    std::map<std::size_t, long> resonant;
    if (mode.kind == ModeKind::resonant) {
        for (std::size_t r = 0; r < t.rod_count(); ++r) {
            auto f = rod_spectral_factors(t.properties(r), mode.omega);
            if (f.pole_distance <= kPoleGuard) resonant[r] = f.nearest_order;
        }
    }
    return detail::anchor_rows(t, mode.omega, mode.displacements, mode.displacement_rate, resonant);
}

inline std::vector<ModeResult> extract_modes(const Truss& t, double omega_star, bool reduce_anchors,
                                             double pole_guard = kPoleGuard) {
    LaplacianOperator op(t, DofLayout(t, reduce_anchors, true));
    const Matrix d = op.assemble(omega_star, pole_guard);
    if (d.rows() == 0) throw NotARoot("no free degrees of freedom");
    Eigen::JacobiSVD<Matrix> svd(d, Eigen::ComputeFullV);
    const auto& s = svd.singularValues();
    const double cut = kModeTol * s(0);
    std::vector<Eigen::Index> idx;
    for (Eigen::Index i = 0; i < s.size(); ++i)
        if (s(i) <= cut) idx.push_back(i);
    if (idx.empty())
        throw NotARoot("omega = " + std::to_string(omega_star) + " is not a natural frequency (sigma_min/sigma_max = " +
                       std::to_string(s(s.size() - 1) / s(0)) + ")");
    std::vector<ModeResult> out;
    for (auto i : idx) {
        Vector x = svd.matrixV().col(i);
        detail::normalize_mode(op.layout(), x);
        ModeResult m;
        m.omega = omega_star;
        m.kind = ModeKind::regular;
        m.multiplicity = int(idx.size());
        m.displacements = detail::to_joint_vectors(t, op.layout(), x);
        m.anchor_forces = anchor_forces(t, m);
        out.push_back(std::move(m));
    }
    return out;
}

struct ResonantConstraintSystem {
    Matrix constraint_matrix;             // one row per resonant rod
    Matrix nonresonant_force_operator;    // free displacements -> joint forces
    Matrix limit_force_operator;          // displacement rates -> joint forces
    Matrix end_pattern;                   // columns h_r: range of the limit forces
    DofLayout layout;
};

inline ResonantConstraintSystem resonant_system(const Truss& t, double omega, const std::vector<std::size_t>& rods,
                                                const std::vector<long>& orders, bool reduce_anchors) {
    if (rods.size() != orders.size()) throw InputError("resonant rods and orders differ in length");
    ResonantConstraintSystem sys;
    sys.layout = DofLayout(t, reduce_anchors, true);
    const auto stencils = make_stencils(t, sys.layout);
    const auto n = sys.layout.size();
    std::map<std::size_t, long> res;
    for (std::size_t i = 0; i < rods.size(); ++i) res[rods[i]] = orders[i];

    sys.nonresonant_force_operator = Matrix::Zero(n, n);
    sys.limit_force_operator = Matrix::Zero(n, n);
    sys.end_pattern = Matrix::Zero(n, Eigen::Index(rods.size()));
    sys.constraint_matrix = Matrix::Zero(Eigen::Index(rods.size()), n);
    for (const auto& s : stencils) {
        if (!s.active()) continue;
        const auto& p = t.properties(s.rod);
        auto it = res.find(s.rod);
        if (it == res.end()) {
            const double x = omega * p.transit_time;
            const double scale = p.line_impedance * omega / std::sin(x);
            add_rod(sys.nonresonant_force_operator, s, scale * std::cos(x), -scale);
            continue;
        }
        const double sign = (it->second % 2 == 0) ? 1.0 : -1.0;
        const auto col = Eigen::Index(std::distance(res.begin(), it));
        Vector h = Vector::Zero(n);
        if (s.a >= 0) h.segment(s.a, s.pa.size()) = s.pa;
        if (s.b >= 0) h.segment(s.b, s.pb.size()) = -sign * s.pb;
        sys.end_pattern.col(col) = h;
        // (-1)^n e_mn.w_m + e_nm.w_n
        sys.constraint_matrix.row(col) = sign * h.transpose();
        sys.limit_force_operator.noalias() += (p.line_impedance * omega / p.transit_time) * h * h.transpose();
    }
    return sys;
}

inline std::vector<ModeResult> resonant_mode_check(const Truss& t, double omega_pole,
                                                   const std::vector<std::size_t>& rods,
                                                   const std::vector<long>& orders, bool reduce_anchors) {
    auto sys = resonant_system(t, omega_pole, rods, orders, reduce_anchors);
    const auto n = sys.layout.size();
    std::vector<ModeResult> out;
    if (n == 0) return out;

    const Matrix& c = sys.constraint_matrix;
    const double cscale = c.size() ? std::max(1.0, max_abs(c)) : 1.0;
    const Matrix z = null_space(c, 1e-10, cscale);
    if (z.cols() == 0) return out;

    // forces left after the resonant rods absorb everything they can
    const Matrix span = column_span(sys.end_pattern, 1e-10);
    const Matrix& nres = sys.nonresonant_force_operator;
    Matrix a = nres * z;
    a -= span * (span.transpose() * a);
    const double nscale = std::max(max_abs(nres), 1e-300);
    const Matrix y = null_space(a, kFeasTol, nscale);
    if (y.cols() == 0) return out;
    const Matrix modes = z * y;

    Eigen::CompleteOrthogonalDecomposition<Matrix> lsq(sys.limit_force_operator);
    std::map<std::size_t, long> res;
    for (std::size_t i = 0; i < rods.size(); ++i) res[rods[i]] = orders[i];

    std::vector<ModeResult> kept;
    for (Eigen::Index k = 0; k < modes.cols(); ++k) {
        Vector x = modes.col(k);
        detail::normalize_mode(sys.layout, x);
        const Vector rhs = -nres * x;
        Vector dx = lsq.solve(rhs);
        const double rn = rhs.norm();
        if (rn > 1e-14 * nscale && (sys.limit_force_operator * dx - rhs).norm() > kFeasTol * rn) continue;
        if (rn <= 1e-14 * nscale) dx.setZero();
        ModeResult m;
        m.omega = omega_pole;
        m.kind = ModeKind::resonant;
        m.resonant_order = orders.empty() ? std::nullopt : std::optional<long>(orders.front());
        m.displacements = detail::to_joint_vectors(t, sys.layout, x);
        m.displacement_rate = detail::to_joint_vectors(t, sys.layout, dx);
        m.anchor_forces = detail::anchor_rows(t, omega_pole, m.displacements, m.displacement_rate, res);
        kept.push_back(std::move(m));
    }
    for (auto& m : kept) m.multiplicity = int(kept.size());
    return kept;
}

inline std::vector<ModeResult> resonant_mode_check(const Truss& t, const Pole& pole, bool reduce_anchors) {
    return resonant_mode_check(t, pole.omega, pole.rods, pole.orders, reduce_anchors);
}

inline std::vector<ModeResult> find_natural_frequencies(const Truss& t, const FrequencyWindow& window,
                                                        bool reduce_anchors, SweepDiagnostics* diag = nullptr) {
    window.validate();
    LaplacianOperator op(t, DofLayout(t, reduce_anchors, true));
    if (diag) {
        diag->mechanism_joints = op.layout().mechanism_joints();
        if (!op.layout().plain())
            diag->notes.push_back("mechanism: " + std::to_string(op.layout().mechanism_joints().size()) +
                                  " joint(s) restricted to the span of their rods");
    }
    std::vector<ModeResult> out;
    if (op.layout().size() == 0) return out;

    std::vector<char> active(t.rod_count(), 0);
    double tau_min = std::numeric_limits<double>::infinity();
    for (const auto& s : op.stencils()) {
        if (!s.active()) continue;
        active[s.rod] = 1;
        tau_min = std::min(tau_min, t.properties(s.rod).transit_time);
    }
    const auto poles = pole_set(t, window, &active);

    // pole-free intervals
    std::vector<std::pair<double, double>> gaps;
    for (const auto& p : poles) {
        double r = 0;
        for (auto rod : p.rods) r = std::max(r, 2.0 * window.pole_guard / t.properties(rod).transit_time);
        if (!gaps.empty() && p.omega - r <= gaps.back().second) {
            gaps.back().second = std::max(gaps.back().second, p.omega + r);
        } else {
            gaps.emplace_back(p.omega - r, p.omega + r);
        }
    }
    std::vector<std::pair<double, double>> spans;
    double lo = window.omega_min;
    for (const auto& [a, b] : gaps) {
        if (a > lo) spans.emplace_back(lo, std::min(a, window.omega_max));
        lo = std::max(lo, b);
    }
    if (lo < window.omega_max) spans.emplace_back(lo, window.omega_max);

    const double density = double(window.points_for(tau_min)) / (window.omega_max - window.omega_min);
    const double tol = window.tolerance();
    auto count = [&](double w) { return symmetric_inertia(op.assemble(w, 0.0)).negative; };
    std::vector<Root> roots;
    for (const auto& [a, b] : spans) {
        const auto pts = std::max<std::size_t>(2, std::size_t(std::ceil((b - a) * density)) + 1);
        auto r = bracket_roots(count, a, b, pts, tol, window.threads, diag);
        roots.insert(roots.end(), r.begin(), r.end());
    }
    for (const auto& r : roots) {
        ModeResult m;
        m.omega = r.omega;
        m.multiplicity = r.multiplicity;
        out.push_back(std::move(m));
    }
    for (const auto& p : poles) {
        auto modes = resonant_mode_check(t, p, reduce_anchors);
        if (modes.empty()) continue;
        ModeResult m;
        m.omega = p.omega;
        m.kind = ModeKind::resonant;
        m.multiplicity = int(modes.size());
        m.resonant_order = p.orders.front();
        out.push_back(std::move(m));
    }
    std::sort(out.begin(), out.end(), [](const ModeResult& x, const ModeResult& y) { return x.omega < y.omega; });
    std::vector<ModeResult> dedup;
    for (auto& m : out) {
        if (!dedup.empty() && m.omega - dedup.back().omega <= tol) {
            dedup.back().multiplicity += m.multiplicity;
            if (m.kind == ModeKind::resonant) dedup.back().kind = ModeKind::resonant;
            continue;
        }
        dedup.push_back(std::move(m));
    }
    return dedup;
}

// Frequencies repeated by multiplicity, ascending.
inline std::vector<double> expand_multiplicity(const std::vector<ModeResult>& modes) {
    std::vector<double> w;
    for (const auto& m : modes)
        for (int k = 0; k < m.multiplicity; ++k) w.push_back(m.omega);
    return w;
}

} // namespace trussnet
