#pragma once

#include "trussnet/assembly.hpp"
#include "trussnet/sweep.hpp"

#include <complex>
#include <optional>

namespace trussnet {

using Complex = std::complex<double>;
using ComplexVector = Eigen::VectorXcd;
using ComplexMatrix = Eigen::MatrixXcd;

struct TransmissionMatrix {
    std::string joint;
    Matrix entries;
    std::vector<std::string> column_order;  // neighbour joint ids
    std::vector<std::size_t> rods;          // rod index per column
    Matrix directions;                      // e~ (span coordinates), one column per rod, pointing away from the joint
    Vector line_impedances;
    Matrix span;                            // global basis of e~ coordinates
    bool anchored = false;
};

// T = 2 e^T (e L e^T)^-1 e L - I. Anchored joints reflect as fixed ends (T = -I).
// With allow_degenerate the formula is applied within the span of the joint's rods.
inline TransmissionMatrix transmission_matrix(const Truss& t, std::size_t j, bool allow_degenerate = false) {
    const int dim = t.dimension();
    const auto& inc = t.incident(j);
    const auto deg = Eigen::Index(inc.size());
    TransmissionMatrix out;
    out.joint = t.joints()[j].id;
    out.anchored = t.joints()[j].anchored;
    out.rods = inc;
    Matrix e(dim, deg);
    out.line_impedances.resize(deg);
    for (Eigen::Index k = 0; k < deg; ++k) {
        const auto r = inc[std::size_t(k)];
        out.column_order.push_back(t.joints()[t.other_end(r, j)].id);
        const double s = t.ends(r)[0] == j ? 1.0 : -1.0;
        e.col(k) = s * t.properties(r).unit_vector;
        out.line_impedances(k) = t.properties(r).line_impedance;
    }
    Matrix span = column_span(e);
    if (span.cols() < dim) {
        if (!allow_degenerate) throw DegenerateJoint(out.joint);
    } else {
        span = Matrix::Identity(dim, dim);
    }
    out.span = span;
    out.directions = span.transpose() * e;
    if (out.anchored) {
        out.entries = -Matrix::Identity(deg, deg);
        return out;
    }
    const Matrix& ee = out.directions;
    const Matrix el = ee * out.line_impedances.asDiagonal();
    const Matrix g = el * ee.transpose();
    out.entries = 2.0 * ee.transpose() * g.ldlt().solve(el) - Matrix::Identity(deg, deg);
    return out;
}

inline TransmissionMatrix transmission_matrix(const Truss& t, std::string_view joint, bool allow_degenerate = false) {
    return transmission_matrix(t, t.joint_index(joint), allow_degenerate);
}

// Outgoing amplitudes F = T B + (1/(i omega)) e^T (e L e^T)^-1 P.
inline ComplexVector scatter(const TransmissionMatrix& tm, const ComplexVector& incoming,
                             std::optional<std::pair<double, ComplexVector>> force = std::nullopt) {
    if (incoming.size() != tm.entries.cols())
        throw DimensionMismatch("incoming amplitudes have " + std::to_string(incoming.size()) + " entries, joint " +
                                tm.joint + " has " + std::to_string(tm.entries.cols()) + " rods");
    ComplexVector out = tm.entries.cast<Complex>() * incoming;
    if (force && !tm.anchored) {
        const auto& [omega, p] = *force;
        if (p.size() != tm.span.rows()) throw DimensionMismatch("force has wrong dimension at joint " + tm.joint);
        const Matrix& ee = tm.directions;
        const Matrix g = ee * tm.line_impedances.asDiagonal() * ee.transpose();
        const ComplexVector pl = tm.span.transpose().cast<Complex>() * p;
        const ComplexVector y = g.cast<Complex>().ldlt().solve(pl);
        out += (ee.transpose().cast<Complex>() * y) / Complex(0.0, omega);
    }
    return out;
}

inline Vector scatter(const TransmissionMatrix& tm, const Vector& incoming) {
    if (incoming.size() != tm.entries.cols())
        throw DimensionMismatch("incoming amplitudes have wrong size at joint " + tm.joint);
    return tm.entries * incoming;
}

// Global amplitude-matching system. Unknowns are the incoming amplitudes B at every rod end
// (index 2r at joints[0], 2r+1 at joints[1]); the outgoing wave leaving one end is the
// phase-shifted incoming wave at the other, F_mn = -B_nm e^{i omega tau}.
class ReverberationOperator {
public:
    explicit ReverberationOperator(const Truss& t) : truss_(&t) {
        for (std::size_t j = 0; j < t.joint_count(); ++j) {
            if (t.incident(j).empty()) continue;
            tms_.push_back(transmission_matrix(t, j, true));
            ends_.push_back({});
            for (auto r : t.incident(j)) ends_.back().push_back(t.ends(r)[0] == j ? 0 : 1);
        }
    }

    Eigen::Index size() const { return Eigen::Index(2 * truss_->rod_count()); }

    ComplexMatrix assemble(double omega) const {
        ComplexMatrix a = ComplexMatrix::Zero(size(), size());
        Eigen::Index row = 0;
        for (std::size_t q = 0; q < tms_.size(); ++q) {
            const auto& tm = tms_[q];
            const auto deg = Eigen::Index(tm.rods.size());
            for (Eigen::Index k = 0; k < deg; ++k, ++row) {
                const auto r = tm.rods[std::size_t(k)];
                const auto far = Eigen::Index(2 * r + 1 - ends_[q][std::size_t(k)]);
                const double x = omega * truss_->properties(r).transit_time;
                a(row, far) -= Complex(std::cos(x), std::sin(x));
                for (Eigen::Index l = 0; l < deg; ++l) {
                    const auto rl = tm.rods[std::size_t(l)];
                    a(row, Eigen::Index(2 * rl + ends_[q][std::size_t(l)])) -= tm.entries(k, l);
                }
            }
        }
        return a;
    }

    double determinant_modulus(double omega) const { return std::abs(assemble(omega).partialPivLu().determinant()); }

    double singular_ratio(double omega) const {
        Eigen::JacobiSVD<ComplexMatrix> svd(assemble(omega));
        const auto& s = svd.singularValues();
        return s(s.size() - 1) / s(0);
    }

    int near_null_count(double omega, double rel) const {
        Eigen::JacobiSVD<ComplexMatrix> svd(assemble(omega));
        const auto& s = svd.singularValues();
        int n = 0;
        for (Eigen::Index i = 0; i < s.size(); ++i) n += s(i) <= rel * s(0) ? 1 : 0;
        return n;
    }

private:
    const Truss* truss_;
    std::vector<TransmissionMatrix> tms_;
    std::vector<std::vector<int>> ends_;
};

inline double reverberation_determinant(const Truss& t, double omega) {
    return ReverberationOperator(t).determinant_modulus(omega);
}

// real degrees of freedom of the reverberation system: forward and backward, complex, per rod
inline std::size_t reverberation_dof(const Truss& t) { return 4 * t.rod_count(); }
inline std::size_t laplacian_dof(const Truss& t) { return std::size_t(t.dimension()) * t.joint_count(); }

inline constexpr double kReverberationZeroTol = 1e-8;

// Zeros of |det| over the window: grid local minima refined by golden-section search on
// sigma_min / sigma_max, accepted when that ratio is below kReverberationZeroTol.
inline std::vector<Root> reverberation_frequencies(const Truss& t, const FrequencyWindow& window) {
    window.validate();
    ReverberationOperator op(t);
    const auto n = window.points_for(t.min_transit_time());
    std::vector<double> w(n), f(n);
    for (std::size_t i = 0; i < n; ++i)
        w[i] = window.omega_min + (window.omega_max - window.omega_min) * double(i) / double(n - 1);
    parallel_for(n, window.threads, [&](std::size_t i) { f[i] = op.determinant_modulus(w[i]); });

    const double tol = window.tolerance();
    const double phi = (std::sqrt(5.0) - 1.0) / 2.0;
    std::vector<Root> roots;
    for (std::size_t i = 1; i + 1 < n; ++i) {
        if (!(f[i] <= f[i - 1] && f[i] < f[i + 1])) continue;
        double a = w[i - 1], b = w[i + 1];
        double c = b - phi * (b - a), d = a + phi * (b - a);
        double fc = op.singular_ratio(c), fd = op.singular_ratio(d);
        while (b - a > tol) {
            if (fc < fd) {
                b = d;
                d = c;
                fd = fc;
                c = b - phi * (b - a);
                fc = op.singular_ratio(c);
            } else {
                a = c;
                c = d;
                fc = fd;
                d = a + phi * (b - a);
                fd = op.singular_ratio(d);
            }
        }
        const double x = 0.5 * (a + b);
        if (op.singular_ratio(x) > kReverberationZeroTol) continue;
        if (!roots.empty() && x - roots.back().omega <= 10 * tol) continue;
        roots.push_back({x, std::max(1, op.near_null_count(x, 1e-6))});
    }
    return roots;
}

} // namespace trussnet
