#pragma once

// Closed-form reference results for the two builtin structures. Used by tests and
// `verify` only; the sweeps never call into this header.

#include "trussnet/model.hpp"

#include <array>
#include <cmath>
#include <numbers>

namespace trussnet::validation {

// rod order: 12, 24, 34, 13, 23
struct SquareClosedForm {
    std::array<double, 5> lambdas{1, 1, 1, 1, 1};
    std::array<double, 5> taus{1, 1, 1, 1, std::numbers::sqrt2};

    static SquareClosedForm from_truss(const Truss& t) {
        SquareClosedForm cfg;
        const char* ids[5] = {"12", "24", "34", "13", "23"};
        for (int i = 0; i < 5; ++i) {
            const auto& p = t.properties(t.rod_index(ids[i]));
            cfg.lambdas[std::size_t(i)] = p.line_impedance;
            cfg.taus[std::size_t(i)] = p.transit_time;
        }
        return cfg;
    }
};

inline double closed_form_square_condition(const SquareClosedForm& cfg, double omega) {
    std::array<double, 5> eta;
    for (std::size_t i = 0; i < 5; ++i) {
        const double x = omega * cfg.taus[i];
        if (std::abs(std::sin(x)) < 1e-12) throw NumericalError("closed-form condition evaluated at a pole");
        eta[i] = std::cos(x) / std::sin(x) / cfg.lambdas[i];
    }
    const double l23 = cfg.lambdas[4];
    return 1.0 / (l23 * l23) - 0.5 * eta[4] * (eta[0] + eta[1] + eta[2] + eta[3]) -
           0.25 * (eta[0] + eta[1]) * (eta[2] + eta[3]);
}

inline double closed_form_square_det(const SquareClosedForm& cfg, double omega) {
    double prod = 1.0;
    for (double l : cfg.lambdas) prod *= l;
    return std::pow(omega, 8) * prod * prod * closed_form_square_condition(cfg, omega);
}

inline double bridge_polynomial(double c) {
    return 27.0 / 64.0 * (5 * c * c - 5 * c + 1) * (3 * c * c - c - 1) * (3 * c + 1) * (c + 1);
}

struct BridgeReferenceMode {
    double cos_omega_tau;
    double omega_tau;  // in (0, pi]
    Eigen::Vector2d u2, u3, u4;
    Eigen::Vector2d p1, p5;  // directions, scaled with the mode
    bool force_free;
};

// Reference modes of the bridge (unit tau, anchors at joints 1 and 5). Each column is
// normalized to unit norm with its first nonzero component positive; forces get the same factor.
inline std::vector<BridgeReferenceMode> bridge_reference_modes() {
    const double s3 = std::sqrt(3.0), s5 = std::sqrt(5.0), s13 = std::sqrt(13.0);
    std::vector<BridgeReferenceMode> rows;
    auto add = [&](double c, Eigen::Vector2d u2, Eigen::Vector2d u3, Eigen::Vector2d u4, Eigen::Vector2d p1,
                   Eigen::Vector2d p5, bool free) {
        Eigen::Matrix<double, 6, 1> u;
        u << u2, u3, u4;
        double f = 1.0 / u.norm();
        for (int i = 0; i < 6; ++i) {
            if (std::abs(u(i)) > 1e-12) {
                if (u(i) < 0) f = -f;
                break;
            }
        }
        const double wt = c <= -1.0 ? std::numbers::pi : std::acos(c);
        rows.push_back({c, wt, f * u2, f * u3, f * u4, f * p1, f * p5, free});
    };
    using V = Eigen::Vector2d;

    add((1 + s13) / 6, V(17.0 / 72 - 5.0 / 72 * s13, s3 / 4 * (31.0 / 54 - 7.0 / 54 * s13)),
        V(0, -s3 / 4 * (10.0 / 27 - 4.0 / 27 * s13)),
        V(-17.0 / 72 + 5.0 / 72 * s13, s3 / 4 * (31.0 / 54 - 7.0 / 54 * s13)),
        V(-1.0 / 6 + s13 / 24, -s3 / 4 * (2.0 / 3 - s13 / 6)), V(1.0 / 6 - s13 / 24, -s3 / 4 * (2.0 / 3 - s13 / 6)),
        false);
    add((5 + s5) / 10, V(-3.0 / 8 - s5 / 40, -s3 / 4 * (5.0 / 6 - 13.0 / 30 * s5)), V(3.0 / 10 - s5 / 5, 0),
        V(-3.0 / 8 - s5 / 40, s3 / 4 * (5.0 / 6 - 13.0 / 30 * s5)),
        V(-1.0 / 20 + s5 / 8, s3 / 4 * (1 - 3.0 / 10 * s5)), V(-1.0 / 20 + s5 / 8, -s3 / 4 * (1 - 3.0 / 10 * s5)),
        false);
    add(-1.0 / 3, V(1, -3 * s3), V(-6, 0), V(1, 3 * s3), V(12, 3 * s3), V(12, -3 * s3), false);
    add((1 - s13) / 6, V(17.0 / 72 + 5.0 / 72 * s13, s3 / 4 * (31.0 / 54 + 7.0 / 54 * s13)),
        V(0, -s3 / 4 * (10.0 / 27 + 4.0 / 27 * s13)),
        V(-17.0 / 72 - 5.0 / 72 * s13, s3 / 4 * (31.0 / 54 + 7.0 / 54 * s13)),
        V(-1.0 / 6 - s13 / 24, -s3 / 4 * (2.0 / 3 + s13 / 6)), V(1.0 / 6 + s13 / 24, -s3 / 4 * (2.0 / 3 + s13 / 6)),
        false);
    // u3x is the sqrt5 -> -sqrt5 conjugate of the (5 + sqrt5)/10 entry
    add((5 - s5) / 10, V(-3.0 / 8 + s5 / 40, -s3 / 4 * (5.0 / 6 + 13.0 / 30 * s5)), V(3.0 / 10 + s5 / 5, 0),
        V(-3.0 / 8 + s5 / 40, s3 / 4 * (5.0 / 6 + 13.0 / 30 * s5)),
        V(-1.0 / 20 - s5 / 8, s3 / 4 * (1 + 3.0 / 10 * s5)), V(-1.0 / 20 - s5 / 8, -s3 / 4 * (1 + 3.0 / 10 * s5)),
        false);
    add(-1.0, V(-3, s3), V(0, -2 * s3), V(3, s3), V(0, 0), V(0, 0), true);
    return rows;
}

} // namespace trussnet::validation
