#pragma once

#include <Eigen/Dense>

#include <cmath>
#include <limits>
#include <utility>

namespace trussnet {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;

struct Inertia {
    int negative = 0;
    int zero = 0;
    int positive = 0;
    int sign = 1;              // sign of the determinant (0 when singular)
    double log_abs_det = 0.0;  // -inf when singular

    double determinant() const {
        if (sign == 0) return 0.0;
        return sign * std::exp(log_abs_det);
    }
};

// Symmetric indefinite LDL^T with Bunch-Kaufman pivoting (lower, unblocked).
// Only the lower triangle of `a` is read. Gives inertia and determinant.
inline Inertia symmetric_inertia(const Matrix& a_in) {
    Matrix a = a_in.selfadjointView<Eigen::Lower>();
    const Eigen::Index n = a.rows();
    const double alpha = (1.0 + std::sqrt(17.0)) / 8.0;
    Inertia out;

    auto pivot1 = [&](double d) {
        if (d > 0) {
            ++out.positive;
        } else if (d < 0) {
            ++out.negative;
            out.sign = -out.sign;
        } else {
            ++out.zero;
            out.sign = 0;
        }
        if (d != 0) out.log_abs_det += std::log(std::abs(d));
    };

    auto swap_sym = [&](Eigen::Index i, Eigen::Index j) {
        if (i == j) return;
        a.row(i).swap(a.row(j));
        a.col(i).swap(a.col(j));
    };

    Eigen::Index k = 0;
    while (k < n) {
        const double absakk = std::abs(a(k, k));
        Eigen::Index imax = k;
        double colmax = 0.0;
        if (k + 1 < n) {
            Eigen::Index r;
            colmax = a.col(k).tail(n - k - 1).cwiseAbs().maxCoeff(&r);
            imax = k + 1 + r;
        }

        int step = 1;
        Eigen::Index kp = k;
        if (std::max(absakk, colmax) == 0.0) {
            pivot1(0.0);
            ++k;
            continue;
        }
        if (absakk < alpha * colmax) {
            double rowmax = 0.0;
            for (Eigen::Index j = k; j < n; ++j)
                if (j != imax) rowmax = std::max(rowmax, std::abs(a(imax, j)));
            if (absakk >= alpha * colmax * (colmax / rowmax)) {
                kp = k;
            } else if (std::abs(a(imax, imax)) >= alpha * rowmax) {
                kp = imax;
            } else {
                kp = imax;
                step = 2;
            }
        }

        const Eigen::Index kk = k + step - 1;
        swap_sym(kk, kp);

        const Eigen::Index rest = n - k - step;
        if (step == 1) {
            const double d = a(k, k);
            pivot1(d);
            if (rest > 0) {
                Vector c = a.col(k).tail(rest);
                a.bottomRightCorner(rest, rest).noalias() -= (c / d) * c.transpose();
            }
        } else {
            const double p = a(k, k), q = a(k + 1, k), r = a(k + 1, k + 1);
            const double det = p * r - q * q;
            if (det < 0) {
                ++out.negative;
                ++out.positive;
                out.sign = -out.sign;
            } else if (det > 0) {
                if (p + r > 0) {
                    out.positive += 2;
                } else {
                    out.negative += 2;
                }
            } else {
                ++out.zero;
                out.sign = 0;
                if (p + r > 0) ++out.positive;
                else if (p + r < 0) ++out.negative;
                else ++out.zero;
            }
            if (det != 0) out.log_abs_det += std::log(std::abs(det));
            if (rest > 0) {
                Eigen::Matrix2d dinv;
                dinv << r, -q, -q, p;
                dinv /= det;
                Eigen::MatrixXd c = a.block(k + step, k, rest, 2);
                a.bottomRightCorner(rest, rest).noalias() -= c * dinv * c.transpose();
            }
        }
        k += step;
    }
    if (out.sign == 0) out.log_abs_det = -std::numeric_limits<double>::infinity();
    return out;
}

inline double max_abs(const Matrix& m) { return m.size() ? m.cwiseAbs().maxCoeff() : 0.0; }

// Orthonormal basis of the column space of `e` (rank decided relative to the largest singular value).
inline Matrix column_span(const Matrix& e, double rel_tol = 1e-9) {
    if (e.cols() == 0) return Matrix(e.rows(), 0);
    Eigen::JacobiSVD<Matrix> svd(e, Eigen::ComputeFullU);
    const auto& s = svd.singularValues();
    Eigen::Index rank = 0;
    for (Eigen::Index i = 0; i < s.size(); ++i)
        if (s(i) > rel_tol * s(0)) ++rank;
    return svd.matrixU().leftCols(rank);
}

// Orthonormal basis of the null space of `a`; singular values below rel_tol * scale count as zero.
inline Matrix null_space(const Matrix& a, double rel_tol, double scale) {
    const Eigen::Index n = a.cols();
    if (a.rows() == 0) return Matrix::Identity(n, n);
    Eigen::JacobiSVD<Matrix> svd(a, Eigen::ComputeFullV);
    const auto& s = svd.singularValues();
    Eigen::Index rank = 0;
    for (Eigen::Index i = 0; i < s.size(); ++i)
        if (s(i) > rel_tol * scale) ++rank;
    return svd.matrixV().rightCols(n - rank);
}

} // namespace trussnet
