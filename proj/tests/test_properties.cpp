#include <gtest/gtest.h>

#include "support.hpp"
#include "trussnet/fem.hpp"
#include "trussnet/scattering.hpp"

#include <random>

using namespace trussnet;

TEST(Property, TransmissionIsAnInvolution) {
    std::mt19937 rng(11);
    for (int trial = 0; trial < 100; ++trial) {
        const int dim = 2 + trial % 2;
        const int degree = dim + trial % 4;
        const auto t = test::random_star(rng, dim, degree);
        const auto tm = transmission_matrix(t, "0");
        const Matrix id = Matrix::Identity(degree, degree);
        EXPECT_LE(max_abs(tm.entries * tm.entries - id), 1e-12) << "trial " << trial;
        const Matrix p = (id + tm.entries) / 2;
        EXPECT_LE(max_abs(p * p - p), 1e-12) << "trial " << trial;
    }
}

TEST(Property, LaplacianIsSymmetric) {
    std::mt19937 rng(5);
    std::uniform_real_distribution<double> u(0.05, 3.0);
    int checked = 0;
    for (int trial = 0; checked < 100; ++trial) {
        const auto t = test::random_truss(rng, 2 + trial % 2, 4 + trial % 6, 3 + trial % 5);
        const double w = u(rng) / t.min_transit_time();
        Matrix d;
        try {
            d = assemble_laplacian(t, w, false).entries;
        } catch (const PoleProximity&) {
            continue;
        }
        EXPECT_LE(max_abs(d - d.transpose()), 1e-10 * max_abs(d));
        ++checked;
    }
}

TEST(Property, TaylorRemainderIsFourthOrder) {
    std::mt19937 rng(9);
    for (int trial = 0; trial < 10; ++trial) {
        const auto t = trial == 0 ? test::square() : test::random_truss(rng, 2, 6, 4);
        const Matrix k = assemble_stiffness(t, false).entries;
        const Matrix m = assemble_mass(t, MassKind::consistent, false).entries;
        auto rem = [&](double w) { return max_abs(assemble_laplacian(t, w, false).entries - k + w * w * m); };
        for (double x : {0.02, 0.01}) {
            const double w = x / t.min_transit_time();
            const double ratio = rem(w) / rem(w / 2);
            EXPECT_GE(ratio, 8.0);
            EXPECT_LE(ratio, 32.0);
        }
    }
}

TEST(Property, LumpedTraceIsDimensionTimesMass) {
    std::mt19937 rng(2);
    for (int trial = 0; trial < 20; ++trial) {
        const auto t = test::random_truss(rng, 2 + trial % 2, 5, 4);
        const double tr = assemble_mass(t, MassKind::lumped, false).entries.trace();
        EXPECT_NEAR(tr, t.dimension() * t.total_mass(), 1e-12 * tr);
    }
}

TEST(Property, ConsistentMassFromSecondDifference) {
    std::mt19937 rng(4);
    for (int trial = 0; trial < 5; ++trial) {
        const auto t = test::random_truss(rng, 2, 5, 3);
        const Matrix m = assemble_mass(t, MassKind::consistent, false).entries;
        const double h = 1e-3 / t.min_transit_time();
        auto fd = [&](double s) {
            // D is even, so the central second difference about 0 is 2 (D(s) - D(0)) / s^2
            const Matrix dp = assemble_laplacian(t, s, false).entries;
            const Matrix d0 = assemble_stiffness(t, false).entries;
            return Matrix(-0.5 * 2.0 * (dp - d0) / (s * s));
        };
        const Matrix rich = (4 * fd(h / 2) - fd(h)) / 3;
        EXPECT_LE(max_abs(rich - m), 1e-6 * max_abs(m));
    }
}

TEST(Property, StiffnessRichardson) {
    std::mt19937 rng(8);
    for (int trial = 0; trial < 5; ++trial) {
        const auto t = test::random_truss(rng, 3, 6, 5);
        const Matrix k = assemble_stiffness(t, false).entries;
        const double h = 1e-3 / t.min_transit_time();
        const Matrix rich = (4 * assemble_laplacian(t, h / 2, false).entries - assemble_laplacian(t, h, false).entries) / 3;
        EXPECT_LE(max_abs(rich - k), 1e-9 * max_abs(k));
    }
}
