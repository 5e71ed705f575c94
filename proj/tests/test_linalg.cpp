// SPDX-License-Identifier: Apache-2.0
#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "lagflow/core.hpp"
#include "lagflow/linalg.hpp"

using namespace lagflow;

TEST_CASE("well-conditioned overdetermined system is solved to machine precision") {
    SplitMix64 rng(7);
    Eigen::MatrixXd a(40, 8);
    for (int i = 0; i < a.rows(); ++i)
        for (int j = 0; j < a.cols(); ++j) a(i, j) = rng.uniform(-1.0, 1.0);
    Eigen::VectorXd x_true(8);
    for (int j = 0; j < 8; ++j) x_true(j) = rng.uniform(-2.0, 2.0);
    const Eigen::VectorXd b = a * x_true;

    const auto sol = solve_least_squares(a, b);
    CHECK((sol.x - x_true).norm() < 1e-10);
    CHECK(sol.residual_norm < 1e-10);
    CHECK(sol.rank == 8);
}

TEST_CASE("residual of an inconsistent system matches the direct computation") {
    SplitMix64 rng(13);
    Eigen::MatrixXd a(30, 5);
    Eigen::VectorXd b(30);
    for (int i = 0; i < 30; ++i) {
        for (int j = 0; j < 5; ++j) a(i, j) = rng.uniform(-1.0, 1.0);
        b(i) = rng.uniform(-1.0, 1.0);
    }
    const auto sol = solve_least_squares(a, b);
    CHECK(sol.residual_norm == doctest::Approx((a * sol.x - b).norm()).epsilon(1e-10));
    // stationarity: A^T r = 0
    CHECK((a.transpose() * (a * sol.x - b)).norm() < 1e-10);
}

TEST_CASE("rank-deficient columns are truncated and the min-norm solution returned") {
    Eigen::MatrixXd a(12, 3);
    SplitMix64 rng(23);
    for (int i = 0; i < 12; ++i) {
        a(i, 0) = rng.uniform(-1.0, 1.0);
        a(i, 1) = rng.uniform(-1.0, 1.0);
        a(i, 2) = a(i, 0) + a(i, 1);  // exactly dependent
    }
    Eigen::VectorXd b = a.col(0) * 2.0 + a.col(1) * 1.0;
    const auto sol = solve_least_squares(a, b);
    CHECK(sol.rank == 2);
    CHECK(sol.residual_norm < 1e-10);
    // minimum-norm solution among all exact solutions
    const Eigen::VectorXd direct =
        a.bdcSvd(Eigen::ComputeThinU | Eigen::ComputeThinV).solve(b);
    CHECK((a * sol.x - b).norm() < 1e-10);
    CHECK(sol.x.norm() <= direct.norm() + 1e-10);
}

TEST_CASE("condition limit raises a conditioning error") {
    Eigen::MatrixXd a(10, 2);
    for (int i = 0; i < 10; ++i) {
        a(i, 0) = 1.0 + 1e-13 * i;
        a(i, 1) = 1.0;
    }
    CHECK_THROWS_AS(LeastSquaresSolver(a, 1e-12, 1e6), ConditioningError);
}

TEST_CASE("factor once, solve many right-hand sides") {
    SplitMix64 rng(99);
    Eigen::MatrixXd a(25, 6);
    for (int i = 0; i < 25; ++i)
        for (int j = 0; j < 6; ++j) a(i, j) = rng.uniform(-1.0, 1.0);
    LeastSquaresSolver solver(a);
    for (int k = 0; k < 3; ++k) {
        Eigen::VectorXd x(6);
        for (int j = 0; j < 6; ++j) x(j) = rng.uniform(-1.0, 1.0);
        const auto sol = solver.solve(a * x);
        CHECK((sol.x - x).norm() < 1e-10);
    }
}
