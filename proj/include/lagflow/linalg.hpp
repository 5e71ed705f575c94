// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <Eigen/Dense>
#include <Eigen/QR>
#include <Eigen/SVD>

#include <cmath>
#include <utility>

#include "lagflow/errors.hpp"

namespace lagflow {

struct LeastSquaresSolution {
    Eigen::VectorXd x;
    double residual_norm = 0.0;  // ||A x - b||_2
    double rhs_norm = 0.0;       // ||b||_2
    double condition = 0.0;      // sigma_max / sigma_min of A
    int rank = 0;                // columns kept after truncation
};

/// Tall least-squares solver: Householder QR reduction followed by an SVD of
/// the triangular factor, truncated at a relative singular value. Point-source
/// systems are exponentially ill-conditioned; the truncation keeps the
/// minimum-norm solution stable. Factor once, solve for many right-hand sides.
class LeastSquaresSolver {
  public:
    explicit LeastSquaresSolver(Eigen::MatrixXd a, double rel_truncation = 1e-12,
                                double condition_limit = std::numeric_limits<double>::infinity())
        : rows_(a.rows()), cols_(a.cols()), truncation_(rel_truncation) {
        if (rows_ < cols_) throw ParameterError("LeastSquaresSolver: system must be tall");
        qr_.compute(a);
        const Eigen::MatrixXd r =
            qr_.matrixQR().topRows(cols_).template triangularView<Eigen::Upper>();
        svd_.compute(r, Eigen::ComputeThinU | Eigen::ComputeThinV);
        const auto& sv = svd_.singularValues();
        sigma_max_ = sv(0);
        const double sigma_min = sv(sv.size() - 1);
        condition_ = sigma_min > 0.0 ? sigma_max_ / sigma_min : std::numeric_limits<double>::infinity();
        if (condition_ > condition_limit)
            throw ConditioningError("least-squares system condition number too large", condition_);
        rank_ = 0;
        for (Eigen::Index i = 0; i < sv.size(); ++i)
            if (sv(i) > truncation_ * sigma_max_) ++rank_;
    }

    [[nodiscard]] double condition() const { return condition_; }
    [[nodiscard]] int rank() const { return rank_; }
    [[nodiscard]] Eigen::Index cols() const { return cols_; }
    [[nodiscard]] Eigen::Index rows() const { return rows_; }

    [[nodiscard]] LeastSquaresSolution solve(const Eigen::VectorXd& b) const {
        if (b.size() != rows_) throw ParameterError("LeastSquaresSolver: rhs size mismatch");
        Eigen::VectorXd qtb = b;
        qtb.applyOnTheLeft(qr_.householderQ().adjoint());
        const Eigen::VectorXd c = qtb.head(cols_);
        const double tail2 = qtb.tail(rows_ - cols_).squaredNorm();

        const Eigen::VectorXd uc = svd_.matrixU().adjoint() * c;
        Eigen::VectorXd scaled = Eigen::VectorXd::Zero(cols_);
        double dropped2 = 0.0;
        for (Eigen::Index i = 0; i < cols_; ++i) {
            const double s = svd_.singularValues()(i);
            if (s > truncation_ * sigma_max_)
                scaled(i) = uc(i) / s;
            else
                dropped2 += uc(i) * uc(i);
        }
        LeastSquaresSolution sol;
        sol.x = svd_.matrixV() * scaled;
        sol.residual_norm = std::sqrt(tail2 + dropped2);
        sol.rhs_norm = b.norm();
        sol.condition = condition_;
        sol.rank = rank_;
        return sol;
    }

  private:
    Eigen::Index rows_, cols_;
    double truncation_;
    double sigma_max_ = 0.0;
    double condition_ = 0.0;
    int rank_ = 0;
    Eigen::HouseholderQR<Eigen::MatrixXd> qr_;
    Eigen::BDCSVD<Eigen::MatrixXd> svd_;
};

inline LeastSquaresSolution solve_least_squares(Eigen::MatrixXd a, const Eigen::VectorXd& b,
                                                double rel_truncation = 1e-12,
                                                double condition_limit = std::numeric_limits<double>::infinity()) {
    return LeastSquaresSolver(std::move(a), rel_truncation, condition_limit).solve(b);
}

}  // namespace lagflow
