// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cmath>
#include <utility>
#include <vector>

#include "lagflow/biot_savart.hpp"
#include "lagflow/core.hpp"
#include "lagflow/errors.hpp"
#include "lagflow/field.hpp"
#include "lagflow/markers.hpp"
#include "lagflow/neumann.hpp"

namespace lagflow {

/// Injected cohomology basis for multiply connected domains: curl-free fields
/// tangent to the boundary, together with a volume quadrature rule for the
/// pairing integrals. Empty for every supported (simply connected) domain.
struct CohomologyBasis {
    std::vector<FieldHandle> fields;
    std::vector<Vec3> quadrature_points;
    std::vector<double> quadrature_weights;

    [[nodiscard]] std::size_t size() const { return fields.size(); }
    [[nodiscard]] bool empty() const { return fields.empty(); }

    [[nodiscard]] double pair(const FieldHandle& a, std::size_t j, double t) const {
        double acc = 0.0;
        for (std::size_t q = 0; q < quadrature_points.size(); ++q)
            acc += quadrature_weights[q] *
                   Vec3(a(t, quadrature_points[q])).dot(fields[j](t, quadrature_points[q]));
        return acc;
    }

    [[nodiscard]] Eigen::MatrixXd gram(double t = 0.0) const {
        const Eigen::Index g = Eigen::Index(fields.size());
        Eigen::MatrixXd m(g, g);
        for (Eigen::Index i = 0; i < g; ++i)
            for (Eigen::Index j = 0; j < g; ++j) m(i, j) = pair(fields[i], j, t);
        return m;
    }
};

/// Divergence-free velocity with prescribed curl and normal trace:
/// v = BiotSavart[omega] + grad(chi), chi solving the interior Neumann problem
///   d(chi)/dn = normal_data - BiotSavart[omega] . n   on the boundary.
/// div v = 0 exactly (regularized kernel plus a harmonic gradient); curl v =
/// omega up to the particle discretization.
struct ReconstructedField {
    VortexParticleField vortex;
    PointSourcePotential chi;
    NeumannReport neumann_report;
    double data_flux_defect = 0.0;  // |sum w (normal_data - BS.n)| / scale

    Vec3 operator()(double t, const Vec3& x) const {
        return vortex.empty() ? Vec3(chi.gradient(x)) : Vec3(vortex(t, x) + chi.gradient(x));
    }
    [[nodiscard]] Mat3 gradient(double t, const Vec3& x) const {
        return vortex.empty() ? Mat3(chi.hessian(x)) : Mat3(vortex.gradient(t, x) + chi.hessian(x));
    }
};

struct ReconstructOptions {
    double core_radius = 0.0;         // 0: 2 x mean marker spacing
    double compatibility_tol = 5e-2;  // on the weighted mean of the normal data
    double compatibility_floor = 1e-12;  // absolute slack for near-zero data
};

inline ReconstructedField div_curl_reconstruct(const MarkerCloud& cloud,
                                               const NeumannSolver& boundary_solver,
                                               const std::vector<double>& normal_data,
                                               const CohomologyBasis& basis = {},
                                               ReconstructOptions opts = {},
                                               double time = 0.0) {
    const BoundarySampleSet& bd = boundary_solver.samples();
    if (normal_data.size() != bd.size())
        throw ParameterError("div_curl_reconstruct: normal data size mismatch");
    if (!basis.empty() && basis.quadrature_points.empty())
        throw ParameterError("div_curl_reconstruct: cohomology basis lacks quadrature");

    ReconstructedField out;
    if (!cloud.empty()) {
        const double core = opts.core_radius > 0.0 ? opts.core_radius : default_core_radius(cloud);
        out.vortex = VortexParticleField(cloud, core);
    }

    // Flux compatibility of the full Neumann data.
    std::vector<double> data(bd.size());
    double mean = 0.0, l2 = 0.0;
    for (std::size_t i = 0; i < bd.size(); ++i) {
        const double bs = out.vortex.empty() ? 0.0 : Vec3(out.vortex(time, bd.points[i])).dot(bd.normals[i]);
        data[i] = normal_data[i] - bs;
        mean += bd.weights[i] * data[i];
        l2 += bd.weights[i] * data[i] * data[i];
    }
    l2 = std::sqrt(l2);
    const double area = bd.total_weight();
    out.data_flux_defect = l2 > 0.0 ? std::abs(mean) / (l2 * std::sqrt(area)) : 0.0;
    if (std::abs(mean) > opts.compatibility_tol * l2 * std::sqrt(area) + opts.compatibility_floor)
        throw CompatibilityError("div_curl_reconstruct: normal data violates zero-flux compatibility");
    // project out the residual mean so the least-squares data is exactly compatible
    const double shift = mean / area;
    for (auto& d : data) d -= shift;

    auto [chi, rep] = boundary_solver.solve(data);
    out.chi = std::move(chi);
    out.neumann_report = rep;
    return out;
}

/// Cohomology coefficients lambda(t): solves the Gram system so that
///   int_Omega V . Q_j = int_Omega u0 . Q_j - int_0^t int_Omega (u x omega) . Q_j
/// with the time integral accumulated by the trapezoid rule over samples of the
/// integrand. Returns an empty list for an empty basis.
class LambdaTracker {
  public:
    LambdaTracker() = default;
    explicit LambdaTracker(const CohomologyBasis* basis) : basis_(basis) {}

    /// Integrand I_j(t) = int (u x omega) . Q_j dx evaluated with marker quadrature.
    template <class U>
    std::vector<double> integrand(const U& u, const MarkerCloud& cloud, double t) const {
        if (!basis_ || basis_->empty()) return {};
        std::vector<double> val(basis_->size(), 0.0);
        for (std::size_t m = 0; m < cloud.size(); ++m) {
            const Vec3 x = cloud.position[m];
            const Vec3 uxw = Vec3(u(t, x)).cross(cloud.omega[m]);
            const double vol = cloud.cell_volume * cloud.jacobian[m];
            for (std::size_t j = 0; j < basis_->size(); ++j)
                val[j] += vol * uxw.dot(basis_->fields[j](t, x));
        }
        return val;
    }

    /// Accumulate one time sample (trapezoid in t).
    void push(double t, std::vector<double> integrand_values) {
        if (!basis_ || basis_->empty()) return;
        if (!history_t_.empty()) {
            const double dt = t - history_t_.back();
            for (std::size_t j = 0; j < accumulated_.size(); ++j)
                accumulated_[j] += 0.5 * dt * (history_i_.back()[j] + integrand_values[j]);
        } else {
            accumulated_.assign(basis_->size(), 0.0);
        }
        history_t_.push_back(t);
        history_i_.push_back(std::move(integrand_values));
    }

    /// lambda(t) given the reconstructed v at the current time and the u0 pairing.
    template <class V>
    std::vector<double> solve(const V& v, const std::vector<double>& u0_pairings, double t) const {
        if (!basis_ || basis_->empty()) return {};
        const Eigen::MatrixXd gram = basis_->gram(t);
        Eigen::FullPivLU<Eigen::MatrixXd> lu(gram);
        if (!lu.isInvertible())
            throw ParameterError("lambda_update: Gram matrix of the injected basis is singular");
        Eigen::VectorXd rhs(Eigen::Index(basis_->size()));
        FieldHandle vh = FieldHandle([&v](double tt, const Vec3& x) { return Vec3(v(tt, x)); });
        for (std::size_t j = 0; j < basis_->size(); ++j)
            rhs(Eigen::Index(j)) =
                u0_pairings[j] - accumulated_[j] - basis_->pair(vh, j, t);
        const Eigen::VectorXd lam = lu.solve(rhs);
        return {lam.data(), lam.data() + lam.size()};
    }

  private:
    const CohomologyBasis* basis_ = nullptr;
    std::vector<double> history_t_;
    std::vector<std::vector<double>> history_i_;
    std::vector<double> accumulated_;
};

/// One-shot lambda update (spec operation): empty basis gives the empty list.
template <class U, class V>
std::vector<double> lambda_update(const U& u, const MarkerCloud& cloud, const V& v,
                                  const std::vector<double>& u0_pairings,
                                  const CohomologyBasis& basis, double t) {
    if (basis.empty()) return {};
    LambdaTracker tracker(&basis);
    tracker.push(0.0, tracker.integrand(u, cloud, t));
    return tracker.solve(v, u0_pairings, t);
}

}  // namespace lagflow
