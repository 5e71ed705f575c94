// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <algorithm>
#include <cmath>
#include <string>
#include <vector>

#include "lagflow/errors.hpp"

namespace lagflow {

/// C-infinity bump on (-1,1): exp(-1/(1-s^2)), zero outside.
inline double bump(double s) {
    const double w = 1.0 - s * s;
    return w > 0.0 ? std::exp(-1.0 / w) : 0.0;
}

inline double bump_derivative(double s) {
    const double w = 1.0 - s * s;
    if (w <= 0.0) return 0.0;
    return bump(s) * (-2.0 * s / (w * w));
}

/// integral of bump over (-1,1), evaluated once by composite Simpson.
inline double bump_integral() {
    static const double value = [] {
        const int n = 4000;  // even
        const double h = 2.0 / n;
        double acc = bump(-1.0) + bump(1.0);
        for (int i = 1; i < n; ++i) acc += bump(-1.0 + i * h) * (i % 2 ? 4.0 : 2.0);
        return acc * h / 3.0;
    }();
    return value;
}

/// C-infinity transition: 1 for s <= 0, 0 for s >= 1, strictly decreasing between.
inline double smooth_step_down(double s) {
    if (s <= 0.0) return 1.0;
    if (s >= 1.0) return 0.0;
    const double a = std::exp(-1.0 / s);
    const double b = std::exp(-1.0 / (1.0 - s));
    return b / (a + b);
}

inline double smooth_step_down_derivative(double s) {
    if (s <= 0.0 || s >= 1.0) return 0.0;
    const double a = std::exp(-1.0 / s);
    const double b = std::exp(-1.0 / (1.0 - s));
    const double sum = a + b;
    return -a * b * (1.0 / (s * s) + 1.0 / ((1.0 - s) * (1.0 - s))) / (sum * sum);
}

/// Speed profile on [0,1]: compactly supported in (0,1), integrates to 1.
struct SpeedProfile {
    double operator()(double t) const { return bump(2.0 * t - 1.0) / (0.5 * bump_integral()); }
    [[nodiscard]] double peak() const { return (*this)(0.5); }
};

/// Time cutoff mu: smooth, mu = 1 on [0, delta/4], supported in [0, delta].
struct TimeCutoff {
    double delta = 0.1;

    explicit TimeCutoff(double delta_ = 0.1) : delta(delta_) {
        if (delta <= 0.0 || delta >= 1.0) throw ParameterError("TimeCutoff: delta must be in (0,1)");
    }
    double operator()(double t) const {
        if (t < 0.0) return 0.0;
        return smooth_step_down((t - 0.25 * delta) / (0.75 * delta));
    }
};

/// Smooth partition of unity on [0,1] subordinate to intervals (t_i-d_i, t_i+d_i).
/// Each raw weight is bump((t-t_i)/d_i); weights are renormalized so they sum
/// to one exactly wherever at least one bump is active.
class TimePartition {
  public:
    TimePartition(std::vector<double> times, std::vector<double> half_widths)
        : times_(std::move(times)), half_widths_(std::move(half_widths)) {
        if (times_.empty() || times_.size() != half_widths_.size())
            throw ParameterError("TimePartition: times/half_widths size mismatch");
        for (double d : half_widths_)
            if (d <= 0.0) throw ParameterError("TimePartition: half-widths must be positive");
        // Coverage check: every t in [0,1] must lie strictly inside some interval.
        const int probes = 4096;
        for (int i = 0; i <= probes; ++i) {
            const double t = double(i) / probes;
            bool covered = false;
            for (std::size_t k = 0; k < times_.size(); ++k)
                if (t > times_[k] - half_widths_[k] && t < times_[k] + half_widths_[k]) {
                    covered = true;
                    break;
                }
            if (!covered)
                throw ParameterError("TimePartition: intervals leave t = " + std::to_string(t) +
                                     " uncovered");
        }
    }

    [[nodiscard]] std::size_t size() const { return times_.size(); }
    [[nodiscard]] const std::vector<double>& times() const { return times_; }
    [[nodiscard]] const std::vector<double>& half_widths() const { return half_widths_; }

    /// All weights at time t. Zero vector outside every support.
    [[nodiscard]] std::vector<double> weights(double t) const {
        std::vector<double> w(times_.size(), 0.0);
        double sum = 0.0;
        for (std::size_t k = 0; k < w.size(); ++k) {
            w[k] = bump((t - times_[k]) / half_widths_[k]);
            sum += w[k];
        }
        if (sum > 0.0)
            for (auto& v : w) v /= sum;
        return w;
    }

    [[nodiscard]] double weight(std::size_t i, double t) const { return weights(t)[i]; }

    /// d/dt of the normalized weights (quotient rule on the raw bumps).
    [[nodiscard]] std::vector<double> weight_derivatives(double t) const {
        const std::size_t n = times_.size();
        std::vector<double> raw(n), draw(n), out(n, 0.0);
        double sum = 0.0, dsum = 0.0;
        for (std::size_t k = 0; k < n; ++k) {
            const double s = (t - times_[k]) / half_widths_[k];
            raw[k] = bump(s);
            draw[k] = bump_derivative(s) / half_widths_[k];
            sum += raw[k];
            dsum += draw[k];
        }
        if (sum <= 0.0) return out;
        for (std::size_t k = 0; k < n; ++k)
            out[k] = (draw[k] * sum - raw[k] * dsum) / (sum * sum);
        return out;
    }

  private:
    std::vector<double> times_;
    std::vector<double> half_widths_;
};

inline TimePartition time_partition(std::vector<double> times, std::vector<double> half_widths) {
    return TimePartition(std::move(times), std::move(half_widths));
}

}  // namespace lagflow
