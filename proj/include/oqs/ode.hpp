// ode.hpp — Adaptive Dormand-Prince 5(4) integrator with dense output.
// State is any dense Eigen array of complex doubles (vector or matrix).

#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "oqs/errors.hpp"

namespace oqs {

struct OdeOptions {
    double rtol = 1e-9;
    double atol = 1e-12;
    double h_max = 0.0; // 0 = unlimited
    std::int64_t max_steps = 4000000;
};

namespace detail {

// Dormand-Prince coefficients.
inline constexpr double kC2 = 1.0 / 5.0, kC3 = 3.0 / 10.0, kC4 = 4.0 / 5.0,
                        kC5 = 8.0 / 9.0;
inline constexpr double kA21 = 1.0 / 5.0;
inline constexpr double kA31 = 3.0 / 40.0, kA32 = 9.0 / 40.0;
inline constexpr double kA41 = 44.0 / 45.0, kA42 = -56.0 / 15.0, kA43 = 32.0 / 9.0;
inline constexpr double kA51 = 19372.0 / 6561.0, kA52 = -25360.0 / 2187.0,
                        kA53 = 64448.0 / 6561.0, kA54 = -212.0 / 729.0;
inline constexpr double kA61 = 9017.0 / 3168.0, kA62 = -355.0 / 33.0,
                        kA63 = 46732.0 / 5247.0, kA64 = 49.0 / 176.0,
                        kA65 = -5103.0 / 18656.0;
inline constexpr double kA71 = 35.0 / 384.0, kA73 = 500.0 / 1113.0, kA74 = 125.0 / 192.0,
                        kA75 = -2187.0 / 6784.0, kA76 = 11.0 / 84.0;
inline constexpr double kE1 = 71.0 / 57600.0, kE3 = -71.0 / 16695.0, kE4 = 71.0 / 1920.0,
                        kE5 = -17253.0 / 339200.0, kE6 = 22.0 / 525.0, kE7 = -1.0 / 40.0;
inline constexpr double kD1 = -12715105075.0 / 11282082432.0,
                        kD3 = 87487479700.0 / 32700410799.0,
                        kD4 = -10690763975.0 / 1880347072.0,
                        kD5 = 701980252875.0 / 199316789632.0,
                        kD6 = -1453857185.0 / 822651844.0,
                        kD7 = 69997945.0 / 29380423.0;

template <class State>
double scaled_error_norm(const State& err, const State& y0, const State& y1,
                         double atol, double rtol) {
    const auto* e = err.data();
    const auto* a = y0.data();
    const auto* b = y1.data();
    const auto n = err.size();
    double acc = 0.0;
    for (decltype(err.size()) i = 0; i < n; ++i) {
        const double scale = atol + rtol * std::max(std::abs(a[i]), std::abs(b[i]));
        const double q = std::abs(e[i]) / scale;
        acc += q * q;
    }
    return std::sqrt(acc / double(n));
}

} // namespace detail

// Quartic interpolant over one accepted step, valid for t in [t0, t0+h].
template <class State>
struct DenseStep {
    double t0 = 0.0;
    double h = 0.0;
    State r1, r2, r3, r4, r5;

    State eval(double t) const {
        const double theta = (t - t0) / h;
        const double om = 1.0 - theta;
        return r1 + theta * (r2 + om * (r3 + theta * (r4 + om * r5)));
    }
};

// One-step-at-a-time driver. Callers pull accepted steps and read the dense
// interpolant, which keeps event location and grid sampling outside the core.
template <class State, class Rhs>
class Dopri5 {
public:
    Dopri5(Rhs rhs, double t0, State y0, OdeOptions opts = {})
        : rhs_(std::move(rhs)), opts_(opts), t_(t0), y_(std::move(y0)) {
        k1_ = k2_ = k3_ = k4_ = k5_ = k6_ = k7_ = ytmp_ = y_;
        rhs_(t_, y_, k1_);
        dense_.r1 = dense_.r2 = dense_.r3 = dense_.r4 = dense_.r5 = y_;
        h_ = 0.0;
    }

    double t() const { return t_; }
    const State& y() const { return y_; }
    const DenseStep<State>& dense() const { return dense_; }

    // Take one accepted step, not crossing t_limit. Returns false when already there.
    bool advance(double t_limit) {
        if (t_ >= t_limit) return false;
        if (h_ == 0.0) h_ = initial_step(t_limit);
        bool rejected = false;
        for (;;) {
            if (++steps_ > opts_.max_steps)
                throw NumericalError("dopri5: step limit " + std::to_string(opts_.max_steps) +
                                     " exceeded at t = " + std::to_string(t_));
            double h = std::min(h_, t_limit - t_);
            if (opts_.h_max > 0.0) h = std::min(h, opts_.h_max);
            if (!(h > 0.0) || t_ + h == t_)
                throw NumericalError("dopri5: step size underflow at t = " + std::to_string(t_));

            stages(h);
            // error estimate in k2_ scratch
            k2_ = h * (detail::kE1 * k1_ + detail::kE3 * k3_ + detail::kE4 * k4_ +
                       detail::kE5 * k5_ + detail::kE6 * k6_ + detail::kE7 * k7_);
            const double err =
                detail::scaled_error_norm(k2_, y_, ytmp_, opts_.atol, opts_.rtol);
            if (!std::isfinite(err))
                throw NumericalError("dopri5: non-finite state at t = " + std::to_string(t_));

            if (err <= 1.0) {
                build_dense(h);
                t_ += h;
                std::swap(y_, ytmp_);
                std::swap(k1_, k7_); // FSAL
                double fac = 0.9 * std::pow(std::max(err, 1e-16), -0.2);
                fac = std::min(rejected ? 1.0 : 5.0, std::max(0.2, fac));
                h_ = h * fac;
                return true;
            }
            rejected = true;
            const double fac = std::max(0.2, 0.9 * std::pow(err, -0.2));
            h_ = h * fac;
        }
    }

private:
    void stages(double h) {
        ytmp_ = y_ + h * (detail::kA21 * k1_);
        rhs_(t_ + detail::kC2 * h, ytmp_, k2_);
        ytmp_ = y_ + h * (detail::kA31 * k1_ + detail::kA32 * k2_);
        rhs_(t_ + detail::kC3 * h, ytmp_, k3_);
        ytmp_ = y_ + h * (detail::kA41 * k1_ + detail::kA42 * k2_ + detail::kA43 * k3_);
        rhs_(t_ + detail::kC4 * h, ytmp_, k4_);
        ytmp_ = y_ + h * (detail::kA51 * k1_ + detail::kA52 * k2_ + detail::kA53 * k3_ +
                          detail::kA54 * k4_);
        rhs_(t_ + detail::kC5 * h, ytmp_, k5_);
        ytmp_ = y_ + h * (detail::kA61 * k1_ + detail::kA62 * k2_ + detail::kA63 * k3_ +
                          detail::kA64 * k4_ + detail::kA65 * k5_);
        rhs_(t_ + h, ytmp_, k6_);
        // 5th order solution (b row equals a7*)
        ytmp_ = y_ + h * (detail::kA71 * k1_ + detail::kA73 * k3_ + detail::kA74 * k4_ +
                          detail::kA75 * k5_ + detail::kA76 * k6_);
        rhs_(t_ + h, ytmp_, k7_);
    }

    void build_dense(double h) {
        dense_.t0 = t_;
        dense_.h = h;
        dense_.r1 = y_;
        dense_.r2 = ytmp_ - y_;
        dense_.r3 = h * k1_ - dense_.r2;
        dense_.r4 = dense_.r2 - h * k7_ - dense_.r3;
        dense_.r5 = h * (detail::kD1 * k1_ + detail::kD3 * k3_ + detail::kD4 * k4_ +
                         detail::kD5 * k5_ + detail::kD6 * k6_ + detail::kD7 * k7_);
    }

    double initial_step(double t_limit) {
        const double span = t_limit - t_;
        const double d0 = detail::scaled_error_norm(y_, y_, y_, opts_.atol, opts_.rtol);
        const double d1 = detail::scaled_error_norm(k1_, y_, y_, opts_.atol, opts_.rtol);
        double h0 = (d0 < 1e-5 || d1 < 1e-5) ? 1e-6 : 0.01 * (d0 / d1);
        h0 = std::min(h0, span);
        ytmp_ = y_ + h0 * k1_;
        rhs_(t_ + h0, ytmp_, k2_);
        k3_ = k2_ - k1_;
        const double d2 = detail::scaled_error_norm(k3_, y_, y_, opts_.atol, opts_.rtol) / h0;
        double h1;
        if (std::max(d1, d2) <= 1e-15)
            h1 = std::max(1e-6, h0 * 1e-3);
        else
            h1 = std::pow(0.01 / std::max(d1, d2), 0.2);
        return std::min({100.0 * h0, h1, span});
    }

    Rhs rhs_;
    OdeOptions opts_;
    double t_;
    double h_;
    State y_;
    State k1_, k2_, k3_, k4_, k5_, k6_, k7_, ytmp_;
    DenseStep<State> dense_;
    std::int64_t steps_ = 0;
};

// Integrate and report the solution on an ascending time grid; the first grid
// point is the initial time and maps to y0 itself.
template <class State, class Rhs>
std::vector<State> integrate_at(Rhs&& rhs, State y0, const std::vector<double>& t_grid,
                                const OdeOptions& opts = {}) {
    if (t_grid.empty()) return {};
    for (std::size_t i = 1; i < t_grid.size(); ++i)
        if (!(t_grid[i] > t_grid[i - 1]))
            throw ValidationError("integrate_at: time grid must be strictly ascending");

    std::vector<State> out;
    out.reserve(t_grid.size());
    out.push_back(y0);
    if (t_grid.size() == 1) return out;

    Dopri5<State, std::decay_t<Rhs>> stepper(std::forward<Rhs>(rhs), t_grid.front(),
                                             std::move(y0), opts);
    std::size_t next = 1;
    const double t_end = t_grid.back();
    while (next < t_grid.size() && stepper.advance(t_end)) {
        while (next < t_grid.size() && t_grid[next] <= stepper.t()) {
            if (t_grid[next] >= stepper.t())
                out.push_back(stepper.y());
            else
                out.push_back(stepper.dense().eval(t_grid[next]));
            ++next;
        }
    }
    // grid points at t_end that the final step landed within one ulp of
    while (next < t_grid.size()) {
        out.push_back(stepper.y());
        ++next;
    }
    return out;
}

} // namespace oqs
