// hnm.hpp — Stochastic unraveling of the time-local master equation as a
// piecewise deterministic process for a pair theta = (phi, psi) in the doubled
// Hilbert space; the dyad average E[|phi><psi|] recovers the density matrix.

#pragma once

#include <cmath>
#include <cstdint>
#include <numeric>
#include <string>
#include <utility>
#include <vector>

#include "oqs/ensemble.hpp"
#include "oqs/mcwf.hpp"
#include "oqs/rng.hpp"
#include "oqs/tcl.hpp"
#include "oqs/trajectory_stats.hpp"

namespace oqs {

struct DoubledState {
    Vector phi;
    Vector psi;

    DoubledState(Vector phi_in, Vector psi_in) : phi(std::move(phi_in)), psi(std::move(psi_in)) {
        if (phi.size() != psi.size())
            throw DimensionError("DoubledState: component dimension mismatch");
        if (!(norm_squared() > 1e-12))
            throw ValidationError("DoubledState: combined norm too small");
    }

    double norm_squared() const { return phi.squaredNorm() + psi.squaredNorm(); }
    double norm() const { return std::sqrt(norm_squared()); }
    Index dim() const { return phi.size(); }
};

// Block-diagonal operator on the doubled space: (top phi, bottom psi).
struct BlockOperator {
    Matrix top;
    Matrix bottom;

    DoubledState apply(const DoubledState& theta) const {
        return DoubledState(top * theta.phi, bottom * theta.psi);
    }

    double applied_norm_squared(const DoubledState& theta) const {
        return (top * theta.phi).squaredNorm() + (bottom * theta.psi).squaredNorm();
    }
};

// F(t) = diag(A, B); J_i(t) = diag(C_i, D_i).
inline std::pair<BlockOperator, std::vector<BlockOperator>> block_operators(
    const TimeLocalModel& model, double t) {
    model.require_inside(t);
    Matrix scratch;
    BlockOperator f{model.a().eval(t, scratch), model.b().eval(t, scratch)};
    std::vector<BlockOperator> j_list;
    j_list.reserve(model.channels().size());
    for (const auto& ch : model.channels())
        j_list.push_back({ch.c.eval(t, scratch), ch.d.eval(t, scratch)});
    return {std::move(f), std::move(j_list)};
}

// lambda_i = ||J_i theta||^2 / ||theta||^2 = (||C phi||^2 + ||D psi||^2) / ||theta||^2
inline std::vector<double> doubled_jump_rates(const std::vector<BlockOperator>& j_list,
                                              const DoubledState& theta) {
    const double n2 = theta.norm_squared();
    std::vector<double> rates;
    rates.reserve(j_list.size());
    for (const auto& j : j_list) rates.push_back(j.applied_norm_squared(theta) / n2);
    return rates;
}

// theta -> (||theta|| / ||J theta||) J theta; the combined norm is preserved.
inline DoubledState apply_doubled_jump(const BlockOperator& j, const DoubledState& theta) {
    const double jn2 = j.applied_norm_squared(theta);
    if (jn2 <= 1e-24)
        throw Error("apply_doubled_jump: logic error, jump requested from a dark doubled state");
    const double scale = theta.norm() / std::sqrt(jn2);
    return DoubledState(scale * (j.top * theta.phi), scale * (j.bottom * theta.psi));
}

// Tangent vector in the doubled space; unlike DoubledState it may vanish.
struct DoubledVector {
    Vector phi;
    Vector psi;

    double norm() const { return std::sqrt(phi.squaredNorm() + psi.squaredNorm()); }
};

// d theta/dt = F(t) theta + 1/2 (sum_i lambda_i) theta; the rate term acts as a
// multiple of the identity on both components.
inline DoubledVector doubled_drift(const BlockOperator& f, const std::vector<BlockOperator>& j_list,
                                   const DoubledState& theta) {
    const auto rates = doubled_jump_rates(j_list, theta);
    const double s = 0.5 * std::accumulate(rates.begin(), rates.end(), 0.0);
    return {f.top * theta.phi + s * theta.phi, f.bottom * theta.psi + s * theta.psi};
}

struct DoubledTrajectoryRecord {
    std::vector<double> sample_times;
    std::vector<DoubledState> states;
    std::vector<JumpEvent> jump_log;
};

struct DoubledSamplingOptions {
    double max_lambda_dt = 1e-3; // Bernoulli bias cap: max_i lambda_i * dt <= this
    double max_dt = 1e-2;        // drift accuracy cap
};

namespace detail {

// Stepper on the stacked vector (phi; psi) with preallocated scratch space.
class DoubledStepper {
public:
    DoubledStepper(const TimeLocalModel& model, const DoubledSamplingOptions& opts)
        : model_(model), opts_(opts), d_(model.dim()) {
        const Index n = 2 * d_;
        k1_.resize(n);
        k2_.resize(n);
        k3_.resize(n);
        k4_.resize(n);
        tmp_.resize(n);
        cphi_.resize(d_);
        dpsi_.resize(d_);
    }

    // Total jump rate and per-channel rates at (t, theta).
    double rates(double t, const Vector& theta, std::vector<double>& out) {
        out.clear();
        const double n2 = theta.squaredNorm();
        double total = 0.0;
        for (const auto& ch : model_.channels()) {
            const Matrix& c = ch.c.eval(t, sc_);
            const Matrix& d = ch.d.eval(t, sd_);
            cphi_.noalias() = c * theta.head(d_);
            dpsi_.noalias() = d * theta.tail(d_);
            const double lam = (cphi_.squaredNorm() + dpsi_.squaredNorm()) / n2;
            out.push_back(lam);
            total += lam;
        }
        return total;
    }

    void drift(double t, const Vector& theta, Vector& out) {
        const Matrix& a = model_.a().eval(t, sa_);
        const Matrix& b = model_.b().eval(t, sb_);
        out.head(d_).noalias() = a * theta.head(d_);
        out.tail(d_).noalias() = b * theta.tail(d_);
        const double n2 = theta.squaredNorm();
        double ssum = 0.0;
        for (const auto& ch : model_.channels()) {
            const Matrix& c = ch.c.eval(t, sc_);
            const Matrix& d = ch.d.eval(t, sd_);
            cphi_.noalias() = c * theta.head(d_);
            dpsi_.noalias() = d * theta.tail(d_);
            ssum += cphi_.squaredNorm() + dpsi_.squaredNorm();
        }
        out += (0.5 * ssum / n2) * theta;
    }

    void rk4_step(double t, double h, Vector& theta) {
        drift(t, theta, k1_);
        tmp_ = theta + 0.5 * h * k1_;
        drift(t + 0.5 * h, tmp_, k2_);
        tmp_ = theta + 0.5 * h * k2_;
        drift(t + 0.5 * h, tmp_, k3_);
        tmp_ = theta + h * k3_;
        drift(t + h, tmp_, k4_);
        theta += (h / 6.0) * (k1_ + 2.0 * k2_ + 2.0 * k3_ + k4_);
    }

    // Jump channel `ch` at time t applied in place.
    void jump(double t, std::size_t ch_index, Vector& theta) {
        const auto& ch = model_.channels()[ch_index];
        const Matrix& c = ch.c.eval(t, sc_);
        const Matrix& d = ch.d.eval(t, sd_);
        cphi_.noalias() = c * theta.head(d_);
        dpsi_.noalias() = d * theta.tail(d_);
        const double jn2 = cphi_.squaredNorm() + dpsi_.squaredNorm();
        if (jn2 <= 1e-24)
            throw NumericalError("doubled trajectory: jump into a dark doubled state at t = " +
                                 std::to_string(t));
        const double scale = theta.norm() / std::sqrt(jn2);
        theta.head(d_) = scale * cphi_;
        theta.tail(d_) = scale * dpsi_;
    }

    double step_size(double remaining, double lam_max) const {
        double h = std::min(remaining, opts_.max_dt);
        if (lam_max > 0.0) h = std::min(h, opts_.max_lambda_dt / lam_max);
        return h;
    }

private:
    const TimeLocalModel& model_;
    DoubledSamplingOptions opts_;
    Index d_;
    Matrix sa_, sb_, sc_, sd_;
    Vector k1_, k2_, k3_, k4_, tmp_, cphi_, dpsi_;
};

} // namespace detail

// One realization of the doubled process: small-step Bernoulli jumps
// (dN_i ~ Bernoulli(lambda_i dt)) over RK4 drift segments.
inline DoubledTrajectoryRecord sample_doubled_trajectory(const TimeLocalModel& model,
                                                         const DoubledState& theta0,
                                                         const std::vector<double>& t_grid,
                                                         RngStream rng,
                                                         const DoubledSamplingOptions& opts = {}) {
    if (t_grid.empty())
        throw ValidationError("sample_doubled_trajectory: empty time grid");
    for (std::size_t i = 1; i < t_grid.size(); ++i)
        if (!(t_grid[i] > t_grid[i - 1]))
            throw ValidationError("sample_doubled_trajectory: time grid must be ascending");
    model.require_inside(t_grid.front());
    model.require_inside(t_grid.back());
    if (theta0.dim() != model.dim())
        throw DimensionError("sample_doubled_trajectory: state dimension mismatch");

    detail::DoubledStepper stepper(model, opts);
    const Index d = model.dim();
    Vector theta(2 * d);
    theta.head(d) = theta0.phi;
    theta.tail(d) = theta0.psi;

    DoubledTrajectoryRecord rec;
    rec.sample_times = t_grid;
    rec.states.reserve(t_grid.size());
    rec.states.push_back(theta0);

    std::vector<double> rates;
    double t = t_grid.front();
    for (std::size_t k = 1; k < t_grid.size(); ++k) {
        const double tb = t_grid[k];
        while (t < tb - 1e-14 * std::abs(tb)) {
            const double total = stepper.rates(t, theta, rates);
            double lam_max = 0.0;
            for (double r : rates) lam_max = std::max(lam_max, r);
            const double h = stepper.step_size(tb - t, lam_max);

            const double u = rng.uniform();
            const bool jump_fires = u < total * h;
            stepper.rk4_step(t, h, theta);
            if (jump_fires) {
                double pick = rng.uniform() * total;
                std::size_t channel = rates.size() - 1;
                double acc = 0.0;
                for (std::size_t i = 0; i < rates.size(); ++i) {
                    acc += rates[i];
                    if (pick < acc) {
                        channel = i;
                        break;
                    }
                }
                stepper.jump(t + h, channel, theta);
                rec.jump_log.push_back({t + h, channel});
            }
            t += h;
        }
        t = tb;
        rec.states.emplace_back(theta.head(d).eval(), theta.tail(d).eval());
    }
    return rec;
}

struct DoubledUnravelOptions {
    std::vector<Matrix> observables;
    int threads = 1;
    std::int64_t block_size = 64;
    DoubledSamplingOptions sampling;
};

// E[|phi(t)><psi(t)|] over independent doubled trajectories started from
// theta0 = (psi0, psi0). Per-sample dyads are generally non-Hermitian; the
// mean converges to the time-local solution.
inline UnravelStats unravel_doubled_to_density(const TimeLocalModel& model, const StateVector& psi0,
                                               const std::vector<double>& t_grid,
                                               std::int64_t n_traj, std::uint64_t master_seed,
                                               const DoubledUnravelOptions& opt = {}) {
    if (n_traj < 2)
        throw ValidationError("unravel_doubled_to_density: need at least two trajectories");
    if (psi0.dim() != model.dim())
        throw DimensionError("unravel_doubled_to_density: state dimension mismatch");
    auto sample = [&](std::int64_t idx, EnsembleAccumulator& acc) {
        RngStream rng(master_seed, std::uint64_t(idx));
        const DoubledState theta0(psi0.amplitudes(), psi0.amplitudes());
        const auto rec = sample_doubled_trajectory(model, theta0, t_grid, rng, opt.sampling);
        std::size_t jumps = 0;
        for (std::size_t k = 0; k < t_grid.size(); ++k) {
            while (jumps < rec.jump_log.size() && rec.jump_log[jumps].time <= t_grid[k]) ++jumps;
            acc.add(k, rec.states[k].phi, rec.states[k].psi, std::int64_t(jumps));
        }
    };
    return run_trajectory_ensemble(model.dim(), t_grid, opt.observables, n_traj, opt.threads,
                                   sample, opt.block_size);
}

// Mixed initial states enter through an explicit pure-state decomposition;
// each trajectory draws its starting vector from the ensemble.
inline UnravelStats unravel_doubled_to_density(const TimeLocalModel& model,
                                               const WeightedStateEnsemble& rho0_decomposition,
                                               const std::vector<double>& t_grid,
                                               std::int64_t n_traj, std::uint64_t master_seed,
                                               const DoubledUnravelOptions& opt = {}) {
    if (n_traj < 2)
        throw ValidationError("unravel_doubled_to_density: need at least two trajectories");
    const auto& members = rho0_decomposition.members();
    auto sample = [&](std::int64_t idx, EnsembleAccumulator& acc) {
        RngStream rng(master_seed, std::uint64_t(idx));
        const double u = rng.uniform();
        std::size_t pick = members.size() - 1;
        double cum = 0.0;
        for (std::size_t i = 0; i < members.size(); ++i) {
            cum += members[i].weight;
            if (u < cum) {
                pick = i;
                break;
            }
        }
        const Vector& v = members[pick].state.amplitudes();
        const auto rec =
            sample_doubled_trajectory(model, DoubledState(v, v), t_grid, rng, opt.sampling);
        std::size_t jumps = 0;
        for (std::size_t k = 0; k < t_grid.size(); ++k) {
            while (jumps < rec.jump_log.size() && rec.jump_log[jumps].time <= t_grid[k]) ++jumps;
            acc.add(k, rec.states[k].phi, rec.states[k].psi, std::int64_t(jumps));
        }
    };
    return run_trajectory_ensemble(model.dim(), t_grid, opt.observables, n_traj, opt.threads,
                                   sample, opt.block_size);
}

} // namespace oqs
