// mcwf.hpp — Monte Carlo wave function method: piecewise deterministic process
// for the conditioned state of a Lindblad model. Deterministic drift periods
// are interrupted by quantum jumps psi -> A_i psi / ||A_i psi||.

#pragma once

#include <cstdint>
#include <numeric>
#include <optional>
#include <vector>

#include "oqs/ensemble.hpp"
#include "oqs/lindblad.hpp"
#include "oqs/ode.hpp"
#include "oqs/rng.hpp"
#include "oqs/trajectory_stats.hpp"

namespace oqs {

struct JumpEvent {
    double time;
    std::size_t channel;
};

struct TrajectoryRecord {
    std::vector<double> sample_times;
    std::vector<StateVector> states; // normalized, one per sample time
    std::vector<JumpEvent> jump_log;
};

// dpsi/dt = -iH psi - 1/2 sum_i gamma_i (A_i^dag A_i - ||A_i psi||^2) psi.
// Norm preserving: Re<psi|dpsi/dt> = 0 for normalized psi.
inline Vector nonlinear_drift(const LindbladModel& model, const StateVector& psi) {
    if (psi.dim() != model.dim())
        throw DimensionError("nonlinear_drift: state dimension mismatch");
    const Vector& v = psi.amplitudes();
    Vector out = model.effective_drift() * v;
    double rate_total = 0.0;
    for (const auto& ch : model.channels()) rate_total += ch.gamma * (ch.a * v).squaredNorm();
    out += 0.5 * rate_total * v;
    return out;
}

// lambda_i = gamma_i ||A_i psi||^2
inline std::vector<double> jump_rates(const LindbladModel& model, const StateVector& psi) {
    if (psi.dim() != model.dim())
        throw DimensionError("jump_rates: state dimension mismatch");
    std::vector<double> rates;
    rates.reserve(model.channels().size());
    for (const auto& ch : model.channels())
        rates.push_back(ch.gamma * (ch.a * psi.amplitudes()).squaredNorm());
    return rates;
}

inline StateVector apply_jump(const LindbladModel& model, std::size_t channel,
                              const StateVector& psi) {
    if (channel >= model.channels().size())
        throw ValidationError("apply_jump: channel index out of range");
    const Vector mapped = model.channels()[channel].a * psi.amplitudes();
    const double n = mapped.norm();
    if (n <= 1e-12)
        throw Error("apply_jump: logic error, jump requested from a dark state of channel " +
                    std::to_string(channel));
    return StateVector(mapped / n);
}

// One realization of the process using the waiting-time construction: the
// unnormalized state evolves with the linear non-Hermitian drift, and a jump
// fires when ||psi~||^2 falls to a uniform threshold. The jump time is located
// on the integrator's dense output by bisection.
inline TrajectoryRecord sample_trajectory(const LindbladModel& model, const StateVector& psi0,
                                          const std::vector<double>& t_grid, RngStream rng,
                                          const OdeOptions& opts = {}) {
    if (t_grid.empty())
        throw ValidationError("sample_trajectory: empty time grid");
    for (std::size_t i = 1; i < t_grid.size(); ++i)
        if (!(t_grid[i] > t_grid[i - 1]))
            throw ValidationError("sample_trajectory: time grid must be strictly ascending");
    if (psi0.dim() != model.dim())
        throw DimensionError("sample_trajectory: state dimension mismatch");

    const Matrix g = model.effective_drift();
    auto rhs = [&g](double, const Vector& y, Vector& dy) { dy.noalias() = g * y; };

    TrajectoryRecord rec;
    rec.sample_times = t_grid;
    rec.states.reserve(t_grid.size());
    rec.states.push_back(psi0);

    const double t_end = t_grid.back();
    const double span = t_end - t_grid.front();
    const double t_tol = 1e-9 * (span > 0.0 ? span : 1.0);

    double eta = rng.uniform();
    std::optional<Dopri5<Vector, decltype(rhs)>> stepper;
    stepper.emplace(rhs, t_grid.front(), psi0.amplitudes(), opts);
    std::size_t next = 1;

    while (next < t_grid.size() && stepper->advance(t_end)) {
        if (stepper->y().squaredNorm() <= eta) {
            // crossing inside this step; ||psi~(t)||^2 is non-increasing
            const auto dense = stepper->dense();
            double lo = dense.t0, hi = stepper->t();
            while (hi - lo > t_tol) {
                const double mid = 0.5 * (lo + hi);
                if (dense.eval(mid).squaredNorm() <= eta)
                    hi = mid;
                else
                    lo = mid;
            }
            const double t_jump = hi;

            while (next < t_grid.size() && t_grid[next] < t_jump) {
                rec.states.push_back(StateVector::normalized(dense.eval(t_grid[next])));
                ++next;
            }

            const StateVector pre = StateVector::normalized(dense.eval(t_jump));
            const auto rates = jump_rates(model, pre);
            const double total = std::accumulate(rates.begin(), rates.end(), 0.0);
            if (!(total > 0.0))
                throw NumericalError("sample_trajectory: jump triggered with zero total rate at t = " +
                                     std::to_string(t_jump));
            const double u = rng.uniform() * total;
            std::size_t channel = rates.size() - 1;
            double acc = 0.0;
            for (std::size_t i = 0; i < rates.size(); ++i) {
                acc += rates[i];
                if (u < acc) {
                    channel = i;
                    break;
                }
            }
            const StateVector post = apply_jump(model, channel, pre);
            rec.jump_log.push_back({t_jump, channel});
            eta = rng.uniform();
            stepper.emplace(rhs, t_jump, post.amplitudes(), opts);
            continue;
        }

        while (next < t_grid.size() && t_grid[next] <= stepper->t()) {
            const Vector y = (t_grid[next] >= stepper->t())
                                 ? stepper->y()
                                 : stepper->dense().eval(t_grid[next]);
            rec.states.push_back(StateVector::normalized(y));
            ++next;
        }
    }
    while (next < t_grid.size()) {
        rec.states.push_back(StateVector::normalized(stepper->y()));
        ++next;
    }
    return rec;
}

struct UnravelOptions {
    std::vector<Matrix> observables;
    int threads = 1;
    std::int64_t block_size = 64;
    OdeOptions ode;
};

// E[|psi(t)><psi(t)|] over n_traj independent trajectories, with standard
// errors; trajectory k draws from stream (master_seed, k), so the result does
// not depend on scheduling or worker count.
inline UnravelStats unravel_to_density(const LindbladModel& model, const StateVector& psi0,
                                       const std::vector<double>& t_grid, std::int64_t n_traj,
                                       std::uint64_t master_seed,
                                       const UnravelOptions& opt = {}) {
    if (n_traj < 2)
        throw ValidationError("unravel_to_density: need at least two trajectories");
    auto sample = [&](std::int64_t idx, EnsembleAccumulator& acc) {
        RngStream rng(master_seed, std::uint64_t(idx));
        const auto rec = sample_trajectory(model, psi0, t_grid, rng, opt.ode);
        std::size_t jumps = 0;
        for (std::size_t k = 0; k < t_grid.size(); ++k) {
            while (jumps < rec.jump_log.size() && rec.jump_log[jumps].time <= t_grid[k]) ++jumps;
            const Vector& v = rec.states[k].amplitudes();
            acc.add(k, v, v, std::int64_t(jumps));
        }
    };
    return run_trajectory_ensemble(model.dim(), t_grid, opt.observables, n_traj, opt.threads,
                                   sample, opt.block_size);
}

// View one time point of an unraveling as ensemble statistics over the mean
// state. Observable means of the Markovian process are real.
inline EnsembleStatistics stats_at(const UnravelStats& stats, std::size_t k) {
    std::vector<ObservableStats> obs;
    for (std::size_t o = 0; o < stats.obs_mean[k].size(); ++o)
        obs.push_back({stats.obs_mean[k][o].real(), stats.obs_se[k][o]});
    return {DensityMatrix(stats.mean[k]), std::move(obs), stats.n_traj};
}

} // namespace oqs
