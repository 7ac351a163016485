// trajectory_stats.hpp — Deterministic parallel reduction of trajectory
// ensembles. Trajectories are grouped into fixed-size blocks; workers fill
// whole blocks and the block partials merge in index order, so the floating
// point result is independent of the worker count.

#pragma once

#include <atomic>
#include <cstdint>
#include <thread>
#include <vector>

#include "oqs/linalg.hpp"
#include "oqs/qstate.hpp"

namespace oqs {

// Per-time accumulation of dyads |phi><psi|, observable samples <psi|A|phi>,
// squared magnitudes for variance estimates, and cumulative jump counts.
class EnsembleAccumulator {
public:
    EnsembleAccumulator() = default;

    EnsembleAccumulator(Index dim, std::size_t n_times, const std::vector<Matrix>* observables)
        : dim_(dim), observables_(observables) {
        dyad_sum_.assign(n_times, Matrix::Zero(dim, dim));
        sq_sum_.assign(n_times, Eigen::MatrixXd::Zero(dim, dim));
        const std::size_t n_obs = observables ? observables->size() : 0;
        obs_sum_.assign(n_times, std::vector<Complex>(n_obs, Complex(0, 0)));
        obs_sq_re_.assign(n_times, std::vector<double>(n_obs, 0.0));
        obs_sq_im_.assign(n_times, std::vector<double>(n_obs, 0.0));
        jump_sum_.assign(n_times, 0.0);
    }

    // Record the contribution of one trajectory at time index k.
    void add(std::size_t k, const Vector& phi, const Vector& psi, std::int64_t jumps_up_to_k) {
        Matrix dyad = phi * psi.adjoint();
        dyad_sum_[k] += dyad;
        sq_sum_[k] += dyad.real().cwiseAbs2() + dyad.imag().cwiseAbs2();
        if (observables_) {
            for (std::size_t o = 0; o < observables_->size(); ++o) {
                const Complex v = psi.dot((*observables_)[o] * phi);
                obs_sum_[k][o] += v;
                obs_sq_re_[k][o] += v.real() * v.real();
                obs_sq_im_[k][o] += v.imag() * v.imag();
            }
        }
        jump_sum_[k] += double(jumps_up_to_k);
        if (k == 0) ++count_;
    }

    void merge(const EnsembleAccumulator& other) {
        for (std::size_t k = 0; k < dyad_sum_.size(); ++k) {
            dyad_sum_[k] += other.dyad_sum_[k];
            sq_sum_[k] += other.sq_sum_[k];
            for (std::size_t o = 0; o < obs_sum_[k].size(); ++o) {
                obs_sum_[k][o] += other.obs_sum_[k][o];
                obs_sq_re_[k][o] += other.obs_sq_re_[k][o];
                obs_sq_im_[k][o] += other.obs_sq_im_[k][o];
            }
            jump_sum_[k] += other.jump_sum_[k];
        }
        count_ += other.count_;
    }

    Index dim() const { return dim_; }
    std::int64_t count() const { return count_; }
    const std::vector<Matrix>& dyad_sum() const { return dyad_sum_; }
    const std::vector<Eigen::MatrixXd>& sq_sum() const { return sq_sum_; }
    const std::vector<std::vector<Complex>>& obs_sum() const { return obs_sum_; }
    const std::vector<std::vector<double>>& obs_sq_re() const { return obs_sq_re_; }
    const std::vector<std::vector<double>>& obs_sq_im() const { return obs_sq_im_; }
    const std::vector<double>& jump_sum() const { return jump_sum_; }

private:
    Index dim_ = 0;
    const std::vector<Matrix>* observables_ = nullptr;
    std::vector<Matrix> dyad_sum_;
    std::vector<Eigen::MatrixXd> sq_sum_;
    std::vector<std::vector<Complex>> obs_sum_;
    std::vector<std::vector<double>> obs_sq_re_, obs_sq_im_;
    std::vector<double> jump_sum_;
    std::int64_t count_ = 0;
};

// Ensemble averages with Monte Carlo error estimates.
struct UnravelStats {
    std::vector<double> times;
    std::vector<Matrix> mean;                    // E[|phi><psi|] per time
    std::vector<double> se_total;                // sqrt(sum of entrywise Var(mean))
    std::vector<std::vector<Complex>> obs_mean;  // [time][observable]
    std::vector<std::vector<double>> obs_se;     // combined re/im standard error
    std::vector<double> mean_jump_count;
    std::int64_t n_traj = 0;
};

inline UnravelStats finalize_stats(std::vector<double> times, const EnsembleAccumulator& acc) {
    const double n = double(acc.count());
    UnravelStats out;
    out.times = std::move(times);
    out.n_traj = acc.count();
    const std::size_t n_times = acc.dyad_sum().size();
    out.mean.reserve(n_times);
    for (std::size_t k = 0; k < n_times; ++k) {
        out.mean.push_back(acc.dyad_sum()[k] / n);
        double var_mean_sum = 0.0;
        if (acc.count() > 1) {
            const Eigen::MatrixXd mean_sq = acc.dyad_sum()[k].real().cwiseAbs2() +
                                            acc.dyad_sum()[k].imag().cwiseAbs2();
            const Eigen::MatrixXd var =
                (acc.sq_sum()[k] - mean_sq / n).cwiseMax(0.0) / (n - 1.0);
            var_mean_sum = var.sum() / n;
        }
        out.se_total.push_back(std::sqrt(var_mean_sum));

        std::vector<Complex> means;
        std::vector<double> ses;
        for (std::size_t o = 0; o < acc.obs_sum()[k].size(); ++o) {
            const Complex s = acc.obs_sum()[k][o];
            means.push_back(s / n);
            double se = 0.0;
            if (acc.count() > 1) {
                const double var_re =
                    std::max(0.0, acc.obs_sq_re()[k][o] - s.real() * s.real() / n) / (n - 1.0);
                const double var_im =
                    std::max(0.0, acc.obs_sq_im()[k][o] - s.imag() * s.imag() / n) / (n - 1.0);
                se = std::sqrt((var_re + var_im) / n);
            }
            ses.push_back(se);
        }
        out.obs_mean.push_back(std::move(means));
        out.obs_se.push_back(std::move(ses));
        out.mean_jump_count.push_back(acc.jump_sum()[k] / n);
    }
    return out;
}

// Run n_traj trajectory tasks distributed over worker threads. sample_fn is
// called once per trajectory index and must accumulate into the block partial;
// results are merged in block order.
template <class SampleFn>
UnravelStats run_trajectory_ensemble(Index dim, const std::vector<double>& times,
                                     const std::vector<Matrix>& observables,
                                     std::int64_t n_traj, int threads, SampleFn&& sample_fn,
                                     std::int64_t block_size = 64) {
    if (n_traj < 1) throw ValidationError("trajectory ensemble: need at least one trajectory");
    if (block_size < 1) block_size = 64;
    const std::int64_t n_blocks = (n_traj + block_size - 1) / block_size;
    std::vector<EnsembleAccumulator> blocks(static_cast<std::size_t>(n_blocks));

    const int n_workers =
        std::max(1, std::min<int>(threads, int(std::min<std::int64_t>(n_blocks, 64))));
    std::atomic<std::int64_t> next_block{0};
    auto worker = [&]() {
        for (;;) {
            const std::int64_t b = next_block.fetch_add(1);
            if (b >= n_blocks) return;
            EnsembleAccumulator acc(dim, times.size(), &observables);
            const std::int64_t lo = b * block_size;
            const std::int64_t hi = std::min(n_traj, lo + block_size);
            for (std::int64_t idx = lo; idx < hi; ++idx) sample_fn(idx, acc);
            blocks[std::size_t(b)] = std::move(acc);
        }
    };
    if (n_workers == 1) {
        worker();
    } else {
        std::vector<std::thread> pool;
        pool.reserve(n_workers);
        for (int w = 0; w < n_workers; ++w) pool.emplace_back(worker);
        for (auto& th : pool) th.join();
    }

    EnsembleAccumulator total(dim, times.size(), &observables);
    for (const auto& b : blocks) total.merge(b);
    return finalize_stats(times, total);
}

} // namespace oqs
