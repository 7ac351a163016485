// bernoulli.hpp — Small-step Bernoulli sampler dN_i ~ Bernoulli(lambda_i dt)
// for the Markovian process. Comparison partner for the waiting-time
// implementation; kept independent of it (fixed-step RK4 on the nonlinear
// drift, no dense output, no threshold construction).

#pragma once

#include "oqs/mcwf.hpp"

namespace testsupport {

using namespace oqs;

inline TrajectoryRecord sample_trajectory_bernoulli(const LindbladModel& model,
                                                    const StateVector& psi0,
                                                    const std::vector<double>& t_grid,
                                                    RngStream rng,
                                                    double max_lambda_dt = 1e-3,
                                                    double max_dt = 1e-2) {
    TrajectoryRecord rec;
    rec.sample_times = t_grid;
    rec.states.push_back(psi0);

    Vector psi = psi0.amplitudes();
    auto drift = [&](const Vector& v) -> Vector {
        Vector out = model.effective_drift() * v;
        double total = 0.0;
        for (const auto& ch : model.channels()) total += ch.gamma * (ch.a * v).squaredNorm();
        return out + 0.5 * total * v;
    };

    double t = t_grid.front();
    for (std::size_t k = 1; k < t_grid.size(); ++k) {
        const double tb = t_grid[k];
        while (t < tb - 1e-15) {
            std::vector<double> rates;
            double total = 0.0, lam_max = 0.0;
            for (const auto& ch : model.channels()) {
                const double lam = ch.gamma * (ch.a * psi).squaredNorm();
                rates.push_back(lam);
                total += lam;
                lam_max = std::max(lam_max, lam);
            }
            double dt = std::min(tb - t, max_dt);
            if (lam_max > 0.0) dt = std::min(dt, max_lambda_dt / lam_max);

            const double u = rng.uniform();
            if (u < total * dt) {
                double pick = rng.uniform() * total;
                std::size_t ch = rates.size() - 1;
                double acc = 0.0;
                for (std::size_t i = 0; i < rates.size(); ++i) {
                    acc += rates[i];
                    if (pick < acc) {
                        ch = i;
                        break;
                    }
                }
                psi = model.channels()[ch].a * psi;
                psi /= psi.norm();
                rec.jump_log.push_back({t + dt, ch});
            } else {
                const Vector k1 = drift(psi);
                const Vector k2 = drift(psi + 0.5 * dt * k1);
                const Vector k3 = drift(psi + 0.5 * dt * k2);
                const Vector k4 = drift(psi + dt * k3);
                psi += (dt / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
                psi /= psi.norm();
            }
            t += dt;
        }
        t = tb;
        rec.states.push_back(StateVector::normalized(psi));
    }
    return rec;
}

} // namespace testsupport
