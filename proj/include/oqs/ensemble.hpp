// ensemble.hpp — Weighted pure-state ensembles (ensembles of ensembles),
// covariance reconstruction and Monte Carlo error estimation.

#pragma once

#include <cmath>
#include <cstdint>
#include <istream>
#include <ostream>
#include <string>
#include <utility>
#include <vector>

#include "oqs/linalg.hpp"
#include "oqs/qstate.hpp"
#include "oqs/textio.hpp"

namespace oqs {

struct EnsembleMember {
    double weight;
    StateVector state;
    std::int64_t multiplicity = 1;
};

// Collection of pure sub-ensembles with statistical weights. With explicit
// multiplicities the weights are N_a / sum N_b exactly.
class WeightedStateEnsemble {
public:
    explicit WeightedStateEnsemble(std::vector<EnsembleMember> members)
        : members_(std::move(members)) {
        if (members_.empty())
            throw ValidationError("WeightedStateEnsemble: ensemble must be non-empty");
        const Index d = members_.front().state.dim();
        double wsum = 0.0;
        for (const auto& m : members_) {
            if (!(m.weight >= 0.0))
                throw ValidationError("WeightedStateEnsemble: weights must be nonnegative");
            if (m.multiplicity <= 0)
                throw ValidationError("WeightedStateEnsemble: multiplicities must be positive");
            if (m.state.dim() != d)
                throw DimensionError("WeightedStateEnsemble: member dimension mismatch");
            wsum += m.weight;
        }
        if (std::abs(wsum - 1.0) > 1e-12)
            throw ValidationError("WeightedStateEnsemble: weight sum " + std::to_string(wsum) +
                                  " deviates from 1 beyond 1e-12");
    }

    // Build with weights N_a / N, exact by construction.
    static WeightedStateEnsemble from_multiplicities(std::vector<StateVector> states,
                                                     std::vector<std::int64_t> counts) {
        if (states.empty() || states.size() != counts.size())
            throw ValidationError("WeightedStateEnsemble: need one count per state");
        std::int64_t total = 0;
        for (auto n : counts) {
            if (n <= 0) throw ValidationError("WeightedStateEnsemble: counts must be positive");
            total += n;
        }
        std::vector<EnsembleMember> members;
        members.reserve(states.size());
        for (std::size_t i = 0; i < states.size(); ++i)
            members.push_back({double(counts[i]) / double(total), std::move(states[i]), counts[i]});
        return WeightedStateEnsemble(std::move(members));
    }

    const std::vector<EnsembleMember>& members() const { return members_; }
    Index dim() const { return members_.front().state.dim(); }

    std::int64_t total_multiplicity() const {
        std::int64_t n = 0;
        for (const auto& m : members_) n += m.multiplicity;
        return n;
    }

private:
    std::vector<EnsembleMember> members_;
};

// Merge per-worker partial ensembles into one, reweighting by multiplicity.
// Associative and commutative up to member order, so parallel reductions give
// the same ensemble regardless of the merge tree.
inline WeightedStateEnsemble merge_ensembles(const WeightedStateEnsemble& a,
                                             const WeightedStateEnsemble& b) {
    if (a.dim() != b.dim())
        throw DimensionError("merge_ensembles: member dimension mismatch");
    const double total = double(a.total_multiplicity() + b.total_multiplicity());
    std::vector<EnsembleMember> members;
    members.reserve(a.members().size() + b.members().size());
    for (const auto* src : {&a, &b})
        for (const auto& m : src->members())
            members.push_back({double(m.multiplicity) / total, m.state, m.multiplicity});
    return WeightedStateEnsemble(std::move(members));
}

// rho = sum_a w_a |psi_a><psi_a|, the covariance of the random state.
inline DensityMatrix covariance_density(const WeightedStateEnsemble& ens) {
    const Index d = ens.dim();
    Matrix rho = Matrix::Zero(d, d);
    for (const auto& m : ens.members()) {
        const Vector& v = m.state.amplitudes();
        rho.noalias() += m.weight * (v * v.adjoint());
    }
    return DensityMatrix(std::move(rho));
}

// Rotate the global phase so the first non-negligible amplitude is real
// positive. Idempotent: a state already in canonical form is returned as-is.
inline StateVector canonical_phase(const StateVector& psi) {
    const Vector& v = psi.amplitudes();
    Index pivot = -1;
    const double floor = 1e-12 * v.norm();
    for (Index i = 0; i < v.size(); ++i)
        if (std::abs(v(i)) > floor) {
            pivot = i;
            break;
        }
    if (pivot < 0)
        throw ValidationError("canonical_phase: state has no amplitude above threshold");
    const Complex a = v(pivot);
    if (a.imag() == 0.0 && a.real() > 0.0) return psi;
    Vector rotated = v * (std::conj(a) / std::abs(a));
    rotated(pivot) = std::abs(a); // exact value of the pivot after rotation
    return StateVector(std::move(rotated));
}

struct ObservableStats {
    double mean;
    double standard_error;
};

// Weighted mean of <psi|A|psi> with the Monte Carlo standard error
// (Bessel-corrected on the effective sample size sum N_a).
inline ObservableStats observable_statistics(const WeightedStateEnsemble& ens,
                                             const HermitianOperator& a) {
    if (a.dim() != ens.dim())
        throw DimensionError("observable_statistics: operator dimension mismatch");
    double mean = 0.0;
    std::vector<double> values;
    values.reserve(ens.members().size());
    for (const auto& m : ens.members()) {
        const double x = expectation_state(a.matrix(), m.state.amplitudes());
        values.push_back(x);
        mean += m.weight * x;
    }
    double var = 0.0;
    std::size_t i = 0;
    for (const auto& m : ens.members()) {
        const double dx = values[i++] - mean;
        var += m.weight * dx * dx;
    }
    const auto n_eff = ens.total_multiplicity();
    const double se = (n_eff > 1) ? std::sqrt(var / double(n_eff - 1)) : 0.0;
    return {mean, se};
}

// Mean state plus per-observable statistics of a finite ensemble.
struct EnsembleStatistics {
    DensityMatrix mean_density;
    std::vector<ObservableStats> observables;
    std::int64_t n_samples;
};

inline EnsembleStatistics ensemble_statistics(const WeightedStateEnsemble& ens,
                                              const std::vector<HermitianOperator>& observables) {
    std::vector<ObservableStats> stats;
    stats.reserve(observables.size());
    for (const auto& a : observables) stats.push_back(observable_statistics(ens, a));
    return {covariance_density(ens), std::move(stats), ens.total_multiplicity()};
}

// Line-oriented snapshot: weight, re(a_0), im(a_0), ..., multiplicity.
inline void write_ensemble(std::ostream& out, const WeightedStateEnsemble& ens) {
    for (const auto& m : ens.members()) {
        out << format_double(m.weight);
        const Vector& v = m.state.amplitudes();
        for (Index i = 0; i < v.size(); ++i)
            out << ", " << format_double(v(i).real()) << ", " << format_double(v(i).imag());
        out << ", " << m.multiplicity << "\n";
    }
}

inline WeightedStateEnsemble read_ensemble(std::istream& in) {
    std::vector<EnsembleMember> members;
    std::string line;
    Index dim = -1;
    while (std::getline(in, line)) {
        const auto t = trim(line);
        if (t.empty() || t.front() == '#') continue;
        const auto fields = split(t, ',');
        if (fields.size() < 4 || fields.size() % 2 != 0)
            throw ValidationError("read_ensemble: malformed line '" + line + "'");
        const Index d = Index(fields.size() - 2) / 2;
        if (dim < 0) dim = d;
        if (d != dim)
            throw ValidationError("read_ensemble: inconsistent member dimension");
        const double w = parse_double(trim(fields[0]));
        Vector v(d);
        for (Index i = 0; i < d; ++i)
            v(i) = Complex(parse_double(trim(fields[1 + 2 * i])),
                           parse_double(trim(fields[2 + 2 * i])));
        const double mult = parse_double(trim(fields.back()));
        members.push_back({w, StateVector(std::move(v)), std::int64_t(mult)});
    }
    return WeightedStateEnsemble(std::move(members));
}

} // namespace oqs
