// tcl.hpp — Time-local non-Markovian master equation
//     d rho/dt = A(t) rho + rho B(t)^dag + sum_i C_i(t) rho D_i(t)^dag
// with time-indexed operators (constant, scalar-profile, or interpolated
// table), perturbative generator series, integration and flow diagnostics.

#pragma once

#include <cmath>
#include <cstdint>
#include <limits>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "oqs/lindblad.hpp"
#include "oqs/linalg.hpp"
#include "oqs/ode.hpp"
#include "oqs/qstate.hpp"
#include "oqs/rng.hpp"

namespace oqs {

// Named scalar time profiles usable in model files.
class ScalarProfile {
public:
    ScalarProfile(std::string name, std::vector<double> params)
        : name_(std::move(name)), params_(std::move(params)) {
        std::size_t arity = 0;
        if (name_ == "constant")
            arity = 1;
        else if (name_ == "sinusoid" || name_ == "sqrt_sinusoid")
            arity = 4; // c0 + a sin(omega t + phase)
        else if (name_ == "exp_decay")
            arity = 2; // a exp(-rate t)
        else
            throw ValidationError("ScalarProfile: unknown profile '" + name_ + "'");
        if (params_.size() != arity)
            throw ValidationError("ScalarProfile: '" + name_ + "' takes " +
                                  std::to_string(arity) + " parameters, got " +
                                  std::to_string(params_.size()));
    }

    double operator()(double t) const {
        if (name_ == "constant") return params_[0];
        if (name_ == "sinusoid")
            return params_[0] + params_[1] * std::sin(params_[2] * t + params_[3]);
        if (name_ == "sqrt_sinusoid")
            return std::sqrt(std::max(
                0.0, params_[0] + params_[1] * std::sin(params_[2] * t + params_[3])));
        return params_[0] * std::exp(-params_[1] * t);
    }

    const std::string& name() const { return name_; }
    const std::vector<double>& params() const { return params_; }

private:
    std::string name_;
    std::vector<double> params_;
};

// Operator-valued function of time. Tables use a uniform grid with linear
// interpolation and bound the usable interval; constants and profiles do not.
class TimeIndexedOperator {
public:
    static TimeIndexedOperator constant(Matrix m) {
        require_finite(m, "TimeIndexedOperator");
        require_square(m, "TimeIndexedOperator");
        TimeIndexedOperator op;
        op.dim_ = m.rows();
        op.kind_ = Kind::Constant;
        op.base_ = std::move(m);
        return op;
    }

    static TimeIndexedOperator profile(Matrix m, ScalarProfile scalar) {
        TimeIndexedOperator op = constant(std::move(m));
        op.kind_ = Kind::Profile;
        op.scalar_ = std::move(scalar);
        return op;
    }

    static TimeIndexedOperator table(std::vector<double> times, std::vector<Matrix> values) {
        if (times.size() < 2 || times.size() != values.size())
            throw ValidationError("TimeIndexedOperator: table needs >= 2 nodes with one matrix "
                                  "per node");
        const double h0 = times[1] - times[0];
        for (std::size_t i = 1; i < times.size(); ++i) {
            const double h = times[i] - times[i - 1];
            if (!(h > 0.0) || std::abs(h - h0) > 1e-9 * std::max(1.0, std::abs(h0)))
                throw ValidationError("TimeIndexedOperator: table time grid must be uniform "
                                      "and ascending");
        }
        TimeIndexedOperator op;
        op.dim_ = values.front().rows();
        for (const auto& v : values) {
            require_finite(v, "TimeIndexedOperator table node");
            require_square(v, "TimeIndexedOperator table node");
            if (v.rows() != op.dim_)
                throw DimensionError("TimeIndexedOperator: table node dimension mismatch");
        }
        op.kind_ = Kind::Table;
        op.times_ = std::move(times);
        op.values_ = std::move(values);
        return op;
    }

    Index dim() const { return dim_; }

    double t_min() const {
        return kind_ == Kind::Table ? times_.front() : -std::numeric_limits<double>::infinity();
    }
    double t_max() const {
        return kind_ == Kind::Table ? times_.back() : std::numeric_limits<double>::infinity();
    }

    // Evaluate at t; constants come back by reference, everything else lands in
    // the caller's scratch buffer.
    const Matrix& eval(double t, Matrix& scratch) const {
        switch (kind_) {
        case Kind::Constant:
            return base_;
        case Kind::Profile:
            scratch = (*scalar_)(t)*base_;
            return scratch;
        case Kind::Table: {
            if (t < times_.front() - 1e-12 || t > times_.back() + 1e-12)
                throw ValidationError("TimeIndexedOperator: t = " + std::to_string(t) +
                                      " outside table interval");
            const double clamped = std::min(std::max(t, times_.front()), times_.back());
            const double h = times_[1] - times_[0];
            const std::size_t i = std::min(
                times_.size() - 2, std::size_t(std::max(0.0, (clamped - times_.front()) / h)));
            const double w = (clamped - times_[i]) / (times_[i + 1] - times_[i]);
            scratch = (1.0 - w) * values_[i] + w * values_[i + 1];
            return scratch;
        }
        }
        throw Error("TimeIndexedOperator: unreachable");
    }

    Matrix operator()(double t) const {
        Matrix scratch;
        return eval(t, scratch);
    }

    bool is_constant() const { return kind_ == Kind::Constant; }
    bool is_profile() const { return kind_ == Kind::Profile; }
    bool is_table() const { return kind_ == Kind::Table; }
    const Matrix& base_matrix() const { return base_; }
    const ScalarProfile& scalar() const { return *scalar_; }
    const std::vector<double>& table_times() const { return times_; }
    const std::vector<Matrix>& table_values() const { return values_; }

private:
    enum class Kind { Constant, Profile, Table };

    TimeIndexedOperator() = default;

    Kind kind_ = Kind::Constant;
    Index dim_ = 0;
    Matrix base_;
    std::optional<ScalarProfile> scalar_;
    std::vector<double> times_;
    std::vector<Matrix> values_;
};

struct TimeLocalChannel {
    TimeIndexedOperator c;
    TimeIndexedOperator d;
};

class TimeLocalModel {
public:
    TimeLocalModel(TimeIndexedOperator a, TimeIndexedOperator b,
                   std::vector<TimeLocalChannel> channels,
                   double t_min = -std::numeric_limits<double>::infinity(),
                   double t_max = std::numeric_limits<double>::infinity())
        : a_(std::move(a)), b_(std::move(b)), channels_(std::move(channels)) {
        dim_ = a_.dim();
        if (b_.dim() != dim_)
            throw DimensionError("TimeLocalModel: A and B dimension mismatch");
        t_min_ = std::max(t_min, std::max(a_.t_min(), b_.t_min()));
        t_max_ = std::min(t_max, std::min(a_.t_max(), b_.t_max()));
        for (const auto& ch : channels_) {
            if (ch.c.dim() != dim_ || ch.d.dim() != dim_)
                throw DimensionError("TimeLocalModel: channel dimension mismatch");
            t_min_ = std::max({t_min_, ch.c.t_min(), ch.d.t_min()});
            t_max_ = std::min({t_max_, ch.c.t_max(), ch.d.t_max()});
        }
        if (!(t_min_ < t_max_))
            throw ValidationError("TimeLocalModel: empty time interval");
    }

    const TimeIndexedOperator& a() const { return a_; }
    const TimeIndexedOperator& b() const { return b_; }
    const std::vector<TimeLocalChannel>& channels() const { return channels_; }
    Index dim() const { return dim_; }
    double t_min() const { return t_min_; }
    double t_max() const { return t_max_; }

    void require_inside(double t) const {
        if (t < t_min_ - 1e-12 || t > t_max_ + 1e-12)
            throw ValidationError("TimeLocalModel: t = " + std::to_string(t) +
                                  " outside model interval [" + std::to_string(t_min_) + ", " +
                                  std::to_string(t_max_) + "]");
    }

private:
    TimeIndexedOperator a_, b_;
    std::vector<TimeLocalChannel> channels_;
    Index dim_;
    double t_min_, t_max_;
};

// A(t) rho + rho B(t)^dag + sum_i C_i(t) rho D_i(t)^dag
inline Matrix timelocal_rhs(const TimeLocalModel& model, const Matrix& rho, double t) {
    model.require_inside(t);
    if (rho.rows() != model.dim() || rho.cols() != model.dim())
        throw DimensionError("timelocal_rhs: state dimension mismatch");
    Matrix sa, sb, sc, sd;
    const Matrix& a = model.a().eval(t, sa);
    const Matrix& b = model.b().eval(t, sb);
    Matrix out = a * rho;
    out.noalias() += rho * b.adjoint();
    for (const auto& ch : model.channels()) {
        const Matrix& c = ch.c.eval(t, sc);
        const Matrix& d = ch.d.eval(t, sd);
        out.noalias() += c * rho * d.adjoint();
    }
    return out;
}

// Lindblad models embed with A = B = -iH - 1/2 sum gamma_i A_i^dag A_i and
// C_i = D_i = sqrt(gamma_i) A_i; the right-hand sides then agree identically.
inline TimeLocalModel embed_lindblad(const LindbladModel& model) {
    const Matrix g = model.effective_drift();
    std::vector<TimeLocalChannel> channels;
    for (const auto& ch : model.channels()) {
        Matrix scaled = std::sqrt(ch.gamma) * ch.a;
        channels.push_back({TimeIndexedOperator::constant(scaled),
                            TimeIndexedOperator::constant(std::move(scaled))});
    }
    return TimeLocalModel(TimeIndexedOperator::constant(g), TimeIndexedOperator::constant(g),
                          std::move(channels));
}

// Perturbative series K(t) = sum_{n=1..order} alpha^n K_n(t) of superoperator
// terms (d^2 x d^2, column-stacking convention).
struct GeneratorSeries {
    double alpha;
    std::vector<TimeIndexedOperator> terms;
    std::size_t order;
};

class AssembledGenerator {
public:
    explicit AssembledGenerator(GeneratorSeries series) : series_(std::move(series)) {
        if (series_.terms.empty())
            throw ValidationError("assemble_generator: series has no terms");
        if (series_.order != series_.terms.size())
            throw ValidationError("assemble_generator: order " + std::to_string(series_.order) +
                                  " != number of terms " +
                                  std::to_string(series_.terms.size()));
        const Index d2 = series_.terms.front().dim();
        for (const auto& term : series_.terms)
            if (term.dim() != d2)
                throw DimensionError("assemble_generator: term dimension mismatch");
    }

    // K(t)
    Matrix eval(double t) const {
        Matrix scratch;
        const Index d2 = series_.terms.front().dim();
        Matrix out = Matrix::Zero(d2, d2);
        double coeff = 1.0;
        for (const auto& term : series_.terms) {
            coeff *= series_.alpha;
            out += coeff * term.eval(t, scratch);
        }
        return out;
    }

    // K(t) applied to a density matrix.
    Matrix apply(double t, const Matrix& rho) const {
        const Index d = rho.rows();
        return unstack_columns(eval(t) * stack_columns(rho), d);
    }

private:
    GeneratorSeries series_;
};

inline AssembledGenerator assemble_generator(GeneratorSeries series) {
    return AssembledGenerator(std::move(series));
}

// Integrate the time-local equation. Outputs are raw matrices: Hermiticity is
// only guaranteed for symmetric models (B = A, D_i = C_i) and positivity is
// not guaranteed at all.
inline std::vector<Matrix> integrate_timelocal(const TimeLocalModel& model, const DensityMatrix& rho0,
                                               const std::vector<double>& t_grid,
                                               const OdeOptions& opts = {}) {
    if (t_grid.empty())
        throw ValidationError("integrate_timelocal: empty time grid");
    model.require_inside(t_grid.front());
    model.require_inside(t_grid.back());
    if (rho0.dim() != model.dim())
        throw DimensionError("integrate_timelocal: initial state dimension mismatch");

    Matrix sa, sb, sc, sd;
    auto rhs = [&](double t, const Matrix& y, Matrix& out) {
        const Matrix& a = model.a().eval(t, sa);
        const Matrix& b = model.b().eval(t, sb);
        out.noalias() = a * y;
        out.noalias() += y * b.adjoint();
        for (const auto& ch : model.channels()) {
            const Matrix& c = ch.c.eval(t, sc);
            const Matrix& d = ch.d.eval(t, sd);
            out.noalias() += c * y * d.adjoint();
        }
    };
    return integrate_at<Matrix>(rhs, rho0.matrix(), t_grid, opts);
}

// Trace-preservation witness: max |tr rhs(rho, t)| over random states and
// sampled times. The generator is not forced to preserve the trace; callers
// treat a large residual as a warning, not an error.
inline double trace_preservation_residual(const TimeLocalModel& model,
                                          const std::vector<double>& times, int n_states = 4,
                                          std::uint64_t seed = 0x77697477u) {
    RngStream rng(seed, 0);
    double worst = 0.0;
    for (int s = 0; s < n_states; ++s) {
        Matrix g(model.dim(), model.dim());
        for (Index i = 0; i < model.dim(); ++i)
            for (Index j = 0; j < model.dim(); ++j)
                g(i, j) = Complex(2.0 * rng.uniform() - 1.0, 2.0 * rng.uniform() - 1.0);
        Matrix rho = g * g.adjoint();
        rho /= rho.trace().real();
        for (double t : times)
            worst = std::max(worst, std::abs(timelocal_rhs(model, rho, t).trace()));
    }
    return worst;
}

// Superoperator matrix of the generator at time t.
inline Matrix timelocal_superoperator(const TimeLocalModel& model, double t) {
    model.require_inside(t);
    const Index d = model.dim();
    const Matrix id = identity_op(d);
    Matrix sa, sb, sc, sd;
    const Matrix& a = model.a().eval(t, sa);
    const Matrix& b = model.b().eval(t, sb);
    Matrix k = kron(id, a) + kron(b.conjugate(), id);
    for (const auto& ch : model.channels()) {
        const Matrix& c = ch.c.eval(t, sc);
        const Matrix& d_op = ch.d.eval(t, sd);
        k.noalias() += kron(d_op.conjugate(), c);
    }
    return k;
}

// Propagate the flow map Phi(t) (d Phi/dt = K(t) Phi, Phi(0) = I) and report
// its condition number along the grid. Condition numbers beyond 1e12 flag the
// loss of invertibility of the evolution.
struct FlowMapDiagnostic {
    std::vector<double> times;
    std::vector<double> condition_numbers;
    bool invertibility_loss = false;
};

inline FlowMapDiagnostic flow_map_condition(const TimeLocalModel& model,
                                            const std::vector<double>& t_grid,
                                            const OdeOptions& opts = {}) {
    const Index d = model.dim();
    auto rhs = [&](double t, const Matrix& y, Matrix& out) {
        out.noalias() = timelocal_superoperator(model, t) * y;
    };
    const auto maps = integrate_at<Matrix>(rhs, Matrix::Identity(d * d, d * d), t_grid, opts);
    FlowMapDiagnostic diag;
    diag.times = t_grid;
    for (const auto& phi : maps) {
        Eigen::JacobiSVD<Matrix> svd(phi);
        const double smin = svd.singularValues().minCoeff();
        const double smax = svd.singularValues().maxCoeff();
        const double cond = (smin > 0.0) ? smax / smin : std::numeric_limits<double>::infinity();
        diag.condition_numbers.push_back(cond);
        if (cond > 1e12) diag.invertibility_loss = true;
    }
    return diag;
}

} // namespace oqs
