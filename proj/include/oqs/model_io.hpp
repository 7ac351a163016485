// model_io.hpp — Model files: operator expressions and literals, model
// parsing with invariant validation, and round-trip serialization.

#pragma once

#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <variant>
#include <vector>

#include "oqs/config.hpp"
#include "oqs/lindblad.hpp"
#include "oqs/micro.hpp"
#include "oqs/ops.hpp"
#include "oqs/qops.hpp"
#include "oqs/tcl.hpp"

namespace oqs {

// ---------------------------------------------------------------------------
// Operator expressions: builders, +, -, *, kron(...), complex scalars (2i).
// ---------------------------------------------------------------------------

namespace detail {

class ExprParser {
public:
    using Val = std::variant<Complex, Matrix>;

    explicit ExprParser(std::string_view text) : text_(text) {}

    Val parse() {
        Val v = expr();
        skip();
        if (pos_ != text_.size())
            fail("trailing input at '" + std::string(text_.substr(pos_)) + "'");
        return v;
    }

private:
    [[noreturn]] void fail(const std::string& msg) const {
        throw ValidationError("operator expression '" + std::string(text_) + "': " + msg);
    }

    void skip() {
        while (pos_ < text_.size() &&
               (text_[pos_] == ' ' || text_[pos_] == '\t' || text_[pos_] == '\n'))
            ++pos_;
    }

    bool consume(char c) {
        skip();
        if (pos_ < text_.size() && text_[pos_] == c) {
            ++pos_;
            return true;
        }
        return false;
    }

    Val expr() {
        Val acc = term();
        for (;;) {
            skip();
            if (consume('+'))
                acc = add(acc, term(), +1.0);
            else if (pos_ < text_.size() && text_[pos_] == '-' ) {
                ++pos_;
                acc = add(acc, term(), -1.0);
            } else {
                return acc;
            }
        }
    }

    Val term() {
        Val acc = unary();
        for (;;) {
            if (consume('*'))
                acc = mul(acc, unary());
            else
                return acc;
        }
    }

    Val unary() {
        skip();
        if (consume('-')) return mul(Val(Complex(-1.0, 0.0)), unary());
        return primary();
    }

    Val primary() {
        skip();
        if (pos_ >= text_.size()) fail("unexpected end of expression");
        const char c = text_[pos_];
        if (c == '(') {
            ++pos_;
            Val v = expr();
            if (!consume(')')) fail("missing ')'");
            return v;
        }
        if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') return number();
        if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') return builder();
        fail(std::string("unexpected character '") + c + "'");
    }

    Val number() {
        std::size_t end = pos_;
        while (end < text_.size()) {
            const char c = text_[end];
            if (std::isdigit(static_cast<unsigned char>(c)) || c == '.' || c == 'e' ||
                c == 'E' ||
                ((c == '+' || c == '-') && end > pos_ &&
                 (text_[end - 1] == 'e' || text_[end - 1] == 'E')))
                ++end;
            else
                break;
        }
        double v;
        try {
            v = parse_double(text_.substr(pos_, end - pos_));
        } catch (const ValidationError&) {
            fail("malformed number");
        }
        pos_ = end;
        if (pos_ < text_.size() && text_[pos_] == 'i') {
            ++pos_;
            return Val(Complex(0.0, v));
        }
        return Val(Complex(v, 0.0));
    }

    Val builder() {
        std::size_t end = pos_;
        while (end < text_.size() &&
               (std::isalnum(static_cast<unsigned char>(text_[end])) || text_[end] == '_'))
            ++end;
        const std::string name(text_.substr(pos_, end - pos_));
        pos_ = end;

        std::vector<Val> args;
        skip();
        if (pos_ < text_.size() && text_[pos_] == '(') {
            ++pos_;
            skip();
            if (pos_ < text_.size() && text_[pos_] != ')') {
                args.push_back(expr());
                while (consume(',')) args.push_back(expr());
            }
            if (!consume(')')) fail("missing ')' after arguments of " + name);
        }
        return dispatch(name, args);
    }

    Index int_arg(const std::string& name, const std::vector<Val>& args, std::size_t i) const {
        if (i >= args.size()) fail(name + ": missing argument " + std::to_string(i + 1));
        const auto* s = std::get_if<Complex>(&args[i]);
        if (!s || s->imag() != 0.0 || s->real() != std::floor(s->real()))
            fail(name + ": argument " + std::to_string(i + 1) + " must be an integer");
        return Index(s->real());
    }

    Val dispatch(const std::string& name, const std::vector<Val>& args) const {
        auto arity = [&](std::size_t n) {
            if (args.size() != n)
                fail(name + ": expected " + std::to_string(n) + " arguments, got " +
                     std::to_string(args.size()));
        };
        if (name == "pauli_x") { arity(0); return Val(pauli_x()); }
        if (name == "pauli_y") { arity(0); return Val(pauli_y()); }
        if (name == "pauli_z") { arity(0); return Val(pauli_z()); }
        if (name == "sigma_minus") { arity(0); return Val(sigma_minus()); }
        if (name == "sigma_plus") { arity(0); return Val(sigma_plus()); }
        if (name == "identity") { arity(1); return Val(identity_op(int_arg(name, args, 0))); }
        if (name == "zero") { arity(1); return Val(zero_op(int_arg(name, args, 0))); }
        if (name == "annihilation") { arity(1); return Val(annihilation(int_arg(name, args, 0))); }
        if (name == "creation") { arity(1); return Val(creation(int_arg(name, args, 0))); }
        if (name == "number") { arity(1); return Val(number_op(int_arg(name, args, 0))); }
        if (name == "projector") {
            arity(2);
            return Val(projector(int_arg(name, args, 0), int_arg(name, args, 1)));
        }
        if (name == "ketbra") {
            arity(3);
            return Val(ketbra(int_arg(name, args, 0), int_arg(name, args, 1),
                              int_arg(name, args, 2)));
        }
        if (name == "basis") {
            arity(2);
            return Val(Matrix(basis_vector(int_arg(name, args, 0), int_arg(name, args, 1))));
        }
        if (name == "kron") {
            if (args.size() < 2) fail("kron: needs at least two operands");
            Matrix acc = mat(name, args, 0);
            for (std::size_t i = 1; i < args.size(); ++i) acc = oqs::kron(acc, mat(name, args, i));
            return Val(std::move(acc));
        }
        fail("unknown builder '" + name + "'");
    }

    Matrix mat(const std::string& name, const std::vector<Val>& args, std::size_t i) const {
        const auto* m = std::get_if<Matrix>(&args[i]);
        if (!m) fail(name + ": argument " + std::to_string(i + 1) + " must be an operator");
        return *m;
    }

    Val add(const Val& a, const Val& b, double sign) const {
        if (std::holds_alternative<Complex>(a) && std::holds_alternative<Complex>(b))
            return Val(std::get<Complex>(a) + sign * std::get<Complex>(b));
        if (std::holds_alternative<Matrix>(a) && std::holds_alternative<Matrix>(b)) {
            const Matrix& ma = std::get<Matrix>(a);
            const Matrix& mb = std::get<Matrix>(b);
            if (ma.rows() != mb.rows() || ma.cols() != mb.cols())
                fail("operator sum with mismatched dimensions");
            return Val(Matrix(ma + sign * mb));
        }
        fail("cannot add scalars and operators");
    }

    Val mul(const Val& a, const Val& b) const {
        if (std::holds_alternative<Complex>(a) && std::holds_alternative<Complex>(b))
            return Val(std::get<Complex>(a) * std::get<Complex>(b));
        if (std::holds_alternative<Complex>(a))
            return Val(Matrix(std::get<Complex>(a) * std::get<Matrix>(b)));
        if (std::holds_alternative<Complex>(b))
            return Val(Matrix(std::get<Matrix>(a) * std::get<Complex>(b)));
        const Matrix& ma = std::get<Matrix>(a);
        const Matrix& mb = std::get<Matrix>(b);
        if (ma.cols() != mb.rows()) fail("operator product with mismatched dimensions");
        return Val(Matrix(ma * mb));
    }

    std::string_view text_;
    std::size_t pos_ = 0;
};

} // namespace detail

inline Matrix parse_operator_expr(const std::string& text) {
    auto v = detail::ExprParser(text).parse();
    if (const auto* m = std::get_if<Matrix>(&v)) return *m;
    throw ValidationError("operator expression '" + text + "' evaluates to a scalar");
}

// ---------------------------------------------------------------------------
// Literals: row-major nested arrays of [re, im] pairs.
// ---------------------------------------------------------------------------

inline Complex complex_from_value(const ConfigValue& v, const std::string& what) {
    const auto& pair = v.as_array(what);
    if (pair.size() != 2)
        throw ValidationError(what + ": complex entries are [re, im] pairs");
    return Complex(pair[0].as_number(what + " re"), pair[1].as_number(what + " im"));
}

inline Matrix matrix_from_value(const ConfigValue& v, const std::string& what) {
    if (v.is_string()) return parse_operator_expr(v.as_string(what));
    const auto& rows = v.as_array(what);
    if (rows.empty()) throw ValidationError(what + ": empty matrix literal");
    const auto& first_row = rows[0].as_array(what + " row");
    Matrix m(Index(rows.size()), Index(first_row.size()));
    for (std::size_t i = 0; i < rows.size(); ++i) {
        const auto& row = rows[i].as_array(what + " row");
        if (row.size() != first_row.size())
            throw ValidationError(what + ": ragged matrix literal");
        for (std::size_t j = 0; j < row.size(); ++j)
            m(Index(i), Index(j)) =
                complex_from_value(row[j], what + "[" + std::to_string(i) + "][" +
                                               std::to_string(j) + "]");
    }
    return m;
}

inline Vector vector_from_value(const ConfigValue& v, const std::string& what) {
    if (v.is_string()) {
        const Matrix m = parse_operator_expr(v.as_string(what));
        if (m.cols() != 1)
            throw ValidationError(what + ": expression must evaluate to a column vector");
        return m.col(0);
    }
    const auto& entries = v.as_array(what);
    Vector out(Index(entries.size()));
    for (std::size_t i = 0; i < entries.size(); ++i)
        out(Index(i)) = complex_from_value(entries[i], what + "[" + std::to_string(i) + "]");
    return out;
}

inline std::string matrix_to_literal(const Matrix& m) {
    std::string out = "[";
    for (Index i = 0; i < m.rows(); ++i) {
        out += (i == 0) ? "[" : " [";
        for (Index j = 0; j < m.cols(); ++j) {
            out += "[" + format_double(m(i, j).real()) + ", " + format_double(m(i, j).imag()) +
                   "]";
            if (j + 1 < m.cols()) out += ", ";
        }
        out += "]";
        if (i + 1 < m.rows()) out += ",";
    }
    return out + "]";
}

inline std::string vector_to_literal(const Vector& v) {
    std::string out = "[";
    for (Index i = 0; i < v.size(); ++i) {
        out += "[" + format_double(v(i).real()) + ", " + format_double(v(i).imag()) + "]";
        if (i + 1 < v.size()) out += ", ";
    }
    return out + "]";
}

// ---------------------------------------------------------------------------
// Scalar profiles "name(p1, p2, ...)"
// ---------------------------------------------------------------------------

inline ScalarProfile parse_scalar_profile(const std::string& text) {
    const auto open = text.find('(');
    const auto close = text.rfind(')');
    if (open == std::string::npos || close == std::string::npos || close < open)
        throw ValidationError("scalar profile '" + text + "': expected name(args)");
    const std::string name(trim(std::string_view(text).substr(0, open)));
    std::vector<double> params;
    const auto body = trim(std::string_view(text).substr(open + 1, close - open - 1));
    if (!body.empty())
        for (const auto piece : split(body, ','))
            params.push_back(parse_double(trim(piece)));
    return ScalarProfile(name, params);
}

inline std::string scalar_profile_to_string(const ScalarProfile& p) {
    std::string out = p.name() + "(";
    for (std::size_t i = 0; i < p.params().size(); ++i) {
        out += format_double(p.params()[i]);
        if (i + 1 < p.params().size()) out += ", ";
    }
    return out + ")";
}

// ---------------------------------------------------------------------------
// Time-indexed operators from config values
// ---------------------------------------------------------------------------

inline TimeIndexedOperator time_indexed_from_value(const ConfigValue& v, const std::string& what) {
    if (v.is_string() || v.is_array())
        return TimeIndexedOperator::constant(matrix_from_value(v, what));
    const auto& t = v.as_table(what);
    if (auto it = t.find("constant"); it != t.end())
        return TimeIndexedOperator::constant(matrix_from_value(it->second, what + ".constant"));
    if (auto it = t.find("profile"); it != t.end()) {
        const auto& p = it->second.as_table(what + ".profile");
        auto mit = p.find("matrix");
        auto sit = p.find("scalar");
        if (mit == p.end() || sit == p.end())
            throw ValidationError(what + ".profile: needs 'matrix' and 'scalar'");
        return TimeIndexedOperator::profile(
            matrix_from_value(mit->second, what + ".profile.matrix"),
            parse_scalar_profile(sit->second.as_string(what + ".profile.scalar")));
    }
    if (auto it = t.find("table"); it != t.end()) {
        const auto& p = it->second.as_table(what + ".table");
        auto tit = p.find("times");
        auto mit = p.find("matrices");
        if (tit == p.end() || mit == p.end())
            throw ValidationError(what + ".table: needs 'times' and 'matrices'");
        std::vector<double> times;
        for (const auto& x : tit->second.as_array(what + ".table.times"))
            times.push_back(x.as_number(what + ".table.times entry"));
        std::vector<Matrix> mats;
        for (const auto& x : mit->second.as_array(what + ".table.matrices"))
            mats.push_back(matrix_from_value(x, what + ".table.matrices entry"));
        return TimeIndexedOperator::table(std::move(times), std::move(mats));
    }
    throw ValidationError(what + ": expected 'constant', 'profile', or 'table'");
}

inline std::string time_indexed_to_string(const TimeIndexedOperator& op) {
    if (op.is_constant()) return "{ constant = " + matrix_to_literal(op.base_matrix()) + " }";
    if (op.is_profile())
        return "{ profile = { matrix = " + matrix_to_literal(op.base_matrix()) +
               ", scalar = \"" + scalar_profile_to_string(op.scalar()) + "\" } }";
    std::string out = "{ table = { times = [";
    const auto& times = op.table_times();
    for (std::size_t i = 0; i < times.size(); ++i) {
        out += format_double(times[i]);
        if (i + 1 < times.size()) out += ", ";
    }
    out += "], matrices = [";
    const auto& mats = op.table_values();
    for (std::size_t i = 0; i < mats.size(); ++i) {
        out += matrix_to_literal(mats[i]);
        if (i + 1 < mats.size()) out += ", ";
    }
    return out + "] } }";
}

// ---------------------------------------------------------------------------
// Models
// ---------------------------------------------------------------------------

struct ParsedModel {
    std::variant<std::monostate, TotalSystemModel, LindbladModel, TimeLocalModel, ProbeModel>
        model;
    std::optional<Vector> psi0;
    std::optional<Matrix> rho0;
    std::string kind; // total_system | lindblad | timelocal | probe
    std::vector<std::string> warnings;

    const TotalSystemModel& total_system() const {
        if (const auto* m = std::get_if<TotalSystemModel>(&model)) return *m;
        throw ValidationError("model is not a [total_system] model");
    }
    const LindbladModel& lindblad() const {
        if (const auto* m = std::get_if<LindbladModel>(&model)) return *m;
        throw ValidationError("model is not a [lindblad] model");
    }
    const TimeLocalModel& timelocal() const {
        if (const auto* m = std::get_if<TimeLocalModel>(&model)) return *m;
        throw ValidationError("model is not a [timelocal] model");
    }
    const ProbeModel& probe() const {
        if (const auto* m = std::get_if<ProbeModel>(&model)) return *m;
        throw ValidationError("model is not a [probe] model");
    }
};

namespace detail {

inline const ConfigValue& require_key(const ConfigValue::Table& t, const std::string& key,
                                      const std::string& where) {
    auto it = t.find(key);
    if (it == t.end())
        throw ValidationError(where + ": missing required key '" + key + "'");
    return it->second;
}

inline TotalSystemModel parse_total_system(const ConfigFile& cfg) {
    const auto& s = cfg.section("total_system");
    HermitianOperator h_s(matrix_from_value(require_key(s, "h_s", "[total_system]"),
                                            "[total_system].h_s"));
    HermitianOperator h_b(matrix_from_value(require_key(s, "h_b", "[total_system]"),
                                            "[total_system].h_b"));
    HermitianOperator h_i(matrix_from_value(require_key(s, "h_i", "[total_system]"),
                                            "[total_system].h_i"));
    const double alpha = require_key(s, "alpha", "[total_system]").as_number(
        "[total_system].alpha");

    const auto& rb = require_key(s, "rho_b", "[total_system]");
    DensityMatrix rho_b = [&]() {
        if (rb.is_string()) {
            const std::string& kind = rb.as_string("[total_system].rho_b");
            if (kind == "ground") return bath_ground_state(h_b.dim());
            if (kind.rfind("gibbs(", 0) == 0 && kind.back() == ')') {
                const double beta = parse_double(
                    trim(std::string_view(kind).substr(6, kind.size() - 7)));
                return gibbs_state(h_b, beta);
            }
        }
        return DensityMatrix(matrix_from_value(rb, "[total_system].rho_b"));
    }();
    return TotalSystemModel(std::move(h_s), std::move(h_b), std::move(h_i), alpha,
                            std::move(rho_b));
}

inline LindbladModel parse_lindblad(const ConfigFile& cfg) {
    const auto& s = cfg.section("lindblad");
    HermitianOperator h(matrix_from_value(require_key(s, "h", "[lindblad]"), "[lindblad].h"));
    std::vector<DecayChannel> channels;
    for (std::size_t i = 0; i < cfg.block_list("channel").size(); ++i) {
        const auto& ch = cfg.block_list("channel")[i];
        const std::string where = "[[channel]] #" + std::to_string(i + 1);
        channels.push_back({require_key(ch, "gamma", where).as_number(where + ".gamma"),
                            matrix_from_value(require_key(ch, "a", where), where + ".a")});
    }
    return LindbladModel(std::move(h), std::move(channels));
}

inline TimeLocalModel parse_timelocal(const ConfigFile& cfg) {
    const auto& s = cfg.section("timelocal");
    TimeIndexedOperator a =
        time_indexed_from_value(require_key(s, "a", "[timelocal]"), "[timelocal].a");
    TimeIndexedOperator b =
        time_indexed_from_value(require_key(s, "b", "[timelocal]"), "[timelocal].b");
    std::vector<TimeLocalChannel> channels;
    for (std::size_t i = 0; i < cfg.block_list("tl_channel").size(); ++i) {
        const auto& ch = cfg.block_list("tl_channel")[i];
        const std::string where = "[[tl_channel]] #" + std::to_string(i + 1);
        channels.push_back(
            {time_indexed_from_value(require_key(ch, "c", where), where + ".c"),
             time_indexed_from_value(require_key(ch, "d", where), where + ".d")});
    }
    double t_min = -std::numeric_limits<double>::infinity();
    double t_max = std::numeric_limits<double>::infinity();
    if (auto it = s.find("t_min"); it != s.end()) t_min = it->second.as_number("t_min");
    if (auto it = s.find("t_max"); it != s.end()) t_max = it->second.as_number("t_max");
    return TimeLocalModel(std::move(a), std::move(b), std::move(channels), t_min, t_max);
}

inline ProbeModel parse_probe(const ConfigFile& cfg) {
    const auto& s = cfg.section("probe");
    const auto& uval = require_key(s, "u", "[probe]");

    // u = "from_total(tau)" builds the probe from the [total_system] section
    if (uval.is_string()) {
        const std::string& text = uval.as_string("[probe].u");
        if (text.rfind("from_total(", 0) == 0 && text.back() == ')') {
            const double tau =
                parse_double(trim(std::string_view(text).substr(11, text.size() - 12)));
            std::vector<double> r_values;
            if (auto it = s.find("r_values"); it != s.end())
                for (const auto& x : it->second.as_array("[probe].r_values"))
                    r_values.push_back(x.as_number("[probe].r_values entry"));
            return probe_from_total_model(parse_total_system(cfg), tau, std::move(r_values));
        }
    }

    std::vector<ProbeEnsembleMember> ensemble;
    for (const auto& e : require_key(s, "ensemble", "[probe]").as_array("[probe].ensemble")) {
        const auto& t = e.as_table("[probe].ensemble entry");
        ensemble.push_back(
            {require_key(t, "p", "[probe].ensemble").as_number("[probe].ensemble.p"),
             vector_from_value(require_key(t, "phi", "[probe].ensemble"),
                               "[probe].ensemble.phi")});
    }
    std::vector<Vector> r_basis;
    for (const auto& e : require_key(s, "r_basis", "[probe]").as_array("[probe].r_basis"))
        r_basis.push_back(vector_from_value(e, "[probe].r_basis entry"));
    std::vector<double> r_values;
    for (const auto& e : require_key(s, "r_values", "[probe]").as_array("[probe].r_values"))
        r_values.push_back(e.as_number("[probe].r_values entry"));
    return ProbeModel(std::move(ensemble), std::move(r_basis), std::move(r_values),
                      matrix_from_value(uval, "[probe].u"));
}

} // namespace detail

inline ParsedModel parse_model_text(const std::string& text,
                                    const std::string& origin = "<model>") {
    const ConfigFile cfg = parse_config(text, origin);
    ParsedModel out;
    if (cfg.has_section("probe")) {
        out.model = detail::parse_probe(cfg);
        out.kind = "probe";
    } else if (cfg.has_section("total_system")) {
        out.model = detail::parse_total_system(cfg);
        out.kind = "total_system";
    } else if (cfg.has_section("lindblad")) {
        out.model = detail::parse_lindblad(cfg);
        out.kind = "lindblad";
    } else if (cfg.has_section("timelocal")) {
        out.model = detail::parse_timelocal(cfg);
        out.kind = "timelocal";
        // trace-preservation witness (warning only; the generator is free-form)
        const auto& m = std::get<TimeLocalModel>(out.model);
        const double lo = std::isfinite(m.t_min()) ? m.t_min() : 0.0;
        const double span = std::isfinite(m.t_max()) ? std::min(m.t_max() - lo, 10.0) : 10.0;
        std::vector<double> ts;
        for (int k = 0; k <= 4; ++k) ts.push_back(lo + span * k / 4.0);
        const double witness = trace_preservation_residual(m, ts);
        if (witness > 1e-8)
            out.warnings.push_back("trace-preservation witness residual " +
                                   format_double(witness) +
                                   " exceeds 1e-8; the generator does not preserve tr(rho)");
    } else {
        throw ValidationError(origin +
                              ": no model section found (expected [total_system], [lindblad], "
                              "[timelocal], or [probe])");
    }

    if (auto it = cfg.root.find("psi0"); it != cfg.root.end())
        out.psi0 = vector_from_value(it->second, "psi0");
    if (auto it = cfg.root.find("rho0"); it != cfg.root.end())
        out.rho0 = matrix_from_value(it->second, "rho0");
    return out;
}

inline ParsedModel parse_model_file(const std::string& path) {
    std::ifstream in(path);
    if (!in)
        throw ValidationError("cannot open model file '" + path + "'");
    std::ostringstream ss;
    ss << in.rdbuf();
    return parse_model_text(ss.str(), path);
}

inline std::string serialize_model(const ParsedModel& pm) {
    std::ostringstream out;
    if (pm.psi0) out << "psi0 = " << vector_to_literal(*pm.psi0) << "\n";
    if (pm.rho0) out << "rho0 = " << matrix_to_literal(*pm.rho0) << "\n";
    if (pm.psi0 || pm.rho0) out << "\n";

    if (pm.kind == "lindblad") {
        const auto& m = pm.lindblad();
        out << "[lindblad]\n";
        out << "h = " << matrix_to_literal(m.h().matrix()) << "\n";
        for (const auto& ch : m.channels()) {
            out << "\n[[channel]]\n";
            out << "gamma = " << format_double(ch.gamma) << "\n";
            out << "a = " << matrix_to_literal(ch.a) << "\n";
        }
    } else if (pm.kind == "total_system") {
        const auto& m = pm.total_system();
        out << "[total_system]\n";
        out << "h_s = " << matrix_to_literal(m.h_s().matrix()) << "\n";
        out << "h_b = " << matrix_to_literal(m.h_b().matrix()) << "\n";
        out << "h_i = " << matrix_to_literal(m.h_i().matrix()) << "\n";
        out << "alpha = " << format_double(m.alpha()) << "\n";
        out << "rho_b = " << matrix_to_literal(m.rho_b().matrix()) << "\n";
    } else if (pm.kind == "timelocal") {
        const auto& m = pm.timelocal();
        out << "[timelocal]\n";
        if (std::isfinite(m.t_min())) out << "t_min = " << format_double(m.t_min()) << "\n";
        if (std::isfinite(m.t_max())) out << "t_max = " << format_double(m.t_max()) << "\n";
        out << "a = " << time_indexed_to_string(m.a()) << "\n";
        out << "b = " << time_indexed_to_string(m.b()) << "\n";
        for (const auto& ch : m.channels()) {
            out << "\n[[tl_channel]]\n";
            out << "c = " << time_indexed_to_string(ch.c) << "\n";
            out << "d = " << time_indexed_to_string(ch.d) << "\n";
        }
    } else if (pm.kind == "probe") {
        const auto& m = pm.probe();
        out << "[probe]\n";
        out << "u = " << matrix_to_literal(m.u()) << "\n";
        out << "ensemble = [";
        for (std::size_t i = 0; i < m.ensemble().size(); ++i) {
            out << (i ? ", " : "") << "{ p = " << format_double(m.ensemble()[i].p)
                << ", phi = " << vector_to_literal(m.ensemble()[i].phi) << " }";
        }
        out << "]\n";
        out << "r_basis = [";
        for (std::size_t i = 0; i < m.r_eigenbasis().size(); ++i)
            out << (i ? ", " : "") << vector_to_literal(m.r_eigenbasis()[i]);
        out << "]\n";
        out << "r_values = [";
        for (std::size_t i = 0; i < m.r_values().size(); ++i)
            out << (i ? ", " : "") << format_double(m.r_values()[i]);
        out << "]\n";
    } else {
        throw Error("serialize_model: unknown kind '" + pm.kind + "'");
    }
    return out.str();
}

} // namespace oqs
