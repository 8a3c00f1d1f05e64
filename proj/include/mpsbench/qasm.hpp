// Copyright 2026 The mpsbench Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.
#pragma once

#include <algorithm>
#include <array>
#include <cctype>
#include <charconv>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <numbers>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace mpsbench {

inline constexpr double kFourPi = 4.0 * std::numbers::pi;
inline constexpr double kDefaultAngleEps = 1e-10;

enum class GateKind : std::uint8_t { U, CX, Barrier, Measure };

/// One instruction of the U/CX gate set.
///
/// `params` holds (theta, phi, lambda) and is only meaningful for U.
/// `qubits[1]` is the CX target. Barriers carry no qubits and fence the
/// full register.
struct Gate {
    GateKind kind = GateKind::U;
    std::array<double, 3> params{};
    std::array<std::uint32_t, 2> qubits{};
    std::uint32_t cbit = 0;

    static Gate u(std::uint32_t q, double theta, double phi, double lambda) {
        return Gate{GateKind::U, {theta, phi, lambda}, {q, 0}, 0};
    }
    static Gate cx(std::uint32_t control, std::uint32_t target) {
        return Gate{GateKind::CX, {}, {control, target}, 0};
    }
    static Gate barrier() { return Gate{GateKind::Barrier, {}, {}, 0}; }
    static Gate measure(std::uint32_t q, std::uint32_t c) {
        return Gate{GateKind::Measure, {}, {q, 0}, c};
    }

    std::size_t arity() const {
        switch (kind) {
        case GateKind::U:
        case GateKind::Measure:
            return 1;
        case GateKind::CX:
            return 2;
        case GateKind::Barrier:
            return 0;
        }
        return 0;
    }

    bool operator==(const Gate &) const = default;
};

struct Circuit {
    std::size_t n_qubits = 0;
    std::size_t n_clbits = 0;
    std::vector<Gate> gates;
    std::string name;
    std::optional<std::uint64_t> seed;

    bool operator==(const Circuit &) const = default;

    /// Throws std::invalid_argument if an index or parameter is out of range.
    void validate() const {
        if (n_qubits == 0) {
            throw std::invalid_argument("circuit has no qubits");
        }
        for (const Gate &g : gates) {
            switch (g.kind) {
            case GateKind::U:
                if (g.qubits[0] >= n_qubits) {
                    throw std::invalid_argument("u: qubit index out of range");
                }
                for (double p : g.params) {
                    if (!std::isfinite(p)) {
                        throw std::invalid_argument("u: non-finite angle");
                    }
                }
                break;
            case GateKind::CX:
                if (g.qubits[0] >= n_qubits || g.qubits[1] >= n_qubits) {
                    throw std::invalid_argument("cx: qubit index out of range");
                }
                if (g.qubits[0] == g.qubits[1]) {
                    throw std::invalid_argument("cx: control equals target");
                }
                break;
            case GateKind::Measure:
                if (g.qubits[0] >= n_qubits || g.cbit >= n_clbits) {
                    throw std::invalid_argument("measure: index out of range");
                }
                break;
            case GateKind::Barrier:
                break;
            }
        }
    }

    std::size_t count(GateKind kind) const {
        std::size_t c = 0;
        for (const Gate &g : gates) {
            c += g.kind == kind ? 1 : 0;
        }
        return c;
    }
};

/// Parse failure carrying a 1-based source position.
class QasmError : public std::runtime_error {
  public:
    enum class Kind { Syntax, Unsupported, Redeclaration, OutOfRange };

    QasmError(Kind kind, std::size_t line, std::size_t column, const std::string &what)
        : std::runtime_error(std::to_string(line) + ":" + std::to_string(column) + ": " + what),
          kind_(kind), line_(line), column_(column) {}

    Kind kind() const { return kind_; }
    std::size_t line() const { return line_; }
    std::size_t column() const { return column_; }

  private:
    Kind kind_;
    std::size_t line_;
    std::size_t column_;
};

/// Reduces an angle into [0, 4*pi).
inline double normalize_angle(double a) {
    double r = std::fmod(a, kFourPi);
    if (r < 0.0) {
        r += kFourPi;
    }
    if (r >= kFourPi) {
        r = 0.0;
    }
    return r + 0.0; // drops a negative zero
}

namespace detail {

class QasmParser {
  public:
    explicit QasmParser(std::string_view text) : src_(text) {}

    Circuit parse() {
        skip_trivia();
        expect_keyword("OPENQASM");
        skip_trivia();
        const auto version_pos = here();
        const std::string version = read_number_text();
        if (version != "2.0" && version != "2") {
            fail(QasmError::Kind::Unsupported, version_pos, "only OPENQASM 2.0 is supported");
        }
        expect(';');

        while (true) {
            skip_trivia();
            if (at_end()) {
                break;
            }
            statement();
        }
        if (!qreg_) {
            fail(QasmError::Kind::Syntax, here(), "no qreg declared");
        }
        circuit_.n_qubits = qreg_->size;
        circuit_.n_clbits = creg_ ? creg_->size : 0;
        return std::move(circuit_);
    }

  private:
    struct Pos {
        std::size_t line, col;
    };
    struct Register {
        std::string name;
        std::size_t size;
    };
    struct Operand {
        std::size_t index;
        bool whole; // bare register name
        Pos pos;
    };

    std::string_view src_;
    std::size_t i_ = 0;
    std::size_t line_ = 1;
    std::size_t col_ = 1;
    std::optional<Register> qreg_;
    std::optional<Register> creg_;
    Circuit circuit_;

    Pos here() const { return {line_, col_}; }
    bool at_end() const { return i_ >= src_.size(); }
    char peek() const { return at_end() ? '\0' : src_[i_]; }

    void advance() {
        if (src_[i_] == '\n') {
            ++line_;
            col_ = 1;
        } else {
            ++col_;
        }
        ++i_;
    }

    [[noreturn]] void fail(QasmError::Kind kind, Pos p, const std::string &msg) const {
        throw QasmError(kind, p.line, p.col, msg);
    }

    // Whitespace and // comments. Comments of the form `// name: x` and
    // `// seed: N` written by serialize_qasm restore circuit metadata.
    void skip_trivia() {
        while (!at_end()) {
            const char c = peek();
            if (c == ' ' || c == '\t' || c == '\r' || c == '\n') {
                advance();
            } else if (c == '/' && i_ + 1 < src_.size() && src_[i_ + 1] == '/') {
                const std::size_t start = i_ + 2;
                while (!at_end() && peek() != '\n') {
                    advance();
                }
                metadata_comment(src_.substr(start, i_ - start));
            } else {
                break;
            }
        }
    }

    void metadata_comment(std::string_view body) {
        auto trim = [](std::string_view s) {
            while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) {
                s.remove_prefix(1);
            }
            while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) {
                s.remove_suffix(1);
            }
            return s;
        };
        body = trim(body);
        if (body.starts_with("name:")) {
            circuit_.name = std::string(trim(body.substr(5)));
        } else if (body.starts_with("seed:")) {
            const auto v = trim(body.substr(5));
            std::uint64_t seed = 0;
            const auto res = std::from_chars(v.data(), v.data() + v.size(), seed);
            if (res.ec == std::errc() && res.ptr == v.data() + v.size()) {
                circuit_.seed = seed;
            }
        }
    }

    void skip_ws() {
        while (!at_end() && (peek() == ' ' || peek() == '\t' || peek() == '\r' || peek() == '\n')) {
            advance();
        }
        if (!at_end() && peek() == '/' && i_ + 1 < src_.size() && src_[i_ + 1] == '/') {
            skip_trivia();
        }
    }

    std::string read_identifier() {
        skip_ws();
        const Pos p = here();
        if (at_end() || !(std::isalpha(static_cast<unsigned char>(peek())) || peek() == '_')) {
            fail(QasmError::Kind::Syntax, p, "expected identifier");
        }
        std::string out;
        while (!at_end() && (std::isalnum(static_cast<unsigned char>(peek())) || peek() == '_')) {
            out.push_back(peek());
            advance();
        }
        return out;
    }

    std::string read_number_text() {
        skip_ws();
        std::string out;
        while (!at_end()) {
            const char c = peek();
            const bool exp_sign = (c == '+' || c == '-') && !out.empty() &&
                                  (out.back() == 'e' || out.back() == 'E');
            if (std::isdigit(static_cast<unsigned char>(c)) || c == '.' || c == 'e' || c == 'E' ||
                exp_sign) {
                out.push_back(c);
                advance();
            } else {
                break;
            }
        }
        if (out.empty()) {
            fail(QasmError::Kind::Syntax, here(), "expected number");
        }
        return out;
    }

    void expect(char c) {
        skip_ws();
        if (peek() != c) {
            fail(QasmError::Kind::Syntax, here(), std::string("expected '") + c + "'");
        }
        advance();
    }

    bool accept(char c) {
        skip_ws();
        if (peek() == c) {
            advance();
            return true;
        }
        return false;
    }

    void expect_keyword(std::string_view kw) {
        const Pos p = here();
        const std::string id = read_identifier();
        if (id != kw) {
            fail(QasmError::Kind::Syntax, p, "expected '" + std::string(kw) + "'");
        }
    }

    std::size_t read_index() {
        skip_ws();
        const Pos p = here();
        const std::string digits = read_number_text();
        std::size_t v = 0;
        const auto res = std::from_chars(digits.data(), digits.data() + digits.size(), v);
        if (res.ec != std::errc() || res.ptr != digits.data() + digits.size()) {
            fail(QasmError::Kind::Syntax, p, "expected integer index");
        }
        return v;
    }

    // Angle expressions: pi, literals, + - * /, unary minus, parentheses.
    double expression() {
        double v = term();
        while (true) {
            if (accept('+')) {
                v += term();
            } else if (accept('-')) {
                v -= term();
            } else {
                return v;
            }
        }
    }

    double term() {
        double v = unary();
        while (true) {
            if (accept('*')) {
                v *= unary();
            } else if (accept('/')) {
                v /= unary();
            } else {
                return v;
            }
        }
    }

    double unary() {
        if (accept('-')) {
            return -unary();
        }
        if (accept('+')) {
            return unary();
        }
        return primary();
    }

    double primary() {
        skip_ws();
        const Pos p = here();
        if (accept('(')) {
            const double v = expression();
            expect(')');
            return v;
        }
        if (std::isalpha(static_cast<unsigned char>(peek()))) {
            const std::string id = read_identifier();
            if (id == "pi") {
                return std::numbers::pi;
            }
            fail(QasmError::Kind::Syntax, p, "unknown symbol '" + id + "' in expression");
        }
        const std::string text = read_number_text();
        double v = 0.0;
        const auto res = std::from_chars(text.data(), text.data() + text.size(), v);
        if (res.ec != std::errc() || res.ptr != text.data() + text.size()) {
            fail(QasmError::Kind::Syntax, p, "malformed number '" + text + "'");
        }
        return v;
    }

    Operand operand(const std::optional<Register> &reg, const char *what) {
        skip_ws();
        const Pos p = here();
        const std::string name = read_identifier();
        if (!reg || reg->name != name) {
            fail(QasmError::Kind::Syntax, p, std::string("unknown ") + what + " register '" + name + "'");
        }
        if (accept('[')) {
            const Pos ip = here();
            const std::size_t idx = read_index();
            expect(']');
            if (idx >= reg->size) {
                fail(QasmError::Kind::OutOfRange, ip,
                     "index " + std::to_string(idx) + " out of range for " + name + "[" +
                         std::to_string(reg->size) + "]");
            }
            return {idx, false, p};
        }
        return {0, true, p};
    }

    void declare(std::optional<Register> &slot, Pos p, const char *what) {
        if (slot) {
            fail(QasmError::Kind::Redeclaration, p, std::string(what) + " already declared");
        }
        const std::string name = read_identifier();
        expect('[');
        const std::size_t size = read_index();
        expect(']');
        expect(';');
        if (size == 0) {
            fail(QasmError::Kind::Syntax, p, std::string(what) + " must have positive size");
        }
        slot = Register{name, size};
    }

    void statement() {
        const Pos p = here();
        const std::string kw = read_identifier();
        if (kw == "include") {
            skip_ws();
            expect('"');
            while (!at_end() && peek() != '"') {
                advance();
            }
            expect('"');
            expect(';');
        } else if (kw == "qreg") {
            declare(qreg_, p, "qreg");
        } else if (kw == "creg") {
            declare(creg_, p, "creg");
        } else if (kw == "u" || kw == "U") {
            expect('(');
            std::array<double, 3> a{};
            for (int k = 0; k < 3; ++k) {
                if (k > 0) {
                    expect(',');
                }
                a[k] = expression();
            }
            expect(')');
            const Operand q = operand(qreg_, "quantum");
            expect(';');
            if (q.whole) {
                for (std::size_t i = 0; i < qreg_->size; ++i) {
                    circuit_.gates.push_back(Gate::u(static_cast<std::uint32_t>(i), a[0], a[1], a[2]));
                }
            } else {
                circuit_.gates.push_back(Gate::u(static_cast<std::uint32_t>(q.index), a[0], a[1], a[2]));
            }
        } else if (kw == "cx" || kw == "CX") {
            const Operand c = operand(qreg_, "quantum");
            expect(',');
            const Operand t = operand(qreg_, "quantum");
            expect(';');
            if (c.whole || t.whole) {
                fail(QasmError::Kind::Unsupported, p, "register-broadcast cx is not supported");
            }
            if (c.index == t.index) {
                fail(QasmError::Kind::Syntax, t.pos, "cx control and target coincide");
            }
            circuit_.gates.push_back(
                Gate::cx(static_cast<std::uint32_t>(c.index), static_cast<std::uint32_t>(t.index)));
        } else if (kw == "barrier") {
            operand(qreg_, "quantum");
            while (accept(',')) {
                operand(qreg_, "quantum");
            }
            expect(';');
            circuit_.gates.push_back(Gate::barrier());
        } else if (kw == "measure") {
            const Operand q = operand(qreg_, "quantum");
            skip_ws();
            expect('-');
            expect('>');
            const Operand c = operand(creg_, "classical");
            expect(';');
            if (q.whole != c.whole) {
                fail(QasmError::Kind::Syntax, p, "measure mixes register and bit operands");
            }
            if (q.whole) {
                if (qreg_->size > creg_->size) {
                    fail(QasmError::Kind::OutOfRange, c.pos, "classical register too small");
                }
                for (std::size_t i = 0; i < qreg_->size; ++i) {
                    circuit_.gates.push_back(
                        Gate::measure(static_cast<std::uint32_t>(i), static_cast<std::uint32_t>(i)));
                }
            } else {
                circuit_.gates.push_back(Gate::measure(static_cast<std::uint32_t>(q.index),
                                                       static_cast<std::uint32_t>(c.index)));
            }
        } else {
            fail(QasmError::Kind::Unsupported, p, "unsupported statement '" + kw + "'");
        }
    }
};

inline void append_angle(std::string &out, double a) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", a);
    out += buf;
}

} // namespace detail

/// Parses the u/cx/barrier/measure subset of OpenQASM 2.0.
inline Circuit parse_qasm(std::string_view text) { return detail::QasmParser(text).parse(); }

/// Emits text that parse_qasm maps back to an identical Circuit.
inline std::string serialize_qasm(const Circuit &c) {
    std::string out;
    out.reserve(64 + c.gates.size() * 24);
    out += "OPENQASM 2.0;\ninclude \"qelib1.inc\";\n";
    if (!c.name.empty()) {
        out += "// name: " + c.name + "\n";
    }
    if (c.seed) {
        out += "// seed: " + std::to_string(*c.seed) + "\n";
    }
    out += "qreg q[" + std::to_string(c.n_qubits) + "];\n";
    if (c.n_clbits > 0) {
        out += "creg c[" + std::to_string(c.n_clbits) + "];\n";
    }
    for (const Gate &g : c.gates) {
        switch (g.kind) {
        case GateKind::U:
            out += "u(";
            detail::append_angle(out, g.params[0]);
            out += ',';
            detail::append_angle(out, g.params[1]);
            out += ',';
            detail::append_angle(out, g.params[2]);
            out += ") q[" + std::to_string(g.qubits[0]) + "];\n";
            break;
        case GateKind::CX:
            out += "cx q[" + std::to_string(g.qubits[0]) + "],q[" + std::to_string(g.qubits[1]) + "];\n";
            break;
        case GateKind::Barrier:
            out += "barrier q;\n";
            break;
        case GateKind::Measure:
            out += "measure q[" + std::to_string(g.qubits[0]) + "] -> c[" + std::to_string(g.cbit) + "];\n";
            break;
        }
    }
    return out;
}

/// Reduces U angles into [0, 4*pi) and drops U gates whose three angles all
/// sit within `angle_eps` of 0 or 4*pi.
inline Circuit sanitize(const Circuit &c, double angle_eps = kDefaultAngleEps) {
    auto negligible = [angle_eps](double a) { return a <= angle_eps || kFourPi - a <= angle_eps; };
    Circuit out = c;
    out.gates.clear();
    out.gates.reserve(c.gates.size());
    for (Gate g : c.gates) {
        if (g.kind == GateKind::U) {
            for (double &p : g.params) {
                p = normalize_angle(p);
            }
            if (negligible(g.params[0]) && negligible(g.params[1]) && negligible(g.params[2])) {
                continue;
            }
        }
        out.gates.push_back(g);
    }
    return out;
}

inline Circuit strip_measures(const Circuit &c) {
    Circuit out = c;
    std::erase_if(out.gates, [](const Gate &g) { return g.kind == GateKind::Measure; });
    return out;
}

/// Reverses the gate order and conjugates each U; U(t,p,l)^-1 = U(-t,-l,-p).
inline Circuit invert(const Circuit &c) {
    Circuit out = c;
    out.gates.assign(c.gates.rbegin(), c.gates.rend());
    for (Gate &g : out.gates) {
        if (g.kind == GateKind::Measure) {
            throw std::invalid_argument("invert: circuit contains measurements");
        }
        if (g.kind == GateKind::U) {
            const auto [t, p, l] = g.params;
            g.params = {normalize_angle(-t), normalize_angle(-l), normalize_angle(-p)};
        }
    }
    return out;
}

/// Number of U/CX layers; barriers synchronize all qubits.
inline std::size_t circuit_depth(const Circuit &c) {
    std::vector<std::size_t> level(c.n_qubits, 0);
    std::size_t depth = 0;
    for (const Gate &g : c.gates) {
        switch (g.kind) {
        case GateKind::U:
            depth = std::max(depth, ++level[g.qubits[0]]);
            break;
        case GateKind::CX: {
            const std::size_t l = std::max(level[g.qubits[0]], level[g.qubits[1]]) + 1;
            level[g.qubits[0]] = level[g.qubits[1]] = l;
            depth = std::max(depth, l);
            break;
        }
        case GateKind::Barrier:
            std::fill(level.begin(), level.end(), depth);
            break;
        case GateKind::Measure:
            break;
        }
    }
    return depth;
}

} // namespace mpsbench
