#include "bellmax/fixtures.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <numbers>
#include <set>

#include "assets.hpp"

namespace bellmax {

namespace {

using KetTable = std::map<std::string, std::array<Complex, 2>, std::less<>>;

// Guards against transcription slips; printed values are rounded to 4-5 decimals.
constexpr double kBlochNormSlack = 1e-3;
constexpr double kExactNormSlack = 1e-9;
constexpr double kImaginarySlack = 1e-12;

class Cursor {
public:
    Cursor(std::string_view text, const Environment& env) : s_(text), env_(env) {}

    void skip_space() {
        while (pos_ < s_.size() && std::isspace(static_cast<unsigned char>(s_[pos_]))) ++pos_;
    }
    bool at_end() {
        skip_space();
        return pos_ >= s_.size();
    }
    char peek() {
        skip_space();
        return pos_ < s_.size() ? s_[pos_] : '\0';
    }
    bool accept(char c) {
        if (peek() != c) return false;
        ++pos_;
        return true;
    }
    void expect(char c) {
        if (!accept(c)) fail(std::string("expected '") + c + "'");
    }
    // Up to n raw characters at the cursor, consumed.
    std::string_view take(std::size_t n) {
        skip_space();
        const std::string_view out = s_.substr(pos_, n);
        pos_ += out.size();
        return out;
    }
    [[noreturn]] void fail(const std::string& what) const {
        throw FixtureError(what + " at position " + std::to_string(pos_) + " in '" + std::string(s_) + "'");
    }

    std::string_view peek_identifier() {
        skip_space();
        std::size_t end = pos_;
        while (end < s_.size() && (std::isalpha(static_cast<unsigned char>(s_[end])) || s_[end] == '_')) ++end;
        return s_.substr(pos_, end - pos_);
    }

    Complex expression() {
        Complex v = product();
        for (;;) {
            if (accept('+')) {
                v += product();
            } else if (accept('-')) {
                v -= product();
            } else {
                return v;
            }
        }
    }

    Complex product() {
        Complex v = unary();
        for (;;) {
            if (accept('*')) {
                v *= unary();
            } else if (accept('/')) {
                const Complex d = unary();
                if (d == Complex(0.0)) fail("division by zero");
                v /= d;
            } else {
                return v;
            }
        }
    }

    // Unary minus binds looser than ^: -a^b = -(a^b).
    Complex unary() {
        // 0 - v keeps a +0 imaginary part on the branch cuts
        if (accept('-')) return Complex(0.0) - unary();
        if (accept('+')) return unary();
        return power();
    }

    Complex power() {
        const Complex base = primary();
        if (accept('^')) return std::pow(base, unary());
        return base;
    }

    Complex primary() {
        if (accept('(')) {
            const Complex v = expression();
            expect(')');
            return v;
        }
        const char c = peek();
        if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') return number();
        const std::string_view name = peek_identifier();
        if (name.empty()) fail("expected a number, name or '('");
        pos_ += name.size();
        if (accept('(')) {
            const Complex arg = expression();
            expect(')');
            return call(name, arg);
        }
        if (name == "i") return {0.0, 1.0};
        if (name == "pi") return std::numbers::pi;
        if (auto it = env_.find(name); it != env_.end()) return it->second;
        pos_ -= name.size();
        fail("unknown name '" + std::string(name) + "'");
    }

    Complex number() {
        skip_space();
        std::size_t end = pos_;
        while (end < s_.size() && (std::isdigit(static_cast<unsigned char>(s_[end])) || s_[end] == '.')) ++end;
        double v = 0.0;
        const auto [ptr, ec] = std::from_chars(s_.data() + pos_, s_.data() + end, v);
        if (ec != std::errc() || ptr != s_.data() + end) fail("malformed number");
        pos_ = end;
        return v;
    }

    Complex call(std::string_view name, Complex arg) const {
        if (name == "sqrt") return std::sqrt(arg);
        if (name == "asin") return std::asin(arg);
        if (name == "acsc") {
            if (arg == Complex(0.0)) fail("acsc of zero");
            return std::asin(1.0 / arg);
        }
        fail("unknown function '" + std::string(name) + "'");
    }

    // Coefficient in front of a ket or Pauli letter: a product, or 1 when the
    // term starts directly with the basis element.
    Complex coefficient(bool basis_next) {
        if (basis_next) return 1.0;
        return product();
    }

    std::size_t pos_ = 0;

private:
    std::string_view s_;
    const Environment& env_;
};

double real_value(const Complex& v, std::string_view what) {
    if (std::abs(v.imag()) > kImaginarySlack * std::max(1.0, std::abs(v.real()))) {
        throw FixtureError(std::string(what) + " is not real");
    }
    return v.real();
}

Party party_from_letter(char c) {
    switch (c) {
        case 'A':
            return Party::A;
        case 'B':
            return Party::B;
        case 'C':
            return Party::C;
        default:
            throw FixtureError(std::string("unknown party '") + c + "'");
    }
}

void apply_local(CVector& psi, Party party, const Eigen::Matrix2cd& u) {
    const int shift = 2 - index_of(party);
    for (Eigen::Index k = 0; k < 8; ++k) {
        if ((k >> shift) & 1) continue;
        const Eigen::Index k1 = k | (Eigen::Index{1} << shift);
        const Complex a0 = psi(k), a1 = psi(k1);
        psi(k) = u(0, 0) * a0 + u(0, 1) * a1;
        psi(k1) = u(1, 0) * a0 + u(1, 1) * a1;
    }
}

struct Ket {
    CVector vector;
    std::vector<Party> parties;
};

Ket parse_ket(Cursor& cur, const KetTable& kets) {
    cur.expect('|');
    std::vector<std::array<Complex, 2>> qubits;
    while (cur.peek() != '>') {
        const char c = cur.peek();
        if (c == '\0') cur.fail("unterminated ket");
        if (c == '0' || c == '1') {
            cur.take(1);
            qubits.push_back(c == '0' ? std::array<Complex, 2>{1.0, 0.0} : std::array<Complex, 2>{0.0, 1.0});
            continue;
        }
        const std::string_view name = cur.take(2);
        auto it = kets.find(name);
        if (it == kets.end()) cur.fail("unknown ket '" + std::string(name) + "'");
        qubits.push_back(it->second);
    }
    cur.expect('>');
    Ket ket;
    if (cur.peek() == '_') {
        cur.take(1);
        const std::string_view letters = cur.peek_identifier();
        for (char c : letters) ket.parties.push_back(party_from_letter(c));
        cur.take(letters.size());
    } else {
        ket.parties.assign(kParties.begin(), kParties.end());
    }
    if (ket.parties.size() != qubits.size()) cur.fail("ket length does not match its parties");
    std::array<std::array<Complex, 2>, 3> factor{};
    for (auto& f : factor) f = {1.0, 0.0};
    std::set<Party> seen;
    for (std::size_t q = 0; q < qubits.size(); ++q) {
        if (!seen.insert(ket.parties[q]).second) cur.fail("party repeated in ket subscript");
        factor[static_cast<std::size_t>(index_of(ket.parties[q]))] = qubits[q];
    }
    ket.vector.resize(8);
    for (Eigen::Index k = 0; k < 8; ++k) {
        ket.vector(k) = factor[0][(k >> 2) & 1] * factor[1][(k >> 1) & 1] * factor[2][k & 1];
    }
    std::sort(ket.parties.begin(), ket.parties.end());
    return ket;
}

Eigen::Matrix2cd rotation(double theta) {
    Eigen::Matrix2cd r;
    r << std::cos(theta), -std::sin(theta), std::sin(theta), std::cos(theta);
    return r;
}

std::vector<std::string_view> split(std::string_view line, char sep) {
    std::vector<std::string_view> out;
    std::size_t start = 0;
    for (;;) {
        const std::size_t p = line.find(sep, start);
        out.push_back(line.substr(start, p == std::string_view::npos ? std::string_view::npos : p - start));
        if (p == std::string_view::npos) return out;
        start = p + 1;
    }
}

int parse_int(std::string_view s, std::string_view what) {
    int v = 0;
    const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc() || ptr != s.data() + s.size()) {
        throw FixtureError("bad " + std::string(what) + " '" + std::string(s) + "'");
    }
    return v;
}

double parse_real(std::string_view s) { return real_value(evaluate_expression(s), "value"); }

struct FixtureData {
    Environment constants;
    KetTable kets;
    std::map<int, Environment> coefficients;
    std::vector<FixtureRecord> records;
};

FixtureData load_fixture_data() {
    const std::string_view text = assets::fixtures_text;
    if (fnv1a64(text) != assets::fixtures_checksum) throw FixtureError("fixture asset checksum mismatch");
    FixtureData data;
    std::map<int, FixtureRecord> recs;
    std::set<int> profiled;
    std::map<int, NonlocalityClass> cells;

    std::size_t start = 0;
    while (start < text.size()) {
        std::size_t end = text.find('\n', start);
        if (end == std::string_view::npos) end = text.size();
        const std::string_view line = text.substr(start, end - start);
        start = end + 1;
        if (line.empty() || line.front() == '#') continue;
        const auto f = split(line, ';');
        const std::string_view kind = f[0];
        auto need = [&](std::size_t n) {
            if (f.size() != n) throw FixtureError("malformed fixture record '" + std::string(line) + "'");
        };
        if (kind == "const") {
            need(3);
            data.constants[std::string(f[1])] = evaluate_expression(f[2], data.constants);
        } else if (kind == "ket") {
            need(4);
            data.kets[std::string(f[1])] = {evaluate_expression(f[2], data.constants),
                                            evaluate_expression(f[3], data.constants)};
        } else if (kind == "coef") {
            need(4);
            data.coefficients[parse_int(f[1], "id")][std::string(f[2])] = evaluate_expression(f[3], data.constants);
        } else if (kind == "fixture") {
            need(11);
            FixtureRecord r;
            r.id = parse_int(f[1], "id");
            if (f[2] == "exact") {
                r.maximum.kind = MaximumKind::ClosedForm;
            } else if (f[2] == "decimal") {
                r.maximum.kind = MaximumKind::Decimal;
            } else {
                throw FixtureError("unknown maximum kind '" + std::string(f[2]) + "'");
            }
            r.maximum.text = std::string(f[3]);
            r.maximum.value = parse_real(f[3]);
            r.state_spec = std::string(f[4]);
            for (std::size_t k = 0; k < 6; ++k) r.measurement_spec[k] = std::string(f[5 + k]);
            if (!recs.emplace(r.id, r).second) throw FixtureError("duplicate fixture " + std::to_string(r.id));
        } else if (kind == "profile") {
            need(11);
            const int id = parse_int(f[1], "id");
            auto it = recs.find(id);
            if (it == recs.end()) throw FixtureError("profile before fixture " + std::to_string(id));
            ExpectedProfile& p = it->second.profile;
            p.n_abc = parse_real(f[2]);
            p.c_ab = parse_real(f[3]);
            p.c_ac = parse_real(f[4]);
            p.c_bc = parse_real(f[5]);
            p.entanglement_class = parse_int(f[6], "class");
            p.i_a = parse_real(f[7]);
            p.i_b = parse_real(f[8]);
            p.i_c = parse_real(f[9]);
            p.incompatibility_class = parse_int(f[10], "class");
            profiled.insert(id);
        } else if (kind == "cell") {
            need(4);
            const NonlocalityClass pair{parse_int(f[2], "class"), parse_int(f[1], "class")};
            for (std::string_view id : split(f[3], ',')) {
                if (!cells.emplace(parse_int(id, "id"), pair).second) {
                    throw FixtureError("id " + std::string(id) + " appears in two cells");
                }
            }
        } else if (kind == "aq") {
            need(3);
            const int id = parse_int(f[1], "id");
            auto it = recs.find(id);
            if (it == recs.end()) throw FixtureError("almost-quantum value before fixture " + std::to_string(id));
            it->second.almost_quantum = parse_real(f[2]);
        } else {
            throw FixtureError("unknown fixture record kind '" + std::string(kind) + "'");
        }
    }
    for (int id = 1; id <= 46; ++id) {
        auto it = recs.find(id);
        if (it == recs.end() || !profiled.contains(id)) {
            throw FixtureError("fixture asset is incomplete for id " + std::to_string(id));
        }
        if (auto c = cells.find(id); c != cells.end()) it->second.class_pair = c->second;
        data.records.push_back(it->second);
    }
    if (recs.size() != 46) throw FixtureError("fixture asset has ids outside 1..46");
    for (const auto& [id, pair] : cells) {
        if (!recs.contains(id)) throw FixtureError("class cell lists unknown id " + std::to_string(id));
    }
    return data;
}

const FixtureData& fixture_data() {
    static const FixtureData data = load_fixture_data();
    return data;
}

Environment environment_for(int id) {
    const FixtureData& d = fixture_data();
    Environment env = d.constants;
    if (auto it = d.coefficients.find(id); it != d.coefficients.end()) {
        for (const auto& [k, v] : it->second) env[k] = v;
    }
    return env;
}

}  // namespace

Complex evaluate_expression(std::string_view text, const Environment& env) {
    Cursor cur(text, env);
    const Complex v = cur.expression();
    if (!cur.at_end()) cur.fail("unexpected trailing text");
    return v;
}

CVector parse_state_spec(std::string_view text, const Environment& env, const KetTable& kets) {
    std::vector<std::pair<Party, double>> rotations;
    if (const std::size_t colon = text.find(':'); colon != std::string_view::npos) {
        Cursor pre(text.substr(0, colon), env);
        while (!pre.at_end()) {
            const std::string_view name = pre.peek_identifier();
            if (name.size() != 3 || name[0] != 'R' || name[1] != '_') pre.fail("expected R_<party>(angle)");
            pre.take(3);
            pre.expect('(');
            const double angle = real_value(pre.expression(), "rotation angle");
            pre.expect(')');
            rotations.emplace_back(party_from_letter(name[2]), angle);
        }
        text = text.substr(colon + 1);
    }

    Cursor cur(text, env);
    CVector psi = CVector::Zero(8);
    std::vector<Party> parties;
    bool first = true;
    while (!cur.at_end()) {
        double sign = 1.0;
        if (cur.accept('-')) {
            sign = -1.0;
        } else if (!cur.accept('+') && !first) {
            cur.fail("expected '+' or '-' between terms");
        }
        const Complex c = sign * cur.coefficient(cur.peek() == '|');
        const Ket ket = parse_ket(cur, kets);
        if (first) {
            parties = ket.parties;
        } else if (ket.parties != parties) {
            cur.fail("all kets of a state must cover the same parties");
        }
        psi += c * ket.vector;
        first = false;
    }
    if (first) cur.fail("empty state");
    for (const auto& [party, angle] : rotations) {
        if (std::find(parties.begin(), parties.end(), party) == parties.end()) {
            throw FixtureError("rotation on a party outside the state");
        }
        apply_local(psi, party, rotation(angle));
    }
    return psi;
}

Observable parse_measurement_spec(std::string_view text, const Environment& env) {
    Cursor cur(text, env);
    const std::string_view trimmed = [&] {
        std::string_view t = text;
        while (!t.empty() && std::isspace(static_cast<unsigned char>(t.front()))) t.remove_prefix(1);
        while (!t.empty() && std::isspace(static_cast<unsigned char>(t.back()))) t.remove_suffix(1);
        return t;
    }();
    if (trimmed == "1") return Observable::plus_identity();
    if (trimmed == "-1") return Observable::minus_identity();

    Eigen::Vector3d n = Eigen::Vector3d::Zero();
    bool first = true;
    while (!cur.at_end()) {
        double sign = 1.0;
        if (cur.accept('-')) {
            sign = -1.0;
        } else if (!cur.accept('+') && !first) {
            cur.fail("expected '+' or '-' between terms");
        }
        const std::string_view id = cur.peek_identifier();
        const bool letter = id == "x" || id == "y" || id == "z";
        const double c = sign * real_value(cur.coefficient(letter), "observable coefficient");
        const std::string_view axis = cur.peek_identifier();
        if (axis != "x" && axis != "y" && axis != "z") cur.fail("expected x, y or z");
        cur.take(1);
        n(axis == "x" ? 0 : axis == "y" ? 1 : 2) += c;
        first = false;
    }
    if (first) cur.fail("empty observable");
    if (std::abs(n.norm() - 1.0) > kBlochNormSlack) {
        throw FixtureError("Bloch vector '" + std::string(text) + "' is not unit within 1e-3");
    }
    return Observable::bloch_normalized(n);
}

const std::vector<FixtureRecord>& fixture_records() { return fixture_data().records; }

const FixtureRecord& fixture_record(int id) {
    if (id < 1 || id > 46) throw std::out_of_range("fixture id must be in 1..46");
    return fixture_records()[static_cast<std::size_t>(id - 1)];
}

std::optional<PureState> build_fixture_state(int id) {
    const FixtureRecord& r = fixture_record(id);
    if (r.state_spec == "none") return std::nullopt;
    const CVector psi = parse_state_spec(r.state_spec, environment_for(id), fixture_data().kets);
    if (r.maximum.kind == MaximumKind::ClosedForm && std::abs(psi.norm() - 1.0) > kExactNormSlack) {
        throw FixtureError("closed-form fixture state " + std::to_string(id) + " is not normalized");
    }
    return PureState::normalized(psi);
}

Measurements build_fixture_measurements(int id) {
    const FixtureRecord& r = fixture_record(id);
    const Environment env = environment_for(id);
    return {parse_measurement_spec(r.measurement_spec[0], env), parse_measurement_spec(r.measurement_spec[1], env),
            parse_measurement_spec(r.measurement_spec[2], env), parse_measurement_spec(r.measurement_spec[3], env),
            parse_measurement_spec(r.measurement_spec[4], env), parse_measurement_spec(r.measurement_spec[5], env)};
}

ExpectedValues expected_values(int id) {
    const FixtureRecord& r = fixture_record(id);
    return {r.maximum, r.profile, r.class_pair, r.almost_quantum};
}

Solution fixture_solution(int id) {
    Solution sol;
    sol.state = build_fixture_state(id).value_or(PureState::basis(0));
    sol.measurements = build_fixture_measurements(id);
    sol.value = evaluate_solution(catalog_entry(id).expression, sol);
    sol.converged = true;
    return sol;
}

}  // namespace bellmax
