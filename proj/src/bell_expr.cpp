#include "bellmax/bell_expr.hpp"

#include <cctype>
#include <charconv>
#include <cstdlib>
#include <limits>
#include <sstream>

#include "assets.hpp"

namespace bellmax {

ParseError::ParseError(const std::string& message, std::size_t position)
    : std::runtime_error(message + " (at position " + std::to_string(position) + ")"), position_(position) {}

std::int64_t BellExpression::coefficient(const TermIndex& term) const {
    auto it = coeffs_.find(term);
    return it == coeffs_.end() ? 0 : it->second;
}

void BellExpression::add(const TermIndex& term, std::int64_t value) {
    for (int t : term) {
        if (t < 0 || t > 2) throw std::invalid_argument("term index entries must be 0, 1 or 2");
    }
    if (value == 0) return;
    auto [it, inserted] = coeffs_.try_emplace(term, value);
    if (!inserted) {
        it->second += value;
        if (it->second == 0) coeffs_.erase(it);
    }
}

std::int64_t BellExpression::l1_norm() const {
    std::int64_t s = 0;
    for (const auto& [term, c] : coeffs_) s += std::llabs(c);
    return s;
}

bool BellExpression::involves(Party party) const {
    for (const auto& [term, c] : coeffs_) {
        if (term[static_cast<std::size_t>(index_of(party))] != 0) return true;
    }
    return false;
}

BellExpression& BellExpression::operator+=(const BellExpression& other) {
    for (const auto& [term, c] : other.coeffs_) add(term, c);
    return *this;
}

DeterministicStrategy DeterministicStrategy::from_index(unsigned k) {
    DeterministicStrategy s;
    for (std::size_t j = 0; j < 6; ++j) s.outputs[j] = (k >> j) & 1u ? -1 : 1;
    return s;
}

std::string DeterministicStrategy::to_string() const {
    static constexpr const char* names[6] = {"A", "a", "B", "b", "C", "c"};
    std::string out;
    for (std::size_t j = 0; j < 6; ++j) {
        if (j) out += ' ';
        out += names[j];
        out += outputs[j] > 0 ? "=+1" : "=-1";
    }
    return out;
}

namespace {

struct Letter {
    int party;
    int setting;
};

std::optional<Letter> letter_of(char ch) {
    switch (ch) {
        case 'A': return Letter{0, 1};
        case 'a': return Letter{0, 2};
        case 'B': return Letter{1, 1};
        case 'b': return Letter{1, 2};
        case 'C': return Letter{2, 1};
        case 'c': return Letter{2, 2};
        default: return std::nullopt;
    }
}

class ExpressionParser {
public:
    explicit ExpressionParser(std::string_view text) : text_(text) {}

    BellExpression parse() {
        BellExpression expr;
        skip_space();
        if (pos_ == text_.size()) throw ParseError("empty expression", pos_);
        bool first = true;
        while (true) {
            skip_space();
            int sign = 1;
            if (pos_ < text_.size() && (text_[pos_] == '+' || text_[pos_] == '-')) {
                sign = text_[pos_] == '-' ? -1 : 1;
                ++pos_;
                skip_space();
            } else if (!first) {
                throw ParseError("expected '+' or '-' between terms", pos_);
            }
            parse_term(expr, sign);
            first = false;
            skip_space();
            if (pos_ == text_.size()) break;
        }
        return expr;
    }

private:
    void skip_space() {
        while (pos_ < text_.size() && std::isspace(static_cast<unsigned char>(text_[pos_]))) ++pos_;
    }

    void parse_term(BellExpression& expr, int sign) {
        const std::size_t start = pos_;
        std::int64_t coeff = 1;
        bool has_coeff = false;
        if (pos_ < text_.size() && std::isdigit(static_cast<unsigned char>(text_[pos_]))) {
            std::size_t end = pos_;
            while (end < text_.size() && std::isdigit(static_cast<unsigned char>(text_[end]))) ++end;
            auto [ptr, ec] = std::from_chars(text_.data() + pos_, text_.data() + end, coeff);
            if (ec != std::errc{}) throw ParseError("coefficient out of range", pos_);
            (void)ptr;
            if (end < text_.size() && (text_[end] == '.' || text_[end] == ',' || text_[end] == '/')) {
                throw ParseError("coefficients must be integers", end);
            }
            pos_ = end;
            has_coeff = true;
            skip_space();
        }
        TermIndex term{0, 0, 0};
        int last_party = -1;
        const std::size_t word_start = pos_;
        while (pos_ < text_.size() && std::isalpha(static_cast<unsigned char>(text_[pos_]))) {
            auto letter = letter_of(text_[pos_]);
            if (!letter) throw ParseError(std::string("unknown measurement symbol '") + text_[pos_] + "'", pos_);
            if (term[static_cast<std::size_t>(letter->party)] != 0) {
                throw ParseError("two measurements of the same party in one term", pos_);
            }
            if (letter->party < last_party) throw ParseError("letters must appear in party order A, B, C", pos_);
            term[static_cast<std::size_t>(letter->party)] = letter->setting;
            last_party = letter->party;
            ++pos_;
        }
        const bool has_word = pos_ > word_start;
        if (!has_coeff && !has_word) {
            if (pos_ < text_.size()) {
                throw ParseError(std::string("unexpected character '") + text_[pos_] + "'", pos_);
            }
            throw ParseError("missing term", start);
        }
        if (pos_ < text_.size() && !std::isspace(static_cast<unsigned char>(text_[pos_])) && text_[pos_] != '+' &&
            text_[pos_] != '-') {
            if (std::isdigit(static_cast<unsigned char>(text_[pos_]))) throw ParseError("malformed coefficient", pos_);
            throw ParseError(std::string("unexpected character '") + text_[pos_] + "'", pos_);
        }
        expr.add(term, sign * coeff);
    }

    std::string_view text_;
    std::size_t pos_ = 0;
};

}  // namespace

BellExpression parse_expression(std::string_view text) { return ExpressionParser(text).parse(); }

std::string term_word(const TermIndex& term) {
    static constexpr char upper[3] = {'A', 'B', 'C'};
    static constexpr char lower[3] = {'a', 'b', 'c'};
    std::string w;
    for (std::size_t p = 0; p < 3; ++p) {
        if (term[p] == 1) w += upper[p];
        if (term[p] == 2) w += lower[p];
    }
    return w;
}

std::string format_expression(const BellExpression& expr) {
    if (expr.empty()) return "0";
    std::string out;
    bool first = true;
    for (const auto& [term, c] : expr.terms()) {
        const std::string word = term_word(term);
        const std::int64_t mag = c < 0 ? -c : c;
        if (first) {
            if (c < 0) out += '-';
        } else {
            out += c < 0 ? " - " : " + ";
        }
        if (word.empty()) {
            out += std::to_string(mag);
        } else {
            if (mag != 1) out += std::to_string(mag) + ' ';
            out += word;
        }
        first = false;
    }
    return out;
}

std::int64_t deterministic_value(const BellExpression& expr, const DeterministicStrategy& strategy) {
    std::int64_t value = 0;
    for (const auto& [term, c] : expr.terms()) {
        std::int64_t f = c;
        for (Party p : kParties) {
            const int t = term[static_cast<std::size_t>(index_of(p))];
            if (t != 0) f *= strategy.output(p, t);
        }
        value += f;
    }
    return value;
}

LocalBound local_bound(const BellExpression& expr) {
    LocalBound best{std::numeric_limits<std::int64_t>::min(), {}};
    for (unsigned k = 0; k < 64; ++k) {
        const auto s = DeterministicStrategy::from_index(k);
        const auto v = deterministic_value(expr, s);
        if (v > best.value) best = {v, s};
    }
    return best;
}

BellExpression substitute_identity(const BellExpression& expr, Party party, int sign_first, int sign_second) {
    if (std::abs(sign_first) != 1 || std::abs(sign_second) != 1) {
        throw std::invalid_argument("identity substitution signs must be +1 or -1");
    }
    const auto slot = static_cast<std::size_t>(index_of(party));
    BellExpression out;
    for (const auto& [term, coeff] : expr.terms()) {
        TermIndex t = term;
        std::int64_t c = coeff;
        if (t[slot] == 1) c *= sign_first;
        if (t[slot] == 2) c *= sign_second;
        t[slot] = 0;
        out.add(t, c);
    }
    return out;
}

std::uint64_t fnv1a64(std::string_view text) {
    std::uint64_t h = 0xcbf29ce484222325ull;
    for (unsigned char ch : text) {
        h ^= ch;
        h *= 0x100000001b3ull;
    }
    return h;
}

std::vector<CatalogEntry> parse_catalog(std::string_view text, std::uint64_t expected_checksum) {
    if (fnv1a64(text) != expected_checksum) throw CatalogError("catalog asset checksum mismatch");
    std::vector<CatalogEntry> entries;
    std::istringstream in{std::string(text)};
    std::string line;
    int line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty() || line[0] == '#') continue;
        const auto s1 = line.find(';');
        const auto s2 = s1 == std::string::npos ? s1 : line.find(';', s1 + 1);
        if (s2 == std::string::npos) throw CatalogError("malformed catalog record on line " + std::to_string(line_no));
        CatalogEntry e;
        try {
            e.id = std::stoi(line.substr(0, s1));
            e.local_maximum = std::stoll(line.substr(s1 + 1, s2 - s1 - 1));
            e.expression = parse_expression(std::string_view(line).substr(s2 + 1));
        } catch (const std::exception& ex) {
            throw CatalogError("bad catalog record on line " + std::to_string(line_no) + ": " + ex.what());
        }
        e.expression.id = e.id;
        if (e.id != static_cast<int>(entries.size()) + 1) {
            throw CatalogError("catalog ids must be consecutive from 1, found " + std::to_string(e.id));
        }
        entries.push_back(std::move(e));
    }
    return entries;
}

const std::vector<CatalogEntry>& load_catalog() {
    static const std::vector<CatalogEntry> catalog = [] {
        auto entries = parse_catalog(assets::catalog_text, assets::catalog_checksum);
        if (entries.size() != 46) throw CatalogError("catalog must contain 46 entries");
        return entries;
    }();
    return catalog;
}

const CatalogEntry& catalog_entry(int id) {
    const auto& cat = load_catalog();
    if (id < 1 || id > static_cast<int>(cat.size())) {
        throw std::out_of_range("no catalog entry with id " + std::to_string(id));
    }
    return cat[static_cast<std::size_t>(id - 1)];
}

}  // namespace bellmax
