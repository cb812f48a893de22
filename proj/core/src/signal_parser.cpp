// Recursive-descent parser for the signal grammar:
//
//   vector := "[" expr ("," expr)* "]"
//   expr   := term (("+" | "-") term)*
//   term   := factor ("*" factor)*
//   factor := "-" factor | primary ("^" uint)*
//   primary:= number | "t" | ("sin" | "cos" | "exp") "(" expr ")" | "(" expr ")"

#include "dlimit/errors.hpp"
#include "dlimit/signal.hpp"

#include <cctype>
#include <charconv>
#include <string>

namespace dlimit {
namespace {

class Parser {
public:
    explicit Parser(std::string_view text) : text_(text) {}

    VectorSignal vector() {
        skip_space();
        expect('[', "'['");
        std::vector<Expr> comps;
        comps.push_back(expr());
        skip_space();
        while (peek() == ',') {
            ++pos_;
            comps.push_back(expr());
            skip_space();
        }
        expect(']', "',' or ']'", {"','", "']'", "operator"});
        finish();
        return VectorSignal(std::move(comps));
    }

    Expr single() {
        Expr e = expr();
        finish();
        return e;
    }

private:
    std::string_view text_;
    std::size_t pos_ = 0;

    char peek() const { return pos_ < text_.size() ? text_[pos_] : '\0'; }
    bool at_end() const { return pos_ >= text_.size(); }

    void skip_space() {
        while (!at_end() && std::isspace(static_cast<unsigned char>(text_[pos_]))) ++pos_;
    }

    std::string found() const {
        if (at_end()) return "end of input";
        return std::string("'") + text_[pos_] + "'";
    }

    [[noreturn]] void fail(std::vector<std::string> expected) const {
        throw ParseError(pos_, std::move(expected), found());
    }

    void expect(char c, const char* label, std::vector<std::string> expected = {}) {
        skip_space();
        if (peek() != c) {
            if (expected.empty()) expected.emplace_back(label);
            fail(std::move(expected));
        }
        ++pos_;
    }

    void finish() {
        skip_space();
        if (!at_end()) fail({"end of input"});
    }

    Expr expr() {
        Expr acc = term();
        for (;;) {
            skip_space();
            const char c = peek();
            if (c == '+') {
                ++pos_;
                acc = Expr::add(acc, term());
            } else if (c == '-') {
                ++pos_;
                acc = Expr::add(acc, Expr::neg(term()));
            } else {
                return acc;
            }
        }
    }

    Expr term() {
        Expr acc = factor();
        for (;;) {
            skip_space();
            if (peek() != '*') return acc;
            ++pos_;
            acc = Expr::mul(acc, factor());
        }
    }

    Expr factor() {
        skip_space();
        if (peek() == '-') {
            ++pos_;
            return Expr::neg(factor());
        }
        Expr base = primary();
        for (;;) {
            skip_space();
            if (peek() != '^') return base;
            ++pos_;
            base = Expr::pow(base, exponent());
        }
    }

    unsigned exponent() {
        skip_space();
        const std::size_t start = pos_;
        while (!at_end() && std::isdigit(static_cast<unsigned char>(text_[pos_]))) ++pos_;
        if (pos_ == start) fail({"unsigned integer exponent"});
        unsigned value = 0;
        const auto [ptr, ec] = std::from_chars(text_.data() + start, text_.data() + pos_, value);
        if (ec != std::errc() || value > 4096) {
            pos_ = start;
            fail({"exponent no larger than 4096"});
        }
        (void)ptr;
        return value;
    }

    Expr primary() {
        skip_space();
        const char c = peek();
        if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') return number();
        if (c == '(') {
            ++pos_;
            Expr inner = expr();
            expect(')', "')'", {"')'", "operator"});
            return inner;
        }
        if (std::isalpha(static_cast<unsigned char>(c))) {
            const std::size_t start = pos_;
            while (!at_end() && std::isalpha(static_cast<unsigned char>(text_[pos_]))) ++pos_;
            const std::string_view word = text_.substr(start, pos_ - start);
            if (word == "t") return Expr::variable();
            if (word == "sin" || word == "cos" || word == "exp") {
                expect('(', "'('");
                Expr arg = expr();
                expect(')', "')'", {"')'", "operator"});
                if (word == "sin") return Expr::sin(arg);
                if (word == "cos") return Expr::cos(arg);
                return Expr::exp(arg);
            }
            pos_ = start;
            fail({"number", "'t'", "'sin'", "'cos'", "'exp'", "'('", "'-'"});
        }
        fail({"number", "'t'", "'sin'", "'cos'", "'exp'", "'('", "'-'"});
    }

    Expr number() {
        const std::size_t start = pos_;
        auto digits = [&] {
            const std::size_t s = pos_;
            while (!at_end() && std::isdigit(static_cast<unsigned char>(text_[pos_]))) ++pos_;
            return pos_ - s;
        };
        std::size_t count = digits();
        if (peek() == '.') {
            ++pos_;
            count += digits();
        }
        if (count == 0) {
            pos_ = start;
            fail({"number"});
        }
        if (peek() == 'e' || peek() == 'E') {
            const std::size_t mark = pos_;
            ++pos_;
            if (peek() == '+' || peek() == '-') ++pos_;
            if (digits() == 0) pos_ = mark;  // 'e' not followed by an exponent
        }
        double value = 0.0;
        const auto [ptr, ec] = std::from_chars(text_.data() + start, text_.data() + pos_, value);
        if (ec != std::errc() || ptr != text_.data() + pos_) {
            pos_ = start;
            fail({"finite number"});
        }
        return Expr::constant(value);
    }
};

}  // namespace

VectorSignal parse_signal(std::string_view text, int n) {
    VectorSignal sig = Parser(text).vector();
    if (n >= 0 && sig.dimension() != n) {
        throw DimensionMismatch("signal has " + std::to_string(sig.dimension()) +
                                " components, expected " + std::to_string(n));
    }
    return sig;
}

Expr parse_expr(std::string_view text) { return Parser(text).single(); }

}  // namespace dlimit
