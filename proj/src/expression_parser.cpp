#include "conceptkit/expression_parser.hpp"

#include "conceptkit/errors.hpp"

#include <cctype>

namespace conceptkit {

namespace {

class Parser {
public:
    explicit Parser(std::string_view text) : text_(text) {}

    Expression parse() {
        auto e = expr();
        skip_space();
        if (pos_ != text_.size()) fail("trailing input");
        return e;
    }

private:
    struct Token {
        std::string_view text;
        std::size_t pos;
    };

    void skip_space() {
        while (pos_ < text_.size() && std::isspace(static_cast<unsigned char>(text_[pos_]))) ++pos_;
    }

    static bool is_delimiter(char c) {
        return c == '(' || c == ')' || c == ',' || std::isspace(static_cast<unsigned char>(c));
    }

    Token peek() {
        skip_space();
        if (pos_ >= text_.size()) return {{}, pos_};
        if (is_delimiter(text_[pos_])) return {text_.substr(pos_, 1), pos_};
        std::size_t end = pos_;
        while (end < text_.size() && !is_delimiter(text_[end])) ++end;
        return {text_.substr(pos_, end - pos_), pos_};
    }

    [[noreturn]] void fail(const std::string& what) {
        const auto tok = peek();
        const std::string shown = tok.text.empty() ? std::string("end of input") : "'" + std::string(tok.text) + "'";
        throw ParseError("parse error at position " + std::to_string(tok.pos) + ": " + what + ", offending token " +
                         shown);
    }

    void expect(char c) {
        const auto tok = peek();
        if (tok.text.size() != 1 || tok.text[0] != c) fail(std::string("expected '") + c + "'");
        pos_ += 1;
    }

    Expression expr() {
        const auto tok = peek();
        if (tok.text.empty()) fail("expected an operand or operator");
        if (tok.text.size() == 1 && is_delimiter(tok.text[0])) fail("expected an operand or operator");
        const std::string word(tok.text);
        const std::size_t after = tok.pos + tok.text.size();
        std::size_t look = after;
        while (look < text_.size() && std::isspace(static_cast<unsigned char>(text_[look]))) ++look;
        const bool call = look < text_.size() && text_[look] == '(';
        if (!call) {
            if (word == "AND" || word == "OR" || word == "NOT" || word == "AND_NOT") fail("operator without arguments");
            pos_ = after;
            return Expression::leaf(word);
        }
        if (word != "AND" && word != "OR" && word != "NOT" && word != "AND_NOT") fail("unknown operator");
        pos_ = after;
        expect('(');
        auto first = expr();
        if (word == "NOT") {
            expect(')');
            return Expression::negation(std::move(first));
        }
        expect(',');
        auto second = expr();
        expect(')');
        if (word == "AND") return Expression::conjunction(std::move(first), std::move(second));
        if (word == "OR") return Expression::disjunction(std::move(first), std::move(second));
        return Expression::conjunction(std::move(first), Expression::negation(std::move(second)));
    }

    std::string_view text_;
    std::size_t pos_ = 0;
};

} // namespace

Expression parse_expression(std::string_view text) {
    return Parser(text).parse();
}

MatrixConceptor evaluate_expression(const Expression& expr, const LeafResolver& resolve) {
    switch (expr.op()) {
        case Expression::Op::leaf: return resolve(expr.name());
        case Expression::Op::not_op: return not_conceptor(evaluate_expression(expr.operands()[0], resolve));
        case Expression::Op::and_op:
            return and_conceptor(evaluate_expression(expr.operands()[0], resolve),
                                 evaluate_expression(expr.operands()[1], resolve));
        case Expression::Op::or_op:
            return or_conceptor(evaluate_expression(expr.operands()[0], resolve),
                                evaluate_expression(expr.operands()[1], resolve));
    }
    throw DataError("unknown expression node");
}

} // namespace conceptkit
