#include "wsnq/query_parser.hpp"

#include <cctype>
#include <cstdlib>
#include <sstream>

#include "wsnq/error.hpp"

namespace wsnq {

namespace {

enum class TokKind { Ident, Number, Comma, LParen, RParen, Star, Compare, End };

struct Token {
    TokKind kind = TokKind::End;
    std::string text;    // identifiers lowercased, operators verbatim
    double number = 0.0;
    size_t pos = 0;      // byte offset in the input
};

[[noreturn]] void syntax_error(size_t pos, const std::string& expected) {
    std::ostringstream os;
    os << "syntax error at offset " << pos << ": expected " << expected;
    throw Error(ErrorCode::Syntax, os.str());
}

class Lexer {
public:
    explicit Lexer(std::string_view text) : text_(text) {}

    Token next() {
        skip_ws();
        Token tok;
        tok.pos = pos_;
        if (pos_ >= text_.size()) {
            tok.kind = TokKind::End;
            return tok;
        }
        char c = text_[pos_];
        if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
            size_t start = pos_;
            while (pos_ < text_.size() && (std::isalnum(static_cast<unsigned char>(text_[pos_])) || text_[pos_] == '_'))
                ++pos_;
            tok.kind = TokKind::Ident;
            tok.text = lowered(text_.substr(start, pos_ - start));
            return tok;
        }
        if (std::isdigit(static_cast<unsigned char>(c)) ||
            (c == '-' && pos_ + 1 < text_.size() && std::isdigit(static_cast<unsigned char>(text_[pos_ + 1])))) {
            return lex_number();
        }
        switch (c) {
            case ',': ++pos_; tok.kind = TokKind::Comma; tok.text = ","; return tok;
            case '(': ++pos_; tok.kind = TokKind::LParen; tok.text = "("; return tok;
            case ')': ++pos_; tok.kind = TokKind::RParen; tok.text = ")"; return tok;
            case '*': ++pos_; tok.kind = TokKind::Star; tok.text = "*"; return tok;
            case '<':
            case '>': {
                tok.kind = TokKind::Compare;
                tok.text = c;
                ++pos_;
                if (pos_ < text_.size() && text_[pos_] == '=') {
                    tok.text += '=';
                    ++pos_;
                }
                return tok;
            }
            case '=': ++pos_; tok.kind = TokKind::Compare; tok.text = "="; return tok;
            case '!': {
                if (pos_ + 1 < text_.size() && text_[pos_ + 1] == '=') {
                    pos_ += 2;
                    tok.kind = TokKind::Compare;
                    tok.text = "!=";
                    return tok;
                }
                syntax_error(pos_, "comparison operator");
            }
            default:
                syntax_error(pos_, "token");
        }
    }

private:
    std::string_view text_;
    size_t pos_ = 0;

    void skip_ws() {
        while (pos_ < text_.size() && std::isspace(static_cast<unsigned char>(text_[pos_]))) ++pos_;
    }

    static std::string lowered(std::string_view s) {
        std::string out(s);
        for (char& c : out) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
        return out;
    }

    Token lex_number() {
        Token tok;
        tok.pos = pos_;
        size_t start = pos_;
        if (text_[pos_] == '-') ++pos_;
        while (pos_ < text_.size() && std::isdigit(static_cast<unsigned char>(text_[pos_]))) ++pos_;
        if (pos_ < text_.size() && text_[pos_] == '.') {
            ++pos_;
            if (pos_ >= text_.size() || !std::isdigit(static_cast<unsigned char>(text_[pos_])))
                syntax_error(pos_, "digit after decimal point");
            while (pos_ < text_.size() && std::isdigit(static_cast<unsigned char>(text_[pos_]))) ++pos_;
        }
        // "450db": unit suffixes live in the catalog's data units, not in
        // query literals.
        if (pos_ < text_.size() &&
            (std::isalpha(static_cast<unsigned char>(text_[pos_])) || text_[pos_] == '_')) {
            std::ostringstream os;
            os << "literal with unit suffix at offset " << start
               << "; strip units, they are catalog metadata";
            throw Error(ErrorCode::UnitSuffix, os.str());
        }
        tok.kind = TokKind::Number;
        tok.text = std::string(text_.substr(start, pos_ - start));
        tok.number = std::strtod(tok.text.c_str(), nullptr);
        return tok;
    }
};

class Parser {
public:
    explicit Parser(std::string_view text) : lexer_(text) { advance(); }

    QueryAst parse() {
        expect_keyword("select");
        QueryAst ast;
        ast.select_items.push_back(parse_select_item());
        while (cur_.kind == TokKind::Comma) {
            advance();
            ast.select_items.push_back(parse_select_item());
        }
        expect_keyword("from");
        if (cur_.kind != TokKind::Ident || cur_.text != "sensors")
            syntax_error(cur_.pos, "table name 'sensors'");
        ast.source_table = cur_.text;
        advance();
        if (accept_keyword("where")) {
            ast.predicates.push_back(parse_predicate());
            while (accept_keyword("and")) ast.predicates.push_back(parse_predicate());
        }
        if (accept_keyword("group")) {
            expect_keyword("by");
            ast.group_by = expect_attribute("group-by attribute");
        }
        if (accept_keyword("epoch")) {
            expect_keyword("duration");
            if (cur_.kind != TokKind::Number) syntax_error(cur_.pos, "epoch duration in seconds");
            double v = cur_.number;
            if (v <= 0 || v != static_cast<double>(static_cast<uint32_t>(v)))
                syntax_error(cur_.pos, "positive integer epoch duration");
            ast.epoch_seconds = static_cast<uint32_t>(v);
            advance();
        }
        if (cur_.kind != TokKind::End) syntax_error(cur_.pos, "end of query");
        check_invariants(ast);
        return ast;
    }

private:
    Lexer lexer_;
    Token cur_;

    void advance() { cur_ = lexer_.next(); }

    bool is_keyword(const std::string& kw) const {
        return cur_.kind == TokKind::Ident && cur_.text == kw;
    }

    bool accept_keyword(const std::string& kw) {
        if (!is_keyword(kw)) return false;
        advance();
        return true;
    }

    void expect_keyword(const std::string& kw) {
        if (!is_keyword(kw)) syntax_error(cur_.pos, "keyword " + kw);
        advance();
    }

    static bool is_reserved(const std::string& word) {
        static const std::set<std::string> kReserved = {"select", "from", "where", "and",
                                                        "group", "by", "epoch", "duration"};
        return kReserved.count(word) > 0;
    }

    static bool agg_from_name(const std::string& name, AggFn& out) {
        if (name == "count") out = AggFn::Count;
        else if (name == "sum") out = AggFn::Sum;
        else if (name == "min") out = AggFn::Min;
        else if (name == "max") out = AggFn::Max;
        else if (name == "avg") out = AggFn::Avg;
        else return false;
        return true;
    }

    std::string expect_attribute(const std::string& what) {
        if (cur_.kind != TokKind::Ident || is_reserved(cur_.text)) syntax_error(cur_.pos, what);
        std::string name = cur_.text;
        advance();
        return name;
    }

    SelectItem parse_select_item() {
        if (cur_.kind != TokKind::Ident || is_reserved(cur_.text))
            syntax_error(cur_.pos, "select item");
        AggFn fn;
        std::string head = cur_.text;
        size_t head_pos = cur_.pos;
        advance();
        if (cur_.kind == TokKind::LParen) {
            if (!agg_from_name(head, fn))
                syntax_error(head_pos, "aggregate function (count, sum, min, max, avg)");
            advance();
            SelectItem item;
            item.is_aggregate = true;
            item.fn = fn;
            if (cur_.kind == TokKind::Star) {
                if (fn != AggFn::Count) syntax_error(cur_.pos, "attribute name (only count accepts *)");
                item.wildcard = true;
                advance();
            } else {
                item.attribute = expect_attribute("aggregate argument");
            }
            if (cur_.kind != TokKind::RParen) syntax_error(cur_.pos, ")");
            advance();
            return item;
        }
        SelectItem item;
        item.attribute = head;
        return item;
    }

    Predicate parse_predicate() {
        Predicate pred;
        pred.attribute = expect_attribute("predicate attribute");
        if (cur_.kind != TokKind::Compare) syntax_error(cur_.pos, "comparison operator");
        const std::string& sym = cur_.text;
        if (sym == "<") pred.op = CompareOp::Lt;
        else if (sym == "<=") pred.op = CompareOp::Le;
        else if (sym == ">") pred.op = CompareOp::Gt;
        else if (sym == ">=") pred.op = CompareOp::Ge;
        else if (sym == "=") pred.op = CompareOp::Eq;
        else pred.op = CompareOp::Ne;
        advance();
        if (cur_.kind != TokKind::Number) syntax_error(cur_.pos, "numeric literal");
        pred.value = cur_.number;
        advance();
        return pred;
    }

    static void check_invariants(const QueryAst& ast) {
        bool has_agg = ast.has_aggregates();
        bool has_plain = false;
        for (const auto& item : ast.select_items) {
            if (item.is_aggregate) continue;
            has_plain = true;
            if (ast.group_by && item.attribute != *ast.group_by)
                throw Error(ErrorCode::Syntax,
                            "syntax error: non-aggregate select item '" + item.attribute +
                                "' must equal the GROUP BY attribute");
        }
        if (has_agg && has_plain && !ast.group_by)
            throw Error(ErrorCode::Syntax,
                        "syntax error: mixing aggregates and plain attributes requires GROUP BY");
        if (ast.group_by && !has_agg)
            throw Error(ErrorCode::Syntax,
                        "syntax error: GROUP BY requires at least one aggregate select item");
    }
};

}  // namespace

QueryAst parse_query(std::string_view text) { return Parser(text).parse(); }

}  // namespace wsnq
