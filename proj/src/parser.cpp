#include "freeconv/parser.hpp"

#include <cctype>

#include "freeconv/errors.hpp"
#include "freeconv/transforms.hpp"

namespace freeconv {

namespace {

struct Token {
    enum Kind { number, var_t, kw_tr, kw_exp, atom_x, poly_t, plus, minus, times, divide, power,
                lparen, rparen, end } kind;
    std::size_t pos = 0;
    mpz_class value;   // number
    int index = 1;     // atom_x / poly_t
    bool starred = false;
};

class Lexer {
  public:
    explicit Lexer(const std::string& s) : s_(s) { advance(); }
    const Token& peek() const { return tok_; }
    Token take() {
        Token t = tok_;
        advance();
        return t;
    }

  private:
    const std::string& s_;
    std::size_t i_ = 0;
    Token tok_;

    void advance() {
        while (i_ < s_.size() && std::isspace(static_cast<unsigned char>(s_[i_]))) ++i_;
        tok_ = Token{Token::end, i_};
        if (i_ >= s_.size()) return;
        char c = s_[i_];
        if (std::isdigit(static_cast<unsigned char>(c))) {
            std::size_t j = i_;
            while (j < s_.size() && std::isdigit(static_cast<unsigned char>(s_[j]))) ++j;
            tok_.kind = Token::number;
            tok_.value = mpz_class(s_.substr(i_, j - i_));
            i_ = j;
            return;
        }
        if (std::isalpha(static_cast<unsigned char>(c))) {
            std::size_t j = i_;
            while (j < s_.size() && std::isalpha(static_cast<unsigned char>(s_[j]))) ++j;
            std::string name = s_.substr(i_, j - i_);
            if (name == "t") {
                tok_.kind = Token::var_t;
                i_ = j;
                return;
            }
            if (name == "tr") {
                tok_.kind = Token::kw_tr;
                i_ = j;
                return;
            }
            if (name == "exp") {
                tok_.kind = Token::kw_exp;
                i_ = j;
                return;
            }
            if (name == "X" || name == "T") {
                std::size_t k = j;
                while (k < s_.size() && std::isdigit(static_cast<unsigned char>(s_[k]))) ++k;
                int idx = (k == j) ? 1 : std::stoi(s_.substr(j, k - j));
                if (name == "X") {
                    tok_.kind = Token::atom_x;
                    tok_.index = idx;
                    // a '*' glued to the atom is the star decoration
                    if (k < s_.size() && s_[k] == '*') {
                        tok_.starred = true;
                        ++k;
                    }
                } else {
                    if (k == j) throw parse_error("T needs a degree (e.g. T2)", i_);
                    tok_.kind = Token::poly_t;
                    tok_.index = idx;
                }
                i_ = k;
                return;
            }
            throw parse_error("unknown symbol \"" + name + "\"", i_);
        }
        switch (c) {
            case '+': tok_.kind = Token::plus; break;
            case '-': tok_.kind = Token::minus; break;
            case '*': tok_.kind = Token::times; break;
            case '/': tok_.kind = Token::divide; break;
            case '^': tok_.kind = Token::power; break;
            case '(': tok_.kind = Token::lparen; break;
            case ')': tok_.kind = Token::rparen; break;
            default: throw parse_error(std::string("unexpected character '") + c + "'", i_);
        }
        ++i_;
    }
};

class Parser {
  public:
    explicit Parser(const std::string& s) : lex_(s) {}

    Element parse() {
        Element e = expr();
        if (lex_.peek().kind != Token::end)
            throw parse_error("trailing input", lex_.peek().pos);
        return e;
    }

  private:
    Lexer lex_;

    long expect_signed_int() {
        bool neg = false;
        if (lex_.peek().kind == Token::minus) {
            lex_.take();
            neg = true;
        } else if (lex_.peek().kind == Token::plus) {
            lex_.take();
        }
        if (lex_.peek().kind != Token::number)
            throw parse_error("expected an integer", lex_.peek().pos);
        long v = long(lex_.take().value.get_si());
        return neg ? -v : v;
    }

    void expect(Token::Kind k, const char* what) {
        if (lex_.peek().kind != k) throw parse_error(std::string("expected ") + what, lex_.peek().pos);
        lex_.take();
    }

    Element expr() {
        bool neg = false;
        if (lex_.peek().kind == Token::minus) {
            lex_.take();
            neg = true;
        } else if (lex_.peek().kind == Token::plus) {
            lex_.take();
        }
        Element acc = term();
        if (neg) acc = -acc;
        while (lex_.peek().kind == Token::plus || lex_.peek().kind == Token::minus) {
            bool minus = lex_.take().kind == Token::minus;
            Element rhs = term();
            acc += minus ? -rhs : rhs;
        }
        return acc;
    }

    static bool starts_factor(Token::Kind k) {
        return k == Token::number || k == Token::var_t || k == Token::kw_tr ||
               k == Token::kw_exp || k == Token::atom_x || k == Token::poly_t ||
               k == Token::lparen;
    }

    Element term() {
        Element acc = factor();
        for (;;) {
            if (lex_.peek().kind == Token::times) {
                lex_.take();
                acc *= factor();
            } else if (starts_factor(lex_.peek().kind)) {
                acc *= factor();
            } else {
                return acc;
            }
        }
    }

    Element factor() {
        Element base = primary();
        if (lex_.peek().kind == Token::power) {
            std::size_t pos = lex_.peek().pos;
            lex_.take();
            long n = expect_signed_int();
            try {
                return base.pow(n);
            } catch (const argument_error& e) {
                throw parse_error(e.what(), pos);
            }
        }
        return base;
    }

    Element primary() {
        Token t = lex_.peek();
        switch (t.kind) {
            case Token::number: {
                lex_.take();
                mpz_class num = t.value;
                if (lex_.peek().kind == Token::divide) {
                    lex_.take();
                    if (lex_.peek().kind != Token::number)
                        throw parse_error("expected a denominator", lex_.peek().pos);
                    mpz_class den = lex_.take().value;
                    if (den == 0) throw parse_error("division by zero", t.pos);
                    return Element(Scalar(ratio(num, den)));
                }
                return Element(Scalar(Rational(num)));
            }
            case Token::var_t:
                lex_.take();
                return Element(Scalar::t());
            case Token::kw_exp: {
                lex_.take();
                expect(Token::lparen, "'('");
                long k = 1;
                if (lex_.peek().kind == Token::number || lex_.peek().kind == Token::minus ||
                    lex_.peek().kind == Token::plus) {
                    // exp(k*t/2) or exp(-t/2)
                    bool neg = false;
                    if (lex_.peek().kind == Token::minus) {
                        lex_.take();
                        neg = true;
                    } else if (lex_.peek().kind == Token::plus) {
                        lex_.take();
                    }
                    if (lex_.peek().kind == Token::number) {
                        k = long(lex_.take().value.get_si());
                        expect(Token::times, "'*'");
                    }
                    if (neg) k = -k;
                }
                expect(Token::var_t, "'t'");
                expect(Token::divide, "'/'");
                if (lex_.peek().kind != Token::number || lex_.take().value != 2)
                    throw parse_error("exponentials must have the form exp(k*t/2)", t.pos);
                expect(Token::rparen, "')'");
                return Element(Scalar::exp_half(k));
            }
            case Token::kw_tr: {
                lex_.take();
                expect(Token::lparen, "'('");
                Element inner = expr();
                expect(Token::rparen, "')'");
                return inner.tr();
            }
            case Token::poly_t: {
                lex_.take();
                expect(Token::lparen, "'('");
                Element inner = expr();
                expect(Token::rparen, "')'");
                return poly_apply(tchebycheff2(t.index), inner);
            }
            case Token::atom_x: {
                lex_.take();
                Deco d = t.starred ? Deco::star : Deco::plain;
                return Element::letter(t.index, d);
            }
            case Token::lparen: {
                lex_.take();
                Element inner = expr();
                expect(Token::rparen, "')'");
                return inner;
            }
            default:
                throw parse_error("expected an expression", t.pos);
        }
    }
};

std::string format_letter_run(const Letter& l, int count) {
    std::string base = "X" + std::to_string(l.index);
    bool star = l.deco == Deco::star || l.deco == Deco::starinv;
    bool invd = l.deco == Deco::inv || l.deco == Deco::starinv;
    if (star) base += "*";
    if (invd)
        base += "^-" + std::to_string(count);
    else if (count > 1)
        base += "^" + std::to_string(count);
    return base;
}

}  // namespace

Element parse_expression(const std::string& text) { return Parser(text).parse(); }

Word parse_word(const std::string& text) {
    Element e = parse_expression(text);
    if (e.term_count() != 1) throw argument_error("word syntax expects a single monomial");
    const auto& [b, c] = *e.terms().begin();
    if (!b.traces.empty() || !c.is_one())
        throw argument_error("word syntax expects a plain product of atoms");
    return b.outer;
}

std::string format_word(const Word& w) {
    std::string out;
    for (size_t i = 0; i < w.size();) {
        size_t j = i;
        while (j < w.size() && w[j] == w[i]) ++j;
        if (!out.empty()) out += " ";
        out += format_letter_run(w[i], int(j - i));
        i = j;
    }
    return out.empty() ? "1" : out;
}

namespace {
std::string format_basis(const BasisElement& b) {
    std::string out;
    if (!b.outer.empty()) out = format_word(b.outer);
    for (const auto& t : b.traces) {
        if (!out.empty()) out += " ";
        out += "tr(" + format_word(t) + ")";
    }
    return out;
}

std::string join_terms(const std::vector<std::string>& pieces) {
    std::string out;
    for (const auto& p : pieces) {
        if (out.empty()) {
            out = p;
        } else if (!p.empty() && p[0] == '-') {
            out += " - " + p.substr(1);
        } else {
            out += " + " + p;
        }
    }
    return out.empty() ? "0" : out;
}
}  // namespace

std::string format_element(const Element& p) {
    std::vector<std::string> pieces;
    for (const auto& [b, c] : p.terms()) {
        std::string body = format_basis(b);
        std::string coeff = c.str();
        bool simple = c.is_one();
        bool simple_neg = (-c).is_one();
        std::string piece;
        if (body.empty())
            piece = coeff.find(' ') == std::string::npos ? coeff : "(" + coeff + ")";
        else if (simple)
            piece = body;
        else if (simple_neg)
            piece = "-" + body;
        else if (coeff.find(' ') != std::string::npos)
            piece = "(" + coeff + ")*" + body;
        else
            piece = coeff + "*" + body;
        pieces.push_back(piece);
    }
    return join_terms(pieces);
}

std::string format_element_pretty(const Element& p, const std::optional<Rational>& tval) {
    std::vector<std::string> pieces;
    for (const auto& [b, c] : p.terms()) {
        Scalar coeff = tval ? c.substitute(*tval) : c;
        if (coeff.is_zero()) continue;
        std::string body = format_basis(b);
        std::string cs = coeff.pretty(tval.has_value());
        std::string piece;
        if (body.empty())
            piece = cs.find(' ') == std::string::npos ? cs : "(" + cs + ")";
        else if (coeff.is_one())
            piece = body;
        else if ((-coeff).is_one())
            piece = "-" + body;
        else if (cs.find(' ') != std::string::npos)
            piece = "(" + cs + ")*" + body;
        else
            piece = cs + "*" + body;
        pieces.push_back(piece);
    }
    return join_terms(pieces);
}

}  // namespace freeconv
