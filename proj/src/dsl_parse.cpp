#include <cctype>
#include <charconv>
#include <cmath>
#include <fstream>
#include <limits>
#include <map>
#include <sstream>

#include "prmrl/dsl.hpp"

namespace prmrl {

SourceDocument SourceDocument::from_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ConfigError("cannot open " + path);
    std::ostringstream os;
    os << in.rdbuf();
    return SourceDocument{os.str(), path};
}

std::string Diagnostic::str() const {
    std::ostringstream os;
    os << (severity == Severity::Error ? "error" : "warning") << " at " << line << ":" << column
       << ": " << message;
    return os.str();
}

namespace {

struct Token {
    enum class Kind { Ident, Number, Punct, End };
    Kind kind = Kind::End;
    std::string text;
    double number = 0.0;
    int line = 1;
    int column = 1;
};

struct ParseError {
    Diagnostic diag;
};

[[noreturn]] void fail(const Token& at, const std::string& message) {
    throw ParseError{Diagnostic{Diagnostic::Severity::Error, message, at.line, at.column}};
}

class Lexer {
public:
    explicit Lexer(const std::string& text) : text_(text) { tokenize(); }
    const std::vector<Token>& tokens() const { return tokens_; }

private:
    void tokenize() {
        std::size_t i = 0;
        int line = 1, col = 1;
        auto advance = [&](std::size_t n) {
            for (std::size_t j = 0; j < n; ++j) {
                if (text_[i + j] == '\n') {
                    ++line;
                    col = 1;
                } else {
                    ++col;
                }
            }
            i += n;
        };
        while (i < text_.size()) {
            const char c = text_[i];
            if (c == '#') {  // comment to end of line
                std::size_t j = i;
                while (j < text_.size() && text_[j] != '\n') ++j;
                advance(j - i);
                continue;
            }
            if (std::isspace(static_cast<unsigned char>(c))) {
                advance(1);
                continue;
            }
            Token t;
            t.line = line;
            t.column = col;
            if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
                std::size_t j = i;
                while (j < text_.size() && (std::isalnum(static_cast<unsigned char>(text_[j])) ||
                                            text_[j] == '_'))
                    ++j;
                t.kind = Token::Kind::Ident;
                t.text = text_.substr(i, j - i);
                advance(j - i);
            } else if (std::isdigit(static_cast<unsigned char>(c)) ||
                       (c == '.' && i + 1 < text_.size() &&
                        std::isdigit(static_cast<unsigned char>(text_[i + 1])))) {
                std::size_t j = i;
                while (j < text_.size() && (std::isdigit(static_cast<unsigned char>(text_[j])) ||
                                            text_[j] == '.'))
                    ++j;
                if (j < text_.size() && (text_[j] == 'e' || text_[j] == 'E')) {
                    std::size_t e = j + 1;
                    if (e < text_.size() && (text_[e] == '+' || text_[e] == '-')) ++e;
                    if (e < text_.size() && std::isdigit(static_cast<unsigned char>(text_[e]))) {
                        ++e;
                        while (e < text_.size() &&
                               std::isdigit(static_cast<unsigned char>(text_[e])))
                            ++e;
                        j = e;
                    }
                }
                t.kind = Token::Kind::Number;
                t.text = text_.substr(i, j - i);
                double value = 0.0;
                const auto res =
                    std::from_chars(t.text.data(), t.text.data() + t.text.size(), value);
                if (res.ec != std::errc{} || res.ptr != t.text.data() + t.text.size())
                    fail(t, "malformed numeric literal '" + t.text + "'");
                t.number = value;
                advance(j - i);
            } else if (c == '-' && i + 1 < text_.size() && text_[i + 1] == '>') {
                t.kind = Token::Kind::Punct;
                t.text = "->";
                advance(2);
            } else if (std::string("{}[]():;,=&|!'+-*/").find(c) != std::string::npos) {
                t.kind = Token::Kind::Punct;
                t.text = std::string(1, c);
                advance(1);
            } else {
                t.line = line;
                t.column = col;
                fail(t, std::string("unexpected character '") + c + "'");
            }
            tokens_.push_back(std::move(t));
        }
        Token end;
        end.kind = Token::Kind::End;
        end.line = line;
        end.column = col;
        tokens_.push_back(end);
    }

    const std::string& text_;
    std::vector<Token> tokens_;
};

// Affine form over the declared variables plus the step counter k.
struct Affine {
    std::vector<double> coeff;
    double k_coeff = 0.0;
    double constant = 0.0;

    bool is_constant() const {
        if (k_coeff != 0.0) return false;
        for (double c : coeff) {
            if (c != 0.0) return false;
        }
        return true;
    }
};

class Parser {
public:
    Parser(const std::vector<Token>& tokens) : tokens_(tokens) {}

    ParseResult run() {
        ParseResult result;
        try {
            parse_document();
            resolve();
            if (!errors_.empty()) {
                result.diagnostics = errors_;
                return result;
            }
            machine_.finalize();
            result.machine = std::move(machine_);
        } catch (const ParseError& e) {
            errors_.push_back(e.diag);
            result.diagnostics = errors_;
        } catch (const DefinitionError& e) {
            errors_.push_back(Diagnostic{Diagnostic::Severity::Error, e.what(), 1, 1});
            result.diagnostics = errors_;
        }
        return result;
    }

private:
    const Token& peek(std::size_t ahead = 0) const {
        const std::size_t i = std::min(pos_ + ahead, tokens_.size() - 1);
        return tokens_[i];
    }
    const Token& next() {
        const Token& t = peek();
        if (t.kind != Token::Kind::End) ++pos_;
        return t;
    }
    bool accept_punct(const std::string& p) {
        if (peek().kind == Token::Kind::Punct && peek().text == p) {
            ++pos_;
            return true;
        }
        return false;
    }
    void expect_punct(const std::string& p) {
        if (!accept_punct(p)) fail(peek(), "expected '" + p + "'");
    }
    bool accept_ident(const std::string& word) {
        if (peek().kind == Token::Kind::Ident && peek().text == word) {
            ++pos_;
            return true;
        }
        return false;
    }
    std::string expect_ident(const std::string& what) {
        if (peek().kind != Token::Kind::Ident) fail(peek(), "expected " + what);
        return next().text;
    }

    void parse_document() {
        bool saw_machine = false;
        while (peek().kind != Token::Kind::End) {
            const Token& t = peek();
            if (t.kind != Token::Kind::Ident) fail(t, "expected a statement keyword");
            if (t.text == "machine") {
                next();
                if (saw_machine) fail(t, "duplicate 'machine' statement");
                saw_machine = true;
                machine_.name = expect_ident("machine name");
            } else if (t.text == "alphabet") {
                next();
                parse_alphabet(t);
            } else if (t.text == "param") {
                next();
                const Token& name_tok = peek();
                const std::string pname = expect_ident("param name");
                check_fresh_name(name_tok, pname);
                expect_punct("=");
                params_[pname] = parse_signed_number();
            } else if (t.text == "var") {
                next();
                parse_var();
            } else if (t.text == "mode") {
                next();
                parse_mode();
            } else if (t.text == "terminal") {
                next();
                parse_terminal();
            } else {
                fail(t, "unknown statement '" + t.text + "'");
            }
        }
        if (!saw_machine) {
            Token t;
            fail(t, "missing 'machine' statement");
        }
    }

    void parse_alphabet(const Token& at) {
        if (machine_.props.size() > 0) fail(at, "duplicate 'alphabet' statement");
        expect_punct("{");
        std::vector<std::string> symbols;
        if (!accept_punct("}")) {
            while (true) {
                symbols.push_back(expect_ident("proposition name"));
                if (accept_punct("}")) break;
                expect_punct(",");
            }
        }
        try {
            machine_.props = PropositionSet(symbols);
        } catch (const DefinitionError& e) {
            fail(at, e.what());
        }
    }

    void parse_var() {
        const Token& name_tok = peek();
        const std::string vname = expect_ident("variable name");
        check_fresh_name(name_tok, vname);
        expect_punct(":");
        const std::string type = expect_ident("type");
        if (type != "real") fail(name_tok, "only 'real' variables are supported");
        if (!accept_ident("init")) fail(peek(), "expected 'init'");
        const double init = parse_signed_number();
        if (!accept_ident("bounds")) fail(peek(), "expected 'bounds'");
        expect_punct("[");
        const double lo = parse_signed_number();
        expect_punct(",");
        const double hi = parse_signed_number();
        expect_punct("]");
        machine_.var_names.push_back(vname);
        machine_.psi_init.push_back(init);
        machine_.psi_bounds.emplace_back(lo, hi);
    }

    void parse_mode() {
        Mode mode;
        const Token& name_tok = peek();
        mode.name = expect_ident("mode name");
        if (machine_.find_mode(mode.name) >= 0) fail(name_tok, "duplicate mode " + mode.name);
        bool is_init = accept_ident("init");
        expect_punct("{");
        mode.flow = FlowSpec::zero(machine_.psi_init.size());
        while (!accept_punct("}")) {
            if (accept_ident("flow")) {
                parse_flow(mode);
            } else if (accept_ident("on")) {
                parse_edge(mode);
            } else {
                fail(peek(), "expected 'flow', 'on' or '}' in mode body");
            }
        }
        if (is_init) {
            if (init_seen_) fail(name_tok, "multiple modes marked init");
            init_seen_ = true;
            machine_.initial_mode = static_cast<int>(machine_.modes.size());
        }
        machine_.modes.push_back(std::move(mode));
    }

    void parse_flow(Mode& mode) {
        expect_punct("{");
        const std::size_t dim = machine_.psi_init.size();
        std::vector<double> matrix(dim * dim, 0.0);
        std::vector<double> offset(dim, 0.0);
        bool any_matrix = false;
        while (!accept_punct("}")) {
            const Token& vt = peek();
            const std::string vname = expect_ident("variable name");
            const int v = var_index(vname);
            if (v < 0) fail(vt, "unknown variable '" + vname + "' in flow");
            expect_punct("'");
            expect_punct("=");
            const Affine a = parse_affine(false);
            if (a.k_coeff != 0.0) fail(vt, "flow derivative cannot reference k");
            for (std::size_t j = 0; j < dim; ++j) {
                matrix[static_cast<std::size_t>(v) * dim + j] = a.coeff[j];
                if (a.coeff[j] != 0.0) any_matrix = true;
            }
            offset[static_cast<std::size_t>(v)] = a.constant;
            expect_punct(";");
        }
        mode.flow.offset = std::move(offset);
        mode.flow.matrix = any_matrix ? std::move(matrix) : std::vector<double>{};
    }

    void parse_edge(Mode& mode) {
        Edge edge;
        edge.guard = parse_guard();
        expect_punct("->");
        const Token& target_tok = peek();
        const std::string target = expect_ident("target mode name");
        if (!accept_ident("reward")) fail(peek(), "expected 'reward'");
        edge.reward = parse_signed_number();
        pending_targets_.push_back({static_cast<int>(machine_.modes.size()),
                                    static_cast<int>(mode.edges.size()), target, target_tok.line,
                                    target_tok.column});
        edge.target = -1;
        mode.edges.push_back(std::move(edge));
    }

    void parse_terminal() {
        TerminalSpec term;
        const Token& target_tok = peek();
        const std::string target = expect_ident("mode name");
        if (accept_ident("when")) {
            while (true) {
                const bool parens = accept_punct("(");
                term.predicates.push_back(parse_predicate());
                if (parens) expect_punct(")");
                if (!accept_punct("&")) break;
            }
        }
        pending_terminals_.push_back({static_cast<int>(machine_.terminals.size()), 0, target,
                                      target_tok.line, target_tok.column});
        term.mode = -1;
        machine_.terminals.push_back(std::move(term));
    }

    // --- guards -----------------------------------------------------------

    Guard parse_guard() {
        Guard g;
        std::optional<BoolExpr> formula;
        while (true) {
            if (auto pred = try_parse_predicate_item()) {
                g.predicates.push_back(std::move(*pred));
            } else {
                BoolExpr item = parse_bool_or();
                formula = formula ? BoolExpr::make_and(std::move(*formula), std::move(item))
                                  : std::move(item);
            }
            if (!accept_punct("&")) break;
        }
        if (!formula)
            fail(peek(),
                 "guard needs a propositional part; use a tautology such as 'p | !p' if the "
                 "transition is label-independent");
        g.formula = std::move(*formula);
        return g;
    }

    // A conjunct is a continuous predicate when it reads as an affine
    // expression followed by 'in'. Backtrack otherwise.
    std::optional<LinearPredicate> try_parse_predicate_item() {
        const std::size_t save = pos_;
        const bool parens = accept_punct("(");
        try {
            const Affine a = parse_affine(false);
            if (!accept_ident("in")) {
                pos_ = save;
                return std::nullopt;
            }
            LinearPredicate p = parse_interval(a);
            if (parens) expect_punct(")");
            return p;
        } catch (const ParseError&) {
            pos_ = save;
            return std::nullopt;
        }
    }

    LinearPredicate parse_predicate() {
        const Affine a = parse_affine(false);
        if (!accept_ident("in")) fail(peek(), "expected 'in'");
        return parse_interval(a);
    }

    LinearPredicate parse_interval(const Affine& a) {
        LinearPredicate p;
        p.coeff = a.coeff;
        p.coeff.resize(machine_.psi_init.size(), 0.0);
        p.k_coeff = a.k_coeff;
        if (accept_punct("[")) {
            p.lo_open = false;
        } else if (accept_punct("(")) {
            p.lo_open = true;
        } else {
            fail(peek(), "expected '[' or '(' to open an interval");
        }
        p.lo = parse_bound() - a.constant;
        expect_punct(",");
        p.hi = parse_bound() - a.constant;
        if (accept_punct("]")) {
            p.hi_open = false;
        } else if (accept_punct(")")) {
            p.hi_open = true;
        } else {
            fail(peek(), "expected ']' or ')' to close an interval");
        }
        return p;
    }

    double parse_bound() {
        const Token& at = peek();
        const Affine a = parse_affine(true);
        if (!a.is_constant()) fail(at, "interval bound must be a constant");
        return a.constant;
    }

    BoolExpr parse_bool_or() {
        BoolExpr lhs = parse_bool_and();
        while (accept_punct("|")) lhs = BoolExpr::make_or(std::move(lhs), parse_bool_and());
        return lhs;
    }

    BoolExpr parse_bool_and() {
        BoolExpr lhs = parse_bool_unary();
        while (true) {
            // '&' binds a following boolean factor here; a following
            // predicate belongs to the guard level, so stop before it.
            const std::size_t save = pos_;
            if (!accept_punct("&")) break;
            if (peek_predicate_start()) {
                pos_ = save;
                break;
            }
            lhs = BoolExpr::make_and(std::move(lhs), parse_bool_unary());
        }
        return lhs;
    }

    bool peek_predicate_start() {
        const std::size_t save = pos_;
        auto result = try_parse_predicate_item();
        pos_ = save;
        return result.has_value();
    }

    BoolExpr parse_bool_unary() {
        if (accept_punct("!")) return BoolExpr::make_not(parse_bool_unary());
        const Token& t = peek();
        if (t.kind == Token::Kind::Ident) {
            auto bit = machine_.props.find(t.text);
            if (!bit) fail(t, "unknown proposition '" + t.text + "'");
            next();
            return BoolExpr::make_atom(*bit);
        }
        if (accept_punct("(")) {
            BoolExpr e = parse_bool_or();
            expect_punct(")");
            return e;
        }
        fail(t, "expected a proposition");
    }

    // --- affine expressions -------------------------------------------------

    double parse_signed_number() {
        const Token& at = peek();
        const Affine a = parse_affine(false);
        if (!a.is_constant()) fail(at, "expected a numeric constant");
        return a.constant;
    }

    Affine parse_affine(bool allow_inf) {
        Affine lhs = parse_affine_term(allow_inf);
        while (true) {
            if (accept_punct("+")) {
                const Affine rhs = parse_affine_term(allow_inf);
                add_into(lhs, rhs, 1.0);
            } else if (accept_punct("-")) {
                const Affine rhs = parse_affine_term(allow_inf);
                add_into(lhs, rhs, -1.0);
            } else {
                break;
            }
        }
        return lhs;
    }

    Affine parse_affine_term(bool allow_inf) {
        Affine lhs = parse_affine_factor(allow_inf);
        while (true) {
            if (accept_punct("*")) {
                const Token& at = peek();
                const Affine rhs = parse_affine_factor(allow_inf);
                if (lhs.is_constant()) {
                    lhs = scale(rhs, lhs.constant);
                } else if (rhs.is_constant()) {
                    lhs = scale(lhs, rhs.constant);
                } else {
                    fail(at, "product of two non-constant expressions is not affine");
                }
            } else if (accept_punct("/")) {
                const Token& at = peek();
                const Affine rhs = parse_affine_factor(allow_inf);
                if (!rhs.is_constant() || rhs.constant == 0.0)
                    fail(at, "division only by a non-zero constant");
                lhs = scale(lhs, 1.0 / rhs.constant);
            } else {
                break;
            }
        }
        return lhs;
    }

    Affine parse_affine_factor(bool allow_inf) {
        const Token& t = peek();
        if (accept_punct("-")) return scale(parse_affine_factor(allow_inf), -1.0);
        if (accept_punct("+")) return parse_affine_factor(allow_inf);
        if (t.kind == Token::Kind::Number) {
            next();
            Affine a = blank();
            a.constant = t.number;
            return a;
        }
        if (t.kind == Token::Kind::Ident) {
            if (t.text == "k") {
                next();
                Affine a = blank();
                a.k_coeff = 1.0;
                return a;
            }
            if (t.text == "inf") {
                if (!allow_inf) fail(t, "'inf' is only allowed as an interval bound");
                next();
                Affine a = blank();
                a.constant = std::numeric_limits<double>::infinity();
                return a;
            }
            if (auto it = params_.find(t.text); it != params_.end()) {
                next();
                Affine a = blank();
                a.constant = it->second;
                return a;
            }
            if (int v = var_index(t.text); v >= 0) {
                next();
                Affine a = blank();
                a.coeff[static_cast<std::size_t>(v)] = 1.0;
                return a;
            }
            fail(t, "unknown identifier '" + t.text + "' in expression");
        }
        if (accept_punct("(")) {
            Affine a = parse_affine(allow_inf);
            expect_punct(")");
            return a;
        }
        fail(t, "expected an expression");
    }

    Affine blank() const {
        Affine a;
        a.coeff.assign(machine_.psi_init.size(), 0.0);
        return a;
    }

    static Affine scale(Affine a, double s) {
        for (double& c : a.coeff) c *= s;
        a.k_coeff *= s;
        a.constant *= s;
        return a;
    }

    static void add_into(Affine& lhs, const Affine& rhs, double sign) {
        for (std::size_t i = 0; i < lhs.coeff.size(); ++i) lhs.coeff[i] += sign * rhs.coeff[i];
        lhs.k_coeff += sign * rhs.k_coeff;
        lhs.constant += sign * rhs.constant;
    }

    // --- name resolution ----------------------------------------------------

    int var_index(const std::string& name) const {
        for (std::size_t i = 0; i < machine_.var_names.size(); ++i)
            if (machine_.var_names[i] == name) return static_cast<int>(i);
        return -1;
    }

    void check_fresh_name(const Token& at, const std::string& name) {
        if (params_.count(name) || var_index(name) >= 0 || machine_.props.find(name) || name == "k")
            fail(at, "name '" + name + "' is already in use");
    }

    struct PendingRef {
        int owner;  // mode index for edges, terminal index for terminals
        int edge;
        std::string target;
        int line;
        int column;
    };

    void resolve() {
        for (const auto& ref : pending_targets_) {
            const int target = machine_.find_mode(ref.target);
            if (target < 0) {
                errors_.push_back(Diagnostic{Diagnostic::Severity::Error,
                                             "undefined mode '" + ref.target + "'", ref.line,
                                             ref.column});
                continue;
            }
            machine_.modes[ref.owner].edges[ref.edge].target = target;
        }
        for (const auto& ref : pending_terminals_) {
            const int target = machine_.find_mode(ref.target);
            if (target < 0) {
                errors_.push_back(Diagnostic{Diagnostic::Severity::Error,
                                             "undefined mode '" + ref.target + "'", ref.line,
                                             ref.column});
                continue;
            }
            machine_.terminals[ref.owner].mode = target;
        }
        if (!init_seen_ && !machine_.modes.empty())
            errors_.push_back(Diagnostic{Diagnostic::Severity::Error,
                                         "no mode is marked 'init'", 1, 1});
    }

    const std::vector<Token>& tokens_;
    std::size_t pos_ = 0;
    PrmDefinition machine_;
    std::map<std::string, double> params_;
    std::vector<PendingRef> pending_targets_;
    std::vector<PendingRef> pending_terminals_;
    std::vector<Diagnostic> errors_;
    bool init_seen_ = false;
};

}  // namespace

ParseResult parse_prm(const SourceDocument& doc) {
    try {
        Lexer lexer(doc.text);
        Parser parser(lexer.tokens());
        return parser.run();
    } catch (const ParseError& e) {
        ParseResult r;
        r.diagnostics.push_back(e.diag);
        return r;
    }
}

PrmDefinition load_prm_file(const std::string& path) {
    auto result = parse_prm(SourceDocument::from_file(path));
    if (!result.ok()) {
        std::string msg = path + " failed to parse:";
        for (const auto& d : result.diagnostics) msg += "\n  " + d.str();
        throw ConfigError(msg);
    }
    auto issues = validate_prm(*result.machine);
    for (const auto& d : issues)
        if (d.severity == Diagnostic::Severity::Error) {
            std::string msg = path + " failed validation:";
            for (const auto& i : issues) msg += "\n  " + i.str();
            throw ConfigError(msg);
        }
    return std::move(*result.machine);
}

}  // namespace prmrl
