#include "vassforge/program.hpp"

#include <algorithm>
#include <set>
#include <sstream>

namespace vassforge::program {

Instruction Instruction::basic(std::vector<Atom> atoms) {
    Instruction i;
    i.kind = Kind::Basic;
    i.atoms = std::move(atoms);
    return i;
}

Instruction Instruction::loop(std::vector<Instruction> body) {
    Instruction i;
    i.kind = Kind::Loop;
    i.body = std::move(body);
    return i;
}

Instruction Instruction::forn(long long count, std::vector<Instruction> body) {
    if (count < 0) raise(ErrorCode::InvalidArgument, "for-macro count must be nonnegative");
    Instruction i;
    i.kind = Kind::ForN;
    i.count = count;
    i.body = std::move(body);
    return i;
}

bool Instruction::operator==(const Instruction& other) const {
    if (kind != other.kind) return false;
    switch (kind) {
        case Kind::Basic: return atoms == other.atoms;
        case Kind::Loop: return body == other.body;
        case Kind::ForN: return count == other.count && body == other.body;
    }
    return false;
}

// ---------------------------------------------------------------------------
// Parsing

namespace {

const std::set<std::string> kKeywords = {"counters", "loop", "for"};

struct Token {
    enum class Kind { Ident, Nat, PlusEq, MinusEq, LBrace, RBrace, Newline, End };
    Kind kind;
    std::string text;
    long long value = 0;
    int line = 0;
    int col = 0;
};

class Lexer {
  public:
    explicit Lexer(const std::string& text) : text_(text) {}

    std::vector<Token> tokens() {
        std::vector<Token> out;
        while (pos_ < text_.size()) {
            char c = text_[pos_];
            if (c == '#') {
                while (pos_ < text_.size() && text_[pos_] != '\n') ++pos_;
                continue;
            }
            if (c == '\n') {
                out.push_back(token(Token::Kind::Newline, "\n"));
                ++pos_;
                ++line_;
                col_ = 1;
                continue;
            }
            if (c == ' ' || c == '\t' || c == '\r') {
                ++pos_;
                ++col_;
                continue;
            }
            if (c == '{') {
                out.push_back(token(Token::Kind::LBrace, "{"));
                advance(1);
                continue;
            }
            if (c == '}') {
                out.push_back(token(Token::Kind::RBrace, "}"));
                advance(1);
                continue;
            }
            if (c == '+' || c == '-') {
                if (pos_ + 1 >= text_.size() || text_[pos_ + 1] != '=') fail("expected '='");
                out.push_back(
                    token(c == '+' ? Token::Kind::PlusEq : Token::Kind::MinusEq, {c, '='}));
                advance(2);
                continue;
            }
            if (std::isdigit(static_cast<unsigned char>(c))) {
                std::size_t start = pos_;
                while (pos_ < text_.size() && std::isdigit(static_cast<unsigned char>(text_[pos_])))
                    ++pos_;
                std::string digits = text_.substr(start, pos_ - start);
                Token t;
                t.kind = Token::Kind::Nat;
                t.text = digits;
                t.line = line_;
                t.col = col_;
                try {
                    t.value = std::stoll(digits);
                } catch (const std::exception&) {
                    fail("number literal out of range");
                }
                col_ += static_cast<int>(digits.size());
                out.push_back(std::move(t));
                continue;
            }
            if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
                std::size_t start = pos_;
                while (pos_ < text_.size() &&
                       (std::isalnum(static_cast<unsigned char>(text_[pos_])) ||
                        text_[pos_] == '_'))
                    ++pos_;
                std::string word = text_.substr(start, pos_ - start);
                Token t;
                t.kind = Token::Kind::Ident;
                t.text = word;
                t.line = line_;
                t.col = col_;
                col_ += static_cast<int>(word.size());
                out.push_back(std::move(t));
                continue;
            }
            fail(std::string("unexpected character '") + c + "'");
        }
        out.push_back(token(Token::Kind::End, ""));
        return out;
    }

  private:
    Token token(Token::Kind kind, std::string text) const {
        Token t;
        t.kind = kind;
        t.text = std::move(text);
        t.line = line_;
        t.col = col_;
        return t;
    }
    void advance(int n) {
        pos_ += n;
        col_ += n;
    }
    [[noreturn]] void fail(const std::string& what) const {
        raise(ErrorCode::SyntaxError,
              what + " at line " + std::to_string(line_) + ", column " + std::to_string(col_),
              line_);
    }

    const std::string& text_;
    std::size_t pos_ = 0;
    int line_ = 1;
    int col_ = 1;
};

class Parser {
  public:
    explicit Parser(std::vector<Token> tokens) : tokens_(std::move(tokens)) {}

    CounterProgram parse() {
        CounterProgram p;
        skip_newlines();
        const Token& head = peek();
        if (head.kind != Token::Kind::Ident || head.text != "counters")
            fail(head, "program must start with a 'counters' header");
        next();
        int header_line = head.line;
        while (peek().kind == Token::Kind::Ident && peek().line == header_line) {
            const Token& name = next();
            if (kKeywords.count(name.text)) fail(name, "'" + name.text + "' is a reserved word");
            if (std::find(p.counters.begin(), p.counters.end(), name.text) != p.counters.end())
                fail(name, "counter '" + name.text + "' declared twice");
            p.counters.push_back(name.text);
        }
        if (p.counters.empty()) fail(head, "header declares no counters");
        declared_.insert(p.counters.begin(), p.counters.end());
        p.instructions = parse_body(/*in_block=*/false);
        if (peek().kind != Token::Kind::End) fail(peek(), "unexpected '}'");
        return p;
    }

  private:
    Body parse_body(bool in_block) {
        Body out;
        for (;;) {
            skip_newlines();
            const Token& t = peek();
            if (t.kind == Token::Kind::End) {
                if (in_block) fail(t, "unterminated block, expected '}'");
                return out;
            }
            if (t.kind == Token::Kind::RBrace) {
                if (!in_block) return out; // caller reports the stray brace
                next();
                return out;
            }
            out.push_back(parse_instruction());
        }
    }

    Instruction parse_instruction() {
        const Token& t = peek();
        if (t.kind == Token::Kind::Ident && t.text == "loop") {
            next();
            expect_lbrace();
            return Instruction::loop(parse_body(/*in_block=*/true));
        }
        if (t.kind == Token::Kind::Ident && t.text == "for") {
            next();
            const Token& n = peek();
            if (n.kind != Token::Kind::Nat) fail(n, "expected repetition count after 'for'");
            long long count = n.value;
            next();
            expect_lbrace();
            return Instruction::forn(count, parse_body(/*in_block=*/true));
        }
        return parse_basic();
    }

    Instruction parse_basic() {
        std::vector<Atom> atoms;
        int line = peek().line;
        while (peek().kind == Token::Kind::Ident && peek().line == line) {
            const Token& name = next();
            if (kKeywords.count(name.text))
                fail(name, "'" + name.text + "' cannot start mid-line");
            if (!declared_.count(name.text))
                raise(ErrorCode::UndeclaredCounter,
                      "counter '" + name.text + "' is not declared (line " +
                          std::to_string(name.line) + ")",
                      name.line);
            const Token& op = peek();
            if (op.kind != Token::Kind::PlusEq && op.kind != Token::Kind::MinusEq)
                fail(op, "expected '+=' or '-='");
            next();
            const Token& num = peek();
            if (num.kind != Token::Kind::Nat) fail(num, "expected a number");
            next();
            long long delta = num.value;
            atoms.push_back(Atom{name.text, op.kind == Token::Kind::PlusEq ? delta : -delta});
        }
        if (atoms.empty()) fail(peek(), "expected an instruction");
        return Instruction::basic(std::move(atoms));
    }

    void expect_lbrace() {
        skip_newlines();
        const Token& t = peek();
        if (t.kind != Token::Kind::LBrace) fail(t, "expected '{'");
        next();
    }

    void skip_newlines() {
        while (peek().kind == Token::Kind::Newline) next();
    }

    const Token& peek() const { return tokens_[pos_]; }
    const Token& next() { return tokens_[pos_++]; }

    [[noreturn]] void fail(const Token& t, const std::string& what) const {
        raise(ErrorCode::SyntaxError,
              what + " at line " + std::to_string(t.line) + ", column " + std::to_string(t.col),
              t.line);
    }

    std::vector<Token> tokens_;
    std::size_t pos_ = 0;
    std::set<std::string> declared_;
};

} // namespace

CounterProgram parse(const std::string& text) {
    Lexer lexer(text);
    Parser parser(lexer.tokens());
    return parser.parse();
}

// ---------------------------------------------------------------------------
// Printing

namespace {

void print_atom(std::ostream& os, const Atom& a) {
    if (a.delta >= 0)
        os << a.counter << " += " << a.delta;
    else
        os << a.counter << " -= " << -a.delta;
}

void print_body(std::ostream& os, const Body& body, int indent) {
    std::string pad(static_cast<std::size_t>(indent) * 2, ' ');
    for (const Instruction& ins : body) {
        switch (ins.kind) {
            case Instruction::Kind::Basic: {
                os << pad;
                for (std::size_t i = 0; i < ins.atoms.size(); ++i) {
                    if (i) os << ' ';
                    print_atom(os, ins.atoms[i]);
                }
                os << '\n';
                break;
            }
            case Instruction::Kind::Loop:
                os << pad << "loop {\n";
                print_body(os, ins.body, indent + 1);
                os << pad << "}\n";
                break;
            case Instruction::Kind::ForN:
                os << pad << "for " << ins.count << " {\n";
                print_body(os, ins.body, indent + 1);
                os << pad << "}\n";
                break;
        }
    }
}

} // namespace

std::string print(const CounterProgram& p) {
    std::ostringstream os;
    os << "counters";
    for (const auto& c : p.counters) os << ' ' << c;
    os << '\n';
    print_body(os, p.instructions, 0);
    return os.str();
}

// ---------------------------------------------------------------------------
// For-macro expansion

namespace {

Body expand_body(const Body& body) {
    Body out;
    for (const Instruction& ins : body) {
        switch (ins.kind) {
            case Instruction::Kind::Basic:
                out.push_back(ins);
                break;
            case Instruction::Kind::Loop:
                out.push_back(Instruction::loop(expand_body(ins.body)));
                break;
            case Instruction::Kind::ForN: {
                Body once = expand_body(ins.body);
                for (long long i = 0; i < ins.count; ++i)
                    out.insert(out.end(), once.begin(), once.end());
                break;
            }
        }
    }
    return out;
}

std::size_t count_body(const Body& body) {
    std::size_t n = 0;
    for (const Instruction& ins : body) {
        n += 1;
        if (ins.kind != Instruction::Kind::Basic) n += count_body(ins.body);
    }
    return n;
}

} // namespace

CounterProgram expand_for(const CounterProgram& p) {
    return CounterProgram{p.counters, expand_body(p.instructions)};
}

std::size_t instruction_count(const CounterProgram& p) { return count_body(p.instructions); }

// ---------------------------------------------------------------------------
// Compilation

namespace {

class Compiler {
  public:
    explicit Compiler(const CounterProgram& p) : program_(p), vass_(p.counters) {
        for (std::size_t i = 0; i < p.counters.size(); ++i) index_[p.counters[i]] = i;
    }

    CompiledProgram run() {
        auto [src, trg] = compile_seq(program_.instructions, "");
        CompiledProgram out{std::move(vass_), src, trg, std::move(index_)};
        return out;
    }

  private:
    Vec effect_of_basic(const Instruction& ins) const {
        Vec eff = zero_vec(program_.counters.size());
        for (const Atom& a : ins.atoms) {
            auto it = index_.find(a.counter);
            if (it == index_.end())
                raise(ErrorCode::UndeclaredCounter, "counter '" + a.counter + "' is not declared");
            eff[it->second] += a.delta;
        }
        return eff;
    }

    std::pair<std::uint32_t, std::uint32_t> compile_seq(const Body& body,
                                                        const std::string& prefix) {
        std::size_t k = body.size();
        bool trailing_loop = k > 0 && body.back().kind == Instruction::Kind::Loop;
        std::size_t chain = trailing_loop ? k : k + 1;
        std::vector<std::uint32_t> q;
        q.reserve(chain);
        for (std::size_t i = 1; i <= chain; ++i)
            q.push_back(vass_.add_state(prefix + "q" + std::to_string(i)));

        for (std::size_t i = 0; i < k; ++i) {
            const Instruction& ins = body[i];
            switch (ins.kind) {
                case Instruction::Kind::Basic:
                    vass_.add_transition(q[i], effect_of_basic(ins), q[i + 1]);
                    break;
                case Instruction::Kind::Loop: {
                    if (ins.body.size() == 1 && ins.body[0].kind == Instruction::Kind::Basic) {
                        // Degenerate single-instruction body: a self-loop.
                        vass_.add_transition(q[i], effect_of_basic(ins.body[0]), q[i]);
                    } else {
                        auto [bs, bt] = compile_seq(
                            ins.body, prefix + "L" + std::to_string(i + 1) + ".");
                        vass_.add_transition(q[i], zero_vec(dim()), bs);
                        vass_.add_transition(bt, zero_vec(dim()), q[i]);
                    }
                    if (i + 1 < chain) vass_.add_transition(q[i], zero_vec(dim()), q[i + 1]);
                    break;
                }
                case Instruction::Kind::ForN:
                    raise(ErrorCode::ContainsForMacro,
                          "program still contains a for-macro; call expand_for first");
            }
        }
        return {q.front(), q.back()};
    }

    std::size_t dim() const { return program_.counters.size(); }

    const CounterProgram& program_;
    Vass vass_;
    std::map<std::string, std::size_t> index_;
};

} // namespace

CompiledProgram compile(const CounterProgram& p) {
    if (p.counters.empty()) raise(ErrorCode::InvalidArgument, "program declares no counters");
    return Compiler(p).run();
}

bool ProgramReach::contains(const Vec& v) const {
    return std::binary_search(values.begin(), values.end(), v);
}

ProgramReach program_reach(const CompiledProgram& p, const Vec& u_in, const Big& cap,
                           std::size_t max_states) {
    Configuration src = make_config(p.vass, p.source_name(), u_in);
    oracle::ReachResult r = oracle::bounded_reach(p.vass, src, cap, max_states);
    std::set<Vec> seen;
    for (const Configuration& c : r.at_state(p.target_name())) seen.insert(c.values);
    ProgramReach out;
    out.values.assign(seen.begin(), seen.end());
    out.bound_exceeded = !r.saturated();
    return out;
}

} // namespace vassforge::program
