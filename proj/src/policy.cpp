#include "fogcolony/policy.hpp"

#include <algorithm>
#include <cctype>
#include <fstream>
#include <map>
#include <sstream>

namespace fogcolony::policy {

const char* action_name(Action a) {
    switch (a) {
    case Action::Undeploy: return "undeploy";
    case Action::Migrate: return "migrate";
    case Action::Replicate: return "replicate";
    }
    return "?";
}

OpKind action_op_kind(Action a) {
    switch (a) {
    case Action::Undeploy: return OpKind::Undeploy;
    case Action::Migrate: return OpKind::Migrate;
    case Action::Replicate: return OpKind::Replicate;
    }
    return OpKind::Undeploy;
}

GuardExpr GuardExpr::make_atom(Atom a) {
    GuardExpr g;
    g.kind = Kind::Atom;
    g.atom = a;
    return g;
}

GuardExpr GuardExpr::make_not(GuardExpr inner) {
    GuardExpr g;
    g.kind = Kind::Not;
    g.children.push_back(std::move(inner));
    return g;
}

// And/Or constructors splice children of the same kind, so structurally
// distinct but equivalent sources ("(a and b) and c") parse to one tree.
static GuardExpr make_nary(GuardExpr::Kind kind, std::vector<GuardExpr> terms) {
    if (terms.size() == 1) return std::move(terms.front());
    GuardExpr g;
    g.kind = kind;
    for (auto& t : terms) {
        if (t.kind == kind) {
            for (auto& c : t.children) g.children.push_back(std::move(c));
        } else {
            g.children.push_back(std::move(t));
        }
    }
    return g;
}

GuardExpr GuardExpr::make_and(std::vector<GuardExpr> terms) {
    return make_nary(Kind::And, std::move(terms));
}

GuardExpr GuardExpr::make_or(std::vector<GuardExpr> terms) {
    return make_nary(Kind::Or, std::move(terms));
}

bool GuardExpr::operator==(const GuardExpr& o) const {
    if (kind != o.kind) return false;
    if (kind == Kind::Atom) return atom == o.atom;
    return children == o.children;
}

ParseError::ParseError(std::string msg, int line, int col)
    : std::runtime_error(std::to_string(line) + ":" + std::to_string(col) + ": " + msg),
      line_(line), col_(col) {}

namespace {

struct Token {
    enum Type { Ident, Colon, LParen, RParen, End } type = End;
    std::string text;
    int line = 0;
    int col = 0;
};

std::vector<Token> tokenize(const std::string& text) {
    std::vector<Token> out;
    int line = 1, col = 1;
    std::size_t i = 0;
    auto advance = [&](char c) {
        if (c == '\n') {
            ++line;
            col = 1;
        } else {
            ++col;
        }
    };
    while (i < text.size()) {
        char c = text[i];
        if (c == '#') {
            while (i < text.size() && text[i] != '\n') advance(text[i++]);
            continue;
        }
        if (std::isspace(static_cast<unsigned char>(c))) {
            advance(c);
            ++i;
            continue;
        }
        if (c == ':') {
            out.push_back({Token::Colon, ":", line, col});
            advance(c);
            ++i;
            continue;
        }
        if (c == '(') {
            out.push_back({Token::LParen, "(", line, col});
            advance(c);
            ++i;
            continue;
        }
        if (c == ')') {
            out.push_back({Token::RParen, ")", line, col});
            advance(c);
            ++i;
            continue;
        }
        if (std::isalnum(static_cast<unsigned char>(c)) || c == '_') {
            int l = line, k = col;
            std::string word;
            while (i < text.size() &&
                   (std::isalnum(static_cast<unsigned char>(text[i])) || text[i] == '_')) {
                word.push_back(text[i]);
                advance(text[i]);
                ++i;
            }
            out.push_back({Token::Ident, word, l, k});
            continue;
        }
        throw ParseError(std::string("unexpected character '") + c + "'", line, col);
    }
    out.push_back({Token::End, "", line, col});
    return out;
}

const std::map<std::string, Atom>& atom_names() {
    static const std::map<std::string, Atom> names = {
        {"no_requests", Atom::NoRequests},
        {"overloaded", Atom::Overloaded},
        {"latency_violated", Atom::LatencyViolated},
        {"target_not_self", Atom::TargetNotSelf},
        {"target_is_self", Atom::TargetIsSelf},
        {"target_has_capacity", Atom::TargetHasCapacity},
        {"not_inhibited", Atom::NotInhibited},
    };
    return names;
}

const char* atom_name(Atom a) {
    for (const auto& [name, atom] : atom_names())
        if (atom == a) return name.c_str();
    return "?";
}

class Parser {
public:
    explicit Parser(const std::string& text) : toks_(tokenize(text)) {}

    PolicyProgram program() {
        PolicyProgram p;
        expect_keyword("policy");
        p.name = expect_ident("policy name");
        while (!at_end()) {
            Token at = peek();
            Rule r = rule();
            for (const auto& prev : p.rules)
                if (prev.label == r.label)
                    throw ParseError("duplicate rule label '" + r.label + "'", at.line,
                                     at.col);
            p.rules.push_back(std::move(r));
        }
        if (p.rules.empty()) {
            Token t = peek();
            throw ParseError("policy has no rules", t.line, t.col);
        }
        return p;
    }

private:
    std::vector<Token> toks_;
    std::size_t pos_ = 0;

    const Token& peek() const { return toks_[pos_]; }
    Token next() { return toks_[pos_++]; }
    bool at_end() const { return peek().type == Token::End; }

    bool accept_keyword(const std::string& kw) {
        if (peek().type == Token::Ident && peek().text == kw) {
            ++pos_;
            return true;
        }
        return false;
    }

    void expect_keyword(const std::string& kw) {
        const Token& t = peek();
        if (!accept_keyword(kw))
            throw ParseError("expected '" + kw + "', found '" + t.text + "'", t.line,
                             t.col);
    }

    std::string expect_ident(const std::string& what) {
        const Token& t = peek();
        if (t.type != Token::Ident)
            throw ParseError("expected " + what + ", found '" + t.text + "'", t.line,
                             t.col);
        return next().text;
    }

    void expect(Token::Type type, const char* what) {
        const Token& t = peek();
        if (t.type != type)
            throw ParseError(std::string("expected ") + what + ", found '" + t.text + "'",
                             t.line, t.col);
        ++pos_;
    }

    Rule rule() {
        expect_keyword("rule");
        Rule r;
        r.label = expect_ident("rule label");
        expect(Token::Colon, "':'");

        Token action_tok = peek();
        std::string act = expect_ident("action (undeploy|migrate|replicate)");
        if (act == "undeploy") r.action = Action::Undeploy;
        else if (act == "migrate") r.action = Action::Migrate;
        else if (act == "replicate") r.action = Action::Replicate;
        else
            throw ParseError("unknown action '" + act + "'", action_tok.line,
                             action_tok.col);

        Token target_tok = peek();
        std::string tgt = expect_ident("target");
        if (tgt == "self") r.target.kind = TargetKind::Self;
        else if (tgt == "sole_source") r.target.kind = TargetKind::SoleSource;
        else if (tgt == "hottest_source") r.target.kind = TargetKind::HottestSource;
        else if (tgt == "hottest_violating_source")
            r.target.kind = TargetKind::HottestViolatingSource;
        else
            throw ParseError("unknown target '" + tgt + "'", target_tok.line,
                             target_tok.col);

        if (peek().type == Token::Ident && peek().text == "excluding_inhibited") {
            Token mod = next();
            if (r.target.kind != TargetKind::HottestSource &&
                r.target.kind != TargetKind::HottestViolatingSource)
                throw ParseError("excluding_inhibited applies only to hottest_source "
                                 "and hottest_violating_source",
                                 mod.line, mod.col);
            r.target.excluding_inhibited = true;
        }

        if (r.action == Action::Undeploy && r.target.kind != TargetKind::Self)
            throw ParseError("undeploy rules must target self", target_tok.line,
                             target_tok.col);

        expect_keyword("when");
        r.guard = expr();
        return r;
    }

    GuardExpr expr() { return disj(); }

    GuardExpr disj() {
        std::vector<GuardExpr> terms;
        terms.push_back(conj());
        while (accept_keyword("or")) terms.push_back(conj());
        return GuardExpr::make_or(std::move(terms));
    }

    GuardExpr conj() {
        std::vector<GuardExpr> terms;
        terms.push_back(term());
        while (accept_keyword("and")) terms.push_back(term());
        return GuardExpr::make_and(std::move(terms));
    }

    GuardExpr term() {
        if (accept_keyword("not")) return GuardExpr::make_not(atom());
        return atom();
    }

    GuardExpr atom() {
        const Token& t = peek();
        if (t.type == Token::LParen) {
            ++pos_;
            GuardExpr inner = expr();
            expect(Token::RParen, "')'");
            return inner;
        }
        if (t.type != Token::Ident)
            throw ParseError("expected condition, found '" + t.text + "'", t.line, t.col);
        auto it = atom_names().find(t.text);
        if (it == atom_names().end())
            throw ParseError("unknown condition '" + t.text + "'", t.line, t.col);
        ++pos_;
        return GuardExpr::make_atom(it->second);
    }
};

int precedence(const GuardExpr& g) {
    switch (g.kind) {
    case GuardExpr::Kind::Or: return 1;
    case GuardExpr::Kind::And: return 2;
    case GuardExpr::Kind::Not: return 3;
    case GuardExpr::Kind::Atom: return 4;
    }
    return 4;
}

void print_guard(std::ostream& os, const GuardExpr& g) {
    switch (g.kind) {
    case GuardExpr::Kind::Atom:
        os << atom_name(g.atom);
        return;
    case GuardExpr::Kind::Not: {
        os << "not ";
        const GuardExpr& inner = g.children.front();
        if (inner.kind == GuardExpr::Kind::Atom) {
            print_guard(os, inner);
        } else {
            os << "(";
            print_guard(os, inner);
            os << ")";
        }
        return;
    }
    case GuardExpr::Kind::And:
    case GuardExpr::Kind::Or: {
        const char* sep = g.kind == GuardExpr::Kind::And ? " and " : " or ";
        for (std::size_t i = 0; i < g.children.size(); ++i) {
            if (i) os << sep;
            const GuardExpr& c = g.children[i];
            if (precedence(c) < precedence(g)) {
                os << "(";
                print_guard(os, c);
                os << ")";
            } else {
                print_guard(os, c);
            }
        }
        return;
    }
    }
}

const char* target_name(TargetKind k) {
    switch (k) {
    case TargetKind::Self: return "self";
    case TargetKind::SoleSource: return "sole_source";
    case TargetKind::HottestSource: return "hottest_source";
    case TargetKind::HottestViolatingSource: return "hottest_violating_source";
    }
    return "?";
}

} // namespace

PolicyProgram parse_policy(const std::string& text) {
    Parser p(text);
    return p.program();
}

PolicyProgram parse_policy_file(const std::string& path) {
    std::ifstream in(path);
    if (!in)
        throw std::runtime_error("cannot open policy file: " + path);
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse_policy(buf.str());
}

std::string print_policy(const PolicyProgram& program) {
    std::ostringstream os;
    os << "policy " << program.name << "\n";
    for (const auto& r : program.rules) {
        os << "\nrule " << r.label << ": " << action_name(r.action) << " "
           << target_name(r.target.kind);
        if (r.target.excluding_inhibited) os << " excluding_inhibited";
        os << " when ";
        print_guard(os, r.guard);
        os << "\n";
    }
    return os.str();
}

double sum_request_rates(const std::vector<RequestSummary>& requests) {
    double total = 0;
    for (const auto& r : requests) total += r.rate;
    return total;
}

std::optional<SourceId> hottest_source(const std::vector<RequestSummary>& requests,
                                       const std::vector<SourceId>& exclusions) {
    std::map<SourceId, double> by_source;
    for (const auto& r : requests) {
        if (std::find(exclusions.begin(), exclusions.end(), r.neighbour) !=
            exclusions.end())
            continue;
        by_source[r.neighbour] += r.rate;
    }
    if (by_source.empty()) return std::nullopt;
    // SourceId order already breaks ties: smallest node id first, self last.
    auto best = by_source.begin();
    for (auto it = std::next(by_source.begin()); it != by_source.end(); ++it)
        if (it->second > best->second) best = it;
    return best->first;
}

std::optional<SourceId> sole_source(const std::vector<RequestSummary>& requests) {
    std::set<SourceId> distinct;
    for (const auto& r : requests) distinct.insert(r.neighbour);
    if (distinct.size() != 1 || distinct.begin()->is_self()) return std::nullopt;
    return *distinct.begin();
}

std::vector<RequestSummary> violating_subset(const std::vector<RequestSummary>& requests,
                                             double max_latency) {
    std::vector<RequestSummary> out;
    for (const auto& r : requests)
        if (r.latency_to_client > max_latency) out.push_back(r);
    return out;
}

namespace {

bool is_inhibited(const KnowledgeBase& kb, OpKind kind, const SourceId& target) {
    for (const auto& rec : kb.inhibited)
        if (rec.kind == kind && rec.instance_id == kb.instance.instance_id &&
            rec.target == target)
            return true;
    return false;
}

std::optional<SourceId> resolve_target(const Rule& rule,
                                       const std::vector<RequestSummary>& view,
                                       const KnowledgeBase& kb) {
    switch (rule.target.kind) {
    case TargetKind::Self:
        return SourceId::self();
    case TargetKind::SoleSource:
        return sole_source(view);
    case TargetKind::HottestSource:
        return hottest_source(view, {});
    case TargetKind::HottestViolatingSource: {
        auto violating = violating_subset(view, kb.service.max_latency_to_client);
        if (violating.empty()) return std::nullopt;
        return hottest_source(violating, {});
    }
    }
    return std::nullopt;
}

bool eval_guard(const GuardExpr& g, const Rule& rule,
                const std::vector<RequestSummary>& view, const KnowledgeBase& kb,
                const SourceId& target) {
    switch (g.kind) {
    case GuardExpr::Kind::Atom:
        switch (g.atom) {
        case Atom::NoRequests:
            return view.empty();
        case Atom::Overloaded:
            return sum_request_rates(view) > kb.service.max_request_rate;
        case Atom::LatencyViolated:
            return !violating_subset(view, kb.service.max_latency_to_client).empty();
        case Atom::TargetNotSelf:
            return !target.is_self();
        case Atom::TargetIsSelf:
            return target.is_self();
        case Atom::TargetHasCapacity:
            return kb.free_hw.covers(kb.service.required_hw);
        case Atom::NotInhibited:
            return !is_inhibited(kb, action_op_kind(rule.action), target);
        }
        return false;
    case GuardExpr::Kind::Not:
        return !eval_guard(g.children.front(), rule, view, kb, target);
    case GuardExpr::Kind::And:
        for (const auto& c : g.children)
            if (!eval_guard(c, rule, view, kb, target)) return false;
        return true;
    case GuardExpr::Kind::Or:
        for (const auto& c : g.children)
            if (eval_guard(c, rule, view, kb, target)) return true;
        return false;
    }
    return false;
}

} // namespace

std::optional<Operation> evaluate(const PolicyProgram& program, const KnowledgeBase& kb) {
    for (const auto& rule : program.rules) {
        std::vector<RequestSummary> view;
        const std::vector<RequestSummary>* requests = &kb.requests;
        if (rule.target.excluding_inhibited) {
            OpKind kind = action_op_kind(rule.action);
            for (const auto& r : kb.requests)
                if (!is_inhibited(kb, kind, r.neighbour)) view.push_back(r);
            requests = &view;
        }
        auto target = resolve_target(rule, *requests, kb);
        if (!target) continue; // unresolvable target fails the rule silently
        if (eval_guard(rule.guard, rule, *requests, kb, *target))
            return Operation{action_op_kind(rule.action), *target};
    }
    return std::nullopt;
}

} // namespace fogcolony::policy
