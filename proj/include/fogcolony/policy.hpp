#pragma once

#include "fogcolony/model.hpp"

#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace fogcolony::policy {

/// Rule actions map one-to-one onto the placement-changing operations an
/// agent may request.
enum class Action { Undeploy, Migrate, Replicate };

const char* action_name(Action a);
OpKind action_op_kind(Action a);

enum class TargetKind { Self, SoleSource, HottestSource, HottestViolatingSource };

struct TargetExpr {
    TargetKind kind = TargetKind::Self;
    /// Drops request summaries whose last hop was already refused this kind
    /// of operation. The filtered view feeds the whole rule: trigger atoms
    /// and target aggregation alike.
    bool excluding_inhibited = false;

    bool operator==(const TargetExpr& o) const {
        return kind == o.kind && excluding_inhibited == o.excluding_inhibited;
    }
};

enum class Atom {
    NoRequests,
    Overloaded,
    LatencyViolated,
    TargetNotSelf,
    TargetIsSelf,
    TargetHasCapacity,
    NotInhibited,
};

/// Guard tree. And/Or nodes are n-ary and flattened, so the pretty-printed
/// form re-parses to an equal tree.
struct GuardExpr {
    enum class Kind { Atom, Not, And, Or };

    Kind kind = Kind::Atom;
    Atom atom = Atom::NoRequests;
    std::vector<GuardExpr> children;

    static GuardExpr make_atom(Atom a);
    static GuardExpr make_not(GuardExpr inner);
    static GuardExpr make_and(std::vector<GuardExpr> terms);
    static GuardExpr make_or(std::vector<GuardExpr> terms);

    bool operator==(const GuardExpr& o) const;
};

struct Rule {
    std::string label;
    Action action = Action::Undeploy;
    TargetExpr target;
    GuardExpr guard;

    bool operator==(const Rule& o) const {
        return label == o.label && action == o.action && target == o.target &&
               guard == o.guard;
    }
};

/// An ordered rule list; the first rule whose target resolves and whose
/// guard holds decides the agent's operation for the cycle.
struct PolicyProgram {
    std::string name;
    std::vector<Rule> rules;

    bool operator==(const PolicyProgram& o) const {
        return name == o.name && rules == o.rules;
    }
};

class ParseError : public std::runtime_error {
public:
    ParseError(std::string msg, int line, int col);
    int line() const { return line_; }
    int col() const { return col_; }

private:
    int line_;
    int col_;
};

/// Parses a policy program; throws ParseError with line/column on bad input.
PolicyProgram parse_policy(const std::string& text);
PolicyProgram parse_policy_file(const std::string& path);

/// Canonical source form; parse(print(p)) == p.
std::string print_policy(const PolicyProgram& program);

/// First-match evaluation over one agent's knowledge base. Returns nothing
/// when no rule fires. Pure: the kb is never modified.
std::optional<Operation> evaluate(const PolicyProgram& program, const KnowledgeBase& kb);

// Building blocks, shared by the rule evaluator and exposed for direct use.

double sum_request_rates(const std::vector<RequestSummary>& requests);

/// Groups summaries by last hop (minus excluded hops), sums rates and returns
/// the argmax. Ties break to the lexicographically smallest node id, with
/// self ordered last. Nothing when every group is excluded or none exist.
std::optional<SourceId> hottest_source(const std::vector<RequestSummary>& requests,
                                       const std::vector<SourceId>& exclusions);

/// The single distinct last hop across all summaries, provided it is unique
/// and not self.
std::optional<SourceId> sole_source(const std::vector<RequestSummary>& requests);

/// Summaries whose path latency strictly exceeds the bound.
std::vector<RequestSummary> violating_subset(const std::vector<RequestSummary>& requests,
                                             double max_latency);

} // namespace fogcolony::policy
