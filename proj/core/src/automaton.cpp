#include "vassforge/automaton.hpp"

#include <algorithm>
#include <map>
#include <set>

namespace vassforge::automaton {

const char* counter_name(Counter c) {
    switch (c) {
        case Counter::X: return "x";
        case Counter::Y: return "y";
        case Counter::Z: return "z";
    }
    return "?";
}

Counter counter_from_name(const std::string& name) {
    if (name == "x") return Counter::X;
    if (name == "y") return Counter::Y;
    if (name == "z") return Counter::Z;
    raise(ErrorCode::SchemaError, "unknown counter '" + name + "' (expected x, y or z)");
}

void ThreeCounterAutomaton::validate() const {
    std::set<std::string> known(states.begin(), states.end());
    if (known.size() != states.size())
        raise(ErrorCode::InvalidArgument, "automaton states must be distinct");
    if (!known.count(initial)) raise(ErrorCode::InvalidArgument, "initial state not declared");
    if (!known.count(accepting)) raise(ErrorCode::InvalidArgument, "accepting state not declared");
    for (const auto& t : transitions)
        if (!known.count(t.from) || !known.count(t.to))
            raise(ErrorCode::InvalidArgument, "transition endpoint not declared");
}

CaConfig ca_step(const ThreeCounterAutomaton& a, const CaConfig& config, std::size_t transition) {
    if (transition >= a.transitions.size())
        raise(ErrorCode::InvalidArgument, "transition index out of range");
    const CaTransition& t = a.transitions[transition];
    if (t.from != config.state)
        raise(ErrorCode::StateMismatch, "transition leaves '" + t.from + "' but configuration is at '" +
                                            config.state + "'");
    CaConfig out = config;
    out.state = t.to;
    std::size_t c = static_cast<std::size_t>(t.op.counter);
    if (t.op.kind == CaOp::Kind::Add) {
        out.values[c] += t.op.delta;
        if (out.values[c] < 0)
            raise(ErrorCode::NegativeCounter,
                  std::string("counter '") + counter_name(t.op.counter) + "' would go below zero");
    } else {
        if (config.values[c] != 0)
            raise(ErrorCode::ZeroTestFailed,
                  std::string("counter '") + counter_name(t.op.counter) + "' is nonzero");
    }
    return out;
}

std::optional<CaRun> find_bounded_accepting_run(const ThreeCounterAutomaton& a,
                                                const BoundedRunQuery& query) {
    a.validate();
    if (query.bound < 0) raise(ErrorCode::InvalidArgument, "bound must be nonnegative");

    std::map<std::string, std::uint32_t> state_idx;
    for (std::size_t i = 0; i < a.states.size(); ++i)
        state_idx[a.states[i]] = static_cast<std::uint32_t>(i);
    std::vector<std::vector<std::uint32_t>> outgoing(a.states.size());
    for (std::size_t t = 0; t < a.transitions.size(); ++t)
        outgoing[state_idx.at(a.transitions[t].from)].push_back(static_cast<std::uint32_t>(t));

    auto bound = to_int64(query.bound);
    if (!bound) raise(ErrorCode::MagnitudeCap, "bound exceeds the search's integer range");
    std::int64_t n = *bound;

    struct Node {
        std::uint32_t state;
        std::array<std::int64_t, 3> v;
        bool operator<(const Node& o) const {
            if (state != o.state) return state < o.state;
            return v < o.v;
        }
    };

    Node start{state_idx.at(a.initial), {0, 0, 0}};
    Node goal{state_idx.at(a.accepting), {0, 0, 0}};

    std::map<Node, std::pair<std::uint32_t, std::uint32_t>> parent; // -> (parent key idx, transition)
    std::vector<Node> order;
    std::map<Node, std::uint32_t> index_of;

    auto push = [&](const Node& n_, std::uint32_t par, std::uint32_t via) -> bool {
        if (index_of.count(n_)) return false;
        index_of[n_] = static_cast<std::uint32_t>(order.size());
        order.push_back(n_);
        parent[n_] = {par, via};
        return true;
    };

    constexpr std::uint32_t kRoot = 0xffffffffu;
    push(start, kRoot, 0);

    std::size_t head = 0;
    std::optional<Node> found;
    if (start.state == goal.state && start.v == goal.v) found = start;

    while (!found && head < order.size()) {
        if (order.size() > query.max_states)
            raise(ErrorCode::ExplosionGuard, "bounded automaton search exceeded max_states");
        Node cur = order[head++];
        for (std::uint32_t t : outgoing[cur.state]) {
            const CaTransition& tr = a.transitions[t];
            Node next = cur;
            next.state = state_idx.at(tr.to);
            std::size_t c = static_cast<std::size_t>(tr.op.counter);
            if (tr.op.kind == CaOp::Kind::Add) {
                next.v[c] += tr.op.delta;
                if (next.v[c] < 0 || next.v[c] > n) continue;
            } else {
                if (cur.v[c] != 0) continue;
            }
            if (push(next, index_of.at(cur), t) && next.state == goal.state && next.v == goal.v) {
                found = next;
                break;
            }
        }
    }

    if (!found) return std::nullopt;
    CaRun run;
    Node cur = *found;
    while (true) {
        auto [par, via] = parent.at(cur);
        if (par == kRoot) break;
        run.steps.push_back(via);
        cur = order[par];
    }
    std::reverse(run.steps.begin(), run.steps.end());
    return run;
}

json automaton_to_json(const ThreeCounterAutomaton& a) {
    json out;
    out["states"] = a.states;
    out["initial"] = a.initial;
    out["accepting"] = a.accepting;
    json ts = json::array();
    for (const auto& t : a.transitions) {
        json op;
        if (t.op.kind == CaOp::Kind::Add) {
            op["kind"] = "add";
            op["counter"] = counter_name(t.op.counter);
            op["delta"] = t.op.delta;
        } else {
            op["kind"] = "zerotest";
            op["counter"] = counter_name(t.op.counter);
        }
        json tj;
        tj["from"] = t.from;
        tj["op"] = std::move(op);
        tj["to"] = t.to;
        ts.push_back(std::move(tj));
    }
    out["transitions"] = std::move(ts);
    return out;
}

ThreeCounterAutomaton automaton_from_json(const json& j) {
    auto need = [&](const json& o, const char* key) -> const json& {
        if (!o.is_object() || !o.contains(key))
            raise(ErrorCode::SchemaError, "missing field '" + std::string(key) + "'");
        return o.at(key);
    };
    ThreeCounterAutomaton a;
    a.states = need(j, "states").get<std::vector<std::string>>();
    a.initial = need(j, "initial").get<std::string>();
    a.accepting = need(j, "accepting").get<std::string>();
    for (const auto& tj : need(j, "transitions")) {
        CaTransition t;
        t.from = need(tj, "from").get<std::string>();
        t.to = need(tj, "to").get<std::string>();
        const json& op = need(tj, "op");
        auto kind = need(op, "kind").get<std::string>();
        if (kind == "add") {
            t.op = CaOp::add(counter_from_name(need(op, "counter").get<std::string>()),
                             need(op, "delta").get<long long>());
        } else if (kind == "zerotest") {
            t.op = CaOp::zero_test(counter_from_name(need(op, "counter").get<std::string>()));
        } else {
            raise(ErrorCode::SchemaError, "unknown op kind '" + kind + "'");
        }
        a.transitions.push_back(std::move(t));
    }
    a.validate();
    return a;
}

} // namespace vassforge::automaton
