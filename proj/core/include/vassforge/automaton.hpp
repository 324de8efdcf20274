#ifndef VASSFORGE_AUTOMATON_HPP
#define VASSFORGE_AUTOMATON_HPP

#include <array>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "vassforge/core.hpp"

namespace vassforge::automaton {

/// The three counters are hard-wired; the reduction layout depends on it.
enum class Counter : std::uint8_t { X = 0, Y = 1, Z = 2 };

const char* counter_name(Counter c);
Counter counter_from_name(const std::string& name);

struct CaOp {
    enum class Kind { Add, ZeroTest };
    Kind kind = Kind::Add;
    Counter counter = Counter::X;
    long long delta = 0; // Add only

    static CaOp add(Counter c, long long delta) { return CaOp{Kind::Add, c, delta}; }
    static CaOp zero_test(Counter c) { return CaOp{Kind::ZeroTest, c, 0}; }
};

struct CaTransition {
    std::string from;
    CaOp op;
    std::string to;
};

/// Counter automaton with three nonnegative counters and zero-test guards.
/// An accepting run starts in `initial` with all counters zero and ends in
/// `accepting` with all counters zero.
struct ThreeCounterAutomaton {
    std::vector<std::string> states;
    std::string initial;
    std::string accepting;
    std::vector<CaTransition> transitions;

    void validate() const;
};

struct CaConfig {
    std::string state;
    std::array<Big, 3> values{Big(0), Big(0), Big(0)};

    bool operator==(const CaConfig& other) const = default;
};

/// Applies one transition. Throws StateMismatch, NegativeCounter, or
/// ZeroTestFailed when the guard does not hold.
CaConfig ca_step(const ThreeCounterAutomaton& a, const CaConfig& config, std::size_t transition);

struct BoundedRunQuery {
    Big bound = 0;               // every counter stays <= bound
    std::size_t max_states = 5'000'000;
};

struct CaRun {
    std::vector<std::uint32_t> steps; // indices into `transitions`
};

/// Exhaustive BFS over (state, x, y, z) with every counter bounded by N.
/// Returns a witness accepting run or a definitive "none exists within the
/// bound" (the bounded space is finite and fully explored).
std::optional<CaRun> find_bounded_accepting_run(const ThreeCounterAutomaton& a,
                                                const BoundedRunQuery& query);

json automaton_to_json(const ThreeCounterAutomaton& a);
ThreeCounterAutomaton automaton_from_json(const json& j);

} // namespace vassforge::automaton

#endif
