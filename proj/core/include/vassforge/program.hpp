#ifndef VASSFORGE_PROGRAM_HPP
#define VASSFORGE_PROGRAM_HPP

#include <map>
#include <string>
#include <vector>

#include "vassforge/core.hpp"
#include "vassforge/oracle.hpp"

namespace vassforge::program {

/// One counter update inside a basic instruction, e.g. `x += 2` / `x -= 1`.
/// Deltas keep their multiplicity: a basic may update the same counter
/// several times and the copies are only summed at compile time.
struct Atom {
    std::string counter;
    long long delta = 0;

    bool operator==(const Atom& other) const = default;
};

/// Instruction tree node: a basic update block, a loop, or the bounded
/// for-macro (body repeated `count` times, no loop variable).
struct Instruction {
    enum class Kind { Basic, Loop, ForN };

    Kind kind = Kind::Basic;
    std::vector<Atom> atoms;        // Basic
    long long count = 0;            // ForN
    std::vector<Instruction> body;  // Loop / ForN

    static Instruction basic(std::vector<Atom> atoms);
    static Instruction loop(std::vector<Instruction> body);
    static Instruction forn(long long count, std::vector<Instruction> body);

    bool operator==(const Instruction& other) const;
};

using Body = std::vector<Instruction>;

struct CounterProgram {
    std::vector<std::string> counters;
    Body instructions;

    bool operator==(const CounterProgram& other) const = default;
};

/// Parses the line-oriented DSL (see the grammar in the README). Throws
/// SyntaxError with line/column and UndeclaredCounter.
CounterProgram parse(const std::string& text);

/// Canonical formatter; parse(print(p)) == p for every AST.
std::string print(const CounterProgram& p);

/// Replaces every ForN(n, body) by n sequential copies of the (recursively
/// expanded) body. The output contains no ForN nodes.
CounterProgram expand_for(const CounterProgram& p);

/// Total number of instruction nodes, pre-order over the whole tree. This is
/// the index space instrumentation schedules address.
std::size_t instruction_count(const CounterProgram& p);

struct CompiledProgram {
    Vass vass;
    std::uint32_t source = 0;
    std::uint32_t target = 0;
    std::map<std::string, std::size_t> counter_index;

    const std::string& source_name() const { return vass.state_name(source); }
    const std::string& target_name() const { return vass.state_name(target); }

    Configuration config(const std::string& state, Vec values) const {
        return make_config(vass, state, std::move(values));
    }
    Configuration at_source(Vec values) const { return config(source_name(), std::move(values)); }
    Configuration at_target(Vec values) const { return config(target_name(), std::move(values)); }
};

/// Compiles a for-free program to a VASS with one chain state per
/// instruction. A basic becomes a single transition carrying all its deltas;
/// a loop adds zero-effect entry/exit edges around its body plus a skip edge,
/// except that a single-basic body collapses to a self-loop and a trailing
/// loop reuses its own chain state as the target.
CompiledProgram compile(const CounterProgram& p);

struct ProgramReach {
    std::vector<Vec> values; // sorted, duplicate-free
    bool bound_exceeded = false;

    bool contains(const Vec& v) const;
};

/// All counter valuations u_out with source(u_in) ->* target(u_out), explored
/// exhaustively under the per-counter cap.
ProgramReach program_reach(const CompiledProgram& p, const Vec& u_in, const Big& cap,
                           std::size_t max_states = oracle::kDefaultMaxStates);

} // namespace vassforge::program

#endif
