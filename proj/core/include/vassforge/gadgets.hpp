#ifndef VASSFORGE_GADGETS_HPP
#define VASSFORGE_GADGETS_HPP

#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "vassforge/automaton.hpp"
#include "vassforge/core.hpp"
#include "vassforge/oracle.hpp"
#include "vassforge/program.hpp"

namespace vassforge::gadgets {

// ---------------------------------------------------------------------------
// Fast-growing hierarchy: F_1(n) = 2n, F_k(n) = n-fold iterate of F_{k-1}
// starting from 1.

inline const Big kDefaultMagnitudeCap = Big(1) << 4096;

/// Exact F_k(n). Throws MagnitudeCap as soon as any intermediate value
/// exceeds `magnitude_cap` (the hierarchy outruns any budget immediately).
Big fast_growing(unsigned k, const Big& n, const Big& magnitude_cap = kDefaultMagnitudeCap);

// ---------------------------------------------------------------------------
// Zero-testing via a controlling counter.

/// Cut points and test schedule for one run. `cuts` are configuration indices
/// c_0..c_n into the run (0 = start, steps.size() = end, nondecreasing; ties
/// give empty segments). `test_sets[i]` lists the cut ordinals at which
/// counter i is zero-tested; the controlling counter's set must be empty.
struct ZeroTestPlan {
    std::vector<std::size_t> cuts;
    std::vector<std::vector<std::size_t>> test_sets;
    std::size_t controlling = 0;

    /// N_{j,i}: tests still pending for counter i from cut j on.
    std::size_t pending(std::size_t j, std::size_t i) const;
    std::size_t segments() const { return cuts.empty() ? 0 : cuts.size() - 1; }

    void validate(std::size_t run_length, std::size_t dimension) const;
};

struct SegmentCheck {
    bool holds = false;
    Big controller_effect; // eff(rho_j)[ctl]
    Big weighted_effect;   // sum_i N_{j,i} * eff(rho_j)[i]
};

struct ZeroTestReport {
    bool cond1 = false; // src[ctl] = sum_i N_{0,i} * src[i]
    Big cond1_lhs, cond1_rhs;
    std::vector<SegmentCheck> cond2; // per segment j = 1..n
    bool cond2_all = false;
    bool cond3 = false; // trg[ctl] = 0
    Big trg_controller;
    bool all_conditions = false;

    Big sum_tested;            // sum over i, j in S_i of c_j[i]
    bool sum_identity = false; // trg[ctl] == sum_tested (follows from (1)+(2))

    bool conclusion_claimed = false; // the lemma applies
    bool conclusion_direct = false;  // direct inspection: every tested value is 0
    std::vector<std::pair<std::size_t, std::size_t>> violations; // (counter, cut)
};

/// Evaluates conditions (1)-(3) of the zero-testing lemma on a concrete run
/// and cross-checks the lemma's conclusion against direct inspection. Throws
/// BadPlan on malformed plans and logic_error should the two ever disagree.
ZeroTestReport check_zero_test_conditions(const Vass& v, const Run& r, const ZeroTestPlan& plan);

json plan_to_json(const ZeroTestPlan& p);
ZeroTestPlan plan_from_json(const json& j);

/// A plan whose interior cuts are given as states (resolved against a run by
/// last visit) rather than explicit configuration indices.
struct PlanTemplate {
    std::vector<std::string> cut_states; // c_1..c_{n-1}; start and end implied
    std::vector<std::vector<std::size_t>> test_sets;
    std::size_t controlling = 0;
};

ZeroTestPlan resolve_plan(const Vass& v, const Run& r, const PlanTemplate& t);
json plan_template_to_json(const PlanTemplate& t);
bool json_is_plan_template(const json& j);
PlanTemplate plan_template_from_json(const json& j);

// ---------------------------------------------------------------------------
// Constant-coefficient controller instrumentation.

/// Pending-test counts per counter, keyed by flat pre-order instruction index
/// (basics only). Missing counters count as pending 0.
using Schedule = std::map<std::size_t, std::vector<std::pair<std::string, long long>>>;

/// Adds a controlling counter: each scheduled basic gains one atom carrying
/// sum_i N_i * delta_i over its updates (omitted when the sum is zero, which
/// matches the merged updates used throughout the source constructions).
program::CounterProgram instrument_constant_controller(const program::CounterProgram& p,
                                                       const Schedule& schedule,
                                                       const std::string& controller = "c");

// ---------------------------------------------------------------------------
// Worked examples: unary 3-VASS with exponential shortest run and binary
// 7-VASS with doubly-exponential shortest run.

struct ExampleExp {
    long long n = 1;
    program::CounterProgram program; // instrumented, for-free
    program::CompiledProgram compiled;
    PlanTemplate plan; // S_x, S_y over the p_i/q_i cut states
};

/// The 3-counter program (x, y, c) whose only run from s(0,0,0) to t(0,0,0)
/// visits q_n(2^n, 0, 0).
ExampleExp make_example_exp(long long n);

struct ExampleDoubleExp {
    long long n = 1;
    bool instrumented = true;
    program::CounterProgram program;
    program::CompiledProgram compiled;
};

/// instrumented = false gives the classic 3-counter double-exponential
/// program; true adds the controlling counter plus the bounded-counter
/// zero-test machinery (7 counters: x, y, z, c, zp, zb, zbp).
ExampleDoubleExp make_example_double_exp(long long n, bool instrumented);

// ---------------------------------------------------------------------------
// Big counter values: the (k+1)-dimensional family with finite reachability
// sets and fast-growing maxima.

struct BigCounter {
    unsigned k = 2;
    program::CounterProgram program;
    program::CompiledProgram compiled;

    /// (1, 0, 1^{k-2}, m-1)
    Vec start_valuation(const Big& m) const;
};

BigCounter make_big_counter(unsigned k);

// ---------------------------------------------------------------------------
// Amplifiers, generators, and the reduction from three-counter automata.

/// A 6k-dimensional VASS turning input triples (M, x, Mx) into output triples
/// (F_k(M), y, F_k(M)*y), certified by the test counters being zero at p_out.
struct Amplifier {
    unsigned level = 1;
    program::CounterProgram program;
    program::CompiledProgram compiled;
    std::vector<std::size_t> input_counters;  // 3 indices
    std::vector<std::size_t> output_counters; // 3 indices
    std::vector<std::size_t> test_counters;   // inputs, plus the controller for level >= 2

    const Vass& vass() const { return compiled.vass; }
    const std::string& p_in() const { return compiled.source_name(); }
    const std::string& p_out() const { return compiled.target_name(); }

    /// p_in(M, x, Mx, 0...) as a configuration.
    Configuration input_config(const Big& m, const Big& x) const;
};

Amplifier make_f1_amplifier();

struct FkOptions {
    std::size_t node_cap = 1'000'000; // AST nodes; the construction grows ~C^k
};

/// Recursive F_k-amplifier; level 1 is exactly make_f1_amplifier().
Amplifier make_fk_amplifier(unsigned k, const FkOptions& opts = {});

/// The input value x whose accepting run outputs (F_k(M), y, F_k(M)*y).
/// Implemented for levels 1 and 2 (higher levels are out of desk-scale
/// verification reach).
Big amplifier_witness_input(unsigned level, const Big& m, const Big& y);

/// At its accepting state with test counters zero, emits exactly the triples
/// (value, y, value*y) on the output counters.
struct Generator {
    unsigned level = 1;
    Big value; // it is a `value`-generator
    Big m;     // the M pumped into the underlying amplifier
    program::CounterProgram program;
    program::CompiledProgram compiled;
    std::vector<std::size_t> output_counters;
    std::vector<std::size_t> test_counters;

    const Vass& vass() const { return compiled.vass; }
    Configuration initial() const { return compiled.at_source(zero_vec(vass().dimension())); }
    const std::string& accepting() const { return compiled.target_name(); }
};

Generator make_generator(const Amplifier& a, const Big& m);

/// Pads a generator with always-zero counters up to `dim` dimensions.
Generator embed_generator(const Generator& g, std::size_t dim);

struct Reduction {
    Vass vass;
    Configuration src;
    Configuration trg;
};

/// Lemma-1 construction: src -> trg in the result iff the automaton has an
/// M-bounded accepting run, where M is the generator's value. Requires
/// dimension >= 12 and at most 4 test counters.
Reduction make_reduction(const Generator& g, const automaton::ThreeCounterAutomaton& a);

json amplifier_to_json(const Amplifier& a);
json generator_to_json(const Generator& g);
Generator generator_from_json(const json& j);
json reduction_to_json(const Reduction& r);
Reduction reduction_from_json(const json& j);

// ---------------------------------------------------------------------------
// Oracle-backed contract verification.

enum class RowStatus { Pass, InconclusivePositive, Inconclusive, Fail };

const char* row_status_name(RowStatus s);

struct ContractRow {
    Big y;
    Big x; // witness input fed to the amplifier (0 for generator rows)
    RowStatus status = RowStatus::Inconclusive;
    bool witness_found = false;
    bool counterexample_found = false;
    bool exhausted = false;
    bool clipped = false;
    std::size_t explored = 0;
    std::string note;
};

struct ContractReport {
    Big cap;
    std::vector<ContractRow> rows;

    bool any_fail() const;
    bool all_exact() const; // every row Pass
};

struct VerifyOptions {
    Big cap = 0; // 0 = default 4 * F_k(M) * (y_max + 1)
    std::size_t max_states = oracle::kDefaultMaxStates;
};

/// One row per y in [0, y_max]: feeds the witness input, explores, and checks
/// both directions of the amplifier contract within the cap.
ContractReport verify_amplifier(const Amplifier& a, const Big& m, const Big& y_max,
                                const VerifyOptions& opts = {});

/// Single exploration from the generator's initial configuration; checks the
/// generated set's shape and per-y witnesses.
ContractReport verify_generator(const Generator& g, const Big& y_max,
                                const VerifyOptions& opts = {});

// ---------------------------------------------------------------------------
// Randomized zero-testing trials (instrumented programs + random walks).

struct ZeroTestTrials {
    std::size_t programs = 0;
    std::size_t runs = 0;
    std::size_t conditions_held = 0;      // runs where (1)-(3) all held
    std::size_t conclusions_confirmed = 0; // and direct inspection agreed
    std::size_t sum_identity_checked = 0;
    bool all_consistent = true;
};

/// Generates instrumented programs (<= 3 data counters), walks them randomly
/// to their target, and checks the zero-testing lemma plus the SUM identity
/// on every run. Deterministic for a fixed seed.
ZeroTestTrials run_zerotest_trials(std::size_t num_programs, unsigned seed,
                                   std::size_t walks_per_program = 3,
                                   std::size_t max_steps = 50);

} // namespace vassforge::gadgets

#endif
