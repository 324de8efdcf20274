#include "vassforge/gadgets.hpp"

#include <algorithm>
#include <random>
#include <set>
#include <sstream>

namespace vassforge::gadgets {

using program::Atom;
using program::Body;
using program::CounterProgram;
using program::Instruction;

// ---------------------------------------------------------------------------
// Fast-growing hierarchy

Big fast_growing(unsigned k, const Big& n, const Big& magnitude_cap) {
    if (k < 1) raise(ErrorCode::InvalidArgument, "fast_growing requires k >= 1");
    if (n < 0) raise(ErrorCode::InvalidArgument, "fast_growing requires n >= 0");
    if (n > magnitude_cap) raise(ErrorCode::MagnitudeCap, "argument exceeds magnitude cap");
    if (k == 1) {
        Big out = 2 * n;
        if (out > magnitude_cap) raise(ErrorCode::MagnitudeCap, "F_1 value exceeds magnitude cap");
        return out;
    }
    // F_k(n) = F_{k-1}(F_{k-1}(... F_{k-1}(1))) with n applications. Every
    // intermediate is itself checked against the cap, so infeasible (k, n)
    // fail fast instead of exhausting memory.
    Big x = 1;
    for (Big i = 0; i < n; ++i) x = fast_growing(k - 1, x, magnitude_cap);
    return x;
}

// ---------------------------------------------------------------------------
// Zero-test plans

std::size_t ZeroTestPlan::pending(std::size_t j, std::size_t i) const {
    const auto& s = test_sets.at(i);
    return static_cast<std::size_t>(
        std::count_if(s.begin(), s.end(), [&](std::size_t k) { return k >= j; }));
}

void ZeroTestPlan::validate(std::size_t run_length, std::size_t dimension) const {
    if (cuts.size() < 2) raise(ErrorCode::BadPlan, "plan needs at least the start and end cuts");
    if (cuts.front() != 0) raise(ErrorCode::BadPlan, "first cut must be the start configuration");
    if (cuts.back() != run_length) raise(ErrorCode::BadPlan, "last cut must be the final configuration");
    for (std::size_t j = 1; j < cuts.size(); ++j)
        if (cuts[j] < cuts[j - 1]) raise(ErrorCode::BadPlan, "cuts not increasing");
    if (test_sets.size() != dimension)
        raise(ErrorCode::BadPlan, "test_sets must have one entry per counter");
    if (controlling >= dimension) raise(ErrorCode::BadPlan, "controlling counter out of range");
    if (!test_sets[controlling].empty())
        raise(ErrorCode::BadPlan, "controlling counter cannot be zero-tested");
    std::size_t n = segments();
    for (const auto& s : test_sets)
        for (std::size_t k : s)
            if (k > n) raise(ErrorCode::BadPlan, "test index beyond the last cut");
}

ZeroTestReport check_zero_test_conditions(const Vass& v, const Run& r, const ZeroTestPlan& plan) {
    plan.validate(r.steps.size(), v.dimension());

    // Materialize the configurations at the cut points.
    std::vector<Configuration> at_cut;
    {
        Configuration cur = r.start;
        std::size_t next_cut = 0;
        for (std::size_t pos = 0; pos <= r.steps.size(); ++pos) {
            while (next_cut < plan.cuts.size() && plan.cuts[next_cut] == pos) {
                at_cut.push_back(cur);
                ++next_cut;
            }
            if (pos < r.steps.size()) cur = fire(v, cur, r.steps[pos]);
        }
    }

    std::size_t n = plan.segments();
    std::size_t ctl = plan.controlling;
    ZeroTestReport rep;

    rep.cond1_lhs = at_cut[0].values[ctl];
    rep.cond1_rhs = 0;
    for (std::size_t i = 0; i < v.dimension(); ++i) {
        if (i == ctl) continue;
        rep.cond1_rhs += Big(static_cast<long long>(plan.pending(0, i))) * at_cut[0].values[i];
    }
    rep.cond1 = rep.cond1_lhs == rep.cond1_rhs;

    rep.cond2.resize(n);
    rep.cond2_all = true;
    for (std::size_t j = 1; j <= n; ++j) {
        SegmentCheck& seg = rep.cond2[j - 1];
        seg.controller_effect = at_cut[j].values[ctl] - at_cut[j - 1].values[ctl];
        seg.weighted_effect = 0;
        for (std::size_t i = 0; i < v.dimension(); ++i) {
            if (i == ctl) continue;
            Big eff = at_cut[j].values[i] - at_cut[j - 1].values[i];
            seg.weighted_effect += Big(static_cast<long long>(plan.pending(j, i))) * eff;
        }
        seg.holds = seg.controller_effect == seg.weighted_effect;
        rep.cond2_all = rep.cond2_all && seg.holds;
    }

    rep.trg_controller = at_cut[n].values[ctl];
    rep.cond3 = rep.trg_controller == 0;
    rep.all_conditions = rep.cond1 && rep.cond2_all && rep.cond3;

    rep.sum_tested = 0;
    rep.conclusion_direct = true;
    for (std::size_t i = 0; i < v.dimension(); ++i) {
        if (i == ctl) continue;
        for (std::size_t j : plan.test_sets[i]) {
            rep.sum_tested += at_cut[j].values[i];
            if (at_cut[j].values[i] != 0) {
                rep.conclusion_direct = false;
                rep.violations.emplace_back(i, j);
            }
        }
    }
    rep.sum_identity = rep.trg_controller == rep.sum_tested;
    rep.conclusion_claimed = rep.all_conditions;

    if (rep.conclusion_claimed && !rep.conclusion_direct)
        throw std::logic_error("zero-testing lemma conclusion contradicted by direct inspection");
    return rep;
}

json plan_to_json(const ZeroTestPlan& p) {
    json out;
    out["cuts"] = p.cuts;
    out["test_sets"] = p.test_sets;
    out["controlling"] = p.controlling;
    return out;
}

ZeroTestPlan plan_from_json(const json& j) {
    if (!j.is_object() || !j.contains("cuts") || !j.contains("test_sets") ||
        !j.contains("controlling"))
        raise(ErrorCode::SchemaError, "plan needs cuts, test_sets and controlling");
    ZeroTestPlan p;
    p.cuts = j.at("cuts").get<std::vector<std::size_t>>();
    p.test_sets = j.at("test_sets").get<std::vector<std::vector<std::size_t>>>();
    p.controlling = j.at("controlling").get<std::size_t>();
    return p;
}

ZeroTestPlan resolve_plan(const Vass& v, const Run& r, const PlanTemplate& t) {
    // State sequence along the run.
    std::vector<std::string> states;
    states.reserve(r.steps.size() + 1);
    {
        Configuration cur = r.start;
        states.push_back(cur.state);
        for (std::size_t s : r.steps) {
            cur = fire(v, cur, s);
            states.push_back(cur.state);
        }
    }
    ZeroTestPlan p;
    p.test_sets = t.test_sets;
    p.controlling = t.controlling;
    p.cuts.push_back(0);
    for (const std::string& cs : t.cut_states) {
        std::size_t last = states.size();
        for (std::size_t i = states.size(); i-- > 0;) {
            if (states[i] == cs) {
                last = i;
                break;
            }
        }
        if (last == states.size())
            raise(ErrorCode::BadPlan, "cut state '" + cs + "' never visited by the run");
        p.cuts.push_back(last);
    }
    p.cuts.push_back(r.steps.size());
    p.validate(r.steps.size(), v.dimension());
    return p;
}

json plan_template_to_json(const PlanTemplate& t) {
    json out;
    out["cut_states"] = t.cut_states;
    out["test_sets"] = t.test_sets;
    out["controlling"] = t.controlling;
    return out;
}

bool json_is_plan_template(const json& j) { return j.is_object() && j.contains("cut_states"); }

PlanTemplate plan_template_from_json(const json& j) {
    if (!json_is_plan_template(j) || !j.contains("test_sets") || !j.contains("controlling"))
        raise(ErrorCode::SchemaError, "plan template needs cut_states, test_sets and controlling");
    PlanTemplate t;
    t.cut_states = j.at("cut_states").get<std::vector<std::string>>();
    t.test_sets = j.at("test_sets").get<std::vector<std::vector<std::size_t>>>();
    t.controlling = j.at("controlling").get<std::size_t>();
    return t;
}

// ---------------------------------------------------------------------------
// Instrumentation

namespace {

void instrument_walk(Body& body, std::size_t& flat, const Schedule& schedule,
                     const std::string& controller, const std::set<std::string>& declared) {
    for (Instruction& ins : body) {
        std::size_t idx = flat++;
        auto entry = schedule.find(idx);
        if (ins.kind == Instruction::Kind::Basic) {
            if (entry != schedule.end()) {
                long long sum = 0;
                for (const auto& [counter, pending] : entry->second) {
                    if (pending < 0)
                        raise(ErrorCode::BadSchedule, "pending count must be nonnegative");
                    if (!declared.count(counter))
                        raise(ErrorCode::BadSchedule, "schedule names undeclared counter '" +
                                                          counter + "'");
                    for (const Atom& a : ins.atoms)
                        if (a.counter == counter) sum += pending * a.delta;
                }
                if (sum != 0) ins.atoms.push_back(Atom{controller, sum});
            }
        } else {
            if (entry != schedule.end())
                raise(ErrorCode::BadSchedule, "schedule entry " + std::to_string(idx) +
                                                  " targets a non-basic instruction");
            instrument_walk(ins.body, flat, schedule, controller, declared);
        }
    }
}

} // namespace

program::CounterProgram instrument_constant_controller(const program::CounterProgram& p,
                                                       const Schedule& schedule,
                                                       const std::string& controller) {
    if (std::find(p.counters.begin(), p.counters.end(), controller) != p.counters.end())
        raise(ErrorCode::BadSchedule, "controller name '" + controller + "' already declared");
    CounterProgram out = p;
    out.counters.push_back(controller);
    std::set<std::string> declared(p.counters.begin(), p.counters.end());
    std::size_t flat = 0;
    instrument_walk(out.instructions, flat, schedule, controller, declared);
    return out;
}

// ---------------------------------------------------------------------------
// Worked examples

namespace {

Instruction selfloop(std::vector<Atom> atoms) {
    return Instruction::loop({Instruction::basic(std::move(atoms))});
}

} // namespace

ExampleExp make_example_exp(long long n) {
    if (n < 1) raise(ErrorCode::InvalidArgument, "example-exp requires n >= 1");

    CounterProgram base;
    base.counters = {"x", "y"};
    base.instructions.push_back(Instruction::basic({{"x", 1}}));
    base.instructions.push_back(Instruction::forn(
        n, {selfloop({{"x", -1}, {"y", 1}}), selfloop({{"x", 2}, {"y", -1}})}));
    base.instructions.push_back(selfloop({{"x", -1}}));

    CounterProgram expanded = expand_for(base);

    Schedule schedule;
    schedule[0] = {{"x", n}};
    for (long long i = 1; i <= n; ++i) {
        // flat layout: [0]=basic, then per i: p-loop, p-body, q-loop, q-body
        std::size_t p_body = static_cast<std::size_t>(2 + 4 * (i - 1));
        std::size_t q_body = static_cast<std::size_t>(4 + 4 * (i - 1));
        schedule[p_body] = {{"x", n + 1 - i}, {"y", n + 1 - i}};
        schedule[q_body] = {{"x", n - i}, {"y", n + 1 - i}};
    }

    ExampleExp out;
    out.n = n;
    out.program = instrument_constant_controller(expanded, schedule, "c");
    out.compiled = program::compile(out.program);

    // Cut at the last visit of each p_i / q_i chain state; x is tested at the
    // p-cuts (odd ordinals), y at the q-cuts (even ordinals).
    for (long long i = 1; i <= 2 * n; ++i)
        out.plan.cut_states.push_back("q" + std::to_string(i + 1));
    std::vector<std::size_t> sx, sy;
    for (long long i = 1; i <= n; ++i) {
        sx.push_back(static_cast<std::size_t>(2 * i - 1));
        sy.push_back(static_cast<std::size_t>(2 * i));
    }
    out.plan.test_sets = {sx, sy, {}};
    out.plan.controlling = 2;
    return out;
}

ExampleDoubleExp make_example_double_exp(long long n, bool instrumented) {
    if (n < 1) raise(ErrorCode::InvalidArgument, "example-7vass requires n >= 1");

    ExampleDoubleExp out;
    out.n = n;
    out.instrumented = instrumented;

    if (!instrumented) {
        CounterProgram p;
        p.counters = {"x", "y", "z"};
        p.instructions.push_back(Instruction::basic({{"x", 1}, {"z", n}}));
        p.instructions.push_back(Instruction::loop({
            selfloop({{"x", -1}, {"y", 1}}),
            selfloop({{"x", 2}, {"y", -1}}),
            Instruction::basic({{"z", -1}}),
        }));
        out.program = std::move(p);
        out.compiled = program::compile(out.program);
        return out;
    }

    // Counters: x, y, z, controller c, shadow zp (z'), complements zb (z bar)
    // and zbp (z' bar) with z + zb = n and zp + zbp = n after line 1.
    CounterProgram p;
    p.counters = {"x", "y", "z", "c", "zp", "zb", "zbp"};
    p.instructions.push_back(Instruction::basic({{"x", 1}, {"z", n}, {"c", n}, {"zbp", n}}));

    // add-c-by-(z-2): transfer z into c keeping z + zp constant, zero-test z
    // via its complement, transfer back, zero-test zp, then subtract 2.
    Body add_c_z_minus_2 = {
        Instruction::loop({
            Instruction::basic({{"c", 1}, {"z", -1}, {"zp", 1}}),
            Instruction::basic({{"zb", 1}, {"zbp", -1}}),
        }),
        Instruction::basic({{"zb", -n}}),
        Instruction::basic({{"zb", n}}),
        Instruction::loop({
            Instruction::basic({{"z", 1}, {"zp", -1}}),
            Instruction::basic({{"zb", -1}, {"zbp", 1}}),
        }),
        Instruction::basic({{"zbp", -n}}),
        Instruction::basic({{"zbp", n}}),
        Instruction::basic({{"c", -2}}),
    };

    Body doubling_body;
    doubling_body.push_back(Instruction::basic({{"x", 2}, {"y", -1}}));
    for (auto& ins : add_c_z_minus_2) doubling_body.push_back(std::move(ins));

    p.instructions.push_back(Instruction::loop({
        selfloop({{"x", -1}, {"y", 1}}),
        Instruction::loop(std::move(doubling_body)),
        Instruction::basic({{"z", -1}, {"zb", 1}}),
    }));

    out.program = std::move(p);
    out.compiled = program::compile(out.program);
    return out;
}

// ---------------------------------------------------------------------------
// Big counter values

BigCounter make_big_counter(unsigned k) {
    if (k < 2) raise(ErrorCode::InvalidArgument, "big-counter requires k >= 2");

    auto counter = [](unsigned i) { return "x" + std::to_string(i); };

    // V_2 body; V_j wraps V_{j-1} with a transfer loop and a budget step.
    Body body = {
        selfloop({{counter(1), 2}, {counter(2), -1}}),
        selfloop({{counter(1), -1}, {counter(2), 1}}),
        Instruction::basic({{counter(3), -1}}),
    };
    Instruction vk = Instruction::loop(std::move(body));

    for (unsigned j = 3; j <= k; ++j) {
        Body next;
        next.push_back(std::move(vk));
        next.push_back(selfloop({{counter(1), -1}, {counter(j), 1}}));
        std::vector<Atom> budget{{counter(j + 1), -1}};
        for (unsigned r = 3; r + 1 <= j; ++r) budget.push_back({counter(r), 1});
        next.push_back(Instruction::basic(std::move(budget)));
        vk = Instruction::loop(std::move(next));
    }

    BigCounter out;
    out.k = k;
    out.program.counters.clear();
    for (unsigned i = 1; i <= k + 1; ++i) out.program.counters.push_back(counter(i));
    out.program.instructions.push_back(std::move(vk));
    out.compiled = program::compile(out.program);
    return out;
}

Vec BigCounter::start_valuation(const Big& m) const {
    if (m < 1) raise(ErrorCode::InvalidArgument, "big-counter start requires m >= 1");
    Vec v = zero_vec(k + 1);
    v[0] = 1;
    for (unsigned i = 2; i < k; ++i) v[i] = 1;
    v[k] = m - 1;
    return v;
}

// ---------------------------------------------------------------------------
// Randomized zero-testing trials

namespace {

struct TrialProgram {
    CounterProgram instrumented;
    program::CompiledProgram compiled;
    PlanTemplate plan;
    Vec src_values; // includes the controller entry
};

TrialProgram generate_trial(std::mt19937& rng) {
    std::uniform_int_distribution<int> d_counters(1, 3);
    std::uniform_int_distribution<int> d_loops(1, 4);
    std::uniform_int_distribution<int> d_delta(1, 2);
    std::uniform_int_distribution<int> d_src(0, 2);
    std::uniform_int_distribution<int> d_coin(0, 1);

    int d = d_counters(rng);
    int loops = d_loops(rng);

    CounterProgram base;
    for (int i = 0; i < d; ++i) base.counters.push_back("x" + std::to_string(i + 1));

    // One loop per phase, plus a trailing no-op basic so the target state is
    // distinct from the last loop's chain state.
    for (int p = 0; p < loops; ++p) {
        std::vector<Atom> atoms;
        int width = 1 + d_coin(rng);
        for (int a = 0; a < width; ++a) {
            std::string counter = base.counters[rng() % base.counters.size()];
            long long delta = d_delta(rng);
            bool late = p >= loops / 2;
            // later phases lean negative so counters (and the controller)
            // actually drain to zero on a decent fraction of walks
            bool negative = late ? (rng() % 4 != 0) : d_coin(rng);
            atoms.push_back(Atom{counter, negative ? -delta : delta});
        }
        base.instructions.push_back(Instruction::loop({Instruction::basic(std::move(atoms))}));
    }
    base.instructions.push_back(Instruction::basic({{base.counters[0], 0}}));

    // Test schedule over cut ordinals 0..loops+1.
    int cut_count = loops + 1;
    std::vector<std::vector<std::size_t>> test_sets(static_cast<std::size_t>(d) + 1);
    for (int i = 0; i < d; ++i) {
        for (int c = 0; c <= cut_count; ++c)
            if (rng() % 10 < 4) test_sets[static_cast<std::size_t>(i)].push_back(c);
    }

    auto pending = [&](int seg, int i) {
        const auto& s = test_sets[static_cast<std::size_t>(i)];
        return static_cast<long long>(
            std::count_if(s.begin(), s.end(), [&](std::size_t k) {
                return k >= static_cast<std::size_t>(seg);
            }));
    };

    Schedule schedule;
    for (int p = 0; p < loops; ++p) {
        std::size_t body_idx = static_cast<std::size_t>(2 * p + 1);
        std::vector<std::pair<std::string, long long>> entry;
        for (int i = 0; i < d; ++i) entry.emplace_back(base.counters[static_cast<std::size_t>(i)], pending(p + 1, i));
        schedule[body_idx] = std::move(entry);
    }

    TrialProgram out;
    out.instrumented = instrument_constant_controller(base, schedule, "ctl");
    out.compiled = program::compile(out.instrumented);

    for (int p = 1; p <= loops; ++p) out.plan.cut_states.push_back("q" + std::to_string(p));
    out.plan.test_sets = test_sets;
    out.plan.controlling = static_cast<std::size_t>(d);

    out.src_values = zero_vec(static_cast<std::size_t>(d) + 1);
    for (int i = 0; i < d; ++i) out.src_values[static_cast<std::size_t>(i)] = d_src(rng);
    Big ctl0 = 0;
    for (int i = 0; i < d; ++i)
        ctl0 += Big(pending(0, i)) * out.src_values[static_cast<std::size_t>(i)];
    out.src_values[static_cast<std::size_t>(d)] = ctl0;
    return out;
}

/// Random walk that always terminates at the program target: loops are
/// skippable, so forward progress is never blocked.
Run random_walk(const program::CompiledProgram& cp, const Vec& src_values, std::mt19937& rng,
                std::size_t max_steps) {
    const Vass& v = cp.vass;
    Run run;
    run.start = make_config(v, cp.source_name(), src_values);
    Configuration cur = run.start;
    std::size_t budget = max_steps > v.states().size() ? max_steps - v.states().size() : 0;
    while (true) {
        if (cur.state == cp.target_name()) break;
        std::vector<std::size_t> enabled;
        std::vector<std::size_t> forward; // non-self transitions make progress
        for (std::size_t t = 0; t < v.transitions().size(); ++t) {
            const Transition& tr = v.transitions()[t];
            if (v.state_name(tr.from) != cur.state) continue;
            bool ok = true;
            for (std::size_t i = 0; i < v.dimension(); ++i)
                if (cur.values[i] + tr.effect[i] < 0) { ok = false; break; }
            if (!ok) continue;
            enabled.push_back(t);
            if (tr.to != tr.from) forward.push_back(t);
        }
        std::size_t pick;
        if (run.steps.size() >= budget) {
            // out of random budget: march straight to the target
            pick = forward.front();
        } else {
            pick = enabled[rng() % enabled.size()];
        }
        run.steps.push_back(static_cast<std::uint32_t>(pick));
        cur = fire(v, cur, pick);
    }
    return run;
}

} // namespace

ZeroTestTrials run_zerotest_trials(std::size_t num_programs, unsigned seed,
                                   std::size_t walks_per_program, std::size_t max_steps) {
    std::mt19937 rng(seed);
    ZeroTestTrials out;
    out.programs = num_programs;
    for (std::size_t p = 0; p < num_programs; ++p) {
        TrialProgram trial = generate_trial(rng);
        for (std::size_t w = 0; w < walks_per_program; ++w) {
            Run run = random_walk(trial.compiled, trial.src_values, rng, max_steps);
            ZeroTestPlan plan = resolve_plan(trial.compiled.vass, run, trial.plan);
            ZeroTestReport rep =
                check_zero_test_conditions(trial.compiled.vass, run, plan);
            ++out.runs;
            // (1) and (2) hold by construction; the SUM identity must then
            // hold on every run, zero-ending or not.
            if (!rep.cond1 || !rep.cond2_all || !rep.sum_identity) {
                out.all_consistent = false;
                continue;
            }
            ++out.sum_identity_checked;
            if (rep.all_conditions) {
                ++out.conditions_held;
                if (rep.conclusion_direct) ++out.conclusions_confirmed;
                else out.all_consistent = false;
            }
        }
    }
    return out;
}

} // namespace vassforge::gadgets
