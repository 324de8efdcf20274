#include "vassforge/core.hpp"

#include <algorithm>
#include <set>
#include <sstream>

namespace vassforge {

const char* error_code_name(ErrorCode code) {
    switch (code) {
        case ErrorCode::StateMismatch: return "StateMismatch";
        case ErrorCode::NegativeCounter: return "NegativeCounter";
        case ErrorCode::BadMap: return "BadMap";
        case ErrorCode::DimensionMismatch: return "DimensionMismatch";
        case ErrorCode::SyntaxError: return "SyntaxError";
        case ErrorCode::UndeclaredCounter: return "UndeclaredCounter";
        case ErrorCode::ContainsForMacro: return "ContainsForMacro";
        case ErrorCode::ExplosionGuard: return "ExplosionGuard";
        case ErrorCode::MagnitudeCap: return "MagnitudeCap";
        case ErrorCode::BadPlan: return "BadPlan";
        case ErrorCode::BadSchedule: return "BadSchedule";
        case ErrorCode::SizeGuard: return "SizeGuard";
        case ErrorCode::DimensionTooSmall: return "DimensionTooSmall";
        case ErrorCode::TooManyTests: return "TooManyTests";
        case ErrorCode::ZeroTestFailed: return "ZeroTestFailed";
        case ErrorCode::SchemaError: return "SchemaError";
        case ErrorCode::InvalidArgument: return "InvalidArgument";
    }
    return "UnknownError";
}

Vass::Vass(std::vector<std::string> counter_names) : counters_(std::move(counter_names)) {
    std::set<std::string> seen(counters_.begin(), counters_.end());
    if (seen.size() != counters_.size())
        raise(ErrorCode::InvalidArgument, "counter names must be distinct");
}

std::uint32_t Vass::add_state(const std::string& name) {
    if (state_index_.count(name))
        raise(ErrorCode::InvalidArgument, "duplicate state name '" + name + "'");
    auto idx = static_cast<std::uint32_t>(states_.size());
    states_.push_back(name);
    state_index_.emplace(name, idx);
    return idx;
}

std::uint32_t Vass::intern_state(const std::string& name) {
    auto it = state_index_.find(name);
    if (it != state_index_.end()) return it->second;
    return add_state(name);
}

std::optional<std::uint32_t> Vass::find_state(const std::string& name) const {
    auto it = state_index_.find(name);
    if (it == state_index_.end()) return std::nullopt;
    return it->second;
}

const std::string& Vass::state_name(std::uint32_t idx) const {
    if (idx >= states_.size()) raise(ErrorCode::InvalidArgument, "state index out of range");
    return states_[idx];
}

std::size_t Vass::add_transition(std::uint32_t from, Vec effect, std::uint32_t to) {
    if (from >= states_.size() || to >= states_.size())
        raise(ErrorCode::InvalidArgument, "transition endpoint is not a state");
    if (effect.size() != dimension())
        raise(ErrorCode::DimensionMismatch, "effect length does not match dimension");
    transitions_.push_back(Transition{from, std::move(effect), to});
    return transitions_.size() - 1;
}

std::size_t Vass::add_transition(const std::string& from, Vec effect, const std::string& to) {
    auto f = find_state(from);
    auto t = find_state(to);
    if (!f || !t) raise(ErrorCode::InvalidArgument, "transition endpoint is not a state");
    return add_transition(*f, std::move(effect), *t);
}

std::optional<std::size_t> Vass::counter_index(const std::string& name) const {
    auto it = std::find(counters_.begin(), counters_.end(), name);
    if (it == counters_.end()) return std::nullopt;
    return static_cast<std::size_t>(it - counters_.begin());
}

Configuration make_config(const Vass& v, const std::string& state, Vec values) {
    if (!v.has_state(state)) raise(ErrorCode::InvalidArgument, "unknown state '" + state + "'");
    if (values.size() != v.dimension())
        raise(ErrorCode::DimensionMismatch, "configuration length does not match dimension");
    for (std::size_t i = 0; i < values.size(); ++i)
        if (values[i] < 0)
            raise(ErrorCode::NegativeCounter, "configuration entry below zero",
                  static_cast<long long>(i));
    return Configuration{state, std::move(values)};
}

Configuration fire(const Vass& v, const Configuration& c, std::size_t t) {
    if (t >= v.transitions().size())
        raise(ErrorCode::InvalidArgument, "transition index out of range");
    const Transition& tr = v.transitions()[t];
    if (c.values.size() != v.dimension())
        raise(ErrorCode::DimensionMismatch, "configuration length does not match dimension");
    if (v.state_name(tr.from) != c.state)
        raise(ErrorCode::StateMismatch,
              "transition leaves '" + v.state_name(tr.from) + "' but configuration is at '" +
                  c.state + "'");
    Configuration out;
    out.state = v.state_name(tr.to);
    out.values.reserve(v.dimension());
    for (std::size_t i = 0; i < v.dimension(); ++i) {
        Big next = c.values[i] + tr.effect[i];
        if (next < 0)
            raise(ErrorCode::NegativeCounter, "counter '" + v.counters()[i] + "' would go below zero",
                  static_cast<long long>(i));
        out.values.push_back(std::move(next));
    }
    return out;
}

Configuration replay(const Vass& v, const Run& r) {
    Configuration cur = r.start;
    for (std::size_t i = 0; i < r.steps.size(); ++i) {
        try {
            cur = fire(v, cur, r.steps[i]);
        } catch (const VfError& e) {
            raise(e.code(), std::string(e.what()) + " (at step " + std::to_string(i) + ")",
                  static_cast<long long>(i));
        }
    }
    return cur;
}

Vec effect_of(const Vass& v, const Run& r) {
    Vec total = zero_vec(v.dimension());
    std::uint32_t at = 0;
    bool have_at = false;
    if (auto s = v.find_state(r.start.state)) {
        at = *s;
        have_at = true;
    } else {
        raise(ErrorCode::InvalidArgument, "run start state '" + r.start.state + "' unknown");
    }
    for (std::size_t i = 0; i < r.steps.size(); ++i) {
        if (r.steps[i] >= v.transitions().size())
            raise(ErrorCode::InvalidArgument, "transition index out of range",
                  static_cast<long long>(i));
        const Transition& tr = v.transitions()[r.steps[i]];
        if (have_at && tr.from != at)
            raise(ErrorCode::StateMismatch, "steps do not chain", static_cast<long long>(i));
        at = tr.to;
        for (std::size_t d = 0; d < v.dimension(); ++d) total[d] += tr.effect[d];
    }
    return total;
}

Vass embed(const Vass& v, std::size_t target_dim, const std::vector<std::size_t>& counter_map,
           const std::vector<std::string>& target_names) {
    if (counter_map.size() != v.dimension())
        raise(ErrorCode::BadMap, "counter map length does not match dimension");
    if (target_dim < v.dimension())
        raise(ErrorCode::BadMap, "target dimension smaller than source");
    std::vector<bool> used(target_dim, false);
    for (std::size_t i = 0; i < counter_map.size(); ++i) {
        std::size_t j = counter_map[i];
        if (j >= target_dim) raise(ErrorCode::BadMap, "mapped index out of range");
        if (used[j]) raise(ErrorCode::BadMap, "counter map is not injective");
        used[j] = true;
    }

    std::vector<std::string> names;
    if (!target_names.empty()) {
        if (target_names.size() != target_dim)
            raise(ErrorCode::BadMap, "target names length does not match target dimension");
        names = target_names;
    } else {
        names.assign(target_dim, "");
        for (std::size_t i = 0; i < counter_map.size(); ++i) names[counter_map[i]] = v.counters()[i];
        for (std::size_t j = 0; j < target_dim; ++j)
            if (names[j].empty()) names[j] = "u" + std::to_string(j + 1);
    }

    Vass out(names);
    for (const auto& s : v.states()) out.add_state(s);
    for (const auto& tr : v.transitions()) {
        Vec eff = zero_vec(target_dim);
        for (std::size_t i = 0; i < v.dimension(); ++i) eff[counter_map[i]] = tr.effect[i];
        out.add_transition(tr.from, std::move(eff), tr.to);
    }
    return out;
}

Vass sequential_compose(const Vass& v1, const std::pair<std::string, std::string>& glue,
                        const Vass& v2) {
    if (v1.dimension() != v2.dimension())
        raise(ErrorCode::DimensionMismatch, "operands have different dimensions");
    if (!v1.has_state(glue.first))
        raise(ErrorCode::InvalidArgument, "glue source '" + glue.first + "' is not a state of v1");
    if (!v2.has_state(glue.second))
        raise(ErrorCode::InvalidArgument, "glue target '" + glue.second + "' is not a state of v2");

    Vass out(v1.counters());
    for (const auto& s : v1.states()) out.add_state(s);

    std::map<std::string, std::string> rename;
    for (const auto& s : v2.states()) {
        std::string name = s;
        int suffix = 2;
        while (out.has_state(name)) name = s + "#" + std::to_string(suffix++);
        rename[s] = name;
        out.add_state(name);
    }

    for (const auto& tr : v1.transitions())
        out.add_transition(v1.state_name(tr.from), tr.effect, v1.state_name(tr.to));
    for (const auto& tr : v2.transitions())
        out.add_transition(rename.at(v2.state_name(tr.from)), tr.effect,
                           rename.at(v2.state_name(tr.to)));

    out.add_transition(glue.first, zero_vec(out.dimension()), rename.at(glue.second));
    return out;
}

namespace {

constexpr std::int64_t kJsonNumberLimit = 1ll << 53;

[[noreturn]] void schema_error(const std::string& what) { raise(ErrorCode::SchemaError, what); }

const json& require(const json& j, const char* key) {
    if (!j.is_object() || !j.contains(key)) schema_error("missing field '" + std::string(key) + "'");
    return j.at(key);
}

} // namespace

json big_to_json(const Big& v) {
    if (auto small = to_int64(v); small && *small <= kJsonNumberLimit && *small >= -kJsonNumberLimit)
        return json(*small);
    return json(v.str());
}

Big big_from_json(const json& j) {
    if (j.is_number_integer()) return Big(j.get<std::int64_t>());
    if (j.is_string()) {
        try {
            return Big(j.get<std::string>());
        } catch (const std::exception&) {
            schema_error("bad integer literal '" + j.get<std::string>() + "'");
        }
    }
    schema_error("expected integer or decimal string");
}

json vec_to_json(const Vec& v) {
    json out = json::array();
    for (const auto& x : v) out.push_back(big_to_json(x));
    return out;
}

Vec vec_from_json(const json& j) {
    if (!j.is_array()) schema_error("expected array of integers");
    Vec out;
    out.reserve(j.size());
    for (const auto& x : j) out.push_back(big_from_json(x));
    return out;
}

json vass_to_json(const Vass& v) {
    json out;
    out["dimension"] = v.dimension();
    out["counters"] = v.counters();
    out["states"] = v.states();
    json ts = json::array();
    for (const auto& tr : v.transitions()) {
        json t;
        t["from"] = v.state_name(tr.from);
        t["effect"] = vec_to_json(tr.effect);
        t["to"] = v.state_name(tr.to);
        ts.push_back(std::move(t));
    }
    out["transitions"] = std::move(ts);
    return out;
}

Vass vass_from_json(const json& j) {
    const json& src = (j.is_object() && j.contains("vass")) ? j.at("vass") : j;
    auto dim = require(src, "dimension").get<std::size_t>();
    auto counters = require(src, "counters").get<std::vector<std::string>>();
    if (counters.size() != dim) schema_error("dimension does not match counters length");
    Vass out(counters);
    for (const auto& s : require(src, "states").get<std::vector<std::string>>()) out.add_state(s);
    for (const auto& t : require(src, "transitions")) {
        Vec eff = vec_from_json(require(t, "effect"));
        if (eff.size() != dim) schema_error("transition effect length does not match dimension");
        auto from = require(t, "from").get<std::string>();
        auto to = require(t, "to").get<std::string>();
        if (!out.has_state(from) || !out.has_state(to))
            schema_error("transition endpoint is not a declared state");
        out.add_transition(from, std::move(eff), to);
    }
    return out;
}

json config_to_json(const Configuration& c) {
    json out;
    out["state"] = c.state;
    out["values"] = vec_to_json(c.values);
    return out;
}

Configuration config_from_json(const json& j) {
    Configuration c;
    c.state = require(j, "state").get<std::string>();
    c.values = vec_from_json(require(j, "values"));
    return c;
}

json run_to_json(const Run& r) {
    json out;
    out["start"] = config_to_json(r.start);
    out["steps"] = r.steps;
    return out;
}

Run run_from_json(const json& j) {
    Run r;
    r.start = config_from_json(require(j, "start"));
    for (const auto& s : require(j, "steps")) {
        if (!s.is_number_unsigned() && !s.is_number_integer()) schema_error("steps must be indices");
        r.steps.push_back(s.get<std::uint32_t>());
    }
    return r;
}

} // namespace vassforge
