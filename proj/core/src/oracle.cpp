#include "vassforge/oracle.hpp"

#include <algorithm>
#include <cstring>
#include <deque>
#include <limits>

namespace vassforge::oracle {

namespace {

constexpr std::uint32_t kNoParent = std::numeric_limits<std::uint32_t>::max();
constexpr std::int64_t kArithGuard = std::numeric_limits<std::int64_t>::max() / 4;

std::uint64_t mix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ull;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ull;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebull;
    return x ^ (x >> 31);
}

std::int64_t small_or_raise(const Big& v, const char* what) {
    auto s = to_int64(v);
    if (!s || *s > kArithGuard || *s < -kArithGuard)
        raise(ErrorCode::MagnitudeCap, std::string(what) + " exceeds the oracle's integer range");
    return *s;
}

struct CompiledModel {
    std::size_t dim = 0;
    std::size_t num_states = 0;
    // effects flattened per transition, stride = dim
    std::vector<std::int64_t> effects;
    std::vector<std::uint32_t> to_state;
    // transition indices grouped by source state, in index order
    std::vector<std::vector<std::uint32_t>> outgoing;
    std::int64_t max_abs_effect = 0;

    explicit CompiledModel(const Vass& v) {
        dim = v.dimension();
        num_states = v.states().size();
        outgoing.resize(num_states);
        effects.reserve(v.transitions().size() * dim);
        to_state.reserve(v.transitions().size());
        for (std::size_t t = 0; t < v.transitions().size(); ++t) {
            const Transition& tr = v.transitions()[t];
            for (std::size_t i = 0; i < dim; ++i) {
                std::int64_t e = small_or_raise(tr.effect[i], "transition effect");
                max_abs_effect = std::max(max_abs_effect, std::abs(e));
                effects.push_back(e);
            }
            to_state.push_back(tr.to);
            outgoing[tr.from].push_back(static_cast<std::uint32_t>(t));
        }
    }
};

std::vector<std::int64_t> lower_values(const Vass& v, const Configuration& c, const char* what) {
    if (c.values.size() != v.dimension())
        raise(ErrorCode::DimensionMismatch, std::string(what) + " length does not match dimension");
    std::vector<std::int64_t> out;
    out.reserve(c.values.size());
    for (const auto& x : c.values) {
        if (x < 0) raise(ErrorCode::NegativeCounter, std::string(what) + " entry below zero");
        out.push_back(small_or_raise(x, what));
    }
    return out;
}

} // namespace

/// Shared BFS engine. Explores the cap-bounded closure, optionally stopping
/// as soon as a target is discovered.
class Explorer {
  public:
    Explorer(const Vass& v, const Configuration& src, const Big& cap, std::size_t max_states)
        : vass_(v), model_(v), cap_(small_or_raise(cap, "cap")), max_states_(max_states) {
        src_state_ = v.find_state(src.state)
                         ? *v.find_state(src.state)
                         : (raise(ErrorCode::InvalidArgument, "source state unknown"), 0);
        src_values_ = lower_values(v, src, "source configuration");
        for (auto x : src_values_)
            if (x > cap_)
                raise(ErrorCode::InvalidArgument, "cap must cover every source entry");
        result_.vass_ = &v;
        result_.dim_ = model_.dim;
        result_.source_ = src;
        table_bits_ = 12;
        table_.assign(std::size_t(1) << table_bits_, 0);
        insert(src_state_, src_values_.data(), kNoParent, 0);
    }

    /// Returns the index of the target configuration if it was discovered.
    std::optional<std::uint32_t> run(const std::uint32_t* trg_state,
                                     const std::int64_t* trg_values) {
        if (trg_state && matches(0, *trg_state, trg_values)) return 0u;
        std::size_t head = 0;
        std::vector<std::int64_t> scratch(model_.dim);
        while (head < result_.state_of_.size()) {
            std::uint32_t cur = static_cast<std::uint32_t>(head++);
            std::uint32_t st = result_.state_of_[cur];
            const std::int64_t* vals = result_.values_.data() + std::size_t(cur) * model_.dim;
            for (std::uint32_t t : model_.outgoing[st]) {
                const std::int64_t* eff = model_.effects.data() + std::size_t(t) * model_.dim;
                bool ok = true;
                for (std::size_t i = 0; i < model_.dim; ++i) {
                    std::int64_t nv = vals[i] + eff[i];
                    if (nv < 0) { ok = false; break; }
                    if (nv > cap_) { result_.clipped_ = true; ok = false; break; }
                    scratch[i] = nv;
                }
                if (!ok) continue;
                if (result_.state_of_.size() >= max_states_) {
                    // Would need a new slot we may not have; check containment first.
                    if (lookup(model_.to_state[t], scratch.data()).has_value()) continue;
                    result_.state_limit_hit_ = true;
                    return std::nullopt;
                }
                auto [idx, fresh] = insert(model_.to_state[t], scratch.data(), cur, t);
                if (fresh && trg_state && matches(idx, *trg_state, trg_values)) return idx;
            }
        }
        return std::nullopt;
    }

    ReachResult take_result() { return std::move(result_); }

    std::optional<std::uint32_t> lookup(std::uint32_t state, const std::int64_t* vals) const {
        std::uint64_t h = hash_of(state, vals);
        std::size_t mask = table_.size() - 1;
        std::size_t pos = h & mask;
        while (table_[pos] != 0) {
            std::uint32_t idx = table_[pos] - 1;
            if (matches(idx, state, vals)) return idx;
            pos = (pos + 1) & mask;
        }
        return std::nullopt;
    }

  private:
    bool matches(std::uint32_t idx, std::uint32_t state, const std::int64_t* vals) const {
        if (result_.state_of_[idx] != state) return false;
        const std::int64_t* stored = result_.values_.data() + std::size_t(idx) * model_.dim;
        return std::memcmp(stored, vals, model_.dim * sizeof(std::int64_t)) == 0;
    }

    std::uint64_t hash_of(std::uint32_t state, const std::int64_t* vals) const {
        std::uint64_t h = mix64(state + 0x51ed270b);
        for (std::size_t i = 0; i < model_.dim; ++i)
            h = mix64(h ^ static_cast<std::uint64_t>(vals[i]));
        return h;
    }

    std::pair<std::uint32_t, bool> insert(std::uint32_t state, const std::int64_t* vals,
                                          std::uint32_t parent, std::uint32_t via) {
        std::uint64_t h = hash_of(state, vals);
        std::size_t mask = table_.size() - 1;
        std::size_t pos = h & mask;
        while (table_[pos] != 0) {
            std::uint32_t idx = table_[pos] - 1;
            if (matches(idx, state, vals)) return {idx, false};
            pos = (pos + 1) & mask;
        }
        std::uint32_t idx = static_cast<std::uint32_t>(result_.state_of_.size());
        result_.state_of_.push_back(state);
        result_.values_.insert(result_.values_.end(), vals, vals + model_.dim);
        result_.parent_.emplace_back(parent, via);
        table_[pos] = idx + 1;
        if ((result_.state_of_.size() + 1) * 10 > table_.size() * 7) grow_table();
        return {idx, true};
    }

    void grow_table() {
        ++table_bits_;
        std::vector<std::uint32_t> fresh(std::size_t(1) << table_bits_, 0);
        std::size_t mask = fresh.size() - 1;
        for (std::uint32_t slot : table_) {
            if (slot == 0) continue;
            std::uint32_t idx = slot - 1;
            std::uint64_t h =
                hash_of(result_.state_of_[idx], result_.values_.data() + std::size_t(idx) * model_.dim);
            std::size_t pos = h & mask;
            while (fresh[pos] != 0) pos = (pos + 1) & mask;
            fresh[pos] = slot;
        }
        table_.swap(fresh);
    }

    const Vass& vass_;
    CompiledModel model_;
    std::int64_t cap_;
    std::size_t max_states_;
    std::uint32_t src_state_ = 0;
    std::vector<std::int64_t> src_values_;
    ReachResult result_;
    std::vector<std::uint32_t> table_; // open addressing, value = config index + 1
    unsigned table_bits_ = 12;
};

} // namespace

Configuration ReachResult::config_at(std::size_t i) const {
    Configuration c;
    c.state = vass_->state_name(state_of_[i]);
    c.values.reserve(dim_);
    const std::int64_t* vals = values_.data() + i * dim_;
    for (std::size_t d = 0; d < dim_; ++d) c.values.emplace_back(vals[d]);
    return c;
}

std::optional<std::size_t> ReachResult::find(const Configuration& c) const {
    auto st = vass_->find_state(c.state);
    if (!st || c.values.size() != dim_) return std::nullopt;
    std::vector<std::int64_t> vals;
    vals.reserve(dim_);
    for (const auto& x : c.values) {
        auto s = to_int64(x);
        if (!s) return std::nullopt;
        vals.push_back(*s);
    }
    // Linear scan kept out of hot paths; result sets queried this way are small
    // or the lookup happens once.
    for (std::size_t i = 0; i < state_of_.size(); ++i) {
        if (state_of_[i] != *st) continue;
        if (std::memcmp(values_.data() + i * dim_, vals.data(), dim_ * sizeof(std::int64_t)) == 0)
            return i;
    }
    return std::nullopt;
}

std::optional<Run> ReachResult::witness(const Configuration& target) const {
    auto idx = find(target);
    if (!idx) return std::nullopt;
    return witness_by_index(*idx);
}

Run ReachResult::witness_by_index(std::size_t idx) const {
    std::vector<std::uint32_t> steps;
    std::uint32_t cur = static_cast<std::uint32_t>(idx);
    while (parent_[cur].first != kNoParent) {
        steps.push_back(parent_[cur].second);
        cur = parent_[cur].first;
    }
    std::reverse(steps.begin(), steps.end());
    return Run{source_, std::move(steps)};
}

void ReachResult::for_each(const std::function<void(const Configuration&)>& fn) const {
    for (std::size_t i = 0; i < state_of_.size(); ++i) fn(config_at(i));
}

std::vector<Configuration> ReachResult::configurations() const {
    std::vector<Configuration> out;
    out.reserve(size());
    for (std::size_t i = 0; i < state_of_.size(); ++i) out.push_back(config_at(i));
    return out;
}

std::vector<Configuration> ReachResult::at_state(const std::string& state) const {
    std::vector<Configuration> out;
    auto st = vass_->find_state(state);
    if (!st) return out;
    for (std::size_t i = 0; i < state_of_.size(); ++i)
        if (state_of_[i] == *st) out.push_back(config_at(i));
    return out;
}

ReachResult bounded_reach(const Vass& v, const Configuration& src, const Big& cap,
                          std::size_t max_states) {
    Explorer ex(v, src, cap, max_states);
    ex.run(nullptr, nullptr);
    return ex.take_result();
}

DecideResult decide_reach(const Vass& v, const Configuration& src, const Configuration& trg,
                          const Big& cap, std::size_t max_states) {
    DecideResult out;
    auto trg_state = v.find_state(trg.state);
    if (!trg_state) raise(ErrorCode::InvalidArgument, "target state unknown");
    if (trg.values.size() != v.dimension())
        raise(ErrorCode::DimensionMismatch, "target length does not match dimension");
    for (const auto& x : trg.values) {
        if (x < 0) raise(ErrorCode::NegativeCounter, "target entry below zero");
        if (x > cap) {
            // Nothing bounded by cap can equal trg: definitive without searching.
            out.target_exceeds_cap = true;
            out.exhausted = true;
            return out;
        }
    }
    std::vector<std::int64_t> trg_vals;
    trg_vals.reserve(trg.values.size());
    for (const auto& x : trg.values) trg_vals.push_back(*to_int64(x));

    Explorer ex(v, src, cap, max_states);
    std::uint32_t ts = *trg_state;
    auto hit = ex.run(&ts, trg_vals.data());
    ReachResult r = ex.take_result();
    out.clipped = r.clipped();
    out.exhausted = r.exhausted();
    if (hit) out.witness = r.witness(trg);
    return out;
}

namespace {

/// Minimal number of transitions needed to move between states, ignoring
/// counters; admissible pruning bound for run enumeration.
std::vector<std::size_t> state_distances_to(const CompiledModel& m, std::uint32_t target) {
    constexpr std::size_t inf = std::numeric_limits<std::size_t>::max();
    std::vector<std::vector<std::uint32_t>> incoming(m.num_states);
    for (std::size_t t = 0; t < m.to_state.size(); ++t)
        incoming[m.to_state[t]].push_back(static_cast<std::uint32_t>(t));
    std::vector<std::size_t> dist(m.num_states, inf);
    dist[target] = 0;
    std::deque<std::uint32_t> queue{target};
    // breadth-first over reversed edges; need the source state per transition
    std::vector<std::uint32_t> from_state(m.to_state.size());
    for (std::uint32_t s = 0; s < m.num_states; ++s)
        for (std::uint32_t t : m.outgoing[s]) from_state[t] = s;
    while (!queue.empty()) {
        std::uint32_t cur = queue.front();
        queue.pop_front();
        for (std::uint32_t t : incoming[cur]) {
            std::uint32_t prev = from_state[t];
            if (dist[prev] == inf) {
                dist[prev] = dist[cur] + 1;
                queue.push_back(prev);
            }
        }
    }
    return dist;
}

} // namespace

std::vector<Run> enumerate_runs(const Vass& v, const Configuration& src, const Configuration& trg,
                                std::size_t max_len, const EnumerateOptions& opts) {
    CompiledModel model(v);
    auto src_state = v.find_state(src.state);
    auto trg_state = v.find_state(trg.state);
    if (!src_state || !trg_state) raise(ErrorCode::InvalidArgument, "endpoint state unknown");
    std::vector<std::int64_t> cur = lower_values(v, src, "source configuration");
    std::vector<std::int64_t> goal = lower_values(v, trg, "target configuration");

    // Values stay within |src| + max_len * max|effect|; keep that inside the
    // guarded integer range.
    Big worst = 0;
    for (auto x : cur) worst = std::max(worst, Big(x));
    worst += Big(model.max_abs_effect) * Big(static_cast<long long>(max_len));
    small_or_raise(worst, "enumeration value range");

    std::vector<std::size_t> dist = state_distances_to(model, *trg_state);

    std::vector<Run> found;
    std::vector<std::uint32_t> path;
    std::size_t nodes = 0;

    std::function<void(std::uint32_t)> dfs = [&](std::uint32_t state) {
        if (++nodes > opts.max_nodes)
            raise(ErrorCode::ExplosionGuard, "enumeration visited too many nodes");
        if (state == *trg_state && std::equal(cur.begin(), cur.end(), goal.begin())) {
            found.push_back(Run{src, path});
            if (found.size() > opts.max_runs)
                raise(ErrorCode::ExplosionGuard, "enumeration found too many runs");
        }
        if (path.size() >= max_len) return;
        std::size_t remaining = max_len - path.size();
        for (std::uint32_t t : model.outgoing[state]) {
            std::uint32_t next_state = model.to_state[t];
            if (dist[next_state] == std::numeric_limits<std::size_t>::max() ||
                dist[next_state] + 1 > remaining)
                continue;
            const std::int64_t* eff = model.effects.data() + std::size_t(t) * model.dim;
            bool ok = true;
            for (std::size_t i = 0; i < model.dim; ++i)
                if (cur[i] + eff[i] < 0) { ok = false; break; }
            if (!ok) continue;
            for (std::size_t i = 0; i < model.dim; ++i) cur[i] += eff[i];
            path.push_back(t);
            dfs(next_state);
            path.pop_back();
            for (std::size_t i = 0; i < model.dim; ++i) cur[i] -= eff[i];
        }
    };
    dfs(*src_state);

    std::sort(found.begin(), found.end(), [](const Run& a, const Run& b) {
        if (a.steps.size() != b.steps.size()) return a.steps.size() < b.steps.size();
        return a.steps < b.steps;
    });
    return found;
}

MaxReachable max_reachable(const Vass& v, const Configuration& src, std::size_t index,
                           const std::vector<std::pair<std::size_t, Big>>& conditions,
                           const Big& cap, std::size_t max_states) {
    if (index >= v.dimension()) raise(ErrorCode::InvalidArgument, "counter index out of range");
    for (const auto& [i, _] : conditions)
        if (i >= v.dimension()) raise(ErrorCode::InvalidArgument, "condition index out of range");

    ReachResult r = bounded_reach(v, src, cap, max_states);
    MaxReachable out;
    out.clipped = !r.saturated();
    for (std::size_t c = 0; c < r.size(); ++c) {
        Configuration cfg = r.config_at(c);
        bool ok = true;
        for (const auto& [i, want] : conditions)
            if (cfg.values[i] != want) { ok = false; break; }
        if (!ok) continue;
        if (!out.value || cfg.values[index] > *out.value) out.value = cfg.values[index];
    }
    return out;
}

} // namespace vassforge::oracle
