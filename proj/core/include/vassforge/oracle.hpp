#ifndef VASSFORGE_ORACLE_HPP
#define VASSFORGE_ORACLE_HPP

#include <cstdint>
#include <functional>
#include <optional>
#include <utility>
#include <vector>

#include "vassforge/core.hpp"

namespace vassforge::oracle {

/// Default guard on explored configurations; overridable per call and via the
/// VASS_FORGE_MAX_STATES environment variable in the CLI.
inline constexpr std::size_t kDefaultMaxStates = 5'000'000;

/// Result of an exhaustive bounded exploration. Configurations are stored
/// packed; accessors materialize them on demand. Discovery order (and thus
/// every accessor's output) is deterministic: BFS with transitions expanded
/// in index order, parents assigned at first discovery.
class ReachResult {
  public:
    /// Closure completed with nothing discarded: the reach set is exact.
    bool saturated() const { return !clipped_ && !state_limit_hit_; }
    /// Some successor exceeded the per-counter cap and was discarded.
    bool clipped() const { return clipped_; }
    /// Exploration stopped early because max_states was reached.
    bool state_limit_hit() const { return state_limit_hit_; }
    /// Frontier fully drained (max_states not hit). Everything reachable
    /// within the cap has been seen, so negative answers are definitive
    /// within the cap even when clipping occurred above it.
    bool exhausted() const { return !state_limit_hit_; }

    std::size_t size() const { return state_of_.size(); }
    std::size_t dimension() const { return dim_; }

    Configuration config_at(std::size_t i) const;
    std::optional<std::size_t> find(const Configuration& c) const;
    bool contains(const Configuration& c) const { return find(c).has_value(); }

    /// Witness run from the source to `target`, when reached.
    std::optional<Run> witness(const Configuration& target) const;
    Run witness_by_index(std::size_t idx) const;

    void for_each(const std::function<void(const Configuration&)>& fn) const;
    std::vector<Configuration> configurations() const;
    std::vector<Configuration> at_state(const std::string& state) const;

  private:
    friend class Explorer;
    const Vass* vass_ = nullptr;
    std::size_t dim_ = 0;
    bool clipped_ = false;
    bool state_limit_hit_ = false;
    std::vector<std::uint32_t> state_of_;
    std::vector<std::int64_t> values_; // stride = dim_
    // parent config index (UINT32_MAX at the source) and transition fired
    std::vector<std::pair<std::uint32_t, std::uint32_t>> parent_;
    Configuration source_;
};

/// BFS closure of `src` under firing, discarding configurations with any
/// entry above `cap`. Requires cap >= every src entry.
ReachResult bounded_reach(const Vass& v, const Configuration& src, const Big& cap,
                          std::size_t max_states = kDefaultMaxStates);

struct DecideResult {
    std::optional<Run> witness;
    bool exhausted = false;   // bounded space fully explored
    bool clipped = false;     // cap discarded something along the way
    bool target_exceeds_cap = false;

    bool found() const { return witness.has_value(); }
    /// NotFound is definitive within the cap when the bounded space was
    /// exhausted (or the target itself lies outside the cap).
    bool definitive_no() const { return !found() && (exhausted || target_exceeds_cap); }
};

/// Searches for a witness run src -> trg with all intermediate counters
/// bounded by `cap`. Stops at the first (BFS-minimal) witness.
DecideResult decide_reach(const Vass& v, const Configuration& src, const Configuration& trg,
                          const Big& cap, std::size_t max_states = kDefaultMaxStates);

struct EnumerateOptions {
    std::size_t max_runs = 1'000'000;
    std::size_t max_nodes = 50'000'000;
};

/// All distinct runs src -> trg of length <= max_len, in length-lexicographic
/// order (by transition indices). Runs may revisit configurations; only the
/// length cap bounds the search. Throws ExplosionGuard when the limits in
/// `opts` are exceeded.
std::vector<Run> enumerate_runs(const Vass& v, const Configuration& src, const Configuration& trg,
                                std::size_t max_len, const EnumerateOptions& opts = {});

struct MaxReachable {
    std::optional<Big> value; // absent when no reached configuration qualifies
    bool clipped = false;     // exploration was cap- or state-limited
};

/// Maximum of counter `index` over all reached configurations satisfying the
/// side conditions (pairs of counter index and required exact value).
MaxReachable max_reachable(const Vass& v, const Configuration& src, std::size_t index,
                           const std::vector<std::pair<std::size_t, Big>>& conditions,
                           const Big& cap, std::size_t max_states = kDefaultMaxStates);

} // namespace vassforge::oracle

#endif
