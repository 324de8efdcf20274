#ifndef VASSFORGE_CORE_HPP
#define VASSFORGE_CORE_HPP

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include <nlohmann/json.hpp>

#include "vassforge/bigint.hpp"
#include "vassforge/errors.hpp"

namespace vassforge {

using json = nlohmann::ordered_json;

/// One VASS transition: fire from state `from`, add `effect`, land in `to`.
struct Transition {
    std::uint32_t from = 0;
    Vec effect;
    std::uint32_t to = 0;
};

/// A d-dimensional vector addition system with states. States are interned
/// labels; transitions are an indexed list so runs can reference them by
/// position. Immutable by convention once built.
class Vass {
  public:
    Vass() = default;
    explicit Vass(std::vector<std::string> counter_names);

    std::size_t dimension() const { return counters_.size(); }
    const std::vector<std::string>& counters() const { return counters_; }
    const std::vector<std::string>& states() const { return states_; }
    const std::vector<Transition>& transitions() const { return transitions_; }

    std::uint32_t add_state(const std::string& name);
    std::uint32_t intern_state(const std::string& name); // add_state, idempotent
    std::optional<std::uint32_t> find_state(const std::string& name) const;
    const std::string& state_name(std::uint32_t idx) const;
    bool has_state(const std::string& name) const { return find_state(name).has_value(); }

    std::size_t add_transition(std::uint32_t from, Vec effect, std::uint32_t to);
    std::size_t add_transition(const std::string& from, Vec effect, const std::string& to);

    std::optional<std::size_t> counter_index(const std::string& name) const;

  private:
    std::vector<std::string> counters_;
    std::vector<std::string> states_;
    std::map<std::string, std::uint32_t> state_index_;
    std::vector<Transition> transitions_;
};

/// A state paired with a nonnegative counter valuation.
struct Configuration {
    std::string state;
    Vec values;

    bool operator==(const Configuration& other) const {
        return state == other.state && values == other.values;
    }
    bool operator<(const Configuration& other) const {
        if (state != other.state) return state < other.state;
        return values < other.values;
    }
};

/// A start configuration plus the indices of the transitions fired from it.
struct Run {
    Configuration start;
    std::vector<std::uint32_t> steps;

    bool operator==(const Run& other) const {
        return start == other.start && steps == other.steps;
    }
};

Configuration make_config(const Vass& v, const std::string& state, Vec values);

/// Fires transition `t` in `c`. Throws StateMismatch / NegativeCounter.
Configuration fire(const Vass& v, const Configuration& c, std::size_t t);

/// Replays a run from its start; fails atomically on the first invalid step,
/// reporting the step index.
Configuration replay(const Vass& v, const Run& r);

/// Sum of the step effects (a vector over Z, not N).
Vec effect_of(const Vass& v, const Run& r);

/// Places a VASS into a higher dimension: effects land at the mapped indices,
/// all other coordinates are zero. `counter_map[i]` is the new index of the
/// old counter i; the map must be injective into [0, target_dim).
/// Unmapped target coordinates get placeholder names "u{j}" unless
/// `target_names` supplies the full naming.
Vass embed(const Vass& v, std::size_t target_dim, const std::vector<std::size_t>& counter_map,
           const std::vector<std::string>& target_names = {});

/// Disjoint union of two equal-dimension VASSes plus one zero-effect glue
/// transition from `glue.first` (a state of v1) to `glue.second` (of v2).
/// Colliding state names of v2 are suffixed "#2" ("#3", ... until fresh).
Vass sequential_compose(const Vass& v1, const std::pair<std::string, std::string>& glue,
                        const Vass& v2);

// Canonical JSON: field order is fixed; integers are emitted as JSON numbers
// up to 2^53 and as decimal strings beyond that.
json big_to_json(const Big& v);
Big big_from_json(const json& j);
json vec_to_json(const Vec& v);
Vec vec_from_json(const json& j);
json vass_to_json(const Vass& v);
Vass vass_from_json(const json& j);
json config_to_json(const Configuration& c);
Configuration config_from_json(const json& j);
json run_to_json(const Run& r);
Run run_from_json(const json& j);

} // namespace vassforge

#endif
