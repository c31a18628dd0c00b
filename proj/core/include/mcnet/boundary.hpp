#pragma once

#include "mcnet/registry.hpp"

#include <map>
#include <optional>
#include <vector>

namespace mcnet {

struct BoundaryCondition {
    SlotIndex slot = 0;
    double value = 0.0;  // SI

    bool operator==(const BoundaryCondition&) const = default;
};

/// Fixed values for a subset of registry slots. No slot appears twice and every
/// value is finite.
class BoundaryConditionSet {
public:
    BoundaryConditionSet() = default;

    /// Throws ModelError on a duplicate slot or a non-finite value.
    void add(SlotIndex slot, double value);
    /// Replaces the value of an existing entry, or adds it.
    void set(SlotIndex slot, double value);
    bool remove(SlotIndex slot);

    bool contains(SlotIndex slot) const { return values_.contains(slot); }
    std::optional<double> value(SlotIndex slot) const;
    std::size_t size() const { return values_.size(); }
    bool empty() const { return values_.empty(); }

    /// Entries sorted by slot index.
    std::vector<BoundaryCondition> entries() const;

    bool operator==(const BoundaryConditionSet&) const = default;

private:
    std::map<SlotIndex, double> values_;
};

}  // namespace mcnet
