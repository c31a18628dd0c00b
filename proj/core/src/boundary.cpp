#include "mcnet/boundary.hpp"

#include "mcnet/types.hpp"

#include <cmath>
#include <string>

namespace mcnet {

void BoundaryConditionSet::add(SlotIndex slot, double value) {
    if (!std::isfinite(value)) {
        throw ModelError("boundary value for slot " + std::to_string(slot) + " is not finite");
    }
    if (!values_.emplace(slot, value).second) {
        throw ModelError("slot " + std::to_string(slot) + " already has a boundary condition");
    }
}

void BoundaryConditionSet::set(SlotIndex slot, double value) {
    if (!std::isfinite(value)) {
        throw ModelError("boundary value for slot " + std::to_string(slot) + " is not finite");
    }
    values_[slot] = value;
}

bool BoundaryConditionSet::remove(SlotIndex slot) { return values_.erase(slot) > 0; }

std::optional<double> BoundaryConditionSet::value(SlotIndex slot) const {
    auto it = values_.find(slot);
    if (it == values_.end()) return std::nullopt;
    return it->second;
}

std::vector<BoundaryCondition> BoundaryConditionSet::entries() const {
    std::vector<BoundaryCondition> out;
    out.reserve(values_.size());
    for (const auto& [slot, value] : values_) out.push_back({slot, value});
    return out;
}

}  // namespace mcnet
