#pragma once

#include "mcnet/registry.hpp"

#include <functional>
#include <span>
#include <string>
#include <vector>

namespace mcnet {

/// One scalar equation of a network, expressed as a residual that vanishes at
/// a solution. `slots` lists exactly the registry slots the residual reads;
/// `evaluate` returns the value at a full-registry state and, when `partials`
/// is non-empty, writes d(residual)/d(state[slots[k]]) into partials[k].
struct Residual {
    using Evaluator = std::function<double(std::span<const double> state, std::span<double> partials)>;

    std::string label;
    std::vector<SlotIndex> slots;
    Evaluator evaluate;

    double value(std::span<const double> state) const { return evaluate(state, {}); }
};

/// Collects the distinct slots a residual touches and hands out their
/// positions in the partials array.
class SlotSet {
public:
    std::size_t add(SlotIndex slot) {
        for (std::size_t k = 0; k < slots_.size(); ++k) {
            if (slots_[k] == slot) return k;
        }
        slots_.push_back(slot);
        return slots_.size() - 1;
    }
    std::vector<SlotIndex> take() { return std::move(slots_); }
    std::size_t size() const { return slots_.size(); }

private:
    std::vector<SlotIndex> slots_;
};

}  // namespace mcnet
