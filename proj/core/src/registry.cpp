#include "mcnet/registry.hpp"

namespace mcnet {

std::string to_string(const Location& location) {
    switch (location.kind) {
        case LocationKind::Node: return "node:" + location.id;
        case LocationKind::Terminal: return "terminal:" + location.id;
        case LocationKind::Link: return "link:" + location.id;
        case LocationKind::Coupling: return "coupling:" + location.id;
    }
    return location.id;
}

VariableRegistry::VariableRegistry(std::vector<Slot> slots) : slots_(std::move(slots)) {
    for (SlotIndex i = 0; i < slots_.size(); ++i) {
        if (!by_key_.emplace(slots_[i].key, i).second) {
            throw ModelError("duplicate registry slot " + slots_[i].label);
        }
        if (!by_label_.emplace(slots_[i].label, i).second) {
            throw ModelError("duplicate registry label " + slots_[i].label);
        }
    }
}

std::optional<SlotIndex> VariableRegistry::find(const SlotKey& key) const {
    auto it = by_key_.find(key);
    if (it == by_key_.end()) return std::nullopt;
    return it->second;
}

std::optional<SlotIndex> VariableRegistry::find(std::string_view label) const {
    auto it = by_label_.find(label);
    if (it == by_label_.end()) return std::nullopt;
    return it->second;
}

SlotIndex VariableRegistry::index(const SlotKey& key) const {
    if (auto found = find(key)) return *found;
    throw ModelError("no slot " + std::string(symbol_tag(key.symbol)) + " at " +
                     to_string(key.location));
}

SlotIndex VariableRegistry::index(std::string_view label) const {
    if (auto found = find(label)) return *found;
    throw ModelError("no slot labelled " + std::string(label));
}

bool VariableRegistry::operator==(const VariableRegistry& other) const {
    if (slots_.size() != other.slots_.size()) return false;
    for (std::size_t i = 0; i < slots_.size(); ++i) {
        if (slots_[i].key != other.slots_[i].key || slots_[i].label != other.slots_[i].label) {
            return false;
        }
    }
    return true;
}

}  // namespace mcnet
