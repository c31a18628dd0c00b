#pragma once

#include "mcnet/types.hpp"

#include <compare>
#include <cstddef>
#include <map>
#include <optional>
#include <string>
#include <vector>

namespace mcnet {

using SlotIndex = std::size_t;

enum class LocationKind {
    Node,      // node state: |V|, delta, p
    Terminal,  // terminal link of a node: P, Q, q, m, T^s_l, T^r_l, dphi_l
    Link,      // physical or dummy link: flows, temperatures, coupling powers
    Coupling   // coupling node parameters promoted to unknowns (eta_h)
};

struct Location {
    LocationKind kind = LocationKind::Node;
    std::string id;

    static Location node(std::string id) { return {LocationKind::Node, std::move(id)}; }
    static Location terminal(std::string id) { return {LocationKind::Terminal, std::move(id)}; }
    static Location link(std::string id) { return {LocationKind::Link, std::move(id)}; }
    static Location coupling(std::string id) { return {LocationKind::Coupling, std::move(id)}; }

    auto operator<=>(const Location&) const = default;
};

std::string to_string(const Location& location);

struct SlotKey {
    Symbol symbol = Symbol::ActivePower;
    Location location;

    auto operator<=>(const SlotKey&) const = default;
};

struct Slot {
    SlotKey key;
    /// Human-readable label, e.g. "P_{0e,0c}" or "T^s_{1h,l}". Unique within a registry.
    std::string label;
};

/// Canonical enumeration of every quantity of a network. Immutable once built.
class VariableRegistry {
public:
    VariableRegistry() = default;
    explicit VariableRegistry(std::vector<Slot> slots);

    std::size_t size() const { return slots_.size(); }
    bool empty() const { return slots_.empty(); }
    const Slot& operator[](SlotIndex index) const { return slots_.at(index); }
    const std::vector<Slot>& slots() const { return slots_; }

    std::optional<SlotIndex> find(const SlotKey& key) const;
    std::optional<SlotIndex> find(std::string_view label) const;

    /// Throws ModelError when the slot does not exist.
    SlotIndex index(const SlotKey& key) const;
    SlotIndex index(std::string_view label) const;

    auto begin() const { return slots_.begin(); }
    auto end() const { return slots_.end(); }

    bool operator==(const VariableRegistry& other) const;

private:
    std::vector<Slot> slots_;
    std::map<SlotKey, SlotIndex> by_key_;
    std::map<std::string, SlotIndex, std::less<>> by_label_;
};

}  // namespace mcnet
