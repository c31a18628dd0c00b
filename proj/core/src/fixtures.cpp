#include "mcnet/io.hpp"

#include <utility>

namespace mcnet::io {

namespace {

struct Fixture {
    const char* name;
    const char* text;
};

// Generated at configure time from fixtures/*.json.
constexpr Fixture kFixtures[] = {
#include "mcnet_fixtures.inc"
};

}  // namespace

const std::vector<std::string>& fixture_names() {
    static const std::vector<std::string> names = [] {
        std::vector<std::string> out;
        for (const Fixture& f : kFixtures) out.emplace_back(f.name);
        return out;
    }();
    return names;
}

std::string_view fixture_text(std::string_view name) {
    for (const Fixture& f : kFixtures) {
        if (name == f.name) return f.text;
    }
    throw DocumentError("", "no fixture named '" + std::string(name) + "'");
}

}  // namespace mcnet::io
