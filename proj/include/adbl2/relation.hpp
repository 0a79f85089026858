#pragma once

#include <optional>
#include <string_view>

namespace adbl2 {

/// Label a child argument bears toward its parent. Attack orders before Support.
enum class RelationType { Attack = 0, Support = 1 };

constexpr std::string_view to_string(RelationType r) noexcept {
    return r == RelationType::Attack ? "attack" : "support";
}

constexpr RelationType opposite(RelationType r) noexcept {
    return r == RelationType::Attack ? RelationType::Support : RelationType::Attack;
}

/// Accepts "attack"/"support" in any letter case.
std::optional<RelationType> parse_relation(std::string_view text) noexcept;

}  // namespace adbl2
