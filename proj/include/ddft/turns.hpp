#pragma once

#include <string_view>

#include "ddft/errors.hpp"

namespace ddft {

// The five protocol turns. Ordinal and label are a fixed bijection.
enum class TurnKind : int {
    CoreIdea = 1,
    Example = 2,
    Detail = 3,
    Fabrication = 4,
    FollowUp = 5,
};

constexpr int ordinal(TurnKind turn) { return static_cast<int>(turn); }

constexpr std::string_view label(TurnKind turn) {
    switch (turn) {
        case TurnKind::CoreIdea: return "CoreIdea";
        case TurnKind::Example: return "Example";
        case TurnKind::Detail: return "Detail";
        case TurnKind::Fabrication: return "Fabrication";
        case TurnKind::FollowUp: return "FollowUp";
    }
    return "";
}

inline TurnKind turn_from_ordinal(int n) {
    if (n < 1 || n > 5)
        throw ProtocolViolation("turn ordinal out of range: " + std::to_string(n));
    return static_cast<TurnKind>(n);
}

}  // namespace ddft
