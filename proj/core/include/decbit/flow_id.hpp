#pragma once

#include <compare>
#include <cstddef>
#include <cstdint>
#include <functional>

namespace decbit {

// Source/destination address pair. Routers keep their packet counts per
// FlowId, so fairness is enforced between address pairs rather than between
// individual connections.
struct FlowId {
  std::uint32_t source = 0;
  std::uint32_t destination = 0;

  friend constexpr auto operator<=>(const FlowId&, const FlowId&) = default;
};

struct FlowIdHash {
  std::size_t operator()(const FlowId& id) const noexcept {
    std::uint64_t key = (std::uint64_t{id.source} << 32) | id.destination;
    // splitmix64 finalizer
    key ^= key >> 30;
    key *= 0xbf58476d1ce4e5b9ULL;
    key ^= key >> 27;
    key *= 0x94d049bb133111ebULL;
    key ^= key >> 31;
    return static_cast<std::size_t>(key);
  }
};

}  // namespace decbit

template <>
struct std::hash<decbit::FlowId> : decbit::FlowIdHash {};
