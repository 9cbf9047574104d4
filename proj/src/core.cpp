#include "ieim/core.hpp"

#include <algorithm>
#include <stdexcept>
#include <unordered_map>

namespace ieim {

std::vector<Violation> validate_stream(const EventStream& stream) {
  std::vector<Violation> out;
  const std::size_t n = stream.events.size();

  for (std::size_t i = 0; i < n; ++i) {
    const Event& e = stream.events[i];
    if (e.polarity != 1 && e.polarity != -1)
      out.push_back({i, "polarity not in {+1,-1}"});
    if (e.x >= stream.width || e.y >= stream.height)
      out.push_back({i, "coordinates out of bounds"});
  }

  for (std::size_t i = 1; i < n; ++i) {
    if (!canonical_less(stream.events[i - 1], stream.events[i]))
      out.push_back({i, "unsorted at index " + std::to_string(i)});
  }

  // Per-pixel strict timestamp increase. A flat array is cheap for normal
  // sensor sizes; fall back to a map for degenerate headers.
  const std::size_t npix = static_cast<std::size_t>(stream.width) * stream.height;
  if (npix > 0 && npix <= (1u << 26)) {
    std::vector<std::int64_t> last(npix, -1);
    for (std::size_t i = 0; i < n; ++i) {
      const Event& e = stream.events[i];
      if (e.x >= stream.width || e.y >= stream.height) continue;
      const std::size_t p = static_cast<std::size_t>(e.y) * stream.width + e.x;
      if (last[p] >= 0 && static_cast<std::uint64_t>(last[p]) >= e.t)
        out.push_back({i, "duplicate pixel timestamp"});
      last[p] = static_cast<std::int64_t>(e.t);
    }
  } else {
    std::unordered_map<std::uint32_t, std::uint64_t> last;
    for (std::size_t i = 0; i < n; ++i) {
      const Event& e = stream.events[i];
      if (e.x >= stream.width || e.y >= stream.height) continue;
      const std::uint32_t p = (static_cast<std::uint32_t>(e.y) << 16) | e.x;
      auto it = last.find(p);
      if (it != last.end() && it->second >= e.t)
        out.push_back({i, "duplicate pixel timestamp"});
      last[p] = e.t;
    }
  }

  std::sort(out.begin(), out.end(),
            [](const Violation& a, const Violation& b) { return a.index < b.index; });
  return out;
}

EventStream window(const EventStream& stream, std::uint64_t t_begin, std::uint64_t t_end) {
  if (t_begin > t_end) throw std::invalid_argument("window: t_begin > t_end");
  EventStream out;
  out.width = stream.width;
  out.height = stream.height;
  out.tick_ns = stream.tick_ns;
  auto lo = std::lower_bound(stream.events.begin(), stream.events.end(), t_begin,
                             [](const Event& e, std::uint64_t t) { return e.t < t; });
  auto hi = std::lower_bound(lo, stream.events.end(), t_end,
                             [](const Event& e, std::uint64_t t) { return e.t < t; });
  out.events.assign(lo, hi);
  return out;
}

void canonical_sort(std::vector<Event>& events) {
  std::sort(events.begin(), events.end(), canonical_less);
}

}  // namespace ieim
