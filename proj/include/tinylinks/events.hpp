#pragma once

#include <map>
#include <string>
#include <utility>

namespace tinylinks {

// Marks on events-environment entries: E = the event occurred, EA = occurred
// and later asserted, A = asserted (registered as an obligation) without
// having occurred.
enum class Mark { E, EA, A };

inline const char* mark_name(Mark m) {
  switch (m) {
    case Mark::E: return "E";
    case Mark::EA: return "EA";
    case Mark::A: return "A";
  }
  return "?";
}

inline bool mark_occurred(Mark m) { return m == Mark::E || m == Mark::EA; }
inline bool mark_asserted(Mark m) { return m == Mark::EA || m == Mark::A; }

// An events environment over a value domain D: a finite map from predicate
// names to (value, mark). The interpreter instantiates D with concrete
// integers; the analysis instantiates it with abstract denotable values.
template <class D>
using EventsEnv = std::map<std::string, std::pair<D, Mark>>;

}  // namespace tinylinks
