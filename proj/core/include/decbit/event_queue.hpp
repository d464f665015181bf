#pragma once

#include <cstdint>
#include <queue>
#include <utility>
#include <vector>

namespace decbit {

// Min-heap of timed events. Events at the same time are ordered by `rank`
// and then by insertion ordinal, so dispatch order is a pure function of the
// insertion sequence.
template <class Payload>
class EventQueue {
 public:
  struct Entry {
    double time;
    int rank;
    std::uint64_t ordinal;
    Payload payload;
  };

  void push(double time, int rank, Payload payload) {
    heap_.push(Entry{time, rank, next_ordinal_++, std::move(payload)});
  }

  bool empty() const { return heap_.empty(); }
  std::size_t size() const { return heap_.size(); }
  const Entry& top() const { return heap_.top(); }

  Entry pop() {
    Entry e = heap_.top();
    heap_.pop();
    return e;
  }

  std::uint64_t inserted() const { return next_ordinal_; }

 private:
  struct Later {
    bool operator()(const Entry& a, const Entry& b) const {
      if (a.time != b.time) return a.time > b.time;
      if (a.rank != b.rank) return a.rank > b.rank;
      return a.ordinal > b.ordinal;
    }
  };

  std::priority_queue<Entry, std::vector<Entry>, Later> heap_;
  std::uint64_t next_ordinal_ = 0;
};

}  // namespace decbit
