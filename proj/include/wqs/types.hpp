// types.hpp: agent identifiers and bitmask worker sets.
#pragma once

#include <bit>
#include <compare>
#include <cstdint>
#include <iterator>

namespace wqs {

// Agents are dense indices into the market's declaration order; display
// names live on the Market.
struct WorkerId {
    int index = -1;
    auto operator<=>(const WorkerId&) const = default;
};

struct FirmId {
    int index = -1;
    auto operator<=>(const FirmId&) const = default;
};

// A subset of workers as a bitmask. Markets are capped at 24 workers, so a
// 32-bit mask always suffices and full subset sweeps stay enumerable.
class WorkerSet {
  public:
    static constexpr int kMaxWorkers = 24;

    constexpr WorkerSet() = default;

    static constexpr WorkerSet from_bits(std::uint32_t bits) {
        WorkerSet s;
        s.bits_ = bits;
        return s;
    }

    static constexpr WorkerSet single(WorkerId w) { return from_bits(1u << w.index); }

    constexpr std::uint32_t bits() const { return bits_; }
    constexpr bool empty() const { return bits_ == 0; }
    constexpr int size() const { return std::popcount(bits_); }
    constexpr bool contains(WorkerId w) const { return (bits_ >> w.index) & 1u; }
    constexpr bool subset_of(WorkerSet other) const { return (bits_ & ~other.bits_) == 0; }

    constexpr WorkerSet& add(WorkerId w) {
        bits_ |= 1u << w.index;
        return *this;
    }

    constexpr WorkerSet& remove(WorkerId w) {
        bits_ &= ~(1u << w.index);
        return *this;
    }

    friend constexpr WorkerSet operator|(WorkerSet a, WorkerSet b) { return from_bits(a.bits_ | b.bits_); }
    friend constexpr WorkerSet operator&(WorkerSet a, WorkerSet b) { return from_bits(a.bits_ & b.bits_); }
    // set difference
    friend constexpr WorkerSet operator-(WorkerSet a, WorkerSet b) { return from_bits(a.bits_ & ~b.bits_); }

    auto operator<=>(const WorkerSet&) const = default;

    // Iterates members in ascending worker-index order.
    class iterator {
      public:
        using value_type = WorkerId;
        using difference_type = std::ptrdiff_t;
        using iterator_category = std::forward_iterator_tag;

        constexpr iterator() = default;
        explicit constexpr iterator(std::uint32_t bits) : bits_(bits) {}

        constexpr WorkerId operator*() const { return WorkerId{std::countr_zero(bits_)}; }

        constexpr iterator& operator++() {
            bits_ &= bits_ - 1;
            return *this;
        }

        constexpr iterator operator++(int) {
            iterator t = *this;
            ++*this;
            return t;
        }

        constexpr bool operator==(const iterator&) const = default;

      private:
        std::uint32_t bits_ = 0;
    };

    constexpr iterator begin() const { return iterator(bits_); }
    constexpr iterator end() const { return iterator(0); }

  private:
    std::uint32_t bits_ = 0;
};

}  // namespace wqs
