#ifndef LOBKIN_BOOK_HPP
#define LOBKIN_BOOK_HPP

#include <cstddef>
#include <map>
#include <optional>
#include <span>
#include <vector>

#include "lobkin/types.hpp"

namespace lobkin {

// Aggregate volume per price level, one map per side. Event time (tick_index)
// advances only when volume is consumed: analytics sample the book once per
// transaction, not per message.
struct BookState {
    std::map<Ticks, Units> minus;  // buys: best = largest price
    std::map<Ticks, Units> plus;   // sells: best = smallest price
    std::int64_t tick_index = 0;
    std::int64_t last_transaction_ts = 0;

    const std::map<Ticks, Units>& levels(Side s) const {
        return s == Side::minus_side ? minus : plus;
    }
    std::map<Ticks, Units>& levels(Side s) {
        return s == Side::minus_side ? minus : plus;
    }

    std::optional<Ticks> best(Side s) const {
        const auto& lv = levels(s);
        if (lv.empty()) return std::nullopt;
        return s == Side::minus_side ? lv.rbegin()->first : lv.begin()->first;
    }

    // Mid-price in half-ticks (x^- + x^+), kept integral so velocities are exact.
    std::optional<std::int64_t> mid_half_ticks() const {
        const auto lo = best(Side::minus_side);
        const auto hi = best(Side::plus_side);
        if (!lo || !hi) return std::nullopt;
        return *lo + *hi;
    }

    std::optional<Ticks> spread() const {
        const auto lo = best(Side::minus_side);
        const auto hi = best(Side::plus_side);
        if (!lo || !hi) return std::nullopt;
        return *hi - *lo;
    }

    bool one_sided() const { return minus.empty() || plus.empty(); }

    Units volume_at(Side s, Ticks price) const {
        const auto& lv = levels(s);
        const auto it = lv.find(price);
        return it == lv.end() ? 0 : it->second;
    }

    Units total_volume(Side s) const;
};

struct ApplyResult {
    bool transaction = false;   // tick_index advanced
    Units traded = 0;           // volume consumed by this event
};

// Mutates `state` by one event. An add priced at or through the opposite best
// consumes opposite volume in price priority first and books any remainder;
// any volume consumption counts as one transaction. `offset` tags errors with
// the event's position in its log.
ApplyResult apply_event(BookState& state, const OrderEvent& ev, std::int64_t offset = -1);

// Pull-based replay: each next() applies events up to and including the next
// transaction and hands back a copy of the book at that instant. Memory stays
// bounded by the book itself regardless of log length.
class Replayer {
public:
    explicit Replayer(std::span<const OrderEvent> events) : events_(events) {}

    std::optional<BookState> next();

    const BookState& book() const { return book_; }
    std::size_t events_consumed() const { return pos_; }

    // Realized mean calendar time between consecutive transactions, once at
    // least two have occurred. Reporting only; no analytic consumes it.
    std::optional<double> avg_delta_t_ms() const;

private:
    std::span<const OrderEvent> events_;
    BookState book_;
    std::size_t pos_ = 0;
    std::int64_t first_transaction_ts_ = 0;
    std::int64_t transactions_ = 0;
};

// Materialized convenience for small logs; larger pipelines should stream.
std::vector<BookState> replay(std::span<const OrderEvent> events);

}  // namespace lobkin

#endif
