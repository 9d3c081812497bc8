#include "lobkin/book.hpp"

#include <string>

namespace lobkin {

namespace {

std::string at(std::int64_t offset) {
    return offset < 0 ? std::string{} : " at event " + std::to_string(offset);
}

// True when an order on `side` priced at `price` reaches the opposite best.
bool crosses(Side side, Ticks price, const BookState& b) {
    const auto opp = b.best(other(side));
    if (!opp) return false;
    return side == Side::minus_side ? price >= *opp : price <= *opp;
}

}  // namespace

Units BookState::total_volume(Side s) const {
    Units sum = 0;
    for (const auto& [_, v] : levels(s)) sum += v;
    return sum;
}

ApplyResult apply_event(BookState& state, const OrderEvent& ev, std::int64_t offset) {
    if (ev.volume <= 0) {
        throw Error(Errc::negative_volume,
                    "volume must be positive" + at(offset), offset);
    }

    ApplyResult res;
    switch (ev.action) {
    case Action::add: {
        Units remaining = ev.volume;
        auto& opp = state.levels(other(ev.side));
        while (remaining > 0 && crosses(ev.side, ev.price, state)) {
            const Ticks best_opp = *state.best(other(ev.side));
            auto it = opp.find(best_opp);
            const Units take = remaining < it->second ? remaining : it->second;
            it->second -= take;
            if (it->second == 0) opp.erase(it);
            remaining -= take;
            res.traded += take;
        }
        if (remaining > 0) state.levels(ev.side)[ev.price] += remaining;
        break;
    }
    case Action::cancel: {
        auto& lv = state.levels(ev.side);
        auto it = lv.find(ev.price);
        if (it == lv.end() || it->second < ev.volume) {
            throw Error(Errc::cancel_on_empty_level,
                        "cancel exceeds resting volume" + at(offset), offset);
        }
        it->second -= ev.volume;
        if (it->second == 0) lv.erase(it);
        break;
    }
    case Action::execute: {
        const auto best = state.best(ev.side);
        if (!best || ev.price != *best) {
            throw Error(Errc::execute_beyond_depth,
                        "execute must target the side's best price" + at(offset), offset);
        }
        auto& lv = state.levels(ev.side);
        auto it = lv.find(*best);
        if (it->second < ev.volume) {
            throw Error(Errc::execute_beyond_depth,
                        "execute exceeds volume at best" + at(offset), offset);
        }
        it->second -= ev.volume;
        if (it->second == 0) lv.erase(it);
        res.traded = ev.volume;
        break;
    }
    default:
        throw Error(Errc::unknown_action, "unknown action" + at(offset), offset);
    }

    if (res.traded > 0) {
        res.transaction = true;
        state.tick_index += 1;
        state.last_transaction_ts = ev.ts_ms;
    }
    return res;
}

std::optional<BookState> Replayer::next() {
    while (pos_ < events_.size()) {
        const auto r = apply_event(book_, events_[pos_], static_cast<std::int64_t>(pos_));
        ++pos_;
        if (r.transaction) {
            if (transactions_ == 0) first_transaction_ts_ = book_.last_transaction_ts;
            ++transactions_;
            return book_;
        }
    }
    return std::nullopt;
}

std::optional<double> Replayer::avg_delta_t_ms() const {
    if (transactions_ < 2) return std::nullopt;
    return static_cast<double>(book_.last_transaction_ts - first_transaction_ts_) /
           static_cast<double>(transactions_ - 1);
}

std::vector<BookState> replay(std::span<const OrderEvent> events) {
    std::vector<BookState> out;
    Replayer rep(events);
    while (auto snap = rep.next()) out.push_back(std::move(*snap));
    return out;
}

}  // namespace lobkin
