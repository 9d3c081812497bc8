#ifndef LOBKIN_TYPES_HPP
#define LOBKIN_TYPES_HPP

#include <cstdint>
#include <stdexcept>
#include <string>

namespace lobkin {

// Prices are integer multiples of the market's tick size; volumes are integer
// multiples of the market's unit size. All analytics run on these integers,
// so replays are exactly reproducible. The physical scales below are carried
// only for reporting.
using Ticks = std::int64_t;
using Units = std::int64_t;

struct MarketSpec {
    std::string symbol = "SYN";
    double tick_size = 0.001;   // price units per tick, > 0
    double unit_size = 1.0e6;   // volume per unit, > 0
};

enum class Side : std::uint8_t {
    minus_side = 0,  // resting buy orders, below the spread
    plus_side = 1,   // resting sell orders, above the spread
};

inline Side other(Side s) {
    return s == Side::minus_side ? Side::plus_side : Side::minus_side;
}

inline const char* side_name(Side s) {
    return s == Side::minus_side ? "minus" : "plus";
}

enum class Action : std::uint8_t {
    add = 0,      // new resting volume at a price
    cancel = 1,   // resting volume withdrawn
    execute = 2,  // resting volume consumed at the side's best price
};

struct OrderEvent {
    std::int64_t ts_ms = 0;  // calendar milliseconds, nondecreasing within a log
    Side side = Side::minus_side;
    Ticks price = 0;
    Action action = Action::add;
    Units volume = 0;  // > 0
};

enum class Errc {
    negative_volume,
    cancel_on_empty_level,
    execute_beyond_depth,
    empty_side,
    too_short,
    degenerate_range,
    degenerate_variance,
    no_sign_change,
    no_peak,
    degenerate_regressor,
    insufficient_data,
    empty_inner_layer,
    malformed_row,
    non_monotonic_timestamp,
    unknown_action,
    config_invalid,
};

// `where` is the event index or text line that triggered the error, -1 when
// the failure is not tied to one position.
class Error : public std::runtime_error {
public:
    Error(Errc c, std::string msg, std::int64_t where_ = -1)
        : std::runtime_error(std::move(msg)), code(c), where(where_) {}

    Errc code;
    std::int64_t where;
};

}  // namespace lobkin

#endif
