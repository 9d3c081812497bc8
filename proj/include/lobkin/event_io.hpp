#ifndef LOBKIN_EVENT_IO_HPP
#define LOBKIN_EVENT_IO_HPP

#include <iosfwd>
#include <string>
#include <vector>

#include "lobkin/kinetics.hpp"
#include "lobkin/types.hpp"

namespace lobkin {

// Event logs travel as CSV with the exact header below; sides are B (minus)
// and S (plus), actions A/C/X for add/cancel/execute. Parsing is strict:
// any malformed row aborts with its 1-based line number, and timestamps must
// never decrease.
inline constexpr const char* kEventLogHeader = "ts_ms,side,price_ticks,action,volume_units";

std::vector<OrderEvent> parse_event_log(std::istream& in);
std::vector<OrderEvent> load_event_log(const std::string& path);

void write_event_log(std::ostream& out, const std::vector<OrderEvent>& events);
void save_event_log(const std::string& path, const std::vector<OrderEvent>& events);

// One JSON object per line per record. Finite numbers round-trip at full
// precision; an infinite Knudsen number is the literal "inf" with its flag
// set, never a large float; unmeasurable values are null.
void write_indicator_ndjson(std::ostream& out, const std::vector<IndicatorRecord>& records,
                            const std::string& symbol, const std::string& config_fingerprint);

// Stable 64-bit FNV-1a digest of the run configuration, hex-encoded.
std::string config_fingerprint(const MarketSpec& market, const KineticParams& params,
                               double theta_lambda);

}  // namespace lobkin

#endif
