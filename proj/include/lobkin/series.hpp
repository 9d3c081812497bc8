#ifndef LOBKIN_SERIES_HPP
#define LOBKIN_SERIES_HPP

#include <cstdint>
#include <string>
#include <vector>

#include "lobkin/types.hpp"

namespace lobkin {

// A value per event-time tick. origin_tick is the tick index of values[0].
struct TickSeries {
    std::vector<double> values;
    std::int64_t origin_tick = 0;
    std::string label;

    std::size_t size() const { return values.size(); }
};

// Non-overlapping block means of a TickSeries; values[b] covers source ticks
// [origin_tick + b*k, origin_tick + (b+1)*k - 1].
struct CoarseSeries {
    std::vector<double> values;
    int k = 1;
    std::int64_t origin_tick = 0;

    std::size_t size() const { return values.size(); }
};

// First difference: out[i] = s[i+1] - s[i], origin shifted one tick forward.
TickSeries velocity(const TickSeries& s);

// Block means with block length k >= 1; a trailing partial block is dropped.
CoarseSeries coarse_grain(const TickSeries& s, int k);

// Causal mean over the S*k most recent samples. The first defined output sits
// at source index S*k - 1, so the result's origin shifts by S*k - 1 ticks.
// Throws too_short when fewer than S*k samples exist.
TickSeries rolling_mean(const TickSeries& s, int k, int S);

struct Spectrum {
    std::vector<double> omega;  // angular frequency per tick, ascending
    std::vector<double> power;  // one-sided; sums to the series variance
    int segment_length = 0;
    int segments = 0;
};

// Segment-averaged periodogram of the mean-removed series: segments overlap
// by half, each is transformed raw (no taper) so that single-bin lines and
// impulses stay exact, and the averaged spectrum is rescaled to put total
// power equal to the series variance. Requires length >= 64.
Spectrum power_spectrum(const TickSeries& s, int target_segments = 8);

// Least-squares slope of log power against log omega over [omega_lo, omega_hi],
// returned as alpha where power ~ omega^-alpha. Bins with power <= 0 are
// dropped; fewer than 10 surviving bins raises degenerate_range.
double spectral_exponent(const Spectrum& sp, double omega_lo, double omega_hi);

// Default fit range: the lowest available decade [omega_min, 10*omega_min].
double spectral_exponent(const Spectrum& sp);

struct SegmentStats {
    double mean = 0.0;
    double variance = 0.0;
    std::size_t count = 0;
    std::vector<double> autocov;  // lags 0..10
};

struct StationarityReport {
    std::vector<SegmentStats> segments;
    double max_discrepancy_se = 0.0;  // largest pairwise mean gap in pooled SEs
    bool flagged = false;             // true when that gap exceeds 3 SEs
};

// Splits the series into n_segments equal parts (default 4) and compares
// segment means; a drifting level trips the flag, increments do not.
StationarityReport weak_stationarity_report(const TickSeries& s, int n_segments = 4);

}  // namespace lobkin

#endif
