#ifndef LOBKIN_KINETICS_HPP
#define LOBKIN_KINETICS_HPP

#include <optional>
#include <span>
#include <vector>

#include "lobkin/book.hpp"
#include "lobkin/layers.hpp"
#include "lobkin/series.hpp"
#include "lobkin/types.hpp"

namespace lobkin {

struct KineticParams {
    int gamma_c_minus = 18;
    int gamma_c_plus = 18;
    int k = 4;     // block length for coarse-grained regressions
    int S = 100;   // blocks per rolling window
    double theta_kn = 0.1;
    int gamma_min = kDefaultGammaMin;
    int gamma_max = kDefaultGammaMax;

    int gamma_c(Side s) const {
        return s == Side::minus_side ? gamma_c_minus : gamma_c_plus;
    }
    int window_ticks() const { return k * S; }
};

// Per-transaction reduction of one consecutive book-state pair. Flows and
// occupancies count volume at depths 0..gamma_c on each side, measured
// against that side's best one tick earlier. flow = placed - removed holds
// exactly on each side.
struct InnerLayerSample {
    std::int64_t tick = 0;
    std::int64_t ts_ms = 0;

    // flow_valid: the side had a reference best one tick earlier, so its flow
    // is measurable. I is the current occupancy (0 when the side is empty).
    bool flow_valid_minus = false, flow_valid_plus = false;
    Units f_minus = 0, f_plus = 0;    // net inner-layer flow
    Units c_minus = 0, c_plus = 0;    // volume placed
    Units a_minus = 0, a_plus = 0;    // volume withdrawn or consumed
    Units i_minus = 0, i_plus = 0;    // inner-layer occupancy
    bool empty_minus = false, empty_plus = false;  // side empty now

    // Velocities: side bests in ticks per tick, mid in half-ticks per tick,
    // so v_half == v_minus + v_plus exactly when all are defined.
    std::optional<std::int64_t> v_minus, v_plus, v_half;
    std::optional<std::int64_t> mid_half;  // current mid, half-ticks

    bool one_sided() const { return empty_minus || empty_plus || !flow_valid_minus || !flow_valid_plus; }
};

InnerLayerSample inner_flow(const BookState& prev, const BookState& curr,
                            const KineticParams& params);

// Streams a replay into one sample per consecutive snapshot pair.
std::vector<InnerLayerSample> collect_samples(std::span<const OrderEvent> events,
                                              const KineticParams& params);

// Zero-intercept least squares, slope = sum(xy)/sum(xx); empty or constant-zero
// x is degenerate and yields nullopt.
std::optional<double> zero_intercept_slope(std::span<const double> x,
                                           std::span<const double> y);

struct LineFit {
    double slope = 0.0;
    double intercept = 0.0;
};
std::optional<LineFit> ols_line(std::span<const double> x, std::span<const double> y);

// Mean free path from paired coarse blocks: the zero-intercept slope of
// velocity on flow over the S most recent aligned blocks.
std::optional<double> fit_mean_free_path(const CoarseSeries& v_blocks,
                                         const CoarseSeries& f_blocks, int S);

// Knudsen number with an explicit infinite state: infinite marks a side whose
// inner layer has emptied (no collisions in sight), missing marks a window
// where no slope could be measured. The two are never conflated.
struct KnVal {
    std::optional<double> value;
    bool infinite = false;

    bool finite() const { return value.has_value(); }
    bool missing() const { return !value && !infinite; }
    bool exceeds(double theta) const { return infinite || (value && *value > theta); }

    static KnVal inf() { return KnVal{std::nullopt, true}; }
    static KnVal none() { return KnVal{std::nullopt, false}; }
    static KnVal of(double v) { return KnVal{v, false}; }
};

KnVal knudsen(std::optional<double> L, int gamma_c, double i_bar, bool side_empty);

struct IndicatorRecord {
    std::int64_t tick = 0;
    std::int64_t ts_ms = 0;

    std::optional<double> L_minus, L_plus, L_sym;
    KnVal kn_minus, kn_plus, kn_sym;
    double i_bar_minus = 0.0, i_bar_plus = 0.0;
    double f_bar_minus = 0.0, f_bar_plus = 0.0;
    std::optional<double> lambda_minus, lambda_plus;

    std::optional<std::int64_t> mid_half;
    bool one_sided_book = false;
    bool minus_regime = false, plus_regime = false;
};

// Rolling indicators over the trailing window of S*k ticks, emitted once per
// tick as soon as one full window exists. Regression blocks that span a
// one-sided stretch are dropped; a window keeps its slope only while at least
// S/2 blocks survive.
std::vector<IndicatorRecord> compute_indicators(std::span<const InnerLayerSample> samples,
                                                const KineticParams& params);

// lambda = mean flow / mean occupancy over the same window, the fractional
// depletion (or growth) per tick of the inner layer.
std::optional<double> depletion_rate(double f_bar, double i_bar);

// Ticks until a layer depleting at constant rate lambda < 0 halves.
double halving_time(double lambda);

struct KappaFit {
    double kappa = 0.0;
    double r2 = 0.0;
    int n_bins = 0;
    std::vector<double> bin_i;       // occupancy bin value
    std::vector<double> bin_median;  // median Kn within the bin
};

// Inverse-density law Kn = kappa / <I>: occupancies round to integer bins,
// each bin contributes its median Kn, and kappa is the unweighted
// zero-intercept fit of those medians against 1/I. Needs >= 100 finite pairs.
KappaFit fit_kappa(std::span<const double> i_bar, std::span<const KnVal> kn);

struct JointQuantile {
    double theta = 0.0;
    double achieved_fraction = 0.0;
    double cross_correlation = 0.0;
    std::size_t n = 0;
};

// Smallest sample value theta with frac{lam_minus < theta AND lam_plus < theta}
// >= p; both-below is equivalent to max(pair) < theta, so the scan runs on the
// sorted per-tick maxima. Also reports the Pearson correlation of the pair.
JointQuantile joint_threshold_quantile(std::span<const double> lam_minus,
                                       std::span<const double> lam_plus, double p);

struct RegimeInterval {
    Side side = Side::minus_side;
    std::int64_t first_tick = 0;
    std::int64_t last_tick = 0;
};

// Flags side j at a tick iff lambda_j < theta_lambda and Kn_j > theta_kn
// (infinite Kn passes any threshold); contiguous flagged ticks merge into one
// interval per side. Mutates the records' regime flags in place.
std::vector<RegimeInterval> detect_regimes(std::span<IndicatorRecord> records,
                                           double theta_lambda, double theta_kn);

double pearson(std::span<const double> a, std::span<const double> b);

}  // namespace lobkin

#endif
