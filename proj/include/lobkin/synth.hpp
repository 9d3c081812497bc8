#ifndef LOBKIN_SYNTH_HPP
#define LOBKIN_SYNTH_HPP

#include <cstdint>
#include <optional>
#include <vector>

#include "lobkin/series.hpp"
#include "lobkin/types.hpp"

namespace lobkin {

enum class Scenario {
    stationary,      // balanced flow, occupancy held near its target
    density_sweep,   // stationary; sweeps vary inner_density_target across runs
    flash_crash,     // scripted one-side depletion, optional exhaustion, rebound
    one_sided_halt,  // one side wiped and later reseeded
};

// All rates are per round, and a round carries one transaction on average at
// the default market order rate, so they read as per-tick intensities.
struct SynthConfig {
    std::uint64_t seed = 1;
    std::size_t n_events = 100000;
    Scenario scenario = Scenario::stationary;

    double inner_density_target = 50.0;  // resting units per side, depths 0..gamma_c-1
    double base_depth_rate = 0.08;       // deposits per level away from the best
    double cancel_rate = 0.02;           // per resting unit, churn band only
    double outer_deposit_rate = 1.2;     // per side, depths beyond the boundary
    double market_order_rate = 1.0;      // per side
    double trend_follow_strength = 12.0;  // requote intensity per unit of price movement
    int planted_gamma_c = 18;            // layer boundary the flow plants
    double full_wipe_prob = 0.3;         // chance a market order clears the best level
    double inside_spread_prob = 0.25;    // deposit inside the spread when it is open

    Ticks initial_price = 10000;
    bool include_total_exhaustion = true;  // flash crash only
};

// Deterministic per (seed, config): two calls produce identical logs. Every
// log replays cleanly from an empty book.
std::vector<OrderEvent> generate(const SynthConfig& cfg);

// Flash crash with its phase boundaries in event time. The depletion phase
// shrinks minus-side inner occupancy at least eightfold while the plus side
// holds; the rebound does the mirror after an optional full minus-side wipe.
struct FlashCrashLog {
    std::vector<OrderEvent> events;
    std::int64_t baseline_end_tick = 0;
    std::int64_t depletion_end_tick = 0;
    std::optional<std::int64_t> exhaustion_tick;
    std::int64_t rebound_start_tick = 0;
    std::int64_t rebound_end_tick = 0;
};

FlashCrashLog generate_flash_crash(const SynthConfig& cfg);

// Calibration pairs with a known answer: v = slope * f + Gaussian noise,
// f standard normal per block.
struct KnownSlopePair {
    CoarseSeries v;
    CoarseSeries f;
};

KnownSlopePair generate_known_slope(std::uint64_t seed, double slope,
                                    double noise_sigma, int n_blocks, int k = 4);

}  // namespace lobkin

#endif
