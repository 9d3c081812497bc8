#include "lobkin/synth.hpp"

#include <algorithm>
#include <cmath>

#include "lobkin/book.hpp"
#include "lobkin/layers.hpp"
#include "lobkin/rng.hpp"

namespace lobkin {

namespace {

constexpr int kTrendBandWidth = 12;   // cancel band above the planted boundary
constexpr double kNearBestRate = 0.15;  // deposit weight for the three touch levels
constexpr double kRefLevelTarget = 50.0 / 18.0;  // per-level occupancy the rates are tuned at

void validate(const SynthConfig& cfg) {
    if (cfg.n_events < 1000) {
        throw Error(Errc::config_invalid, "need a budget of at least 1000 events");
    }
    if (cfg.planted_gamma_c < 2 || cfg.planted_gamma_c > kDefaultGammaMax) {
        throw Error(Errc::config_invalid, "planted boundary out of range");
    }
    if (cfg.inner_density_target < 4.0) {
        throw Error(Errc::config_invalid, "inner density target too small");
    }
    for (double r : {cfg.base_depth_rate, cfg.cancel_rate, cfg.outer_deposit_rate,
                     cfg.market_order_rate, cfg.trend_follow_strength}) {
        if (r < 0.0) throw Error(Errc::config_invalid, "rates must be nonnegative");
    }
}

// Book-coupled emitter: the internal book is the authority for what events
// are legal, so generated logs replay without errors by construction.
class Generator {
public:
    explicit Generator(const SynthConfig& cfg) : cfg_(cfg), rng_(cfg.seed) {
        validate(cfg);
        band_hi_ = cfg.planted_gamma_c + kTrendBandWidth;  // exclusive
        level_target_ = cfg.inner_density_target / cfg.planted_gamma_c;
        ema_units_minus_ = ema_units_plus_ = level_target_ * band_hi_;
    }

    struct RoundMods {
        double dep_scale_minus = 1.0, dep_scale_plus = 1.0;
        double exec_rate_minus = -1.0, exec_rate_plus = -1.0;  // <0: config default
        double extra_cancel_minus = 0.0, extra_cancel_plus = 0.0;
        double wipe_prob_minus = -1.0, wipe_prob_plus = -1.0;
        bool may_empty_minus = false, may_empty_plus = false;
        bool reseed = true;  // keep both sides alive
    };

    void seed_book() {
        const auto per_level = std::max<Units>(1, std::llround(level_target_));
        for (int g = 0; g < band_hi_; ++g) {
            emit(Side::minus_side, cfg_.initial_price - 1 - g, Action::add, per_level);
            emit(Side::plus_side, cfg_.initial_price + 1 + g, Action::add, per_level);
        }
        for (int g = band_hi_; g < band_hi_ + 40; ++g) {
            emit(Side::minus_side, cfg_.initial_price - 1 - g, Action::add, 1);
            emit(Side::plus_side, cfg_.initial_price + 1 + g, Action::add, 1);
        }
        last_mid_half_ = *book_.mid_half_ticks();
    }

    void round(const RoundMods& mods) {
        deposits(Side::minus_side, mods.dep_scale_minus);
        deposits(Side::plus_side, mods.dep_scale_plus);
        churn_cancels(Side::minus_side, mods.extra_cancel_minus);
        churn_cancels(Side::plus_side, mods.extra_cancel_plus);
        // Weak restoring bias in which side gets hit: keeps the price path
        // range-bound over long runs, so far-field volume parked along the
        // path stays inside wide layers instead of being wandered away from.
        double bias = 0.0;
        if (const auto mid = book_.mid_half_ticks()) {
            const double excursion =
                (static_cast<double>(*mid) / 2.0 - static_cast<double>(cfg_.initial_price));
            bias = std::clamp(excursion / 150.0, -0.25, 0.25);
        }
        market_orders(Side::minus_side,
                      (mods.exec_rate_minus < 0 ? cfg_.market_order_rate : mods.exec_rate_minus) *
                          (1.0 + bias),
                      mods.wipe_prob_minus < 0 ? cfg_.full_wipe_prob : mods.wipe_prob_minus,
                      mods.may_empty_minus);
        market_orders(Side::plus_side,
                      (mods.exec_rate_plus < 0 ? cfg_.market_order_rate : mods.exec_rate_plus) *
                          (1.0 - bias),
                      mods.wipe_prob_plus < 0 ? cfg_.full_wipe_prob : mods.wipe_prob_plus,
                      mods.may_empty_plus);
        if (mods.reseed) {
            reseed_if_empty(Side::minus_side);
            reseed_if_empty(Side::plus_side);
        }
        trend_follow();
    }

    // Resting units within depths [0, planted boundary), measured from the
    // side's current best. The scripted scenarios steer on this number.
    Units inner_units(Side side) const {
        const auto ref = book_.best(side);
        if (!ref) return 0;
        Units sum = 0;
        const auto& lv = book_.levels(side);
        for (const auto& [price, vol] : lv) {
            const int g = depth_of(price, side, *ref);
            if (g >= 0 && g < cfg_.planted_gamma_c) sum += vol;
        }
        return sum;
    }

    // Cancels down to `floor_units` in the inner band, deepest levels first,
    // never touching the last unit at the best price.
    void force_deplete_inner(Side side, Units floor_units) {
        auto ref = book_.best(side);
        if (!ref) return;
        while (inner_units(side) > floor_units) {
            const auto& lv = book_.levels(side);
            Ticks deepest = *ref;
            bool found = false;
            for (const auto& [price, vol] : lv) {
                const int g = depth_of(price, side, *ref);
                if (g < 0 || g >= cfg_.planted_gamma_c) continue;
                if (!found || g > depth_of(deepest, side, *ref)) {
                    deepest = price;
                    found = true;
                }
            }
            if (!found) break;
            Units vol = book_.volume_at(side, deepest);
            if (deepest == *ref && vol <= 1) break;
            if (deepest == *ref) vol -= 1;
            const Units excess = inner_units(side) - floor_units;
            emit(side, deepest, Action::cancel, std::min(vol, excess));
        }
    }

    // Pulls every resting unit parked beyond `keep_depth` from the side's
    // current best in one burst of cancels: quotes fading ahead of a fast
    // move, leaving thin territory for the price to climb into.
    void withdraw_beyond(Side side, int keep_depth) {
        const auto ref = book_.best(side);
        if (!ref) return;
        std::vector<std::pair<Ticks, Units>> victims;
        for (const auto& [price, vol] : book_.levels(side)) {
            if (depth_of(price, side, *ref) >= keep_depth) victims.emplace_back(price, vol);
        }
        for (const auto& [price, vol] : victims) emit(side, price, Action::cancel, vol);
    }

    // Empties the side: cancel everything but one unit at best, execute it.
    void wipe_side(Side side) {
        while (true) {
            const auto ref = book_.best(side);
            if (!ref) return;
            const auto& lv = book_.levels(side);
            if (lv.size() == 1 && lv.begin()->second == 1) break;
            // peel a non-best level, or thin the best down to one unit
            Ticks target = *ref;
            for (const auto& [price, vol] : lv) {
                if (price != *ref) { target = price; break; }
            }
            if (target == *ref) {
                emit(side, target, Action::cancel, book_.volume_at(side, target) - 1);
            } else {
                emit(side, target, Action::cancel, book_.volume_at(side, target));
            }
        }
        emit(side, *book_.best(side), Action::execute, 1);
    }

    void reseed_if_empty(Side side) {
        if (!book_.levels(side).empty()) return;
        const auto opp = book_.best(other(side));
        const Ticks anchor = opp ? (side == Side::minus_side ? *opp - 3 : *opp + 3)
                                 : cfg_.initial_price;
        for (int g = 0; g < 6; ++g) {
            const Ticks price = side == Side::minus_side ? anchor - g : anchor + g;
            emit(side, price, Action::add, 1);
        }
    }

    bool budget_left() const { return events_.size() < cfg_.n_events; }
    std::size_t events_so_far() const { return events_.size(); }
    std::int64_t ticks() const { return book_.tick_index; }
    const BookState& book() const { return book_; }
    std::vector<OrderEvent> take_events() { return std::move(events_); }

private:
    void emit(Side side, Ticks price, Action action, Units vol) {
        if (vol <= 0) return;
        ts_ += rng_.bernoulli(0.35) ? 0 : rng_.uniform_int(1, 30);
        OrderEvent ev{ts_, side, price, action, vol};
        const auto res = apply_event(book_, ev, static_cast<std::int64_t>(events_.size()));
        events_.push_back(ev);
        if (res.transaction) {
            tick_ref_minus_ = book_.best(Side::minus_side);
            tick_ref_plus_ = book_.best(Side::plus_side);
        }
    }

    // Best price at the last transaction: the reference depth changes between
    // consecutive snapshots are measured against. Requotes anchor here so the
    // planted depth structure lands where the analysis bins it.
    std::optional<Ticks> tick_ref(Side side) const {
        const auto& r = side == Side::minus_side ? tick_ref_minus_ : tick_ref_plus_;
        return r ? r : book_.best(side);
    }

    // Replenishment uses a fixed side-total budget per pass, allocated over
    // depths by static weights (heavier near the best, where executions
    // drain). The budget tracks occupancy only through a slow moving average,
    // so the total inflow cannot chase price moves within a correlation
    // block; per-level balance is restored by cancels instead, which pick
    // victims in proportion to resting volume.
    void deposits(Side side, double scale) {
        if (scale <= 0.0) return;
        const auto ref = tick_ref(side);
        if (!ref) return;

        double& ema = side == Side::minus_side ? ema_units_minus_ : ema_units_plus_;
        const double in_band =
            static_cast<double>(units_in_band(side, *ref, 0, band_hi_ - 1));
        ema += (in_band - ema) / 400.0;
        const double target_total = level_target_ * band_hi_;
        // Scale the refill budget with the occupancy target so the balance
        // point between deposits, churn, and executions lands near the target
        // at every density, not just the reference one.
        const double budget_base =
            (kNearBestRate * 3 + cfg_.base_depth_rate * std::max(0, band_hi_ - 3)) *
            (level_target_ / kRefLevelTarget);
        const double budget =
            budget_base * std::clamp(target_total / std::max(ema, 1.0), 0.7, 1.4);

        const auto n = rng_.poisson(budget * scale);
        for (std::int64_t i = 0; i < n; ++i) {
            const int g = sample_deposit_depth();
            const Units vol = rng_.bernoulli(0.1) ? 2 : 1;
            emit(side, price_at_depth(g, side, *ref), Action::add, vol);
        }

        const auto spread = book_.spread();
        if (spread && *spread >= 2 && rng_.bernoulli(cfg_.inside_spread_prob * scale)) {
            const Ticks off = rng_.uniform_int(1, *spread - 1);
            const Ticks price = side == Side::minus_side ? *ref + off : *ref - off;
            emit(side, price, Action::add, 1);
        }

        // The far field accumulates resting volume over time (the slow ramp
        // visible in wide-layer totals). Density-sweep runs leave it out so
        // the inner occupancy equilibrates at the configured target instead
        // of absorbing far-field volume the price path sweeps through.
        const double outer_rate =
            cfg_.scenario == Scenario::density_sweep ? 0.0 : cfg_.outer_deposit_rate;
        const auto n_outer = rng_.poisson(outer_rate * scale);
        for (std::int64_t i = 0; i < n_outer; ++i) {
            const int g =
                band_hi_ + std::min(290, static_cast<int>(rng_.exponential(20.0)));
            emit(side, price_at_depth(g, side, *ref), Action::add, 1);
        }
        // A second, deeper component parks volume at fixed price offsets well
        // away from the starting mid. It accumulates over the whole run,
        // giving wide-layer volume totals their slow random-walk-like growth.
        // Per-level volume is capped so that when a long price excursion does
        // grind through the parked region, the best level never sits on a
        // tall accumulation; deposits that would land near the managed band
        // are dropped instead of repositioned.
        const auto n_far = rng_.poisson(0.8 * outer_rate * scale);
        for (std::int64_t i = 0; i < n_far; ++i) {
            const Ticks off =
                75 + std::min<Ticks>(250, static_cast<Ticks>(rng_.exponential(60.0)));
            const Ticks price = side == Side::minus_side ? cfg_.initial_price - off
                                                         : cfg_.initial_price + off;
            if (depth_of(price, side, *ref) < band_hi_ + 5) continue;
            if (book_.volume_at(side, price) >= 10) continue;
            emit(side, price, Action::add, 1);
        }
    }

    int sample_deposit_depth() {
        const double near_total = kNearBestRate * 3;
        const double total = near_total + cfg_.base_depth_rate * std::max(0, band_hi_ - 3);
        const double u = rng_.uniform() * total;
        if (u < near_total || band_hi_ <= 3) {
            return static_cast<int>(u / kNearBestRate) % std::min(band_hi_, 3);
        }
        const int g = 3 + static_cast<int>((u - near_total) / cfg_.base_depth_rate);
        return std::min(g, band_hi_ - 1);
    }

    void churn_cancels(Side side, double extra) {
        const auto ref = tick_ref(side);
        if (!ref) return;
        const double& ema = side == Side::minus_side ? ema_units_minus_ : ema_units_plus_;
        const auto n = rng_.poisson(cfg_.cancel_rate * ema + extra);
        for (std::int64_t i = 0; i < n; ++i) {
            cancel_random_unit(side, *ref, 0, band_hi_ - 1);
        }
    }

    void market_orders(Side side, double rate, double wipe_prob, bool may_empty) {
        const auto n = rng_.poisson(rate);
        for (std::int64_t i = 0; i < n; ++i) {
            const auto best = book_.best(side);
            if (!best) continue;
            const Units at_best = book_.volume_at(side, *best);
            Units vol = rng_.bernoulli(wipe_prob) ? at_best : 1;
            if (!may_empty && book_.levels(side).size() == 1) {
                vol = std::min(vol, at_best - 1);  // keep the side alive
            }
            if (vol >= 1) emit(side, *best, Action::execute, vol);
        }
    }

    // Requoting after a move. The side the price pulled away from re-places
    // volume close to its best and drops stale volume beyond the boundary;
    // the side the price moved toward pulls inner quotes and reposts them
    // deep. Per level the two directions balance, so no background flow has
    // to compensate (compensating flow would cancel the planted correlation
    // inside a coarse block), while both move directions push the velocity
    // correlation the same way: positive below the boundary, negative in the
    // band above it. Depths act independently, keeping the signal uniform.
    void trend_follow() {
        const auto mid = book_.mid_half_ticks();
        if (!mid) return;
        const std::int64_t v_half = *mid - last_mid_half_;
        last_mid_half_ = *mid;
        if (v_half == 0 || cfg_.trend_follow_strength <= 0.0) return;

        const int gc = cfg_.planted_gamma_c;
        const double scale = std::min(std::abs(v_half) / 2.0, 4.0);
        const double p = std::min(0.85, 0.05 * cfg_.trend_follow_strength * scale);
        // Requote intensity ramps up toward the boundary so the aggregate
        // inner signal keeps growing all the way out to it.
        const auto p_at = [&](int g) {
            return std::min(0.9, p * (0.75 + 0.7 * static_cast<double>(g) / gc));
        };
        for (const Side side : {Side::minus_side, Side::plus_side}) {
            const auto ref = tick_ref(side);
            if (!ref) continue;
            const bool trailing = (side == Side::minus_side) == (v_half > 0);
            if (trailing) {
                for (int g = 0; g < gc; ++g) {
                    if (rng_.bernoulli(p_at(g))) {
                        emit(side, price_at_depth(g, side, *ref), Action::add, 1);
                    }
                }
                for (int g = gc; g < band_hi_; ++g) {
                    if (rng_.bernoulli(p)) cancel_unit_at_depth(side, g, *ref, gc, band_hi_ - 1);
                }
            } else {
                // keep depth 0 out of the pull range so quote withdrawal does
                // not itself move the best price
                for (int g = 1; g < gc; ++g) {
                    if (rng_.bernoulli(p_at(g))) cancel_unit_at_depth(side, g, *ref, 1, gc - 1);
                }
                for (int g = gc; g < band_hi_; ++g) {
                    if (rng_.bernoulli(p)) {
                        emit(side, price_at_depth(g, side, *ref), Action::add, 1);
                    }
                }
            }
        }
    }

    Units units_in_band(Side side, Ticks ref, int g_lo, int g_hi) const {
        Units sum = 0;
        for (const auto& [price, vol] : book_.levels(side)) {
            const int g = depth_of(price, side, ref);
            if (g >= g_lo && g <= g_hi) sum += vol;
        }
        return sum;
    }

    // Cancels one unit at depth g, walking to the nearest occupied depth in
    // [lo, hi] when g itself is empty. Without the walk, cancels silently
    // no-op on thin levels while the matching adds always land, which pumps
    // the layer above its target at low densities.
    void cancel_unit_at_depth(Side side, int g, Ticks ref, int lo, int hi) {
        // Density-sweep runs walk to a close occupied neighbour when g is
        // empty: thin books otherwise let requote cancels no-op while the
        // matching adds land, pumping occupancy above the configured target.
        // Other scenarios keep cancels strictly at g — the walk trades a
        // little placement fidelity, which the wide-boundary recovery runs
        // cannot spare, for calibration the sweep does not otherwise get.
        const int radius =
            cfg_.scenario == Scenario::density_sweep ? std::min(2, hi - lo) : 0;
        for (int d = 0; d <= radius; ++d) {
            for (const int cand : {g - d, g + d}) {
                if (cand < lo || cand > hi) continue;
                const Ticks price = price_at_depth(cand, side, ref);
                const Units vol = book_.volume_at(side, price);
                if (vol < 1) continue;
                if (book_.levels(side).size() == 1 && vol == 1) return;
                emit(side, price, Action::cancel, 1);
                return;
            }
        }
    }

    void cancel_random_unit(Side side, Ticks ref, int g_lo, int g_hi) {
        const Units total = units_in_band(side, ref, g_lo, g_hi);
        if (total == 0) return;
        Units pick = rng_.uniform_int(0, total - 1);
        for (const auto& [price, vol] : book_.levels(side)) {
            const int g = depth_of(price, side, ref);
            if (g < g_lo || g > g_hi) continue;
            if (pick < vol) {
                // never cancel the last unit of the side's only level
                if (book_.levels(side).size() == 1 && vol == 1) return;
                emit(side, price, Action::cancel, 1);
                return;
            }
            pick -= vol;
        }
    }

    const SynthConfig cfg_;
    CounterRng rng_;
    BookState book_;
    std::vector<OrderEvent> events_;
    std::int64_t ts_ = 1000;
    std::int64_t last_mid_half_ = 0;
    int band_hi_ = 0;
    double level_target_ = 0.0;
    double ema_units_minus_ = 0.0, ema_units_plus_ = 0.0;
    std::optional<Ticks> tick_ref_minus_, tick_ref_plus_;
};

}  // namespace

std::vector<OrderEvent> generate(const SynthConfig& cfg) {
    if (cfg.scenario == Scenario::flash_crash) {
        return generate_flash_crash(cfg).events;
    }

    Generator gen(cfg);
    gen.seed_book();
    Generator::RoundMods normal;

    if (cfg.scenario == Scenario::one_sided_halt) {
        const auto halt_at = static_cast<std::size_t>(0.45 * static_cast<double>(cfg.n_events));
        while (gen.budget_left() && gen.events_so_far() < halt_at) gen.round(normal);
        gen.wipe_side(Side::minus_side);
        Generator::RoundMods halted;
        halted.dep_scale_minus = 0.0;
        halted.exec_rate_minus = 0.0;
        halted.exec_rate_plus = 1.0;
        halted.reseed = false;
        halted.may_empty_minus = true;
        for (int r = 0; r < 15 && gen.budget_left(); ++r) gen.round(halted);
        gen.reseed_if_empty(Side::minus_side);
    }

    while (gen.budget_left()) gen.round(normal);
    return gen.take_events();
}

FlashCrashLog generate_flash_crash(const SynthConfig& cfg) {
    SynthConfig c = cfg;
    c.n_events = std::max<std::size_t>(c.n_events, 60000);
    Generator gen(c);
    gen.seed_book();
    FlashCrashLog log;

    Generator::RoundMods normal;
    while (gen.ticks() < 500) gen.round(normal);
    log.baseline_end_tick = gen.ticks();

    const Units i_start = gen.inner_units(Side::minus_side);
    const Units floor_units = std::max<Units>(2, i_start / 9);
    // Bids fade as the sell-off begins: standing volume parked below the
    // inner band is withdrawn in one burst, so the falling price meets thin
    // territory and each trade moves it a long way.
    gen.withdraw_beyond(Side::minus_side, c.planted_gamma_c);
    Generator::RoundMods crash;
    crash.dep_scale_minus = 0.05;
    crash.extra_cancel_minus = 1.2;
    crash.exec_rate_minus = 1.1;
    crash.exec_rate_plus = 0.3;
    crash.wipe_prob_minus = 0.7;
    const std::int64_t crash_start = gen.ticks();
    while (gen.inner_units(Side::minus_side) > floor_units &&
           gen.ticks() - crash_start < 600) {
        gen.round(crash);
    }
    // Hold the bid side at the depleted floor for longer than the rolling
    // indicator window, so trailing averages settle onto the depleted state
    // while the mid keeps grinding lower toward its eventual minimum. Bids
    // barely replenish and standing ones keep getting hit whole, so each
    // trade moves the price a long way per unit of volume.
    Generator::RoundMods starve = crash;
    starve.dep_scale_minus = 0.03;
    starve.exec_rate_minus = 0.6;
    starve.wipe_prob_minus = 0.35;
    starve.extra_cancel_minus = 0.3;
    const std::int64_t starve_start = gen.ticks();
    while (gen.ticks() - starve_start < 450) gen.round(starve);
    gen.force_deplete_inner(Side::minus_side, floor_units);
    // one more transaction so the depleted state is visible at a tick
    Generator::RoundMods nudge = crash;
    nudge.dep_scale_minus = 0.0;
    nudge.exec_rate_minus = 1.0;
    nudge.exec_rate_plus = 0.0;
    nudge.wipe_prob_minus = 0.0;
    gen.round(nudge);
    log.depletion_end_tick = gen.ticks();

    if (c.include_total_exhaustion) {
        gen.wipe_side(Side::minus_side);
        log.exhaustion_tick = gen.ticks();
    }
    gen.reseed_if_empty(Side::minus_side);
    log.rebound_start_tick = gen.ticks();

    const Units p_start = gen.inner_units(Side::plus_side);
    const Units p_floor = std::max<Units>(2, p_start / 9);
    // Offers fade ahead of the recovery: ask-side volume parked beyond the
    // inner band — including the dense stock deposited along the sell-off
    // path — is withdrawn, so the rally climbs into thin territory the same
    // way the crash fell into it.
    gen.withdraw_beyond(Side::plus_side, c.planted_gamma_c);
    Generator::RoundMods rebound;
    rebound.dep_scale_plus = 0.1;
    rebound.extra_cancel_plus = 1.0;
    rebound.exec_rate_plus = 1.1;
    rebound.exec_rate_minus = 0.3;
    rebound.wipe_prob_plus = 0.7;
    const std::int64_t rebound_start = gen.ticks();
    while (gen.inner_units(Side::plus_side) > p_floor &&
           gen.ticks() - rebound_start < 600) {
        gen.round(rebound);
    }
    // Mirror of the bid-side starvation: keep the ask side pinned at its
    // floor past one indicator window while buying pressure lifts the mid.
    // Offers barely replenish and standing ones keep getting lifted whole,
    // so each trade jumps the price a long way per unit of volume.
    Generator::RoundMods squeeze = rebound;
    squeeze.dep_scale_plus = 0.03;
    squeeze.exec_rate_plus = 0.6;
    squeeze.wipe_prob_plus = 0.35;
    squeeze.extra_cancel_plus = 0.3;
    const std::int64_t squeeze_start = gen.ticks();
    while (gen.ticks() - squeeze_start < 450) gen.round(squeeze);
    log.rebound_end_tick = gen.ticks();

    const std::int64_t tail_start = gen.ticks();
    while (gen.ticks() - tail_start < 400) gen.round(normal);

    log.events = gen.take_events();
    return log;
}

KnownSlopePair generate_known_slope(std::uint64_t seed, double slope,
                                    double noise_sigma, int n_blocks, int k) {
    if (n_blocks < 1) throw Error(Errc::config_invalid, "need at least one block");
    CounterRng rng(seed);
    KnownSlopePair out;
    out.f.k = out.v.k = k;
    out.f.values.resize(n_blocks);
    out.v.values.resize(n_blocks);
    for (int b = 0; b < n_blocks; ++b) {
        const double f = rng.normal();
        out.f.values[b] = f;
        out.v.values[b] = slope * f + rng.normal(0.0, noise_sigma);
    }
    return out;
}

}  // namespace lobkin
