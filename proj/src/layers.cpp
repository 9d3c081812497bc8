#include "lobkin/layers.hpp"

#include <cmath>

namespace lobkin {

DepthProfile layer_profile(const BookState& state, Side side, Ticks ref_best,
                           int gamma_min, int gamma_max) {
    if (gamma_min > gamma_max) {
        throw Error(Errc::config_invalid, "gamma_min must not exceed gamma_max");
    }
    DepthProfile p;
    p.side = side;
    p.ref_best = ref_best;
    p.gamma_min = gamma_min;
    p.counts.assign(static_cast<std::size_t>(gamma_max - gamma_min) + 1, 0);

    // Depth is affine in price, so the depth window maps to one price range.
    const Ticks lo = side == Side::minus_side ? ref_best - gamma_max : ref_best + gamma_min;
    const Ticks hi = side == Side::minus_side ? ref_best - gamma_min : ref_best + gamma_max;
    const auto& lv = state.levels(side);
    for (auto it = lv.lower_bound(lo); it != lv.end() && it->first <= hi; ++it) {
        const int g = depth_of(it->first, side, ref_best);
        p.counts[static_cast<std::size_t>(g - gamma_min)] = it->second;
    }
    return p;
}

LayerDelta layer_delta(const BookState& prev, const BookState& curr, Side side,
                       int gamma_min, int gamma_max) {
    const auto ref = prev.best(side);
    if (!ref) {
        throw Error(Errc::empty_side,
                    std::string("no reference best on ") + side_name(side));
    }
    if (gamma_min > gamma_max) {
        throw Error(Errc::config_invalid, "gamma_min must not exceed gamma_max");
    }

    LayerDelta d;
    d.side = side;
    d.ref_best = *ref;
    d.gamma_min = gamma_min;
    const auto width = static_cast<std::size_t>(gamma_max - gamma_min) + 1;
    d.dn.assign(width, 0);
    d.added.assign(width, 0);
    d.removed.assign(width, 0);

    const Ticks lo = side == Side::minus_side ? *ref - gamma_max : *ref + gamma_min;
    const Ticks hi = side == Side::minus_side ? *ref - gamma_min : *ref + gamma_max;

    const auto& pl = prev.levels(side);
    const auto& cl = curr.levels(side);
    auto pi = pl.lower_bound(lo);
    auto ci = cl.lower_bound(lo);
    // Merge walk over both level maps within the price window.
    while ((pi != pl.end() && pi->first <= hi) || (ci != cl.end() && ci->first <= hi)) {
        Ticks price;
        Units before = 0, after = 0;
        const bool has_p = pi != pl.end() && pi->first <= hi;
        const bool has_c = ci != cl.end() && ci->first <= hi;
        if (has_p && (!has_c || pi->first <= ci->first)) price = pi->first;
        else price = ci->first;
        if (has_p && pi->first == price) { before = pi->second; ++pi; }
        if (has_c && ci->first == price) { after = ci->second; ++ci; }

        const auto g = static_cast<std::size_t>(depth_of(price, side, *ref) - gamma_min);
        const Units change = after - before;
        d.dn[g] = change;
        if (change > 0) d.added[g] = change;
        else d.removed[g] = -change;
    }
    return d;
}

CorrCurve corr_curve(std::span<const double> v, std::span<const LayerDelta> deltas,
                     int k, CorrMode mode, int gamma_max) {
    if (k < 1) throw Error(Errc::config_invalid, "block length k must be >= 1");
    if (v.size() != deltas.size()) {
        throw Error(Errc::config_invalid, "velocity and delta sequences differ in length");
    }
    const std::size_t blocks = v.size() / static_cast<std::size_t>(k);
    if (blocks < 30) {
        throw Error(Errc::too_short, "need at least 30 blocks for correlation");
    }

    CorrCurve out;
    out.mode = mode;
    out.k = k;
    out.corr.assign(static_cast<std::size_t>(gamma_max) + 1, std::nullopt);
    if (!deltas.empty()) out.side = deltas[0].side;

    const auto width = static_cast<std::size_t>(gamma_max) + 1;
    // Single-pass accumulators per depth over block means.
    std::vector<double> sa(width, 0.0), sb(width, 0.0), saa(width, 0.0),
        sbb(width, 0.0), sab(width, 0.0);
    std::int64_t used = 0;
    std::vector<double> bsum(width);

    for (std::size_t b = 0; b < blocks; ++b) {
        const std::size_t base = b * static_cast<std::size_t>(k);
        double vsum = 0.0;
        bool ok = true;
        for (int j = 0; j < k && ok; ++j) {
            const double x = v[base + j];
            if (std::isnan(x)) ok = false;
            vsum += x;
        }
        if (!ok) continue;

        std::fill(bsum.begin(), bsum.end(), 0.0);
        for (int j = 0; j < k; ++j) {
            const LayerDelta& d = deltas[base + j];
            for (int g = 0; g <= gamma_max; ++g) {
                bsum[static_cast<std::size_t>(g)] += static_cast<double>(d.delta(g));
            }
        }
        if (mode == CorrMode::cumulative) {
            for (std::size_t g = 1; g < width; ++g) bsum[g] += bsum[g - 1];
        }

        const double a = vsum / k;
        ++used;
        for (std::size_t g = 0; g < width; ++g) {
            const double x = bsum[g] / k;
            sa[g] += a;
            sb[g] += x;
            saa[g] += a * a;
            sbb[g] += x * x;
            sab[g] += a * x;
        }
    }

    out.n_blocks = used;
    if (used < 30) {
        throw Error(Errc::too_short, "fewer than 30 usable blocks after dropping gaps");
    }
    const auto n = static_cast<double>(used);
    for (std::size_t g = 0; g < width; ++g) {
        const double va = n * saa[g] - sa[g] * sa[g];
        const double vb = n * sbb[g] - sb[g] * sb[g];
        if (va <= 0.0 || vb <= 0.0) continue;  // no variance: leave missing
        out.corr[g] = (n * sab[g] - sa[g] * sb[g]) / std::sqrt(va * vb);
    }
    return out;
}

GammaCEstimate find_gamma_c(const CorrCurve& per_depth, const CorrCurve& cumulative) {
    if (per_depth.gamma_max() < 30 || cumulative.gamma_max() < 30) {
        throw Error(Errc::config_invalid, "curves must span depths 0..30 at least");
    }

    GammaCEstimate est;

    int best_gamma = -1;
    double best_abs = -1.0;
    for (int g = 0; g <= cumulative.gamma_max(); ++g) {
        const auto& c = cumulative.corr[static_cast<std::size_t>(g)];
        if (!c) continue;
        const double a = std::abs(*c);
        if (a > best_abs) {
            best_abs = a;
            best_gamma = g;
        }
    }
    if (best_gamma < 0) {
        throw Error(Errc::no_peak, "cumulative correlation curve is entirely missing");
    }
    est.gamma_c = best_gamma;

    // Reference orientation: sign of the first defined per-depth value.
    int prev_gamma = -1;
    int ref_sign = 0;
    int flip_at = -1;
    for (int g = 0; g <= per_depth.gamma_max(); ++g) {
        const auto& c = per_depth.corr[static_cast<std::size_t>(g)];
        if (!c || *c == 0.0) continue;
        const int sgn = *c > 0.0 ? 1 : -1;
        if (ref_sign == 0) {
            ref_sign = sgn;
        } else if (sgn != ref_sign) {
            flip_at = prev_gamma;  // last depth still carrying the reference sign
            break;
        }
        prev_gamma = g;
    }
    if (ref_sign == 0) {
        throw Error(Errc::no_sign_change, "per-depth correlation carries no sign");
    }
    if (flip_at < 0) {
        throw Error(Errc::no_sign_change, "per-depth correlation never changes sign");
    }
    est.small_gamma_sign = ref_sign;
    est.secondary = flip_at;
    est.method_agreement = std::abs(est.gamma_c - est.secondary);
    return est;
}

}  // namespace lobkin
