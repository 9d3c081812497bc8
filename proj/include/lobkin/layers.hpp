#ifndef LOBKIN_LAYERS_HPP
#define LOBKIN_LAYERS_HPP

#include <optional>
#include <span>
#include <vector>

#include "lobkin/book.hpp"
#include "lobkin/series.hpp"
#include "lobkin/types.hpp"

namespace lobkin {

// Depth of a price on a side, measured in ticks from a reference best price
// on the same side. 0 is the reference itself, positive depths sit away from
// the spread, negative ones inside it (an order placed between the previous
// bests). Analytics measure depth against the best from one tick earlier, so
// consecutive book states can be compared level by level.
inline int depth_of(Ticks price, Side side, Ticks ref_best) {
    const Ticks d = side == Side::minus_side ? ref_best - price : price - ref_best;
    return static_cast<int>(d);
}

inline Ticks price_at_depth(int gamma, Side side, Ticks ref_best) {
    return side == Side::minus_side ? ref_best - gamma : ref_best + gamma;
}

// Volume per depth on one side, depths gamma_min..gamma_max inclusive.
struct DepthProfile {
    Side side = Side::minus_side;
    Ticks ref_best = 0;
    int gamma_min = 0;
    std::vector<Units> counts;

    int gamma_max() const {
        return gamma_min + static_cast<int>(counts.size()) - 1;
    }
    Units n(int gamma) const {
        if (gamma < gamma_min || gamma > gamma_max()) return 0;
        return counts[static_cast<std::size_t>(gamma - gamma_min)];
    }
    // Cumulative volume over depths 0..gamma; inside-spread depths are
    // excluded so the value counts the standing side of the book only.
    Units cum_from_zero(int gamma) const {
        Units sum = 0;
        for (int g = 0; g <= gamma && g <= gamma_max(); ++g) sum += n(g);
        return sum;
    }
};

DepthProfile layer_profile(const BookState& state, Side side, Ticks ref_best,
                           int gamma_min, int gamma_max);

// Per-depth volume change between two consecutive book states, every depth
// measured against the previous state's best on that side. Changes are also
// split into their positive (placed) and negative (withdrawn or consumed)
// parts per level.
struct LayerDelta {
    Side side = Side::minus_side;
    Ticks ref_best = 0;
    int gamma_min = 0;
    std::vector<Units> dn;
    std::vector<Units> added;
    std::vector<Units> removed;

    int gamma_max() const { return gamma_min + static_cast<int>(dn.size()) - 1; }
    std::size_t idx(int gamma) const { return static_cast<std::size_t>(gamma - gamma_min); }
    Units delta(int gamma) const {
        if (gamma < gamma_min || gamma > gamma_max()) return 0;
        return dn[idx(gamma)];
    }
    // Cumulative change over depths 0..gamma.
    Units cum_from_zero(int gamma) const {
        Units sum = 0;
        for (int g = 0; g <= gamma && g <= gamma_max(); ++g) sum += dn[idx(g)];
        return sum;
    }
};

// Requires the previous state to have a best on `side`; depths outside
// [gamma_min, gamma_max] are dropped.
LayerDelta layer_delta(const BookState& prev, const BookState& curr, Side side,
                       int gamma_min, int gamma_max);

inline constexpr int kDefaultGammaMin = -10;
inline constexpr int kDefaultGammaMax = 100;

enum class CorrMode {
    per_depth,   // correlate velocity with the change at each single depth
    cumulative,  // correlate with the change summed over depths 0..gamma
};

// Pearson correlation between block-mean velocity and block-mean depth
// changes, one value per depth 0..gamma_max. Blocks are non-overlapping runs
// of k ticks; blocks containing an undefined velocity sample (NaN) are
// dropped. Depths whose block series has no variance are reported missing.
struct CorrCurve {
    Side side = Side::minus_side;
    CorrMode mode = CorrMode::per_depth;
    int k = 1;
    std::int64_t n_blocks = 0;
    std::vector<std::optional<double>> corr;  // index = depth

    int gamma_max() const { return static_cast<int>(corr.size()) - 1; }
};

CorrCurve corr_curve(std::span<const double> v, std::span<const LayerDelta> deltas,
                     int k, CorrMode mode, int gamma_max);

// Layer boundary estimate from the two correlation curves of one side.
//   primary:   depth with the largest |cumulative correlation| (ties: smallest)
//   secondary: depth just before the per-depth curve first flips against its
//              small-depth sign; missing depths are skipped in the scan
struct GammaCEstimate {
    int gamma_c = 0;           // primary
    int secondary = 0;
    int method_agreement = 0;  // |primary - secondary|
    int small_gamma_sign = 0;  // +1 or -1, orientation observed at small depth
};

GammaCEstimate find_gamma_c(const CorrCurve& per_depth, const CorrCurve& cumulative);

}  // namespace lobkin

#endif
