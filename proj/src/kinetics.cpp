#include "lobkin/kinetics.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>

namespace lobkin {

InnerLayerSample inner_flow(const BookState& prev, const BookState& curr,
                            const KineticParams& params) {
    InnerLayerSample s;
    s.tick = curr.tick_index;
    s.ts_ms = curr.last_transaction_ts;
    s.empty_minus = curr.levels(Side::minus_side).empty();
    s.empty_plus = curr.levels(Side::plus_side).empty();

    const auto prev_mid = prev.mid_half_ticks();
    const auto curr_mid = curr.mid_half_ticks();
    s.mid_half = curr_mid;
    if (prev_mid && curr_mid) s.v_half = *curr_mid - *prev_mid;

    for (const Side side : {Side::minus_side, Side::plus_side}) {
        const bool is_minus = side == Side::minus_side;
        const auto ref = prev.best(side);
        if (!ref) continue;  // no reference: flow stays unmeasurable on this side

        const auto curr_best = curr.best(side);
        if (curr_best) {
            const std::int64_t dv = *curr_best - *ref;
            (is_minus ? s.v_minus : s.v_plus) = dv;
        }

        const int gc = params.gamma_c(side);
        const LayerDelta d = layer_delta(prev, curr, side, 0, gc);
        Units f = 0, c = 0, a = 0;
        for (int g = 0; g <= gc; ++g) {
            f += d.dn[d.idx(g)];
            c += d.added[d.idx(g)];
            a += d.removed[d.idx(g)];
        }
        const DepthProfile p = layer_profile(curr, side, *ref, 0, gc);
        const Units occ = p.cum_from_zero(gc);

        if (is_minus) {
            s.flow_valid_minus = true;
            s.f_minus = f; s.c_minus = c; s.a_minus = a; s.i_minus = occ;
        } else {
            s.flow_valid_plus = true;
            s.f_plus = f; s.c_plus = c; s.a_plus = a; s.i_plus = occ;
        }
    }
    return s;
}

std::vector<InnerLayerSample> collect_samples(std::span<const OrderEvent> events,
                                              const KineticParams& params) {
    std::vector<InnerLayerSample> out;
    Replayer rep(events);
    auto prev = rep.next();
    if (!prev) return out;
    while (auto curr = rep.next()) {
        out.push_back(inner_flow(*prev, *curr, params));
        prev = std::move(curr);
    }
    return out;
}

std::optional<double> zero_intercept_slope(std::span<const double> x,
                                           std::span<const double> y) {
    double sxx = 0.0, sxy = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        sxx += x[i] * x[i];
        sxy += x[i] * y[i];
    }
    if (sxx == 0.0) return std::nullopt;
    return sxy / sxx;
}

std::optional<LineFit> ols_line(std::span<const double> x, std::span<const double> y) {
    const auto n = static_cast<double>(x.size());
    if (x.size() < 2) return std::nullopt;
    double sx = 0.0, sy = 0.0, sxx = 0.0, sxy = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        sx += x[i]; sy += y[i]; sxx += x[i] * x[i]; sxy += x[i] * y[i];
    }
    const double denom = n * sxx - sx * sx;
    if (denom == 0.0) return std::nullopt;
    LineFit f;
    f.slope = (n * sxy - sx * sy) / denom;
    f.intercept = (sy - f.slope * sx) / n;
    return f;
}

std::optional<double> fit_mean_free_path(const CoarseSeries& v_blocks,
                                         const CoarseSeries& f_blocks, int S) {
    if (v_blocks.k != f_blocks.k) {
        throw Error(Errc::config_invalid, "block lengths differ between series");
    }
    const std::size_t n = std::min(v_blocks.size(), f_blocks.size());
    if (n < static_cast<std::size_t>(S)) {
        throw Error(Errc::too_short, "fewer blocks than the window demands");
    }
    const std::size_t from = n - static_cast<std::size_t>(S);
    return zero_intercept_slope(
        std::span<const double>(f_blocks.values).subspan(from, S),
        std::span<const double>(v_blocks.values).subspan(from, S));
}

KnVal knudsen(std::optional<double> L, int gamma_c, double i_bar, bool side_empty) {
    if (gamma_c <= 0) throw Error(Errc::config_invalid, "gamma_c must be positive");
    if (side_empty || i_bar == 0.0) return KnVal::inf();
    if (!L) return KnVal::none();
    return KnVal::of(*L / gamma_c);
}

namespace {

struct SideArrays {
    std::vector<double> f, i, v;      // per tick; v NaN when undefined
    std::vector<unsigned char> flow_ok, empty;
};

KnVal combine_sym(const KnVal& a, const KnVal& b) {
    if (a.infinite || b.infinite) return KnVal::inf();
    if (a.value && b.value) return KnVal::of((*a.value + *b.value) / 2.0);
    return KnVal::none();
}

}  // namespace

std::vector<IndicatorRecord> compute_indicators(std::span<const InnerLayerSample> samples,
                                                const KineticParams& params) {
    const int k = params.k, S = params.S;
    if (k < 1 || S < 1) throw Error(Errc::config_invalid, "k and S must be >= 1");
    const std::size_t w = static_cast<std::size_t>(k) * static_cast<std::size_t>(S);
    const std::size_t n = samples.size();
    std::vector<IndicatorRecord> out;
    if (n < w) return out;

    SideArrays m, p;
    for (auto* sa : {&m, &p}) {
        sa->f.resize(n); sa->i.resize(n); sa->v.resize(n);
        sa->flow_ok.resize(n); sa->empty.resize(n);
    }
    std::vector<double> v_mid(n);  // mid velocity in ticks; NaN when undefined
    const double nan = std::nan("");
    for (std::size_t t = 0; t < n; ++t) {
        const auto& s = samples[t];
        m.f[t] = static_cast<double>(s.f_minus);
        p.f[t] = static_cast<double>(s.f_plus);
        m.i[t] = static_cast<double>(s.i_minus);
        p.i[t] = static_cast<double>(s.i_plus);
        m.v[t] = s.v_minus ? static_cast<double>(*s.v_minus) : nan;
        p.v[t] = s.v_plus ? static_cast<double>(*s.v_plus) : nan;
        m.flow_ok[t] = s.flow_valid_minus;
        p.flow_ok[t] = s.flow_valid_plus;
        m.empty[t] = s.empty_minus;
        p.empty[t] = s.empty_plus;
        v_mid[t] = s.v_half ? static_cast<double>(*s.v_half) / 2.0 : nan;
    }

    // Prefix sums allow O(1) window and block means. Flows of sides without a
    // reference best contribute zero, occupancies always count.
    auto prefix = [n](const std::vector<double>& x) {
        std::vector<double> ps(n + 1, 0.0);
        for (std::size_t t = 0; t < n; ++t) ps[t + 1] = ps[t] + x[t];
        return ps;
    };
    const auto pfm = prefix(m.f), pfp = prefix(p.f), pim = prefix(m.i), pip = prefix(p.i);

    out.reserve(n - w + 1);
    std::vector<double> xs, ys;
    xs.reserve(S); ys.reserve(S);

    for (std::size_t t = w - 1; t < n; ++t) {
        IndicatorRecord rec;
        const auto& cur = samples[t];
        rec.tick = cur.tick;
        rec.ts_ms = cur.ts_ms;
        rec.one_sided_book = cur.empty_minus || cur.empty_plus;
        rec.mid_half = cur.mid_half;
        const std::size_t lo = t + 1 - w;

        const double fw = static_cast<double>(w);
        const double sum_fm = pfm[t + 1] - pfm[lo], sum_fp = pfp[t + 1] - pfp[lo];
        const double sum_im = pim[t + 1] - pim[lo], sum_ip = pip[t + 1] - pip[lo];
        rec.f_bar_minus = sum_fm / fw;
        rec.f_bar_plus = sum_fp / fw;
        rec.i_bar_minus = sum_im / fw;
        rec.i_bar_plus = sum_ip / fw;
        // Ratio of window sums: scaling every volume by a constant scales
        // numerator and denominator together and leaves lambda bit-identical.
        if (sum_im > 0.0) rec.lambda_minus = sum_fm / sum_im;
        if (sum_ip > 0.0) rec.lambda_plus = sum_fp / sum_ip;

        // Per-side slope over valid blocks; a block is valid when every tick
        // in it has a measurable flow and side velocity.
        auto side_L = [&](const SideArrays& sa, bool flip_sign) -> std::optional<double> {
            xs.clear(); ys.clear();
            for (int b = 0; b < S; ++b) {
                const std::size_t base = lo + static_cast<std::size_t>(b) * k;
                double fs = 0.0, vs = 0.0;
                bool ok = true;
                for (int j = 0; j < k; ++j) {
                    const std::size_t u = base + static_cast<std::size_t>(j);
                    if (!sa.flow_ok[u] || std::isnan(sa.v[u])) { ok = false; break; }
                    fs += sa.f[u];
                    vs += sa.v[u];
                }
                if (!ok) continue;
                xs.push_back((flip_sign ? -fs : fs) / k);
                ys.push_back(vs / k);
            }
            if (xs.size() < static_cast<std::size_t>((S + 1) / 2)) return std::nullopt;
            const auto slope = zero_intercept_slope(xs, ys);
            if (!slope) return std::nullopt;
            return std::abs(*slope);
        };
        rec.L_minus = side_L(m, false);
        rec.L_plus = side_L(p, true);

        // Combined fit: mid velocity against f_minus - f_plus.
        xs.clear(); ys.clear();
        for (int b = 0; b < S; ++b) {
            const std::size_t base = lo + static_cast<std::size_t>(b) * k;
            double fs = 0.0, vs = 0.0;
            bool ok = true;
            for (int j = 0; j < k; ++j) {
                const std::size_t u = base + static_cast<std::size_t>(j);
                if (!m.flow_ok[u] || !p.flow_ok[u] || std::isnan(v_mid[u])) { ok = false; break; }
                fs += m.f[u] - p.f[u];
                vs += v_mid[u];
            }
            if (!ok) continue;
            xs.push_back(fs / k);
            ys.push_back(vs / k);
        }
        if (xs.size() >= static_cast<std::size_t>((S + 1) / 2)) {
            if (const auto slope = zero_intercept_slope(xs, ys)) {
                rec.L_sym = std::abs(*slope);
            }
        }

        rec.kn_minus = knudsen(rec.L_minus, params.gamma_c_minus, rec.i_bar_minus,
                               cur.empty_minus);
        rec.kn_plus = knudsen(rec.L_plus, params.gamma_c_plus, rec.i_bar_plus,
                              cur.empty_plus);
        rec.kn_sym = combine_sym(rec.kn_minus, rec.kn_plus);
        out.push_back(std::move(rec));
    }
    return out;
}

std::optional<double> depletion_rate(double f_bar, double i_bar) {
    if (i_bar == 0.0) return std::nullopt;
    return f_bar / i_bar;
}

double halving_time(double lambda) {
    if (lambda >= 0.0) {
        throw Error(Errc::config_invalid, "halving time defined for negative rates only");
    }
    return std::log(2.0) / std::abs(lambda);
}

KappaFit fit_kappa(std::span<const double> i_bar, std::span<const KnVal> kn) {
    if (i_bar.size() != kn.size()) {
        throw Error(Errc::config_invalid, "occupancy and Kn series differ in length");
    }
    struct BinAcc { std::vector<double> values; };
    std::map<std::int64_t, BinAcc> bins;
    std::size_t usable = 0;
    for (std::size_t t = 0; t < kn.size(); ++t) {
        if (!kn[t].finite() || !(i_bar[t] > 0.0)) continue;
        const auto b = static_cast<std::int64_t>(std::llround(i_bar[t]));
        if (b < 1) continue;
        bins[b].values.push_back(*kn[t].value);
        ++usable;
    }
    if (usable < 100) {
        throw Error(Errc::insufficient_data, "need at least 100 finite (I, Kn) pairs");
    }

    KappaFit fit;
    std::vector<double> x, y;
    for (auto& [b, acc] : bins) {
        auto& v = acc.values;
        const auto mid = v.size() / 2;
        std::nth_element(v.begin(), v.begin() + mid, v.end());
        double med = v[mid];
        if (v.size() % 2 == 0) {
            const double lohalf = *std::max_element(v.begin(), v.begin() + mid);
            med = (med + lohalf) / 2.0;
        }
        fit.bin_i.push_back(static_cast<double>(b));
        fit.bin_median.push_back(med);
        x.push_back(1.0 / static_cast<double>(b));
        y.push_back(med);
    }
    fit.n_bins = static_cast<int>(x.size());

    const auto slope = zero_intercept_slope(x, y);
    if (!slope) throw Error(Errc::degenerate_regressor, "all occupancy bins at zero");
    fit.kappa = *slope;

    const double ymean = std::accumulate(y.begin(), y.end(), 0.0) / y.size();
    double ss_res = 0.0, ss_tot = 0.0;
    for (std::size_t i = 0; i < y.size(); ++i) {
        ss_res += (y[i] - fit.kappa * x[i]) * (y[i] - fit.kappa * x[i]);
        ss_tot += (y[i] - ymean) * (y[i] - ymean);
    }
    fit.r2 = ss_tot > 0.0 ? 1.0 - ss_res / ss_tot : 1.0;
    return fit;
}

JointQuantile joint_threshold_quantile(std::span<const double> lam_minus,
                                       std::span<const double> lam_plus, double p) {
    if (lam_minus.size() != lam_plus.size() || lam_minus.empty()) {
        throw Error(Errc::config_invalid, "rate series must be non-empty and aligned");
    }
    if (!(p > 0.0) || !(p < 1.0)) {
        throw Error(Errc::config_invalid, "p must lie in (0, 1)");
    }
    const std::size_t n = lam_minus.size();
    std::vector<double> mx(n);
    for (std::size_t i = 0; i < n; ++i) mx[i] = std::max(lam_minus[i], lam_plus[i]);
    std::sort(mx.begin(), mx.end());

    // frac{max < theta} jumps at sample values; scan for the first that works.
    const auto target = static_cast<std::size_t>(std::ceil(p * static_cast<double>(n)));
    JointQuantile q;
    q.n = n;
    std::size_t j = std::min(target, n - 1);
    while (j < n) {
        const double theta = mx[j];
        const auto below = static_cast<std::size_t>(
            std::lower_bound(mx.begin(), mx.end(), theta) - mx.begin());
        if (below >= target) {
            q.theta = theta;
            q.achieved_fraction = static_cast<double>(below) / static_cast<double>(n);
            q.cross_correlation = pearson(lam_minus, lam_plus);
            return q;
        }
        ++j;
    }
    throw Error(Errc::insufficient_data, "no sample threshold reaches the requested fraction");
}

std::vector<RegimeInterval> detect_regimes(std::span<IndicatorRecord> records,
                                           double theta_lambda, double theta_kn) {
    std::vector<RegimeInterval> intervals;
    for (const Side side : {Side::minus_side, Side::plus_side}) {
        const bool is_minus = side == Side::minus_side;
        bool open = false;
        for (auto& rec : records) {
            const auto& lam = is_minus ? rec.lambda_minus : rec.lambda_plus;
            const auto& kn = is_minus ? rec.kn_minus : rec.kn_plus;
            const bool hit = lam && *lam < theta_lambda && kn.exceeds(theta_kn);
            if (is_minus) rec.minus_regime = hit;
            else rec.plus_regime = hit;
            if (hit) {
                if (!open || intervals.back().last_tick + 1 != rec.tick) {
                    intervals.push_back({side, rec.tick, rec.tick});
                    open = true;
                } else {
                    intervals.back().last_tick = rec.tick;
                }
            } else {
                open = false;
            }
        }
    }
    return intervals;
}

double pearson(std::span<const double> a, std::span<const double> b) {
    if (a.size() != b.size() || a.size() < 2) {
        throw Error(Errc::too_short, "correlation needs two aligned samples at least");
    }
    const auto n = static_cast<double>(a.size());
    double sa = 0, sb = 0, saa = 0, sbb = 0, sab = 0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        sa += a[i]; sb += b[i];
        saa += a[i] * a[i]; sbb += b[i] * b[i];
        sab += a[i] * b[i];
    }
    const double va = n * saa - sa * sa;
    const double vb = n * sbb - sb * sb;
    if (va <= 0.0 || vb <= 0.0) {
        throw Error(Errc::degenerate_variance, "constant series has no correlation");
    }
    return (n * sab - sa * sb) / std::sqrt(va * vb);
}

}  // namespace lobkin
