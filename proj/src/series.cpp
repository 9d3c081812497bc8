#include "lobkin/series.hpp"

#include <fftw3.h>

#include <algorithm>
#include <cmath>
#include <complex>
#include <numeric>

namespace lobkin {

TickSeries velocity(const TickSeries& s) {
    if (s.values.size() < 2) {
        throw Error(Errc::too_short, "velocity needs at least 2 samples");
    }
    TickSeries out;
    out.origin_tick = s.origin_tick + 1;
    out.label = s.label.empty() ? "velocity" : "d(" + s.label + ")";
    out.values.resize(s.values.size() - 1);
    for (std::size_t i = 0; i + 1 < s.values.size(); ++i) {
        out.values[i] = s.values[i + 1] - s.values[i];
    }
    return out;
}

CoarseSeries coarse_grain(const TickSeries& s, int k) {
    if (k < 1) throw Error(Errc::config_invalid, "block length k must be >= 1");
    if (s.values.size() < static_cast<std::size_t>(k)) {
        throw Error(Errc::too_short, "series shorter than one block");
    }
    CoarseSeries out;
    out.k = k;
    out.origin_tick = s.origin_tick;
    const std::size_t blocks = s.values.size() / static_cast<std::size_t>(k);
    out.values.resize(blocks);
    for (std::size_t b = 0; b < blocks; ++b) {
        double sum = 0.0;
        for (int j = 0; j < k; ++j) sum += s.values[b * k + j];
        out.values[b] = sum / k;
    }
    return out;
}

TickSeries rolling_mean(const TickSeries& s, int k, int S) {
    if (k < 1 || S < 1) throw Error(Errc::config_invalid, "k and S must be >= 1");
    const std::size_t w = static_cast<std::size_t>(k) * static_cast<std::size_t>(S);
    if (s.values.size() < w) {
        throw Error(Errc::too_short, "series shorter than the window");
    }
    TickSeries out;
    out.origin_tick = s.origin_tick + static_cast<std::int64_t>(w) - 1;
    out.label = s.label;
    out.values.resize(s.values.size() - w + 1);
    // Running sum drifts over long series; refresh it periodically.
    double sum = std::accumulate(s.values.begin(), s.values.begin() + w, 0.0);
    out.values[0] = sum / static_cast<double>(w);
    for (std::size_t i = 1; i < out.values.size(); ++i) {
        sum += s.values[i + w - 1] - s.values[i - 1];
        if (i % 4096 == 0) {
            sum = std::accumulate(s.values.begin() + i, s.values.begin() + i + w, 0.0);
        }
        out.values[i] = sum / static_cast<double>(w);
    }
    return out;
}

namespace {

int pow2_floor(std::size_t n) {
    int p = 1;
    while (static_cast<std::size_t>(p) * 2 <= n) p *= 2;
    return p;
}

}  // namespace

Spectrum power_spectrum(const TickSeries& s, int target_segments) {
    const std::size_t n = s.values.size();
    if (n < 64) throw Error(Errc::too_short, "spectrum needs at least 64 samples");
    if (target_segments < 1) {
        throw Error(Errc::config_invalid, "segment count must be >= 1");
    }

    // Half-overlapping segments: m of length L need (m+1)*L/2 samples.
    std::size_t want = 2 * n / static_cast<std::size_t>(target_segments + 1);
    int seg_len = pow2_floor(std::max<std::size_t>(want, 16));
    seg_len = std::min(seg_len, pow2_floor(n));

    const double mean = std::accumulate(s.values.begin(), s.values.end(), 0.0) /
                        static_cast<double>(n);
    double variance = 0.0;
    for (double v : s.values) variance += (v - mean) * (v - mean);
    variance /= static_cast<double>(n);

    Spectrum sp;
    sp.segment_length = seg_len;
    const int half = seg_len / 2;
    sp.omega.resize(half);
    sp.power.assign(half, 0.0);
    for (int j = 1; j <= half; ++j) {
        sp.omega[j - 1] = 2.0 * 3.14159265358979323846 * j / seg_len;
    }

    std::vector<double> in(seg_len);
    std::vector<std::complex<double>> out(static_cast<std::size_t>(half) + 1);
    fftw_plan plan = fftw_plan_dft_r2c_1d(
        seg_len, in.data(), reinterpret_cast<fftw_complex*>(out.data()), FFTW_ESTIMATE);

    const std::size_t hop = static_cast<std::size_t>(half);
    for (std::size_t start = 0; start + seg_len <= n; start += hop) {
        for (int t = 0; t < seg_len; ++t) in[t] = s.values[start + t] - mean;
        fftw_execute(plan);
        for (int j = 1; j <= half; ++j) {
            sp.power[j - 1] += std::norm(out[j]);
        }
        ++sp.segments;
        if (start + seg_len == n) break;
    }
    fftw_destroy_plan(plan);

    // Exact variance normalization: only the spectral shape feeds the slope
    // fit, and fixing the total keeps the power/variance identity exact.
    const double raw_total = std::accumulate(sp.power.begin(), sp.power.end(), 0.0);
    const double scale = raw_total > 0.0 ? variance / raw_total : 0.0;
    for (double& p : sp.power) p *= scale;
    return sp;
}

double spectral_exponent(const Spectrum& sp, double omega_lo, double omega_hi) {
    double sx = 0.0, sy = 0.0, sxx = 0.0, sxy = 0.0;
    std::size_t m = 0;
    for (std::size_t i = 0; i < sp.omega.size(); ++i) {
        if (sp.omega[i] < omega_lo || sp.omega[i] > omega_hi) continue;
        if (sp.power[i] <= 0.0) continue;
        const double x = std::log(sp.omega[i]);
        const double y = std::log(sp.power[i]);
        sx += x;
        sy += y;
        sxx += x * x;
        sxy += x * y;
        ++m;
    }
    if (m < 10) {
        throw Error(Errc::degenerate_range, "fewer than 10 usable spectrum bins in fit range");
    }
    const double denom = m * sxx - sx * sx;
    if (denom == 0.0) {
        throw Error(Errc::degenerate_range, "degenerate abscissa in spectrum fit");
    }
    const double slope = (m * sxy - sx * sy) / denom;
    return -slope;
}

double spectral_exponent(const Spectrum& sp) {
    if (sp.omega.empty()) throw Error(Errc::degenerate_range, "empty spectrum");
    return spectral_exponent(sp, sp.omega.front(), sp.omega.front() * 10.0);
}

StationarityReport weak_stationarity_report(const TickSeries& s, int n_segments) {
    if (n_segments < 2) throw Error(Errc::config_invalid, "need at least 2 segments");
    const std::size_t seg = s.values.size() / static_cast<std::size_t>(n_segments);
    if (seg < 100) {
        throw Error(Errc::too_short, "segments need at least 100 samples each");
    }

    StationarityReport rep;
    rep.segments.reserve(n_segments);
    for (int g = 0; g < n_segments; ++g) {
        const double* p = s.values.data() + static_cast<std::size_t>(g) * seg;
        SegmentStats st;
        st.count = seg;
        st.mean = std::accumulate(p, p + seg, 0.0) / static_cast<double>(seg);
        for (std::size_t i = 0; i < seg; ++i) {
            st.variance += (p[i] - st.mean) * (p[i] - st.mean);
        }
        st.variance /= static_cast<double>(seg);
        st.autocov.resize(11, 0.0);
        for (int lag = 0; lag <= 10; ++lag) {
            double acc = 0.0;
            for (std::size_t i = 0; i + lag < seg; ++i) {
                acc += (p[i] - st.mean) * (p[i + lag] - st.mean);
            }
            st.autocov[lag] = acc / static_cast<double>(seg);
        }
        rep.segments.push_back(std::move(st));
    }

    // Standard error of each segment mean from the Bartlett (triangular
    // window) long-run variance. A raw variance/count estimate assumes
    // independent samples and flags any series with realistic memory; a
    // window wider than the reported 10 lags lets the estimate absorb
    // correlations that die out (bounded wander stays unflagged), while an
    // integrated series, whose correlations never decay, still shows mean
    // gaps far beyond the enlarged error and trips the flag.
    std::vector<double> se2(rep.segments.size(), 0.0);
    for (int g = 0; g < n_segments; ++g) {
        const double* p = s.values.data() + static_cast<std::size_t>(g) * seg;
        const double mean = rep.segments[static_cast<std::size_t>(g)].mean;
        const std::size_t window = std::clamp<std::size_t>(seg / 16, 10, 64);
        double lrv = rep.segments[static_cast<std::size_t>(g)].variance;
        for (std::size_t lag = 1; lag <= window; ++lag) {
            double acc = 0.0;
            for (std::size_t i = 0; i + lag < seg; ++i) {
                acc += (p[i] - mean) * (p[i + lag] - mean);
            }
            const double weight =
                1.0 - static_cast<double>(lag) / static_cast<double>(window + 1);
            lrv += 2.0 * weight * acc / static_cast<double>(seg);
        }
        se2[static_cast<std::size_t>(g)] =
            std::max(lrv, 0.0) / static_cast<double>(seg);
    }

    for (std::size_t a = 0; a < rep.segments.size(); ++a) {
        for (std::size_t b = a + 1; b < rep.segments.size(); ++b) {
            const auto& sa = rep.segments[a];
            const auto& sb = rep.segments[b];
            const double se = std::sqrt(se2[a] + se2[b]);
            if (se == 0.0) {
                if (sa.mean != sb.mean) rep.max_discrepancy_se = 1e300;
                continue;
            }
            rep.max_discrepancy_se =
                std::max(rep.max_discrepancy_se, std::abs(sa.mean - sb.mean) / se);
        }
    }
    rep.flagged = rep.max_discrepancy_se > 3.0;
    return rep;
}

}  // namespace lobkin
