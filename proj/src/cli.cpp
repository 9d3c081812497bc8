#include "lobkin/cli.hpp"

#include <cmath>
#include <fstream>
#include <iostream>
#include <memory>
#include <optional>
#include <sstream>

#include <CLI11.hpp>

#include "lobkin/book.hpp"
#include "lobkin/event_io.hpp"
#include "lobkin/kinetics.hpp"
#include "lobkin/layers.hpp"
#include "lobkin/series.hpp"
#include "lobkin/synth.hpp"
#include "lobkin/types.hpp"

namespace lobkin {

namespace {

int exit_code_for(Errc code) {
    switch (code) {
    case Errc::too_short:
    case Errc::insufficient_data:
    case Errc::degenerate_range:
    case Errc::degenerate_variance:
    case Errc::no_sign_change:
    case Errc::no_peak:
    case Errc::degenerate_regressor:
    case Errc::empty_inner_layer:
    case Errc::empty_side:
        return 3;
    default:
        return 2;
    }
}

class OutStream {
public:
    explicit OutStream(const std::string& path) {
        if (path != "-") {
            file_.open(path);
            if (!file_) throw Error(Errc::config_invalid, "cannot open output: " + path);
        }
    }
    std::ostream& get() { return file_.is_open() ? file_ : std::cout; }

private:
    std::ofstream file_;
};

std::string fmt(double v) {
    if (std::isnan(v)) return "nan";
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

std::string fmt_opt(const std::optional<double>& v) {
    return v ? fmt(*v) : "nan";
}

// Velocity and per-side depth deltas for every consecutive snapshot pair.
// Pairs lacking a reference best carry NaN velocity and empty deltas; the
// correlation stage drops the blocks they fall in.
struct PairPass {
    std::vector<double> v_half;
    std::vector<LayerDelta> d_minus, d_plus;
    std::vector<std::int64_t> tick;
};

PairPass pair_pass(const std::vector<OrderEvent>& events, int gamma_min, int gamma_max) {
    PairPass pp;
    Replayer rep(events);
    auto prev = rep.next();
    if (!prev) return pp;
    const double nan = std::nan("");
    while (auto curr = rep.next()) {
        const auto pm = prev->mid_half_ticks();
        const auto cm = curr->mid_half_ticks();
        pp.v_half.push_back(pm && cm ? static_cast<double>(*cm - *pm) : nan);
        pp.tick.push_back(curr->tick_index);
        for (const Side side : {Side::minus_side, Side::plus_side}) {
            auto& dst = side == Side::minus_side ? pp.d_minus : pp.d_plus;
            if (prev->best(side)) {
                dst.push_back(layer_delta(*prev, *curr, side, gamma_min, gamma_max));
            } else {
                LayerDelta d;
                d.side = side;
                d.gamma_min = gamma_min;
                const auto width = static_cast<std::size_t>(gamma_max - gamma_min) + 1;
                d.dn.assign(width, 0);
                d.added.assign(width, 0);
                d.removed.assign(width, 0);
                dst.push_back(std::move(d));
            }
        }
        prev = std::move(curr);
    }
    return pp;
}

struct GammaCChoice {
    int minus = 18;
    int plus = 18;
    bool estimated = false;
};

GammaCChoice choose_gamma_c(const std::vector<OrderEvent>& events, int flag_minus,
                            int flag_plus, int gamma_max) {
    GammaCChoice out;
    if (flag_minus > 0) out.minus = flag_minus;
    if (flag_plus > 0) out.plus = flag_plus;
    if (flag_minus > 0 && flag_plus > 0) return out;

    try {
        const PairPass pp = pair_pass(events, 0, gamma_max);
        for (const Side side : {Side::minus_side, Side::plus_side}) {
            const bool is_minus = side == Side::minus_side;
            if ((is_minus ? flag_minus : flag_plus) > 0) continue;
            const auto& deltas = is_minus ? pp.d_minus : pp.d_plus;
            const auto per_depth = corr_curve(pp.v_half, deltas, 20, CorrMode::per_depth,
                                              gamma_max);
            const auto cumul = corr_curve(pp.v_half, deltas, 20, CorrMode::cumulative,
                                          gamma_max);
            const auto est = find_gamma_c(per_depth, cumul);
            (is_minus ? out.minus : out.plus) = std::max(1, est.gamma_c);
            out.estimated = true;
        }
    } catch (const Error& e) {
        std::cerr << "warning: layer boundary estimation failed (" << e.what()
                  << "); using default 18\n";
    }
    return out;
}

double resolve_theta_lambda(double flag_value,
                            const std::vector<IndicatorRecord>& records, double p) {
    if (!std::isnan(flag_value)) return flag_value;
    std::vector<double> lm, lp;
    for (const auto& r : records) {
        if (r.lambda_minus && r.lambda_plus) {
            lm.push_back(*r.lambda_minus);
            lp.push_back(*r.lambda_plus);
        }
    }
    if (lm.size() < 100) {
        throw Error(Errc::insufficient_data,
                    "too few defined rate pairs to set a data-driven threshold");
    }
    return joint_threshold_quantile(lm, lp, p).theta;
}

Units cum_units(const BookState& state, Side side, Ticks ref, int gamma) {
    const Ticks lo = side == Side::minus_side ? ref - gamma : ref;
    const Ticks hi = side == Side::minus_side ? ref : ref + gamma;
    Units sum = 0;
    const auto& lv = state.levels(side);
    for (auto it = lv.lower_bound(lo); it != lv.end() && it->first <= hi; ++it) {
        sum += it->second;
    }
    return sum;
}

struct CommonArgs {
    std::string log_path;
    std::string out_path = "-";
    std::string symbol = "SYN";
    double delta_x = 0.001;
    double delta_n = 1.0e6;
    int k = 4;
    int window_s = 100;
    int gamma_min = kDefaultGammaMin;
    int gamma_max = kDefaultGammaMax;
    int gamma_c_minus = -1;
    int gamma_c_plus = -1;
    double theta_kn = 0.1;
    double theta_lambda = std::nan("");
    double quantile = 0.05;
};

void add_common(CLI::App* cmd, CommonArgs& a, int default_k) {
    a.k = default_k;
    cmd->add_option("--log", a.log_path, "event log (CSV)")->required();
    cmd->add_option("--out", a.out_path, "output path, - for stdout");
    cmd->add_option("--symbol", a.symbol, "market symbol for reports");
    cmd->add_option("--delta-x", a.delta_x, "price units per tick")
        ->check(CLI::PositiveNumber);
    cmd->add_option("--delta-n", a.delta_n, "volume per unit")->check(CLI::PositiveNumber);
    cmd->add_option("--k", a.k, "coarse block length in ticks")->check(CLI::PositiveNumber);
    cmd->add_option("--window-s", a.window_s, "blocks per rolling window")
        ->check(CLI::PositiveNumber);
    cmd->add_option("--gamma-max", a.gamma_max, "deepest tracked depth")
        ->check(CLI::PositiveNumber);
    cmd->add_option("--gamma-c-minus", a.gamma_c_minus, "fixed minus-side boundary");
    cmd->add_option("--gamma-c-plus", a.gamma_c_plus, "fixed plus-side boundary");
    cmd->add_option("--theta-kn", a.theta_kn, "Knudsen threshold");
    cmd->add_option("--theta-lambda", a.theta_lambda,
                    "depletion threshold; default: joint 5% quantile of this log");
    cmd->add_option("--quantile", a.quantile, "quantile for the data-driven threshold");
}

KineticParams kinetic_params(const CommonArgs& a, const GammaCChoice& gc) {
    KineticParams p;
    p.gamma_c_minus = gc.minus;
    p.gamma_c_plus = gc.plus;
    p.k = a.k;
    p.S = a.window_s;
    p.theta_kn = a.theta_kn;
    p.gamma_min = a.gamma_min;
    p.gamma_max = a.gamma_max;
    return p;
}

MarketSpec market_of(const CommonArgs& a) {
    MarketSpec m;
    m.symbol = a.symbol;
    m.tick_size = a.delta_x;
    m.unit_size = a.delta_n;
    return m;
}

int cmd_synth(const std::string& scenario, std::uint64_t seed, std::size_t n_events,
              double density, int planted, double trend, const std::string& out_path) {
    SynthConfig cfg;
    cfg.seed = seed;
    cfg.n_events = n_events;
    cfg.inner_density_target = density;
    cfg.planted_gamma_c = planted;
    cfg.trend_follow_strength = trend;
    if (scenario == "stationary") cfg.scenario = Scenario::stationary;
    else if (scenario == "density_sweep") cfg.scenario = Scenario::density_sweep;
    else if (scenario == "flash_crash") cfg.scenario = Scenario::flash_crash;
    else if (scenario == "one_sided_halt") cfg.scenario = Scenario::one_sided_halt;
    else throw Error(Errc::config_invalid, "unknown scenario: " + scenario);

    const auto events = generate(cfg);
    OutStream out(out_path);
    write_event_log(out.get(), events);
    return 0;
}

int cmd_replay(const CommonArgs& a) {
    const auto events = load_event_log(a.log_path);
    OutStream out(a.out_path);
    Replayer rep(events);
    out.get() << "tick ts_ms x_minus x_plus mid_half spread\n";
    std::size_t ticks = 0;
    while (auto snap = rep.next()) {
        ++ticks;
        const auto lo = snap->best(Side::minus_side);
        const auto hi = snap->best(Side::plus_side);
        out.get() << snap->tick_index << ' ' << snap->last_transaction_ts << ' '
                  << (lo ? std::to_string(*lo) : "nan") << ' '
                  << (hi ? std::to_string(*hi) : "nan") << ' '
                  << (snap->mid_half_ticks() ? std::to_string(*snap->mid_half_ticks())
                                             : "nan")
                  << ' ' << (snap->spread() ? std::to_string(*snap->spread()) : "nan")
                  << '\n';
    }
    out.get() << "# events=" << events.size() << " ticks=" << ticks;
    if (const auto dt = rep.avg_delta_t_ms()) out.get() << " avg_dt_ms=" << fmt(*dt);
    out.get() << '\n';
    return 0;
}

int cmd_spectrum(const CommonArgs& a, std::vector<int> gammas, int segments) {
    if (gammas.empty()) gammas = {0, 100};
    const auto events = load_event_log(a.log_path);

    Replayer rep(events);
    auto prev = rep.next();
    if (!prev) throw Error(Errc::too_short, "log contains no transaction");
    struct Key { Side side; int gamma; };
    std::vector<Key> keys;
    for (const Side side : {Side::minus_side, Side::plus_side}) {
        for (int g : gammas) keys.push_back({side, g});
    }
    std::vector<std::vector<double>> series(keys.size());
    while (auto curr = rep.next()) {
        for (std::size_t i = 0; i < keys.size(); ++i) {
            const auto ref = prev->best(keys[i].side);
            const double val = ref ? static_cast<double>(
                                         cum_units(*curr, keys[i].side, *ref, keys[i].gamma))
                                   : (series[i].empty() ? 0.0 : series[i].back());
            series[i].push_back(val);
        }
        prev = std::move(curr);
    }

    OutStream out(a.out_path);
    out.get() << "side gamma omega power\n";
    for (std::size_t i = 0; i < keys.size(); ++i) {
        TickSeries ts;
        ts.values = std::move(series[i]);
        const Spectrum sp = power_spectrum(ts, segments);
        std::string alpha = "nan";
        try {
            alpha = fmt(spectral_exponent(sp));
        } catch (const Error&) {
        }
        out.get() << "# side=" << side_name(keys[i].side) << " gamma=" << keys[i].gamma
                  << " alpha=" << alpha << " segments=" << sp.segments
                  << " segment_length=" << sp.segment_length << '\n';
        for (std::size_t j = 0; j < sp.omega.size(); ++j) {
            out.get() << side_name(keys[i].side) << ' ' << keys[i].gamma << ' '
                      << fmt(sp.omega[j]) << ' ' << fmt(sp.power[j]) << '\n';
        }
    }
    return 0;
}

int cmd_corr(const CommonArgs& a) {
    const auto events = load_event_log(a.log_path);
    const PairPass pp = pair_pass(events, a.gamma_min, a.gamma_max);
    const auto dn_m = corr_curve(pp.v_half, pp.d_minus, a.k, CorrMode::per_depth, a.gamma_max);
    const auto dn_p = corr_curve(pp.v_half, pp.d_plus, a.k, CorrMode::per_depth, a.gamma_max);
    const auto dv_m = corr_curve(pp.v_half, pp.d_minus, a.k, CorrMode::cumulative, a.gamma_max);
    const auto dv_p = corr_curve(pp.v_half, pp.d_plus, a.k, CorrMode::cumulative, a.gamma_max);

    OutStream out(a.out_path);
    for (const Side side : {Side::minus_side, Side::plus_side}) {
        const bool is_minus = side == Side::minus_side;
        try {
            const auto est = find_gamma_c(is_minus ? dn_m : dn_p, is_minus ? dv_m : dv_p);
            out.get() << "# side=" << side_name(side) << " gamma_c=" << est.gamma_c
                      << " secondary=" << est.secondary
                      << " agreement=" << est.method_agreement
                      << " small_gamma_sign=" << est.small_gamma_sign << '\n';
        } catch (const Error& e) {
            out.get() << "# side=" << side_name(side) << " gamma_c=nan (" << e.what()
                      << ")\n";
        }
    }
    out.get() << "# blocks=" << dn_m.n_blocks << " k=" << a.k << '\n';
    out.get() << "gamma dn_minus dn_plus dv_minus dv_plus\n";
    for (int g = 0; g <= a.gamma_max; ++g) {
        const auto gi = static_cast<std::size_t>(g);
        out.get() << g << ' ' << fmt_opt(dn_m.corr[gi]) << ' ' << fmt_opt(dn_p.corr[gi])
                  << ' ' << fmt_opt(dv_m.corr[gi]) << ' ' << fmt_opt(dv_p.corr[gi]) << '\n';
    }
    return 0;
}

int cmd_mfp(const CommonArgs& a) {
    const auto events = load_event_log(a.log_path);
    const auto gc = choose_gamma_c(events, a.gamma_c_minus, a.gamma_c_plus, a.gamma_max);
    const auto params = kinetic_params(a, gc);
    const auto samples = collect_samples(events, params);

    // blocks over the full sample: combined flow against mid velocity (ticks)
    std::vector<double> f_blocks, v_blocks, fm_blocks, vm_blocks, fp_blocks, vp_blocks;
    const std::size_t blocks = samples.size() / static_cast<std::size_t>(a.k);
    for (std::size_t b = 0; b < blocks; ++b) {
        double fs = 0, vs = 0, fms = 0, vms = 0, fps = 0, vps = 0;
        bool ok = true, ok_m = true, ok_p = true;
        for (int j = 0; j < a.k; ++j) {
            const auto& s = samples[b * a.k + j];
            if (!s.flow_valid_minus || !s.v_minus) ok_m = false;
            if (!s.flow_valid_plus || !s.v_plus) ok_p = false;
            if (!s.flow_valid_minus || !s.flow_valid_plus || !s.v_half) ok = false;
            if (ok) {
                fs += static_cast<double>(s.f_minus - s.f_plus);
                vs += static_cast<double>(*s.v_half) / 2.0;
            }
            if (ok_m) {
                fms += static_cast<double>(s.f_minus);
                vms += static_cast<double>(*s.v_minus);
            }
            if (ok_p) {
                fps -= static_cast<double>(s.f_plus);
                vps += static_cast<double>(*s.v_plus);
            }
        }
        if (ok) {
            f_blocks.push_back(fs / a.k);
            v_blocks.push_back(vs / a.k);
        }
        if (ok_m) {
            fm_blocks.push_back(fms / a.k);
            vm_blocks.push_back(vms / a.k);
        }
        if (ok_p) {
            fp_blocks.push_back(fps / a.k);
            vp_blocks.push_back(vps / a.k);
        }
    }
    if (f_blocks.size() < 30) {
        throw Error(Errc::too_short, "fewer than 30 usable blocks");
    }

    OutStream out(a.out_path);
    const auto l_sym = zero_intercept_slope(f_blocks, v_blocks);
    const auto line = ols_line(f_blocks, v_blocks);
    const auto l_minus = zero_intercept_slope(fm_blocks, vm_blocks);
    const auto l_plus = zero_intercept_slope(fp_blocks, vp_blocks);
    out.get() << "# gamma_c_minus=" << gc.minus << " gamma_c_plus=" << gc.plus
              << (gc.estimated ? " (estimated)" : "") << '\n';
    out.get() << "# L_sym=" << fmt_opt(l_sym)
              << " L_minus=" << (l_minus ? fmt(std::abs(*l_minus)) : "nan")
              << " L_plus=" << (l_plus ? fmt(std::abs(*l_plus)) : "nan") << '\n';
    if (line) {
        out.get() << "# with_intercept_slope=" << fmt(line->slope)
                  << " intercept=" << fmt(line->intercept) << '\n';
    }
    out.get() << "# blocks=" << f_blocks.size() << " k=" << a.k << '\n';
    out.get() << "f_block v_block\n";
    for (std::size_t b = 0; b < f_blocks.size(); ++b) {
        out.get() << fmt(f_blocks[b]) << ' ' << fmt(v_blocks[b]) << '\n';
    }
    return 0;
}

std::vector<IndicatorRecord> records_for(const CommonArgs& a,
                                         const std::vector<OrderEvent>& events,
                                         GammaCChoice* gc_out = nullptr) {
    const auto gc = choose_gamma_c(events, a.gamma_c_minus, a.gamma_c_plus, a.gamma_max);
    if (gc_out) *gc_out = gc;
    const auto params = kinetic_params(a, gc);
    const auto samples = collect_samples(events, params);
    auto records = compute_indicators(samples, params);
    if (records.empty()) {
        throw Error(Errc::too_short, "log shorter than one rolling window");
    }
    return records;
}

int cmd_knudsen(const CommonArgs& a) {
    const auto events = load_event_log(a.log_path);
    GammaCChoice gc;
    auto records = records_for(a, events, &gc);
    const double theta_l = resolve_theta_lambda(a.theta_lambda, records, a.quantile);
    detect_regimes(records, theta_l, a.theta_kn);
    OutStream out(a.out_path);
    const auto fp = config_fingerprint(market_of(a), kinetic_params(a, gc), theta_l);
    write_indicator_ndjson(out.get(), records, a.symbol, fp);
    return 0;
}

int cmd_kappa(const CommonArgs& a) {
    const auto events = load_event_log(a.log_path);
    const auto records = records_for(a, events);

    std::vector<double> i_sym, i_m, i_p;
    std::vector<KnVal> kn_sym, kn_m, kn_p;
    for (const auto& r : records) {
        i_sym.push_back((r.i_bar_minus + r.i_bar_plus) / 2.0);
        kn_sym.push_back(r.kn_sym);
        i_m.push_back(r.i_bar_minus);
        kn_m.push_back(r.kn_minus);
        i_p.push_back(r.i_bar_plus);
        kn_p.push_back(r.kn_plus);
    }

    OutStream out(a.out_path);
    out.get() << "mode bin_i kn_median\n";
    const auto run = [&](const char* mode, std::vector<double>& ib,
                         std::vector<KnVal>& kn) {
        const KappaFit fit = fit_kappa(ib, kn);
        out.get() << "# mode=" << mode << " kappa=" << fmt(fit.kappa)
                  << " r2=" << fmt(fit.r2) << " n_bins=" << fit.n_bins
                  << " continuum_i_bound=" << fmt(fit.kappa / a.theta_kn) << '\n';
        for (int i = 0; i < fit.n_bins; ++i) {
            out.get() << mode << ' ' << fmt(fit.bin_i[i]) << ' ' << fmt(fit.bin_median[i])
                      << '\n';
        }
    };
    run("sym", i_sym, kn_sym);
    run("minus", i_m, kn_m);
    run("plus", i_p, kn_p);
    return 0;
}

int cmd_rates(const CommonArgs& a) {
    const auto events = load_event_log(a.log_path);
    const auto records = records_for(a, events);
    std::vector<double> lm, lp;
    for (const auto& r : records) {
        if (r.lambda_minus && r.lambda_plus) {
            lm.push_back(*r.lambda_minus);
            lp.push_back(*r.lambda_plus);
        }
    }
    if (lm.size() < 100) {
        throw Error(Errc::insufficient_data, "too few defined rate pairs");
    }
    const auto q = joint_threshold_quantile(lm, lp, a.quantile);

    OutStream out(a.out_path);
    out.get() << "# n=" << q.n << " theta=" << fmt(q.theta)
              << " achieved_fraction=" << fmt(q.achieved_fraction)
              << " cross_correlation=" << fmt(q.cross_correlation)
              << " quantile=" << fmt(a.quantile) << '\n';

    constexpr int kBins = 30;
    const auto [lo_m, hi_m] = std::minmax_element(lm.begin(), lm.end());
    const auto [lo_p, hi_p] = std::minmax_element(lp.begin(), lp.end());
    const double wm = (*hi_m - *lo_m) / kBins, wp = (*hi_p - *lo_p) / kBins;
    std::vector<std::int64_t> hist(kBins * kBins, 0);
    for (std::size_t i = 0; i < lm.size(); ++i) {
        const int bm = std::min(kBins - 1, wm > 0 ? static_cast<int>((lm[i] - *lo_m) / wm) : 0);
        const int bp = std::min(kBins - 1, wp > 0 ? static_cast<int>((lp[i] - *lo_p) / wp) : 0);
        hist[static_cast<std::size_t>(bm) * kBins + bp] += 1;
    }
    out.get() << "lambda_minus_center lambda_plus_center count\n";
    for (int bm = 0; bm < kBins; ++bm) {
        for (int bp = 0; bp < kBins; ++bp) {
            const auto c = hist[static_cast<std::size_t>(bm) * kBins + bp];
            if (c == 0) continue;
            out.get() << fmt(*lo_m + (bm + 0.5) * wm) << ' ' << fmt(*lo_p + (bp + 0.5) * wp)
                      << ' ' << c << '\n';
        }
    }
    return 0;
}

int cmd_detect(const CommonArgs& a) {
    const auto events = load_event_log(a.log_path);
    auto records = records_for(a, events);
    const double theta_l = resolve_theta_lambda(a.theta_lambda, records, a.quantile);
    const auto intervals = detect_regimes(records, theta_l, a.theta_kn);

    OutStream out(a.out_path);
    out.get() << "# theta_lambda=" << fmt(theta_l) << " theta_kn=" << fmt(a.theta_kn)
              << " intervals=" << intervals.size() << '\n';
    out.get() << "side first_tick last_tick\n";
    for (const auto& iv : intervals) {
        out.get() << side_name(iv.side) << ' ' << iv.first_tick << ' ' << iv.last_tick
                  << '\n';
    }
    return 0;
}

int cmd_profile(const CommonArgs& a, const std::vector<std::int64_t>& ticks) {
    if (ticks.empty()) {
        throw Error(Errc::config_invalid, "pass at least one --tick");
    }
    const auto events = load_event_log(a.log_path);
    OutStream out(a.out_path);
    out.get() << "tick gamma n_minus v_minus n_plus v_plus\n";

    Replayer rep(events);
    auto prev = rep.next();
    if (!prev) throw Error(Errc::too_short, "log contains no transaction");
    while (auto curr = rep.next()) {
        const bool wanted =
            std::find(ticks.begin(), ticks.end(), curr->tick_index) != ticks.end();
        if (wanted) {
            std::optional<DepthProfile> pm, pp;
            if (const auto ref = prev->best(Side::minus_side)) {
                pm = layer_profile(*curr, Side::minus_side, *ref, a.gamma_min, a.gamma_max);
            }
            if (const auto ref = prev->best(Side::plus_side)) {
                pp = layer_profile(*curr, Side::plus_side, *ref, a.gamma_min, a.gamma_max);
            }
            for (int g = a.gamma_min; g <= a.gamma_max; ++g) {
                out.get() << curr->tick_index << ' ' << g << ' '
                          << (pm ? std::to_string(pm->n(g)) : "nan") << ' '
                          << (pm ? std::to_string(pm->cum_from_zero(g)) : "nan") << ' '
                          << (pp ? std::to_string(pp->n(g)) : "nan") << ' '
                          << (pp ? std::to_string(pp->cum_from_zero(g)) : "nan") << '\n';
            }
        }
        prev = std::move(curr);
    }
    return 0;
}

}  // namespace

int run_cli(int argc, const char* const* argv) {
    CLI::App app{"order-book kinetics toolkit"};
    app.require_subcommand(1);

    // synth
    auto* synth = app.add_subcommand("synth", "generate a synthetic event log");
    std::string scenario = "stationary";
    std::uint64_t seed = 1;
    std::size_t n_events = 100000;
    double density = 50.0, trend = 2.5;
    int planted = 18;
    std::string synth_out = "-";
    synth->add_option("--scenario", scenario,
                      "stationary|density_sweep|flash_crash|one_sided_halt");
    synth->add_option("--seed", seed, "generator seed");
    synth->add_option("--events", n_events, "event budget");
    synth->add_option("--density", density, "inner occupancy target per side");
    synth->add_option("--planted-gamma-c", planted, "layer boundary the flow plants");
    synth->add_option("--trend-strength", trend, "trend-following intensity");
    synth->add_option("--out", synth_out, "output path, - for stdout");

    CommonArgs replay_a, spectrum_a, corr_a, mfp_a, knudsen_a, kappa_a, rates_a,
        detect_a, profile_a;

    auto* replay = app.add_subcommand("replay", "book states per transaction");
    add_common(replay, replay_a, 4);

    auto* spectrum = app.add_subcommand("spectrum", "power spectra of depth volumes");
    add_common(spectrum, spectrum_a, 4);
    std::vector<int> spectrum_gammas;
    int segments = 8;
    spectrum->add_option("--gamma", spectrum_gammas, "cumulative depth(s), repeatable");
    spectrum->add_option("--segments", segments, "target segment count");

    auto* corr = app.add_subcommand("corr", "velocity/depth-change correlation curves");
    add_common(corr, corr_a, 20);

    auto* mfp = app.add_subcommand("mfp", "mean free path regression");
    add_common(mfp, mfp_a, 20);

    auto* knudsen_cmd = app.add_subcommand("knudsen", "rolling indicator records");
    add_common(knudsen_cmd, knudsen_a, 4);

    auto* kappa = app.add_subcommand("kappa", "inverse-density law fit");
    add_common(kappa, kappa_a, 4);

    auto* rates = app.add_subcommand("rates", "depletion rate joint distribution");
    add_common(rates, rates_a, 2);

    auto* detect = app.add_subcommand("detect", "abnormal regime intervals");
    add_common(detect, detect_a, 2);

    auto* profile = app.add_subcommand("profile", "depth profiles at chosen ticks");
    add_common(profile, profile_a, 4);
    std::vector<std::int64_t> profile_ticks;
    profile->add_option("--tick", profile_ticks, "tick(s) to dump, repeatable");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 2;
    }

    try {
        if (synth->parsed()) {
            return cmd_synth(scenario, seed, n_events, density, planted, trend, synth_out);
        }
        if (replay->parsed()) return cmd_replay(replay_a);
        if (spectrum->parsed()) return cmd_spectrum(spectrum_a, spectrum_gammas, segments);
        if (corr->parsed()) return cmd_corr(corr_a);
        if (mfp->parsed()) return cmd_mfp(mfp_a);
        if (knudsen_cmd->parsed()) return cmd_knudsen(knudsen_a);
        if (kappa->parsed()) return cmd_kappa(kappa_a);
        if (rates->parsed()) return cmd_rates(rates_a);
        if (detect->parsed()) return cmd_detect(detect_a);
        if (profile->parsed()) return cmd_profile(profile_a, profile_ticks);
    } catch (const Error& e) {
        std::cerr << "error: " << e.what() << '\n';
        return exit_code_for(e.code);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 2;
    }
    return 2;
}

}  // namespace lobkin
