#include "qotto/protocol.hpp"

#include <algorithm>
#include <cmath>

namespace qotto::protocol {

void FieldProtocol::validate() const {
    if (samples.size() < 2)
        throw ConfigError("protocol: at least two samples required");
    if (!(t_start < t_end))
        throw ConfigError("protocol: t_start must precede t_end");
    for (std::size_t i = 0; i < samples.size(); ++i) {
        const auto& s = samples[i];
        if (!std::isfinite(s.x) || !std::isfinite(s.y) || !std::isfinite(s.z) ||
            !std::isfinite(s.time))
            throw ConfigError("protocol: non-finite sample");
        if (i > 0 && !(samples[i - 1].time < s.time))
            throw ConfigError("protocol: sample times must be strictly increasing");
    }
}

FieldSample FieldProtocol::at(double t) const {
    if (analytic) return analytic(std::clamp(t, t_start, t_end));
    if (t <= samples.front().time) return samples.front();
    if (t >= samples.back().time) return samples.back();
    auto it = std::upper_bound(samples.begin(), samples.end(), t,
                               [](double v, const FieldSample& s) { return v < s.time; });
    const FieldSample& b = *it;
    const FieldSample& a = *(it - 1);
    const double w = (t - a.time) / (b.time - a.time);
    return FieldSample{a.x + w * (b.x - a.x), a.y + w * (b.y - a.y),
                       a.z + w * (b.z - a.z), t};
}

FieldProtocol from_samples(std::vector<FieldSample> samples) {
    FieldProtocol p;
    p.samples = std::move(samples);
    if (!p.samples.empty()) {
        p.t_start = p.samples.front().time;
        p.t_end = p.samples.back().time;
    }
    p.validate();
    return p;
}

void TanhSweepConfig::validate() const {
    if (!(tau > 0.0)) throw ConfigError("tanh sweep: tau must be positive");
    if (!(t1 < t2)) throw ConfigError("tanh sweep: t1 must precede t2");
    if (!std::isfinite(delta) || !std::isfinite(u_i) || !std::isfinite(u_f))
        throw ConfigError("tanh sweep: non-finite amplitude");
}

double TanhSweepConfig::window_end() const {
    return std::max(t2, t1 + 20.0 * tau);
}

double TanhSweepConfig::z_at(double t) const {
    const double mid = (t1 + window_end()) / 2.0;
    return 0.5 * (u_f - u_i) * std::tanh((t - mid) / tau) + 0.5 * (u_i + u_f);
}

FieldProtocol tanh_sweep(const TanhSweepConfig& cfg, int n_samples) {
    cfg.validate();
    if (n_samples < 2) throw ConfigError("tanh sweep: n_samples must be >= 2");

    FieldProtocol p;
    p.t_start = cfg.t1;
    p.t_end = cfg.window_end();
    p.analytic = [cfg](double t) {
        return FieldSample{cfg.delta, 0.0, cfg.z_at(t), t};
    };
    p.samples.reserve(static_cast<std::size_t>(n_samples));
    for (int i = 0; i < n_samples; ++i) {
        const double t =
            p.t_start + (p.t_end - p.t_start) * i / (n_samples - 1);
        p.samples.push_back(p.analytic(t));
    }
    p.validate();
    return p;
}

namespace {
double rabi(const FieldSample& s) {
    return 2.0 * std::sqrt(s.x * s.x + s.y * s.y + s.z * s.z);
}
}  // namespace

std::pair<double, double> endpoint_frequencies(const FieldProtocol& p) {
    p.validate();
    return {rabi(p.samples.front()), rabi(p.samples.back())};
}

std::pair<double, double> asymptotic_frequencies(const TanhSweepConfig& cfg) {
    cfg.validate();
    const double w1 = 2.0 * std::hypot(cfg.delta, cfg.u_i);
    const double w2 = 2.0 * std::hypot(cfg.delta, cfg.u_f);
    return {w1, w2};
}

}  // namespace qotto::protocol
