#include "tnr/path_belief.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "tnr/errors.hpp"

namespace tnr {

const char* to_string(BeliefMode mode) {
    return mode == BeliefMode::navigation ? "navigation" : "initialization";
}

void BeliefConfig::validate() const {
    if (particle_count < 1) throw ConfigError("particle_count must be >= 1");
    if (!(motion_noise_sigma >= 0.0)) throw ConfigError("motion_noise_sigma must be >= 0");
    if (!(discard_fraction >= 0.0 && discard_fraction < 1.0)) throw ConfigError("discard_fraction must be in [0, 1)");
    if (certainty_window && !(*certainty_window > 0.0)) throw ConfigError("certainty_window must be positive");
    if (!(window_spacings > 0.0)) throw ConfigError("window_spacings must be positive");
    if (!(0.0 < certainty_exit_nav && certainty_exit_nav < certainty_enter_nav &&
          certainty_enter_nav <= skip_filtering_threshold && skip_filtering_threshold <= 1.0))
        throw ConfigError("need 0 < certainty_exit_nav < certainty_enter_nav <= skip_filtering_threshold <= 1");
    if (!(weight_floor >= 0.0)) throw ConfigError("weight_floor must be >= 0");
    if (estimate_top < 1) throw ConfigError("estimate_top must be >= 1");
}

double estimate(const Belief& belief, std::size_t top) {
    if (belief.particles.empty()) throw ConfigError("estimate of an empty belief");
    std::vector<std::size_t> order(belief.particles.size());
    std::iota(order.begin(), order.end(), std::size_t{0});
    const std::size_t n = std::min(top, order.size());
    const auto& p = belief.particles;
    std::partial_sort(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(n), order.end(),
                      [&](std::size_t a, std::size_t b) {
                          if (p[a].weight != p[b].weight) return p[a].weight > p[b].weight;
                          if (p[a].s != p[b].s) return p[a].s < p[b].s;
                          return a < b;
                      });
    double sum = 0.0;
    for (std::size_t i = 0; i < n; ++i) sum += p[order[i]].s;
    return sum / static_cast<double>(n);
}

double certainty(const Belief& belief, double window, std::size_t top) {
    const double center = estimate(belief, top);
    double inside = 0.0;
    double total = 0.0;
    for (const Particle& p : belief.particles) {
        total += p.weight;
        if (std::abs(p.s - center) <= window) inside += p.weight;
    }
    return total > 0.0 ? std::clamp(inside / total, 0.0, 1.0) : 0.0;
}

ModeDecision mode_transition(BeliefMode current, double c, const BeliefConfig& config) {
    ModeDecision out{current, false};
    if (current == BeliefMode::initialization && c >= config.certainty_enter_nav) out.mode = BeliefMode::navigation;
    else if (current == BeliefMode::navigation && c < config.certainty_exit_nav) out.mode = BeliefMode::initialization;
    out.skip_filtering = out.mode == BeliefMode::navigation && c >= config.skip_filtering_threshold;
    return out;
}

double interpolated_image_weight(double s, const VprResult& vpr, const TaughtPath& database) {
    const auto [lo, hi] = database.bracket(s);
    const double w_lo = vpr.score_of(lo).value_or(0.0);
    if (lo == hi) return w_lo;
    const double w_hi = vpr.score_of(hi).value_or(0.0);
    const double a = database.keyframes[lo].arc_length;
    const double b = database.keyframes[hi].arc_length;
    const double t = (s - a) / (b - a);
    return (1.0 - t) * w_lo + t * w_hi;
}

PathBelief::PathBelief(const TaughtPath& database, const BeliefConfig& config, std::uint64_t seed)
    : config_(config), rng_(seed) {
    config_.validate();
    if (database.keyframes.empty()) throw UnusablePathError("empty database");
    length_ = std::max(database.total_length, database.keyframes.back().arc_length);
    window_ = config_.certainty_window.value_or(config_.window_spacings * database.mean_spacing());
    if (!(window_ > 0.0)) window_ = 1.0;
    reset();
}

double PathBelief::draw_uniform() { return std::uniform_real_distribution<double>(0.0, length_)(rng_); }

void PathBelief::reset() {
    belief_ = Belief{};
    belief_.particles.resize(config_.particle_count);
    const double w = 1.0 / static_cast<double>(config_.particle_count);
    for (Particle& p : belief_.particles) p = {draw_uniform(), w};
    belief_.certainty = tnr::certainty(belief_, window_, config_.estimate_top);
}

void PathBelief::normalize() {
    double total = 0.0;
    for (const Particle& p : belief_.particles) total += p.weight;
    if (!(total > 0.0)) {
        const double w = 1.0 / static_cast<double>(belief_.particles.size());
        for (Particle& p : belief_.particles) p.weight = w;
        return;
    }
    for (Particle& p : belief_.particles) p.weight /= total;
}

void PathBelief::refresh_mode() {
    belief_.certainty = tnr::certainty(belief_, window_, config_.estimate_top);
    const ModeDecision d = mode_transition(belief_.mode, belief_.certainty, config_);
    belief_.mode = d.mode;
    belief_.skip_filtering = d.skip_filtering;
}

void PathBelief::predict(double traveled) {
    if (traveled < 0.0) throw ConfigError("travelled distance must be >= 0");
    const double sigma = config_.motion_noise_sigma * traveled;
    std::normal_distribution<double> noise(0.0, 1.0);
    const double fresh = 1.0 / static_cast<double>(belief_.particles.size());
    bool replaced = false;
    for (Particle& p : belief_.particles) {
        p.s += traveled;
        if (sigma > 0.0) p.s += sigma * noise(rng_);
        if (p.s < 0.0 || p.s > length_) {
            p = {draw_uniform(), fresh};
            replaced = true;
        }
    }
    if (replaced) normalize();
    if (traveled > 0.0 || replaced) belief_.certainty = tnr::certainty(belief_, window_, config_.estimate_top);
}

void PathBelief::update(const VprResult& vpr, const TaughtPath& database) {
    if (database.keyframes.empty()) throw UnusablePathError("empty database");
    for (Particle& p : belief_.particles)
        p.weight *= interpolated_image_weight(p.s, vpr, database) + config_.weight_floor;
    normalize();
    if (config_.resampling == ResamplingStyle::low_variance) low_variance_resample();
    else discard_and_reinit();
    refresh_mode();
}

void PathBelief::discard_and_reinit() {
    auto& ps = belief_.particles;
    const std::size_t n = ps.size();
    const auto count = static_cast<std::size_t>(std::llround(config_.discard_fraction * static_cast<double>(n)));
    if (count == 0) return;
    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return ps[a].weight < ps[b].weight; });
    const double fresh = 1.0 / static_cast<double>(n);
    for (std::size_t i = 0; i < count; ++i) ps[order[i]] = {draw_uniform(), fresh};
    normalize();
}

void PathBelief::low_variance_resample() {
    auto& ps = belief_.particles;
    const std::size_t n = ps.size();
    std::vector<Particle> out;
    out.reserve(n);
    const double step = 1.0 / static_cast<double>(n);
    double target = std::uniform_real_distribution<double>(0.0, step)(rng_);
    double cumulative = ps[0].weight;
    std::size_t i = 0;
    for (std::size_t m = 0; m < n; ++m) {
        while (target > cumulative && i + 1 < n) cumulative += ps[++i].weight;
        out.push_back({ps[i].s, step});
        target += step;
    }
    ps = std::move(out);
}

}  // namespace tnr
