#pragma once

#include "trussnet/scattering.hpp"

#include <memory>
#include <queue>

namespace trussnet {

enum class Direction { toward_nu, toward_mu };

inline const char* to_string(Direction d) { return d == Direction::toward_nu ? "toward_nu" : "toward_mu"; }

struct Impulse {
    std::string rod;
    Direction direction = Direction::toward_nu;
    double stress_amplitude = 1.0;
    double start_time = 0.0;
};

struct Wavefront {
    std::string rod;
    Direction direction;
    double position;    // metres from the rod's first joint
    double event_time;  // launch time
    double stress_amplitude;
};

struct ScatterEvent {
    double time;
    std::string joint;
    std::vector<std::string> rods_in;
    std::vector<std::pair<std::string, double>> children;  // rod out, stress amplitude
};

struct SimulationOptions {
    double t_max = 1.0;
    double min_amplitude = 0.0;
    std::size_t max_fronts = 1'000'000;
};

struct StressSegment {
    double z_lo, z_hi;  // fractions of the rod length from its first joint
    double stress;
};

class WavefrontHistory {
public:
    struct Front {
        std::size_t rod;
        Direction direction;
        double launch;
        double velocity;  // along the rod's own orientation
        double stress;
    };

    WavefrontHistory(const Truss& t, double t_max) : truss_(std::make_shared<const Truss>(t)), t_max_(t_max) {}

    const std::vector<ScatterEvent>& events() const { return events_; }
    const std::vector<Front>& fronts() const { return fronts_; }
    std::size_t impulses() const { return impulses_; }
    double t_max() const { return t_max_; }

    // fronts created by the impulses and the first k scattering events
    std::size_t fronts_after(std::size_t k) const {
        std::size_t n = impulses_;
        for (std::size_t i = 0; i < std::min(k, events_.size()); ++i) n += events_[i].children.size();
        return n;
    }

    std::vector<Wavefront> fronts_at(double t) const {
        std::vector<Wavefront> out;
        for (const auto& f : fronts_) {
            const auto& p = truss_->properties(f.rod);
            if (t < f.launch || t >= f.launch + p.transit_time) continue;
            const double d = (t - f.launch) * p.wave_speed;
            const double pos = f.direction == Direction::toward_nu ? d : p.length - d;
            out.push_back({truss_->rods()[f.rod].id, f.direction, pos, f.launch, f.stress});
        }
        return out;
    }

    // piecewise-constant stress along a rod at time t: every front adds its step behind itself
    std::vector<StressSegment> profile(std::size_t rod, double t) const {
        const double tau = truss_->properties(rod).transit_time;
        std::vector<double> cuts{0.0, 1.0};
        std::vector<std::tuple<double, double, double>> cover;
        for (const auto& f : fronts_) {
            if (f.rod != rod || t < f.launch) continue;
            const double d = std::min(1.0, (t - f.launch) / tau);
            if (d <= 0) continue;
            const double lo = f.direction == Direction::toward_nu ? 0.0 : 1.0 - d;
            const double hi = f.direction == Direction::toward_nu ? d : 1.0;
            cover.emplace_back(lo, hi, f.stress);
            cuts.push_back(lo);
            cuts.push_back(hi);
        }
        std::sort(cuts.begin(), cuts.end());
        cuts.erase(std::unique(cuts.begin(), cuts.end()), cuts.end());
        std::vector<StressSegment> out;
        for (std::size_t i = 0; i + 1 < cuts.size(); ++i) {
            const double mid = 0.5 * (cuts[i] + cuts[i + 1]);
            double s = 0;
            for (const auto& [lo, hi, v] : cover)
                if (mid > lo && mid < hi) s += v;
            if (!out.empty() && out.back().stress == s) {
                out.back().z_hi = cuts[i + 1];
            } else {
                out.push_back({cuts[i], cuts[i + 1], s});
            }
        }
        return out;
    }

    double stress_at(std::size_t rod, double z_over_l, double t) const {
        for (const auto& s : profile(rod, t))
            if (z_over_l >= s.z_lo && z_over_l <= s.z_hi) return s.stress;
        return 0.0;
    }

private:
    friend WavefrontHistory simulate_wavefronts(const Truss&, const std::vector<Impulse>&, const SimulationOptions&);

    std::shared_ptr<const Truss> truss_;
    double t_max_;
    std::size_t impulses_ = 0;
    std::vector<Front> fronts_;
    std::vector<ScatterEvent> events_;
};

// Event-driven propagation of step fronts. Velocities are tracked internally; stress is
// sigma = -Gamma v for a front moving along the rod orientation and +Gamma v against it.
inline WavefrontHistory simulate_wavefronts(const Truss& t, const std::vector<Impulse>& impulses,
                                            const SimulationOptions& opt) {
    if (!(opt.t_max >= 0)) throw InputError("t_max must be non-negative");
    WavefrontHistory h(t, opt.t_max);
    const double same_time = 1e-12 * t.min_transit_time();

    std::vector<std::optional<TransmissionMatrix>> tms(t.joint_count());
    auto tm_of = [&](std::size_t j) -> const TransmissionMatrix& {
        if (!tms[j]) tms[j] = transmission_matrix(t, j, true);
        return *tms[j];
    };

    struct Arrival {
        double time;
        std::size_t joint;
        std::size_t front;
    };
    auto later = [&](const Arrival& a, const Arrival& b) {
        if (a.time != b.time) return a.time > b.time;
        const auto& ja = t.joints()[a.joint].id;
        const auto& jb = t.joints()[b.joint].id;
        if (ja != jb) return ja > jb;
        return t.rods()[h.fronts_[a.front].rod].id > t.rods()[h.fronts_[b.front].rod].id;
    };
    std::priority_queue<Arrival, std::vector<Arrival>, decltype(later)> queue(later);

    auto launch = [&](std::size_t rod, Direction dir, double time, double velocity) {
        const auto& p = t.properties(rod);
        const double stress = dir == Direction::toward_nu ? -p.impedance * velocity : p.impedance * velocity;
        h.fronts_.push_back({rod, dir, time, velocity, stress});
        const auto target = t.ends(rod)[dir == Direction::toward_nu ? 1 : 0];
        queue.push({time + p.transit_time, target, h.fronts_.size() - 1});
        if (queue.size() > opt.max_fronts)
            throw EventExplosion("more than " + std::to_string(opt.max_fronts) +
                                 " live wavefronts; raise min_amplitude or lower t_max");
    };

    for (const auto& imp : impulses) {
        const auto r = t.rod_index(imp.rod);
        const double gamma = t.properties(r).impedance;
        const double v = imp.direction == Direction::toward_nu ? -imp.stress_amplitude / gamma
                                                               : imp.stress_amplitude / gamma;
        if (imp.start_time > opt.t_max) continue;
        launch(r, imp.direction, imp.start_time, v);
        ++h.impulses_;
    }

    while (!queue.empty() && queue.top().time <= opt.t_max) {
        const double t0 = queue.top().time;
        std::vector<Arrival> batch;
        while (!queue.empty() && queue.top().time <= t0 + same_time) {
            batch.push_back(queue.top());
            queue.pop();
        }
        std::stable_sort(batch.begin(), batch.end(), [&](const Arrival& a, const Arrival& b) {
            return t.joints()[a.joint].id < t.joints()[b.joint].id;
        });
        for (std::size_t i = 0; i < batch.size();) {
            const auto j = batch[i].joint;
            const auto& tm = tm_of(j);
            Vector in = Vector::Zero(Eigen::Index(tm.rods.size()));
            ScatterEvent ev{batch[i].time, t.joints()[j].id, {}, {}};
            double in_scale = 0;
            for (; i < batch.size() && batch[i].joint == j; ++i) {
                const auto& f = h.fronts_[batch[i].front];
                const auto col = std::find(tm.rods.begin(), tm.rods.end(), f.rod) - tm.rods.begin();
                in(col) += t.ends(f.rod)[0] == j ? f.velocity : -f.velocity;
                in_scale = std::max(in_scale, std::abs(f.stress));
                const auto& rid = t.rods()[f.rod].id;
                if (std::find(ev.rods_in.begin(), ev.rods_in.end(), rid) == ev.rods_in.end()) ev.rods_in.push_back(rid);
            }
            const Vector out = scatter(tm, in);
            for (Eigen::Index k = 0; k < out.size(); ++k) {
                const auto r = tm.rods[std::size_t(k)];
                const bool from_mu = t.ends(r)[0] == j;
                const double v = from_mu ? out(k) : -out(k);
                const Direction dir = from_mu ? Direction::toward_nu : Direction::toward_mu;
                const double gamma = t.properties(r).impedance;
                const double stress = dir == Direction::toward_nu ? -gamma * v : gamma * v;
                if (std::abs(stress) <= 1e-12 * in_scale || std::abs(stress) < opt.min_amplitude) continue;
                ev.children.emplace_back(t.rods()[r].id, stress);
                launch(r, dir, ev.time, v);
            }
            h.events_.push_back(std::move(ev));
        }
    }
    return h;
}

} // namespace trussnet
