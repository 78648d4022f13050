#pragma once

#include "trussnet/fem.hpp"
#include "trussnet/io.hpp"
#include "trussnet/scattering.hpp"
#include "trussnet/spectrum.hpp"
#include "trussnet/validation.hpp"
#include "trussnet/wavefront.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <numbers>
#include <sstream>

namespace trussnet::cli {

enum class Method { laplacian, reverberation, fem_consistent, fem_lumped };

inline const char* to_string(Method m) {
    switch (m) {
    case Method::laplacian: return "laplacian";
    case Method::reverberation: return "reverberation";
    case Method::fem_consistent: return "fem-consistent";
    case Method::fem_lumped: return "fem-lumped";
    }
    return "";
}

inline Method parse_method(const std::string& s) {
    if (s == "laplacian") return Method::laplacian;
    if (s == "reverberation") return Method::reverberation;
    if (s == "fem-consistent") return Method::fem_consistent;
    if (s == "fem-lumped") return Method::fem_lumped;
    throw InputError("unknown method '" + s + "'");
}

inline std::string num(double x) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", x);
    return buf;
}

inline int default_threads() {
    if (const char* env = std::getenv("TRUSS_THREADS")) {
        try {
            int n = std::stoi(env);
            if (n > 0) return n;
        } catch (...) {
        }
    }
    return int(std::max(1u, std::thread::hardware_concurrency()));
}

struct SweepSettings {
    double omega_min = 0;    // 0: 0.05 / tau_min
    double omega_max = 0;    // 0: 1.2 pi / tau_min
    std::size_t grid_points = 0;
    int threads = 1;
    bool reduce_anchors = true;

    FrequencyWindow window(const Truss& t) const {
        FrequencyWindow w;
        const double tau = t.min_transit_time();
        w.omega_min = omega_min > 0 ? omega_min : 0.05 / tau;
        w.omega_max = omega_max > 0 ? omega_max : 1.2 * std::numbers::pi / tau;
        w.grid_points = grid_points;
        w.threads = threads;
        return w;
    }
};

struct Frequency {
    double omega;
    ModeKind kind;
    int multiplicity;
};

// One entry per mode (repeated by multiplicity), ascending.
inline std::vector<Frequency> sweep(Method m, const Truss& t, const FrequencyWindow& w, int divisions,
                                    bool reduce_anchors) {
    std::vector<Frequency> out;
    auto push = [&](double omega, ModeKind k, int mult) {
        for (int i = 0; i < mult; ++i) out.push_back({omega, k, mult});
    };
    switch (m) {
    case Method::laplacian: {
        const Truss fine = subdivide(t, divisions);
        for (const auto& r : find_natural_frequencies(fine, w, reduce_anchors)) push(r.omega, r.kind, r.multiplicity);
        break;
    }
    case Method::reverberation: {
        const Truss fine = subdivide(t, divisions);
        for (const auto& r : reverberation_frequencies(fine, w)) push(r.omega, ModeKind::regular, r.multiplicity);
        break;
    }
    case Method::fem_consistent:
    case Method::fem_lumped: {
        const auto kind = m == Method::fem_consistent ? MassKind::consistent : MassKind::lumped;
        for (const auto& r : fem_frequencies(t, w, kind, divisions, reduce_anchors))
            push(r.omega, ModeKind::regular, r.multiplicity);
        break;
    }
    }
    return out;
}

// The `count` lowest frequencies, widening the window upwards until enough are found.
inline std::vector<Frequency> lowest(Method m, const Truss& t, const SweepSettings& s, int divisions, std::size_t count) {
    FrequencyWindow w = s.window(t);
    std::vector<Frequency> out;
    const double width = w.omega_max - w.omega_min;
    const std::size_t points = w.points_for(t.min_transit_time());
    for (int round = 0; round < 12 && out.size() < count; ++round) {
        w.grid_points = points;
        for (const auto& f : sweep(m, t, w, divisions, s.reduce_anchors)) out.push_back(f);
        w.omega_min = w.omega_max;
        w.omega_max = w.omega_min + width;
    }
    if (out.size() < count)
        throw NumericalError("found only " + std::to_string(out.size()) + " of " + std::to_string(count) +
                             " requested frequencies");
    out.resize(count);
    return out;
}

inline nlohmann::ordered_json vectors_json(const JointVectors& v) {
    nlohmann::ordered_json o = nlohmann::ordered_json::object();
    for (const auto& [id, x] : v) o[id] = std::vector<double>(x.data(), x.data() + x.size());
    return o;
}

inline nlohmann::ordered_json mode_json(const ModeResult& m) {
    nlohmann::ordered_json o;
    o["omega"] = m.omega;
    o["kind"] = to_string(m.kind);
    o["multiplicity"] = m.multiplicity;
    o["displacements"] = vectors_json(m.displacements);
    o["anchor_forces"] = vectors_json(m.anchor_forces);
    o["resonant_order"] = m.resonant_order ? nlohmann::ordered_json(*m.resonant_order) : nlohmann::ordered_json();
    return o;
}

struct Context {
    std::ostream& out;
    std::ostream& err;
};

inline Truss load_input(const std::string& file, const std::string& builtin) {
    if (!builtin.empty()) {
        auto b = parse_builtin(builtin);
        if (!b) throw InputError("unknown builtin structure '" + builtin + "'");
        return builtin_structure(*b);
    }
    if (file.empty()) throw InputError("no structure file given");
    return load_truss_file(file);
}

inline void cmd_freqs(Context& c, const Truss& t, const SweepSettings& s, Method m, int divisions, std::size_t count,
                      const std::string& format) {
    std::vector<Frequency> f;
    if (count > 0) {
        f = lowest(m, t, s, divisions, count);
    } else {
        FrequencyWindow w = s.window(t);
        f = sweep(m, t, w, divisions, s.reduce_anchors);
    }
    if (format == "json") {
        nlohmann::ordered_json o;
        o["method"] = to_string(m);
        o["divisions"] = divisions;
        o["frequencies"] = nlohmann::ordered_json::array();
        for (const auto& x : f)
            o["frequencies"].push_back({{"omega", x.omega}, {"kind", to_string(x.kind)}, {"multiplicity", x.multiplicity}});
        c.out << o.dump(2) << "\n";
        return;
    }
    c.out << "index,omega,kind,multiplicity\n";
    for (std::size_t i = 0; i < f.size(); ++i)
        c.out << i + 1 << "," << num(f[i].omega) << "," << to_string(f[i].kind) << "," << f[i].multiplicity << "\n";
}

inline void cmd_modes(Context& c, const Truss& t, double omega, const SweepSettings& s) {
    if (!(omega > 0)) throw InputError("--omega must be positive");
    std::vector<ModeResult> modes;
    // resonance path when omega sits on a pole
    std::vector<std::size_t> rods;
    std::vector<long> orders;
    for (std::size_t r = 0; r < t.rod_count(); ++r) {
        auto f = rod_spectral_factors(t.properties(r), omega);
        if (f.pole_distance <= kPoleGuard) {
            rods.push_back(r);
            orders.push_back(f.nearest_order);
        }
    }
    if (!rods.empty()) {
        // snap to the exact pole of the first resonant rod
        const double pole = double(orders.front()) * std::numbers::pi / t.properties(rods.front()).transit_time;
        modes = resonant_mode_check(t, pole, rods, orders, s.reduce_anchors);
        if (modes.empty()) throw NotARoot("omega = " + num(omega) + " is a rod resonance without a natural mode");
    } else {
        // polish omega onto the nearby root first
        FrequencyWindow w;
        w.omega_min = omega * (1 - 1e-6);
        w.omega_max = omega * (1 + 1e-6);
        w.grid_points = 3;
        w.root_tol = 1e-13 * omega;
        double target = omega;
        try {
            auto near = find_natural_frequencies(t, w, s.reduce_anchors);
            if (!near.empty()) target = near.front().omega;
        } catch (const PoleProximity&) {
        }
        try {
            modes = extract_modes(t, target, s.reduce_anchors);
        } catch (const NotARoot& e) {
            FrequencyWindow wide = s.window(t);
            wide.omega_min = std::max(omega * 0.5, wide.omega_min * 0.1);
            wide.omega_max = omega * 1.5;
            std::string hint;
            auto roots = find_natural_frequencies(t, wide, s.reduce_anchors);
            if (!roots.empty()) {
                auto best = std::min_element(roots.begin(), roots.end(), [&](const auto& a, const auto& b) {
                    return std::abs(a.omega - omega) < std::abs(b.omega - omega);
                });
                hint = "; nearest root is omega = " + num(best->omega);
            }
            throw NotARoot(std::string(e.what()) + hint + " (run `freqs` to list roots)");
        }
    }
    nlohmann::ordered_json o;
    o["omega"] = modes.front().omega;
    o["modes"] = nlohmann::ordered_json::array();
    for (const auto& m : modes) o["modes"].push_back(mode_json(m));
    c.out << o.dump(2) << "\n";
}

inline void cmd_compare(Context& c, const Truss& t, const SweepSettings& s, const std::vector<int>& divisions,
                        std::size_t count) {
    const auto base = lowest(Method::laplacian, t, s, 1, count);
    const auto rev = lowest(Method::reverberation, t, s, 1, count);
    c.out << "method,divisions,index,omega,rel_error\n";
    for (int n : divisions) {
        auto emit = [&](Method m, const std::vector<Frequency>& f) {
            for (std::size_t i = 0; i < count; ++i)
                c.out << to_string(m) << "," << n << "," << i + 1 << "," << num(f[i].omega) << ","
                      << num(std::abs(f[i].omega - base[i].omega) / base[i].omega) << "\n";
        };
        emit(Method::laplacian, base);
        emit(Method::reverberation, rev);
        emit(Method::fem_consistent, lowest(Method::fem_consistent, t, s, n, count));
        emit(Method::fem_lumped, lowest(Method::fem_lumped, t, s, n, count));
    }
}

inline double time_once(const std::function<void()>& f) {
    auto t0 = std::chrono::steady_clock::now();
    f();
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

// best of `repeat` runs
inline double best_time(int repeat, const std::function<void()>& f) {
    double best = std::numeric_limits<double>::infinity();
    for (int i = 0; i < std::max(1, repeat); ++i) best = std::min(best, time_once(f));
    return best;
}

struct BenchRow {
    int divisions;
    double laplacian, reverberation, fem_consistent, fem_lumped;
};

// Every method sweeps the same window with the same grid: from the default lower edge to
// just above the count-th Laplacian frequency.
inline std::vector<BenchRow> bench(const Truss& t, const SweepSettings& s, const std::vector<int>& divisions,
                                   std::size_t count, int repeat) {
    const auto base = lowest(Method::laplacian, t, s, 1, count);
    FrequencyWindow w = s.window(t);
    w.omega_max = 1.05 * base.back().omega;
    w.grid_points = w.points_for(t.min_transit_time());
    auto run = [&](Method m, int n) { return best_time(repeat, [&] { (void)sweep(m, t, w, n, s.reduce_anchors); }); };
    const double lap = run(Method::laplacian, 1);
    const double rev = run(Method::reverberation, 1);
    std::vector<BenchRow> rows;
    for (int n : divisions) rows.push_back({n, lap, rev, run(Method::fem_consistent, n), run(Method::fem_lumped, n)});
    return rows;
}

inline void cmd_bench(Context& c, const Truss& t, const SweepSettings& s, const std::vector<int>& divisions,
                      std::size_t count, int repeat) {
    c.out << "divisions,laplacian_s,reverberation_s,fem_consistent_s,fem_lumped_s\n";
    for (const auto& r : bench(t, s, divisions, count, repeat))
        c.out << r.divisions << "," << num(r.laplacian) << "," << num(r.reverberation) << "," << num(r.fem_consistent)
              << "," << num(r.fem_lumped) << "\n";
}

inline Impulse parse_impulse(const std::string& text) {
    // rod:direction:stress[:start]
    std::vector<std::string> parts;
    std::stringstream ss(text);
    for (std::string p; std::getline(ss, p, ':');) parts.push_back(p);
    if (parts.size() < 3 || parts.size() > 4) throw InputError("impulse must be rod:direction:stress[:start]");
    Impulse imp;
    imp.rod = parts[0];
    if (parts[1] == "toward_nu" || parts[1] == "nu") {
        imp.direction = Direction::toward_nu;
    } else if (parts[1] == "toward_mu" || parts[1] == "mu") {
        imp.direction = Direction::toward_mu;
    } else {
        throw InputError("impulse direction must be toward_nu or toward_mu");
    }
    try {
        imp.stress_amplitude = std::stod(parts[2]);
        imp.start_time = parts.size() == 4 ? std::stod(parts[3]) : 0.0;
    } catch (const std::exception&) {
        throw InputError("bad number in impulse '" + text + "'");
    }
    return imp;
}

inline void write_events(std::ostream& os, const WavefrontHistory& h) {
    os << "time,joint,rod_in,rod_out,amplitude\n";
    for (const auto& e : h.events()) {
        std::string in;
        for (const auto& r : e.rods_in) in += (in.empty() ? "" : "+") + r;
        for (const auto& [rod, a] : e.children) os << num(e.time) << "," << e.joint << "," << in << "," << rod << "," << num(a) << "\n";
    }
}

inline void write_snapshot(std::ostream& os, const Truss& t, const WavefrontHistory& h, double time) {
    os << "time,rod,z_lo,z_hi,stress\n";
    for (std::size_t r = 0; r < t.rod_count(); ++r)
        for (const auto& seg : h.profile(r, time))
            os << num(time) << "," << t.rods()[r].id << "," << num(seg.z_lo) << "," << num(seg.z_hi) << "," << num(seg.stress) << "\n";
}

inline void cmd_simulate(Context& c, const Truss& t, const std::vector<std::string>& impulses, double t_max,
                         const std::vector<double>& snapshots, double min_amplitude, std::size_t max_fronts,
                         const std::string& out_dir) {
    std::vector<Impulse> imps;
    for (const auto& s : impulses) imps.push_back(parse_impulse(s));
    for (const auto& imp : imps) t.rod_index(imp.rod);
    for (double s : snapshots)
        if (s < 0 || s > t_max) throw InputError("snapshot time " + num(s) + " outside [0, t_max]");
    if (!snapshots.empty() && out_dir.empty()) throw InputError("--snapshot needs --out-dir");
    SimulationOptions opt{t_max, min_amplitude, max_fronts};
    const auto h = simulate_wavefronts(t, imps, opt);
    if (out_dir.empty()) {
        write_events(c.out, h);
        return;
    }
    std::filesystem::create_directories(out_dir);
    std::ofstream ev(std::filesystem::path(out_dir) / "events.csv");
    write_events(ev, h);
    for (std::size_t k = 0; k < snapshots.size(); ++k) {
        std::ofstream sn(std::filesystem::path(out_dir) / ("snapshot_" + std::to_string(k + 1) + ".csv"));
        write_snapshot(sn, t, h, snapshots[k]);
    }
    c.out << "wrote " << h.events().size() << " events and " << snapshots.size() << " snapshots to " << out_dir << "\n";
}

struct Check {
    std::string name;
    double expected, actual;
    double tol;
    bool relative;

    double abs_err() const { return std::abs(actual - expected); }
    double rel_err() const { return expected != 0 ? abs_err() / std::abs(expected) : abs_err(); }
    bool pass() const { return (relative ? rel_err() : abs_err()) <= tol; }
};

// structure-generic identities
inline void generic_checks(const Truss& t, std::vector<Check>& out) {
    for (std::size_t j = 0; j < t.joint_count(); ++j) {
        if (t.joints()[j].anchored || t.incident(j).empty()) continue;
        try {
            auto tm = transmission_matrix(t, j);
            const auto n = tm.entries.rows();
            const double e = max_abs(tm.entries * tm.entries - Matrix::Identity(n, n));
            out.push_back({"T^2=I joint " + t.joints()[j].id, 0.0, e, 1e-12, false});
        } catch (const DegenerateJoint&) {
        }
    }
    const double tau = t.min_transit_time();
    for (double x : {0.37, 1.21, 2.47}) {
        const double w = x / tau;
        try {
            Matrix d = assemble_laplacian(t, w, false).entries;
            out.push_back({"D symmetry wt=" + num(x), 0.0, max_abs(d - d.transpose()) / max_abs(d), 1e-10, false});
        } catch (const PoleProximity&) {
        }
    }
    const Matrix k = assemble_stiffness(t, false).entries;
    const Matrix m = assemble_mass(t, MassKind::consistent, false).entries;
    auto remainder = [&](double w) { return max_abs(assemble_laplacian(t, w, false).entries - k + w * w * m); };
    for (double x : {0.02, 0.01}) {
        const double w = x / tau;
        out.push_back({"Taylor ratio wt=" + num(x), 16.0, remainder(w) / remainder(w / 2), 8.0, false});
    }
}

inline void square_checks(const Truss& t, std::vector<Check>& out) {
    const auto cfg = validation::SquareClosedForm::from_truss(t);
    const double tau = t.min_transit_time();
    for (int i = 0; i < 12; ++i) {
        const double w = (0.1 + 2.9 * (i + 0.5) / 12.0) / tau;
        out.push_back({"det closed form w=" + num(w), validation::closed_form_square_det(cfg, w),
                       laplacian_determinant(t, w, false), 1e-10, true});
    }
    // lowest root of the closed-form condition by scalar bisection
    double a = 0.5 / tau, b = 1.2 / tau;
    for (int i = 0; i < 200 && b - a > 1e-15 * b; ++i) {
        const double mid = 0.5 * (a + b);
        (validation::closed_form_square_condition(cfg, a) * validation::closed_form_square_condition(cfg, mid) <= 0 ? b : a) = mid;
    }
    FrequencyWindow w;
    w.omega_min = 0.05 / tau;
    w.omega_max = 1.2 / tau;
    auto roots = find_natural_frequencies(t, w, true);
    out.push_back({"lowest root vs closed form", 0.5 * (a + b), roots.empty() ? 0.0 : roots.front().omega, 1e-9, true});
    auto res = resonant_mode_check(t, std::numbers::pi / t.properties(t.rod_index("12")).transit_time,
                                   {t.rod_index("12"), t.rod_index("13"), t.rod_index("24"), t.rod_index("34")},
                                   {1, 1, 1, 1}, true);
    out.push_back({"resonant mode at side pole exists", 1.0, res.empty() ? 0.0 : 1.0, 0.0, false});
}

inline void bridge_checks(const Truss& t, std::vector<Check>& out) {
    const double tau = t.properties(0).transit_time;
    for (const auto& row : validation::bridge_reference_modes()) {
        const std::string tag = "c=" + num(row.cos_omega_tau);
        out.push_back({"polynomial root " + tag, 0.0, validation::bridge_polynomial(row.cos_omega_tau), 1e-12, false});
        std::vector<ModeResult> modes;
        if (row.force_free) {
            std::vector<std::size_t> rods(t.rod_count());
            std::vector<long> orders(t.rod_count(), 1);
            for (std::size_t r = 0; r < rods.size(); ++r) rods[r] = r;
            modes = resonant_mode_check(t, std::numbers::pi / tau, rods, orders, true);
        } else {
            FrequencyWindow w;
            const double wt = row.omega_tau / tau;
            w.omega_min = wt * (1 - 1e-4);
            w.omega_max = wt * (1 + 1e-4);
            w.grid_points = 5;
            auto roots = find_natural_frequencies(t, w, true);
            out.push_back({"root " + tag, row.cos_omega_tau, roots.empty() ? 2.0 : std::cos(roots.front().omega * tau),
                           1e-9, false});
            if (!roots.empty()) modes = extract_modes(t, roots.front().omega, true);
        }
        out.push_back({"mode count " + tag, 1.0, double(modes.size()), 0.0, false});
        if (modes.size() != 1) continue;
        const auto& m = modes.front();
        const std::pair<const char*, const Eigen::Vector2d*> us[] = {{"2", &row.u2}, {"3", &row.u3}, {"4", &row.u4}};
        for (const auto& [id, ref] : us)
            for (int k = 0; k < 2; ++k)
                out.push_back({"u" + std::string(id) + (k ? "y " : "x ") + tag, (*ref)(k), m.displacements.at(id)(k), 1e-8, false});
        const Eigen::Vector2d p1 = m.anchor_forces.at("1"), p5 = m.anchor_forces.at("5");
        if (row.force_free) {
            out.push_back({"|P1|+|P5| " + tag, 0.0, p1.norm() + p5.norm(), 1e-10, false});
            continue;
        }
        Eigen::Vector4d ref, got;
        ref << row.p1, row.p5;
        got << p1, p5;
        const double scale = ref.dot(got) / ref.dot(ref);
        out.push_back({"force scale positive " + tag, 1.0, scale > 0 ? 1.0 : 0.0, 0.0, false});
        for (int k = 0; k < 4; ++k)
            out.push_back({std::string(k < 2 ? "P1" : "P5") + (k % 2 ? "y " : "x ") + tag, ref(k) / ref.norm(),
                           got(k) / got.norm(), 1e-8, false});
    }
}

inline bool cmd_verify(Context& c, const Truss& t, const std::string& builtin) {
    std::vector<Check> checks;
    generic_checks(t, checks);
    if (builtin == "square") square_checks(t, checks);
    if (builtin == "bridge") bridge_checks(t, checks);
    c.out << "check,expected,actual,abs_err,rel_err,status\n";
    bool ok = true;
    for (const auto& k : checks) {
        ok = ok && k.pass();
        c.out << k.name << "," << num(k.expected) << "," << num(k.actual) << "," << num(k.abs_err()) << ","
              << num(k.rel_err()) << "," << (k.pass() ? "pass" : "FAIL") << "\n";
    }
    return ok;
}

inline int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
    CLI::App app{"Natural frequencies, modes and wavefronts of elastic trusses"};
    app.require_subcommand(1);
    int threads = 0;
    app.add_option("--threads", threads, "worker threads for sweeps (default: TRUSS_THREADS or all cores)");

    std::string file, builtin, method = "laplacian", format = "csv", out_dir;
    SweepSettings s;
    bool keep_anchors = false;
    int divisions = 1, repeat = 3;
    std::size_t count = 0, max_fronts = 1'000'000;
    double omega = 0, t_max = 1.0, min_amp = 0.0;
    std::vector<int> div_list{1, 2, 4, 8};
    std::vector<std::string> impulses;
    std::vector<double> snapshots;
    double scale = 1.0, area = 1.0, youngs = 1.0, density = 1.0;

    auto add_input = [&](CLI::App* sub) {
        sub->add_option("file", file, "structure file (JSON)");
        sub->add_option("--builtin", builtin, "use a builtin structure instead of a file (square, bridge)");
    };
    auto add_window = [&](CLI::App* sub) {
        sub->add_option("--omega-min", s.omega_min, "lower end of the sweep (rad/s)");
        sub->add_option("--omega-max", s.omega_max, "upper end of the sweep (rad/s)");
        sub->add_option("--grid-points", s.grid_points, "grid points across the window");
        sub->add_flag("--keep-anchors", keep_anchors, "do not remove anchored joints");
    };

    auto* freqs = app.add_subcommand("freqs", "list natural frequencies");
    add_input(freqs);
    add_window(freqs);
    freqs->add_option("--method", method, "laplacian, reverberation, fem-consistent or fem-lumped");
    freqs->add_option("--divisions", divisions, "rod subdivisions")->check(CLI::PositiveNumber);
    freqs->add_option("--count", count, "return the lowest N frequencies");
    freqs->add_option("--format", format, "csv or json")->check(CLI::IsMember({"csv", "json"}));

    auto* modes = app.add_subcommand("modes", "mode shapes and anchor forces at a natural frequency");
    add_input(modes);
    modes->add_option("--omega", omega, "natural frequency (rad/s)")->required();
    modes->add_flag("--keep-anchors", keep_anchors, "do not remove anchored joints");

    auto* compare = app.add_subcommand("compare", "FEM convergence against the network Laplacian");
    add_input(compare);
    add_window(compare);
    compare->add_option("--divisions", div_list, "comma separated subdivision counts")->delimiter(',');
    compare->add_option("--count", count, "frequencies per method (default 5)");

    auto* benchc = app.add_subcommand("bench", "wall time of the four sweeps");
    add_input(benchc);
    add_window(benchc);
    benchc->add_option("--divisions", div_list, "comma separated subdivision counts")->delimiter(',');
    benchc->add_option("--count", count, "frequencies to bracket (default 5)");
    benchc->add_option("--repeat", repeat, "runs per timing, best is kept");

    auto* sim = app.add_subcommand("simulate", "wavefront event simulation");
    add_input(sim);
    sim->add_option("--impulse", impulses, "rod:toward_nu|toward_mu:stress[:start], repeatable");
    sim->add_option("--t-max", t_max, "end time (s)");
    sim->add_option("--snapshot", snapshots, "snapshot times, comma separated")->delimiter(',');
    sim->add_option("--min-amplitude", min_amp, "drop child fronts weaker than this stress");
    sim->add_option("--max-fronts", max_fronts, "live front cap");
    sim->add_option("--out-dir", out_dir, "write events.csv and snapshot_<k>.csv here");

    auto* verify = app.add_subcommand("verify", "run closed-form and identity checks");
    add_input(verify);

    std::string example_name;
    auto* example = app.add_subcommand("example", "print a builtin structure file");
    example->add_option("name", example_name, "square or bridge")->required();
    example->add_option("--scale", scale, "side length L");
    example->add_option("--area", area, "rod cross-section");
    example->add_option("--youngs-modulus", youngs, "Young's modulus");
    example->add_option("--density", density, "density");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        out << app.help();
        return 0;
    } catch (const CLI::CallForAllHelp& e) {
        out << app.help("", CLI::AppFormatMode::All);
        return 0;
    } catch (const CLI::ParseError& e) {
        err << "error: " << e.what() << "\n";
        return 2;
    }

    s.threads = threads > 0 ? threads : default_threads();
    s.reduce_anchors = !keep_anchors;
    Context c{out, err};
    try {
        if (*example) {
            auto b = parse_builtin(example_name);
            if (!b) throw InputError("unknown example '" + example_name + "' (square, bridge)");
            out << write_truss(builtin_structure(*b, scale, {"m", youngs, density}, area));
            return 0;
        }
        const Truss t = load_input(file, builtin);
        for (const auto& w : t.warnings()) err << "warning: " << w << "\n";
        if (*freqs) {
            std::ostringstream buf;
            Context bc{buf, err};
            cmd_freqs(bc, t, s, parse_method(method), divisions, count, format);
            out << buf.str();
        } else if (*modes) {
            std::ostringstream buf;
            Context bc{buf, err};
            cmd_modes(bc, t, omega, s);
            out << buf.str();
        } else if (*compare) {
            std::ostringstream buf;
            Context bc{buf, err};
            cmd_compare(bc, t, s, div_list, count ? count : 5);
            out << buf.str();
        } else if (*benchc) {
            std::ostringstream buf;
            Context bc{buf, err};
            cmd_bench(bc, t, s, div_list, count ? count : 5, repeat);
            out << buf.str();
        } else if (*sim) {
            std::ostringstream buf;
            Context bc{buf, err};
            cmd_simulate(bc, t, impulses, t_max, snapshots, min_amp, max_fronts, out_dir);
            out << buf.str();
        } else if (*verify) {
            std::string which = builtin;
            std::ostringstream buf;
            Context bc{buf, err};
            const bool ok = cmd_verify(bc, t, which);
            out << buf.str();
            return ok ? 0 : 3;
        }
    } catch (const InputError& e) {
        err << "error: " << e.what() << "\n";
        return 2;
    } catch (const NumericalError& e) {
        err << "error: " << e.what() << "\n";
        return 3;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << "\n";
        return 3;
    }
    return 0;
}

} // namespace trussnet::cli
