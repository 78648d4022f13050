// One line per acceptance criterion; exit status is the number of failures.

#include "cli.hpp"
#include "support.hpp"

#include <random>

using namespace trussnet;

namespace {

constexpr double pi = std::numbers::pi;

struct Outcome {
    bool pass = true;
    std::string detail;

    void require(bool ok, const std::string& what) {
        if (!ok) {
            if (pass) detail.clear();
            pass = false;
            detail += (detail.empty() ? "" : "; ") + what;
        }
    }
};

std::string fmt(double x) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.3g", x);
    return buf;
}

FrequencyWindow window(double lo, double hi, std::size_t points = 0) {
    FrequencyWindow w;
    w.omega_min = lo;
    w.omega_max = hi;
    w.grid_points = points;
    return w;
}

Outcome bridge_roots() {
    Outcome o;
    const auto t = test::bridge();
    const auto t0 = std::chrono::steady_clock::now();
    const auto roots = find_natural_frequencies(t, window(0.05, 1.05 * pi), true);
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    const double s5 = std::sqrt(5.0), s13 = std::sqrt(13.0);
    std::vector<double> cs{(5 + s5) / 10, (5 - s5) / 10, (1 + s13) / 6, (1 - s13) / 6, -1.0 / 3};
    std::sort(cs.begin(), cs.end(), std::greater<>());
    double worst = 0;
    std::size_t regular = 0, resonant = 0;
    for (const auto& r : roots) {
        if (r.kind == ModeKind::resonant) {
            ++resonant;
            o.require(std::abs(r.omega - pi) < 1e-12, "resonant root off pi");
            continue;
        }
        if (regular < cs.size()) worst = std::max(worst, std::abs(std::cos(r.omega) - cs[regular]));
        ++regular;
    }
    o.require(regular == 5 && resonant == 1,
              "found " + std::to_string(regular) + " regular, " + std::to_string(resonant) + " resonant");
    o.require(worst <= 1e-9, "max |cos error| " + fmt(worst));
    o.require(secs <= 5.0, "runtime " + fmt(secs) + " s");
    if (o.pass) o.detail = "5 regular + resonant pi, max |cos error| " + fmt(worst) + ", " + fmt(secs) + " s";
    return o;
}

Outcome bridge_modes() {
    Outcome o;
    const auto t = test::bridge();
    double worst_u = 0, worst_p = 0, free_force = 0;
    for (const auto& row : validation::bridge_reference_modes()) {
        std::vector<ModeResult> modes;
        if (row.force_free) {
            modes = resonant_mode_check(t, pi, {0, 1, 2, 3, 4, 5, 6}, {1, 1, 1, 1, 1, 1, 1}, true);
        } else {
            const auto roots = find_natural_frequencies(t, window(row.omega_tau - 1e-3, row.omega_tau + 1e-3, 5), true);
            o.require(roots.size() == 1, "no root near cos = " + fmt(row.cos_omega_tau));
            if (roots.size() != 1) continue;
            modes = extract_modes(t, roots.front().omega, true);
        }
        o.require(modes.size() == 1, "mode count at cos = " + fmt(row.cos_omega_tau));
        if (modes.size() != 1) continue;
        const auto& m = modes.front();
        worst_u = std::max({worst_u, (m.displacements.at("2") - row.u2).cwiseAbs().maxCoeff(),
                            (m.displacements.at("3") - row.u3).cwiseAbs().maxCoeff(),
                            (m.displacements.at("4") - row.u4).cwiseAbs().maxCoeff()});
        Eigen::Vector4d ref, got;
        ref << row.p1, row.p5;
        got << m.anchor_forces.at("1"), m.anchor_forces.at("5");
        if (row.force_free) {
            free_force = std::max(m.anchor_forces.at("1").norm(), m.anchor_forces.at("5").norm());
            continue;
        }
        const double scale = ref.dot(got) / ref.dot(ref);
        o.require(scale > 0, "force scale not positive at cos = " + fmt(row.cos_omega_tau));
        worst_p = std::max(worst_p, (got / got.norm() - ref / ref.norm()).cwiseAbs().maxCoeff());
    }
    o.require(worst_u <= 1e-8, "mode error " + fmt(worst_u));
    o.require(worst_p <= 1e-8, "force direction error " + fmt(worst_p));
    o.require(free_force <= 1e-10, "force-free mode anchor force " + fmt(free_force));
    if (o.pass)
        o.detail = "6 modes, max component error " + fmt(worst_u) + ", force direction " + fmt(worst_p) +
                   ", force-free |P| " + fmt(free_force);
    return o;
}

Outcome square_determinant() {
    Outcome o;
    std::mt19937 rng(2024);
    std::uniform_real_distribution<double> u(0.25, 4.0);
    double worst = 0;
    int points = 0;
    for (int config = 0; config < 4; ++config) {
        std::vector<Rod> rods = test::square().rods();
        std::map<std::string, Material> mats;
        for (auto& r : rods) {
            r.area = config == 0 ? 1.0 : u(rng);
            r.material = r.id;
            mats[r.id] = {r.id, 1.0, 1.0};
        }
        const Truss t(2, test::square().joints(), rods, mats);
        const auto cfg = validation::SquareClosedForm::from_truss(t);
        int n = 0;
        for (int i = 0; n < 100; ++i) {
            const double w = 0.05 + 3.7 * (i + 0.5) / 110.0;
            bool near_pole = false;
            for (std::size_t r = 0; r < t.rod_count(); ++r)
                near_pole |= rod_spectral_factors(t.properties(r), w).pole_distance < 1e-3;
            if (near_pole) continue;
            const double ref = validation::closed_form_square_det(cfg, w);
            worst = std::max(worst, std::abs(laplacian_determinant(t, w, false) - ref) / std::abs(ref));
            ++n;
            ++points;
        }
    }
    o.require(worst <= 1e-10, "max relative error " + fmt(worst));
    if (o.pass) o.detail = std::to_string(points) + " points over 4 impedance sets, max relative error " + fmt(worst);
    return o;
}

Outcome subdivision_invariance() {
    Outcome o;
    std::vector<std::vector<double>> all;
    for (int n : {1, 2, 4, 8}) {
        const auto t = subdivide(test::square(), n);
        const auto roots = find_natural_frequencies(t, window(0.05, 1.2 * pi), true);
        auto w = expand_multiplicity(roots);
        bool at_pi = false;
        for (const auto& r : roots) at_pi |= std::abs(r.omega - pi) < 1e-8;
        o.require(at_pi, "no mode at pi for n = " + std::to_string(n));
        all.push_back(w);
    }
    double worst = 0;
    for (std::size_t a = 0; a < all.size(); ++a) {
        for (std::size_t b = a + 1; b < all.size(); ++b) {
            o.require(all[a].size() == all[b].size(), "root count differs");
            if (all[a].size() != all[b].size()) continue;
            for (std::size_t i = 0; i < all[a].size(); ++i) worst = std::max(worst, std::abs(all[a][i] - all[b][i]));
        }
    }
    o.require(worst <= 1e-8, "max pairwise difference " + fmt(worst));
    if (o.pass) o.detail = std::to_string(all[0].size()) + " roots at n = 1,2,4,8, max pairwise difference " + fmt(worst);
    return o;
}

Outcome fem_convergence() {
    Outcome o;
    const auto t = test::square();
    const auto lap = expand_multiplicity(find_natural_frequencies(t, window(0.05, 1.2 * pi), true));
    std::string summary;
    for (auto kind : {MassKind::consistent, MassKind::lumped}) {
        std::vector<double> prev(5, std::numeric_limits<double>::infinity());
        double end_err = 0;
        bool monotone = true;
        for (int n : {1, 2, 4, 8, 16, 32}) {
            std::vector<double> w;
            for (const auto& r : fem_frequencies(t, window(0.05, 1.2 * pi, 200), kind, n))
                for (int k = 0; k < r.multiplicity; ++k) w.push_back(r.omega);
            if (w.size() < 5) {
                o.require(false, std::string(to_string(kind)) + " n=" + std::to_string(n) + " has < 5 roots");
                break;
            }
            for (std::size_t i = 0; i < 5; ++i) {
                const double e = std::abs(w[i] - lap[i]) / lap[i];
                monotone &= e <= prev[i] * (1 + 1e-9);
                prev[i] = e;
                if (n == 32) end_err = std::max(end_err, e);
            }
        }
        o.require(monotone, std::string(to_string(kind)) + " error not monotone");
        o.require(end_err < 0.01, std::string(to_string(kind)) + " n=32 max error " + fmt(100 * end_err) + "%");
        summary += std::string(summary.empty() ? "" : ", ") + to_string(kind) + (monotone ? " monotone" : " not monotone") +
                   ", n=32 max error " + fmt(100 * end_err) + "%";
    }
    o.detail = o.pass ? summary : o.detail + " (" + summary + ")";
    return o;
}

Outcome method_equivalence() {
    Outcome o;
    std::string summary;
    for (const auto& [name, t] : {std::pair{"square", test::square()}, std::pair{"bridge", test::bridge()}}) {
        const auto w = window(0.05 / t.min_transit_time(), 1.2 * pi / t.min_transit_time());
        const auto lap = find_natural_frequencies(t, w, true);
        const auto rev = reverberation_frequencies(t, w);
        o.require(lap.size() == rev.size(), std::string(name) + " root counts " + std::to_string(lap.size()) + " vs " +
                                                std::to_string(rev.size()));
        double worst = 0;
        for (std::size_t i = 0; i < std::min(lap.size(), rev.size()); ++i)
            worst = std::max(worst, std::abs(lap[i].omega - rev[i].omega));
        o.require(worst <= 1e-8, std::string(name) + " max difference " + fmt(worst));
        const double ratio = double(reverberation_dof(t)) / double(laplacian_dof(t));
        o.require(ratio > 1, std::string(name) + " size ratio " + fmt(ratio));
        summary += std::string(summary.empty() ? "" : ", ") + name + ": " + std::to_string(lap.size()) +
                   " roots, max difference " + fmt(worst) + ", size ratio " + std::to_string(reverberation_dof(t)) +
                   "/" + std::to_string(laplacian_dof(t)) + " = " + fmt(ratio);
    }
    if (o.pass) o.detail = summary;
    return o;
}

Outcome timing() {
    Outcome o;
    std::string summary;
    for (const auto& [name, t] : {std::pair{"square", test::square()}, std::pair{"bridge", test::bridge()}}) {
        cli::SweepSettings s;
        FrequencyWindow w = s.window(t);
        w.grid_points = w.points_for(t.min_transit_time());
        auto time = [&](cli::Method m, int n) {
            return cli::best_time(5, [&] { (void)cli::sweep(m, t, w, n, true); });
        };
        const double lap = time(cli::Method::laplacian, 1);
        const double rev = time(cli::Method::reverberation, 1);
        o.require(lap < rev, std::string(name) + " laplacian " + fmt(lap) + " s >= reverberation " + fmt(rev) + " s");
        double fem_min = std::numeric_limits<double>::infinity();
        for (int n : {4, 8}) {
            for (auto m : {cli::Method::fem_consistent, cli::Method::fem_lumped}) {
                const double f = time(m, n);
                fem_min = std::min(fem_min, f);
                o.require(lap < f, std::string(name) + " laplacian slower than " + cli::to_string(m) + " at n=" +
                                       std::to_string(n));
            }
        }
        summary += std::string(summary.empty() ? "" : ", ") + name + ": laplacian " + fmt(lap) + " s, reverberation " +
                   fmt(rev) + " s, fastest FEM (n>=4) " + fmt(fem_min) + " s";
    }
    if (o.pass) o.detail = summary + " (identical grids, best of 5)";
    return o;
}

Outcome wavefront_timeline() {
    Outcome o;
    const auto h = simulate_wavefronts(test::square(), {{"12", Direction::toward_nu, -1.0, 0.0}}, {2.5, 0.0, 1000});
    const auto& ev = h.events();
    o.require(ev.size() >= 4, "only " + std::to_string(ev.size()) + " events");
    if (ev.size() < 4) return o;
    o.require(ev[0].joint == "2" && std::abs(ev[0].time - 1.0) <= 1e-9, "first event not at joint 2, t = 1");
    o.require(ev[0].children.size() == 3, "joint 2 produced " + std::to_string(ev[0].children.size()) + " fronts");
    std::map<std::string, double> c(ev[0].children.begin(), ev[0].children.end());
    o.require(c["12"] > 0 && c["24"] < 0 && c["23"] > 0, "wrong signs at joint 2");
    std::set<std::string> at_two;
    double joint3 = -1;
    for (const auto& e : ev) {
        if (std::abs(e.time - 2.0) <= 1e-9) at_two.insert(e.joint);
        if (e.joint == "3" && joint3 < 0) joint3 = e.time;
    }
    o.require(at_two == std::set<std::string>{"1", "4"}, "reflections at t = 2 not at joints 1 and 4");
    o.require(std::abs(joint3 - (1 + std::sqrt(2.0))) <= 1e-9, "joint 3 first reached at " + fmt(joint3));
    if (o.pass)
        o.detail = "joint 2 at t=1 (12 +" + fmt(c["12"]) + ", 24 " + fmt(c["24"]) + ", 23 +" + fmt(c["23"]) +
                   "), joints 1,4 at t=2, joint 3 at t=" + fmt(joint3);
    return o;
}

Outcome properties() {
    Outcome o;
    std::mt19937 rng(99);
    double t2 = 0;
    for (int i = 0; i < 100; ++i) {
        const int dim = 2 + i % 2, deg = dim + i % 4;
        const auto tm = transmission_matrix(test::random_star(rng, dim, deg), "0");
        t2 = std::max(t2, max_abs(tm.entries * tm.entries - Matrix::Identity(deg, deg)));
    }
    o.require(t2 <= 1e-12, "T^2 - I " + fmt(t2));

    std::uniform_real_distribution<double> u(0.05, 3.0);
    double sym = 0;
    for (int i = 0, done = 0; done < 100; ++i) {
        const auto t = test::random_truss(rng, 2 + i % 2, 4 + i % 6, 3 + i % 5);
        try {
            const Matrix d = assemble_laplacian(t, u(rng) / t.min_transit_time(), false).entries;
            sym = std::max(sym, max_abs(d - d.transpose()) / max_abs(d));
            ++done;
        } catch (const PoleProximity&) {
        }
    }
    o.require(sym <= 1e-10, "D asymmetry " + fmt(sym));

    double rmin = 1e300, rmax = 0, trace = 0, second = 0;
    for (const auto& t : {test::square(), test::bridge(), test::random_truss(rng, 3, 6, 5)}) {
        const Matrix k = assemble_stiffness(t, false).entries;
        const Matrix m = assemble_mass(t, MassKind::consistent, false).entries;
        auto rem = [&](double w) { return max_abs(assemble_laplacian(t, w, false).entries - k + w * w * m); };
        for (double x : {0.02, 0.01}) {
            const double w = x / t.min_transit_time();
            const double r = rem(w) / rem(w / 2);
            rmin = std::min(rmin, r);
            rmax = std::max(rmax, r);
        }
        const double tr = assemble_mass(t, MassKind::lumped, false).entries.trace();
        trace = std::max(trace, std::abs(tr - t.dimension() * t.total_mass()) / tr);
        const double h = 1e-3 / t.min_transit_time();
        auto fd = [&](double s) { return Matrix(-(assemble_laplacian(t, s, false).entries - k) / (s * s)); };
        second = std::max(second, max_abs((4 * fd(h / 2) - fd(h)) / 3 - m) / max_abs(m));
    }
    o.require(rmin >= 8 && rmax <= 32, "Taylor ratio in [" + fmt(rmin) + ", " + fmt(rmax) + "]");
    o.require(trace <= 1e-12, "lumped trace error " + fmt(trace));
    o.require(second <= 1e-6, "consistent mass vs second difference " + fmt(second));
    if (o.pass)
        o.detail = "T^2-I " + fmt(t2) + ", D asymmetry " + fmt(sym) + ", Taylor ratio [" + fmt(rmin) + ", " + fmt(rmax) +
                   "], lumped trace " + fmt(trace) + ", M vs d2D " + fmt(second);
    return o;
}

Outcome static_limit() {
    Outcome o;
    const auto t = test::bridge();
    const JointVectors q{{"2", test::vec({0.4, -1.0})}, {"3", test::vec({0.0, -2.0})}, {"4", test::vec({-0.3, 0.5})}};
    const auto u = solve_forced_response(t, 1e-6 / t.min_transit_time(), q);
    const auto k = assemble_stiffness(t, true);
    Vector f = Vector::Zero(k.entries.rows());
    for (const auto& [id, p] : q) f.segment(k.index_map.at(id), 2) = p;
    const Vector ref = k.entries.ldlt().solve(f);
    Vector got(ref.size());
    for (const auto& [id, off] : k.index_map) got.segment(off, 2) = u.at(id);
    const double err = (got - ref).norm() / ref.norm();
    o.require(err <= 1e-5, "relative error " + fmt(err));
    if (o.pass) o.detail = "relative error " + fmt(err);
    return o;
}

} // namespace

int main() {
    const std::vector<std::pair<std::string, Outcome (*)()>> criteria{
        {"bridge roots", bridge_roots},
        {"bridge modes and anchor forces", bridge_modes},
        {"square determinant closed form", square_determinant},
        {"subdivision invariance", subdivision_invariance},
        {"FEM convergence", fem_convergence},
        {"reverberation equivalence", method_equivalence},
        {"timing order", timing},
        {"wavefront timeline", wavefront_timeline},
        {"property suites", properties},
        {"static limit", static_limit},
    };
    int failed = 0;
    for (std::size_t i = 0; i < criteria.size(); ++i) {
        Outcome o;
        try {
            o = criteria[i].second();
        } catch (const std::exception& e) {
            o.pass = false;
            o.detail = std::string("exception: ") + e.what();
        }
        failed += o.pass ? 0 : 1;
        std::printf("%-4s %2zu %s: %s\n", o.pass ? "PASS" : "FAIL", i + 1, criteria[i].first.c_str(), o.detail.c_str());
        std::fflush(stdout);
    }
    std::printf("%d of %zu criteria passed\n", int(criteria.size()) - failed, criteria.size());
    return failed == 0 ? 0 : 1;
}
