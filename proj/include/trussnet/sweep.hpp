#pragma once

#include "trussnet/errors.hpp"

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <exception>
#include <mutex>
#include <string>
#include <thread>
#include <vector>

namespace trussnet {

struct FrequencyWindow {
    double omega_min = 0.05;
    double omega_max = 3.8;
    std::size_t grid_points = 0;  // 0: 2000 per unit of omega * tau_min
    double root_tol = 0;          // 0: 1e-12 * omega_max
    double pole_guard = 1e-5;
    int threads = 1;

    void validate() const;
    std::size_t points_for(double tau_min) const {
        if (grid_points >= 2) return grid_points;
        return std::max<std::size_t>(2, std::size_t(std::ceil(2000.0 * (omega_max - omega_min) * tau_min)));
    }
    double tolerance() const { return root_tol > 0 ? root_tol : 1e-12 * omega_max; }
};

struct Root {
    double omega;
    int multiplicity;
};

struct SweepDiagnostics {
    bool grid_too_coarse = false;
    int pole_crossings = 0;
    std::vector<std::string> mechanism_joints;
    std::vector<std::string> notes;
};

template <class F>
void parallel_for(std::size_t n, int threads, F&& f) {
    const std::size_t workers = std::min<std::size_t>(n, std::size_t(std::max(1, threads)));
    if (workers <= 1) {
        for (std::size_t i = 0; i < n; ++i) f(i);
        return;
    }
    std::exception_ptr err;
    std::mutex m;
    std::vector<std::thread> pool;
    for (std::size_t w = 0; w < workers; ++w) {
        pool.emplace_back([&, w] {
            try {
                for (std::size_t i = w; i < n; i += workers) f(i);
            } catch (...) {
                std::lock_guard lock(m);
                if (!err) err = std::current_exception();
            }
        });
    }
    for (auto& t : pool) t.join();
    if (err) std::rethrow_exception(err);
}

// Locates roots in [lo, hi] from a monotone nondecreasing negative-eigenvalue count.
// Each count jump is bisected down to `tol`; its size is the multiplicity.
template <class Count>
std::vector<Root> bracket_roots(const Count& count, double lo, double hi, std::size_t points, double tol,
                                int threads, SweepDiagnostics* diag) {
    std::vector<Root> roots;
    if (!(hi > lo)) return roots;
    points = std::max<std::size_t>(points, 2);
    std::vector<double> w(points);
    for (std::size_t i = 0; i < points; ++i) w[i] = lo + (hi - lo) * double(i) / double(points - 1);
    w.back() = hi;
    std::vector<int> c(points);
    parallel_for(points, threads, [&](std::size_t i) { c[i] = count(w[i]); });

    for (std::size_t i = 0; i + 1 < points; ++i) {
        if (c[i + 1] < c[i]) {
            if (diag) ++diag->pole_crossings;
            continue;
        }
        if (c[i + 1] == c[i]) continue;
        std::size_t before = roots.size();
        // explicit stack of (a, b, ca, cb)
        struct Cell {
            double a, b;
            int ca, cb;
        };
        std::vector<Cell> stack{{w[i], w[i + 1], c[i], c[i + 1]}};
        std::vector<Root> found;
        while (!stack.empty()) {
            Cell cell = stack.back();
            stack.pop_back();
            if (cell.b - cell.a <= tol) {
                found.push_back({0.5 * (cell.a + cell.b), cell.cb - cell.ca});
                continue;
            }
            const double mid = 0.5 * (cell.a + cell.b);
            if (!(mid > cell.a && mid < cell.b)) {
                found.push_back({mid, cell.cb - cell.ca});
                continue;
            }
            const int cm = count(mid);
            if (cm < cell.ca || cm > cell.cb) {
                // not monotone here: a pole slipped inside, keep the net jump only
                if (diag) ++diag->pole_crossings;
                found.push_back({mid, cell.cb - cell.ca});
                continue;
            }
            if (cm > cell.ca) stack.push_back({cell.a, mid, cell.ca, cm});
            if (cell.cb > cm) stack.push_back({mid, cell.b, cm, cell.cb});
        }
        std::sort(found.begin(), found.end(), [](const Root& x, const Root& y) { return x.omega < y.omega; });
        // merge neighbours that collapsed onto the same point
        for (const auto& r : found) {
            if (roots.size() > before && r.omega - roots.back().omega <= tol) {
                roots.back().multiplicity += r.multiplicity;
            } else {
                roots.push_back(r);
            }
        }
        if (roots.size() - before > 1 && diag) diag->grid_too_coarse = true;
    }
    return roots;
}

inline void FrequencyWindow::validate() const {
    if (!(omega_min > 0) || !(omega_max > omega_min))
        throw InputError("frequency window needs 0 < omega_min < omega_max");
    if (grid_points == 1) throw InputError("grid_points must be at least 2");
}

} // namespace trussnet
