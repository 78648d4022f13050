#pragma once

#include "trussnet/model.hpp"

#include <random>
#include <set>

namespace trussnet::test {

inline Truss square() { return builtin_structure(Builtin::square); }
inline Truss bridge() { return builtin_structure(Builtin::bridge); }

inline Vector vec(std::initializer_list<double> v) {
    Vector x(Eigen::Index(v.size()));
    Eigen::Index i = 0;
    for (double d : v) x(i++) = d;
    return x;
}

// A joint "0" at the origin with `degree` rods to random neighbours, random areas and stiffness.
inline Truss random_star(std::mt19937& rng, int dim, int degree) {
    std::uniform_real_distribution<double> u(-1.0, 1.0), pos(0.2, 3.0);
    std::map<std::string, Material> mats;
    std::vector<Joint> joints{{"0", Vector::Zero(dim), false}};
    std::vector<Rod> rods;
    for (int k = 1; k <= degree; ++k) {
        Vector p(dim);
        for (int d = 0; d < dim; ++d) p(d) = u(rng);
        p *= std::sqrt(pos(rng)) / std::max(p.norm(), 1e-3);
        const std::string id = std::to_string(k);
        joints.push_back({id, p, true});
        mats[id] = {id, pos(rng), pos(rng)};
        rods.push_back({"0-" + id, {"0", id}, pos(rng), id});
    }
    return Truss(dim, joints, rods, mats);
}

// Random connected truss: a jittered grid of joints with a spanning chain plus extra rods.
inline Truss random_truss(std::mt19937& rng, int dim, int joints_n, int extra) {
    std::uniform_real_distribution<double> u(-0.3, 0.3), pos(0.5, 2.0);
    std::map<std::string, Material> mats{{"a", {"a", 1.0, 1.0}}, {"b", {"b", 2.5, 0.7}}};
    std::vector<Joint> joints;
    for (int i = 0; i < joints_n; ++i) {
        Vector p(dim);
        p(0) = double(i % 3) + u(rng);
        p(1) = double(i / 3) + u(rng);
        if (dim == 3) p(2) = u(rng);
        joints.push_back({"j" + std::to_string(i), p, false});
    }
    std::vector<Rod> rods;
    std::set<std::pair<int, int>> used;
    auto add = [&](int a, int b) {
        if (a == b || !used.insert({std::min(a, b), std::max(a, b)}).second) return;
        rods.push_back({"r" + std::to_string(rods.size()), {joints[std::size_t(a)].id, joints[std::size_t(b)].id},
                        pos(rng), rods.size() % 2 ? "a" : "b"});
    };
    for (int i = 1; i < joints_n; ++i) add(i - 1, i);
    std::uniform_int_distribution<int> pick(0, joints_n - 1);
    for (int k = 0; k < extra; ++k) add(pick(rng), pick(rng));
    return Truss(dim, joints, rods, mats);
}

} // namespace trussnet::test
