#pragma once

#include "trussnet/errors.hpp"
#include "trussnet/linalg.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

namespace trussnet {

struct Material {
    std::string name;
    double youngs_modulus = 1.0;
    double density = 1.0;
};

struct Joint {
    std::string id;
    Vector position;
    bool anchored = false;
};

struct Rod {
    std::string id;  // empty means "concatenated joint ids"
    std::array<std::string, 2> joints;
    double area = 1.0;
    std::string material;
};

struct RodProperties {
    double length = 0;
    double wave_speed = 0;
    double impedance = 0;
    double line_impedance = 0;
    double transit_time = 0;
    double spring_stiffness = 0;
    double mass = 0;  // rho A L
    Vector unit_vector;  // from joints[0] to joints[1]
};

class Truss {
public:
    Truss(int dimension, std::vector<Joint> joints, std::vector<Rod> rods,
          std::map<std::string, Material> materials, bool dimensionless = false)
        : dim_(dimension),
          joints_(std::move(joints)),
          rods_(std::move(rods)),
          materials_(std::move(materials)),
          dimensionless_(dimensionless) {
        validate();
    }

    int dimension() const { return dim_; }
    bool dimensionless() const { return dimensionless_; }
    const std::vector<Joint>& joints() const { return joints_; }
    const std::vector<Rod>& rods() const { return rods_; }
    const std::map<std::string, Material>& materials() const { return materials_; }
    const std::vector<std::string>& warnings() const { return warnings_; }

    std::size_t joint_count() const { return joints_.size(); }
    std::size_t rod_count() const { return rods_.size(); }

    std::optional<std::size_t> find_joint(std::string_view id) const {
        auto it = joint_index_.find(std::string(id));
        if (it == joint_index_.end()) return std::nullopt;
        return it->second;
    }
    std::size_t joint_index(std::string_view id) const {
        auto i = find_joint(id);
        if (!i) throw ValidationError(std::string(id), "unknown joint '" + std::string(id) + "'");
        return *i;
    }
    std::optional<std::size_t> find_rod(std::string_view id) const {
        auto it = rod_index_.find(std::string(id));
        if (it == rod_index_.end()) return std::nullopt;
        return it->second;
    }
    std::size_t rod_index(std::string_view id) const {
        auto i = find_rod(id);
        if (!i) throw ValidationError(std::string(id), "unknown rod '" + std::string(id) + "'");
        return *i;
    }

    // joint indices of rod r: ends(r)[0] = mu, ends(r)[1] = nu
    const std::array<std::size_t, 2>& ends(std::size_t r) const { return ends_[r]; }
    const RodProperties& properties(std::size_t r) const { return props_[r]; }
    // rod indices incident to joint j, ordered by neighbour id
    const std::vector<std::size_t>& incident(std::size_t j) const { return incident_[j]; }
    std::size_t other_end(std::size_t r, std::size_t j) const {
        return ends_[r][0] == j ? ends_[r][1] : ends_[r][0];
    }

    double total_mass() const {
        double m = 0;
        for (const auto& p : props_) m += p.mass;
        return m;
    }
    double min_transit_time() const {
        double t = props_.front().transit_time;
        for (const auto& p : props_) t = std::min(t, p.transit_time);
        return t;
    }
    std::size_t anchored_count() const {
        std::size_t n = 0;
        for (const auto& j : joints_) n += j.anchored ? 1 : 0;
        return n;
    }

private:
    void validate();

    int dim_;
    std::vector<Joint> joints_;
    std::vector<Rod> rods_;
    std::map<std::string, Material> materials_;
    bool dimensionless_;

    std::unordered_map<std::string, std::size_t> joint_index_;
    std::unordered_map<std::string, std::size_t> rod_index_;
    std::vector<std::array<std::size_t, 2>> ends_;
    std::vector<RodProperties> props_;
    std::vector<std::vector<std::size_t>> incident_;
    std::vector<std::string> warnings_;
};

inline void Truss::validate() {
    if (dim_ != 2 && dim_ != 3) throw ValidationError("dimension", "dimension must be 2 or 3");
    if (rods_.empty()) throw ValidationError("rods", "truss needs at least one rod");

    for (auto& [name, m] : materials_) {
        if (m.name.empty()) m.name = name;
        if (!(m.youngs_modulus > 0) || !std::isfinite(m.youngs_modulus))
            throw ValidationError(name, "material '" + name + "' needs youngs_modulus > 0");
        if (!(m.density > 0) || !std::isfinite(m.density))
            throw ValidationError(name, "material '" + name + "' needs density > 0");
    }

    for (std::size_t i = 0; i < joints_.size(); ++i) {
        const auto& j = joints_[i];
        if (j.id.empty()) throw ValidationError("joint", "joint with empty id");
        if (!joint_index_.emplace(j.id, i).second)
            throw ValidationError(j.id, "duplicate joint id '" + j.id + "'");
        if (j.position.size() != dim_)
            throw ValidationError(j.id, "joint '" + j.id + "' has " + std::to_string(j.position.size()) +
                                            " coordinates, truss dimension is " + std::to_string(dim_));
        if (!j.position.allFinite()) throw ValidationError(j.id, "joint '" + j.id + "' has non-finite position");
    }

    incident_.assign(joints_.size(), {});
    std::map<std::pair<std::size_t, std::size_t>, std::string> pairs;
    for (std::size_t r = 0; r < rods_.size(); ++r) {
        auto& rod = rods_[r];
        if (rod.id.empty()) rod.id = rod.joints[0] + rod.joints[1];
        if (!rod_index_.emplace(rod.id, r).second)
            throw ValidationError(rod.id, "duplicate rod id '" + rod.id + "'");
        auto a = find_joint(rod.joints[0]);
        auto b = find_joint(rod.joints[1]);
        if (!a || !b)
            throw ValidationError(rod.id, "rod '" + rod.id + "' references unknown joint '" +
                                              (a ? rod.joints[1] : rod.joints[0]) + "'");
        if (*a == *b) throw ValidationError(rod.id, "rod '" + rod.id + "' connects a joint to itself");
        auto key = std::minmax(*a, *b);
        auto [it, fresh] = pairs.emplace(key, rod.id);
        if (!fresh)
            throw ValidationError(rod.id, "rod '" + rod.id + "' duplicates rod '" + it->second + "'");
        if (!(rod.area > 0) || !std::isfinite(rod.area))
            throw ValidationError(rod.id, "rod '" + rod.id + "' needs area > 0");

        double e = 1.0, rho = 1.0;
        if (!dimensionless_ || !rod.material.empty()) {
            auto m = materials_.find(rod.material);
            if (m == materials_.end())
                throw ValidationError(rod.id, "rod '" + rod.id + "' uses unknown material '" + rod.material + "'");
            if (!dimensionless_) {
                e = m->second.youngs_modulus;
                rho = m->second.density;
            }
        }

        Vector d = joints_[*b].position - joints_[*a].position;
        const double len = d.norm();
        if (!(len > 0)) throw ValidationError(rod.id, "rod '" + rod.id + "' has zero length");

        RodProperties p;
        p.length = len;
        p.wave_speed = std::sqrt(e / rho);
        p.impedance = std::sqrt(e * rho);
        p.line_impedance = rod.area * p.impedance;
        p.transit_time = len / p.wave_speed;
        p.spring_stiffness = rod.area * e / len;
        p.mass = rho * rod.area * len;
        p.unit_vector = d / len;
        props_.push_back(std::move(p));
        ends_.push_back({*a, *b});
        incident_[*a].push_back(r);
        incident_[*b].push_back(r);
    }

    for (std::size_t j = 0; j < joints_.size(); ++j) {
        auto& inc = incident_[j];
        std::sort(inc.begin(), inc.end(), [&](std::size_t x, std::size_t y) {
            return joints_[other_end(x, j)].id < joints_[other_end(y, j)].id;
        });
        if (inc.empty()) warnings_.push_back("joint '" + joints_[j].id + "' has no rods");
    }

    // connectivity
    std::vector<int> seen(joints_.size(), 0);
    std::vector<std::size_t> stack{0};
    seen[0] = 1;
    while (!stack.empty()) {
        auto j = stack.back();
        stack.pop_back();
        for (auto r : incident_[j]) {
            auto o = other_end(r, j);
            if (!seen[o]) {
                seen[o] = 1;
                stack.push_back(o);
            }
        }
    }
    if (std::find(seen.begin(), seen.end(), 0) != seen.end())
        warnings_.push_back("truss graph is disconnected");
}

inline const RodProperties& rod_properties(const Truss& t, const Rod& rod) {
    return t.properties(t.rod_index(rod.id));
}

// Each rod becomes n equal collinear rods; interior joints are "{rod}#k", sub-rods "{rod}/k".
inline Truss subdivide(const Truss& t, int n) {
    if (n < 1) throw InputError("subdivide needs n >= 1");
    if (n == 1) return t;
    std::vector<Joint> joints = t.joints();
    std::vector<Rod> rods;
    for (std::size_t r = 0; r < t.rod_count(); ++r) {
        const Rod& rod = t.rods()[r];
        const auto& pa = t.joints()[t.ends(r)[0]].position;
        const auto& pb = t.joints()[t.ends(r)[1]].position;
        std::string prev = rod.joints[0];
        for (int k = 1; k <= n; ++k) {
            std::string next;
            if (k < n) {
                next = rod.id + "#" + std::to_string(k);
                const double s = double(k) / n;
                joints.push_back({next, Vector((1.0 - s) * pa + s * pb), false});
            } else {
                next = rod.joints[1];
            }
            rods.push_back({rod.id + "/" + std::to_string(k), {prev, next}, rod.area, rod.material});
            prev = next;
        }
    }
    return Truss(t.dimension(), std::move(joints), std::move(rods), t.materials(), t.dimensionless());
}

enum class Builtin { square, bridge };

inline std::optional<Builtin> parse_builtin(std::string_view name) {
    if (name == "square") return Builtin::square;
    if (name == "bridge") return Builtin::bridge;
    return std::nullopt;
}

inline Truss builtin_structure(Builtin which, double scale = 1.0,
                               Material material = {"unit", 1.0, 1.0}, double area = 1.0) {
    if (!(scale > 0)) throw InputError("scale must be positive");
    auto at = [&](double x, double y) {
        Vector v(2);
        v << scale * x, scale * y;
        return v;
    };
    std::map<std::string, Material> mats{{material.name, material}};
    auto rod = [&](const char* a, const char* b) {
        return Rod{std::string(a) + b, {a, b}, area, material.name};
    };
    if (which == Builtin::square) {
        std::vector<Joint> j{{"1", at(0, 0), false}, {"2", at(1, 0), false},
                             {"3", at(0, 1), false}, {"4", at(1, 1), false}};
        std::vector<Rod> r{rod("1", "2"), rod("1", "3"), rod("2", "4"), rod("3", "4"), rod("2", "3")};
        return Truss(2, std::move(j), std::move(r), std::move(mats));
    }
    const double h = std::sqrt(3.0) / 2.0;
    std::vector<Joint> j{{"1", at(-1.0, 0), true}, {"2", at(-0.5, h), false}, {"3", at(0, 0), false},
                         {"4", at(0.5, h), false}, {"5", at(1.0, 0), true}};
    std::vector<Rod> r{rod("1", "2"), rod("1", "3"), rod("2", "3"), rod("2", "4"),
                       rod("3", "4"), rod("3", "5"), rod("4", "5")};
    return Truss(2, std::move(j), std::move(r), std::move(mats));
}

} // namespace trussnet
