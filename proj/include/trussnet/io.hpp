#pragma once

#include "trussnet/model.hpp"

#include <json.hpp>

#include <fstream>
#include <sstream>

namespace trussnet {

namespace detail {

inline double finite_number(const nlohmann::json& v, const std::string& what) {
    if (!v.is_number()) throw ParseError(what + " must be a number");
    double x = v.get<double>();
    if (!std::isfinite(x)) throw ParseError(what + " must be finite");
    return x;
}

} // namespace detail

inline Truss truss_from_json(const nlohmann::json& doc) {
    using nlohmann::json;
    if (!doc.is_object()) throw ParseError("structure document must be a JSON object");
    try {
        const int dim = doc.at("dimension").get<int>();
        const bool dimensionless = doc.value("dimensionless", false);

        std::map<std::string, Material> mats;
        if (doc.contains("materials")) {
            for (const auto& [name, m] : doc.at("materials").items()) {
                Material mat;
                mat.name = name;
                mat.youngs_modulus = detail::finite_number(m.at("youngs_modulus"), "material " + name + " youngs_modulus");
                mat.density = detail::finite_number(m.at("density"), "material " + name + " density");
                mats.emplace(name, mat);
            }
        }

        std::vector<Joint> joints;
        for (const auto& j : doc.at("joints")) {
            Joint joint;
            joint.id = j.at("id").get<std::string>();
            const auto& pos = j.at("position");
            if (!pos.is_array()) throw ParseError("joint " + joint.id + " position must be an array");
            joint.position.resize(Eigen::Index(pos.size()));
            for (std::size_t i = 0; i < pos.size(); ++i)
                joint.position(Eigen::Index(i)) = detail::finite_number(pos[i], "joint " + joint.id + " position");
            joint.anchored = j.value("anchored", false);
            joints.push_back(std::move(joint));
        }

        std::vector<Rod> rods;
        for (const auto& r : doc.at("rods")) {
            Rod rod;
            const auto& ends = r.at("joints");
            if (!ends.is_array() || ends.size() != 2) throw ParseError("rod joints must be a pair of ids");
            rod.joints = {ends[0].get<std::string>(), ends[1].get<std::string>()};
            rod.id = r.value("id", std::string());
            rod.area = detail::finite_number(r.at("area"), "rod area");
            rod.material = r.value("material", std::string());
            rods.push_back(std::move(rod));
        }
        return Truss(dim, std::move(joints), std::move(rods), std::move(mats), dimensionless);
    } catch (const json::exception& e) {
        throw ParseError(std::string("malformed structure document: ") + e.what());
    }
}

inline Truss load_truss(std::istream& in) {
    nlohmann::json doc;
    try {
        doc = nlohmann::json::parse(in);
    } catch (const nlohmann::json::parse_error& e) {
        throw ParseError(std::string("cannot parse structure document: ") + e.what());
    }
    return truss_from_json(doc);
}

inline Truss load_truss_string(const std::string& text) {
    std::istringstream in(text);
    return load_truss(in);
}

inline Truss load_truss_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw InputError("cannot open " + path);
    return load_truss(in);
}

inline nlohmann::ordered_json truss_to_json(const Truss& t) {
    nlohmann::ordered_json doc;
    doc["dimension"] = t.dimension();
    doc["dimensionless"] = t.dimensionless();
    doc["materials"] = nlohmann::ordered_json::object();
    for (const auto& [name, m] : t.materials())
        doc["materials"][name] = {{"youngs_modulus", m.youngs_modulus}, {"density", m.density}};
    doc["joints"] = nlohmann::ordered_json::array();
    for (const auto& j : t.joints()) {
        std::vector<double> p(j.position.data(), j.position.data() + j.position.size());
        doc["joints"].push_back({{"id", j.id}, {"position", p}, {"anchored", j.anchored}});
    }
    doc["rods"] = nlohmann::ordered_json::array();
    for (const auto& r : t.rods()) {
        nlohmann::ordered_json rod{{"id", r.id}, {"joints", {r.joints[0], r.joints[1]}}, {"area", r.area}};
        if (!r.material.empty()) rod["material"] = r.material;
        doc["rods"].push_back(rod);
    }
    return doc;
}

inline std::string write_truss(const Truss& t) { return truss_to_json(t).dump(2) + "\n"; }

} // namespace trussnet
