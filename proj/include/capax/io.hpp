#pragma once

#include <capax/balayage.hpp>
#include <capax/capacity.hpp>
#include <capax/convergence.hpp>
#include <capax/geometry.hpp>
#include <capax/kernels.hpp>
#include <capax/measures.hpp>

#include <json.hpp>

#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <string>

namespace capax {

// numeric text I/O uses 17 significant digits so every double round-trips exactly
inline std::string fmt17(double x) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", x);
    return buf;
}

inline nlohmann::json load_json(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::invalid_argument("cannot open " + path);
    nlohmann::json j;
    try {
        in >> j;
    } catch (const nlohmann::json::parse_error& e) {
        throw std::invalid_argument(path + ": " + e.what());
    }
    return j;
}

inline Vector vector_from_json(const nlohmann::json& j, const std::string& what) {
    if (!j.is_array()) throw std::invalid_argument(what + " must be a number array");
    Vector v(j.size());
    for (std::size_t i = 0; i < j.size(); ++i) {
        if (!j[i].is_number()) throw std::invalid_argument(what + " must be a number array");
        v(static_cast<long>(i)) = j[i].get<double>();
    }
    return v;
}

inline Kernel parse_kernel(const nlohmann::json& j) {
    if (!j.is_object() || !j.contains("kind"))
        throw std::invalid_argument("kernel spec needs a \"kind\" field");
    std::string kind = j.at("kind").get<std::string>();
    if (kind == "riesz") return make_riesz(j.at("alpha").get<double>(), j.at("dim").get<int>());
    if (kind == "newtonian") return make_newtonian(j.at("dim").get<int>());
    if (kind == "log") return make_log();
    if (kind == "matrix") {
        const nlohmann::json& rows = j.at("entries");
        if (!rows.is_array() || rows.empty())
            throw std::invalid_argument("matrix kernel needs a nonempty \"entries\" array");
        Matrix K(rows.size(), rows[0].size());
        for (std::size_t i = 0; i < rows.size(); ++i) {
            Vector row = vector_from_json(rows[i], "matrix kernel row");
            if (row.size() != K.cols())
                throw std::invalid_argument("matrix kernel rows have unequal lengths");
            K.row(static_cast<long>(i)) = row.transpose();
        }
        return make_matrix(K);
    }
    throw std::invalid_argument("unknown kernel kind: " + kind);
}

// shape JSON may carry its own "resolution"; returns 0 when absent so the CLI default applies
inline ShapeSpec parse_shape(const nlohmann::json& j, int& resolution) {
    if (!j.is_object() || !j.contains("kind"))
        throw std::invalid_argument("shape spec needs a \"kind\" field");
    ShapeSpec s;
    std::string kind = j.at("kind").get<std::string>();
    if (kind == "ball") {
        s.kind = ShapeSpec::Kind::ball;
        s.center = vector_from_json(j.at("center"), "center");
        s.r = j.at("r").get<double>();
    } else if (kind == "sphere") {
        s.kind = ShapeSpec::Kind::sphere;
        s.center = vector_from_json(j.at("center"), "center");
        s.r = j.at("r").get<double>();
    } else if (kind == "annulus") {
        s.kind = ShapeSpec::Kind::annulus;
        s.center = vector_from_json(j.at("center"), "center");
        s.r_in = j.at("r_in").get<double>();
        s.r_out = j.at("r_out").get<double>();
    } else if (kind == "box") {
        s.kind = ShapeSpec::Kind::box;
        s.lo = vector_from_json(j.at("lo"), "lo");
        s.hi = vector_from_json(j.at("hi"), "hi");
    } else if (kind == "cloud") {
        s.kind = ShapeSpec::Kind::cloud;
        s.path = j.at("path").get<std::string>();
        if (j.contains("dim")) s.dim = j.at("dim").get<int>();
    } else {
        throw std::invalid_argument("unknown shape kind: " + kind);
    }
    resolution = j.contains("resolution") ? j.at("resolution").get<int>() : 0;
    return s;
}

// subsets are a bare index array, {"indices": [...]}, or {"kind": "all"}
inline SubsetMask parse_subset(const nlohmann::json& j, int n) {
    if (j.is_object() && j.contains("kind") && j.at("kind").get<std::string>() == "all")
        return SubsetMask::full(n);
    const nlohmann::json* arr = nullptr;
    if (j.is_array())
        arr = &j;
    else if (j.is_object() && j.contains("indices"))
        arr = &j.at("indices");
    else
        throw std::invalid_argument("subset spec must be an index array or {\"indices\": [...]}");
    std::vector<int> idx;
    for (const auto& e : *arr) {
        if (!e.is_number_integer()) throw std::invalid_argument("subset indices must be integers");
        int i = e.get<int>();
        if (i < 0 || i >= n)
            throw std::invalid_argument("subset index " + std::to_string(i) + " out of range for " +
                                        std::to_string(n) + " nodes");
        idx.push_back(i);
    }
    return SubsetMask(idx);
}

// measure CSV: optional header, then index,weight rows; unlisted nodes get weight 0
inline DiscreteMeasure read_measure_csv(const std::string& path, int n) {
    std::ifstream in(path);
    if (!in) throw std::invalid_argument("cannot open " + path);
    Vector w = Vector::Zero(n);
    std::string line;
    bool first = true;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        for (char& c : line)
            if (c == ',') c = ' ';
        std::istringstream row(line);
        long idx;
        double weight;
        if (!(row >> idx >> weight)) {
            if (first) {
                first = false;
                continue;  // header
            }
            throw std::invalid_argument(path + ": malformed measure row: " + line);
        }
        first = false;
        if (idx < 0 || idx >= n)
            throw std::invalid_argument(path + ": measure index " + std::to_string(idx) +
                                        " out of range");
        w(idx) = weight;
    }
    return DiscreteMeasure(w);
}

inline void write_measure_csv(const std::string& path, const Vector& weights) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write " + path);
    out << "index,weight\n";
    for (long i = 0; i < weights.size(); ++i) out << i << "," << fmt17(weights(i)) << "\n";
}

namespace detail {

inline std::string json_number(double x) {
    if (!std::isfinite(x)) return "null";  // JSON has no inf/nan
    return fmt17(x);
}

}  // namespace detail

// flat result record; written by hand to keep full 17-digit precision in the output text
inline void write_equilibrium_json(const std::string& path, const GramForm& gram,
                                   const SubsetMask& A, const EquilibriumResult& r) {
    Vector phi = gram.K * r.gamma.weights;
    double pot_min = std::numeric_limits<double>::quiet_NaN();
    for (int i : A.indices) pot_min = std::isnan(pot_min) ? phi(i) : std::min(pot_min, phi(i));
    double pot_max = std::numeric_limits<double>::quiet_NaN();
    for (int i : r.gamma.support().indices)
        pot_max = std::isnan(pot_max) ? phi(i) : std::max(pot_max, phi(i));

    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write " + path);
    out << "{\n";
    out << "  \"capacity\": " << detail::json_number(r.capacity) << ",\n";
    out << "  \"robin\": " << detail::json_number(r.robin) << ",\n";
    out << "  \"mass\": " << detail::json_number(r.gamma.mass()) << ",\n";
    out << "  \"energy\": " << detail::json_number(energy(gram, r.gamma)) << ",\n";
    out << "  \"potential_min_on_A\": " << detail::json_number(pot_min) << ",\n";
    out << "  \"potential_max_on_support\": " << detail::json_number(pot_max) << ",\n";
    out << "  \"formulation\": \"" << r.formulation << "\",\n";
    out << "  \"kkt_residual\": " << detail::json_number(r.report.kkt_residual) << "\n";
    out << "}\n";
}

inline nlohmann::json check_report_json(const CheckReport& rep) {
    nlohmann::json j;
    j["pass"] = rep.pass;
    j["checks_run"] = rep.checks_run;
    j["checks_failed"] = rep.checks_failed;
    j["skipped"] = rep.skipped;
    j["worst_violation"] = rep.worst_violation;
    j["failures"] = rep.failures;
    j["notes"] = rep.notes;
    return j;
}

inline nlohmann::json principle_report_json(const PrincipleReport& rep) {
    nlohmann::json j;
    j["pass"] = rep.pass;
    j["trials"] = rep.trials;
    j["vacuous"] = rep.vacuous;
    j["worst_violation"] = rep.worst_violation;
    return j;
}

inline nlohmann::json balayage_result_json(const BalayageResult& r, const GramForm& gram) {
    nlohmann::json j;
    j["formulation"] = r.formulation;
    j["mass"] = r.swept.mass();
    j["energy"] = energy(gram, r.swept);
    j["kkt_residual"] = r.report.kkt_residual;
    j["potential_match_on_A"] = r.diagnostics.potential_match_on_A;
    j["global_dominated"] = r.diagnostics.global_dominated;
    j["mass_ratio"] = r.diagnostics.mass_ratio;
    return j;
}

inline void write_stage_csv(const std::string& path, const ConvergenceReport& rep) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write " + path);
    out << "stage,capacity,mass,energy,max_potential_violation\n";
    for (const StageRow& row : rep.rows)
        out << row.stage << "," << fmt17(row.capacity) << "," << fmt17(row.mass) << ","
            << fmt17(row.energy) << "," << fmt17(row.max_potential_violation) << "\n";
}

}  // namespace capax
