#include "hirota/report.hpp"

#include <sstream>

namespace hirota {

Json report_header(std::uint64_t seed, const VerdictConfig& cfg) {
    Json j;
    j["tool_version"] = kToolVersion;
    j["seed"] = seed;
    j["config"] = {{"points", cfg.n_points},
                   {"triples", cfg.n_triples},
                   {"integrable_tol", cfg.integrable_tol},
                   {"not_integrable_tol", cfg.not_integrable_tol},
                   {"degeneracy_floor", cfg.degeneracy_floor},
                   {"delta_floor", cfg.delta_floor}};
    return j;
}

Json to_json(const Verdict& v) {
    Json j;
    j["status"] = to_string(v.status);
    j["max_relative_residual"] = v.max_relative_residual;
    j["points_tested"] = v.points_tested;
    if (!v.note.empty()) j["note"] = v.note;
    Json pts = Json::array();
    for (const auto& d : v.diagnostics) {
        pts.push_back({{"base", d.base},
                       {"delta", d.delta},
                       {"max_relative_residual", d.max_relative_residual},
                       {"thirds_match_relative", d.thirds_match_relative},
                       {"solve_rank", d.solve_rank}});
    }
    j["points"] = pts;
    return j;
}

Json to_json(const SymmetryResult& r) {
    return Json{{"dimension", r.dimension},
                {"rank", r.rank},
                {"threshold_stable", r.threshold_stable}};
}

Json to_json(const GeometryReport& g) {
    Json j;
    j["max_det_identity_residual"] = g.max_det_identity_residual;
    j["max_apolarity_residual"] = g.max_apolarity_residual;
    j["max_second_relation_residual"] = g.max_second_relation_residual;
    j["max_tangent_vanishing_residual"] = g.max_tangent_vanishing_residual;
    j["flat_hankel_residual"] = g.flat_hankel_residual;
    j["flat_quadric_residual"] = g.flat_quadric_residual;
    Json pts = Json::array();
    for (const auto& p : g.points) {
        pts.push_back({{"base", p.base},
                       {"delta", p.delta},
                       {"det_identity_residual", p.det_identity_residual},
                       {"apolarity_residual", p.apolarity_residual},
                       {"second_relation_residual", p.second_relation_residual},
                       {"tangent_vanishing_residual", p.tangent_vanishing_residual},
                       {"q_condition", p.q_condition}});
    }
    j["points"] = pts;
    return j;
}

Json to_json(const EntryAnalysis& a) {
    Json j;
    j["name"] = a.name;
    j["pass"] = a.pass;
    if (a.checked_verdict) {
        j["verdict"] = to_json(a.verdict);
        j["verdict_ok"] = a.verdict_ok;
    }
    if (a.checked_symmetry) {
        j["symmetry"] = to_json(a.symmetry);
        j["symmetry_ok"] = a.symmetry_ok;
    }
    if (!a.message.empty()) j["message"] = a.message;
    return j;
}

namespace {

void render_plain(const Json& j, const std::string& prefix, std::ostream& out) {
    if (j.is_object()) {
        for (const auto& [k, v] : j.items()) {
            if (v.is_object() || v.is_array()) {
                out << prefix << k << ":\n";
                render_plain(v, prefix + "  ", out);
            } else {
                out << prefix << k << " = " << v.dump() << "\n";
            }
        }
    } else if (j.is_array()) {
        bool scalars = true;
        for (const auto& v : j)
            if (v.is_object() || v.is_array()) scalars = false;
        if (scalars) {
            out << prefix << j.dump() << "\n";
            return;
        }
        int i = 0;
        for (const auto& v : j) {
            out << prefix << "- [" << i++ << "]\n";
            render_plain(v, prefix + "  ", out);
        }
    } else {
        out << prefix << j.dump() << "\n";
    }
}

}  // namespace

std::string render_report(const Json& j, bool as_json) {
    if (as_json) return j.dump(2) + "\n";
    std::ostringstream out;
    render_plain(j, "", out);
    return out.str();
}

}  // namespace hirota
