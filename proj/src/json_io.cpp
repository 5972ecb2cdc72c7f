#include "hpq/json_io.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>

namespace hpq {

Json rect_to_json(const DyadicRectangle& r) {
    return Json{{"kx", r.x.level}, {"jx", r.x.pos}, {"ky", r.y.level}, {"jy", r.y.pos}};
}

DyadicRectangle rect_from_json(const Json& j) {
    DyadicRectangle r{{j.at("kx").get<int>(), j.at("jx").get<std::int64_t>()},
                      {j.at("ky").get<int>(), j.at("jy").get<std::int64_t>()}};
    if (!r.valid()) throw std::invalid_argument("invalid rectangle in JSON: " + j.dump());
    return r;
}

Json interval_to_json(const DyadicInterval& iv) {
    return Json{{"k", iv.level}, {"j", iv.pos}};
}

DyadicInterval interval_from_json(const Json& j) {
    DyadicInterval iv{j.at("k").get<int>(), j.at("j").get<std::int64_t>()};
    if (!iv.valid()) throw std::invalid_argument("invalid interval in JSON: " + j.dump());
    return iv;
}

Json expansion_to_json(const HaarExpansion& e) {
    Json terms = Json::array();
    for (const auto& [idx, v] : e.coeffs())
        terms.push_back(Json{{"rect", rect_to_json(rectangle_at(idx))}, {"coeff", v}});
    return Json{{"depth", e.depth()}, {"terms", std::move(terms)}};
}

HaarExpansion expansion_from_json(const Json& j) {
    const Json& terms = j.is_array() ? j : j.at("terms");
    int depth = 0;
    if (j.is_object() && j.contains("depth")) {
        depth = j.at("depth").get<int>();
    } else {
        for (const auto& t : terms)
            depth = std::max(depth, rect_from_json(t.at("rect")).max_level());
    }
    HaarExpansion e(depth);
    for (const auto& t : terms)
        e.add(rect_from_json(t.at("rect")), t.at("coeff").get<double>());
    return e;
}

Json operator_to_json(const OperatorMatrix& t) {
    Json entries = Json::array();
    t.for_each_entry([&](OrderingIndex r, OrderingIndex c, double v) {
        entries.push_back(Json{{"row", rect_to_json(rectangle_at(r))},
                               {"col", rect_to_json(rectangle_at(c))},
                               {"value", v}});
    });
    return Json{{"depth", t.depth()}, {"entries", std::move(entries)}};
}

OperatorMatrix operator_from_json(const Json& j) {
    OperatorMatrix t(j.at("depth").get<int>());
    for (const auto& e : j.at("entries"))
        t.add_entry(rect_from_json(e.at("row")), rect_from_json(e.at("col")),
                    e.at("value").get<double>());
    return t;
}

Json family_to_json(const BlockFamily& fam) {
    Json blocks = Json::array();
    for (const auto& [index, members] : fam.blocks()) {
        Json ms = Json::array();
        for (const auto& m : members)
            ms.push_back(Json{{"rect", rect_to_json(m.rect)}, {"weight", m.weight}});
        blocks.push_back(Json{{"index", rect_to_json(index)}, {"members", std::move(ms)}});
    }
    return Json{{"depth", fam.depth()}, {"blocks", std::move(blocks)}};
}

BlockFamily family_from_json(const Json& j) {
    const Json& blocks = j.at("blocks");
    int depth = 0;
    if (j.contains("depth")) {
        depth = j.at("depth").get<int>();
    } else {
        for (const auto& b : blocks) {
            depth = std::max(depth, rect_from_json(b.at("index")).max_level());
            for (const auto& m : b.at("members"))
                depth = std::max(depth, rect_from_json(m.at("rect")).max_level());
        }
    }
    BlockFamily fam(depth);
    for (const auto& b : blocks) {
        std::vector<BlockMember> members;
        for (const auto& m : b.at("members"))
            members.push_back({rect_from_json(m.at("rect")), m.at("weight").get<double>()});
        fam.add_block(rect_from_json(b.at("index")), std::move(members));
    }
    fam.validate();
    return fam;
}

Json structure_to_json(const CaponStructure& s) {
    Json xf = Json::array();
    for (const auto& [i, fam] : s.x_families) {
        Json members = Json::array();
        for (const auto& k : fam) members.push_back(interval_to_json(k));
        xf.push_back(Json{{"interval", interval_to_json(i)}, {"members", std::move(members)}});
    }
    Json yf = Json::array();
    for (const auto& [jk, fam] : s.y_families) {
        Json members = Json::array();
        for (const auto& l : fam) members.push_back(interval_to_json(l));
        yf.push_back(Json{{"j_interval", interval_to_json(jk.first)},
                          {"k_interval", interval_to_json(jk.second)},
                          {"members", std::move(members)}});
    }
    return Json{{"depth", s.depth}, {"x_families", std::move(xf)},
                {"y_families", std::move(yf)}};
}

CaponStructure structure_from_json(const Json& j) {
    CaponStructure s;
    s.depth = j.at("depth").get<int>();
    for (const auto& e : j.at("x_families")) {
        std::vector<DyadicInterval> fam;
        for (const auto& k : e.at("members")) fam.push_back(interval_from_json(k));
        s.x_families[interval_from_json(e.at("interval"))] = std::move(fam);
    }
    for (const auto& e : j.at("y_families")) {
        std::vector<DyadicInterval> fam;
        for (const auto& l : e.at("members")) fam.push_back(interval_from_json(l));
        s.y_families[{interval_from_json(e.at("j_interval")),
                      interval_from_json(e.at("k_interval"))}] = std::move(fam);
    }
    return s;
}

Json report_to_json(const CaponReport& rep) {
    Json violations = Json::array();
    for (const auto& v : rep.violations)
        violations.push_back(Json{{"condition", v.condition}, {"witness", v.witness}});
    return Json{{"ok", rep.ok},
                {"c_x", Json{{"num", rep.c_x.num}, {"den", rep.c_x.den},
                             {"value", rep.c_x.value()}}},
                {"c_y", Json{{"num", rep.c_y.num}, {"den", rep.c_y.den},
                             {"value", rep.c_y.value()}}},
                {"checked_depth", rep.checked_depth},
                {"uncovered_x_cells", rep.uncovered_cells},
                {"violations", std::move(violations)}};
}

Json diagnostics_to_json(const ConstructionResult& res) {
    Json steps = Json::array();
    for (const auto& d : res.steps) {
        steps.push_back(Json{{"index", d.index},
                             {"rect", rect_to_json(d.rect)},
                             {"case", d.case_id},
                             {"m_chosen", d.m_chosen},
                             {"m_min", d.m_min},
                             {"family_size", d.family_size},
                             {"l2_sq", d.l2_sq},
                             {"offdiag_value", d.offdiag_value},
                             {"offdiag_threshold", d.offdiag_threshold},
                             {"x_value", d.x_value},
                             {"x_threshold", d.x_threshold},
                             {"exhaustive", d.exhaustive},
                             {"samples_tried", d.samples_tried},
                             {"diag_ratio", d.diag_ratio},
                             {"diag_ok", d.diag_ok},
                             {"majority_restricted", d.majority_restricted},
                             {"relaxed", d.relaxed},
                             {"relax_reason", d.relax_reason}});
    }
    return Json{{"clean", res.clean()}, {"steps", std::move(steps)}};
}

Json matrix_to_json(const Eigen::MatrixXd& m) {
    Json rows = Json::array();
    for (Eigen::Index i = 0; i < m.rows(); ++i) {
        Json row = Json::array();
        for (Eigen::Index j = 0; j < m.cols(); ++j) row.push_back(m(i, j));
        rows.push_back(std::move(row));
    }
    return Json{{"rows", std::move(rows)}};
}

Eigen::MatrixXd matrix_from_json(const Json& j) {
    const Json& rows = j.is_array() ? j : j.at("rows");
    const Eigen::Index n = static_cast<Eigen::Index>(rows.size());
    if (n == 0) return Eigen::MatrixXd(0, 0);
    const Eigen::Index m = static_cast<Eigen::Index>(rows[0].size());
    Eigen::MatrixXd out(n, m);
    for (Eigen::Index i = 0; i < n; ++i) {
        if (static_cast<Eigen::Index>(rows[static_cast<std::size_t>(i)].size()) != m)
            throw std::invalid_argument("matrix JSON rows have inconsistent lengths");
        for (Eigen::Index k = 0; k < m; ++k)
            out(i, k) = rows[static_cast<std::size_t>(i)][static_cast<std::size_t>(k)]
                            .get<double>();
    }
    return out;
}

Json fredholm_to_json(const FredholmFactorization& f) {
    Json out{{"feasible", f.feasible}, {"dim", f.dim},      {"nullity", f.nullity},
             {"rank", f.rank},         {"residual", f.residual}};
    if (!f.feasible) {
        out["reason"] = f.reason;
        return out;
    }
    out["R1"] = matrix_to_json(f.r1);
    out["R2"] = matrix_to_json(f.r2);
    out["S1"] = matrix_to_json(f.s1);
    out["S2"] = matrix_to_json(f.s2);
    return out;
}

Json load_json(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::invalid_argument("cannot open " + path);
    try {
        return Json::parse(in);
    } catch (const nlohmann::json::parse_error& e) {
        throw std::invalid_argument(path + ": " + e.what());
    }
}

void save_json(const std::string& path, const Json& j) {
    std::ofstream out(path);
    if (!out) throw std::invalid_argument("cannot write " + path);
    out << j.dump(2) << '\n';
}

std::string format_sig(double v) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.12g", v);
    return buf;
}

}  // namespace hpq
