#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "hpq/capon.hpp"
#include "hpq/factorize.hpp"
#include "hpq/json_io.hpp"
#include "hpq/version.hpp"

namespace py = pybind11;
using namespace hpq;

namespace {

using RectTuple = std::tuple<int, std::int64_t, int, std::int64_t>;

DyadicRectangle rect_of(const RectTuple& t) {
    const DyadicRectangle r{{std::get<0>(t), std::get<1>(t)},
                            {std::get<2>(t), std::get<3>(t)}};
    if (!r.valid()) throw std::invalid_argument("invalid rectangle " + r.str());
    return r;
}

RectTuple tuple_of(const DyadicRectangle& r) {
    return {r.x.level, r.x.pos, r.y.level, r.y.pos};
}

HaarExpansion expansion_of(const std::vector<std::pair<RectTuple, double>>& terms,
                           int depth) {
    int d = depth;
    if (d < 0)
        for (const auto& [rt, c] : terms) d = std::max(d, rect_of(rt).max_level());
    HaarExpansion e(std::max(d, 0));
    for (const auto& [rt, c] : terms) e.add(rect_of(rt), c);
    return e;
}

py::dict capon_dict(const CaponReport& rep) {
    py::dict out;
    out["ok"] = rep.ok;
    out["c_x"] = rep.c_x.value();
    out["c_y"] = rep.c_y.value();
    out["c_x_is_one"] = rep.c_x.is_one();
    out["c_y_is_one"] = rep.c_y.is_one();
    py::list violations;
    for (const auto& v : rep.violations)
        violations.append(py::make_tuple(v.condition, v.witness));
    out["violations"] = violations;
    out["checked_depth"] = rep.checked_depth;
    return out;
}

}  // namespace

PYBIND11_MODULE(_hpq, m) {
    m.doc() = "bi-parameter Haar analysis, block bases and factorization";
    m.attr("__version__") = kVersion;

    m.def("ordering_index",
          [](int kx, std::int64_t jx, int ky, std::int64_t jy) {
              return ordering_index(rect_of({kx, jx, ky, jy}));
          },
          py::arg("kx"), py::arg("jx"), py::arg("ky"), py::arg("jy"),
          "linear ordering index of a dyadic rectangle");
    m.def("rectangle_at",
          [](std::uint64_t n) { return tuple_of(rectangle_at(n)); }, py::arg("n"),
          "inverse of ordering_index, returns (kx, jx, ky, jy)");
    m.def("rectangle_count", &rectangle_count, py::arg("depth"));

    m.def("mixed_norm",
          [](const std::vector<std::pair<RectTuple, double>>& terms, double p, double q,
             int depth) { return mixed_norm(expansion_of(terms, depth), {p, q}); },
          py::arg("terms"), py::arg("p") = 2.0, py::arg("q") = 2.0, py::arg("depth") = -1,
          "mixed norm of a Haar expansion given as [((kx,jx,ky,jy), coeff), ...]");

    py::class_<OperatorMatrix>(m, "Operator")
        .def_property_readonly("depth", &OperatorMatrix::depth)
        .def_property_readonly("entries", &OperatorMatrix::entry_count)
        .def("delta", [](const OperatorMatrix& t) { return diagonal_delta(t).delta; })
        .def("norm_l2", &exact_l2_norm)
        .def("to_json", [](const OperatorMatrix& t) { return operator_to_json(t).dump(); })
        .def_static("from_json", [](const std::string& s) {
            return operator_from_json(Json::parse(s));
        });

    m.def("gen_test_operator",
          [](const std::string& kind, int depth, std::uint64_t seed, double delta,
             double spread, double epsilon, int coupling_cap, double mu) {
              return gen_test_operator(test_operator_kind_from_string(kind),
                                       {delta, spread, epsilon, coupling_cap, mu}, seed,
                                       depth);
          },
          py::arg("kind"), py::arg("depth"), py::arg("seed") = 0, py::arg("delta") = 0.8,
          py::arg("spread") = 0.1, py::arg("epsilon") = 0.05, py::arg("coupling_cap") = 6,
          py::arg("mu") = 1.0);

    py::class_<BlockFamily>(m, "BlockFamily")
        .def_property_readonly("depth", &BlockFamily::depth)
        .def("__len__", &BlockFamily::size)
        .def("to_json", [](const BlockFamily& f) { return family_to_json(f).dump(); })
        .def_static("from_json", [](const std::string& s) {
            return family_from_json(Json::parse(s));
        })
        .def("capon_check", [](const BlockFamily& f) {
            return capon_dict(check(from_block_family(f)));
        });

    m.def("build_blocks",
          [](const OperatorMatrix& t, double delta, double eta, int depth, int steps,
             std::uint64_t seed, int budget) {
              ConstructionParams params{delta, eta, depth, steps, budget, seed};
              ConstructionResult res = build(t, params);
              py::dict diag;
              diag["clean"] = res.clean();
              py::list steps_out;
              for (const auto& d : res.steps) {
                  py::dict s;
                  s["index"] = d.index;
                  s["m"] = d.m_chosen;
                  s["size"] = d.family_size;
                  s["diag_ratio"] = d.diag_ratio;
                  s["relaxed"] = d.relaxed;
                  steps_out.append(s);
              }
              diag["steps"] = steps_out;
              return py::make_tuple(res.family, diag);
          },
          py::arg("op"), py::arg("delta"), py::arg("eta") = 0.0, py::arg("depth") = 6,
          py::arg("steps") = 9, py::arg("seed") = 0, py::arg("budget") = 4096);

    m.def("factor",
          [](const OperatorMatrix& t, const BlockFamily& fam, double p, double q,
             int norm_budget, std::uint64_t seed) {
              const FactorizationResult f = assemble(t, fam, p, q, norm_budget, seed);
              py::dict out;
              out["residual"] = f.residual;
              out["norm_product"] = f.norm_product;
              out["conditioning"] = f.conditioning;
              out["almost_diag"] = f.almost_diag;
              return out;
          },
          py::arg("op"), py::arg("family"), py::arg("p") = 2.0, py::arg("q") = 2.0,
          py::arg("norm_budget") = 32, py::arg("seed") = 0);

    m.def("capon_check_json",
          [](const std::string& s) {
              const Json j = Json::parse(s);
              CaponStructure st = j.contains("blocks")
                                      ? from_block_family(family_from_json(j))
                                      : structure_from_json(j);
              return capon_dict(check(st));
          },
          py::arg("json_text"));

    m.def("fredholm",
          [](const Eigen::MatrixXd& t) {
              const FredholmFactorization f = fredholm_two_term(t);
              py::dict out;
              out["feasible"] = f.feasible;
              out["nullity"] = f.nullity;
              out["rank"] = f.rank;
              out["residual"] = f.residual;
              if (!f.feasible) {
                  out["reason"] = f.reason;
              } else {
                  out["R1"] = f.r1;
                  out["R2"] = f.r2;
                  out["S1"] = f.s1;
                  out["S2"] = f.s2;
              }
              return out;
          },
          py::arg("matrix"), "two-term factorization I = S1 T R1 + S2 T R2");
}
