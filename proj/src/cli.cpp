#include "hpq/cli.hpp"

#include <CLI11.hpp>
#include <cstdlib>
#include <fstream>
#include <iostream>

#include "hpq/json_io.hpp"
#include "hpq/version.hpp"

namespace hpq::cli {

namespace {

std::uint64_t default_seed() {
    if (const char* env = std::getenv("HPQ_SEED"))
        return std::strtoull(env, nullptr, 10);
    return 0;
}

Json config_stamp(const Json& extra) {
    Json j{{"version", kVersion}};
    for (const auto& [k, v] : extra.items()) j[k] = v;
    return j;
}

void write_csv(const std::string& path, const std::string& header,
               const std::vector<std::string>& rows) {
    std::ofstream out(path);
    if (!out) throw std::invalid_argument("cannot write " + path);
    out << header << '\n';
    for (const auto& r : rows) out << r << '\n';
}

struct FactorArtifacts {
    ConstructionResult construction;
    FactorizationResult result;
    CaponReport capon;
    Json family_json, diagnostics_json, result_json;
};

FactorArtifacts run_factor_pipeline(const OperatorMatrix& op, double p, double q,
                                    const ConstructionParams& params, int norm_budget) {
    FactorArtifacts art;
    art.construction = build(op, params);
    art.result = assemble(op, art.construction.family, p, q, norm_budget, params.seed);
    art.capon = check(from_block_family(art.construction.family));

    const Json config{{"p", p},
                      {"q", q},
                      {"delta", params.delta},
                      {"eta", params.eta_or_default()},
                      {"depth", params.depth},
                      {"steps", params.n_steps},
                      {"seed", params.seed},
                      {"budget", params.sign_budget},
                      {"norm_budget", norm_budget}};
    art.family_json = family_to_json(art.construction.family);
    art.family_json["config"] = config_stamp(config);
    art.diagnostics_json = diagnostics_to_json(art.construction);
    art.diagnostics_json["config"] = config_stamp(config);
    art.result_json = Json{{"type", "factor_result"},
                           {"config", config_stamp(config)},
                           {"residual", art.result.residual},
                           {"norm_r", art.result.norm_r_est},
                           {"norm_s", art.result.norm_s_est},
                           {"norm_product", art.result.norm_product},
                           {"norms_exact", art.result.norms_exact},
                           {"conditioning", art.result.conditioning},
                           {"almost_diag", art.result.almost_diag},
                           {"clean", art.construction.clean()},
                           {"capon", report_to_json(art.capon)}};
    return art;
}

}  // namespace

int run(int argc, const char* const* argv) {
    CLI::App app{"bi-parameter Haar analysis, block bases and factorization"};
    app.require_subcommand(1);

    // norm
    auto* norm_cmd = app.add_subcommand("norm", "mixed norm of an expansion");
    std::string norm_input;
    double norm_p = 2.0, norm_q = 2.0;
    norm_cmd->add_option("--input", norm_input, "expansion JSON")->required();
    norm_cmd->add_option("--p", norm_p, "outer exponent");
    norm_cmd->add_option("--q", norm_q, "inner exponent");

    // gen-op
    auto* gen_cmd = app.add_subcommand("gen-op", "generate a test operator");
    std::string gen_kind = "diagonal-plus-decaying-offdiagonal";
    std::string gen_out;
    int gen_depth = 4;
    std::uint64_t gen_seed = default_seed();
    TestOperatorParams gen_params;
    gen_cmd->add_option("--kind", gen_kind, "pure-diagonal | diagonal-plus-decaying-offdiagonal | diagonal-plus-rank-one");
    gen_cmd->add_option("--depth", gen_depth, "rectangle depth")->required();
    gen_cmd->add_option("--out", gen_out, "output JSON path")->required();
    gen_cmd->add_option("--seed", gen_seed, "rng seed");
    gen_cmd->add_option("--delta", gen_params.delta, "diagonal lower bound");
    gen_cmd->add_option("--spread", gen_params.spread, "diagonal spread");
    gen_cmd->add_option("--epsilon", gen_params.epsilon, "off-diagonal strength");
    gen_cmd->add_option("--coupling-cap", gen_params.coupling_cap,
                        "level-sum cap for off-diagonal couplings");
    gen_cmd->add_option("--mu", gen_params.mu, "rank-one coupling strength");

    // capon-check
    auto* capon_cmd = app.add_subcommand("capon-check", "verify the local product condition");
    std::string capon_input;
    std::string capon_out;
    capon_cmd->add_option("--input", capon_input, "family or structure JSON")->required();
    capon_cmd->add_option("--out", capon_out, "optional report JSON path");

    // build-blocks
    auto* build_cmd = app.add_subcommand("build-blocks", "run the inductive construction");
    std::string build_op, build_out = "blocks";
    ConstructionParams build_params;
    build_cmd->add_option("--op", build_op, "operator JSON")->required();
    build_cmd->add_option("--delta", build_params.delta, "diagonal lower bound")->required();
    build_cmd->add_option("--eta", build_params.eta, "smallness parameter (default delta/9)");
    build_cmd->add_option("--depth", build_params.depth, "construction depth")->required();
    build_cmd->add_option("--steps", build_params.n_steps, "number of blocks")->required();
    build_cmd->add_option("--seed", build_params.seed, "rng seed");
    build_cmd->add_option("--budget", build_params.sign_budget, "sign samples per frequency");
    build_cmd->add_option("--out", build_out, "output prefix");

    // factor
    auto* factor_cmd = app.add_subcommand("factor", "factor the identity through T");
    std::string factor_op, factor_out = "factor";
    double factor_p = 2.0, factor_q = 2.0;
    int factor_norm_budget = 64;
    ConstructionParams factor_params;
    factor_cmd->add_option("--op", factor_op, "operator JSON")->required();
    factor_cmd->add_option("--p", factor_p, "outer exponent");
    factor_cmd->add_option("--q", factor_q, "inner exponent");
    factor_cmd->add_option("--delta", factor_params.delta, "diagonal lower bound");
    factor_cmd->add_option("--eta", factor_params.eta, "smallness parameter (default delta/9)");
    factor_cmd->add_option("--depth", factor_params.depth, "construction depth");
    factor_cmd->add_option("--steps", factor_params.n_steps, "number of blocks");
    factor_cmd->add_option("--seed", factor_params.seed, "rng seed");
    factor_cmd->add_option("--budget", factor_params.sign_budget, "sign samples per frequency");
    factor_cmd->add_option("--norm-budget", factor_norm_budget, "samples for norm estimates");
    factor_cmd->add_option("--out", factor_out, "output prefix");

    // fredholm
    auto* fred_cmd = app.add_subcommand("fredholm", "two-term factorization of a matrix");
    std::string fred_matrix, fred_out;
    fred_cmd->add_option("--matrix", fred_matrix, "matrix JSON {\"rows\":[[...]]}")->required();
    fred_cmd->add_option("--out", fred_out, "optional output JSON path");

    // report
    auto* report_cmd = app.add_subcommand("report", "tabulate run artifacts as CSV");
    std::vector<std::string> report_inputs;
    std::string report_dir = ".";
    report_cmd->add_option("--inputs", report_inputs, "artifact JSON files");
    report_cmd->add_option("--out-dir", report_dir, "output directory for CSV tables");

    try {
        app.parse(argc, const_cast<char**>(argv));
    } catch (const CLI::ParseError& e) {
        return app.exit(e) == 0 ? 0 : 1;
    }

    try {
        if (*norm_cmd) {
            const HaarExpansion e = expansion_from_json(load_json(norm_input));
            const double v = mixed_norm(e, MixedNormParams(norm_p, norm_q));
            std::cout << format_sig(v) << '\n';
            return 0;
        }
        if (*gen_cmd) {
            const TestOperatorKind kind = test_operator_kind_from_string(gen_kind);
            const OperatorMatrix op = gen_test_operator(kind, gen_params, gen_seed, gen_depth);
            Json j = operator_to_json(op);
            j["config"] = config_stamp(Json{{"kind", gen_kind},
                                            {"depth", gen_depth},
                                            {"seed", gen_seed},
                                            {"delta", gen_params.delta},
                                            {"spread", gen_params.spread},
                                            {"epsilon", gen_params.epsilon},
                                            {"coupling_cap", gen_params.coupling_cap},
                                            {"mu", gen_params.mu}});
            save_json(gen_out, j);
            std::cout << "wrote " << gen_out << " (" << op.entry_count() << " entries)\n";
            return 0;
        }
        if (*capon_cmd) {
            const Json j = load_json(capon_input);
            CaponStructure s;
            if (j.contains("blocks"))
                s = from_block_family(family_from_json(j));
            else
                s = structure_from_json(j);
            const CaponReport rep = check(s);
            const Json out = report_to_json(rep);
            if (!capon_out.empty()) save_json(capon_out, out);
            std::cout << out.dump(2) << '\n';
            return rep.ok ? 0 : 1;
        }
        if (*build_cmd) {
            const OperatorMatrix op = operator_from_json(load_json(build_op));
            build_params.validate();
            const ConstructionResult res = build(op, build_params);
            const Json config{{"delta", build_params.delta},
                              {"eta", build_params.eta_or_default()},
                              {"depth", build_params.depth},
                              {"steps", build_params.n_steps},
                              {"seed", build_params.seed},
                              {"budget", build_params.sign_budget}};
            Json fam = family_to_json(res.family);
            fam["config"] = config_stamp(config);
            Json diag = diagnostics_to_json(res);
            diag["config"] = config_stamp(config);
            save_json(build_out + ".family.json", fam);
            save_json(build_out + ".diagnostics.json", diag);
            std::cout << "built " << res.family.size() << " blocks ("
                      << (res.clean() ? "clean" : "relaxed") << ")\n";
            return 0;
        }
        if (*factor_cmd) {
            const OperatorMatrix op = operator_from_json(load_json(factor_op));
            factor_params.validate();
            const FactorArtifacts art = run_factor_pipeline(
                op, factor_p, factor_q, factor_params, factor_norm_budget);
            save_json(factor_out + ".family.json", art.family_json);
            save_json(factor_out + ".diagnostics.json", art.diagnostics_json);
            Json r = operator_to_json(art.result.r);
            Json s = operator_to_json(art.result.s);
            save_json(factor_out + ".R.json", r);
            save_json(factor_out + ".S.json", s);
            save_json(factor_out + ".result.json", art.result_json);
            std::cout << "residual " << format_sig(art.result.residual) << ", norm product "
                      << format_sig(art.result.norm_product) << ", conditioning "
                      << format_sig(art.result.conditioning) << '\n';
            return 0;
        }
        if (*fred_cmd) {
            const Eigen::MatrixXd m = matrix_from_json(load_json(fred_matrix));
            const FredholmFactorization f = fredholm_two_term(m);
            const Json out = fredholm_to_json(f);
            if (!fred_out.empty()) save_json(fred_out, out);
            std::cout << "feasible " << (f.feasible ? "yes" : "no") << ", nullity "
                      << f.nullity << ", rank " << f.rank << ", residual "
                      << format_sig(f.residual) << '\n';
            if (!f.feasible) std::cout << "reason: " << f.reason << '\n';
            return 0;
        }
        if (*report_cmd) {
            std::vector<std::string> residual_rows, normprod_rows, qratio_rows;
            for (const auto& path : report_inputs) {
                const Json j = load_json(path);
                const std::string type = j.value("type", "");
                if (type == "factor_result") {
                    const Json& c = j.at("config");
                    residual_rows.push_back(
                        format_sig(c.at("delta").get<double>()) + "," +
                        format_sig(c.at("eta").get<double>()) + "," +
                        std::to_string(c.at("depth").get<int>()) + "," +
                        std::to_string(c.at("steps").get<int>()) + "," +
                        format_sig(c.at("p").get<double>()) + "," +
                        format_sig(c.at("q").get<double>()) + "," +
                        format_sig(j.at("residual").get<double>()) + "," +
                        format_sig(j.at("norm_product").get<double>()));
                    normprod_rows.push_back(
                        format_sig(c.at("delta").get<double>()) + "," +
                        format_sig(1.0 / c.at("delta").get<double>()) + "," +
                        format_sig(j.at("norm_product").get<double>()));
                } else if (type == "q_ratio") {
                    qratio_rows.push_back(
                        std::to_string(j.at("depth").get<int>()) + "," +
                        format_sig(j.at("max_ratio").get<double>()) + "," +
                        format_sig(j.at("mean_ratio").get<double>()) + "," +
                        std::to_string(j.at("samples").get<int>()));
                }
            }
            write_csv(report_dir + "/residuals.csv",
                      "delta,eta,depth,steps,p,q,residual,norm_product", residual_rows);
            write_csv(report_dir + "/normprod.csv", "delta,inv_delta,norm_product",
                      normprod_rows);
            write_csv(report_dir + "/qratios.csv", "depth,max_ratio,mean_ratio,samples",
                      qratio_rows);
            std::cout << "wrote " << residual_rows.size() << " residual rows, "
                      << normprod_rows.size() << " norm-product rows, "
                      << qratio_rows.size() << " q-ratio rows\n";
            return 0;
        }
    } catch (const PipelineError& e) {
        std::cerr << "pipeline failure: " << e.what() << '\n';
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    }
    return 1;
}

}  // namespace hpq::cli
