#include "liftchroma/asymptotics.hpp"
#include "liftchroma/coloring.hpp"
#include "liftchroma/errors.hpp"
#include "liftchroma/experiments.hpp"
#include "liftchroma/lattice_tools.hpp"
#include "liftchroma/lift.hpp"
#include "liftchroma/moments_exact.hpp"
#include "liftchroma/stochastic_opt.hpp"
#include "liftchroma/thresholds.hpp"

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <limits>
#include <optional>

using namespace liftchroma;
using nlohmann::json;

namespace {

struct LiftSource {
    std::string graph;
    int n = 0;
    std::uint64_t seed = 0;
    std::string lift_file;
};

void add_lift_options(CLI::App* cmd, LiftSource& src)
{
    cmd->add_option("--graph", src.graph, "Km, petersen, or a graph file")->required();
    cmd->add_option("--n", src.n, "lift size");
    cmd->add_option("--seed", src.seed, "lift seed");
    cmd->add_option("--lift", src.lift_file, "lift JSON written by `sample`");
}

Lift load_lift(const LiftSource& src)
{
    BaseGraph g = graph_from_spec(src.graph);
    if (!src.lift_file.empty()) {
        std::ifstream in(src.lift_file);
        if (!in)
            throw std::runtime_error("cannot open " + src.lift_file);
        return lift_from_json(json::parse(in), g);
    }
    if (src.n < 1)
        throw std::invalid_argument("--n or --lift is required");
    return sample_lift(g, src.n, src.seed);
}

std::string str(const mpq_class& q)
{
    return q.get_str();
}

} // namespace

int main(int argc, char** argv)
{
    CLI::App app{"liftchroma: chromatic numbers of random lifts of regular graphs"};
    app.require_subcommand(1);

    int k_max = 10;
    auto* thresholds = app.add_subcommand("thresholds", "table of u_k, l_k, c_k");
    thresholds->add_option("--k-max", k_max)->check(CLI::Range(3, 100000));

    int d_classify = 3;
    auto* classify_cmd = app.add_subcommand("classify", "chromatic window for degree d");
    classify_cmd->add_option("--d", d_classify)->required()->check(CLI::Range(3, 1000000));

    LiftSource sample_src;
    std::string sample_out;
    auto* sample = app.add_subcommand("sample", "sample a random lift as JSON");
    add_lift_options(sample, sample_src);
    sample->add_option("--out", sample_out, "output file (default stdout)");

    LiftSource chrom_src;
    auto* chromatic = app.add_subcommand("chromatic", "exact chromatic number of a lift");
    add_lift_options(chromatic, chrom_src);

    LiftSource count_src;
    int count_k = 3;
    bool count_equitable = false;
    auto* count = app.add_subcommand("count-colorings", "exact count of proper k-colourings");
    add_lift_options(count, count_src);
    count->add_option("--k", count_k)->required();
    count->add_flag("--equitable", count_equitable, "strongly equitable colourings only");

    std::string me_graph, me_which = "Y";
    int me_n = 0, me_k = 3;
    bool me_brute = false;
    auto* moments = app.add_subcommand("moments-exact", "exact E[X], E[Y], E[Y^2]");
    moments->add_option("--graph", me_graph)->required();
    moments->add_option("--n", me_n)->required();
    moments->add_option("--k", me_k)->required();
    moments->add_option("--which", me_which)->check(CLI::IsMember({"X", "Y", "Y2"}));
    moments->add_flag("--brute", me_brute, "also enumerate every lift");

    std::string sscm_graph;
    int sscm_k = 3, sscm_J = 0;
    auto* sscm = app.add_subcommand("sscm", "lambda_j, delta_j and the C2/C1^2 identity");
    sscm->add_option("--graph", sscm_graph)->required();
    sscm->add_option("--k", sscm_k)->required();
    sscm->add_option("--J", sscm_J, "truncation (0 = automatic)");

    std::string ov_obj = "F", ov_graph = "K4";
    int ov_k = 3, ov_trials = 20;
    std::uint64_t ov_seed = 1;
    MaxOptions ov_opt;
    auto* opt_verify = app.add_subcommand(
        "opt-verify", "worst gap of an inequality over random matrices (an, rect) or of a "
                      "multi-start ascent against the uniform point (f, F, rect_lhs)");
    opt_verify->add_option("--which,--objective", ov_obj)
        ->check(CLI::IsMember({"an", "rect", "f", "F", "f_bstar", "F_A", "rect_lhs"}));
    opt_verify->add_option("--graph", ov_graph, "base graph (f, F)");
    opt_verify->add_option("--k", ov_k, "colours, or columns for rect");
    opt_verify->add_option("--trials", ov_trials);
    opt_verify->add_option("--seed", ov_seed);
    opt_verify->add_option("--q", ov_opt.q, "rows (an, rect)");
    opt_verify->add_option("--c", ov_opt.c, "constant; defaults to 0.99 of the admissible bound");

    std::string tau_graph, tau_gamma, tau_base;
    int tau_k = 3;
    auto* tau = app.add_subcommand("tau", "number of maximal forests");
    tau->add_option("--graph", tau_graph, "constraint graph file");
    tau->add_option("--gamma", tau_gamma, "build the b or a constraint graph instead")
        ->check(CLI::IsMember({"b", "a"}));
    tau->add_option("--base", tau_base, "base graph for --gamma");
    tau->add_option("--k", tau_k);

    std::string lc_which = "EY", lc_graph;
    int lc_k = 3;
    double lc_n = 30;
    auto* laplace = app.add_subcommand("laplace-check", "lattice Laplace estimate vs closed form");
    laplace->add_option("--which", lc_which)->check(CLI::IsMember({"EY", "EY2"}));
    laplace->add_option("--graph", lc_graph)->required();
    laplace->add_option("--k", lc_k);
    laplace->add_option("--n", lc_n);

    std::string camp_config;
    CampaignConfig camp;
    std::vector<int> camp_n;
    std::uint64_t camp_seed = 0;
    auto* campaign = app.add_subcommand("campaign", "Monte Carlo campaign to CSV and JSONL");
    campaign->add_option("--config", camp_config, "JSON config file");
    campaign->add_option("--graph", camp.graph);
    campaign->add_option("--n", camp_n);
    campaign->add_option("--k", camp.k);
    campaign->add_option("--stat", camp.statistics, "Z_j, chi, Y, X, Y*Z_j");
    campaign->add_option("--samples", camp.samples);
    auto* seed_opt = campaign->add_option("--seed", camp_seed);
    campaign->add_option("--threads", camp.threads);
    campaign->add_option("--out", camp.output, "output prefix");
    campaign->add_flag("--timing", camp.timing, "record wall time");

    CLI11_PARSE(app, argc, argv);

    try {
        if (*thresholds) {
            std::printf("k,u_k,l_k,c_k\n");
            for (int k = 3; k <= k_max; ++k)
                std::printf("%d,%.12g,%.12g,%.12g\n", k, u_threshold(k), ell_threshold(k), c_q(k));
        } else if (*classify_cmd) {
            auto w = classify(d_classify);
            json j{{"d", w.d},         {"k", w.k},         {"kind", to_string(w.kind)},
                   {"lower", w.lower}, {"upper", w.upper}, {"chi", w.chi}};
            std::cout << j.dump(2) << '\n';
        } else if (*sample) {
            Lift l = load_lift(sample_src);
            std::string text = lift_to_json(l).dump();
            if (sample_out.empty()) {
                std::cout << text << '\n';
            } else {
                std::ofstream out(sample_out);
                out << text << '\n';
                if (!out)
                    throw std::runtime_error("write failed: " + sample_out);
            }
        } else if (*chromatic) {
            Lift l = load_lift(chrom_src);
            std::cout << chromatic_number(expand(l)) << '\n';
        } else if (*count) {
            Lift l = load_lift(count_src);
            if (count_equitable)
                std::cout << count_strongly_equitable(l, count_k) << '\n';
            else
                std::cout << count_proper_colorings(expand(l), count_k) << '\n';
        } else if (*moments) {
            BaseGraph g = graph_from_spec(me_graph);
            mpq_class v;
            LiftStatistic stat;
            if (me_which == "X") {
                v = expected_X_exact(g, me_n, me_k);
                stat = [&](const Lift& l) { return mpq_class(count_proper_colorings(expand(l), me_k)); };
            } else if (me_which == "Y") {
                v = expected_Y_exact(g, me_n, me_k);
                stat = [&](const Lift& l) { return mpq_class(count_strongly_equitable(l, me_k)); };
            } else {
                v = expected_Y2_exact(g, me_n, me_k);
                stat = [&](const Lift& l) {
                    if (l.n % me_k != 0)
                        return mpq_class(0);
                    mpz_class y = count_strongly_equitable(l, me_k);
                    return mpq_class(y * y);
                };
            }
            json j{{"which", me_which}, {"n", me_n}, {"k", me_k}, {"exact", str(v)}, {"value", v.get_d()}};
            if (me_brute)
                j["brute_force"] = str(brute_force_moment(g, me_n, stat));
            std::cout << j.dump(2) << '\n';
        } else if (*sscm) {
            BaseGraph g = graph_from_spec(sscm_graph);
            auto s = sscm_constants(g, sscm_k, 10);
            json table = json::array();
            for (int j = 1; j <= 10; ++j)
                table.push_back({{"j", j}, {"lambda", s.lambda[j - 1]}, {"delta", s.delta[j - 1]}});
            json out{{"table", table}, {"convergence_ratio", s.convergence_ratio}, {"C1", C1(g, sscm_k)}};
            try {
                auto id = sscm_identity_check(g, sscm_k, sscm_J);
                out["identity"] = {{"lhs", id.lhs},   {"partial", id.partial},
                                   {"gap", id.gap},   {"closed_form", id.closed_form},
                                   {"J", id.J},       {"tail_bound", id.tail_bound}};
            } catch (const divergent_series& e) {
                out["identity"] = e.what();
            }
            try {
                out["C2"] = C2(g, sscm_k);
                out["h"] = h_dk(g, sscm_k);
            } catch (const std::exception& e) {
                out["C2"] = e.what();
            }
            std::cout << out.dump(2) << '\n';
        } else if (*opt_verify) {
            if (ov_obj == "an" || ov_obj == "rect") {
                const bool square = ov_obj == "an";
                const int q = ov_opt.q ? ov_opt.q : (square ? 3 : 4);
                const int cols = square ? q : ov_k;
                const double bound = square ? c_q(q) : (cols - 1.0) / (q - 1.0) * c_q(q);
                const double c = ov_opt.c > 0 ? ov_opt.c : 0.99 * bound;
                Engine eng(ov_seed);
                double worst = std::numeric_limits<double>::infinity();
                Matrix worst_m;
                int violations = 0;
                for (int t = 0; t < ov_trials; ++t) {
                    Matrix m = random_row_stochastic(q, cols, eng);
                    double gap = square ? an_gap(m, c) : rect_gap(m, c);
                    violations += gap < -1e-10;
                    if (gap < worst) {
                        worst = gap;
                        worst_m = m;
                    }
                }
                std::vector<double> flat(worst_m.data(), worst_m.data() + worst_m.size());
                json j{{"which", ov_obj}, {"q", q},           {"k", cols},
                       {"c", c},          {"trials", ov_trials}, {"worst_gap", worst},
                       {"violations", violations}, {"worst_matrix_colmajor", flat}};
                std::cout << j.dump(2) << '\n';
            } else {
                BaseGraph g = graph_from_spec(ov_graph);
                Objective obj = (ov_obj == "F" || ov_obj == "F_A") ? Objective::F_A
                                : (ov_obj == "f" || ov_obj == "f_bstar") ? Objective::f_bstar
                                                                          : Objective::rect_lhs;
                if (obj == Objective::rect_lhs && ov_opt.c <= 0)
                    ov_opt.c = 0.99 * (ov_k - 1.0) / (ov_opt.q - 1.0) * c_q(ov_opt.q);
                auto rep = verify_max_uniform(obj, g, ov_k, ov_trials, ov_seed, ov_opt);
                json j{{"which", ov_obj},
                       {"best_value", rep.best_value},
                       {"uniform_value", rep.uniform_value},
                       {"worst_gap", rep.gap_to_uniform},
                       {"best_distance", rep.best_distance},
                       {"trials", rep.trials},
                       {"best_point", rep.best_point}};
                std::cout << j.dump(2) << '\n';
            }
        } else if (*tau) {
            ConstraintGraph gm;
            if (!tau_gamma.empty()) {
                if (tau_base.empty())
                    throw std::invalid_argument("--gamma needs --base");
                BaseGraph g = graph_from_spec(tau_base);
                gm = tau_gamma == "b" ? build_gamma_b(g, tau_k) : build_gamma_a(g, tau_k);
            } else {
                std::ifstream in(tau_graph);
                if (!in)
                    throw std::runtime_error("cannot open " + tau_graph);
                gm = read_constraint_graph(in);
            }
            std::cout << tau_maximal_forests(gm) << '\n';
        } else if (*laplace) {
            BaseGraph g = graph_from_spec(lc_graph);
            LatticeProblem p = lc_which == "EY" ? ey_problem(g, lc_k) : ey2_problem(g, lc_k);
            auto parts = laplace_parts(p, lc_n);
            int n_int = static_cast<int>(std::lround(lc_n));
            LogValue ref = lc_which == "EY" ? EY_asym(g, n_int, lc_k) : EY2_asym(g, n_int, lc_k);
            json j{{"which", lc_which},
                   {"n", lc_n},
                   {"r", parts.r},
                   {"log_tau", parts.log_tau},
                   {"log_det", parts.log_det},
                   {"log_laplace", parts.estimate.log},
                   {"log_closed_form", ref.log},
                   {"rel_diff", std::expm1(parts.estimate.log - ref.log)}};
            std::cout << j.dump(2) << '\n';
        } else if (*campaign) {
            CampaignConfig c = camp;
            if (!camp_config.empty()) {
                std::ifstream in(camp_config);
                if (!in)
                    throw std::runtime_error("cannot open " + camp_config);
                c = config_from_json(json::parse(in));
                if (!camp.output.empty())
                    c.output = camp.output;
            } else {
                c.n = camp_n;
                if (*seed_opt)
                    c.seed = camp_seed;
            }
            auto recs = run_campaign(c);
            std::cout << csv_header() << '\n';
            for (const auto& r : recs)
                std::cout << to_csv_row(r) << '\n';
        }
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    }
    return 0;
}
