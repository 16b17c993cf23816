// Command-line front end.  Subcommands:
//   gen-data      synthesize a dataset (teacher-labeled or linearly separated)
//   train         run the full training loop and write report/trace/params
//   eval          error rate of a saved parameter file on a dataset
//   oracle-check  per-mask solver value vs the certified dense maximizer
//   sweep         grid over lam0 / M / r_pert, one CSV row per cell
// All options can also come from an INI file passed with --config; options of
// a subcommand live in a section named after it.

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "mildnet/dataset.hpp"
#include "mildnet/generate.hpp"
#include "mildnet/loss.hpp"
#include "mildnet/mask.hpp"
#include "mildnet/network.hpp"
#include "mildnet/oracle.hpp"
#include "mildnet/perturb.hpp"
#include "mildnet/train.hpp"
#include "mildnet/util.hpp"

using namespace mildnet;

namespace {

struct GenArgs {
    std::string out;
    std::string kind = "teacher";
    int d = 10;
    int n = 100;
    double gamma = 0.2;
    int corrupt = 0;
    int r = 0;  // teacher mask width; 0 = full
    int units = 3;
    std::uint64_t seed = 1;
    std::uint64_t teacher_seed = 1;
};

struct TrainArgs {
    std::string data;
    std::string out_dir = ".";
    TrainConfig cfg;
};

struct EvalArgs {
    std::string params;
    std::string data;
};

struct OracleArgs {
    std::string data;
    std::string out;
    std::string params;  // optional; beta = 1 everywhere when absent
    std::string solver = "exhaustive";
    int r = 0;  // 0 = full
    double lam0 = 0.0;
    long long resolution = 1000000;
    int M = 64;
    double r_pert = 0.05;
    std::uint64_t seed = 1;
};

struct SweepArgs {
    std::string data;
    std::string out;
    TrainConfig base;
    std::vector<double> lam0_list{0.0};
    std::vector<int> M_list{64};
    std::vector<double> r_pert_list{0.05};
};

// Training options shared by `train` and `sweep`.
void add_train_options(CLI::App* cmd, TrainConfig& cfg) {
    cmd->add_option("--r", cfg.r, "mask width (0 = full input width)");
    cmd->add_option("--m", cfg.m, "hidden units (0 = (n+1) * mask count)");
    cmd->add_option("--lam0", cfg.lam0, "regularization scale (0 = sqrt(n)*ln(n))");
    cmd->add_option("--C", cfg.C, "declared solver budget (0 = lam0)");
    cmd->add_option("--loss", cfg.loss, "surrogate loss name");
    cmd->add_option("--solver", cfg.solver, "direction solver: auto|exhaustive|random");
    cmd->add_option("--M", cfg.M, "direction pairs for the random solver");
    cmd->add_option("--r-pert", cfg.r_pert, "nudge radius for the random solver");
    cmd->add_option("--init-seed", cfg.init_seed, "seed for parameter initialization");
    cmd->add_option("--solver-seed", cfg.solver_seed, "seed for the random solver");
    cmd->add_option("--eval-cap", cfg.exhaustive_eval_cap,
                    "max grid evaluations per exhaustive call");
    cmd->add_option("--delta", cfg.delta, "confidence level for the diagnostic bounds");
    cmd->add_option("--max-stale-retries", cfg.max_stale_retries,
                    "threshold halvings allowed when every candidate unit is too large");
}

int run_gen(const GenArgs& a) {
    Dataset data;
    if (a.kind == "linear") {
        data = generate_linear_margin_dataset(a.d, a.n, a.gamma, a.seed);
    } else if (a.kind == "teacher") {
        const int r = a.r == 0 ? a.d : a.r;
        const MaskSeries masks = build_mask_series(a.d, r);
        const Teacher teacher = generate_teacher(masks, a.units, a.teacher_seed);
        data = generate_dataset(teacher, masks, a.n, a.gamma, a.corrupt, a.seed);
    } else {
        std::fprintf(stderr, "gen-data: unknown kind '%s' (teacher|linear)\n", a.kind.c_str());
        return 2;
    }
    save_dataset(data, a.out);
    std::printf("wrote %s (+ %s.sidecar.json): n=%d d=%d gamma=%g corrupted=%d\n", a.out.c_str(),
                a.out.c_str(), data.n, data.d, data.gamma, data.corrupt_count);
    return 0;
}

int run_train(const TrainArgs& a) {
    const Dataset data = load_dataset(a.data);
    const TrainResult res = train(data, a.cfg);
    std::filesystem::create_directories(a.out_dir);
    const std::string report_path = a.out_dir + "/report.json";
    const std::string trace_path = a.out_dir + "/trace.csv";
    const std::string params_path = a.out_dir + "/params.json";
    write_report_json(res.report, report_path);
    write_trace_csv(res.report, trace_path);
    save_params(res.params, res.report.config.r, params_path);
    const TrainReport& rep = res.report;
    std::printf("terminated=%s k0=%d K=%d loss %.6g -> %.6g train_error=%.4f [%.2f s]\n",
                rep.terminated ? "yes" : "no", rep.k0, rep.K, rep.initial_loss, rep.final_loss,
                rep.train_error, rep.wall_clock_sec);
    std::printf("wrote %s, %s, %s\n", report_path.c_str(), trace_path.c_str(),
                params_path.c_str());
    return 0;
}

int run_eval(const EvalArgs& a) {
    const LoadedParams loaded = load_params(a.params);
    const Dataset data = load_dataset(a.data);
    const MaskSeries masks = build_mask_series(loaded.params.d, loaded.r);
    const double err = training_error(loaded.params, masks, data);
    const int wrong = static_cast<int>(err * data.n + 0.5);
    std::printf("error_rate=%.6f (%d of %d misclassified, d=%d r=%d m=%d)\n", err, wrong, data.n,
                loaded.params.d, loaded.r, loaded.params.m);
    return 0;
}

int run_oracle_check(const OracleArgs& a) {
    const Dataset data = load_dataset(a.data);
    std::vector<double> beta(static_cast<std::size_t>(data.n), 1.0);
    int r = a.r == 0 ? data.d : a.r;
    if (!a.params.empty()) {
        const LoadedParams loaded = load_params(a.params);
        r = loaded.r;
        const MaskSeries masks = build_mask_series(data.d, r);
        beta = per_sample_derivs(loaded.params, data, masks, logistic_loss());
    }
    const MaskSeries masks = build_mask_series(data.d, r);
    const double lam0 = a.lam0 > 0.0 ? a.lam0 : std::sqrt(static_cast<double>(data.n)) *
                                                    std::log(static_cast<double>(data.n));

    std::ofstream out(a.out);
    if (!out) throw std::runtime_error("cannot open " + a.out + " for writing");
    out << "mask,solver,g,budget,oracle_value,oracle_gap,within_budget\n";
    int consistent = 0;
    for (int s = 0; s < masks.period; ++s) {
        DirectionCandidate cand;
        if (a.solver == "random")
            cand = solve_random_directions(beta, data, masks, a.M, a.r_pert, a.seed);
        else if (a.solver == "exhaustive")
            cand = solve_exhaustive(s, beta, data, masks, lam0);
        else
            throw std::runtime_error("oracle-check: unknown solver '" + a.solver + "'");
        const OracleResult oracle = oracle_max_g(beta, data, masks, s, a.resolution);
        const bool within = !cand.certified || cand.g >= oracle.value - cand.budget;
        if (within) ++consistent;
        out << s << ',' << cand.solver << ',' << fmt_full(cand.g) << ',' << fmt_full(cand.budget)
            << ',' << fmt_full(oracle.value) << ',' << fmt_full(oracle.gap) << ','
            << (within ? 1 : 0) << '\n';
    }
    std::printf("wrote %s: %d/%d masks within the declared budget (lam0=%g)\n", a.out.c_str(),
                consistent, masks.period, lam0);
    return consistent == masks.period ? 0 : 1;
}

int run_sweep(const SweepArgs& a) {
    const Dataset data = load_dataset(a.data);
    std::ofstream out(a.out);
    if (!out) throw std::runtime_error("cannot open " + a.out + " for writing");
    out << "lam0,M,r_pert,terminated,k0,K,final_loss,final_grad_norm,alpha_norm,"
           "train_error,inner_steps,solver_evals,wall_clock_sec\n";
    int cells = 0;
    for (double lam0 : a.lam0_list)
        for (int M : a.M_list)
            for (double r_pert : a.r_pert_list) {
                TrainConfig cfg = a.base;
                cfg.lam0 = lam0;
                cfg.M = M;
                cfg.r_pert = r_pert;
                const TrainResult res = train(data, cfg);
                const TrainReport& rep = res.report;
                out << fmt_full(rep.lam0) << ',' << M << ',' << fmt_full(r_pert) << ','
                    << (rep.terminated ? 1 : 0) << ',' << rep.k0 << ',' << rep.K << ','
                    << fmt_full(rep.final_loss) << ',' << fmt_full(rep.final_grad_norm) << ','
                    << fmt_full(rep.alpha_norm) << ',' << fmt_full(rep.train_error) << ','
                    << rep.bounds.measured_inner_steps << ',' << rep.bounds.measured_solver_evals
                    << ',' << fmt_full(rep.wall_clock_sec) << '\n';
                ++cells;
            }
    std::printf("wrote %s: %d sweep cells\n", a.out.c_str(), cells);
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"one-hidden-layer ReLU training with certified termination"};
    app.require_subcommand(1);
    app.set_config("--config", "", "read options from an INI file ([subcommand] sections)");
    // Let `--config` appear after the subcommand name and let INI sections
    // populate subcommand options.
    const auto cli_defaults = [](CLI::App* cmd) { cmd->configurable()->fallthrough(); };

    GenArgs gen;
    CLI::App* cgen = app.add_subcommand("gen-data", "synthesize a dataset");
    cli_defaults(cgen);
    cgen->add_option("--out", gen.out, "output CSV path")->required();
    cgen->add_option("--kind", gen.kind, "teacher|linear");
    cgen->add_option("--d", gen.d, "input dimension");
    cgen->add_option("--n", gen.n, "sample count");
    cgen->add_option("--gamma", gen.gamma, "margin enforced by rejection");
    cgen->add_option("--corrupt", gen.corrupt, "labels to flip after generation");
    cgen->add_option("--r", gen.r, "teacher mask width (0 = full)");
    cgen->add_option("--units", gen.units, "teacher hidden units");
    cgen->add_option("--seed", gen.seed, "sampling seed");
    cgen->add_option("--teacher-seed", gen.teacher_seed, "teacher seed");

    TrainArgs tr;
    CLI::App* ctrain = app.add_subcommand("train", "run the training loop");
    cli_defaults(ctrain);
    ctrain->add_option("--data", tr.data, "dataset CSV path")->required();
    ctrain->add_option("--out-dir", tr.out_dir, "directory for report/trace/params");
    add_train_options(ctrain, tr.cfg);

    EvalArgs ev;
    CLI::App* ceval = app.add_subcommand("eval", "evaluate saved parameters");
    cli_defaults(ceval);
    ceval->add_option("--params", ev.params, "parameter JSON path")->required();
    ceval->add_option("--data", ev.data, "dataset CSV path")->required();

    OracleArgs oc;
    CLI::App* coracle = app.add_subcommand("oracle-check", "solver vs dense maximizer");
    cli_defaults(coracle);
    coracle->add_option("--data", oc.data, "dataset CSV path")->required();
    coracle->add_option("--out", oc.out, "output CSV path")->required();
    coracle->add_option("--params", oc.params, "optional parameter JSON; sets beta and r");
    coracle->add_option("--solver", oc.solver, "exhaustive|random");
    coracle->add_option("--r", oc.r, "mask width (0 = full; support must be <= 3)");
    coracle->add_option("--lam0", oc.lam0, "solver scale (0 = sqrt(n)*ln(n))");
    coracle->add_option("--resolution", oc.resolution, "dense grid resolution");
    coracle->add_option("--M", oc.M, "direction pairs for the random solver");
    coracle->add_option("--r-pert", oc.r_pert, "nudge radius for the random solver");
    coracle->add_option("--seed", oc.seed, "random-solver seed");

    SweepArgs sw;
    CLI::App* csweep = app.add_subcommand("sweep", "grid over lam0 / M / r_pert");
    cli_defaults(csweep);
    csweep->add_option("--data", sw.data, "dataset CSV path")->required();
    csweep->add_option("--out", sw.out, "output CSV path")->required();
    csweep->add_option("--lam0-list", sw.lam0_list, "lam0 values (0 = default)")
        ->delimiter(',');
    csweep->add_option("--M-list", sw.M_list, "random-solver M values")->delimiter(',');
    csweep->add_option("--r-pert-list", sw.r_pert_list, "nudge radii")->delimiter(',');
    add_train_options(csweep, sw.base);
    // The per-cell options come from the lists, not the base config.
    csweep->remove_option(csweep->get_option_no_throw("--lam0"));
    csweep->remove_option(csweep->get_option_no_throw("--M"));
    csweep->remove_option(csweep->get_option_no_throw("--r-pert"));

    CLI11_PARSE(app, argc, argv);
    try {
        if (cgen->parsed()) return run_gen(gen);
        if (ctrain->parsed()) return run_train(tr);
        if (ceval->parsed()) return run_eval(ev);
        if (coracle->parsed()) return run_oracle_check(oc);
        if (csweep->parsed()) return run_sweep(sw);
    } catch (const std::exception& ex) {
        std::fprintf(stderr, "error: %s\n", ex.what());
        return 1;
    }
    return 2;
}
