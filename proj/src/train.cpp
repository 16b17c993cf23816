#include "mildnet/train.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <fstream>
#include <limits>

#include "json.hpp"
#include "mildnet/rng.hpp"
#include "mildnet/util.hpp"

namespace mildnet {

namespace {

double resolved_lam0(const TrainConfig& cfg, int n) {
    if (cfg.lam0 > 0.0) return cfg.lam0;
    return std::sqrt(static_cast<double>(n)) * std::log(static_cast<double>(n));
}

int ceil_int(double v) {
    return static_cast<int>(std::ceil(v - 1e-12));
}

BoundReport make_bound_report(const TrainReport& rep, const Dataset& data, const NetParams& p,
                              const MaskSeries& masks, const LossSpec& loss) {
    BoundReport b;
    b.delta = rep.config.delta;
    b.gamma = data.gamma;
    b.E = data.corrupt_count;
    b.have_margin = data.gamma > 0.0;

    const std::vector<double> beta = per_sample_derivs(p, data, masks, loss);
    for (double v : beta) b.surrogate_sum += v;

    const double n = static_cast<double>(data.n);
    const double K = static_cast<double>(rep.K);
    const double lam0 = rep.lam0;
    const double C = rep.config.C;
    const double cert = 5.0 * lam0 + C + 2.0 * b.E;
    if (b.have_margin) {
        b.surrogate_bound = cert / b.gamma;
        b.train_error_bound = cert / (loss.deriv_at_zero * b.gamma * n);
        b.train_error_bound_vacuous = b.train_error_bound > 1.0;
        const double mid = (30.0 * lam0 + 6.0 * C + 12.0 * b.E) * std::log(n) /
                               (loss.expbound_a * b.gamma * lam0) +
                           3.0 / (4.0 * std::sqrt(n * K * lam0));
        b.population_bound = b.train_error_bound +
                             mid * 4.0 * std::sqrt(2.0) / (loss.deriv_at_zero * std::sqrt(n)) +
                             std::sqrt(std::log(1.0 / b.delta) / (2.0 * n)) / loss.deriv_at_zero;
    } else {
        b.surrogate_bound = std::numeric_limits<double>::infinity();
        b.train_error_bound = std::numeric_limits<double>::infinity();
        b.population_bound = std::numeric_limits<double>::infinity();
    }

    const double m = static_cast<double>(rep.m);
    const double d = static_cast<double>(rep.d);
    if (rep.config.solver == "random")
        b.complexity_formula = d * K * m * m + static_cast<double>(rep.config.M) * K +
                               n * std::pow(K, 5) / lam0;
    else
        b.complexity_formula = d * K * m * m +
                               d * K * std::pow(n, static_cast<double>(rep.config.r) / 2.0) +
                               n * std::pow(K, 5) / lam0;
    return b;
}

}  // namespace

int outer_budget(double initial_loss, int n) {
    require(initial_loss >= 0.0, "outer_budget: loss must be nonnegative");
    require(n >= 1, "outer_budget: n must be >= 1");
    return std::max(ceil_int(initial_loss), 2 * n);
}

NetParams init_params(const MaskSeries& masks, int m, int n, double lam0, std::uint64_t seed) {
    require(m >= masks.period, "init_params: need at least one unit per mask");
    require(n >= 1, "init_params: n must be >= 1");
    require(lam0 > 0.0, "init_params: lam0 must be positive");
    NetParams p;
    p.d = masks.d;
    p.m = m;
    p.alpha.resize(static_cast<std::size_t>(m));
    p.dirs.assign(static_cast<std::size_t>(m) * masks.d, 0.0);
    const double scale =
        std::min(1.0, std::sqrt(static_cast<double>(n) / (4.0 * static_cast<double>(m) * lam0)));
    Rng rng(seed, "init-dirs");
    for (int j = 0; j < m; ++j) {
        p.alpha[static_cast<std::size_t>(j)] = (j % 2 == 0) ? scale : -scale;
        const int s = masks.mask_of(j);
        rng.unit_vector(p.dir(j) + s, masks.r);
    }
    return p;
}

TrainConfig resolve_config(const TrainConfig& cfg, const Dataset& data) {
    check_dataset(data);
    require(data.n >= 1, "resolve_config: dataset is empty");
    TrainConfig out = cfg;
    out.r = cfg.r == 0 ? data.d : cfg.r;
    require(1 <= out.r && out.r <= data.d, "resolve_config: need 1 <= r <= d");
    const int period = data.d - out.r + 1;
    out.m = cfg.m == 0 ? (data.n + 1) * period : cfg.m;
    require(out.m >= (data.n + 1) * period,
            "resolve_config: need m >= (n+1)*(d-r+1) = " +
                std::to_string((data.n + 1) * period));
    out.lam0 = resolved_lam0(cfg, data.n);
    require(out.lam0 * out.lam0 >= static_cast<double>(data.n) * (1.0 - 1e-12),
            "resolve_config: need lam0 >= sqrt(n)");
    out.C = cfg.C == 0.0 ? out.lam0 : cfg.C;
    require(out.C >= out.lam0 * (1.0 - 1e-12), "resolve_config: need C >= lam0");
    loss_by_name(out.loss);
    if (out.solver == "auto") out.solver = out.r == data.d ? "random" : "exhaustive";
    require(out.solver == "exhaustive" || out.solver == "random",
            "resolve_config: solver must be auto, exhaustive, or random");
    if (out.solver == "random") {
        require(out.r == data.d, "resolve_config: random solver requires r = d");
        require(out.M >= 1, "resolve_config: M must be >= 1");
        require(out.r_pert > 0.0 && out.r_pert < 1.0, "resolve_config: need 0 < r_pert < 1");
    }
    require(out.max_stale_retries >= 0, "resolve_config: max_stale_retries must be >= 0");
    require(out.delta > 0.0 && out.delta < 1.0, "resolve_config: need 0 < delta < 1");
    return out;
}

TrainResult train(const Dataset& data, const TrainConfig& cfg) {
    const auto t_start = std::chrono::steady_clock::now();
    const TrainConfig rc = resolve_config(cfg, data);
    const MaskSeries masks = build_mask_series(data.d, rc.r);
    const LossSpec loss = loss_by_name(rc.loss);

    TrainResult out;
    out.params = init_params(masks, rc.m, data.n, rc.lam0, rc.init_seed);
    CoeffVector lam = make_coeff_vector(rc.m, rc.lam0);

    TrainReport& rep = out.report;
    rep.config = rc;
    rep.n = data.n;
    rep.d = data.d;
    rep.m = rc.m;
    rep.lam0 = rc.lam0;
    rep.data_seed = data.seed;
    rep.initial_loss = empirical_loss(out.params, lam, data, masks, loss);
    rep.K = outer_budget(rep.initial_loss, data.n);
    require_invariant(rep.K >= 1, "outer budget K must be positive");
    rep.alpha_norm_bound = 2.0 * std::sqrt(static_cast<double>(rep.K) / rc.lam0);
    rep.solver_certified = rc.solver == "exhaustive";
    rep.grad_threshold =
        rc.lam0 / (16.0 * rep.K * std::sqrt(static_cast<double>(data.n)));

    double prev_loss_end = std::numeric_limits<double>::infinity();
    for (int k = 0; k < rep.K && !rep.terminated; ++k) {
        OuterRecord rec;
        rec.k = k;

        const auto blocks = build_q_blocks(out.params, data, masks);
        auto updated = update_coefficients(lam, blocks, rep.K);
        lam = std::move(updated.lam);
        rec.coeff = updated.record;
        rec.lam_min = updated.record.lam_min;
        rec.lam_max = updated.record.lam_max;
        ++rep.bounds.measured_coeff_updates;

        double threshold = rep.grad_threshold;
        bool first_attempt = true;
        while (true) {
            GDOptions opt;
            opt.grad_threshold = threshold;
            opt.record_curve = false;
            const GDTrace trace = run_inner_gd(out.params, lam, data, masks, loss, rep.K, opt);
            require_invariant(trace.converged, "inner descent returned without converging");
            rec.inner_T += trace.iterations;
            rep.bounds.measured_inner_steps += trace.iterations;
            if (first_attempt) {
                rec.loss_pre = trace.loss_entry;
                first_attempt = false;
            }
            rec.loss_post = trace.loss_exit;
            rec.grad_norm = trace.grad_norm_exit;
            rec.eta = trace.eta;
            rec.grad_threshold = trace.threshold;
            rec.sign_violations += trace.sign_violations;
            rec.halving_violations += trace.halving_violations;
            rec.monotone_violations += trace.monotone_violations;
            rec.decrease_violations += trace.decrease_violations;
            rec.gd_violations += trace.sign_violations + trace.halving_violations +
                                 trace.monotone_violations + trace.decrease_violations;
            rec.min_grad_sq = trace.min_grad_sq;
            rec.rate_bound =
                trace.iterations > 0
                    ? 144.0 * trace.loss_entry *
                          std::max(trace.loss_entry, 2.0 * static_cast<double>(data.n)) /
                          static_cast<double>(trace.iterations)
                    : std::numeric_limits<double>::infinity();
            require_invariant(rec.min_grad_sq <= rec.rate_bound * (1.0 + 1e-9),
                              "inner descent violated its rate guarantee");

            // Every mask keeps one unit small enough to recycle.
            rec.small_neuron_sq = 0.0;
            for (int s = 0; s < masks.period; ++s) {
                double smallest = std::numeric_limits<double>::infinity();
                for (int j = s; j < rc.m; j += masks.period)
                    smallest = std::min(smallest, out.params.alpha[static_cast<std::size_t>(j)] *
                                                      out.params.alpha[static_cast<std::size_t>(j)]);
                rec.small_neuron_sq += smallest;
            }
            const double sep_scale = 8.0 * rep.K / rc.lam0;
            rec.small_neuron_bound = sep_scale * sep_scale * rec.grad_norm * rec.grad_norm;
            require_invariant(
                rec.small_neuron_sq <= rec.small_neuron_bound * (1.0 + 1e-9) + 1e-15,
                "per-mask small-unit bound violated after descent");

            const std::vector<double> beta = per_sample_derivs(out.params, data, masks, loss);
            std::vector<DirectionCandidate> cands;
            cands.reserve(static_cast<std::size_t>(masks.period));
            for (int s = 0; s < masks.period; ++s) {
                if (rc.solver == "random")
                    cands.push_back(solve_random_directions(beta, data, masks, rc.M, rc.r_pert,
                                                            rc.solver_seed));
                else
                    cands.push_back(solve_exhaustive(s, beta, data, masks, rc.lam0,
                                                     rc.exhaustive_eval_cap));
                rep.bounds.measured_solver_evals += cands.back().evals;
            }
            rec.g_per_mask.clear();
            for (const auto& cand : cands) rec.g_per_mask.push_back(cand.g);

            if (check_termination(cands, rc.lam0)) {
                rep.terminated = true;
                rep.k0 = k;
                rec.perturbed_mask = -1;
                rec.g_value = *std::max_element(rec.g_per_mask.begin(), rec.g_per_mask.end());
                rec.loss_end = rec.loss_post;
                rep.final_g_per_mask = rec.g_per_mask;
                break;
            }

            int best = 0;
            for (int s = 1; s < static_cast<int>(cands.size()); ++s)
                if (cands[static_cast<std::size_t>(s)].g > cands[static_cast<std::size_t>(best)].g)
                    best = s;
            try {
                const PerturbResult pres =
                    perturb_inactive(out.params, lam, cands[static_cast<std::size_t>(best)], data,
                                     masks, loss);
                rec.perturbed_mask = cands[static_cast<std::size_t>(best)].s;
                rec.g_value = cands[static_cast<std::size_t>(best)].g;
                rec.perturb_drop = pres.drop;
                rec.perturb_guarantee = pres.guaranteed_drop;
                rec.loss_end = pres.loss_after;
                break;
            } catch (const stale_gd_error& ex) {
                if (rec.stale_retries >= rc.max_stale_retries)
                    throw stale_gd_error(std::string(ex.what()) + " after " +
                                         std::to_string(rec.stale_retries) + " retries");
                ++rec.stale_retries;
                threshold *= 0.5;
            }
        }

        if (!rep.terminated && std::isfinite(prev_loss_end))
            require_invariant(rec.loss_end <= prev_loss_end - (1.0 - 1e-9),
                              "outer iteration failed to decrease the loss by 1");
        if (rep.terminated && std::isfinite(prev_loss_end))
            require_invariant(rec.loss_end <= prev_loss_end + 1e-9,
                              "terminal iteration increased the loss");
        prev_loss_end = rec.loss_end;
        rep.outer.push_back(std::move(rec));
    }

    if (!rep.terminated)
        throw budget_error("no termination within the outer budget of K=" +
                           std::to_string(rep.K) + " iterations");

    const OuterRecord& last = rep.outer.back();
    rep.final_loss = last.loss_post;
    rep.final_grad_norm = last.grad_norm;
    rep.alpha_norm = norm2(out.params.alpha);
    require_invariant(rep.alpha_norm <= rep.alpha_norm_bound * (1.0 + 1e-9),
                      "final scale norm exceeds 2*sqrt(K/lam0)");
    rep.train_error = training_error(out.params, masks, data);
    rep.bounds = [&] {
        BoundReport b = make_bound_report(rep, data, out.params, masks, loss);
        b.measured_inner_steps = rep.bounds.measured_inner_steps;
        b.measured_solver_evals = rep.bounds.measured_solver_evals;
        b.measured_coeff_updates = rep.bounds.measured_coeff_updates;
        return b;
    }();
    rep.wall_clock_sec =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t_start).count();
    return out;
}

double training_error(const NetParams& p, const MaskSeries& masks, const Dataset& data) {
    check_shapes(p, masks);
    check_dataset(data);
    require(data.n >= 1, "training_error: dataset is empty");
    require(data.d == p.d, "training_error: dimension mismatch");
    int wrong = 0;
    for (int i = 0; i < data.n; ++i) {
        const double f = forward(p, masks, data.x(i));
        // A zero score classifies nothing and counts against either label.
        if (f == 0.0 || (f > 0.0 ? 1 : -1) != data.ys[static_cast<std::size_t>(i)]) ++wrong;
    }
    return static_cast<double>(wrong) / static_cast<double>(data.n);
}

namespace {

nlohmann::ordered_json outer_to_json(const OuterRecord& rec) {
    nlohmann::ordered_json j;
    j["k"] = rec.k;
    j["inner_T"] = rec.inner_T;
    j["loss_pre"] = rec.loss_pre;
    j["loss_post"] = rec.loss_post;
    j["grad_norm"] = rec.grad_norm;
    j["perturbed_mask"] = rec.perturbed_mask;
    j["g_value"] = rec.g_value;
    j["lam_min"] = rec.lam_min;
    j["lam_max"] = rec.lam_max;
    j["coeff"] = {{"monotone", rec.coeff.monotone},
                  {"max_step", rec.coeff.max_step},
                  {"min_span_distance", rec.coeff.min_span_distance},
                  {"unchanged_blocks", rec.coeff.unchanged_blocks},
                  {"decreased_blocks", rec.coeff.decreased_blocks}};
    j["g_per_mask"] = rec.g_per_mask;
    j["perturb_drop"] = rec.perturb_drop;
    j["perturb_guarantee"] = rec.perturb_guarantee;
    j["loss_end"] = rec.loss_end;
    j["stale_retries"] = rec.stale_retries;
    j["eta"] = rec.eta;
    j["grad_threshold"] = rec.grad_threshold;
    j["sign_violations"] = rec.sign_violations;
    j["halving_violations"] = rec.halving_violations;
    j["monotone_violations"] = rec.monotone_violations;
    j["decrease_violations"] = rec.decrease_violations;
    j["gd_violations"] = rec.gd_violations;
    j["min_grad_sq"] = rec.min_grad_sq;
    j["rate_bound"] = rec.rate_bound;
    j["small_neuron_sq"] = rec.small_neuron_sq;
    j["small_neuron_bound"] = rec.small_neuron_bound;
    return j;
}

nlohmann::ordered_json finite_or_null(double v) {
    if (std::isfinite(v)) return v;
    return nullptr;
}

}  // namespace

std::string report_to_json(const TrainReport& rep) {
    nlohmann::ordered_json j;
    j["version"] = rep.version;
    j["config"] = {{"r", rep.config.r},
                   {"m", rep.config.m},
                   {"lam0", rep.config.lam0},
                   {"C", rep.config.C},
                   {"loss", rep.config.loss},
                   {"solver", rep.config.solver},
                   {"M", rep.config.M},
                   {"r_pert", rep.config.r_pert},
                   {"init_seed", rep.config.init_seed},
                   {"solver_seed", rep.config.solver_seed},
                   {"exhaustive_eval_cap", rep.config.exhaustive_eval_cap},
                   {"delta", rep.config.delta},
                   {"max_stale_retries", rep.config.max_stale_retries}};
    j["data"] = {{"n", rep.n}, {"d", rep.d}, {"seed", rep.data_seed}};
    j["m"] = rep.m;
    j["K"] = rep.K;
    j["k0"] = rep.k0;
    j["terminated"] = rep.terminated;
    j["certificates"] = {{"initial_loss", rep.initial_loss},
                         {"final_loss", rep.final_loss},
                         {"final_grad_norm", rep.final_grad_norm},
                         {"grad_threshold", rep.grad_threshold},
                         {"alpha_norm", rep.alpha_norm},
                         {"alpha_norm_bound", rep.alpha_norm_bound},
                         {"five_lam0", 5.0 * rep.lam0},
                         {"budget_C", rep.config.C},
                         {"solver_certified", rep.solver_certified},
                         {"per_mask_g", rep.final_g_per_mask}};
    j["errors"] = {{"train_error", rep.train_error}};
    j["bounds"] = {{"have_margin", rep.bounds.have_margin},
                   {"gamma", rep.bounds.gamma},
                   {"E", rep.bounds.E},
                   {"surrogate_sum", rep.bounds.surrogate_sum},
                   {"surrogate_bound", finite_or_null(rep.bounds.surrogate_bound)},
                   {"train_error_bound", finite_or_null(rep.bounds.train_error_bound)},
                   {"train_error_bound_vacuous", rep.bounds.train_error_bound_vacuous},
                   {"population_bound", finite_or_null(rep.bounds.population_bound)},
                   {"delta", rep.bounds.delta},
                   {"measured_inner_steps", rep.bounds.measured_inner_steps},
                   {"measured_solver_evals", rep.bounds.measured_solver_evals},
                   {"measured_coeff_updates", rep.bounds.measured_coeff_updates},
                   {"complexity_formula", rep.bounds.complexity_formula}};
    nlohmann::ordered_json outer = nlohmann::ordered_json::array();
    for (const auto& rec : rep.outer) outer.push_back(outer_to_json(rec));
    j["outer"] = std::move(outer);
    j["wall_clock_sec"] = rep.wall_clock_sec;
    return j.dump(2) + "\n";
}

void write_report_json(const TrainReport& rep, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot open '" + path + "' for writing");
    out << report_to_json(rep);
}

std::string trace_to_csv(const TrainReport& rep) {
    std::string csv =
        "outer_k,inner_T,loss_pre,loss_post,grad_norm,perturbed_mask,g_value,lam_min,lam_max\n";
    for (const auto& rec : rep.outer) {
        csv += std::to_string(rec.k) + ',' + std::to_string(rec.inner_T) + ',' +
               fmt_full(rec.loss_pre) + ',' + fmt_full(rec.loss_post) + ',' +
               fmt_full(rec.grad_norm) + ',' + std::to_string(rec.perturbed_mask) + ',' +
               fmt_full(rec.g_value) + ',' + fmt_full(rec.lam_min) + ',' +
               fmt_full(rec.lam_max) + '\n';
    }
    return csv;
}

void write_trace_csv(const TrainReport& rep, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot open '" + path + "' for writing");
    out << trace_to_csv(rep);
}

void save_params(const NetParams& p, int r, const std::string& path) {
    nlohmann::ordered_json j;
    j["format"] = "mildnet-params v1";
    j["d"] = p.d;
    j["r"] = r;
    j["m"] = p.m;
    j["alpha"] = p.alpha;
    j["dirs"] = p.dirs;
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot open '" + path + "' for writing");
    out << j.dump(2) << '\n';
}

LoadedParams load_params(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open '" + path + "'");
    const nlohmann::json j = nlohmann::json::parse(in);
    if (j.value("format", "") != std::string("mildnet-params v1"))
        throw parse_error("unrecognized params format", 1);
    LoadedParams lp;
    lp.params.d = j.at("d").get<int>();
    lp.r = j.at("r").get<int>();
    lp.params.m = j.at("m").get<int>();
    lp.params.alpha = j.at("alpha").get<std::vector<double>>();
    lp.params.dirs = j.at("dirs").get<std::vector<double>>();
    check_shapes(lp.params, build_mask_series(lp.params.d, lp.r));
    return lp;
}

}  // namespace mildnet
