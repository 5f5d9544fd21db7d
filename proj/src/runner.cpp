#include "gamebsde/runner.hpp"

#include "gamebsde/errors.hpp"
#include "gamebsde/evaluations.hpp"
#include "gamebsde/game.hpp"
#include "gamebsde/io.hpp"
#include "gamebsde/reflected.hpp"

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <random>
#include <sstream>

namespace gbsde {

using nlohmann::json;

namespace {

template <typename T>
T get_or(const json& obj, const char* key, T fallback) {
    if (!obj.is_object() || !obj.contains(key))
        return fallback;
    try {
        return obj.at(key).get<T>();
    } catch (const json::exception& e) {
        throw ConfigError(std::string("field '") + key + "': " + e.what());
    }
}

Vec to_vec(const json& arr, const char* what) {
    if (!arr.is_array())
        throw ConfigError(std::string(what) + " must be an array");
    Vec v(static_cast<Index>(arr.size()));
    for (std::size_t i = 0; i < arr.size(); ++i) {
        if (!arr[i].is_number())
            throw ConfigError(std::string(what) + " must contain numbers");
        v(static_cast<Index>(i)) = arr[i].get<double>();
    }
    return v;
}

GridConfig parse_grids(const json& g, int dim) {
    GridConfig cfg = GridConfig::uniform(dim, 3.0, 0.5, true);
    cfg.beta_resolution = 4;
    if (!g.is_object())
        return cfg;
    if (g.contains("alpha_half_width")) {
        const double hw = get_or<double>(g, "alpha_half_width", 3.0);
        cfg.alpha_lo = Vec::Constant(dim + 1, -hw);
        cfg.alpha_hi = Vec::Constant(dim + 1, hw);
    }
    if (g.contains("alpha_lo"))
        cfg.alpha_lo = to_vec(g.at("alpha_lo"), "grids.alpha_lo");
    if (g.contains("alpha_hi"))
        cfg.alpha_hi = to_vec(g.at("alpha_hi"), "grids.alpha_hi");
    cfg.alpha_step = get_or<double>(g, "alpha_step", cfg.alpha_step);
    cfg.beta_resolution = get_or<int>(g, "beta_resolution", cfg.beta_resolution);
    cfg.adaptive = get_or<bool>(g, "adaptive", cfg.adaptive);
    try {
        cfg.validate(dim);
    } catch (const InvalidArgument& e) {
        throw ConfigError(std::string("grids: ") + e.what());
    }
    return cfg;
}

double grid_spacing(const GridConfig& g) {
    return std::max(g.alpha_step, 1.0 / g.beta_resolution);
}

struct Setup {
    Lattice lat;
    GeneratorSpec gen;
    BSDEProblem problem;
};

Setup make_setup(const ExperimentConfig& cfg) {
    Lattice lat = Lattice::build(cfg.horizon, cfg.steps, cfg.dim);
    GeneratorSpec gen = catalog(cfg.generator, cfg.generator_params, cfg.dim);
    const int level = cfg.terminal_level();
    NodeField xi;
    if (cfg.terminal == "bt")
        xi = terminals::bt(lat, level);
    else if (cfg.terminal == "bt_squared")
        xi = terminals::bt_squared(lat, level);
    else if (cfg.terminal == "call")
        xi = terminals::call(lat, level, cfg.terminal_strike);
    else if (cfg.terminal == "put")
        xi = terminals::put(lat, level, cfg.terminal_strike);
    else {
        xi = NodeField{level, Vec(static_cast<Index>(cfg.terminal_values.size()))};
        for (std::size_t i = 0; i < cfg.terminal_values.size(); ++i)
            xi.values(static_cast<Index>(i)) = cfg.terminal_values[i];
        lat.check_field(xi);
    }
    BSDEProblem p{gen, xi, std::nullopt};
    if (cfg.obstacle == "linear")
        p.obstacle = obstacles::linear(lat, level, cfg.obstacle_a, cfg.obstacle_b);
    else if (cfg.obstacle == "put_payoff")
        p.obstacle = obstacles::put_payoff(lat, level, cfg.obstacle_strike);
    return {lat, gen, p};
}

json vec_json(const Vec& v) {
    json arr = json::array();
    for (Index i = 0; i < v.size(); ++i)
        arr.push_back(v(i));
    return arr;
}

json skorokhod_json(const SkorokhodReport& r) {
    return {{"complementarity", r.complementarity},
            {"min_increment", r.min_increment},
            {"min_excess", r.min_excess},
            {"terminal_error", r.terminal_error}};
}

void finish(RunOutcome& out, bool pass) {
    out.summary["pass"] = pass;
    out.code = pass ? ExitCode::ok : ExitCode::tolerance_failure;
}

RunOutcome run_lemma_check(const ExperimentConfig& cfg, const Setup& s) {
    RunOutcome out;
    const ControlGrids grids = ControlGrids::resolve(cfg.grids, cfg.dim);
    std::mt19937_64 rng(cfg.seed);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    std::ostringstream csv;
    csv << "sample,t";
    for (int i = 1; i <= cfg.dim + 1; ++i)
        csv << ",x_" << i;
    csv << ",f,minmax,error,tolerance\n";
    double worst = 0.0;
    double worst_excess = -std::numeric_limits<double>::infinity();
    const double h = grid_spacing(cfg.grids);
    for (int i = 0; i < cfg.samples; ++i) {
        const double t = cfg.horizon * unit(rng);
        Vec x(cfg.dim + 1);
        for (int j = 0; j <= cfg.dim; ++j)
            x(j) = cfg.grids.alpha_lo(j) + (cfg.grids.alpha_hi(j) - cfg.grids.alpha_lo(j)) * unit(rng);
        const double f = s.gen.at_point(t, x);
        const double mm = minmax_eval_detail(s.gen, t, x, grids).value;
        const double err = std::abs(mm - f);
        const double tol = cfg.grids.adaptive ? cfg.tol.identity : 2.0 * s.gen.c_rep * h * (1.0 + x.norm());
        worst = std::max(worst, err);
        worst_excess = std::max(worst_excess, err - tol);
        csv << i << ',' << format_double(t);
        for (int j = 0; j <= cfg.dim; ++j)
            csv << ',' << format_double(x(j));
        csv << ',' << format_double(f) << ',' << format_double(mm) << ',' << format_double(err) << ','
            << format_double(tol) << '\n';
    }
    out.csv = csv.str();
    out.summary["values"] = {{"samples", cfg.samples}};
    out.summary["gaps"] = {{"max_identity_error", worst}};
    out.summary["violations"] = {{"max_excess_over_tolerance", std::max(0.0, worst_excess)}};
    finish(out, worst_excess <= 0.0);
    return out;
}

RunOutcome run_solve(const ExperimentConfig&, const Setup& s) {
    RunOutcome out;
    if (s.problem.reflected()) {
        const SolutionField sol = solve_rbsde(s.problem, s.lat);
        const SkorokhodReport rep = skorokhod_report(sol, s.problem);
        out.csv = solution_csv(sol, s.lat.dim());
        out.summary["values"] = {{"root", sol.root()}, {"warnings", sol.warnings}};
        out.summary["gaps"] = json::object();
        out.summary["violations"] = skorokhod_json(rep);
        finish(out, rep.pass());
    } else {
        const SolutionField sol = solve_bsde(s.problem, s.lat);
        const double terminal = (sol.y.back().values - s.problem.terminal.values).cwiseAbs().maxCoeff();
        out.csv = solution_csv(sol, s.lat.dim());
        out.summary["values"] = {{"root", sol.root()}, {"warnings", sol.warnings}};
        out.summary["gaps"] = json::object();
        out.summary["violations"] = {{"terminal_error", terminal}};
        finish(out, terminal == 0.0);
    }
    return out;
}

RunOutcome run_dual(const ExperimentConfig& cfg, const Setup& s) {
    RunOutcome out;
    const int level = cfg.level_s;
    const int last = s.problem.terminal.level;
    const ControlPolicy ctrl = ControlPolicy::random(s.lat, last, cfg.alpha_half_width, cfg.seed);
    const SolutionField lin = solve_linear_bsde(ctrl, s.problem, s.lat, s.gen.c_rep);
    const NodeField dual = dual_expectation(ctrl, s.problem, s.lat, level, s.gen.c_rep);
    const Vec& y = lin.y.at(static_cast<std::size_t>(level)).values;
    const double gap = (y - dual.values).cwiseAbs().maxCoeff();
    std::ostringstream csv;
    csv << "level,node_index,y_linear,y_dual,abs_gap\n";
    for (Index n = 0; n < y.size(); ++n)
        csv << level << ',' << n << ',' << format_double(y(n)) << ',' << format_double(dual.values(n)) << ','
            << format_double(std::abs(y(n) - dual.values(n))) << '\n';
    out.csv = csv.str();
    out.summary["values"] = {{"level", level}, {"root_linear", lin.root()}};
    out.summary["gaps"] = {{"duality", gap}};
    out.summary["violations"] = json::object();
    finish(out, gap <= cfg.tol.duality);
    return out;
}

json root_controls(const GameResult& g) {
    if (g.policy.alpha.empty())
        return json::object();
    return {{"alpha", vec_json(g.policy.alpha[0].row(0).transpose())},
            {"beta", vec_json(g.policy.beta[0].row(0).transpose())}};
}

RunOutcome run_game(const ExperimentConfig& cfg, const Setup& s) {
    RunOutcome out;
    if (s.problem.reflected())
        throw ConfigError("game takes an unreflected problem; use reflected-game");
    const GameResult g = game_dpp_value(s.problem, s.lat, cfg.grids, GameOptions{cfg.infsup});
    const SolutionField primal = solve_bsde(s.problem, s.lat);
    const double tol = cfg.grids.adaptive ? cfg.tol.gap
                                          : uniform_grid_envelope(primal, s.lat, s.gen.c_rep, grid_spacing(cfg.grids));
    bool pass = g.gap_to_primal <= tol;
    out.csv = solution_csv(g.solution, s.lat.dim());
    out.summary["values"] = {{"root", g.root()}, {"primal_root", primal.root()}, {"root_controls", root_controls(g)}};
    out.summary["gaps"] = {{"gap_to_primal", g.gap_to_primal}, {"tolerance", tol}};
    out.summary["violations"] = json::object();
    if (g.infsup_gap)
        out.summary["gaps"]["infsup_diagnostic"] = *g.infsup_gap;
    if (cfg.open_loop) {
        const GridConfig ol = cfg.open_loop_grids.value_or(cfg.grids);
        const NodeField brute = open_loop_bruteforce(s.problem, s.lat, ol, cfg.level_s);
        GridConfig same = ol;
        same.adaptive = false;
        const GameResult dpp = game_backward_pass(s.problem, s.lat, same);
        const double gap = (brute.values - dpp.value(cfg.level_s).values).cwiseAbs().maxCoeff();
        out.summary["gaps"]["open_loop_vs_dpp"] = gap;
        out.summary["values"]["open_loop"] = vec_json(brute.values);
        pass = pass && gap <= cfg.tol.gap;
    }
    finish(out, pass);
    return out;
}

RunOutcome run_reflected_game(const ExperimentConfig& cfg, const Setup& s) {
    RunOutcome out;
    if (!s.problem.reflected())
        throw ConfigError("reflected-game needs an obstacle");
    const GameResult g = mixed_game_dpp(s.problem, s.lat, cfg.grids, GameOptions{cfg.infsup});
    const SolutionField primal = solve_rbsde(s.problem, s.lat);
    const SkorokhodReport game_rep = skorokhod_report(g.solution, s.problem);
    const SkorokhodReport primal_rep = skorokhod_report(primal, s.problem);
    const double tol = cfg.grids.adaptive ? cfg.tol.gap
                                          : uniform_grid_envelope(primal, s.lat, s.gen.c_rep, grid_spacing(cfg.grids));
    out.csv = solution_csv(g.solution, s.lat.dim(), &*g.stopping);
    out.summary["values"] = {{"root", g.root()},
                             {"primal_root", primal.root()},
                             {"stopping_region_size", g.stopping->region_size()},
                             {"root_controls", root_controls(g)}};
    out.summary["gaps"] = {{"gap_to_primal", g.gap_to_primal}, {"tolerance", tol}};
    if (g.infsup_gap)
        out.summary["gaps"]["infsup_diagnostic"] = *g.infsup_gap;
    out.summary["violations"] = {{"game", skorokhod_json(game_rep)}, {"primal", skorokhod_json(primal_rep)}};
    finish(out, g.gap_to_primal <= tol && game_rep.pass() && primal_rep.pass());
    return out;
}

RunOutcome run_axioms(const ExperimentConfig& cfg, const Setup& s) {
    RunOutcome out;
    const EvaluationOperator op{s.gen, s.lat};
    const AxiomReport ax = check_axioms(op, cfg.samples, cfg.seed);
    const double mu = cfg.domination_mu.value_or(s.gen.c_l1);
    const GeneratorSpec gen = s.gen;
    const Vec origin = Vec::Zero(cfg.dim);
    const DominationReport dom =
        check_domination(op, mu, [gen, origin](double t) { return gen(t, 0.0, origin); }, cfg.samples, cfg.seed);
    const int t = s.problem.terminal.level;
    const NodeField ev = evaluate(op, cfg.level_s, t, s.problem.terminal);
    const NodeField dual = dual_representation(op, cfg.level_s, t, s.problem.terminal, cfg.grids);
    const double dual_gap = (ev.values - dual.values).cwiseAbs().maxCoeff();
    const double dual_tol = cfg.grids.adaptive ? cfg.tol.axioms : std::numeric_limits<double>::infinity();

    std::ostringstream csv;
    csv << "check,max_violation\n";
    csv << "A1_monotonicity," << format_double(ax.monotonicity) << '\n';
    csv << "A2_identity," << format_double(ax.identity) << '\n';
    csv << "A3_recursivity," << format_double(ax.recursivity) << '\n';
    csv << "A4_locality," << format_double(ax.locality) << '\n';
    csv << "domination_increment," << format_double(dom.increment) << '\n';
    csv << "domination_lower," << format_double(dom.lower) << '\n';
    csv << "domination_upper," << format_double(dom.upper) << '\n';
    csv << "dual_representation," << format_double(dual_gap) << '\n';
    out.csv = csv.str();
    out.summary["values"] = {{"samples", cfg.samples},
                             {"seed", cfg.seed},
                             {"mu", mu},
                             {"lipschitz_estimate", dom.lipschitz_estimate},
                             {"comparison_step_ok", ax.step_ok}};
    out.summary["gaps"] = {{"dual_representation", dual_gap}};
    out.summary["violations"] = {{"A1", ax.monotonicity},          {"A2", ax.identity},
                                 {"A3", ax.recursivity},           {"A4", ax.locality},
                                 {"domination_increment", dom.increment}, {"domination_lower", dom.lower},
                                 {"domination_upper", dom.upper}};
    finish(out, ax.pass(cfg.tol.axioms) && dom.pass(cfg.tol.axioms) && dual_gap <= dual_tol);
    return out;
}

RunOutcome run_concave(const ExperimentConfig& cfg, const Setup& s) {
    RunOutcome out;
    if (!s.gen.concave)
        throw ConfigError("concave needs a generator flagged concave");
    const ConcaveSettings& c = cfg.concave;
    Vec lo(cfg.dim + 1), hi(cfg.dim + 1), step(cfg.dim + 1);
    lo(0) = c.beta1_lo;
    hi(0) = c.beta1_hi;
    step(0) = c.beta1_step;
    lo.tail(cfg.dim).setConstant(-c.beta2_half_width);
    hi.tail(cfg.dim).setConstant(c.beta2_half_width);
    step.tail(cfg.dim).setConstant(c.beta2_step);
    const FenchelDual dual = make_fenchel_dual(s.gen, 0.0, box_points(lo, hi, step), c.sup);
    if (dual.size() == 0)
        throw ConfigError("concave: no candidate beta has a finite conjugate");
    const ConcaveResult conc = concave_inf_solve(s.problem, s.lat, dual);
    const SolutionField primal = solve_bsde(s.problem, s.lat);
    const GameResult game = game_dpp_value(s.problem, s.lat, cfg.grids);

    double max_y = 0.0;
    double max_z = 0.0;
    for (int k = 0; k < primal.terminal_level(); ++k) {
        max_y = std::max(max_y, cond_expect(primal.y[static_cast<std::size_t>(k) + 1], s.lat).values.cwiseAbs().maxCoeff());
        max_z = std::max(max_z, primal.z[static_cast<std::size_t>(k)].values.rowwise().norm().maxCoeff());
    }
    const double horizon = s.lat.time(primal.terminal_level());
    const double conc_tol = (c.beta2_step * (1.0 + max_z) + c.beta1_step * max_y) * horizon;
    const double conc_gap = max_gap(conc.solution, primal);
    const double game_tol = cfg.grids.adaptive ? cfg.tol.gap
                                               : uniform_grid_envelope(primal, s.lat, s.gen.c_rep, grid_spacing(cfg.grids));

    std::ostringstream csv;
    csv << "level,node_index,y_concave,y_primal,y_game\n";
    for (int k = 0; k <= primal.terminal_level(); ++k) {
        const auto kk = static_cast<std::size_t>(k);
        for (Index n = 0; n < primal.y[kk].values.size(); ++n)
            csv << k << ',' << n << ',' << format_double(conc.solution.y[kk].values(n)) << ','
                << format_double(primal.y[kk].values(n)) << ',' << format_double(game.solution.y[kk].values(n)) << '\n';
    }
    out.csv = csv.str();
    out.summary["values"] = {{"root_concave", conc.solution.root()},
                             {"root_primal", primal.root()},
                             {"root_game", game.root()},
                             {"dual_domain_size", dual.size()}};
    out.summary["gaps"] = {{"concave_vs_primal", conc_gap},
                           {"concave_tolerance", conc_tol},
                           {"game_vs_primal", game.gap_to_primal},
                           {"game_tolerance", game_tol}};
    out.summary["violations"] = json::object();
    finish(out, conc_gap <= conc_tol && game.gap_to_primal <= game_tol);
    return out;
}

} // namespace

ExperimentConfig parse_config(const std::string& subcommand, const json& doc) {
    if (std::find(subcommands().begin(), subcommands().end(), subcommand) == subcommands().end())
        throw ConfigError("unknown subcommand '" + subcommand + "'");
    if (!doc.is_object())
        throw ConfigError("config must be a JSON object");
    ExperimentConfig cfg;
    cfg.subcommand = subcommand;
    cfg.raw = doc;

    const json lat = doc.value("lattice", json::object());
    cfg.horizon = get_or<double>(lat, "T", cfg.horizon);
    cfg.steps = get_or<int>(lat, "N", cfg.steps);
    cfg.dim = get_or<int>(lat, "d", cfg.dim);
    if (!(cfg.horizon > 0.0) || cfg.steps < 1 || cfg.dim < 1 || cfg.dim > 3)
        throw ConfigError("lattice: need T > 0, N >= 1, 1 <= d <= 3");

    const json gen = doc.value("generator", json::object());
    cfg.generator = get_or<std::string>(gen, "name", cfg.generator);
    const auto& names = generators::catalog_names();
    if (std::find(names.begin(), names.end(), cfg.generator) == names.end() || cfg.generator == "custom")
        throw ConfigError("generator: unknown or non-configurable name '" + cfg.generator + "'");
    cfg.generator_params.c = get_or<double>(gen, "c", 0.0);
    cfg.generator_params.a = get_or<double>(gen, "a", 0.0);
    cfg.generator_params.b1 = get_or<double>(gen, "b1", 0.0);
    cfg.generator_params.mu = get_or<double>(gen, "mu", 0.0);
    if (gen.contains("b2")) {
        const json& b2 = gen.at("b2");
        cfg.generator_params.b2 = b2.is_number() ? Vec::Constant(cfg.dim, b2.get<double>()) : to_vec(b2, "generator.b2");
        if (cfg.generator_params.b2.size() != cfg.dim)
            throw ConfigError("generator.b2 must have length d");
    }
    if (gen.contains("c_rep"))
        cfg.generator_params.c_rep = get_or<double>(gen, "c_rep", 0.0);
    if (cfg.generator_params.mu < 0.0)
        throw ConfigError("generator.mu must be non-negative");

    const json lv = doc.value("levels", json::object());
    cfg.level_s = get_or<int>(lv, "s", 0);
    cfg.level_t = get_or<int>(lv, "t", -1);
    if (cfg.terminal_level() > cfg.steps || cfg.level_s < 0 || cfg.level_s > cfg.terminal_level())
        throw ConfigError("levels: need 0 <= s <= t <= N");

    const json term = doc.value("terminal", json::object());
    cfg.terminal = get_or<std::string>(term, "name", cfg.terminal);
    cfg.terminal_strike = get_or<double>(term, "K", 1.0);
    if (cfg.terminal == "custom") {
        if (!term.contains("values"))
            throw ConfigError("terminal.custom needs a 'values' table");
        const Vec v = to_vec(term.at("values"), "terminal.values");
        cfg.terminal_values.assign(v.data(), v.data() + v.size());
    } else if (cfg.terminal != "bt" && cfg.terminal != "bt_squared" && cfg.terminal != "call" && cfg.terminal != "put") {
        throw ConfigError("terminal: unknown name '" + cfg.terminal + "'");
    }

    const json obs = doc.value("obstacle", json::object());
    cfg.obstacle = get_or<std::string>(obs, "name", cfg.obstacle);
    cfg.obstacle_a = get_or<double>(obs, "a", 0.0);
    cfg.obstacle_b = get_or<double>(obs, "b", 0.0);
    cfg.obstacle_strike = get_or<double>(obs, "K", 1.0);
    if (cfg.obstacle != "none" && cfg.obstacle != "linear" && cfg.obstacle != "put_payoff")
        throw ConfigError("obstacle: unknown name '" + cfg.obstacle + "'");

    cfg.grids = parse_grids(doc.value("grids", json::object()), cfg.dim);
    cfg.seed = get_or<std::uint64_t>(doc, "seed", 0);
    cfg.samples = get_or<int>(doc, "samples", cfg.samples);
    if (cfg.samples < 1)
        throw ConfigError("samples must be >= 1");

    const json dual = doc.value("dual", json::object());
    cfg.alpha_half_width = get_or<double>(dual, "alpha_half_width", cfg.alpha_half_width);

    const json game = doc.value("game", json::object());
    cfg.infsup = get_or<bool>(game, "infsup", false);
    cfg.open_loop = get_or<bool>(game, "open_loop", false);
    if (game.contains("open_loop_grids"))
        cfg.open_loop_grids = parse_grids(game.at("open_loop_grids"), cfg.dim);

    const json dom = doc.value("domination", json::object());
    if (dom.contains("mu"))
        cfg.domination_mu = get_or<double>(dom, "mu", 0.0);

    const json conc = doc.value("concave", json::object());
    cfg.concave.beta1_lo = get_or<double>(conc, "beta1_lo", cfg.concave.beta1_lo);
    cfg.concave.beta1_hi = get_or<double>(conc, "beta1_hi", cfg.concave.beta1_hi);
    cfg.concave.beta1_step = get_or<double>(conc, "beta1_step", cfg.concave.beta1_step);
    cfg.concave.beta2_half_width = get_or<double>(conc, "beta2_half_width", cfg.concave.beta2_half_width);
    cfg.concave.beta2_step = get_or<double>(conc, "beta2_step", cfg.concave.beta2_step);
    cfg.concave.sup.half_width = get_or<double>(conc, "sup_half_width", cfg.concave.sup.half_width);
    cfg.concave.sup.step = get_or<double>(conc, "sup_step", cfg.concave.sup.step);

    const json tol = doc.value("tolerances", json::object());
    cfg.tol.identity = get_or<double>(tol, "identity", cfg.tol.identity);
    cfg.tol.duality = get_or<double>(tol, "duality", cfg.tol.duality);
    cfg.tol.gap = get_or<double>(tol, "gap", cfg.tol.gap);
    cfg.tol.axioms = get_or<double>(tol, "axioms", cfg.tol.axioms);
    return cfg;
}

RunOutcome run(const ExperimentConfig& cfg) {
    RunOutcome out;
    try {
        const Setup s = make_setup(cfg);
        if (cfg.subcommand == "lemma-check")
            out = run_lemma_check(cfg, s);
        else if (cfg.subcommand == "solve")
            out = run_solve(cfg, s);
        else if (cfg.subcommand == "dual")
            out = run_dual(cfg, s);
        else if (cfg.subcommand == "game")
            out = run_game(cfg, s);
        else if (cfg.subcommand == "reflected-game")
            out = run_reflected_game(cfg, s);
        else if (cfg.subcommand == "axioms")
            out = run_axioms(cfg, s);
        else if (cfg.subcommand == "concave")
            out = run_concave(cfg, s);
        else
            throw ConfigError("unknown subcommand '" + cfg.subcommand + "'");
    } catch (const PositivityViolation& e) {
        out = {ExitCode::guard, e.what(), "", json::object()};
    } catch (const BudgetExceeded& e) {
        out = {ExitCode::guard, e.what(), "", json::object()};
    } catch (const ObstacleViolation& e) {
        out = {ExitCode::guard, e.what(), "", json::object()};
    } catch (const ConfigError& e) {
        out = {ExitCode::config_error, e.what(), "", json::object()};
    } catch (const Error& e) {
        out = {ExitCode::config_error, e.what(), "", json::object()};
    }
    out.summary["subcommand"] = cfg.subcommand;
    out.summary["params"] = cfg.raw;
    if (!out.summary.contains("pass"))
        out.summary["pass"] = false;
    if (!out.message.empty())
        out.summary["error"] = out.message;
    for (const char* key : {"values", "gaps", "violations"})
        if (!out.summary.contains(key))
            out.summary[key] = json::object();
    return out;
}

int run_cli(const std::string& subcommand, const std::string& config_path, const std::string& out_dir,
            std::optional<std::uint64_t> seed_override) {
    ExperimentConfig cfg;
    try {
        std::ifstream in(config_path);
        if (!in)
            throw ConfigError("cannot open config '" + config_path + "'");
        json doc;
        try {
            doc = json::parse(in);
        } catch (const json::parse_error& e) {
            throw ConfigError(std::string("config parse error: ") + e.what());
        }
        cfg = parse_config(subcommand, doc);
    } catch (const ConfigError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return static_cast<int>(ExitCode::config_error);
    }
    if (seed_override)
        cfg.seed = *seed_override;

    const RunOutcome out = run(cfg);
    std::filesystem::create_directories(out_dir);
    const std::filesystem::path base = std::filesystem::path(out_dir) / subcommand;
    if (!out.csv.empty()) {
        std::ofstream csv(base.string() + ".csv", std::ios::binary);
        csv << out.csv;
    }
    std::ofstream js(base.string() + ".json", std::ios::binary);
    js << out.summary.dump(2) << '\n';

    if (out.code != ExitCode::ok) {
        if (!out.message.empty())
            std::cerr << "error: " << out.message << '\n';
        else
            std::cerr << subcommand << ": tolerance check failed\n";
    } else {
        std::cout << subcommand << ": pass\n";
    }
    return static_cast<int>(out.code);
}

} // namespace gbsde
