#include <cmath>
#include <cstdint>
#include <fstream>
#include <iostream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"

#include "betasurv/baselines.hpp"
#include "betasurv/csvio.hpp"
#include "betasurv/evalkit.hpp"
#include "betasurv/model_gbrt.hpp"
#include "betasurv/model_linear.hpp"
#include "betasurv/ranking.hpp"
#include "betasurv/sbg.hpp"
#include "betasurv/serialize.hpp"
#include "betasurv/simgen.hpp"

namespace {

using namespace betasurv;
using nlohmann::json;

// Flag combinations and config-file problems that CLI11 cannot catch itself;
// mapped to exit code 2 like its own parse errors.
class UsageError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

struct SimulateArgs {
    std::string generator;
    std::size_t n = 0;
    std::int64_t horizon = 1;
    std::uint64_t seed = 0;
    std::string out;
    double alpha = 1.0;
    double beta = 1.0;
    double homogeneity = 0.0;
    double noise = 0.05;
};

struct TrainArgs {
    std::string model;
    std::string data;
    std::string out_model;
    std::string config_path;
    std::int64_t horizon = 0;  // logistic labeling horizon; 0 = not given
    std::uint64_t seed = 0;
    int threads = 1;
    bool deterministic = false;
    double censored_weight = 1.0;
    // direct hyperparameter flags; config-file values fill the gaps
    double l2 = 0.0;
    double lr = 0.0;
    int epochs = 0;
    int rounds = 0;
    int depth = 0;
    bool l2_set = false, lr_set = false, epochs_set = false, rounds_set = false, depth_set = false;
};

struct PredictArgs {
    std::string model;
    std::string data;
    std::string ids_column;
    std::int64_t horizon = 1;
    std::string out;
};

struct RankArgs {
    std::string model;
    std::string data;
    std::string ids_column;
    std::int64_t horizon = 1;
    std::string out;
};

struct EvalArgs {
    std::vector<std::string> models;
    std::string data;
    std::string horizons;
    std::string out;
};

json read_config_json(const std::string& path) {
    if (path.empty()) return json::object();
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open config file: " + path);
    std::ostringstream buf;
    buf << in.rdbuf();
    try {
        json j = json::parse(buf.str());
        if (!j.is_object()) throw UsageError("config file must hold a JSON object");
        return j;
    } catch (const json::parse_error& e) {
        throw UsageError("config file is not valid JSON: " + std::string(e.what()));
    }
}

template <typename T>
void take_key(json& j, const char* key, T& out) {
    if (j.contains(key)) {
        try {
            out = j.at(key).get<T>();
        } catch (const json::exception&) {
            throw UsageError(std::string("config key '") + key + "' has the wrong type");
        }
        j.erase(key);
    }
}

void reject_leftover_keys(const json& j, const std::string& model) {
    if (j.empty()) return;
    std::string keys;
    for (const auto& item : j.items()) {
        if (!keys.empty()) keys += ", ";
        keys += item.key();
    }
    throw UsageError("config keys not understood by model '" + model + "': " + keys);
}

int run_simulate(const SimulateArgs& a) {
    Dataset ds;
    if (a.generator == "table1") {
        ds = gen_table1_mixture(a.n, a.horizon, a.seed);
    } else if (a.generator == "sweep") {
        ds = gen_heterogeneity_sweep(a.n, a.homogeneity, a.noise, a.horizon, a.seed);
    } else {
        ds.rows = gen_beta_geometric(BetaParams(a.alpha, a.beta), a.n, a.horizon, a.seed);
    }
    write_dataset_csv(a.out, ds);
    std::size_t censored = 0;
    for (const Observation& o : ds.rows) censored += o.censored;
    const double frac = ds.rows.empty() ? 0.0 : static_cast<double>(censored) / ds.rows.size();
    std::cout << "rows=" << ds.rows.size() << " censored_fraction=" << format_double(frac)
              << " out=" << a.out << "\n";
    return 0;
}

int run_train(const TrainArgs& a) {
    json cfg = read_config_json(a.config_path);
    const bool is_logistic = a.model == "logistic";
    if (is_logistic && a.horizon < 1) {
        throw UsageError("--model logistic requires --horizon (labeling horizon)");
    }
    if (!is_logistic && a.horizon != 0) {
        throw UsageError("--horizon applies to --model logistic only");
    }

    LoadedDataset ld = read_dataset_csv(a.data, nullptr, "", a.censored_weight);
    if (ld.data.rows.empty()) throw std::invalid_argument(a.data + ": no data rows");
    if (ld.missing_cells > 0 && a.model != "betalogistic-gbrt") {
        std::cout << "note: " << ld.missing_cells
                  << " missing feature cells; only the boosted model accepts missing values\n";
    }

    ModelFile mf;
    mf.encoder = ld.encoder;
    double final_loss = 0.0;
    int iterations = 0;
    std::string converged = "yes";

    if (a.model == "betalogistic-linear") {
        FitConfig fc;
        take_key(cfg, "learning_rate", fc.learning_rate);
        take_key(cfg, "max_epochs", fc.max_epochs);
        take_key(cfg, "l2_penalty", fc.l2_penalty);
        take_key(cfg, "gradient_tolerance", fc.gradient_tolerance);
        take_key(cfg, "batch_size", fc.batch_size);
        take_key(cfg, "use_newton", fc.use_newton);
        reject_leftover_keys(cfg, a.model);
        if (a.l2_set) fc.l2_penalty = a.l2;
        if (a.lr_set) fc.learning_rate = a.lr;
        if (a.epochs_set) fc.max_epochs = a.epochs;
        fc.seed = a.seed;
        fc.threads = a.threads;
        LinearFit fit = fit_linear(ld.data.rows, fc, ld.data.feature_names);
        final_loss = fit.report.epoch_losses.empty() ? 0.0 : fit.report.epoch_losses.back();
        iterations = fit.report.epochs;
        converged = fit.report.converged ? "yes" : "no";
        mf.model = std::move(fit.model);
    } else if (a.model == "betalogistic-gbrt") {
        GbrtConfig gc;
        take_key(cfg, "rounds", gc.rounds);
        take_key(cfg, "learning_rate", gc.learning_rate);
        take_key(cfg, "max_depth", gc.max_depth);
        take_key(cfg, "min_leaf_rows", gc.min_leaf_rows);
        take_key(cfg, "l2_leaf", gc.l2_leaf);
        reject_leftover_keys(cfg, a.model);
        if (a.lr_set) gc.learning_rate = a.lr;
        if (a.rounds_set) gc.rounds = a.rounds;
        if (a.depth_set) gc.max_depth = a.depth;
        gc.seed = a.seed;
        gc.threads = a.threads;
        GbrtFit fit = fit_gbrt(ld.data.rows, gc, ld.data.feature_names);
        final_loss = fit.round_losses.back();
        iterations = static_cast<int>(fit.round_losses.size()) - 1;
        mf.model = std::move(fit.model);
    } else if (is_logistic) {
        LogisticConfig lc;
        take_key(cfg, "l2_penalty", lc.l2_penalty);
        take_key(cfg, "gradient_tolerance", lc.gradient_tolerance);
        take_key(cfg, "max_iterations", lc.max_iterations);
        reject_leftover_keys(cfg, a.model);
        if (a.l2_set) lc.l2_penalty = a.l2;
        lc.threads = a.threads;
        LogisticModel model = fit_logistic_at_horizon(ld.data.rows, a.horizon, lc);
        final_loss = logistic_neg_log_likelihood(model, ld.data.rows);
        iterations = model.fit_iterations;
        model.feature_names = ld.data.feature_names;
        mf.model = std::move(model);
    } else {
        GeometricConfig gc;
        take_key(cfg, "l2_penalty", gc.l2_penalty);
        take_key(cfg, "gradient_tolerance", gc.gradient_tolerance);
        take_key(cfg, "max_iterations", gc.max_iterations);
        reject_leftover_keys(cfg, a.model);
        if (a.l2_set) gc.l2_penalty = a.l2;
        gc.threads = a.threads;
        GeometricModel model = fit_geometric_pointestimate(ld.data.rows, gc);
        final_loss = geometric_neg_log_likelihood(model, ld.data.rows);
        iterations = model.fit_iterations;
        model.feature_names = ld.data.feature_names;
        mf.model = std::move(model);
    }

    save_model_file(mf, a.out_model);
    std::cout << "model=" << a.model << " final_loss=" << format_double(final_loss)
              << " iterations=" << iterations << " converged=" << converged << " out="
              << a.out_model << "\n";
    return 0;
}

// Per-row risk score at horizon h (higher = event sooner) for any model type.
double risk_score_at(const AnyModel& model, const std::vector<double>& x, std::int64_t h) {
    if (const auto* lin = std::get_if<LinearBetaLogistic>(&model)) {
        return 1.0 - sbg_survival(predict_params(*lin, x), h);
    }
    if (const auto* gb = std::get_if<GbrtBetaLogistic>(&model)) {
        return 1.0 - sbg_survival(predict_gbrt(*gb, x), h);
    }
    if (const auto* lg = std::get_if<LogisticModel>(&model)) {
        return logistic_score(*lg, x);
    }
    const auto& geo = std::get<GeometricModel>(model);
    const double theta = geometric_event_rate(geo, x);
    return 1.0 - std::pow(1.0 - theta, static_cast<double>(h));
}

int run_predict(const PredictArgs& a) {
    ModelFile mf = load_model_file(a.model);
    LoadedDataset ld = read_dataset_csv(a.data, &mf.encoder, a.ids_column);
    std::vector<std::string> header = {"id"};
    std::vector<std::vector<std::string>> rows;
    rows.reserve(ld.data.rows.size());

    const bool beta_like = std::holds_alternative<LinearBetaLogistic>(mf.model) ||
                           std::holds_alternative<GbrtBetaLogistic>(mf.model);
    if (beta_like) {
        header.push_back("alpha");
        header.push_back("beta");
        header.push_back("p_event_by_" + std::to_string(a.horizon));
        for (std::int64_t t = 1; t <= a.horizon; ++t) {
            header.push_back("survival_" + std::to_string(t));
        }
        for (std::size_t i = 0; i < ld.data.rows.size(); ++i) {
            const std::vector<double>& x = ld.data.rows[i].features;
            const BetaParams bp = std::holds_alternative<LinearBetaLogistic>(mf.model)
                                      ? predict_params(std::get<LinearBetaLogistic>(mf.model), x)
                                      : predict_gbrt(std::get<GbrtBetaLogistic>(mf.model), x);
            const std::vector<double> curve = sbg_survival_curve(bp, a.horizon);
            std::vector<std::string> row = {ld.ids[i], format_double(bp.alpha),
                                            format_double(bp.beta),
                                            format_double(1.0 - curve.back())};
            for (double s : curve) row.push_back(format_double(s));
            rows.push_back(std::move(row));
        }
    } else if (const auto* lg = std::get_if<LogisticModel>(&mf.model)) {
        header.push_back("p_event_by_" + std::to_string(lg->horizon));
        for (std::size_t i = 0; i < ld.data.rows.size(); ++i) {
            rows.push_back({ld.ids[i], format_double(logistic_score(*lg, ld.data.rows[i].features))});
        }
        std::cout << "note: logistic scores are for the trained horizon " << lg->horizon << "\n";
    } else {
        const auto& geo = std::get<GeometricModel>(mf.model);
        header.push_back("theta");
        header.push_back("p_event_by_" + std::to_string(a.horizon));
        for (std::int64_t t = 1; t <= a.horizon; ++t) {
            header.push_back("survival_" + std::to_string(t));
        }
        for (std::size_t i = 0; i < ld.data.rows.size(); ++i) {
            const double theta = geometric_event_rate(geo, ld.data.rows[i].features);
            std::vector<std::string> row = {ld.ids[i], format_double(theta)};
            row.push_back(format_double(1.0 - std::pow(1.0 - theta, static_cast<double>(a.horizon))));
            for (std::int64_t t = 1; t <= a.horizon; ++t) {
                row.push_back(format_double(std::pow(1.0 - theta, static_cast<double>(t))));
            }
            rows.push_back(std::move(row));
        }
    }
    write_csv(a.out, header, rows);
    std::cout << "rows=" << rows.size() << " out=" << a.out << "\n";
    return 0;
}

int run_rank(const RankArgs& a) {
    ModelFile mf = load_model_file(a.model);
    const bool beta_like = std::holds_alternative<LinearBetaLogistic>(mf.model) ||
                           std::holds_alternative<GbrtBetaLogistic>(mf.model);
    if (!beta_like) {
        throw std::invalid_argument("ranking requires a beta-logistic model (got " +
                                    model_type_name(mf.model) + ")");
    }
    LoadedDataset ld = read_dataset_csv(a.data, &mf.encoder, a.ids_column);
    if (ld.data.rows.empty()) throw std::invalid_argument(a.data + ": no data rows");
    std::vector<std::pair<std::string, BetaParams>> items;
    items.reserve(ld.data.rows.size());
    for (std::size_t i = 0; i < ld.data.rows.size(); ++i) {
        const std::vector<double>& x = ld.data.rows[i].features;
        items.emplace_back(ld.ids[i],
                           std::holds_alternative<LinearBetaLogistic>(mf.model)
                               ? predict_params(std::get<LinearBetaLogistic>(mf.model), x)
                               : predict_gbrt(std::get<GbrtBetaLogistic>(mf.model), x));
    }
    const std::vector<RankedItem> ranked = rank_at_horizon(items, a.horizon);
    std::vector<std::vector<std::string>> rows;
    rows.reserve(ranked.size());
    std::size_t fallbacks = 0;
    for (std::size_t r = 0; r < ranked.size(); ++r) {
        const RankedItem& item = ranked[r];
        fallbacks += item.projection_fallback;
        rows.push_back({item.item_id, std::to_string(item.horizon),
                        format_double(item.params.alpha), format_double(item.params.beta),
                        format_double(item.median_score), std::to_string(r + 1)});
    }
    write_csv(a.out, {"item_id", "horizon", "alpha_hat", "beta_hat", "median", "rank"}, rows);
    std::cout << "items=" << ranked.size() << " projection_fallbacks=" << fallbacks << " out="
              << a.out << "\n";
    return 0;
}

std::vector<std::int64_t> parse_horizons(const std::string& text) {
    std::vector<std::int64_t> out;
    std::stringstream ss(text);
    std::string tok;
    while (std::getline(ss, tok, ',')) {
        try {
            std::size_t pos = 0;
            const long long v = std::stoll(tok, &pos);
            if (pos != tok.size() || v < 1) throw std::invalid_argument(tok);
            out.push_back(v);
        } catch (const std::exception&) {
            throw UsageError("--horizons must be a comma-separated list of positive integers");
        }
    }
    if (out.empty()) throw UsageError("--horizons is empty");
    return out;
}

int run_eval(const EvalArgs& a) {
    const std::vector<std::int64_t> horizons = parse_horizons(a.horizons);
    LoadedDataset ld;  // re-encoded per model below; raw rows shared
    std::vector<std::vector<std::string>> rows;
    for (const std::string& model_path : a.models) {
        ModelFile mf = load_model_file(model_path);
        ld = read_dataset_csv(a.data, &mf.encoder);
        for (std::int64_t h : horizons) {
            std::vector<double> scores;
            scores.reserve(ld.data.rows.size());
            for (const Observation& o : ld.data.rows) {
                scores.push_back(risk_score_at(mf.model, o.features, h));
            }
            const HorizonEval ev = auc_at_horizon(scores, ld.data.rows, h);
            rows.push_back({model_path, std::to_string(ev.horizon), format_double(ev.auc),
                            std::to_string(ev.n_effective)});
        }
    }
    write_csv(a.out, {"model", "horizon", "auc", "n_effective"}, rows);
    std::cout << "rows=" << rows.size() << " out=" << a.out << "\n";
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Discrete-time survival modeling with beta priors over per-step event rates"};
    app.require_subcommand(1);

    SimulateArgs sim;
    CLI::App* simulate = app.add_subcommand("simulate", "Generate a synthetic survival dataset");
    simulate->add_option("--generator", sim.generator, "table1 | sweep | betageom")
        ->required()
        ->check(CLI::IsMember({"table1", "sweep", "betageom"}));
    simulate->add_option("--n", sim.n, "Units (per cohort for table1)")
        ->required()
        ->check(CLI::PositiveNumber);
    simulate->add_option("--horizon", sim.horizon, "Right-censoring horizon")
        ->required()
        ->check(CLI::PositiveNumber);
    simulate->add_option("--seed", sim.seed, "RNG seed");
    simulate->add_option("--out", sim.out, "Output CSV path")->required();
    simulate->add_option("--alpha", sim.alpha, "Prior alpha (betageom)")->check(CLI::PositiveNumber);
    simulate->add_option("--beta", sim.beta, "Prior beta (betageom)")->check(CLI::PositiveNumber);
    simulate->add_option("--homogeneity", sim.homogeneity, "Homogeneity level (sweep)")
        ->check(CLI::NonNegativeNumber);
    simulate->add_option("--noise", sim.noise, "Exponential noise scale (sweep)")
        ->check(CLI::PositiveNumber);

    TrainArgs tr;
    CLI::App* train = app.add_subcommand("train", "Fit a model on a dataset CSV");
    train->add_option("--model", tr.model, "Model kind")
        ->required()
        ->check(CLI::IsMember({"betalogistic-linear", "betalogistic-gbrt", "logistic", "geometric"}));
    train->add_option("--data", tr.data, "Dataset CSV")->required();
    train->add_option("--out-model", tr.out_model, "Model JSON output path")->required();
    train->add_option("--horizon", tr.horizon, "Labeling horizon (logistic only)")
        ->check(CLI::PositiveNumber);
    train->add_option("--config", tr.config_path, "JSON file with hyperparameters");
    train->add_option("--seed", tr.seed, "RNG seed (mini-batch shuffling)");
    train->add_option("--threads", tr.threads, "Worker threads")->check(CLI::PositiveNumber);
    train->add_flag("--deterministic", tr.deterministic,
                    "Force ordered reductions (always on; reductions are block-ordered)");
    train->add_option("--censored-weight", tr.censored_weight,
                      "Weight multiplier for censored rows (down-sampling compensation)")
        ->check(CLI::PositiveNumber);
    CLI::Option* o_l2 = train->add_option("--l2", tr.l2, "L2 penalty")->check(CLI::NonNegativeNumber);
    CLI::Option* o_lr = train->add_option("--lr", tr.lr, "Learning rate")->check(CLI::PositiveNumber);
    CLI::Option* o_ep = train->add_option("--epochs", tr.epochs, "Max epochs (linear)")
        ->check(CLI::PositiveNumber);
    CLI::Option* o_ro = train->add_option("--rounds", tr.rounds, "Boosting rounds (gbrt)")
        ->check(CLI::NonNegativeNumber);
    CLI::Option* o_de = train->add_option("--depth", tr.depth, "Max tree depth (gbrt)")
        ->check(CLI::NonNegativeNumber);

    PredictArgs pr;
    CLI::App* predict = app.add_subcommand("predict", "Per-row predictions from a model file");
    predict->add_option("--model", pr.model, "Model JSON")->required();
    predict->add_option("--data", pr.data, "Dataset CSV")->required();
    predict->add_option("--ids-column", pr.ids_column, "Column holding row ids");
    predict->add_option("--horizon", pr.horizon, "Survival-curve horizon")
        ->check(CLI::PositiveNumber);
    predict->add_option("--out", pr.out, "Output CSV path")->required();

    RankArgs rk;
    CLI::App* rank = app.add_subcommand("rank", "Rank rows most-at-risk first at a horizon");
    rank->add_option("--model", rk.model, "Beta-logistic model JSON")->required();
    rank->add_option("--data", rk.data, "Dataset CSV")->required();
    rank->add_option("--ids-column", rk.ids_column, "Column holding item ids");
    rank->add_option("--horizon", rk.horizon, "Ranking horizon")->check(CLI::PositiveNumber);
    rank->add_option("--out", rk.out, "Output CSV path")->required();

    EvalArgs ev;
    CLI::App* eval = app.add_subcommand("eval", "Horizon AUC of one or more models");
    eval->add_option("--model", ev.models, "Model JSON (repeatable)")->required();
    eval->add_option("--data", ev.data, "Dataset CSV")->required();
    eval->add_option("--horizons", ev.horizons, "Comma-separated horizons, e.g. 1,2,3,4")
        ->required();
    eval->add_option("--out", ev.out, "Output CSV path")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForVersion& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 2;
    }

    tr.l2_set = o_l2->count() > 0;
    tr.lr_set = o_lr->count() > 0;
    tr.epochs_set = o_ep->count() > 0;
    tr.rounds_set = o_ro->count() > 0;
    tr.depth_set = o_de->count() > 0;

    try {
        if (app.got_subcommand(simulate)) return run_simulate(sim);
        if (app.got_subcommand(train)) return run_train(tr);
        if (app.got_subcommand(predict)) return run_predict(pr);
        if (app.got_subcommand(rank)) return run_rank(rk);
        return run_eval(ev);
    } catch (const UsageError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const IoError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 3;
    }
}
