#include "betasurv/serialize.hpp"

#include <fstream>
#include <sstream>
#include <type_traits>

#include "json.hpp"

namespace betasurv {

namespace {

using nlohmann::json;

constexpr int kFormatVersion = 1;

json encoder_to_json(const Encoder& enc) {
    json cols = json::array();
    for (const Encoder::Column& c : enc.columns) {
        cols.push_back({{"name", c.name}, {"categorical", c.categorical}, {"vocab", c.vocab}});
    }
    return {{"columns", cols}};
}

Encoder encoder_from_json(const json& j) {
    Encoder enc;
    for (const json& c : j.at("columns")) {
        Encoder::Column col;
        col.name = c.at("name").get<std::string>();
        col.categorical = c.at("categorical").get<bool>();
        col.vocab = c.at("vocab").get<std::vector<std::string>>();
        enc.columns.push_back(std::move(col));
    }
    return enc;
}

json to_json(const LinearBetaLogistic& m) {
    return {{"model_type", "betalogistic_linear"},
            {"feature_names", m.feature_names},
            {"gamma_a", m.gamma_a},
            {"gamma_b", m.gamma_b},
            {"intercept_a", m.intercept_a},
            {"intercept_b", m.intercept_b},
            {"clamp", m.clamp}};
}

LinearBetaLogistic linear_from_json(const json& j) {
    LinearBetaLogistic m;
    m.feature_names = j.at("feature_names").get<std::vector<std::string>>();
    m.gamma_a = j.at("gamma_a").get<std::vector<double>>();
    m.gamma_b = j.at("gamma_b").get<std::vector<double>>();
    m.intercept_a = j.at("intercept_a").get<double>();
    m.intercept_b = j.at("intercept_b").get<double>();
    m.clamp = j.at("clamp").get<double>();
    if (m.gamma_a.size() != m.feature_names.size() || m.gamma_b.size() != m.feature_names.size()) {
        throw std::invalid_argument("model file: coefficient/feature_names size mismatch");
    }
    return m;
}

json to_json(const GbrtBetaLogistic& m) {
    json trees = json::array();
    for (const GbrtTree& t : m.trees) {
        json nodes = json::array();
        for (const GbrtNode& n : t.nodes) {
            nodes.push_back({{"feature_index", n.feature_index},
                             {"threshold", n.threshold},
                             {"left", n.left},
                             {"right", n.right},
                             {"leaf_delta_a", n.leaf_delta_a},
                             {"leaf_delta_b", n.leaf_delta_b}});
        }
        trees.push_back(std::move(nodes));
    }
    return {{"model_type", "betalogistic_gbrt"},
            {"feature_names", m.feature_names},
            {"learning_rate", m.learning_rate},
            {"base_a", m.base_a},
            {"base_b", m.base_b},
            {"max_depth", m.max_depth},
            {"clamp", m.clamp},
            {"trees", trees}};
}

GbrtBetaLogistic gbrt_from_json(const json& j) {
    GbrtBetaLogistic m;
    m.feature_names = j.at("feature_names").get<std::vector<std::string>>();
    m.learning_rate = j.at("learning_rate").get<double>();
    m.base_a = j.at("base_a").get<double>();
    m.base_b = j.at("base_b").get<double>();
    m.max_depth = j.at("max_depth").get<int>();
    m.clamp = j.at("clamp").get<double>();
    for (const json& tj : j.at("trees")) {
        GbrtTree tree;
        for (const json& nj : tj) {
            GbrtNode n;
            n.feature_index = nj.at("feature_index").get<int>();
            n.threshold = nj.at("threshold").get<double>();
            n.left = nj.at("left").get<int>();
            n.right = nj.at("right").get<int>();
            n.leaf_delta_a = nj.at("leaf_delta_a").get<double>();
            n.leaf_delta_b = nj.at("leaf_delta_b").get<double>();
            tree.nodes.push_back(n);
        }
        if (tree.nodes.empty()) throw std::invalid_argument("model file: empty tree");
        m.trees.push_back(std::move(tree));
    }
    return m;
}

json to_json(const LogisticModel& m) {
    json j = {{"model_type", "logistic"},
              {"feature_names", m.feature_names},
              {"theta", m.theta},
              {"intercept", m.intercept},
              {"horizon", m.horizon},
              {"l2_penalty", m.l2_penalty},
              {"hessian_diag", m.hessian_diag}};
    if (m.has_full_hessian()) j["hessian_full"] = m.hessian_full;
    return j;
}

LogisticModel logistic_from_json(const json& j) {
    LogisticModel m;
    m.feature_names = j.at("feature_names").get<std::vector<std::string>>();
    m.theta = j.at("theta").get<std::vector<double>>();
    m.intercept = j.at("intercept").get<double>();
    m.horizon = j.at("horizon").get<std::int64_t>();
    m.l2_penalty = j.at("l2_penalty").get<double>();
    m.hessian_diag = j.at("hessian_diag").get<std::vector<double>>();
    if (j.contains("hessian_full")) {
        m.hessian_full = j.at("hessian_full").get<std::vector<double>>();
    }
    return m;
}

json to_json(const GeometricModel& m) {
    return {{"model_type", "geometric"},
            {"feature_names", m.feature_names},
            {"weights", m.weights},
            {"intercept", m.intercept}};
}

GeometricModel geometric_from_json(const json& j) {
    GeometricModel m;
    m.feature_names = j.at("feature_names").get<std::vector<std::string>>();
    m.weights = j.at("weights").get<std::vector<double>>();
    m.intercept = j.at("intercept").get<double>();
    return m;
}

}  // namespace

std::string model_type_name(const AnyModel& model) {
    return std::visit(
        [](const auto& m) -> std::string {
            using T = std::decay_t<decltype(m)>;
            if constexpr (std::is_same_v<T, LinearBetaLogistic>) {
                return "betalogistic_linear";
            } else if constexpr (std::is_same_v<T, GbrtBetaLogistic>) {
                return "betalogistic_gbrt";
            } else if constexpr (std::is_same_v<T, LogisticModel>) {
                return "logistic";
            } else {
                return "geometric";
            }
        },
        model);
}

std::string model_file_to_json(const ModelFile& file) {
    json j = std::visit([](const auto& m) { return to_json(m); }, file.model);
    j["version"] = kFormatVersion;
    j["encoder"] = encoder_to_json(file.encoder);
    return j.dump(2) + "\n";
}

ModelFile model_file_from_json(const std::string& text) {
    json j;
    try {
        j = json::parse(text);
    } catch (const json::parse_error& e) {
        throw std::invalid_argument(std::string("model file is not valid JSON: ") + e.what());
    }
    try {
        const int version = j.at("version").get<int>();
        if (version != kFormatVersion) {
            throw std::invalid_argument("unsupported model file version " +
                                        std::to_string(version));
        }
        ModelFile file;
        file.encoder = encoder_from_json(j.at("encoder"));
        const std::string type = j.at("model_type").get<std::string>();
        if (type == "betalogistic_linear") {
            file.model = linear_from_json(j);
        } else if (type == "betalogistic_gbrt") {
            file.model = gbrt_from_json(j);
        } else if (type == "logistic") {
            file.model = logistic_from_json(j);
        } else if (type == "geometric") {
            file.model = geometric_from_json(j);
        } else {
            throw std::invalid_argument("unknown model_type '" + type + "'");
        }
        return file;
    } catch (const json::exception& e) {
        throw std::invalid_argument(std::string("malformed model file: ") + e.what());
    }
}

void save_model_file(const ModelFile& file, const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("cannot write file: " + path);
    out << model_file_to_json(file);
    if (!out) throw IoError("write failed: " + path);
}

ModelFile load_model_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open file: " + path);
    std::ostringstream buf;
    buf << in.rdbuf();
    return model_file_from_json(buf.str());
}

}  // namespace betasurv
