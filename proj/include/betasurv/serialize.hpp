#pragma once

#include <string>
#include <variant>

#include "betasurv/baselines.hpp"
#include "betasurv/csvio.hpp"
#include "betasurv/model_gbrt.hpp"
#include "betasurv/model_linear.hpp"

namespace betasurv {

using AnyModel =
    std::variant<LinearBetaLogistic, GbrtBetaLogistic, LogisticModel, GeometricModel>;

// A trained model plus the column encoder that produced its feature space,
// stored as one versioned JSON document. Coefficient round-trips are bit-exact.
struct ModelFile {
    AnyModel model;
    Encoder encoder;
};

std::string model_type_name(const AnyModel& model);

std::string model_file_to_json(const ModelFile& file);
ModelFile model_file_from_json(const std::string& text);

void save_model_file(const ModelFile& file, const std::string& path);
ModelFile load_model_file(const std::string& path);

}  // namespace betasurv
