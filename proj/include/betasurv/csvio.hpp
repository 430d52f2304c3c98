#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>
#include <vector>

#include "betasurv/dataset.hpp"

namespace betasurv {

// Unreadable/unwritable files. Distinct from malformed content, which raises
// std::invalid_argument; the CLI maps the two to different exit codes.
class IoError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Column-to-feature mapping persisted inside model files so prediction-time
// encoding is exactly the training-time encoding.
struct Encoder {
    struct Column {
        std::string name;
        bool categorical = false;
        std::vector<std::string> vocab;  // sorted category values; empty for numeric columns
    };
    std::vector<Column> columns;

    std::vector<std::string> feature_names() const;
    std::size_t dim() const;
};

struct LoadedDataset {
    Dataset data;
    Encoder encoder;
    std::vector<std::string> ids;
    std::size_t missing_cells = 0;  // numeric cells ingested as NaN
};

std::string format_double(double v);

// Reads a dataset CSV. Required columns: t (positive integer) and censored
// (0/1); optional weight (positive real). Every other column is a feature:
// numeric, or categorical (one-hot) when any cell fails to parse as a number.
// Passing an encoder applies a previously persisted mapping instead of
// inferring one; unknown categories encode as all-zeros. censored_weight
// multiplies the weight of censored rows (down-sampling compensation).
LoadedDataset read_dataset_csv(const std::string& path, const Encoder* encoder = nullptr,
                               const std::string& ids_column = "",
                               double censored_weight = 1.0);

void write_dataset_csv(const std::string& path, const Dataset& data);

// header + preformatted cells, '\n' line endings, quoting only when needed.
void write_csv(const std::string& path, const std::vector<std::string>& header,
               const std::vector<std::vector<std::string>>& rows);

std::string csv_escape(const std::string& cell);

}  // namespace betasurv
