#include "betasurv/csvio.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <set>
#include <sstream>

namespace betasurv {

namespace {

std::string trim(const std::string& s) {
    std::size_t b = 0, e = s.size();
    while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
    while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
    return s.substr(b, e - b);
}

std::string lower(std::string s) {
    for (char& c : s) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
    return s;
}

bool is_missing_token(const std::string& cell) {
    const std::string t = lower(cell);
    return t.empty() || t == "na" || t == "nan" || t == "null";
}

bool parse_double(const std::string& cell, double& out) {
    if (cell.empty()) return false;
    char* end = nullptr;
    out = std::strtod(cell.c_str(), &end);
    return end == cell.c_str() + cell.size();
}

bool parse_int(const std::string& cell, long long& out) {
    if (cell.empty()) return false;
    char* end = nullptr;
    out = std::strtoll(cell.c_str(), &end, 10);
    return end == cell.c_str() + cell.size();
}

// RFC4180-style: quoted fields may contain commas, doubled quotes, newlines.
std::vector<std::vector<std::string>> parse_csv_stream(std::istream& in) {
    std::vector<std::vector<std::string>> rows;
    std::vector<std::string> row;
    std::string cell;
    bool in_quotes = false;
    bool cell_started = false;
    char c;
    auto end_cell = [&] {
        row.push_back(cell);
        cell.clear();
        cell_started = false;
    };
    auto end_row = [&] {
        end_cell();
        if (row.size() > 1 || !row.front().empty()) rows.push_back(row);
        row.clear();
    };
    while (in.get(c)) {
        if (in_quotes) {
            if (c == '"') {
                if (in.peek() == '"') {
                    in.get(c);
                    cell.push_back('"');
                } else {
                    in_quotes = false;
                }
            } else {
                cell.push_back(c);
            }
        } else if (c == '"' && !cell_started) {
            in_quotes = true;
            cell_started = true;
        } else if (c == ',') {
            end_cell();
        } else if (c == '\n') {
            if (!cell.empty() && cell.back() == '\r') cell.pop_back();
            end_row();
        } else {
            cell.push_back(c);
            cell_started = true;
        }
    }
    if (!cell.empty() && cell.back() == '\r') cell.pop_back();
    if (!cell.empty() || !row.empty()) end_row();
    return rows;
}

[[noreturn]] void bad_row(std::size_t line_no, const std::string& what) {
    throw std::invalid_argument("line " + std::to_string(line_no) + ": " + what);
}

}  // namespace

std::vector<std::string> Encoder::feature_names() const {
    std::vector<std::string> names;
    for (const Column& col : columns) {
        if (col.categorical) {
            for (const std::string& v : col.vocab) names.push_back(col.name + "=" + v);
        } else {
            names.push_back(col.name);
        }
    }
    return names;
}

std::size_t Encoder::dim() const {
    std::size_t d = 0;
    for (const Column& col : columns) d += col.categorical ? col.vocab.size() : 1;
    return d;
}

std::string format_double(double v) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.12g", v);
    return buf;
}

LoadedDataset read_dataset_csv(const std::string& path, const Encoder* encoder,
                               const std::string& ids_column, double censored_weight) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open file: " + path);
    const std::vector<std::vector<std::string>> cells = parse_csv_stream(in);
    if (cells.empty()) throw std::invalid_argument(path + ": empty file, header row is mandatory");

    std::vector<std::string> header;
    header.reserve(cells.front().size());
    for (const std::string& h : cells.front()) header.push_back(trim(h));
    auto col_index = [&](const std::string& name) -> long {
        const auto it = std::find(header.begin(), header.end(), name);
        return it == header.end() ? -1 : it - header.begin();
    };
    const long t_col = col_index("t");
    const long c_col = col_index("censored");
    const long w_col = col_index("weight");
    if (t_col < 0 || c_col < 0) {
        throw std::invalid_argument(path + ": required columns 't' and 'censored' not found");
    }
    long id_col = -1;
    if (!ids_column.empty()) {
        id_col = col_index(ids_column);
        if (id_col < 0) throw std::invalid_argument(path + ": ids column '" + ids_column + "' not found");
    }

    std::vector<long> feature_cols;
    for (long j = 0; j < static_cast<long>(header.size()); ++j) {
        if (j != t_col && j != c_col && j != w_col && j != id_col) feature_cols.push_back(j);
    }

    LoadedDataset out;
    const std::size_t n = cells.size() - 1;
    auto cell_at = [&](std::size_t i, long j) -> std::string {
        const std::vector<std::string>& row = cells[i + 1];
        if (j >= static_cast<long>(row.size())) {
            bad_row(i + 2, "expected " + std::to_string(header.size()) + " columns, got " +
                               std::to_string(row.size()));
        }
        return trim(row[j]);
    };

    if (encoder) {
        out.encoder = *encoder;
        feature_cols.clear();
        for (const Encoder::Column& col : out.encoder.columns) {
            const long j = col_index(col.name);
            if (j < 0) {
                throw std::invalid_argument(path + ": column '" + col.name +
                                            "' required by the model is missing");
            }
            feature_cols.push_back(j);
        }
    } else {
        for (long j : feature_cols) {
            Encoder::Column col;
            col.name = header[j];
            std::set<std::string> vocab;
            for (std::size_t i = 0; i < n; ++i) {
                const std::string cell = cell_at(i, j);
                double v;
                if (!is_missing_token(cell) && !parse_double(cell, v)) {
                    col.categorical = true;
                }
                if (!cell.empty()) vocab.insert(cell);
            }
            if (col.categorical) col.vocab.assign(vocab.begin(), vocab.end());
            out.encoder.columns.push_back(std::move(col));
        }
    }

    out.data.feature_names = out.encoder.feature_names();
    const std::size_t dim = out.encoder.dim();
    out.data.rows.resize(n);
    out.ids.reserve(n);
    for (std::size_t i = 0; i < n; ++i) {
        const std::size_t line_no = i + 2;
        Observation& o = out.data.rows[i];
        long long t;
        if (!parse_int(cell_at(i, t_col), t) || t < 1) {
            bad_row(line_no, "column 't' must be a positive integer, got '" + cell_at(i, t_col) +
                                 "' (event times start at 1; shift the dataset if needed)");
        }
        o.t = t;
        const std::string cc = cell_at(i, c_col);
        if (cc != "0" && cc != "1") {
            bad_row(line_no, "column 'censored' must be 0 or 1, got '" + cc + "'");
        }
        o.censored = cc == "1";
        o.weight = 1.0;
        if (w_col >= 0) {
            double w;
            if (!parse_double(cell_at(i, w_col), w) || !(w > 0.0) || !std::isfinite(w)) {
                bad_row(line_no, "column 'weight' must be a positive real");
            }
            o.weight = w;
        }
        if (o.censored) o.weight *= censored_weight;

        o.features.assign(dim, 0.0);
        std::size_t f = 0;
        for (std::size_t k = 0; k < out.encoder.columns.size(); ++k) {
            const Encoder::Column& col = out.encoder.columns[k];
            const std::string cell = cell_at(i, feature_cols[k]);
            if (col.categorical) {
                const auto it = std::lower_bound(col.vocab.begin(), col.vocab.end(), cell);
                if (it != col.vocab.end() && *it == cell) {
                    o.features[f + (it - col.vocab.begin())] = 1.0;
                }
                f += col.vocab.size();
            } else {
                double v = std::nan("");
                if (is_missing_token(cell)) {
                    ++out.missing_cells;
                } else if (!parse_double(cell, v)) {
                    bad_row(line_no, "column '" + col.name + "' is numeric but got '" + cell + "'");
                }
                o.features[f++] = v;
            }
        }
        out.ids.push_back(id_col >= 0 ? cell_at(i, id_col) : std::to_string(i));
    }
    return out;
}

std::string csv_escape(const std::string& cell) {
    if (cell.find_first_of(",\"\n\r") == std::string::npos) return cell;
    std::string out = "\"";
    for (char c : cell) {
        if (c == '"') out += "\"\"";
        else out.push_back(c);
    }
    out += "\"";
    return out;
}

void write_csv(const std::string& path, const std::vector<std::string>& header,
               const std::vector<std::vector<std::string>>& rows) {
    std::ofstream outf(path, std::ios::binary);
    if (!outf) throw IoError("cannot write file: " + path);
    auto write_row = [&](const std::vector<std::string>& row) {
        for (std::size_t j = 0; j < row.size(); ++j) {
            if (j) outf << ',';
            outf << csv_escape(row[j]);
        }
        outf << '\n';
    };
    write_row(header);
    for (const auto& row : rows) write_row(row);
    if (!outf) throw IoError("write failed: " + path);
}

void write_dataset_csv(const std::string& path, const Dataset& data) {
    std::vector<std::string> header = {"t", "censored"};
    header.insert(header.end(), data.feature_names.begin(), data.feature_names.end());
    std::vector<std::vector<std::string>> rows;
    rows.reserve(data.rows.size());
    for (const Observation& o : data.rows) {
        std::vector<std::string> row;
        row.reserve(2 + o.features.size());
        row.push_back(std::to_string(o.t));
        row.push_back(o.censored ? "1" : "0");
        for (double v : o.features) row.push_back(format_double(v));
        rows.push_back(std::move(row));
    }
    write_csv(path, header, rows);
}

}  // namespace betasurv
