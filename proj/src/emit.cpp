// Copyright 2026 The qlink Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include <charconv>
#include <cmath>
#include <fstream>
#include <limits>
#include <sstream>

#include "json.hpp"
#include "qlink/experiment.hpp"

namespace qlink::exp {

namespace fs = std::filesystem;
using json = nlohmann::json;

void Table::add(std::vector<Cell> row) {
    if (row.size() != columns.size()) throw DimensionError("table row has " + std::to_string(row.size()) +
                                                           " cells, expected " + std::to_string(columns.size()));
    rows.push_back(std::move(row));
}

size_t Table::column(const std::string& name) const {
    for (size_t i = 0; i < columns.size(); ++i)
        if (columns[i] == name) return i;
    throw DimensionError("no column '" + name + "'");
}

double Table::number(size_t row, const std::string& col) const {
    const Cell& c = rows.at(row).at(column(col));
    if (const double* x = std::get_if<double>(&c)) return *x;
    throw DimensionError("column '" + col + "' holds text");
}

Format parse_format(const std::string& s) {
    if (s == "csv") return Format::Csv;
    if (s == "json") return Format::Json;
    if (s == "both") return Format::Both;
    throw ConfigError("run.format: expected csv, json or both, got '" + s + "'");
}

namespace {

std::string cell_text(const Cell& c) {
    if (const double* x = std::get_if<double>(&c)) {
        if (std::isnan(*x)) return "nan";
        return format_number(*x);
    }
    const auto& s = std::get<std::string>(c);
    if (s.find_first_of(",\"\n") == std::string::npos) return s;
    std::string q = "\"";
    for (char ch : s) q += ch == '"' ? std::string("\"\"") : std::string(1, ch);
    return q + "\"";
}

std::vector<std::string> split_csv_line(const std::string& line) {
    std::vector<std::string> out;
    std::string cur;
    bool quoted = false;
    for (size_t i = 0; i < line.size(); ++i) {
        const char ch = line[i];
        if (quoted) {
            if (ch == '"' && i + 1 < line.size() && line[i + 1] == '"') cur += '"', ++i;
            else if (ch == '"') quoted = false;
            else cur += ch;
        } else if (ch == '"') {
            quoted = true;
        } else if (ch == ',') {
            out.push_back(cur);
            cur.clear();
        } else {
            cur += ch;
        }
    }
    out.push_back(cur);
    return out;
}

Cell parse_cell(const std::string& s) {
    if (s == "nan") return std::numeric_limits<double>::quiet_NaN();
    double x;
    auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), x);
    if (!s.empty() && ec == std::errc() && p == s.data() + s.size()) return x;
    return s;
}

json cell_json(const Cell& c) {
    if (const double* x = std::get_if<double>(&c)) return std::isfinite(*x) ? json(*x) : json(nullptr);
    return std::get<std::string>(c);
}

Cell json_cell(const json& j) {
    if (j.is_null()) return std::numeric_limits<double>::quiet_NaN();
    if (j.is_number()) return j.get<double>();
    return j.get<std::string>();
}

json matrix_json(const Mat& m) {
    json data = json::array();
    for (long i = 0; i < m.rows(); ++i)
        for (long k = 0; k < m.cols(); ++k) {
            data.push_back(m(i, k).real());
            data.push_back(m(i, k).imag());
        }
    return {{"rows", m.rows()}, {"cols", m.cols()}, {"data", data}};
}

Mat json_matrix(const json& j) {
    const long r = j.at("rows").get<long>(), c = j.at("cols").get<long>();
    const auto& d = j.at("data");
    if (long(d.size()) != 2 * r * c) throw DimensionError("matrix payload size mismatch");
    Mat m(r, c);
    for (long i = 0; i < r; ++i)
        for (long k = 0; k < c; ++k) {
            const size_t at = size_t(2 * (i * c + k));
            m(i, k) = cplx(d[at].get<double>(), d[at + 1].get<double>());
        }
    return m;
}

void write_file(const fs::path& p, const std::string& text) {
    std::ofstream out(p, std::ios::binary);
    if (!out) throw std::runtime_error(p.string() + ": cannot open for writing");
    out << text;
    out.close();
    if (!out) throw std::runtime_error(p.string() + ": write failed");
}

}  // namespace

std::string to_csv(const Table& t) {
    std::string s;
    for (size_t i = 0; i < t.columns.size(); ++i) s += (i ? "," : "") + cell_text(t.columns[i]);
    s += "\n";
    for (const auto& row : t.rows) {
        for (size_t i = 0; i < row.size(); ++i) s += (i ? "," : "") + cell_text(row[i]);
        s += "\n";
    }
    return s;
}

Table from_csv(const std::string& text) {
    std::istringstream in(text);
    std::string line;
    Table t;
    if (!std::getline(in, line)) return t;
    t.columns = split_csv_line(line);
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        std::vector<Cell> row;
        for (const auto& s : split_csv_line(line)) row.push_back(parse_cell(s));
        t.add(std::move(row));
    }
    return t;
}

std::string to_json(const ResultRecord& r) {
    json j;
    j["id"] = r.id;
    j["kind"] = r.kind;
    j["config_hash"] = r.config_hash;
    j["config"] = r.config;
    j["duration_s"] = r.duration_s;
    j["metrics"] = json::object();
    for (const auto& [k, v] : r.metrics) j["metrics"][k] = std::isfinite(v) ? json(v) : json(nullptr);
    j["series"] = json::object();
    for (const auto& [name, t] : r.series) {
        json rows = json::array();
        for (const auto& row : t.rows) {
            json jr = json::array();
            for (const auto& c : row) jr.push_back(cell_json(c));
            rows.push_back(jr);
        }
        j["series"][name] = {{"columns", t.columns}, {"rows", rows}};
    }
    j["matrices"] = json::object();
    for (const auto& [name, m] : r.matrices) j["matrices"][name] = matrix_json(m);
    return j.dump(1) + "\n";
}

ResultRecord from_json(const std::string& text) {
    json j;
    try {
        j = json::parse(text);
    } catch (const json::exception& e) {
        throw ConfigError(std::string("record JSON: ") + e.what());
    }
    ResultRecord r;
    r.id = j.at("id").get<std::string>();
    r.kind = j.at("kind").get<std::string>();
    r.config_hash = j.at("config_hash").get<std::string>();
    r.config = j.at("config").get<std::map<std::string, std::string>>();
    r.duration_s = j.at("duration_s").get<double>();
    for (const auto& [k, v] : j.at("metrics").items())
        r.metrics[k] = v.is_null() ? std::numeric_limits<double>::quiet_NaN() : v.get<double>();
    for (const auto& [name, s] : j.at("series").items()) {
        Table t;
        t.columns = s.at("columns").get<std::vector<std::string>>();
        for (const auto& row : s.at("rows")) {
            std::vector<Cell> cells;
            for (const auto& c : row) cells.push_back(json_cell(c));
            t.add(std::move(cells));
        }
        r.series[name] = std::move(t);
    }
    for (const auto& [name, m] : j.at("matrices").items()) r.matrices[name] = json_matrix(m);
    return r;
}

std::vector<fs::path> emit(const ResultRecord& r, const fs::path& dir, Format f) {
    std::error_code ec;
    fs::create_directories(dir, ec);
    if (ec) throw std::runtime_error(dir.string() + ": " + ec.message());
    std::vector<fs::path> out;
    if (f != Format::Json) {
        for (const auto& [name, t] : r.series) {
            out.push_back(dir / (r.id + "." + name + ".csv"));
            write_file(out.back(), to_csv(t));
        }
        Table m;
        m.columns = {"metric", "value"};
        for (const auto& [k, v] : r.metrics) m.add({k, v});
        out.push_back(dir / (r.id + ".metrics.csv"));
        write_file(out.back(), to_csv(m));
    }
    if (f != Format::Csv) {
        out.push_back(dir / (r.id + ".json"));
        write_file(out.back(), to_json(r));
    }
    return out;
}

PartialLog::PartialLog(fs::path dir, const std::string& id) : path_(std::move(dir) / (id + ".partial.csv")) {}

void PartialLog::write(const std::string& line) {
    std::lock_guard lk(mu_);
    if (!open_) {
        std::error_code ec;
        fs::create_directories(path_.parent_path(), ec);
        std::ofstream(path_, std::ios::trunc);
        open_ = true;
    }
    std::ofstream out(path_, std::ios::app);
    if (!out) throw std::runtime_error(path_.string() + ": cannot append partial results");
    out << line << "\n";
}

void PartialLog::finish() {
    std::lock_guard lk(mu_);
    std::error_code ec;
    if (open_) fs::remove(path_, ec);
    open_ = false;
}

}  // namespace qlink::exp
