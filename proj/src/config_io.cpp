#include "fkg/config_io.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <memory>
#include <sstream>

#include <json.hpp>

#include "fkg/errors.hpp"

namespace fkg {

namespace {

std::size_t bracket(const std::vector<double>& nodes, double s) {
    // index k with nodes[k] <= s < nodes[k+1], clamped to a valid segment
    const auto it = std::upper_bound(nodes.begin(), nodes.end(), s);
    const auto k = static_cast<std::size_t>(std::max<std::ptrdiff_t>(0, (it - nodes.begin()) - 1));
    return std::min(k, nodes.size() - 2);
}

double clamp_to(const std::vector<double>& nodes, double s) { return std::clamp(s, nodes.front(), nodes.back()); }

std::vector<std::string> split_csv(const std::string& line) {
    std::vector<std::string> out;
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) {
        cell.erase(0, cell.find_first_not_of(" \t\r"));
        cell.erase(cell.find_last_not_of(" \t\r") + 1);
        out.push_back(cell);
    }
    return out;
}

double parse_double(const std::string& text, const std::string& context) {
    try {
        std::size_t used = 0;
        const double v = std::stod(text, &used);
        if (used != text.size()) throw std::invalid_argument(text);
        return v;
    } catch (const std::exception&) {
        throw ConfigError({context + ": cannot parse number '" + text + "'"});
    }
}

std::vector<std::vector<double>> read_numeric_csv(const std::filesystem::path& path,
                                                  const std::vector<std::string>& header) {
    std::ifstream in(path);
    if (!in) throw ConfigError({"cannot open table " + path.string()});
    std::string line;
    if (!std::getline(in, line)) throw ConfigError({path.string() + ": empty file"});
    const auto cols = split_csv(line);
    if (cols.size() != header.size() || !std::equal(cols.begin(), cols.end(), header.begin(), header.end(),
                                                     [](const std::string& a, const std::string& b) { return a == b; })) {
        std::string want;
        for (const auto& h : header) want += (want.empty() ? "" : ",") + h;
        throw ConfigError({path.string() + ": expected header '" + want + "', got '" + line + "'"});
    }
    std::vector<std::vector<double>> rows;
    int lineno = 1;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
        const auto cells = split_csv(line);
        if (cells.size() != header.size())
            throw ConfigError({path.string() + ":" + std::to_string(lineno) + ": wrong number of columns"});
        std::vector<double> row;
        for (const auto& c : cells) row.push_back(parse_double(c, path.string() + ":" + std::to_string(lineno)));
        rows.push_back(std::move(row));
    }
    return rows;
}

}  // namespace

Table1D::Table1D(std::vector<double> s, std::vector<double> y) : s_(std::move(s)), y_(std::move(y)) {
    if (s_.size() < 2 || s_.size() != y_.size()) throw std::invalid_argument("Table1D: need at least two nodes");
    if (!std::is_sorted(s_.begin(), s_.end()) || std::adjacent_find(s_.begin(), s_.end()) != s_.end())
        throw std::invalid_argument("Table1D: nodes must be strictly increasing");
}

double Table1D::operator()(double s) const {
    s = clamp_to(s_, s);
    const std::size_t k = bracket(s_, s);
    const double w = (s - s_[k]) / (s_[k + 1] - s_[k]);
    return (1.0 - w) * y_[k] + w * y_[k + 1];
}

double Table1D::integral_from_zero(double s) const {
    // Piecewise-linear segments integrate exactly with the trapezoid rule; the
    // clamped tails are constant.
    auto antiderivative = [this](double upto) {
        double acc = 0.0;
        double prev = std::min(0.0, upto);
        if (upto <= s_.front()) return (upto - prev) * y_.front();
        if (prev < s_.front()) acc += (s_.front() - prev) * y_.front(), prev = s_.front();
        for (std::size_t k = 0; k + 1 < s_.size() && prev < upto; ++k) {
            if (s_[k + 1] <= prev) continue;
            const double hi = std::min(upto, s_[k + 1]);
            acc += 0.5 * ((*this)(prev) + (*this)(hi)) * (hi - prev);
            prev = hi;
        }
        if (upto > s_.back()) acc += (upto - s_.back()) * y_.back();
        return acc;
    };
    return s >= 0.0 ? antiderivative(s) - antiderivative(0.0) : -(antiderivative(0.0) - antiderivative(s));
}

Table2D::Table2D(std::vector<double> s, std::vector<double> r, std::vector<double> z)
    : s_(std::move(s)), r_(std::move(r)), z_(std::move(z)) {
    if (s_.size() < 2 || r_.size() < 2 || z_.size() != s_.size() * r_.size())
        throw std::invalid_argument("Table2D: need a full grid of at least 2x2 nodes");
}

double Table2D::operator()(double s, double r) const {
    s = clamp_to(s_, s);
    r = clamp_to(r_, r);
    const std::size_t i = bracket(s_, s);
    const std::size_t k = bracket(r_, r);
    const double ws = (s - s_[i]) / (s_[i + 1] - s_[i]);
    const double wr = (r - r_[k]) / (r_[k + 1] - r_[k]);
    return (1 - ws) * ((1 - wr) * at(i, k) + wr * at(i, k + 1)) + ws * ((1 - wr) * at(i + 1, k) + wr * at(i + 1, k + 1));
}

Table2D read_table2d(const std::filesystem::path& path, const std::string& s_name, const std::string& r_name,
                     const std::string& value_name) {
    const auto rows = read_numeric_csv(path, {s_name, r_name, value_name});
    std::vector<double> s, r;
    for (const auto& row : rows) {
        s.push_back(row[0]);
        r.push_back(row[1]);
    }
    std::sort(s.begin(), s.end());
    s.erase(std::unique(s.begin(), s.end()), s.end());
    std::sort(r.begin(), r.end());
    r.erase(std::unique(r.begin(), r.end()), r.end());
    if (s.size() < 2 || r.size() < 2 || rows.size() != s.size() * r.size())
        throw ConfigError({path.string() + ": rows do not form a full " + s_name + " x " + r_name + " grid"});
    std::vector<double> z(rows.size(), std::nan(""));
    for (const auto& row : rows) {
        const auto is = static_cast<std::size_t>(std::lower_bound(s.begin(), s.end(), row[0]) - s.begin());
        const auto ir = static_cast<std::size_t>(std::lower_bound(r.begin(), r.end(), row[1]) - r.begin());
        z[is * r.size() + ir] = row[2];
    }
    if (std::any_of(z.begin(), z.end(), [](double v) { return std::isnan(v); }))
        throw ConfigError({path.string() + ": duplicate or missing grid entries"});
    return Table2D(std::move(s), std::move(r), std::move(z));
}

Table1D read_table1d(const std::filesystem::path& path, const std::string& s_name, const std::string& value_name) {
    const auto rows = read_numeric_csv(path, {s_name, value_name});
    std::vector<std::pair<double, double>> pts;
    for (const auto& row : rows) pts.emplace_back(row[0], row[1]);
    std::sort(pts.begin(), pts.end());
    std::vector<double> s, y;
    for (const auto& [a, b] : pts) {
        s.push_back(a);
        y.push_back(b);
    }
    try {
        return Table1D(std::move(s), std::move(y));
    } catch (const std::invalid_argument& e) {
        throw ConfigError({path.string() + ": " + e.what()});
    }
}

ConfigSource preset_source(int example_id) {
    ConfigSource src;
    src.example = example_id;
    src.scalars = preset_scalars(example_id);
    return src;
}

namespace {

const std::vector<std::string>& scalar_keys() {
    static const std::vector<std::string> keys = {"rho", "K_gomp", "d_gomp", "ell", "a_max", "T", "M", "N", "dx"};
    return keys;
}

void set_scalar(ModelScalars& s, const std::string& key, double v, const std::string& context) {
    auto as_int = [&](int& slot) {
        if (v != std::floor(v) || std::abs(v) > 1e9) throw ConfigError({context + ": " + key + " must be an integer"});
        slot = static_cast<int>(v);
    };
    if (key == "rho") s.rho = v;
    else if (key == "K_gomp") s.K_gomp = v;
    else if (key == "d_gomp") s.d_gomp = v;
    else if (key == "ell") s.ell = v;
    else if (key == "a_max") s.a_max = v;
    else if (key == "T") s.T = v;
    else if (key == "M") as_int(s.M);
    else if (key == "N") as_int(s.N);
    else if (key == "dx") s.dx = v;
    else throw ConfigError({context + ": unknown key '" + key + "'"});
}

}  // namespace

ConfigSource read_config_file(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError({"cannot open config file " + path.string()});
    nlohmann::json doc;
    try {
        doc = nlohmann::json::parse(in);
    } catch (const nlohmann::json::parse_error& e) {
        throw ConfigError({path.string() + ": " + e.what()});
    }
    if (!doc.is_object()) throw ConfigError({path.string() + ": top level must be an object"});

    std::vector<std::string> problems;
    ConfigSource src;
    if (doc.contains("example")) {
        try {
            src = preset_source(doc["example"].get<int>());
        } catch (const std::exception& e) {
            problems.push_back(std::string("example: ") + e.what());
        }
    }
    const auto base = path.parent_path();
    for (const auto& [key, value] : doc.items()) {
        if (key == "example") continue;
        if (key == "u0" || key == "u0_bar" || key == "D" || key == "mu") {
            if (!value.is_string()) {
                problems.push_back(key + ": expected a CSV path");
                continue;
            }
            const std::filesystem::path p = base / value.get<std::string>();
            if (key == "u0") src.u0_table = p;
            else if (key == "u0_bar") src.u0_bar_table = p;
            else if (key == "D") src.D_table = p;
            else src.mu_table = p;
            continue;
        }
        if (std::find(scalar_keys().begin(), scalar_keys().end(), key) == scalar_keys().end()) {
            problems.push_back("unknown key '" + key + "'");
            continue;
        }
        if (!value.is_number()) {
            problems.push_back(key + ": expected a number");
            continue;
        }
        try {
            set_scalar(src.scalars, key, value.get<double>(), path.string());
        } catch (const ConfigError& e) {
            problems.insert(problems.end(), e.problems().begin(), e.problems().end());
        }
    }
    if (!src.example) {
        for (const auto& key : scalar_keys())
            if (!doc.contains(key)) src.missing.push_back(key);
        for (const char* key : {"u0", "u0_bar", "D"})
            if (!doc.contains(key)) problems.push_back(std::string(key) + ": required when no example preset is given");
    }
    if (!problems.empty()) throw ConfigError(std::move(problems));
    return src;
}

void apply_override(ConfigSource& source, const std::string& key, const std::string& value) {
    set_scalar(source.scalars, key, parse_double(value, "override " + key), "override");
    std::erase(source.missing, key);
}

ModelConfig build_config(const ConfigSource& source) {
    std::vector<std::string> problems;
    for (const auto& key : source.missing) problems.push_back(key + ": required when no example preset is given");

    ModelConfig cfg;
    if (source.example) {
        cfg = make_preset(*source.example, source.scalars);
    } else {
        static_cast<ModelScalars&>(cfg) = source.scalars;
        const double a_max = source.scalars.a_max;
        cfg.mortality = [a_max](double a) { return 1.0 / (a_max - a); };
        cfg.survival = [a_max](double a) { return survival(a, a_max); };
    }

    const double ell = source.scalars.ell;
    auto load_density = [&](const std::optional<std::filesystem::path>& p, const char* key, const char* first)
        -> std::shared_ptr<const Table2D> {
        if (!p) return nullptr;
        try {
            auto table = std::make_shared<const Table2D>(read_table2d(*p, first, "x", "u"));
            for (std::size_t i = 0; i < table->s_nodes().size(); ++i)
                for (std::size_t k = 0; k < table->r_nodes().size(); ++k)
                    if (!(table->at(i, k) > 0.0)) {
                        char buf[200];
                        std::snprintf(buf, sizeof buf, "%s: non-positive value %g at (%s=%g, x=%g)", key, table->at(i, k),
                                      first, table->s_nodes()[i], table->r_nodes()[k]);
                        problems.emplace_back(buf);
                    }
            const double tol = 1e-9 * std::max(1.0, ell);
            if (table->r_nodes().front() > -ell + tol || table->r_nodes().back() < ell - tol)
                problems.push_back(std::string(key) + ": x-range of the table does not cover [-ell, ell]");
            return table;
        } catch (const ConfigError& e) {
            problems.insert(problems.end(), e.problems().begin(), e.problems().end());
            return nullptr;
        }
    };

    if (auto t = load_density(source.u0_table, "u0", "a")) cfg.u0 = [t](double a, double x) { return (*t)(a, x); };
    if (auto t = load_density(source.u0_bar_table, "u0_bar", "t"))
        cfg.u0_bar = [t](double tt, double x) { return (*t)(tt, x); };
    if (source.D_table) {
        try {
            auto t = std::make_shared<const Table2D>(read_table2d(*source.D_table, "t", "a", "D"));
            cfg.diffusion = [t](double tt, double a) { return (*t)(tt, a); };
        } catch (const ConfigError& e) {
            problems.insert(problems.end(), e.problems().begin(), e.problems().end());
        }
    }
    if (source.mu_table) {
        try {
            auto t = std::make_shared<const Table1D>(read_table1d(*source.mu_table, "a", "mu"));
            cfg.mortality = [t](double a) { return (*t)(a); };
            cfg.survival = [t](double a) { return std::exp(-t->integral_from_zero(a)); };
        } catch (const ConfigError& e) {
            problems.insert(problems.end(), e.problems().begin(), e.problems().end());
        }
    }
    if (!source.example) cfg.label = "custom";
    if (!problems.empty()) throw ConfigError(std::move(problems));
    return cfg;
}

}  // namespace fkg
