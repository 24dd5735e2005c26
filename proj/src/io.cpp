#include "xvine/io.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>

#include "xvine/error.hpp"

namespace xvine {

using nlohmann::json;

namespace {

std::vector<std::string> split_line(const std::string& line) {
    std::vector<std::string> out;
    std::string cell;
    std::istringstream ss(line);
    while (std::getline(ss, cell, ',')) {
        auto b = cell.find_first_not_of(" \t\r\"");
        auto e = cell.find_last_not_of(" \t\r\"");
        out.push_back(b == std::string::npos ? "" : cell.substr(b, e - b + 1));
    }
    if (!line.empty() && line.back() == ',') out.emplace_back();
    return out;
}

std::string fmt17(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

}  // namespace

Matrix parse_csv(std::istream& in) {
    std::string line;
    if (!std::getline(in, line)) fail(ErrorKind::Parse, "CSV input is empty");
    Matrix m;
    m.names = split_line(line);
    m.cols = m.names.size();
    if (m.cols == 0) fail(ErrorKind::Parse, "CSV header has no columns");
    std::size_t lineno = 1;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
        auto cells = split_line(line);
        if (cells.size() != m.cols)
            fail(ErrorKind::Parse, "line " + std::to_string(lineno) + " has " + std::to_string(cells.size()) +
                                       " fields, expected " + std::to_string(m.cols));
        for (const auto& c : cells) {
            std::size_t used = 0;
            double v;
            try {
                v = std::stod(c, &used);
            } catch (const std::exception&) {
                used = 0;
            }
            if (used == 0 || used != c.size())
                fail(ErrorKind::Parse, "line " + std::to_string(lineno) + ": '" + c + "' is not a number");
            m.data.push_back(v);
        }
        ++m.rows;
    }
    return m;
}

Matrix read_csv(const std::string& path) {
    std::ifstream in(path);
    if (!in) fail(ErrorKind::Io, "cannot open " + path);
    return parse_csv(in);
}

void write_csv(std::ostream& out, const Matrix& m) {
    for (std::size_t j = 0; j < m.cols; ++j) {
        if (j) out << ',';
        out << (j < m.names.size() ? m.names[j] : "V" + std::to_string(j + 1));
    }
    out << '\n';
    for (std::size_t i = 0; i < m.rows; ++i) {
        for (std::size_t j = 0; j < m.cols; ++j) {
            if (j) out << ',';
            out << fmt17(m(i, j));
        }
        out << '\n';
    }
}

void write_csv(const std::string& path, const Matrix& m) {
    std::ofstream out(path);
    if (!out) fail(ErrorKind::Io, "cannot write " + path);
    write_csv(out, m);
    if (!out) fail(ErrorKind::Io, "write to " + path + " failed");
}

std::string read_text(const std::string& path) {
    std::ifstream in(path);
    if (!in) fail(ErrorKind::Io, "cannot open " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

void write_text(const std::string& path, const std::string& text) {
    std::ofstream out(path);
    if (!out) fail(ErrorKind::Io, "cannot write " + path);
    out << text;
    if (!out) fail(ErrorKind::Io, "write to " + path + " failed");
}

json parse_json(const std::string& text) {
    try {
        return json::parse(text);
    } catch (const json::parse_error& e) {
        fail(ErrorKind::Parse, std::string("invalid JSON: ") + e.what());
    }
}

json structure_to_json(const StructureMatrix& m) {
    json rows = json::array();
    for (int i = 1; i <= m.d; ++i) {
        json row = json::array();
        for (int j = 1; j <= m.d; ++j) row.push_back(m.at(i, j));
        rows.push_back(row);
    }
    return {{"d", m.d}, {"trunc", m.trunc}, {"matrix", rows}};
}

StructureMatrix structure_from_json(const json& j) {
    try {
        StructureMatrix m;
        m.d = j.at("d").get<int>();
        m.trunc = j.contains("trunc") ? j.at("trunc").get<int>() : m.d - 1;
        const auto& rows = j.at("matrix");
        if (m.d < 2 || m.d > NodeSet::kMaxNode) fail(ErrorKind::MalformedMatrix, "d out of range");
        if (!rows.is_array() || static_cast<int>(rows.size()) != m.d)
            fail(ErrorKind::MalformedMatrix, "matrix must have d rows");
        m.m.assign(static_cast<std::size_t>(m.d) * m.d, 0);
        for (int i = 0; i < m.d; ++i) {
            if (!rows[i].is_array() || static_cast<int>(rows[i].size()) != m.d)
                fail(ErrorKind::MalformedMatrix, "matrix row " + std::to_string(i + 1) + " must have d entries");
            for (int k = 0; k < m.d; ++k) m.at(i + 1, k + 1) = rows[i][k].get<int>();
        }
        check_structure_matrix(m);
        return m;
    } catch (const json::exception& e) {
        fail(ErrorKind::Parse, std::string("structure JSON: ") + e.what());
    }
}

namespace {

json edge_json(const EdgeKey& k, const std::string& family, double theta) {
    return {{"a", k.a}, {"b", k.b}, {"cond", k.cond.to_vector()}, {"family", family}, {"theta", theta}};
}

}  // namespace

json model_to_json(const XVineSpec& spec) {
    json edges = json::array();
    for (const auto& [k, f] : spec.tails()) edges.push_back(edge_json(k, to_string(f.kind), f.theta));
    for (const auto& [k, f] : spec.pairs()) edges.push_back(edge_json(k, to_string(f.kind), f.theta));
    return {{"structure", structure_to_json(to_structure_matrix(spec.vine()))}, {"edges", edges}};
}

XVineSpec model_from_json(const json& j) {
    try {
        VineSequence v = from_structure_matrix(structure_from_json(j.at("structure")));
        std::map<EdgeKey, TailFamily> tails;
        std::map<EdgeKey, PairFamily> pairs;
        for (const auto& e : j.at("edges")) {
            std::vector<int> cond = e.contains("cond") ? e.at("cond").get<std::vector<int>>() : std::vector<int>{};
            EdgeKey k = make_key(e.at("a").get<int>(), e.at("b").get<int>(), NodeSet::of(cond));
            const std::string fam = e.at("family").get<std::string>();
            const double theta = e.contains("theta") && !e.at("theta").is_null() ? e.at("theta").get<double>() : 0.0;
            bool fresh;
            if (k.level() == 1) {
                TailKind kind;
                if (!parse_tail_kind(fam, kind))
                    fail(ErrorKind::InvalidSpec, "edge " + k.label() + ": unknown tail family '" + fam + "'");
                fresh = tails.emplace(k, TailFamily{kind, theta}).second;
            } else {
                PairKind kind;
                if (!parse_pair_kind(fam, kind))
                    fail(ErrorKind::InvalidSpec, "edge " + k.label() + ": unknown pair family '" + fam + "'");
                fresh = pairs.emplace(k, PairFamily{kind, theta}).second;
            }
            if (!fresh) fail(ErrorKind::InvalidSpec, "edge " + k.label() + " listed twice");
        }
        return XVineSpec(v, tails, pairs);
    } catch (const json::exception& e) {
        fail(ErrorKind::Parse, std::string("model JSON: ") + e.what());
    } catch (const Error& e) {
        if (e.kind() == ErrorKind::DomainError) fail(ErrorKind::InvalidSpec, e.what());
        throw;
    }
}

json report_to_json(const FitReport& rep) {
    json edges = json::array();
    for (const auto& e : rep.edges) {
        json j = edge_json(e.key, e.family, e.theta);
        if (e.family.empty()) j["family"] = nullptr;
        j["logL"] = e.loglik;
        if (e.key.level() == 1) {
            j["logL_a"] = e.loglik_a;
            j["logL_b"] = e.loglik_b;
        } else {
            j["tau"] = e.tau_hat;
            j["forced"] = e.forced;
        }
        j["aic"] = e.aic;
        j["n_eff"] = e.n_eff;
        j["selected_over"] = e.selected_over;
        j["boundary"] = e.boundary;
        if (!e.error.empty()) j["error"] = e.error;
        edges.push_back(j);
    }
    return {{"structure", structure_to_json(to_structure_matrix(rep.vine))},
            {"edges", edges},
            {"mbic", rep.mbic},
            {"q_star", rep.q_star},
            {"errors", rep.errors}};
}

}  // namespace xvine
