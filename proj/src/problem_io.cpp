#include "tilq/problem_io.hpp"

#include <fstream>
#include <sstream>

#include <json.hpp>

#include "tilq/errors.hpp"

namespace tilq {

using nlohmann::json;

namespace {

[[noreturn]] void fail(const std::string& path, const std::string& msg) {
    throw ParseError((path.empty() ? std::string("/") : path) + ": " + msg);
}

// Depth of nested arrays along the first element; a number has depth 0.
int depth(const json& j) {
    int d = 0;
    const json* cur = &j;
    while (cur->is_array()) {
        ++d;
        if (cur->empty()) break;
        cur = &(*cur)[0];
    }
    return d;
}

Matrix parse_matrix(const json& j, const std::string& path) {
    if (!j.is_array() || j.empty()) fail(path, "expected a non-empty array of rows");
    std::size_t rows = j.size();
    std::size_t cols = 0;
    for (std::size_t i = 0; i < rows; ++i) {
        const json& r = j[i];
        std::string rp = path + "/" + std::to_string(i);
        if (!r.is_array() || r.empty()) fail(rp, "expected a non-empty array of numbers");
        if (i == 0) cols = r.size();
        if (r.size() != cols) fail(rp, "ragged matrix row");
        for (std::size_t c = 0; c < cols; ++c)
            if (!r[c].is_number()) fail(rp + "/" + std::to_string(c), "expected a number");
    }
    Matrix m(rows, cols);
    for (std::size_t i = 0; i < rows; ++i)
        for (std::size_t c = 0; c < cols; ++c) m(i, c) = j[i][c].get<double>();
    return m;
}

std::vector<Matrix> parse_matrix_list(const json& j, const std::string& path) {
    if (!j.is_array() || j.empty()) fail(path, "expected a non-empty array of matrices");
    std::vector<Matrix> out;
    for (std::size_t i = 0; i < j.size(); ++i) out.push_back(parse_matrix(j[i], path + "/" + std::to_string(i)));
    return out;
}

Family parse_family(const json& doc, const std::string& key, int N) {
    std::string path = "/" + key;
    if (!doc.contains(key)) fail(path, "missing field");
    const json& j = doc[key];
    int d = depth(j);
    if (d == 2) return Family::constant(N, parse_matrix(j, path));
    if (d == 3) {
        if (static_cast<int>(j.size()) != N) fail(path, "per-k layout needs " + std::to_string(N) + " matrices");
        return Family::from_per_k(parse_matrix_list(j, path));
    }
    if (d == 4) {
        if (static_cast<int>(j.size()) != N) fail(path, "full layout needs " + std::to_string(N) + " rows over t");
        Family f(N, false);
        for (int t = 0; t < N; ++t) {
            std::string tp = path + "/" + std::to_string(t);
            const json& row = j[t];
            if (!row.is_array()) fail(tp, "expected an array over k");
            // Short rows leave entries missing; validation reports them.
            if (static_cast<int>(row.size()) > N - t) fail(tp, "too many entries for k in [t, N)");
            for (std::size_t i = 0; i < row.size(); ++i)
                f.at(t, t + static_cast<int>(i)) = parse_matrix(row[i], tp + "/" + std::to_string(i));
        }
        return f;
    }
    fail(path, "unrecognised layout (nesting depth " + std::to_string(d) + ")");
}

std::vector<Matrix> parse_terminal(const json& doc, const std::string& key, int N) {
    std::string path = "/" + key;
    if (!doc.contains(key)) fail(path, "missing field");
    const json& j = doc[key];
    int d = depth(j);
    if (d == 2) return std::vector<Matrix>(N, parse_matrix(j, path));
    if (d == 3) {
        if (static_cast<int>(j.size()) != N) fail(path, "per-t layout needs " + std::to_string(N) + " matrices");
        return parse_matrix_list(j, path);
    }
    fail(path, "unrecognised layout (nesting depth " + std::to_string(d) + ")");
}

int get_int(const json& doc, const std::string& key) {
    if (!doc.contains(key)) fail("/" + key, "missing field");
    const json& v = doc[key];
    if (!v.is_number_integer()) fail("/" + key, "expected an integer");
    return v.get<int>();
}

std::vector<Matrix> per_k(const json& dyn, const std::string& key, int N, const std::string& base) {
    std::string path = base + "/" + key;
    if (!dyn.contains(key)) fail(path, "missing field");
    const json& j = dyn[key];
    int d = depth(j);
    if (d == 2) return std::vector<Matrix>(N, parse_matrix(j, path));
    if (d == 3) {
        if (static_cast<int>(j.size()) != N) fail(path, "needs " + std::to_string(N) + " matrices");
        return parse_matrix_list(j, path);
    }
    fail(path, "dynamics must be per-k or a single matrix");
}

ProblemData load_discounted(const json& doc, int N, const Tolerances& tol) {
    const json& disc = doc["discount"];
    if (!disc.is_object()) fail("/discount", "expected an object");
    if (!disc.contains("kind") || !disc["kind"].is_string()) fail("/discount/kind", "expected a string");
    DiscountSpec spec;
    std::string kind = disc["kind"].get<std::string>();
    if (kind == "exponential") {
        spec.kind = DiscountKind::exponential;
        if (disc.contains("rate")) {
            if (!disc["rate"].is_number()) fail("/discount/rate", "expected a number");
            spec.rate = disc["rate"].get<double>();
        }
    } else if (kind == "hyperbolic") {
        spec.kind = DiscountKind::hyperbolic;
    } else if (kind == "custom") {
        spec.kind = DiscountKind::custom;
        if (!disc.contains("weights") || !disc["weights"].is_array()) fail("/discount/weights", "expected an array");
        for (std::size_t i = 0; i < disc["weights"].size(); ++i) {
            const json& w = disc["weights"][i];
            if (!w.is_number()) fail("/discount/weights/" + std::to_string(i), "expected a number");
            spec.weights.push_back(w.get<double>());
        }
    } else {
        fail("/discount/kind", "unknown kind '" + kind + "'");
    }
    for (const char* k : {"base_Q", "base_R", "base_G"}) {
        if (!doc.contains(k)) fail(std::string("/") + k, "missing field");
    }
    spec.base_Q = parse_matrix(doc["base_Q"], "/base_Q");
    spec.base_R = parse_matrix(doc["base_R"], "/base_R");
    spec.base_G = parse_matrix(doc["base_G"], "/base_G");
    if (!doc.contains("dynamics") || !doc["dynamics"].is_object()) fail("/dynamics", "expected an object");
    const json& dyn = doc["dynamics"];
    SharedDynamics d;
    d.A = per_k(dyn, "A", N, "/dynamics");
    d.B = per_k(dyn, "B", N, "/dynamics");
    d.C = per_k(dyn, "C", N, "/dynamics");
    d.D = per_k(dyn, "D", N, "/dynamics");
    try {
        return from_discounting(spec, d, N, tol);
    } catch (const InvalidInput& e) {
        throw ValidationError(e.what(), {e.what()});
    }
}

json matrix_json(const Matrix& m) {
    json rows = json::array();
    for (Eigen::Index i = 0; i < m.rows(); ++i) {
        json r = json::array();
        for (Eigen::Index c = 0; c < m.cols(); ++c) r.push_back(m(i, c));
        rows.push_back(r);
    }
    return rows;
}

json family_json(const Family& f) {
    json out = json::array();
    for (int t = 0; t < f.horizon(); ++t) {
        json row = json::array();
        for (int k = t; k <= f.last_k(); ++k) row.push_back(matrix_json(f.at(t, k)));
        out.push_back(row);
    }
    return out;
}

}  // namespace

ProblemData load_problem(const std::string& document, const Tolerances& tol) {
    json doc;
    try {
        doc = json::parse(document);
    } catch (const json::parse_error& e) {
        throw ParseError(std::string("malformed JSON: ") + e.what());
    }
    if (!doc.is_object()) fail("", "expected a JSON object");

    int N = get_int(doc, "N");
    int n = get_int(doc, "n");
    int m = get_int(doc, "m");
    if (N <= 0 || n <= 0 || m <= 0) {
        std::vector<std::string> v;
        if (N <= 0) v.push_back("N: must be positive");
        if (n <= 0) v.push_back("n: must be positive");
        if (m <= 0) v.push_back("m: must be positive");
        throw ValidationError("problem dimensions must be positive", v);
    }

    if (doc.contains("discount")) return load_discounted(doc, N, tol);

    ProblemData p;
    p.N = N;
    p.n = n;
    p.m = m;
    p.A = parse_family(doc, "A", N);
    p.B = parse_family(doc, "B", N);
    p.C = parse_family(doc, "C", N);
    p.D = parse_family(doc, "D", N);
    p.Q = parse_family(doc, "Q", N);
    p.R = parse_family(doc, "R", N);
    p.G = parse_terminal(doc, "G", N);

    bool declared = false;
    if (doc.contains("mode")) {
        if (!doc["mode"].is_string()) fail("/mode", "expected a string");
        try {
            p.mode = mode_from_string(doc["mode"].get<std::string>());
        } catch (const InvalidInput& e) {
            fail("/mode", e.what());
        }
        declared = true;
    }
    finalize(p, tol, declared);
    return p;
}

ProblemData load_problem_file(const std::string& path, const Tolerances& tol) {
    std::ifstream in(path);
    if (!in) throw InvalidInput("cannot open problem file '" + path + "'");
    std::stringstream ss;
    ss << in.rdbuf();
    try {
        return load_problem(ss.str(), tol);
    } catch (const ParseError& e) {
        throw ParseError(path + ": " + e.what());
    }
}

std::string serialize(const ProblemData& p, int indent) {
    json doc;
    doc["N"] = p.N;
    doc["n"] = p.n;
    doc["m"] = p.m;
    doc["mode"] = to_string(p.mode);
    doc["A"] = family_json(p.A);
    doc["B"] = family_json(p.B);
    doc["C"] = family_json(p.C);
    doc["D"] = family_json(p.D);
    doc["Q"] = family_json(p.Q);
    doc["R"] = family_json(p.R);
    json g = json::array();
    for (const Matrix& m : p.G) g.push_back(matrix_json(m));
    doc["G"] = g;
    return doc.dump(indent);
}

}  // namespace tilq
