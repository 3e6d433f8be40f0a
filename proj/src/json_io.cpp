#include "aptsp/json_io.hpp"

#include "aptsp/errors.hpp"

#include <charconv>
#include <fstream>

namespace aptsp {

namespace {

const Json& field(const Json& j, const char* name) {
    if (!j.is_object()) throw InvalidInput("expected a JSON object");
    auto it = j.find(name);
    if (it == j.end()) throw InvalidInput(std::string("missing field '") + name + "'");
    return *it;
}

int as_int(const Json& j, const char* what) {
    if (!j.is_number_integer()) throw InvalidInput(std::string(what) + " must be an integer");
    return j.get<int>();
}

double as_double(const Json& j, const char* what) {
    if (!j.is_number()) throw InvalidInput(std::string(what) + " must be a number");
    return j.get<double>();
}

}  // namespace

Json instance_to_json(const Instance& inst) {
    const int n = inst.size();
    Json j;
    j["n"] = n;
    Json matrix = Json::array();
    for (int i = 0; i < n; ++i) {
        Json row = Json::array();
        for (int k = 0; k < n; ++k) row.push_back(inst.dist(i, k));
        matrix.push_back(std::move(row));
    }
    j["matrix"] = std::move(matrix);
    j["p"] = std::vector<double>(inst.probs().begin(), inst.probs().end());
    j["depot"] = inst.depot() ? Json(*inst.depot()) : Json(nullptr);
    if (!inst.names().empty()) j["names"] = inst.names();
    return j;
}

Instance instance_from_json(const Json& j) {
    const int n = as_int(field(j, "n"), "n");
    if (n < 0) throw InvalidInput("n must be nonnegative");
    const Json& m = field(j, "matrix");
    if (!m.is_array() || static_cast<int>(m.size()) != n) throw InvalidInput("matrix must have n rows");
    std::vector<double> matrix;
    matrix.reserve(static_cast<std::size_t>(n) * n);
    for (const auto& row : m) {
        if (!row.is_array() || static_cast<int>(row.size()) != n) throw InvalidInput("matrix rows must have n entries");
        for (const auto& x : row) matrix.push_back(as_double(x, "matrix entry"));
    }
    const Json& pj = field(j, "p");
    if (!pj.is_array() || static_cast<int>(pj.size()) != n) throw InvalidInput("p must have n entries");
    std::vector<double> p;
    for (const auto& x : pj) p.push_back(as_double(x, "probability"));
    std::optional<int> depot;
    if (auto it = j.find("depot"); it != j.end() && !it->is_null()) depot = as_int(*it, "depot");
    std::vector<std::string> names;
    if (auto it = j.find("names"); it != j.end() && !it->is_null()) {
        if (!it->is_array() || static_cast<int>(it->size()) != n) throw InvalidInput("names must have n entries");
        for (const auto& s : *it) {
            if (!s.is_string()) throw InvalidInput("names must be strings");
            names.push_back(s.get<std::string>());
        }
    }
    return Instance(n, std::move(matrix), std::move(p), depot, std::move(names));
}

Json tour_to_json(const Tour& tour) { return Json{{"order", tour.order()}}; }

Tour tour_from_json(const Json& j) {
    const Json& o = field(j, "order");
    if (!o.is_array()) throw InvalidInput("order must be an array");
    std::vector<int> order;
    for (const auto& x : o) order.push_back(as_int(x, "tour entry"));
    return Tour(std::move(order));
}

Json active_set_to_json(const ActiveSet& a) { return Json{{"members", a.members}}; }

ActiveSet active_set_from_json(const Json& j) {
    const Json& m = field(j, "members");
    if (!m.is_array()) throw InvalidInput("members must be an array");
    ActiveSet a;
    for (const auto& x : m) a.members.push_back(as_int(x, "member"));
    return a;
}

Json report_to_json(const ExpectedCostReport& r) {
    Json j;
    j["value"] = r.value;
    j["method"] = to_string(r.method);
    j["stderr"] = r.stderr_value ? Json(*r.stderr_value) : Json(nullptr);
    j["samples"] = r.samples ? Json(*r.samples) : Json(nullptr);
    return j;
}

Rational rational_from_json(const Json& j) {
    if (j.is_string()) return parse_rational(j.get<std::string>());
    if (j.is_number_integer()) return Rational(mpz_class(std::to_string(j.get<long long>()), 10));
    if (j.is_number()) {
        char buf[64];
        auto res = std::to_chars(buf, buf + sizeof buf, j.get<double>());
        return parse_rational(std::string(buf, res.ptr));
    }
    throw InvalidInput("expected a number or a rational string");
}

namespace {

Json pair_entries(const std::map<PairKey, Rational>& m) {
    Json arr = Json::array();
    for (const auto& [k, q] : m) arr.push_back(Json::array({k.first, k.second, to_string(q)}));
    return arr;
}

Json single_entries(const std::map<int, Rational>& m) {
    Json arr = Json::array();
    for (const auto& [k, q] : m) arr.push_back(Json::array({k, to_string(q)}));
    return arr;
}

std::map<PairKey, Rational> read_pairs(const Json& j, const char* name) {
    std::map<PairKey, Rational> out;
    if (j.is_null()) return out;
    if (!j.is_array()) throw InvalidInput(std::string(name) + " must be an array of [i, j, value]");
    for (const auto& e : j) {
        if (!e.is_array() || e.size() != 3) throw InvalidInput(std::string(name) + " entries must be [i, j, value]");
        const PairKey key{as_int(e[0], name), as_int(e[1], name)};
        if (!out.emplace(key, rational_from_json(e[2])).second)
            throw InvalidInput(std::string("duplicate entry in ") + name);
    }
    return out;
}

std::map<int, Rational> read_singles(const Json& j, const char* name) {
    std::map<int, Rational> out;
    if (j.is_null()) return out;
    if (!j.is_array()) throw InvalidInput(std::string(name) + " must be an array of [k, value]");
    for (const auto& e : j) {
        if (!e.is_array() || e.size() != 2) throw InvalidInput(std::string(name) + " entries must be [k, value]");
        if (!out.emplace(as_int(e[0], name), rational_from_json(e[1])).second)
            throw InvalidInput(std::string("duplicate entry in ") + name);
    }
    return out;
}

const Json& optional_field(const Json& j, const char* name) {
    static const Json null_json;
    auto it = j.find(name);
    return it == j.end() ? null_json : *it;
}

}  // namespace

Json certificate_to_json(const DualCertificate& cert) {
    Json j;
    j["schema"] = kSchema;
    j["kind"] = to_string(cert.kind);
    Json cfg;
    const auto& p = cert.params;
    if (cert.kind == CertKind::sampling) {
        cfg["alpha"] = to_string(p.alpha);
        cfg["sigma"] = to_string(p.sigma);
        cfg["beta"] = to_string(p.beta);
        cfg["N"] = p.n_buckets;
        j["config"] = std::move(cfg);
        j["x"] = pair_entries(cert.x2);
        j["y"] = to_string(cert.y);
    } else {
        cfg["beta"] = to_string(p.beta);
        cfg["N"] = p.n_buckets;
        cfg["a"] = p.a;
        if (!p.h.empty()) cfg["h"] = p.h;
        j["config"] = std::move(cfg);
        j["x"] = single_entries(cert.x1);
        j["y"] = single_entries(cert.y1);
    }
    j["v"] = pair_entries(cert.v);
    j["w"] = pair_entries(cert.w);
    j["z"] = single_entries(cert.z);
    return j;
}

DualCertificate certificate_from_json(const Json& j) {
    DualCertificate cert;
    const Json& kind = field(j, "kind");
    if (!kind.is_string()) throw InvalidInput("kind must be a string");
    cert.kind = parse_cert_kind(kind.get<std::string>());
    const Json& cfg = field(j, "config");
    auto& p = cert.params;
    p.beta = rational_from_json(field(cfg, "beta"));
    p.n_buckets = as_int(field(cfg, "N"), "N");
    if (cert.kind == CertKind::sampling) {
        p.alpha = rational_from_json(field(cfg, "alpha"));
        p.sigma = rational_from_json(field(cfg, "sigma"));
        cert.x2 = read_pairs(optional_field(j, "x"), "x");
        const Json& y = optional_field(j, "y");
        cert.y = y.is_null() ? Rational(0) : rational_from_json(y);
        if (!optional_field(j, "z").is_null() && !optional_field(j, "z").empty())
            throw InvalidInput("sampling certificates have no z entries");
    } else {
        p.a = as_int(field(cfg, "a"), "a");
        if (const Json& h = optional_field(cfg, "h"); !h.is_null()) {
            if (!h.is_array()) throw InvalidInput("h must be an array");
            for (const auto& x : h) p.h.push_back(as_int(x, "h"));
        }
        cert.x1 = read_singles(optional_field(j, "x"), "x");
        cert.y1 = read_singles(optional_field(j, "y"), "y");
        cert.z = read_singles(optional_field(j, "z"), "z");
    }
    cert.v = read_pairs(optional_field(j, "v"), "v");
    cert.w = read_pairs(optional_field(j, "w"), "w");
    return cert;
}

Json read_json_file(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw InvalidInput("cannot open " + path.string());
    try {
        return Json::parse(in);
    } catch (const nlohmann::json::parse_error& e) {
        throw InvalidInput("invalid JSON in " + path.string() + ": " + e.what());
    }
}

void write_json_file(const std::filesystem::path& path, const Json& j) {
    std::ofstream out(path);
    if (!out) throw InvalidInput("cannot write " + path.string());
    out << j.dump(2) << '\n';
    if (!out) throw InvalidInput("write failed: " + path.string());
}

}  // namespace aptsp
