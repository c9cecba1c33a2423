// Net documents (versioned JSON, decimal strings) and Wavefront OBJ export.
#pragma once

#include "latticelie/cauchy.hpp"
#include "latticelie/envelope.hpp"

#include "json.hpp"

#include <charconv>
#include <fstream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <system_error>

namespace latticelie {

inline constexpr int kFormatVersion = 1;

struct IoError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct VersionError : IoError {
    using IoError::IoError;
};

// Points and scalars are kept as the strings that were read or written, so a
// load/save cycle is the identity and rational values survive unchanged.
struct EnvelopeRecord {
    int seed_i = 0, seed_j = 0;
    // Per face, row-major: s numerator, s denominator, t numerator, t denominator.
    std::vector<std::array<std::string, 4>> params;
};

struct CauchyRecord {
    std::vector<int> known;  // row-major 0/1 mask over the vertices
    int seed_i = 0, seed_j = 0;
};

struct Metadata {
    std::optional<std::uint64_t> rng_seed;
    std::string kind;
    std::map<std::string, double> tolerances;
};

struct NetDocument {
    int format_version = kFormatVersion;
    int rows = 0, cols = 0;
    std::vector<std::array<std::string, 4>> points;
    std::optional<std::vector<std::string>> p_field;  // (rows-1)(cols-1) faces, row-major
    std::optional<EnvelopeRecord> envelope;
    std::optional<CauchyRecord> cauchy;
    std::optional<Metadata> metadata;

    bool operator==(const NetDocument&) const = default;
};

inline bool operator==(const EnvelopeRecord& a, const EnvelopeRecord& b) {
    return a.seed_i == b.seed_i && a.seed_j == b.seed_j && a.params == b.params;
}
inline bool operator==(const CauchyRecord& a, const CauchyRecord& b) {
    return a.known == b.known && a.seed_i == b.seed_i && a.seed_j == b.seed_j;
}
inline bool operator==(const Metadata& a, const Metadata& b) {
    return a.rng_seed == b.rng_seed && a.kind == b.kind && a.tolerances == b.tolerances;
}

// ---------------------------------------------------------------------------
// Scalars <-> decimal strings.

inline std::string format_scalar(double x) {
    if (!std::isfinite(x)) throw IoError("cannot serialize non-finite value");
    char buf[64];
    auto res = std::to_chars(buf, buf + sizeof buf, x);
    return std::string(buf, res.ptr);
}

inline std::string format_scalar(const Rational& x) { return x.str(); }

namespace detail {

// Exact value of an integer, fraction "a/b" or decimal literal with optional exponent.
inline std::optional<Rational> parse_exact(const std::string& s) {
    if (s.empty()) return std::nullopt;
    auto slash = s.find('/');
    try {
        if (slash != std::string::npos) {
            auto a0 = parse_exact(s.substr(0, slash)), b0 = parse_exact(s.substr(slash + 1));
            if (!a0 || !b0 || *b0 == 0) return std::nullopt;
            return Rational(*a0 / *b0);
        }
        std::size_t pos = 0;
        bool neg = false;
        if (s[pos] == '+' || s[pos] == '-') neg = s[pos++] == '-';
        std::string digits;
        long exp10 = 0;
        bool any = false, dot = false;
        for (; pos < s.size(); ++pos) {
            char c = s[pos];
            if (c >= '0' && c <= '9') {
                digits += c;
                any = true;
                if (dot) --exp10;
            } else if (c == '.' && !dot) {
                dot = true;
            } else {
                break;
            }
        }
        if (!any) return std::nullopt;
        if (pos < s.size()) {
            if (s[pos] != 'e' && s[pos] != 'E') return std::nullopt;
            long e = 0;
            auto r = std::from_chars(s.data() + pos + 1 + (s[pos + 1] == '+'), s.data() + s.size(), e);
            if (r.ec != std::errc() || r.ptr != s.data() + s.size()) return std::nullopt;
            exp10 += e;
        }
        if (std::labs(exp10) > 4000) return std::nullopt;
        // cpp_int reads a leading zero as an octal prefix.
        auto nz = digits.find_first_not_of('0');
        digits = nz == std::string::npos ? "0" : digits.substr(nz);
        Rational v{BigInt(digits)};
        BigInt p = boost::multiprecision::pow(BigInt(10), unsigned(std::labs(exp10)));
        v = exp10 >= 0 ? Rational(v * p) : Rational(v / p);
        return neg ? Rational(-v) : v;
    } catch (const std::exception&) {
        return std::nullopt;
    }
}

}  // namespace detail

template <Field S>
S parse_scalar(const std::string& s, const std::string& field) {
    if constexpr (is_exact_v<S>) {
        auto v = detail::parse_exact(s);
        if (!v) throw IoError("field '" + field + "': not a decimal or fraction: \"" + s + "\"");
        return *v;
    } else {
        double x = 0;
        auto r = std::from_chars(s.data(), s.data() + s.size(), x);
        if (r.ec == std::errc() && r.ptr == s.data() + s.size() && std::isfinite(x)) return x;
        auto v = detail::parse_exact(s);
        if (!v) throw IoError("field '" + field + "': not a decimal or fraction: \"" + s + "\"");
        return v->template convert_to<double>();
    }
}

// ---------------------------------------------------------------------------
// Document <-> library objects.

template <Field S>
NetDocument make_document(const AsymptoticNet<S>& n) {
    NetDocument d;
    d.rows = n.rows;
    d.cols = n.cols;
    for (const auto& x : n.v) d.points.push_back({format_scalar(x[0]), format_scalar(x[1]), format_scalar(x[2]),
                                                  format_scalar(x[3])});
    return d;
}

template <Field S>
void set_p_field(NetDocument& d, const QuadricField<S>& p) {
    if (p.rows != d.rows - 1 || p.cols != d.cols - 1) throw std::invalid_argument("set_p_field: shape mismatch");
    std::vector<std::string> out;
    for (const auto& x : p.v) out.push_back(format_scalar(x));
    d.p_field = std::move(out);
}

inline void set_envelope(NetDocument& d, const Envelope& e) {
    EnvelopeRecord r;
    r.seed_i = e.seed_i;
    r.seed_j = e.seed_j;
    for (const auto& g : e.params.v)
        r.params.push_back({format_scalar(g.s.num), format_scalar(g.s.den), format_scalar(g.t.num),
                            format_scalar(g.t.den)});
    d.envelope = std::move(r);
}

template <Field S>
AsymptoticNet<S> net_from(const NetDocument& d) {
    AsymptoticNet<S> n(d.rows, d.cols);
    for (std::size_t k = 0; k < d.points.size(); ++k) {
        HomPoint<S> x;
        for (int c = 0; c < 4; ++c)
            x[c] = parse_scalar<S>(d.points[k][c], "points[" + std::to_string(k) + "][" + std::to_string(c) + "]");
        n.v[k] = x;
    }
    return n;
}

template <Field S>
std::optional<QuadricField<S>> p_field_from(const NetDocument& d) {
    if (!d.p_field) return std::nullopt;
    QuadricField<S> p(d.rows - 1, d.cols - 1);
    for (std::size_t k = 0; k < d.p_field->size(); ++k)
        p.v[k] = parse_scalar<S>((*d.p_field)[k], "p_field[" + std::to_string(k) + "]");
    return p;
}

// Rebuilds the envelope from its seed label and checks every stored label
// against the propagated one.
inline Envelope envelope_from(const NetDocument& d, const AsymptoticNet<double>& n, const QuadricField<double>& p,
                              double tol = 1e-9) {
    if (!d.envelope) throw IoError("document has no envelope");
    const auto& r = *d.envelope;
    auto label = [&](std::size_t k) {
        std::string f = "envelope.params[" + std::to_string(k) + "]";
        const auto& a = r.params[k];
        return GenParam<double>{{parse_scalar<double>(a[0], f), parse_scalar<double>(a[1], f)},
                                {parse_scalar<double>(a[2], f), parse_scalar<double>(a[3], f)}};
    };
    const int FC = d.cols - 1;
    auto e = trace_envelope(n, p, r.seed_i, r.seed_j, label(std::size_t(r.seed_i) * FC + r.seed_j));
    for (std::size_t k = 0; k < r.params.size(); ++k) {
        auto g = label(k);
        const auto& h = e.params.v[k];
        if (detail::label_distance(g.s, h.s) > tol || detail::label_distance(g.t, h.t) > tol)
            throw IoError("envelope.params[" + std::to_string(k) + "] disagrees with the propagated envelope");
    }
    return e;
}

inline CauchyData cauchy_from(const NetDocument& d, double p0) {
    if (!d.cauchy) throw IoError("document has no cauchy section");
    CauchyData c;
    c.rows = d.rows;
    c.cols = d.cols;
    c.points = net_from<double>(d);
    c.known = Grid<char>(d.rows, d.cols, 0);
    for (std::size_t k = 0; k < d.cauchy->known.size(); ++k) c.known.v[k] = char(d.cauchy->known[k] != 0);
    c.p0 = p0;
    c.seed_i = d.cauchy->seed_i;
    c.seed_j = d.cauchy->seed_j;
    return c;
}

inline NetDocument make_document(const CauchyData& c) {
    auto d = make_document(c.points);
    CauchyRecord r;
    for (char k : c.known.v) r.known.push_back(k ? 1 : 0);
    r.seed_i = c.seed_i;
    r.seed_j = c.seed_j;
    d.cauchy = std::move(r);
    return d;
}

// ---------------------------------------------------------------------------
// JSON.

inline nlohmann::ordered_json to_json(const NetDocument& d) {
    nlohmann::ordered_json j;
    j["format_version"] = d.format_version;
    j["rows"] = d.rows;
    j["cols"] = d.cols;
    j["points"] = d.points;
    if (d.p_field) j["p_field"] = *d.p_field;
    if (d.envelope) j["envelope"] = {{"seed", {d.envelope->seed_i, d.envelope->seed_j}}, {"params", d.envelope->params}};
    if (d.cauchy) j["cauchy"] = {{"seed", {d.cauchy->seed_i, d.cauchy->seed_j}}, {"known", d.cauchy->known}};
    if (d.metadata) {
        nlohmann::ordered_json m;
        if (d.metadata->rng_seed) m["rng_seed"] = *d.metadata->rng_seed;
        if (!d.metadata->kind.empty()) m["kind"] = d.metadata->kind;
        m["tolerances"] = nlohmann::ordered_json::object();
        for (const auto& [k, v] : d.metadata->tolerances) m["tolerances"][k] = v;
        j["metadata"] = m;
    }
    return j;
}

namespace detail {

using Json = nlohmann::json;

inline const Json& field(const Json& j, const char* name, const std::string& where) {
    if (!j.is_object() || !j.contains(name)) throw IoError("missing field '" + where + name + "'");
    return j.at(name);
}

inline int int_field(const Json& j, const char* name, const std::string& where) {
    const auto& v = field(j, name, where);
    if (!v.is_number_integer()) throw IoError("field '" + where + name + "' must be an integer");
    return v.get<int>();
}

template <std::size_t N>
std::array<std::string, N> string_tuple(const Json& v, const std::string& where) {
    if (!v.is_array() || v.size() != N)
        throw IoError("field '" + where + "' must be a list of " + std::to_string(N) + " strings");
    std::array<std::string, N> out;
    for (std::size_t c = 0; c < N; ++c) {
        if (!v[c].is_string()) throw IoError("field '" + where + "[" + std::to_string(c) + "]' must be a string");
        out[c] = v[c].get<std::string>();
    }
    return out;
}

inline std::pair<int, int> index_pair(const Json& v, const std::string& where) {
    if (!v.is_array() || v.size() != 2 || !v[0].is_number_integer() || !v[1].is_number_integer())
        throw IoError("field '" + where + "' must be a pair of integers");
    return {v[0].get<int>(), v[1].get<int>()};
}

inline void check_number(const std::string& s, const std::string& where) { parse_scalar<Rational>(s, where); }

}  // namespace detail

inline NetDocument from_json(const nlohmann::json& j) {
    using detail::field;
    if (!j.is_object()) throw IoError("document must be a JSON object");
    NetDocument d;
    d.format_version = detail::int_field(j, "format_version", "");
    if (d.format_version != kFormatVersion)
        throw VersionError("unsupported format_version " + std::to_string(d.format_version) + " (expected " +
                           std::to_string(kFormatVersion) + ")");
    d.rows = detail::int_field(j, "rows", "");
    d.cols = detail::int_field(j, "cols", "");
    if (d.rows < 2 || d.cols < 2) throw IoError("rows and cols must be at least 2");
    const auto& pts = field(j, "points", "");
    const std::size_t nv = std::size_t(d.rows) * d.cols, nf = std::size_t(d.rows - 1) * (d.cols - 1);
    if (!pts.is_array() || pts.size() != nv)
        throw IoError("field 'points' must hold rows*cols = " + std::to_string(nv) + " entries, found " +
                      std::to_string(pts.is_array() ? pts.size() : 0));
    for (std::size_t k = 0; k < nv; ++k) {
        std::string w = "points[" + std::to_string(k) + "]";
        d.points.push_back(detail::string_tuple<4>(pts[k], w));
        for (int c = 0; c < 4; ++c) detail::check_number(d.points.back()[c], w + "[" + std::to_string(c) + "]");
    }
    if (j.contains("p_field")) {
        const auto& pf = j["p_field"];
        if (!pf.is_array() || pf.size() != nf)
            throw IoError("field 'p_field' must hold (rows-1)*(cols-1) = " + std::to_string(nf) + " entries");
        std::vector<std::string> v;
        for (std::size_t k = 0; k < nf; ++k) {
            std::string w = "p_field[" + std::to_string(k) + "]";
            if (!pf[k].is_string()) throw IoError("field '" + w + "' must be a string");
            v.push_back(pf[k].get<std::string>());
            detail::check_number(v.back(), w);
        }
        d.p_field = std::move(v);
    }
    if (j.contains("envelope")) {
        const auto& e = j["envelope"];
        EnvelopeRecord r;
        std::tie(r.seed_i, r.seed_j) = detail::index_pair(field(e, "seed", "envelope."), "envelope.seed");
        if (r.seed_i < 0 || r.seed_j < 0 || r.seed_i >= d.rows - 1 || r.seed_j >= d.cols - 1)
            throw IoError("field 'envelope.seed' is not a face of the net");
        const auto& ps = field(e, "params", "envelope.");
        if (!ps.is_array() || ps.size() != nf)
            throw IoError("field 'envelope.params' must hold one label per face (" + std::to_string(nf) + ")");
        for (std::size_t k = 0; k < nf; ++k) {
            std::string w = "envelope.params[" + std::to_string(k) + "]";
            r.params.push_back(detail::string_tuple<4>(ps[k], w));
            for (int c = 0; c < 4; ++c) detail::check_number(r.params.back()[c], w + "[" + std::to_string(c) + "]");
        }
        d.envelope = std::move(r);
    }
    if (j.contains("cauchy")) {
        const auto& c = j["cauchy"];
        CauchyRecord r;
        std::tie(r.seed_i, r.seed_j) = detail::index_pair(field(c, "seed", "cauchy."), "cauchy.seed");
        const auto& kn = field(c, "known", "cauchy.");
        if (!kn.is_array() || kn.size() != nv) throw IoError("field 'cauchy.known' must hold rows*cols entries");
        for (const auto& v : kn) {
            if (!v.is_number_integer()) throw IoError("field 'cauchy.known' must hold integers");
            r.known.push_back(v.get<int>());
        }
        d.cauchy = std::move(r);
    }
    if (j.contains("metadata")) {
        const auto& m = j["metadata"];
        if (!m.is_object()) throw IoError("field 'metadata' must be an object");
        Metadata md;
        if (m.contains("rng_seed")) {
            if (!m["rng_seed"].is_number_unsigned()) throw IoError("field 'metadata.rng_seed' must be an integer");
            md.rng_seed = m["rng_seed"].get<std::uint64_t>();
        }
        if (m.contains("kind")) md.kind = m["kind"].get<std::string>();
        if (m.contains("tolerances"))
            for (const auto& [k, v] : m["tolerances"].items()) {
                if (!v.is_number()) throw IoError("field 'metadata.tolerances." + k + "' must be a number");
                md.tolerances[k] = v.get<double>();
            }
        d.metadata = std::move(md);
    }
    return d;
}

inline NetDocument parse_document(const std::string& text) {
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(text);
    } catch (const nlohmann::json::parse_error& e) {
        std::size_t line = 1 + std::count(text.begin(), text.begin() + std::min(e.byte, text.size()), '\n');
        throw IoError("JSON parse error at line " + std::to_string(line) + ": " + e.what());
    }
    return from_json(j);
}

inline std::string dump_document(const NetDocument& d) { return to_json(d).dump(1) + "\n"; }

inline NetDocument load_net(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open '" + path + "'");
    std::stringstream ss;
    ss << in.rdbuf();
    try {
        return parse_document(ss.str());
    } catch (const VersionError& e) {
        throw VersionError(path + ": " + e.what());
    } catch (const IoError& e) {
        throw IoError(path + ": " + e.what());
    }
}

inline void save_net(const NetDocument& d, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw IoError("cannot write '" + path + "'");
    out << dump_document(d);
    if (!out) throw IoError("write failed for '" + path + "'");
}

// ---------------------------------------------------------------------------
// OBJ export.

struct ObjReport {
    int chart = 3;  // coordinate set to 1
    int net_vertices = 0, envelope_vertices = 0, quadric_vertices = 0, faces = 0;
    int clipped = 0;
    double max_implicit = 0;  // quadric samples against the implicit form, before dehomogenizing
    std::vector<std::string> warnings;
};

namespace detail {

inline double chart_weight(const HomPoint<double>& x, int k) { return std::abs(x[k]) / norm(x); }

// x3 unless some net vertex sits within 1e-6 of x3 = 0; then, among x0..x2,
// the coordinate with the largest summed relative magnitude.
inline int choose_chart(const AsymptoticNet<double>& n) {
    double worst = INFINITY;
    for (const auto& x : n.v) worst = std::min(worst, chart_weight(x, 3));
    if (worst > 1e-6) return 3;
    std::array<double, 3> sum{};
    for (const auto& x : n.v)
        for (int k = 0; k < 3; ++k) sum[k] += chart_weight(x, k);
    return int(std::max_element(sum.begin(), sum.end()) - sum.begin());
}

}  // namespace detail

// Quadric patches use Q(u, v) = p c^2 (1-u)(1-v) r12 + c u(1-v) r1 + c (1-u) v r2 + uv r
// with c = 1/sqrt|p|, which runs over the face between its four edges.
inline ObjReport export_obj(std::ostream& out, const AsymptoticNet<double>& n, const QuadricField<double>* p,
                            const Envelope* env, int samples) {
    if (samples < 2) throw std::invalid_argument("export_obj: samples must be at least 2");
    ObjReport rep;
    rep.chart = detail::choose_chart(n);
    const char* names = "0123";
    out << "# latticelie OBJ export\n# chart: x" << names[rep.chart] << " = 1\n";
    int next = 1;
    std::ostringstream body;
    auto vertex = [&](const HomPoint<double>& x) -> int {
        if (detail::chart_weight(x, rep.chart) < 1e-9) {
            ++rep.clipped;
            body << "v 0 0 0\n";  // placeholder keeps indices aligned; faces using it are dropped
            return -(next++);
        }
        double w = x[rep.chart];
        body << "v";
        for (int k = 0; k < 4; ++k)
            if (k != rep.chart) body << ' ' << format_scalar(x[k] / w);
        body << '\n';
        return next++;
    };
    auto grid = [&](const Grid<int>& ids) {
        for (int i = 0; i + 1 < ids.rows; ++i)
            for (int j = 0; j + 1 < ids.cols; ++j) {
                int a = ids(i, j), b = ids(i + 1, j), c = ids(i + 1, j + 1), d = ids(i, j + 1);
                if (a < 0 || b < 0 || c < 0 || d < 0) continue;
                body << "f " << a << ' ' << b << ' ' << c << ' ' << d << '\n';
                ++rep.faces;
            }
    };
    body << "g net\n";
    Grid<int> ids(n.rows, n.cols);
    for (int k = 0; k < int(n.v.size()); ++k) ids.v[k] = vertex(n.v[k]);
    rep.net_vertices = int(n.v.size());
    grid(ids);
    if (env) {
        body << "g envelope\n";
        Grid<int> e(env->points.rows, env->points.cols);
        for (int k = 0; k < int(e.v.size()); ++k) e.v[k] = vertex(env->points.v[k]);
        rep.envelope_vertices = int(e.v.size());
        grid(e);
    }
    if (p) {
        for (int i = 0; i + 1 < n.rows; ++i)
            for (int j = 0; j + 1 < n.cols; ++j) {
                body << "g quadric_" << i << '_' << j << '\n';
                auto q = make_quadric(n, *p, i, j);
                auto A = implicit_quadric(q, INFINITY);
                double c = 1.0 / std::sqrt(std::abs(q.p));
                Grid<int> g(samples, samples);
                for (int a = 0; a < samples; ++a)
                    for (int b = 0; b < samples; ++b) {
                        double u = double(a) / (samples - 1), v = double(b) / (samples - 1);
                        HomPoint<double> x = (q.p * c * c * (1 - u) * (1 - v)) * q.r12 + (c * u * (1 - v)) * q.r1 +
                                             (c * (1 - u) * v) * q.r2 + (u * v) * q.r;
                        rep.max_implicit = std::max(rep.max_implicit, implicit_residual(A, x));
                        g(a, b) = vertex(x);
                    }
                rep.quadric_vertices += samples * samples;
                grid(g);
            }
    }
    if (rep.clipped > 0)
        rep.warnings.push_back(std::to_string(rep.clipped) + " vertices near the plane at infinity of the chart clipped");
    out << body.str();
    return rep;
}

inline ObjReport export_obj(const std::string& path, const AsymptoticNet<double>& n, const QuadricField<double>* p,
                            const Envelope* env, int samples) {
    std::ofstream out(path);
    if (!out) throw IoError("cannot write '" + path + "'");
    auto rep = export_obj(out, n, p, env, samples);
    if (!out) throw IoError("write failed for '" + path + "'");
    return rep;
}

}  // namespace latticelie
