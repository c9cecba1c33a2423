// latticelie: command-line front end.
//
// Exit codes: 0 success, 1 validation failure, 2 usage error, 3 numerical breakdown.

#include "latticelie/classify.hpp"
#include "latticelie/io.hpp"
#include "latticelie/special.hpp"

#include "CLI11.hpp"

#include <cstdlib>
#include <iostream>

namespace ll = latticelie;
using Json = nlohmann::ordered_json;

namespace {

constexpr int kOk = 0, kInvalid = 1, kUsage = 2, kNumerical = 3;

struct UsageError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

enum class Backend { Float, Rational };

Backend backend_from_env() {
    const char* v = std::getenv("LATTICE_LIE_BACKEND");
    if (!v || std::string(v).empty() || std::string(v) == "float") return Backend::Float;
    if (std::string(v) == "rational") return Backend::Rational;
    throw UsageError(std::string("LATTICE_LIE_BACKEND must be 'float' or 'rational', got '") + v + "'");
}

const char* backend_name(Backend b) { return b == Backend::Float ? "float" : "rational"; }

struct Tolerances {
    double planarity = 1e-9;
    double gmc = 1e-10;
    double c1 = 1e-10;
    double keydisc = 1e-9;
    double pm = 1e-8;
    double envelope = 1e-8;
    double classify = 1e-8;

    Json json() const {
        return {{"planarity", planarity}, {"gmc", gmc},           {"c1", c1},
                {"keydisc", keydisc},     {"pm", pm},             {"envelope", envelope},
                {"classify", classify}};
    }
};

void emit(const Json& j, const std::string& out_path) {
    if (out_path.empty() || out_path == "-") {
        std::cout << j.dump(2) << "\n";
        return;
    }
    std::ofstream f(out_path);
    if (!f) throw ll::IoError("cannot write '" + out_path + "'");
    f << j.dump(2) << "\n";
}

void write_doc(const ll::NetDocument& d, const std::string& path) {
    if (path.empty() || path == "-") std::cout << ll::dump_document(d);
    else ll::save_net(d, path);
}

ll::NetDocument read_doc(const std::string& path) {
    try {
        return ll::load_net(path);
    } catch (const ll::IoError& e) {
        throw UsageError(e.what());
    }
}

Json envelope_seed_json(const ll::GenParam<double>& g) {
    return {{"s", {g.s.num, g.s.den}}, {"t", {g.t.num, g.t.den}}};
}

// The quadric field of a document: stored, or propagated from p0 at face (0,0).
ll::QuadricField<double> field_for(const ll::NetDocument& d, const ll::AsymptoticNet<double>& n,
                                   std::optional<double> p0) {
    if (p0) {
        if (*p0 == 0) throw UsageError("--p0 must be nonzero");
        return ll::propagate_quadrics(n, 0, 0, *p0);
    }
    auto p = ll::p_field_from<double>(d);
    if (!p) throw UsageError("document has no p_field; pass --p0");
    return *p;
}

// ---------------------------------------------------------------------------

struct GenerateOpts {
    std::uint64_t seed = 1;
    int rows = 6, cols = 6;
    std::string kind = "cauchy";
    double p0 = 1.0;
    std::string out;
};

int cmd_generate(const GenerateOpts& o, Backend backend) {
    if (o.rows < 3 || o.cols < 3) throw UsageError("--rows and --cols must be at least 3");
    ll::NetDocument d;
    if (o.kind == "cauchy") {
        d = ll::make_document(ll::random_cauchy_data(o.seed, o.rows, o.cols));
    } else if (backend == Backend::Rational) {
        auto n = ll::random_net_rational(o.seed, o.rows, o.cols);
        d = ll::make_document(n);
        ll::set_p_field(d, ll::propagate_quadrics(n, 0, 0, ll::Rational(o.p0)));
    } else {
        auto n = ll::random_net(o.seed, o.rows, o.cols);
        d = ll::make_document(n);
        ll::set_p_field(d, ll::propagate_quadrics(n, 0, 0, o.p0));
    }
    d.metadata = ll::Metadata{o.seed, o.kind, {}};
    write_doc(d, o.out);
    return kOk;
}

struct EvolveOpts {
    std::string cauchy, out;
    double p0 = 0;
};

int cmd_evolve(const EvolveOpts& o) {
    auto d = read_doc(o.cauchy);
    if (!d.cauchy) throw UsageError(o.cauchy + ": no cauchy section");
    if (o.p0 == 0) throw UsageError("--p0 must be nonzero");
    auto sol = ll::solve_cauchy(ll::cauchy_from(d, o.p0));
    auto out = ll::make_document(sol.net);
    ll::set_p_field(out, sol.p);
    ll::Metadata md;
    if (d.metadata) md.rng_seed = d.metadata->rng_seed;
    md.kind = "evolved";
    out.metadata = md;
    write_doc(out, o.out);
    return kOk;
}

// ---------------------------------------------------------------------------

struct ClassifyOpts {
    std::string net, out;
    double tol = 1e-8;
    bool json = false;
    std::optional<double> p0;
};

Json report_json(const ll::SurfaceClassReport& r) {
    Json j;
    j["label"] = r.label;
    j["tol"] = r.tol;
    j["pm"] = r.pm;
    j["pm_residual"] = r.pm_residual;
    j["godeaux_rozet"] = r.godeauxRozet;
    j["demoulin"] = r.demoulin;
    j["tzitzeica"] = r.tzitzeica ? Json(*r.tzitzeica) : Json(nullptr);
    j["semi_q"] = {r.semiQ[0], r.semiQ[1]};
    j["complex"] = {r.complexSurf[0], r.complexSurf[1]};
    j["strip_generators"] = {r.strip_counts[0], r.strip_counts[1]};
    j["doubly_q"] = r.doublyQ;
    j["doubly_complex"] = r.doublyComplex;
    j["q_surface"] = r.qSurface;
    j["d1_zero_everywhere"] = r.d1_all_zero;
    j["d2_zero_everywhere"] = r.d2_all_zero;
    j["max_relative_d1"] = *std::max_element(r.d1_rel.v.begin(), r.d1_rel.v.end());
    j["max_relative_d2"] = *std::max_element(r.d2_rel.v.begin(), r.d2_rel.v.end());
    j["warnings"] = r.warnings;
    j["contradictions"] = r.contradictions;
    return j;
}

int cmd_classify(const ClassifyOpts& o, Backend backend, const Tolerances& tols) {
    auto d = read_doc(o.net);
    auto n = ll::net_from<double>(d);
    auto v = ll::validate_asymptotic(n, tols.planarity);
    if (!v.passed) {
        std::cerr << "classify: " << v.message << "\n";
        return kInvalid;
    }
    auto p = field_for(d, n, o.p0);
    std::optional<ll::Envelope> env;
    if (d.envelope) env = ll::envelope_from(d, n, p);
    auto r = ll::classify(n, p, env ? &*env : nullptr, o.tol);
    Json j = report_json(r);
    j["backend"] = backend_name(backend);
    if (backend == Backend::Rational) j["backend_note"] = "classification runs in double precision";
    j["tolerances"] = tols.json();
    j["tolerances"]["classify"] = o.tol;
    if (o.json) {
        emit(j, o.out);
    } else {
        std::cout << "label: " << r.label << "\n";
        for (const char* k : {"pm", "godeaux_rozet", "demoulin", "tzitzeica", "semi_q", "complex", "doubly_q",
                              "doubly_complex", "q_surface"})
            std::cout << "  " << k << ": " << j[k].dump() << "\n";
        for (const auto& w : r.warnings) std::cout << "  warning: " << w << "\n";
        for (const auto& c : r.contradictions) std::cout << "  contradiction: " << c << "\n";
    }
    return r.contradictions.empty() ? kOk : kInvalid;
}

// ---------------------------------------------------------------------------

struct EnvelopeOpts {
    std::string net, out, report;
    std::optional<double> p0, s0, t0;
    std::uint64_t seed = 1;
};

int cmd_envelope(const EnvelopeOpts& o, const Tolerances& tols) {
    auto d = read_doc(o.net);
    auto n = ll::net_from<double>(d);
    auto p = field_for(d, n, o.p0);
    ll::GenParam<double> g;
    if (o.s0 && o.t0) g = ll::GenParam<double>::affine(*o.s0, *o.t0);
    else if (!o.s0 && !o.t0) g = ll::random_generic_seed(n, p, 0, 0, o.seed);
    else throw UsageError("--s0 and --t0 go together");
    auto e = ll::trace_envelope(n, p, 0, 0, g);
    auto diag = ll::envelope_diagnostics(e, n, p);
    Json j;
    j["seed"] = envelope_seed_json(g);
    j["closes"] = diag.max_closure <= tols.envelope;
    j["max_closure"] = diag.max_closure;
    j["max_star_tangency"] = diag.max_star_tangency;
    j["max_on_quadric"] = diag.max_on_quadric;
    j["shared_fraction"] = {diag.shared_fraction1, diag.shared_fraction2};
    j["straight_polygons"] = {diag.straight1, diag.straight2};
    j["tolerances"] = tols.json();
    d.p_field.reset();
    ll::set_p_field(d, p);
    ll::set_envelope(d, e);
    if (!o.out.empty()) ll::save_net(d, o.out);
    emit(j, o.report);
    return j["closes"].get<bool>() ? kOk : kNumerical;
}

// ---------------------------------------------------------------------------

struct VerifyOpts {
    std::string net, out;
    bool require_pm = false;
};

struct Check {
    std::string name;
    double value;
    double tol;
    bool pass;
};

template <ll::Field S>
void net_checks(const ll::NetDocument& d, const Tolerances& tols, std::vector<Check>& checks) {
    auto n = ll::net_from<S>(d);
    auto v = ll::validate_asymptotic(n, tols.planarity);
    checks.push_back({"star_planarity", v.max_planarity, tols.planarity, v.passed});
    if (!v.passed) return;
    double gmc = 0;
    for (int i = 0; i + 2 < n.rows; ++i)
        for (int j = 0; j + 2 < n.cols; ++j) gmc = std::max(gmc, ll::gmc_residual_normalized(n, i, j));
    checks.push_back({"gmc_identity", gmc, tols.gmc, gmc < tols.gmc || (ll::is_exact_v<S> && gmc == 0)});
    auto p = ll::p_field_from<S>(d);
    if (!p) return;
    // C1: the stored field must be the propagation of its own corner value.
    ll::PropagationReport prep;
    auto q = ll::propagate_quadrics(n, 0, 0, (*p)(0, 0), INFINITY, &prep);
    checks.push_back({"c1_diagonal", prep.max_diagonal_mismatch, tols.c1,
                      prep.max_diagonal_mismatch < tols.c1 || (ll::is_exact_v<S> && prep.max_diagonal_mismatch == 0)});
    double c1 = 0;
    for (std::size_t k = 0; k < q.v.size(); ++k)
        c1 = std::max(c1, ll::ratio(S(q.v[k] - p->v[k]), std::abs(ll::to_double(p->v[k]))));
    checks.push_back({"c1_field", c1, tols.c1, c1 < tols.c1 || (ll::is_exact_v<S> && c1 == 0)});
    double kd = 0;
    for (int i = 0; i + 2 < n.rows; ++i)
        for (int j = 0; j + 2 < n.cols; ++j) kd = std::max(kd, ll::keydisc_residual(n, *p, i, j));
    checks.push_back({"keydisc_identity", kd, tols.keydisc, kd < tols.keydisc || (ll::is_exact_v<S> && kd == 0)});
}

template <ll::Field S>
void pm_check(const ll::NetDocument& d, const Tolerances& tols, std::vector<Check>& checks) {
    auto n = ll::net_from<S>(d);
    auto p = *ll::p_field_from<S>(d);
    double worst = 0;
    for (int i = 0; i + 2 < n.rows; ++i)
        for (int j = 0; j + 2 < n.cols; ++j) worst = std::max(worst, ll::pm_residual_maps(n, p, i, j).value());
    checks.push_back({"pm_closure", worst, tols.pm, worst < tols.pm});
}

int cmd_verify(const VerifyOpts& o, Backend backend, const Tolerances& tols) {
    auto d = read_doc(o.net);
    std::vector<Check> checks;
    if (backend == Backend::Rational) net_checks<ll::Rational>(d, tols, checks);
    else net_checks<double>(d, tols, checks);
    bool structural = std::all_of(checks.begin(), checks.end(), [](const Check& c) { return c.pass; });
    bool want_pm = o.require_pm || (d.metadata && (d.metadata->kind == "evolved" || d.metadata->kind == "constructed"));
    if (structural && d.p_field && want_pm) {
        if (backend == Backend::Rational) pm_check<ll::Rational>(d, tols, checks);
        else pm_check<double>(d, tols, checks);
    }
    if (structural && d.p_field && d.envelope) {
        auto n = ll::net_from<double>(d);
        auto e = ll::envelope_from(d, n, *ll::p_field_from<double>(d));
        double cl = e.max_closure();
        checks.push_back({"envelope_closure", cl, tols.envelope, cl <= tols.envelope});
    }
    bool ok = std::all_of(checks.begin(), checks.end(), [](const Check& c) { return c.pass; });
    Json j;
    j["passed"] = ok;
    j["backend"] = backend_name(backend);
    j["checks"] = Json::array();
    for (const auto& c : checks)
        j["checks"].push_back({{"name", c.name}, {"value", c.value}, {"tol", c.tol}, {"pass", c.pass}});
    j["tolerances"] = tols.json();
    emit(j, o.out);
    return ok ? kOk : kInvalid;
}

// ---------------------------------------------------------------------------

struct ExportOpts {
    std::string net, out, format = "obj";
    int samples = 8;
    std::optional<double> p0;
};

int cmd_export(const ExportOpts& o) {
    if (o.format != "obj") throw UsageError("unsupported format '" + o.format + "'");
    if (o.out.empty()) throw UsageError("export needs --out");
    auto d = read_doc(o.net);
    auto n = ll::net_from<double>(d);
    std::optional<ll::QuadricField<double>> p;
    if (o.p0 || d.p_field) p = field_for(d, n, o.p0);
    std::optional<ll::Envelope> env;
    if (d.envelope && p) env = ll::envelope_from(d, n, *p);
    auto r = ll::export_obj(o.out, n, p ? &*p : nullptr, env ? &*env : nullptr, o.samples);
    Json j;
    j["path"] = o.out;
    j["chart"] = "x" + std::to_string(r.chart);
    j["net_vertices"] = r.net_vertices;
    j["envelope_vertices"] = r.envelope_vertices;
    j["quadric_vertices"] = r.quadric_vertices;
    j["faces"] = r.faces;
    j["clipped"] = r.clipped;
    j["max_implicit_residual"] = r.max_implicit;
    j["warnings"] = r.warnings;
    emit(j, "");
    return kOk;
}

// ---------------------------------------------------------------------------

struct ConstructOpts {
    std::string target, out;
    std::uint64_t seed = 1;
    int rows = 4, cols = 4;
    int attempts = 200;
};

int cmd_construct(const ConstructOpts& o) {
    static const std::map<std::string, ll::SpecialTarget> names{{"gr", ll::SpecialTarget::GodeauxRozet},
                                                                {"demoulin", ll::SpecialTarget::Demoulin},
                                                                {"tzitzeica", ll::SpecialTarget::Tzitzeica},
                                                                {"doubly-q", ll::SpecialTarget::DoublyQ}};
    auto it = names.find(o.target);
    if (it == names.end()) throw UsageError("unknown --target '" + o.target + "'");
    auto s = ll::construct_special(it->second, o.seed, o.rows, o.cols, o.attempts);
    Json j;
    j["target"] = ll::target_name(s.target);
    j["feasible"] = s.feasible;
    j["attempts"] = s.attempts;
    if (!s.feasible) {
        j["reason"] = s.reason;
        emit(j, "");
        return kNumerical;
    }
    j["residual"] = s.residual;
    j["frame_health"] = s.health;
    auto d = ll::make_document(s.net);
    ll::set_p_field(d, s.p);
    if (s.seed) {
        ll::set_envelope(d, ll::propagate_envelope(s.net, s.p, 0, 0, *s.seed));
        j["envelope_seed"] = envelope_seed_json(*s.seed);
    }
    d.metadata = ll::Metadata{o.seed, "constructed", {{"residual", 1e-8}}};
    write_doc(d, o.out);
    if (!o.out.empty()) emit(j, "");
    return kOk;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Discrete asymptotic nets, lattice Lie quadrics and their envelopes"};
    app.require_subcommand(1);
    Tolerances tols;

    GenerateOpts gen;
    auto* g = app.add_subcommand("generate", "random generic net or Cauchy data");
    g->add_option("--seed", gen.seed, "RNG seed");
    g->add_option("--rows", gen.rows, "vertex rows");
    g->add_option("--cols", gen.cols, "vertex columns");
    g->add_option("--kind", gen.kind, "generic or cauchy")->check(CLI::IsMember({"generic", "cauchy"}));
    g->add_option("--p0", gen.p0, "quadric parameter at face (0,0) for generic nets");
    g->add_option("-o,--out", gen.out, "output document (stdout if omitted)");

    EvolveOpts evo;
    auto* e = app.add_subcommand("evolve", "solve the Cauchy problem");
    e->add_option("--cauchy", evo.cauchy, "Cauchy data document")->required();
    e->add_option("--p0", evo.p0, "quadric parameter at the seed face")->required();
    e->add_option("-o,--out", evo.out, "output document");

    ClassifyOpts cls;
    auto* c = app.add_subcommand("classify", "classify a net");
    c->add_option("--net", cls.net, "net document")->required();
    c->add_option("--tol", cls.tol, "relative tolerance for the class booleans");
    c->add_option("--p0", cls.p0, "override the stored quadric field");
    c->add_flag("--json", cls.json, "JSON report");
    c->add_option("-o,--out", cls.out, "report path (with --json)");

    EnvelopeOpts env;
    auto* v = app.add_subcommand("envelope", "propagate an envelope from face (0,0)");
    v->add_option("--net", env.net, "net document")->required();
    v->add_option("--p0", env.p0, "quadric parameter at face (0,0)");
    v->add_option("--s0", env.s0, "seed generator label s");
    v->add_option("--t0", env.t0, "seed generator label t");
    v->add_option("--seed", env.seed, "RNG seed for a generic seed label");
    v->add_option("-o,--out", env.out, "document with the envelope attached");
    v->add_option("--report", env.report, "report path");

    VerifyOpts ver;
    auto* w = app.add_subcommand("verify", "run the invariant suite");
    w->add_option("--net", ver.net, "net document")->required();
    w->add_flag("--require-pm", ver.require_pm, "fail unless the net is projective minimal");
    w->add_option("-o,--out", ver.out, "report path");

    ExportOpts exp;
    auto* x = app.add_subcommand("export", "mesh export");
    x->add_option("--net", exp.net, "net document")->required();
    x->add_option("--format", exp.format, "obj");
    x->add_option("--samples", exp.samples, "samples per quadric patch side")->check(CLI::Range(2, 1000));
    x->add_option("--p0", exp.p0, "quadric parameter at face (0,0)");
    x->add_option("-o,--out", exp.out, "output path")->required();

    ConstructOpts con;
    auto* k = app.add_subcommand("construct", "build a special surface patch");
    k->add_option("--target", con.target, "gr, demoulin, tzitzeica or doubly-q")->required();
    k->add_option("--seed", con.seed, "RNG seed");
    k->add_option("--rows", con.rows, "vertex rows");
    k->add_option("--cols", con.cols, "vertex columns");
    k->add_option("--attempts", con.attempts, "maximum attempts");
    k->add_option("-o,--out", con.out, "output document");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& ex) {
        return app.exit(ex);
    } catch (const CLI::ParseError& ex) {
        app.exit(ex);
        return kUsage;
    }

    try {
        Backend backend = backend_from_env();
        if (g->parsed()) return cmd_generate(gen, backend);
        if (e->parsed()) return cmd_evolve(evo);
        if (c->parsed()) return cmd_classify(cls, backend, tols);
        if (v->parsed()) return cmd_envelope(env, tols);
        if (w->parsed()) return cmd_verify(ver, backend, tols);
        if (x->parsed()) return cmd_export(exp);
        if (k->parsed()) return cmd_construct(con);
    } catch (const UsageError& ex) {
        std::cerr << "error: " << ex.what() << "\n";
        return kUsage;
    } catch (const ll::IoError& ex) {
        std::cerr << "error: " << ex.what() << "\n";
        return kUsage;
    } catch (const ll::NotAsymptoticError& ex) {
        std::cerr << "invalid: " << ex.what() << "\n";
        return kInvalid;
    } catch (const ll::ConsistencyError& ex) {
        std::cerr << "invalid: " << ex.what() << "\n";
        return kInvalid;
    } catch (const std::exception& ex) {
        std::cerr << "numerical breakdown: " << ex.what() << "\n";
        return kNumerical;
    }
    return kUsage;
}
