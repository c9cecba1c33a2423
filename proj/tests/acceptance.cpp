// Acceptance runner: one PASS/FAIL line per criterion, nonzero exit on any failure.

#include "support.hpp"

#include <latticelie/io.hpp>

#include <chrono>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>

using namespace latticelie;

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) { return std::chrono::duration<double>(Clock::now() - t0).count(); }

std::string sci(double x) {
    if (std::isinf(x)) return "inf";
    char buf[32];
    auto r = std::to_chars(buf, buf + sizeof buf, x, std::chars_format::scientific, 2);
    return std::string(buf, r.ptr);
}

struct Outcome {
    bool pass = true;
    std::string detail;
};

struct Worst {
    double v = 0;
    void operator()(double x) { v = std::max(v, std::isnan(x) ? INFINITY : x); }
};

double p0_for(std::uint64_t seed) { return 0.6 + 0.15 * double(seed % 7); }

// ---------------------------------------------------------------------------

Outcome criterion1() {
    auto t0 = Clock::now();
    Worst gmc;
    for (std::uint64_t s = 0; s < 100; ++s) gmc(fixtures::max_gmc(random_net(s, 5, 5)));
    int nonzero = 0;
    for (std::uint64_t s = 0; s < 10; ++s) {
        auto n = random_net_rational(s, 5, 5);
        for (int i = 0; i + 2 < n.rows; ++i)
            for (int j = 0; j + 2 < n.cols; ++j)
                for (auto& row : gmc_residual(n, i, j))
                    for (auto& x : row) nonzero += x != 0;
    }
    double t = seconds_since(t0);
    return {gmc.v < 1e-10 && nonzero == 0 && t < 5,
            "max residual " + sci(gmc.v) + " (< 1e-10), rational nonzero entries " + std::to_string(nonzero) +
                ", " + sci(t) + " s (< 5 s)"};
}

Outcome criterion2() {
    Worst diag, planes;
    for (std::uint64_t s = 0; s < 100; ++s) {
        auto n = random_net(s, 5, 5);
        PropagationReport rep;
        auto p = propagate_quadrics(n, 0, 0, p0_for(s), INFINITY, &rep);
        diag(rep.max_diagonal_mismatch);
        for (int i = 0; i + 1 < n.rows; ++i)
            for (int j = 0; j + 1 < n.cols; ++j) {
                auto q = make_quadric(n, p, i, j);
                for (double u : {-2.0, -0.5, 0.3, 1.0, 4.0}) {
                    // Common edge with the n1 neighbour: t = 0 here, t = infinity there.
                    if (i + 2 < n.rows) {
                        auto w = tangent_plane(q, {ProjScalar<double>::affine(q.p / u), ProjScalar<double>::affine(0)});
                        auto w1 = tangent_plane(make_quadric(n, p, i + 1, j),
                                                {ProjScalar<double>::affine(1 / u), ProjScalar<double>::infinity()});
                        planes(proportionality_residual(w.c, w1.c));
                    }
                    if (j + 2 < n.cols) {
                        auto w = tangent_plane(q, {ProjScalar<double>::affine(0), ProjScalar<double>::affine(q.p / u)});
                        auto w2 = tangent_plane(make_quadric(n, p, i, j + 1),
                                                {ProjScalar<double>::infinity(), ProjScalar<double>::affine(1 / u)});
                        planes(proportionality_residual(w.c, w2.c));
                    }
                }
            }
    }
    return {diag.v < 1e-10 && planes.v < 1e-10,
            "diagonal mismatch " + sci(diag.v) + " (< 1e-10), edge tangent planes " + sci(planes.v) + " (< 1e-10)"};
}

// Tangent planes along the shared generator of faces (i,j) and its neighbour in `direction`.
double touching(const AsymptoticNet<double>& n, const QuadricField<double>& p, int i, int j, int direction) {
    auto q = make_quadric(n, p, i, j);
    Worst w;
    if (direction == 1) {
        auto q1 = make_quadric(n, p, i + 1, j);
        auto sg = shared_generators(q, frame_l(n, i, j), 1e-8);
        if (!sg.zero_discriminant) return INFINITY;
        double s = sg.roots[0].value(), s1 = neighbour_label(sg.roots[0], p(i, j)).value();
        for (double t : {-2.0, -0.5, 0.25, 1.0, 3.0}) {
            auto x = quadric_eval(q, GenParam<double>::affine(s, t));
            double t1 = fixtures::t_label_of(q1, s1, x);
            w(proportionality_residual(tangent_plane(q, GenParam<double>::affine(s, t)).c,
                                       tangent_plane(q1, GenParam<double>::affine(s1, t1)).c));
        }
    } else {
        // Swap the roles of s and t by transposing the patch.
        AsymptoticNet<double> m(n.cols, n.rows);
        QuadricField<double> pt(p.cols, p.rows);
        for (int a = 0; a < n.rows; ++a)
            for (int b = 0; b < n.cols; ++b) m(b, a) = n(a, b);
        for (int a = 0; a < p.rows; ++a)
            for (int b = 0; b < p.cols; ++b) pt(b, a) = p(a, b);
        return touching(m, pt, j, i, 1);
    }
    return w.v;
}

Outcome criterion3() {
    Worst coincide, touch;
    int roots = 0, touched = 0;
    for (std::uint64_t s = 0; s < 100; ++s) {
        auto n = random_net(s, 5, 5);
        auto p = propagate_quadrics(n, 0, 0, p0_for(s));
        for (int i = 0; i + 1 < n.rows; ++i)
            for (int j = 0; j + 1 < n.cols; ++j) {
                auto q = make_quadric(n, p, i, j);
                if (i + 2 < n.rows)
                    for (auto r : shared_generators(q, frame_l(n, i, j)).roots) {
                        coincide(proportionality_residual(
                            s_generator(q, r).p, s_generator(make_quadric(n, p, i + 1, j), neighbour_label(r, p(i, j))).p));
                        ++roots;
                    }
                if (j + 2 < n.cols)
                    for (auto r : shared_generators(q, frame_m(n, i, j)).roots) {
                        coincide(proportionality_residual(
                            t_generator(q, r).p, t_generator(make_quadric(n, p, i, j + 1), neighbour_label(r, p(i, j))).p));
                        ++roots;
                    }
            }
    }
    for (std::uint64_t s = 0; s < 10; ++s) {
        auto g = construct_special(SpecialTarget::GodeauxRozet, 300 + s, 4, 4);
        auto d = construct_special(SpecialTarget::Demoulin, 400 + s, 4, 4);
        if (!g.feasible || !d.feasible) return {false, "construction failed: " + g.reason + d.reason};
        for (int i = 0; i + 2 < 4; ++i)
            for (int j = 0; j + 1 < 4; ++j) {
                touch(touching(g.net, g.p, i, j, 1));
                touch(touching(d.net, d.p, i, j, 1));
                touch(touching(d.net, d.p, j, i, 2));
                touched += 3;
            }
    }
    return {roots > 0 && coincide.v < 1e-8 && touch.v < 1e-8,
            std::to_string(roots) + " real roots, coincidence " + sci(coincide.v) + " (< 1e-8); " +
                std::to_string(touched) + " touching pairs, tangent planes " + sci(touch.v) + " (< 1e-8)"};
}

Outcome criterion4() {
    Worst kd;
    for (std::uint64_t s = 0; s < 100; ++s) {
        auto n = random_net(s, 5, 5);
        auto p = propagate_quadrics(n, 0, 0, p0_for(s));
        for (int i = 0; i + 2 < n.rows; ++i)
            for (int j = 0; j + 2 < n.cols; ++j) kd(keydisc_residual(n, p, i, j));
    }
    int nonzero = 0;
    for (std::uint64_t s = 0; s < 10; ++s) {
        auto n = random_net_rational(s, 5, 5);
        auto p = propagate_quadrics(n, 0, 0, Rational(int(s % 3) + 2, 3));
        for (int i = 0; i + 2 < n.rows; ++i)
            for (int j = 0; j + 2 < n.cols; ++j) nonzero += local_pm(n, p, i, j).keydisc != 0;
    }
    return {kd.v < 1e-9 && nonzero == 0,
            "max residual " + sci(kd.v) + " (< 1e-9), rational nonzero " + std::to_string(nonzero)};
}

struct CauchyCorpus {
    std::vector<CauchySolution> nets;
    std::vector<double> solve_seconds;
    std::string error;
};

CauchyCorpus& cauchy_corpus() {
    static CauchyCorpus c = [] {
        CauchyCorpus out;
        for (std::uint64_t s = 0; s < 20; ++s) {
            auto t0 = Clock::now();
            try {
                out.nets.push_back(solve_cauchy(random_cauchy_data(1000 + s, 8, 8)));
                out.solve_seconds.push_back(seconds_since(t0));
            } catch (const std::exception& e) {
                out.error += "seed " + std::to_string(1000 + s) + ": " + e.what() + "; ";
            }
        }
        return out;
    }();
    return c;
}

Outcome criterion5() {
    auto& c = cauchy_corpus();
    Worst maps, closure, restore;
    int disagree = 0;
    double per_net = 0;
    for (std::size_t k = 0; k < c.nets.size(); ++k) {
        auto t1 = Clock::now();
        const auto& sol = c.nets[k];
        auto rep = pm_residual_gauge(sol.net, sol.p, 1e-8);
        maps(rep.max_map_closure);
        disagree += rep.pm_gauge != rep.pm_maps;
        for (std::uint64_t e = 0; e < 10; ++e) {
            try {
                auto env = trace_envelope(sol.net, sol.p, 0, 0, random_generic_seed(sol.net, sol.p, 0, 0, 50 + e));
                closure(env.max_closure());
            } catch (const std::exception&) {
                closure(INFINITY);
            }
        }
        for (int a = 2; a < 8; ++a)
            for (int b = 2; b < 8; ++b) {
                try {
                    restore(delete_and_restore(sol.net, sol.p, a, b));
                } catch (const std::exception&) {
                    restore(INFINITY);
                }
            }
        per_net = std::max(per_net, c.solve_seconds[k] + seconds_since(t1));
    }
    bool ok = c.error.empty() && c.nets.size() == 20 && maps.v < 1e-8 && disagree == 0 && closure.v < 1e-8 &&
              restore.v < 1e-8 && per_net < 2;
    return {ok, std::to_string(c.nets.size()) + "/20 solved" + (c.error.empty() ? "" : " [" + c.error + "]") +
                    ", map closure " + sci(maps.v) + " (< 1e-8), gauge disagreements " + std::to_string(disagree) +
                    ", envelope closure " + sci(closure.v) + " (< 1e-8), restore " + sci(restore.v) +
                    " (< 1e-8), worst " + sci(per_net) + " s per net (< 2 s)"};
}

Outcome criterion6() {
    auto& c = cauchy_corpus();
    int accepted = 0, trials = 0;
    for (const auto& sol : c.nets) {
        auto v = uniqueness_probe(sol.net, sol.p, 50, 7);
        for (const auto& t : v.trials) accepted += t.passes;
        trials += int(v.trials.size());
    }
    return {c.nets.size() == 20 && accepted == 0 && trials == 1000,
            std::to_string(trials) + " alternative fields, " + std::to_string(accepted) + " accepted (0 allowed)"};
}

Outcome criterion7() {
    int detected = 0, patches = 0;
    Worst i1, fgh;
    for (std::uint64_t s = 0; s < 20; ++s) {
        auto g = construct_special(SpecialTarget::GodeauxRozet, 700 + s, 5, 5);
        if (!g.feasible) continue;
        ++patches;
        auto env = propagate_envelope(g.net, g.p, 0, 0, random_generic_seed(g.net, g.p, 0, 0, 70 + s));
        auto ip = intersection_property(congruence_lines(g.net, env, CongruenceKind::L), 1);
        detected += ip.holds;
        for (int i = 0; i + 1 < env.points.rows; ++i)
            for (int j = 0; j < env.points.cols; ++j) {
                auto pr = predicted_intersection(g.net, g.p, env, i, j, 1);
                i1(proportionality_residual(ip.points(i, j).c, pr.c));
                if (i + 2 < g.net.rows) fgh(solve_intersection_fgh(g.net, g.p, env, i, j).residual);
            }
    }
    int separated = 0;
    double least = INFINITY;
    for (std::uint64_t s = 0; s < 20; ++s) {
        auto sol = solve_cauchy(random_cauchy_data(800 + s, 5, 5));
        auto env = propagate_envelope(sol.net, sol.p, 0, 0, random_generic_seed(sol.net, sol.p, 0, 0, s));
        auto ip = intersection_property(congruence_lines(sol.net, env, CongruenceKind::L), 1);
        separated += !ip.holds && ip.max_pairing > 1e-4;
        least = std::min(least, ip.max_pairing);
    }
    return {patches == 20 && detected == 20 && i1.v < 1e-9 && fgh.v < 1e-10 && separated == 20,
            std::to_string(detected) + "/" + std::to_string(patches) + " of 20 D1=0 patches meet, I1 " + sci(i1.v) +
                " (< 1e-9), component solve " + sci(fgh.v) + " (< 1e-10); " + std::to_string(separated) +
                "/20 generic patches apart, least pairing " + sci(least) + " (> 1e-4)"};
}

Outcome criterion8() {
    int ok = 0, contradictions = 0;
    for (std::uint64_t s = 0; s < 10; ++s) {
        auto q = construct_special(SpecialTarget::DoublyQ, 900 + s, 4, 4);
        if (!q.feasible) continue;
        auto r = classify(q.net, q.p);
        contradictions += int(r.contradictions.size());
        bool second = true;
        for (int d = 0; d < 2; ++d)
            for (int c : r.strip_counts[d]) second = second && c == 2;
        ok += r.doublyQ && r.doublyComplex && second;
    }
    return {ok == 10 && contradictions == 0, std::to_string(ok) + "/10 patches with two strip-wide generators in both "
                                             "directions, contradictions " + std::to_string(contradictions)};
}

Outcome criterion9() {
    Worst res, conc, path, affine, normals;
    int built = 0, concurrent = 0;
    for (std::uint64_t s = 0; s < 10; ++s) {
        auto t = construct_special(SpecialTarget::Tzitzeica, 950 + s, 4, 4);
        if (!t.feasible) continue;
        ++built;
        auto env = propagate_envelope(t.net, t.p, 0, 0, *t.seed);
        auto tz = tzitzeica_test(t.net, t.p, env);
        res(tz.max_residual);
        conc(tz.max_incidence);
        concurrent += tz.concurrent;
        if (!tz.point) continue;
        auto af = tzitzeica_potential_affine(t.net, t.p, env, *tz.point);
        path(af.max_path);
        affine(af.max_affine);
        normals(af.max_normals);
    }
    return {built == 10 && concurrent == 10 && res.v < 1e-9 && conc.v < 1e-8 && path.v < 1e-10 && affine.v < 1e-8 &&
                normals.v < 1e-8,
            std::to_string(built) + "/10 built, s1t - t2s " + sci(res.v) + " (< 1e-9), concurrency " + sci(conc.v) +
                " (< 1e-8), potential path " + sci(path.v) + " (< 1e-10), affine relation " + sci(affine.v) +
                " (< 1e-8), normals " + sci(normals.v) + " (< 1e-8)"};
}

Outcome criterion10() {
    struct Item {
        AsymptoticNet<double> n;
        QuadricField<double> p;
    };
    std::vector<Item> nets;
    for (std::uint64_t s = 0; s < 4; ++s) {
        auto n = random_net(s, 5, 5);
        nets.push_back({n, propagate_quadrics(n, 0, 0, p0_for(s))});
        auto sol = solve_cauchy(random_cauchy_data(40 + s, 6, 6));
        nets.push_back({sol.net, sol.p});
    }
    auto add = [&](SpecialTarget t, int count, int size) {
        for (std::uint64_t s = 0; s < std::uint64_t(count); ++s) {
            auto r = construct_special(t, 60 + s, size, size);
            if (r.feasible) nets.push_back({r.net, r.p});
        }
    };
    add(SpecialTarget::GodeauxRozet, 4, 5);
    add(SpecialTarget::Demoulin, 3, 5);
    add(SpecialTarget::Tzitzeica, 3, 4);
    add(SpecialTarget::DoublyQ, 2, 4);
    int changed = 0, runs = 0;
    for (std::size_t k = 0; k < nets.size(); ++k) {
        auto base = fixtures::class_booleans(classify(nets[k].n, nets[k].p));
        for (std::uint64_t g = 0; g < 10; ++g) {
            auto x = fixtures::random_gauge(100 * k + g, nets[k].n.rows, nets[k].n.cols);
            auto r = classify(apply_gauge(nets[k].n, x), gauge_face_field(nets[k].p, x));
            changed += fixtures::class_booleans(r) != base;
            ++runs;
        }
    }
    return {nets.size() == 20 && changed == 0, std::to_string(nets.size()) + " nets, " + std::to_string(runs) +
                                                   " regaugings, " + std::to_string(changed) + " verdict changes"};
}

// A face line is valid when it has at least three indices, all in range.
bool valid_obj(const std::string& path, int& vertices, int& groups) {
    std::ifstream in(path);
    if (!in) return false;
    vertices = 0;
    groups = 0;
    std::vector<std::string> faces;
    for (std::string line; std::getline(in, line);) {
        if (line.rfind("v ", 0) == 0) {
            std::istringstream ss(line.substr(2));
            double a, b, c;
            if (!(ss >> a >> b >> c) || !std::isfinite(a) || !std::isfinite(b) || !std::isfinite(c)) return false;
            ++vertices;
        } else if (line.rfind("f ", 0) == 0) {
            faces.push_back(line.substr(2));
        } else if (line.rfind("g ", 0) == 0) {
            ++groups;
        } else if (!line.empty() && line[0] != '#') {
            return false;
        }
    }
    for (const auto& f : faces) {
        std::istringstream ss(f);
        int idx, count = 0;
        while (ss >> idx) {
            if (idx < 1 || idx > vertices) return false;
            ++count;
        }
        if (count < 3) return false;
    }
    return vertices > 0 && !faces.empty();
}

Outcome criterion11() {
    namespace fs = std::filesystem;
    auto dir = fs::temp_directory_path() / "latticelie_acceptance";
    fs::create_directories(dir);
    auto f = [&](const char* name) { return (dir / name).string(); };
    const std::string cli = LATTICELIE_CLI;
    std::vector<std::pair<std::string, std::string>> steps{
        {"generate", cli + " generate --kind cauchy --seed 7 --rows 10 --cols 10 -o " + f("c.json")},
        {"evolve", cli + " evolve --cauchy " + f("c.json") + " --p0 1.3 -o " + f("n.json")},
        {"classify", cli + " classify --net " + f("n.json") + " --json -o " + f("class.json")},
        {"verify", cli + " verify --net " + f("n.json") + " -o " + f("verify.json")},
        {"export", cli + " export --net " + f("n.json") + " --samples 6 -o " + f("n.obj") + " > " + f("export.json")}};
    auto t0 = Clock::now();
    std::string failed;
    for (const auto& [name, cmd] : steps) {
        int rc = std::system(cmd.c_str());
        if (rc != 0) {
            failed = name + " exited " + std::to_string(rc);
            break;
        }
    }
    double t = seconds_since(t0);
    int vertices = 0, groups = 0;
    bool obj = failed.empty() && valid_obj(f("n.obj"), vertices, groups);
    bool ok = failed.empty() && obj && groups == 1 + 81 && t < 10;
    return {ok, (failed.empty() ? "all steps exit 0" : failed) + ", OBJ " + (obj ? "valid" : "invalid") + " with " +
                    std::to_string(vertices) + " vertices in " + std::to_string(groups) + " groups, " + sci(t) +
                    " s (< 10 s)"};
}

}  // namespace

int main() {
    const std::vector<std::function<Outcome()>> criteria{criterion1, criterion2, criterion3, criterion4,
                                                         criterion5, criterion6, criterion7, criterion8,
                                                         criterion9, criterion10, criterion11};
    int failures = 0;
    for (std::size_t k = 0; k < criteria.size(); ++k) {
        Outcome o;
        try {
            o = criteria[k]();
        } catch (const std::exception& e) {
            o = {false, std::string("exception: ") + e.what()};
        }
        failures += !o.pass;
        std::cout << "criterion " << k + 1 << ": " << (o.pass ? "PASS" : "FAIL") << "  " << o.detail << std::endl;
    }
    return failures == 0 ? 0 : 1;
}
