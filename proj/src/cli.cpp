#include "ttstar/cli.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>

#include "ttstar/geometry.hpp"
#include "ttstar/painleve3.hpp"
#include "ttstar/qc_frames.hpp"

namespace ttstar::cli {

using nlohmann::json;

namespace {

std::string fmt17(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

Cplx parse_complex(const std::string& s) {
    double re = 0.0, im = 0.0;
    auto comma = s.find(',');
    try {
        if (comma == std::string::npos) {
            re = std::stod(s);
        } else {
            re = std::stod(s.substr(0, comma));
            im = std::stod(s.substr(comma + 1));
        }
    } catch (const std::exception&) {
        throw CLI::ValidationError("--z expects re or re,im");
    }
    return {re, im};
}

std::vector<double> parse_list(const std::string& s) {
    std::vector<double> out;
    std::stringstream ss(s);
    std::string item;
    while (std::getline(ss, item, ',')) {
        if (!item.empty()) out.push_back(std::stod(item));
    }
    return out;
}

void write_obj(const std::string& path, const geometry::SurfaceMesh& mesh) {
    std::ofstream f(path);
    if (!f) throw DomainError("cannot open " + path);
    f << "# ttstar surface mesh (" << mesh.grid.nr << " x " << mesh.grid.ntheta << " polar grid)\n";
    for (const auto& v : mesh.vertices) {
        if (v.singular) {
            f << "v 0 0 0\n";  // placeholder; never referenced by a face
        } else {
            f << "v " << fmt17(v.point[0]) << ' ' << fmt17(v.point[1]) << ' ' << fmt17(v.point[2]) << '\n';
        }
    }
    for (const auto& q : mesh.faces) {
        f << "f " << q[0] + 1 << ' ' << q[1] + 1 << ' ' << q[2] + 1 << ' ' << q[3] + 1 << '\n';
    }
}

void write_annotations(const std::string& path, const geometry::SurfaceMesh& mesh) {
    json arr = json::array();
    for (size_t i = 0; i < mesh.vertices.size(); ++i) {
        const auto& v = mesh.vertices[i];
        json rec{{"index", i},
                 {"r", std::abs(v.z)},
                 {"theta", std::arg(v.z)},
                 {"singular", v.singular},
                 {"orbit_boundary", v.orbit_boundary}};
        if (!v.singular) {
            rec["u"] = v.u;
            rec["k"] = v.k;
            rec["orbit"] = factorization::orbit_name(v.orbit);
            rec["residual"] = v.residual;
        } else {
            rec["error"] = v.error;
        }
        arr.push_back(std::move(rec));
    }
    std::ofstream f(path);
    if (!f) throw DomainError("cannot open " + path);
    f << arr.dump(1) << '\n';
}

json status_json(const painleve3::TraceStatus& st) {
    json j{{"smooth", st.smooth}, {"x_end", st.x_end}};
    if (st.kind)
        j["kind"] = (*st.kind == painleve3::SingKind::VBlowUpPlus) ? "v_blow_up_plus" : "v_blow_up_minus";
    return j;
}

void emit(const RunReport& rep, const std::string& report_path, std::ostream& out) {
    if (report_path.empty()) {
        out << rep.to_json().dump(1) << '\n';
    } else {
        std::ofstream f(report_path);
        if (!f) throw DomainError("cannot open " + report_path);
        f << rep.to_json().dump(1) << '\n';
    }
}

}  // namespace

json RunReport::to_json() const {
    return json{{"command", command},
                {"parameters", parameters},
                {"outputs", outputs},
                {"diagnostics", diagnostics},
                {"wall_time", wall_time}};
}

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    CLI::App app{"tt* structure of the CP^1 quantum cohomology: loop-group factorization and Painleve III"};
    app.require_subcommand(1);
    app.fallthrough();  // --report may follow the subcommand
    std::string report_path;
    app.add_option("--report", report_path, "write the run report JSON here instead of stdout");

    // surface
    auto* surface = app.add_subcommand("surface", "build the immersion mesh and export OBJ");
    double s_a = 4.0 * painleve3::kEulerGamma;
    geometry::GridSpec grid;
    int s_degree = 16, s_threads = 0;
    std::string s_out = "mesh.obj", s_ann;
    surface->add_option("--a", s_a, "dressing parameter")->required();
    surface->add_option("--rmin", grid.r_min, "inner radius");
    surface->add_option("--rmax", grid.r_max, "outer radius");
    surface->add_option("--nr", grid.nr, "radial resolution");
    surface->add_option("--ntheta", grid.ntheta, "angular resolution");
    surface->add_option("--degree", s_degree, "factorization truncation degree");
    surface->add_option("--out", s_out, "OBJ output path");
    surface->add_option("--annotations", s_ann, "per-vertex annotation JSON path");
    surface->add_option("--threads", s_threads, "worker threads (0 = hardware)");

    // piii
    auto* piii = app.add_subcommand("piii", "integrate the radial sinh-Gordon / Painleve III trace");
    double p_a = 4.0 * painleve3::kEulerGamma, p_x0 = 1e-4, p_xmax = 20.0, p_tol = 1e-9;
    std::string p_out = "trace.csv";
    piii->add_option("--a", p_a, "dressing parameter")->required();
    piii->add_option("--x0", p_x0, "seed abscissa");
    piii->add_option("--xmax", p_xmax, "integration horizon");
    piii->add_option("--tol", p_tol, "integration tolerance");
    piii->add_option("--out", p_out, "CSV output path");

    // scan
    auto* scan = app.add_subcommand("scan", "classify smooth/singular per dressing parameter");
    std::string sc_list;
    double sc_xmax = 20.0, sc_tol = 1e-9, sc_x0 = 1e-4;
    scan->add_option("--a-list", sc_list, "comma-separated dressing parameters")->required();
    scan->add_option("--xmax", sc_xmax, "classification horizon");
    scan->add_option("--tol", sc_tol, "integration tolerance");
    scan->add_option("--x0", sc_x0, "seed abscissa");

    // crosscheck
    auto* cross = app.add_subcommand("crosscheck", "dual-pipeline comparison of the metric");
    double c_a = 4.0 * painleve3::kEulerGamma, c_tol = 1e-9;
    int c_degree = 16;
    std::string c_list;
    cross->add_option("--a", c_a, "dressing parameter")->required();
    cross->add_option("--r-list", c_list, "comma-separated radii")->required();
    cross->add_option("--tol", c_tol, "ODE tolerance");
    cross->add_option("--degree", c_degree, "factorization truncation degree");

    // modelcase
    auto* model = app.add_subcommand("modelcase", "closed-form model factorization vs numeric");
    double m_a = 1.0;
    int m_degree = 16;
    std::string m_z = "0.5";
    model->add_option("--a", m_a, "dressing parameter")->required();
    model->add_option("--z", m_z, "domain point, re or re,im")->required();
    model->add_option("--degree", m_degree, "factorization truncation degree");

    std::vector<std::string> rev(args.rbegin(), args.rend());
    try {
        app.parse(rev);
    } catch (const CLI::ParseError& e) {
        int code = app.exit(e, out, err);
        return code == 0 ? 0 : 1;
    }

    const auto t_start = std::chrono::steady_clock::now();
    RunReport rep;
    try {
        if (surface->parsed()) {
            rep.command = "surface";
            LoopConfig cfg;
            cfg.degree = s_degree;
            rep.parameters = {{"a", s_a},         {"rmin", grid.r_min}, {"rmax", grid.r_max},
                              {"nr", grid.nr},    {"ntheta", grid.ntheta}, {"degree", s_degree},
                              {"out", s_out},     {"annotations", s_ann},  {"threads", s_threads}};
            auto mesh = geometry::build_mesh(s_a, grid, cfg, 0.5, s_threads);
            write_obj(s_out, mesh);
            rep.outputs.push_back(s_out);
            if (!s_ann.empty()) {
                write_annotations(s_ann, mesh);
                rep.outputs.push_back(s_ann);
            }
            double max_resid = 0.0, max_defect = 0.0;
            for (const auto& v : mesh.vertices) {
                if (v.singular) continue;
                max_resid = std::max(max_resid, v.residual);
                max_defect = std::max(max_defect, v.su11_defect);
            }
            rep.diagnostics = {{"vertices", mesh.vertices.size()},
                               {"faces", mesh.faces.size()},
                               {"singular_vertices", mesh.singular_count},
                               {"orbit_boundary_vertices", mesh.orbit_boundary_count},
                               {"dropped_faces", mesh.dropped_faces},
                               {"max_birkhoff_residual", max_resid},
                               {"max_su11_defect", max_defect}};
        } else if (piii->parsed()) {
            rep.command = "piii";
            rep.parameters = {{"a", p_a}, {"x0", p_x0}, {"xmax", p_xmax}, {"tol", p_tol}, {"out", p_out}};
            auto seed = painleve3::piii_seed(p_a, p_x0);
            auto tr = painleve3::integrate(seed, p_a, p_x0, p_xmax, p_tol);
            std::ofstream f(p_out);
            if (!f) throw DomainError("cannot open " + p_out);
            f << "x,v,vp,y\n";
            for (const auto& n : tr.nodes)
                f << fmt17(n.x) << ',' << fmt17(n.v) << ',' << fmt17(n.vp) << ',' << fmt17(std::exp(n.v)) << '\n';
            rep.outputs.push_back(p_out);
            rep.diagnostics = {{"status", status_json(tr.status)},
                               {"nodes", tr.nodes.size()},
                               {"residual_per_unit_length", tr.residual_per_unit_length()}};
        } else if (scan->parsed()) {
            rep.command = "scan";
            rep.parameters = {{"a_list", sc_list}, {"xmax", sc_xmax}, {"tol", sc_tol}, {"x0", sc_x0}};
            json summary = json::object();
            json details = json::array();
            std::stringstream ss(sc_list);
            std::string tok;
            while (std::getline(ss, tok, ',')) {
                if (tok.empty()) continue;
                const double a = std::stod(tok);
                auto res = painleve3::classify(a, sc_xmax, sc_tol, sc_x0);
                summary[tok] = res.status.smooth ? "smooth" : "singular";
                json d{{"a", a},
                       {"status", status_json(res.status)},
                       {"x_raw_end", res.x_raw_end},
                       {"credibility_limited", res.credibility_limited}};
                if (!res.status.smooth || res.credibility_limited) d["envelope"] = res.envelope;
                details.push_back(std::move(d));
            }
            rep.diagnostics = {{"summary", summary}, {"details", details}};
        } else if (cross->parsed()) {
            rep.command = "crosscheck";
            LoopConfig cfg;
            cfg.degree = c_degree;
            rep.parameters = {{"a", c_a}, {"r_list", c_list}, {"tol", c_tol}, {"degree", c_degree}};
            auto repc = painleve3::crosscheck(c_a, parse_list(c_list), cfg, c_tol);
            json rows = json::array();
            for (const auto& r : repc.rows)
                rows.push_back(json{{"r", r.r}, {"k", r.k}, {"y_loop", r.y_loop}, {"y_ode", r.y_ode},
                                    {"rel_err", r.rel_err}});
            rep.diagnostics = {{"rows", rows}, {"max_rel_err", repc.max_rel_err}};
        } else if (model->parsed()) {
            rep.command = "modelcase";
            LoopConfig cfg;
            cfg.degree = m_degree;
            const Cplx z = parse_complex(m_z);
            const Cplx t = std::log(z);
            rep.parameters = {{"a", m_a}, {"z", m_z}, {"degree", m_degree}};
            auto oracle = factorization::model_iwasawa(m_a, t);
            auto numeric = factorization::iwasawa_su11(qc_frames::model_E(m_a, t), cfg);
            const double b_diff = loops::max_coeff_norm(numeric.B - oracle.B);
            rep.diagnostics = {
                {"oracle", {{"orbit", factorization::orbit_name(oracle.orbit)}, {"k", oracle.k}}},
                {"numeric",
                 {{"orbit", factorization::orbit_name(numeric.orbit)},
                  {"k", numeric.k},
                  {"residual", numeric.diag.birkhoff_residual},
                  {"condition", numeric.diag.condition},
                  {"reconstruction", numeric.diag.reconstruction},
                  {"reality", numeric.diag.reality}}},
                {"b_coeff_max_diff", b_diff},
                {"orbit_match", oracle.orbit == numeric.orbit},
                {"k_rel_err", std::abs(numeric.k - oracle.k) / oracle.k}};
        }
    } catch (const Error& e) {
        err << "numerical failure: " << e.what() << '\n';
        return 2;
    } catch (const std::invalid_argument& e) {
        err << "bad argument: " << e.what() << '\n';
        return 1;
    }

    rep.wall_time = std::chrono::duration<double>(std::chrono::steady_clock::now() - t_start).count();
    emit(rep, report_path, out);
    return 0;
}

}  // namespace ttstar::cli
