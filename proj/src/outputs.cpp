#include "dualflow/outputs.hpp"

#include <json.hpp>

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <limits>
#include <stdexcept>

namespace dualflow {

namespace {

std::ofstream open_out(const std::string& path) {
    std::ofstream f(path, std::ios::trunc);
    if (!f) throw std::runtime_error("cannot write '" + path + "'");
    return f;
}

void close_checked(std::ofstream& f, const std::string& path) {
    f.close();
    if (!f) throw std::runtime_error("I/O error writing '" + path + "'");
}

std::string json_number(double x) { return std::isfinite(x) ? format17(x) : "null"; }

std::string json_string(const std::string& s) { return nlohmann::json(s).dump(); }

std::string json_array(const std::vector<double>& v) {
    std::string s = "[";
    for (std::size_t i = 0; i < v.size(); ++i) {
        if (i) s += ", ";
        s += json_number(v[i]);
    }
    return s + "]";
}

}  // namespace

std::string format17(double x) {
    if (std::isnan(x)) return "nan";
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", x);
    return buf;
}

std::string csv_row(const DiagnosticsRecord& r) {
    const double f[] = {r.t,          r.tau,        r.u_min,       r.u_max,         r.pinch_ratio,
                        r.horoconvex_margin, r.pinching_T, r.osc_F_tilde, r.f_sigma_max, r.A2_minus_nF2_max,
                        r.rho_minus,  r.rho_plus,   r.duality_err, r.w_min,         r.w_max};
    std::string s;
    for (std::size_t i = 0; i < std::size(f); ++i) {
        if (i) s += ',';
        s += format17(f[i]);
    }
    return s;
}

void write_outputs(const OutputPaths& paths, const Grid& grid, const RunSummary& summary,
                   const std::vector<Snapshot>& snapshots, const std::vector<DiagnosticsRecord>& records,
                   const std::vector<std::pair<double, double>>& plot) {
    std::error_code ec;
    std::filesystem::create_directories(paths.dir, ec);
    if (ec) throw std::runtime_error("cannot create output directory '" + paths.dir + "': " + ec.message());

    {
        auto f = open_out(paths.csv());
        f << kCsvHeader << "\n";
        for (const auto& r : records) f << csv_row(r) << "\n";
        close_checked(f, paths.csv());
    }
    {
        auto f = open_out(paths.snapshots());
        f << "{\n";
        f << "  \"grid\": {\"mode\": \"" << (grid.mode == GridMode::Circle ? "circle" : "axisym") << "\", \"n\": " << grid.n
          << ", \"m\": " << grid.m << ", \"h\": " << format17(grid.h) << ", \"nodes\": " << json_array(grid.nodes())
          << "},\n";
        f << "  \"F\": " << json_string(summary.F) << ",\n";
        f << "  \"status\": " << json_string(summary.status) << ",\n";
        f << "  \"message\": " << json_string(summary.message) << ",\n";
        f << "  \"T_star_estimate\": " << json_number(summary.T_star_estimate) << ",\n";
        f << "  \"T_star_spread\": " << json_number(summary.T_star_spread) << ",\n";
        f << "  \"T_star_warning\": " << (summary.T_star_warning ? "true" : "false") << ",\n";
        f << "  \"extinction_offset\": " << json_number(summary.extinction_offset) << ",\n";
        f << "  \"assumption_clause\": " << summary.assumption_clause << ",\n";
        f << "  \"snapshots\": [";
        for (std::size_t i = 0; i < snapshots.size(); ++i) {
            const auto& s = snapshots[i];
            f << (i ? ",\n" : "\n") << "    {\"t\": " << format17(s.t) << ", \"u\": " << json_array(s.u)
              << ", \"u_star\": " << (s.u_star.empty() ? "null" : json_array(s.u_star))
              << ", \"f_sigma_int_p2\": " << json_number(s.f_sigma_int_p2)
              << ", \"f_sigma_int_p8\": " << json_number(s.f_sigma_int_p8) << "}";
        }
        f << (snapshots.empty() ? "]\n" : "\n  ]\n") << "}\n";
        close_checked(f, paths.snapshots());
    }
    {
        auto f = open_out(paths.plot());
        f << "# tau osc_u_tilde\n";
        for (const auto& [tau, osc] : plot) f << format17(tau) << " " << format17(osc) << "\n";
        close_checked(f, paths.plot());
    }
}

void write_failure(const OutputPaths& paths, const FailureRecord& fr) {
    std::error_code ec;
    std::filesystem::create_directories(paths.dir, ec);
    nlohmann::ordered_json j;
    j["kind"] = fr.kind;
    j["status"] = fr.status;
    j["message"] = fr.message;
    j["node"] = fr.node;
    j["t"] = fr.t;
    j["violations"] = fr.violations;
    auto f = open_out(paths.failure());
    f << j.dump(2) << "\n";
    close_checked(f, paths.failure());
}

LoadedSnapshots load_snapshots(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot read '" + path + "'");
    nlohmann::json j;
    try {
        in >> j;
    } catch (const nlohmann::json::exception& e) {
        throw std::runtime_error("malformed snapshots file '" + path + "': " + e.what());
    }
    LoadedSnapshots out;
    const auto& g = j.at("grid");
    const int n = g.at("n").get<int>(), m = g.at("m").get<int>();
    out.grid = g.at("mode").get<std::string>() == "circle" ? Grid::circle(m) : Grid::axisym(n, m);
    out.summary.F = j.at("F").get<std::string>();
    out.summary.status = j.at("status").get<std::string>();
    out.summary.message = j.at("message").get<std::string>();
    auto num = [](const nlohmann::json& x) {
        return x.is_null() ? std::numeric_limits<double>::quiet_NaN() : x.get<double>();
    };
    out.summary.T_star_estimate = num(j.at("T_star_estimate"));
    out.summary.T_star_spread = num(j.at("T_star_spread"));
    out.summary.T_star_warning = j.at("T_star_warning").get<bool>();
    out.summary.extinction_offset = num(j.at("extinction_offset"));
    out.summary.assumption_clause = j.at("assumption_clause").get<int>();
    for (const auto& s : j.at("snapshots")) {
        Snapshot snap;
        snap.t = s.at("t").get<double>();
        for (const auto& x : s.at("u")) snap.u.push_back(num(x));
        if (!s.at("u_star").is_null())
            for (const auto& x : s.at("u_star")) snap.u_star.push_back(num(x));
        snap.f_sigma_int_p2 = num(s.at("f_sigma_int_p2"));
        snap.f_sigma_int_p8 = num(s.at("f_sigma_int_p8"));
        out.snapshots.push_back(std::move(snap));
    }
    return out;
}

}  // namespace dualflow
