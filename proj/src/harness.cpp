#include "circlelab/harness.hpp"

#include "circlelab/exp_sum_chain.hpp"
#include "circlelab/exponent_calculus.hpp"
#include "circlelab/lattice_counts.hpp"
#include "circlelab/psi_fourier.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <thread>

namespace circlelab::harness {

using nlohmann::json;

std::string fmt17(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

// ---------------------------------------------------------------------------
// sweeps

std::vector<u64> sweep_grid(u64 t_min, u64 t_max, int points) {
    if (t_min < 1) throw std::out_of_range("sweep: t_min must be at least 1");
    if (t_max < t_min) throw std::out_of_range("sweep: t_max must be at least t_min");
    if (points < 2) throw std::out_of_range("sweep: points must be at least 2");
    std::vector<u64> ts((std::size_t)points);
    ts.front() = t_min;
    ts.back() = t_max;
    const double la = std::log((double)t_min), lb = std::log((double)t_max);
    for (int i = 1; i + 1 < points; ++i)
        ts[(std::size_t)i] = (u64)llround(std::exp(la + (lb - la) * i / (points - 1)));
    return ts;
}

SweepRecord sweep_record(u64 t) {
    SweepRecord rec;
    rec.t = t;
    try {
        CircleCount c = count_lattice_points(t);
        PsiSumResult s = psi_sum(t);
        rec.p = c.p;
        rec.delta = c.delta;
        rec.psi_sum = s.sum;
        rec.prop_residual = s.residual;
    } catch (const std::exception& e) {
        rec.error = e.what();
    }
    return rec;
}

std::vector<SweepRecord> run_sweep(u64 t_min, u64 t_max, int points, int jobs) {
    const std::vector<u64> ts = sweep_grid(t_min, t_max, points);
    std::vector<SweepRecord> rows(ts.size());
    jobs = std::clamp(jobs, 1, 256);
    if (jobs == 1) {
        for (std::size_t i = 0; i < ts.size(); ++i) rows[i] = sweep_record(ts[i]);
        return rows;
    }
    // independent rows, ordered output slots: identical bytes for any schedule
    std::atomic<std::size_t> next{0};
    auto worker = [&] {
        for (std::size_t i; (i = next.fetch_add(1)) < ts.size();)
            rows[i] = sweep_record(ts[i]);
    };
    std::vector<std::thread> pool;
    for (int j = 0; j < jobs; ++j) pool.emplace_back(worker);
    for (auto& th : pool) th.join();
    return rows;
}

std::string csv_from_records(const std::vector<SweepRecord>& records) {
    std::string out = "t,p,delta,psi_sum,prop_residual,error\n";
    for (const SweepRecord& r : records) {
        if (r.error.empty()) {
            out += std::to_string(r.t) + ',' + std::to_string(r.p) + ',' + fmt17(r.delta) +
                   ',' + fmt17(r.psi_sum) + ',' + fmt17(r.prop_residual) + ",\n";
        } else {
            out += std::to_string(r.t) + ",,,,," + r.error + '\n';
        }
    }
    return out;
}

// ---------------------------------------------------------------------------
// fitting

FitResult fit_line(const std::vector<double>& xs, const std::vector<double>& ys) {
    if (xs.size() != ys.size() || xs.size() < 3)
        throw std::invalid_argument("fit: need at least 3 points");
    const double n = (double)xs.size();
    double sx = 0, sy = 0;
    for (std::size_t i = 0; i < xs.size(); ++i) sx += xs[i], sy += ys[i];
    const double mx = sx / n, my = sy / n;
    double sxx = 0, sxy = 0, syy = 0;
    for (std::size_t i = 0; i < xs.size(); ++i) {
        sxx += (xs[i] - mx) * (xs[i] - mx);
        sxy += (xs[i] - mx) * (ys[i] - my);
        syy += (ys[i] - my) * (ys[i] - my);
    }
    if (sxx == 0) throw std::invalid_argument("fit: x values are all equal");
    FitResult f;
    f.n_points = (int)xs.size();
    f.slope = sxy / sxx;
    f.intercept = my - f.slope * mx;
    f.r_squared = syy == 0 ? 1.0 : std::clamp(sxy * sxy / (sxx * syy), 0.0, 1.0);
    return f;
}

namespace {

std::vector<std::string> split_csv_line(const std::string& line) {
    std::vector<std::string> fields;
    std::string cur;
    for (char ch : line) {
        if (ch == ',') {
            fields.push_back(cur);
            cur.clear();
        } else if (ch != '\r') {
            cur += ch;
        }
    }
    fields.push_back(cur);
    return fields;
}

// Column extraction shared by fit and plot; loglog maps to (ln|x|, ln|y|)
// and drops zeros; unparseable rows (inline error rows) are skipped.
void read_columns(std::istream& csv, const std::string& xcol, const std::string& ycol,
                  bool loglog, std::vector<double>& xs, std::vector<double>& ys) {
    std::string line;
    if (!std::getline(csv, line)) throw std::invalid_argument("csv: missing header row");
    const std::vector<std::string> header = split_csv_line(line);
    auto col = [&](const std::string& name) {
        auto it = std::find(header.begin(), header.end(), name);
        if (it == header.end())
            throw std::invalid_argument("csv: no column named \"" + name + "\"");
        return (std::size_t)(it - header.begin());
    };
    const std::size_t xi = col(xcol), yi = col(ycol);
    while (std::getline(csv, line)) {
        if (line.empty()) continue;
        const std::vector<std::string> f = split_csv_line(line);
        if (f.size() <= std::max(xi, yi)) continue;
        char* endx = nullptr;
        char* endy = nullptr;
        double x = std::strtod(f[xi].c_str(), &endx);
        double y = std::strtod(f[yi].c_str(), &endy);
        if (endx == f[xi].c_str() || *endx != '\0') continue;
        if (endy == f[yi].c_str() || *endy != '\0') continue;
        if (!std::isfinite(x) || !std::isfinite(y)) continue;
        if (loglog) {
            if (x == 0 || y == 0) continue;
            x = std::log(std::fabs(x));
            y = std::log(std::fabs(y));
        }
        xs.push_back(x);
        ys.push_back(y);
    }
}

} // namespace

FitResult fit_csv(std::istream& csv, const std::string& xcol, const std::string& ycol,
                  bool loglog) {
    std::vector<double> xs, ys;
    read_columns(csv, xcol, ycol, loglog, xs, ys);
    return fit_line(xs, ys);
}

// ---------------------------------------------------------------------------
// plotting

std::string svg_scatter(std::istream& csv, const std::string& xcol,
                        const std::string& ycol, bool loglog) {
    std::vector<double> xs, ys;
    read_columns(csv, xcol, ycol, loglog, xs, ys);
    if (xs.empty()) throw std::invalid_argument("plot: no usable rows");

    auto esc = [](const std::string& s) {
        std::string o;
        for (char ch : s) {
            if (ch == '&') o += "&amp;";
            else if (ch == '<') o += "&lt;";
            else if (ch == '>') o += "&gt;";
            else o += ch;
        }
        return o;
    };
    const double W = 640, H = 480, ML = 70, MR = 20, MT = 30, MB = 50;
    double xmin = xs[0], xmax = xs[0], ymin = ys[0], ymax = ys[0];
    for (double v : xs) xmin = std::min(xmin, v), xmax = std::max(xmax, v);
    for (double v : ys) ymin = std::min(ymin, v), ymax = std::max(ymax, v);
    if (xmax == xmin) xmax = xmin + 1;
    if (ymax == ymin) ymax = ymin + 1;
    auto px = [&](double x) { return ML + (x - xmin) / (xmax - xmin) * (W - ML - MR); };
    auto py = [&](double y) { return H - MB - (y - ymin) / (ymax - ymin) * (H - MT - MB); };
    auto num = [](double v) {
        char b[32];
        std::snprintf(b, sizeof b, "%.6g", v);
        return std::string(b);
    };

    std::string axis_note = loglog ? " (log-log)" : "";
    std::string s;
    s += "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n";
    s += "<svg xmlns=\"http://www.w3.org/2000/svg\" version=\"1.1\" width=\"640\" "
         "height=\"480\" viewBox=\"0 0 640 480\">\n";
    s += "  <rect x=\"" + num(ML) + "\" y=\"" + num(MT) + "\" width=\"" + num(W - ML - MR) +
         "\" height=\"" + num(H - MT - MB) +
         "\" fill=\"none\" stroke=\"black\" stroke-width=\"1\"/>\n";
    s += "  <text x=\"" + num(W / 2) + "\" y=\"18\" text-anchor=\"middle\" "
         "font-family=\"monospace\" font-size=\"13\">" +
         esc(ycol) + " vs " + esc(xcol) + esc(axis_note) + "</text>\n";
    // min/max tick labels on both axes
    s += "  <text x=\"" + num(ML) + "\" y=\"" + num(H - MB + 18) +
         "\" text-anchor=\"middle\" font-family=\"monospace\" font-size=\"11\">" +
         num(xmin) + "</text>\n";
    s += "  <text x=\"" + num(W - MR) + "\" y=\"" + num(H - MB + 18) +
         "\" text-anchor=\"middle\" font-family=\"monospace\" font-size=\"11\">" +
         num(xmax) + "</text>\n";
    s += "  <text x=\"" + num(ML - 6) + "\" y=\"" + num(H - MB + 4) +
         "\" text-anchor=\"end\" font-family=\"monospace\" font-size=\"11\">" + num(ymin) +
         "</text>\n";
    s += "  <text x=\"" + num(ML - 6) + "\" y=\"" + num(MT + 4) +
         "\" text-anchor=\"end\" font-family=\"monospace\" font-size=\"11\">" + num(ymax) +
         "</text>\n";
    s += "  <text x=\"" + num(W / 2) + "\" y=\"" + num(H - 12) +
         "\" text-anchor=\"middle\" font-family=\"monospace\" font-size=\"12\">" + esc(xcol) +
         "</text>\n";
    for (std::size_t i = 0; i < xs.size(); ++i)
        s += "  <circle cx=\"" + num(px(xs[i])) + "\" cy=\"" + num(py(ys[i])) +
             "\" r=\"2.5\" fill=\"steelblue\"/>\n";
    s += "</svg>\n";
    return s;
}

// ---------------------------------------------------------------------------
// CLI

namespace {

json complex_to_json(const ComplexValue& z) {
    return json{{"re", z.real()}, {"im", z.imag()}};
}

json record_to_json(const SweepRecord& r) {
    json j{{"t", r.t}};
    if (!r.error.empty()) {
        j["error"] = r.error;
        return j;
    }
    j["p"] = r.p;
    j["delta"] = r.delta;
    j["psi_sum"] = r.psi_sum;
    j["prop_residual"] = r.prop_residual;
    for (const auto& [k, v] : r.extra) j[k] = v;
    return j;
}

struct OutputTarget {
    std::ostream& fallback;
    std::string path;

    int write(const std::string& payload, std::ostream& err) const {
        if (path.empty()) {
            fallback << payload;
            return 0;
        }
        std::ofstream f(path, std::ios::binary);
        if (!f) {
            err << "cannot open output file \"" << path << "\"\n";
            return 1;
        }
        f << payload;
        return 0;
    }
};

int emit_error(const std::string& cmd, const std::string& msg, bool json_mode,
               std::ostream& out, std::ostream& err) {
    if (json_mode) {
        out << json{{"error", {{"command", cmd}, {"message", msg}}}}.dump(2) << "\n";
    } else if (msg.rfind(cmd + ":", 0) == 0) {
        err << msg << "\n";
    } else {
        err << cmd << ": " << msg << "\n";
    }
    return 1;
}

} // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    CLI::App app{"numerical laboratory for the circle-problem error term"};
    app.require_subcommand(1);
    app.set_config("--config", "", "key=value defaults; explicit flags win");

    // count
    auto* c_count = app.add_subcommand("count", "exact lattice count and delta at one t");
    u64 count_t = 0;
    std::string count_fmt = "json";
    c_count->add_option("--t", count_t, "argument of P(t)")->required();
    c_count->add_option("--format", count_fmt)->check(CLI::IsMember({"csv", "json"}));

    // sweep
    auto* c_sweep = app.add_subcommand("sweep", "log-spaced sweep of counts and residuals");
    std::vector<u64> sweep_t;
    int sweep_points = 10;
    int sweep_jobs = 1;
    std::string sweep_fmt = "csv", sweep_out;
    c_sweep->add_option("--t", sweep_t, "t range: min max (one value = single point range)")
        ->required()
        ->expected(1, 2);
    c_sweep->add_option("--points", sweep_points, "grid size (>= 2)");
    c_sweep->add_option("--jobs", sweep_jobs, "worker threads")->envname("CIRCLELAB_JOBS");
    c_sweep->add_option("--format", sweep_fmt)->check(CLI::IsMember({"csv", "json"}));
    c_sweep->add_option("--out", sweep_out, "write to file instead of stdout");

    // expsum
    auto* c_exp = app.add_subcommand("expsum", "exponential-sum chain residuals at (r, t)");
    i64 exp_r = 0;
    u64 exp_t = 0;
    int exp_order = 8;
    bool exp_poisson = false;
    std::string exp_fmt = "json";
    c_exp->add_option("--r", exp_r, "frequency r")->required();
    c_exp->add_option("--t", exp_t, "argument t")->required();
    c_exp->add_option("--order", exp_order, "Taylor order N (even, 4..8)");
    c_exp->add_flag("--poisson", exp_poisson, "include the Poisson quadrature reference");
    c_exp->add_option("--format", exp_fmt)->check(CLI::IsMember({"csv", "json"}));

    // psi
    auto* c_psi = app.add_subcommand("psi", "psi-sum vs truncated Fourier expansion");
    u64 psi_t = 0;
    u64 psi_R = 0;
    std::string psi_fmt = "json";
    c_psi->add_option("--t", psi_t, "argument t")->required();
    c_psi->add_option("--points", psi_R, "number of Fourier modes R")->required();
    c_psi->add_option("--format", psi_fmt)->check(CLI::IsMember({"csv", "json"}));

    // exponents
    auto* c_expo = app.add_subcommand("exponents", "scripted exponent derivation audit");
    std::string expo_section;
    std::string expo_out;
    c_expo->add_option("--section", expo_section, "derivation chain")
        ->required()
        ->check(CLI::IsMember({"3", "4a", "4b", "5", "6"}));
    c_expo->add_option("--out", expo_out, "write to file instead of stdout");

    // fit
    auto* c_fit = app.add_subcommand("fit", "least-squares power-law fit of CSV columns");
    std::string fit_path, fit_x, fit_y;
    bool fit_linear = false;
    std::string fit_fmt = "json";
    c_fit->add_option("csv", fit_path, "input CSV path")->required();
    c_fit->add_option("x", fit_x, "x column name")->required();
    c_fit->add_option("y", fit_y, "y column name")->required();
    c_fit->add_flag("--linear", fit_linear, "fit raw values instead of ln|.| vs ln|.|");
    c_fit->add_option("--format", fit_fmt)->check(CLI::IsMember({"csv", "json"}));

    // plot
    auto* c_plot = app.add_subcommand("plot", "SVG scatter of CSV columns");
    std::string plot_path, plot_x = "t", plot_y = "delta", plot_out;
    bool plot_loglog = false;
    c_plot->add_option("csv", plot_path, "input CSV path")->required();
    c_plot->add_option("--x", plot_x, "x column name");
    c_plot->add_option("--y", plot_y, "y column name");
    c_plot->add_flag("--loglog", plot_loglog, "transform both axes");
    c_plot->add_option("--out", plot_out, "write to file instead of stdout");

    std::vector<std::string> rev(args.rbegin(), args.rend());
    try {
        app.parse(rev);
    } catch (const CLI::ParseError& e) {
        return app.exit(e, out, err);
    }

    try {
        if (app.got_subcommand(c_count)) {
            const bool jm = count_fmt == "json";
            try {
                CircleCount c = count_lattice_points(count_t);
                if (jm) {
                    out << json{{"t", c.t}, {"p", c.p}, {"delta", c.delta}}.dump(2) << "\n";
                } else {
                    out << "t,p,delta\n"
                        << c.t << ',' << c.p << ',' << fmt17(c.delta) << "\n";
                }
            } catch (const std::exception& e) {
                return emit_error("count", e.what(), jm, out, err);
            }
            return 0;
        }

        if (app.got_subcommand(c_sweep)) {
            const bool jm = sweep_fmt == "json";
            try {
                const u64 lo = sweep_t.front();
                const u64 hi = sweep_t.size() > 1 ? sweep_t[1] : sweep_t.front();
                std::vector<SweepRecord> rows = run_sweep(lo, hi, sweep_points, sweep_jobs);
                std::string payload;
                if (jm) {
                    json arr = json::array();
                    for (const auto& r : rows) arr.push_back(record_to_json(r));
                    payload = arr.dump(2) + "\n";
                } else {
                    payload = csv_from_records(rows);
                }
                return OutputTarget{out, sweep_out}.write(payload, err);
            } catch (const std::exception& e) {
                return emit_error("sweep", e.what(), jm, out, err);
            }
        }

        if (app.got_subcommand(c_exp)) {
            const bool jm = exp_fmt == "json";
            try {
                if (exp_r < 1) throw std::out_of_range("expsum: r must be at least 1");
                if ((u64)exp_r * (u64)exp_r > exp_t)
                    throw std::out_of_range("expsum: requires r <= sqrt(t)");
                ChainResiduals cr = chain_residuals(exp_r, exp_t, exp_order, exp_poisson);
                json j{{"r", cr.r},
                       {"t", cr.t},
                       {"order", exp_order},
                       {"direct", complex_to_json(cr.direct)},
                       {"stationary", complex_to_json(cr.stationary)},
                       {"n_form", complex_to_json(cr.n_form)},
                       {"reformulated", complex_to_json(cr.reformulated)},
                       {"gaps", cr.gaps}};
                if (exp_poisson) j["poisson"] = complex_to_json(cr.poisson);
                if (jm) {
                    out << j.dump(2) << "\n";
                } else {
                    out << "name,re,im\n";
                    for (const char* name : {"direct", "stationary", "n_form", "reformulated"})
                        out << name << ',' << fmt17(j[name]["re"].get<double>()) << ','
                            << fmt17(j[name]["im"].get<double>()) << "\n";
                }
            } catch (const std::exception& e) {
                return emit_error("expsum", e.what(), jm, out, err);
            }
            return 0;
        }

        if (app.got_subcommand(c_psi)) {
            const bool jm = psi_fmt == "json";
            try {
                PsiSumResult s = psi_sum(psi_t);
                double fourier = truncated_fourier_sum(psi_t, psi_R);
                double gap = std::fabs(s.sum - fourier);
                json j{{"t", psi_t},
                       {"R", psi_R},
                       {"psi_sum", s.sum},
                       {"fourier_sum", fourier},
                       {"gap", gap},
                       {"scaled_gap", gap * (double)psi_R / std::pow((double)psi_t, 0.51)}};
                if (jm)
                    out << j.dump(2) << "\n";
                else
                    out << "t,R,psi_sum,fourier_sum,gap\n"
                        << psi_t << ',' << psi_R << ',' << fmt17(s.sum) << ',' << fmt17(fourier)
                        << ',' << fmt17(gap) << "\n";
            } catch (const std::exception& e) {
                return emit_error("psi", e.what(), jm, out, err);
            }
            return 0;
        }

        if (app.got_subcommand(c_expo)) {
            try {
                Derivation d = derive_section(expo_section);
                return OutputTarget{out, expo_out}.write(derivation_to_json(d).dump(2) + "\n",
                                                         err);
            } catch (const std::exception& e) {
                return emit_error("exponents", e.what(), true, out, err);
            }
        }

        if (app.got_subcommand(c_fit)) {
            const bool jm = fit_fmt == "json";
            try {
                std::ifstream f(fit_path);
                if (!f) throw std::invalid_argument("cannot open \"" + fit_path + "\"");
                FitResult r = fit_csv(f, fit_x, fit_y, !fit_linear);
                if (jm) {
                    out << json{{"slope", r.slope},
                                {"intercept", r.intercept},
                                {"r_squared", r.r_squared},
                                {"n_points", r.n_points}}
                               .dump(2)
                        << "\n";
                } else {
                    out << "slope,intercept,r_squared,n_points\n"
                        << fmt17(r.slope) << ',' << fmt17(r.intercept) << ','
                        << fmt17(r.r_squared) << ',' << r.n_points << "\n";
                }
            } catch (const std::exception& e) {
                return emit_error("fit", e.what(), jm, out, err);
            }
            return 0;
        }

        if (app.got_subcommand(c_plot)) {
            try {
                std::ifstream f(plot_path);
                if (!f) throw std::invalid_argument("cannot open \"" + plot_path + "\"");
                std::string svg = svg_scatter(f, plot_x, plot_y, plot_loglog);
                return OutputTarget{out, plot_out}.write(svg, err);
            } catch (const std::exception& e) {
                return emit_error("plot", e.what(), false, out, err);
            }
        }
    } catch (const std::exception& e) {
        err << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}

} // namespace circlelab::harness
