// cafsim: LDPC-BICM compute-and-forward analysis tool.
// Subcommands: constellation, sir, de, simulate, figure. All outputs are
// CSV with a '#' comment header echoing the full run configuration.
#include <CLI11.hpp>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <numbers>
#include <sstream>

#include "caf/density_evolution.hpp"
#include "caf/kernels.hpp"
#include "caf/pipeline.hpp"
#include "caf/sir.hpp"

namespace {

constexpr const char* kVersion = "cafsim 0.1.0";

// Accepts plain radians or symbolic multiples of pi: "pi/4", "3pi/8", "-pi/2".
double parse_theta(const std::string& text) {
    const auto pos = text.find("pi");
    if (pos == std::string::npos) return std::stod(text);
    double mult = 1.0;
    std::string pre = text.substr(0, pos);
    if (pre == "-") mult = -1.0;
    else if (!pre.empty()) mult = std::stod(pre);
    double div = 1.0;
    std::string post = text.substr(pos + 2);
    if (!post.empty()) {
        if (post[0] != '/') throw CLI::ValidationError("theta", "expected e.g. pi/4 or 3pi/8");
        div = std::stod(post.substr(1));
    }
    return mult * std::numbers::pi / div;
}

struct Output {
    std::ofstream file;
    std::ostream* os = &std::cout;

    void open(const std::string& path) {
        if (path.empty()) return;
        file.open(path);
        if (!file) throw std::runtime_error("cannot open output file: " + path);
        os = &file;
    }
    std::ostream& stream() { return *os; }
};

void write_header(std::ostream& os, const std::string& subcommand,
                  const std::vector<std::pair<std::string, std::string>>& params) {
    os << "# " << kVersion << "\n# subcommand: " << subcommand << "\n";
    for (const auto& [k, v] : params) os << "# " << k << ": " << v << "\n";
}

std::string fmt(double v) {
    std::ostringstream ss;
    ss.precision(12);
    ss << v;
    return ss.str();
}

// ---- subcommand payloads ----------------------------------------------

struct ConstellationArgs {
    std::string modulation = "qpsk";
    std::string theta = "pi/4";
    std::string out;
};

int run_constellation(const ConstellationArgs& a) {
    const double theta = parse_theta(a.theta);
    auto c = caf::Constellation::make(caf::parse_modulation(a.modulation));
    auto rc = caf::received_constellation(c, theta);

    Output out;
    out.open(a.out);
    write_header(out.stream(), "constellation",
                 {{"modulation", a.modulation}, {"theta", fmt(theta)}});
    out.stream() << "z_label,re,im,multiplicity\n";
    for (std::size_t z = 0; z < rc.groups.size(); ++z) {
        // aggregate coincident points
        std::vector<std::pair<caf::Complex, int>> agg;
        for (const auto& pt : rc.groups[z]) {
            bool found = false;
            for (auto& [q, mult] : agg)
                if (std::abs(q - pt) < 1e-9) {
                    ++mult;
                    found = true;
                    break;
                }
            if (!found) agg.emplace_back(pt, 1);
        }
        const caf::BitLabel zl(static_cast<std::uint32_t>(z), c.bits_per_symbol());
        for (const auto& [pt, mult] : agg)
            out.stream() << zl.to_string() << ',' << fmt(pt.real()) << ',' << fmt(pt.imag())
                         << ',' << mult << '\n';
    }
    return 0;
}

struct SirArgs {
    std::string modulation = "qpsk";
    std::string scheme = "caf";
    std::string theta = "0";
    double psnr = 6.0;
    std::size_t samples = 1000000;
    std::string backend = "mc";
    std::string sweep;  // "", "theta", "psnr"
    std::string grid;   // lo:hi:step
    std::uint64_t seed = 1;
    int workers = 1;
    std::string out;
};

std::vector<double> parse_grid(const std::string& grid, bool theta_grid) {
    std::vector<std::string> parts;
    std::stringstream ss(grid);
    std::string tok;
    while (std::getline(ss, tok, ':')) parts.push_back(tok);
    if (parts.size() != 3) throw CLI::ValidationError("grid", "expected lo:hi:step");
    const double lo = theta_grid ? parse_theta(parts[0]) : std::stod(parts[0]);
    const double hi = theta_grid ? parse_theta(parts[1]) : std::stod(parts[1]);
    const double step = theta_grid ? parse_theta(parts[2]) : std::stod(parts[2]);
    if (step <= 0.0 || hi < lo) throw CLI::ValidationError("grid", "bad grid bounds");
    std::vector<double> g;
    for (double v = lo; v <= hi + 0.5 * step; v += step) g.push_back(std::min(v, hi));
    return g;
}

int run_sir(const SirArgs& a) {
    auto c = caf::Constellation::make(caf::parse_modulation(a.modulation));
    caf::ChannelParams p{c, parse_theta(a.theta), 1.0, caf::parse_scheme(a.scheme)};
    caf::SirOptions opt;
    opt.backend = caf::parse_sir_backend(a.backend);
    opt.samples = a.samples;
    opt.seed = a.seed;
    opt.workers = a.workers;

    Output out;
    out.open(a.out);
    write_header(out.stream(), "sir",
                 {{"modulation", a.modulation},
                  {"scheme", a.scheme},
                  {"theta", fmt(p.theta)},
                  {"psnr", fmt(a.psnr)},
                  {"samples", std::to_string(a.samples)},
                  {"backend", a.backend},
                  {"sweep", a.sweep.empty() ? "none" : a.sweep},
                  {"grid", a.grid.empty() ? "none" : a.grid},
                  {"seed", std::to_string(a.seed)},
                  {"workers", std::to_string(a.workers)}});
    out.stream() << "scheme,modulation,theta,psnr_db,sir_bits,stderr\n";

    auto emit = [&](double theta, double psnr) {
        caf::ChannelParams q = p;
        q.theta = theta;
        q.sigma2 = caf::psnr_to_sigma2(psnr, c);
        caf::SirEstimate est = caf::sir(q, opt);
        out.stream() << a.scheme << ',' << a.modulation << ',' << fmt(theta) << ',' << fmt(psnr)
                     << ',' << fmt(est.value) << ',' << fmt(est.stderr_) << '\n';
    };

    if (a.sweep.empty()) {
        emit(p.theta, a.psnr);
    } else if (a.sweep == "theta") {
        for (double t : parse_grid(a.grid, true)) emit(t, a.psnr);
    } else if (a.sweep == "psnr") {
        for (double v : parse_grid(a.grid, false)) emit(p.theta, v);
    } else {
        throw CLI::ValidationError("sweep", "must be theta or psnr");
    }
    return 0;
}

struct DeArgs {
    int dv = 3, dc = 6;
    std::string modulation = "bpsk";
    std::string scheme = "single";
    std::string theta = "0";
    std::size_t population = 100000;
    int iters = 2000;
    double eps = 0.0;
    double psnr_lo = -4.0, psnr_hi = 4.0;
    double resolution = 0.02;
    std::uint64_t seed = 1;
    std::string out;
};

int run_de(const DeArgs& a) {
    auto c = caf::Constellation::make(caf::parse_modulation(a.modulation));
    caf::DeParams params;
    params.d_v = a.dv;
    params.d_c = a.dc;
    params.channel = {c, parse_theta(a.theta), 1.0, caf::parse_scheme(a.scheme)};
    params.population = a.population;
    params.max_iters = a.iters;
    params.eps_stop = a.eps;

    caf::ThresholdResult res =
        caf::find_threshold(params, a.psnr_lo, a.psnr_hi, a.resolution, a.seed);

    const double rate = c.bits_per_symbol() * (1.0 - static_cast<double>(a.dv) / a.dc);
    Output out;
    out.open(a.out);
    write_header(out.stream(), "de",
                 {{"dv", std::to_string(a.dv)},
                  {"dc", std::to_string(a.dc)},
                  {"modulation", a.modulation},
                  {"scheme", a.scheme},
                  {"theta", fmt(params.channel.theta)},
                  {"population", std::to_string(a.population)},
                  {"iters", std::to_string(a.iters)},
                  {"eps", fmt(params.stop_threshold())},
                  {"psnr-lo", fmt(a.psnr_lo)},
                  {"psnr-hi", fmt(a.psnr_hi)},
                  {"resolution", fmt(a.resolution)},
                  {"seed", std::to_string(a.seed)}});
    out.stream() << "dv,dc,rate,scheme,theta,threshold_psnr_db,bracket_lo,bracket_hi,seed\n";
    out.stream() << a.dv << ',' << a.dc << ',' << fmt(rate) << ',' << a.scheme << ','
                 << fmt(params.channel.theta) << ',' << fmt(res.threshold_psnr_db) << ','
                 << fmt(res.bracket_lo) << ',' << fmt(res.bracket_hi) << ',' << a.seed << '\n';
    return 0;
}

struct SimArgs {
    int dv = 3, dc = 6;
    int nbits = 9000;
    std::string modulation = "qpsk";
    std::string theta = "pi/4";
    double psnr = 6.0;
    long trials = 100;
    std::uint64_t seed = 1;
    int max_iters = 200;
    bool fixed_code = false;
    int workers = 1;
    std::string code_out, code_in;
    std::string out;
};

int run_simulate(const SimArgs& a) {
    auto c = caf::Constellation::make(caf::parse_modulation(a.modulation));
    caf::SimConfig cfg;
    cfg.code = {a.dv, a.dc, c.bits_per_symbol(), a.nbits};
    cfg.channel = {c, parse_theta(a.theta), caf::psnr_to_sigma2(a.psnr, c),
                   caf::Scheme::caf_degraded};
    cfg.max_iters = a.max_iters;
    cfg.fixed_code = a.fixed_code;

    if (!a.code_out.empty()) {
        caf::Rng rng = caf::substream(a.seed, 0);
        caf::ParityCheckMatrix h = caf::sample_regular_code(cfg.code, rng);
        std::ofstream f(a.code_out);
        if (!f) throw std::runtime_error("cannot open " + a.code_out);
        caf::write_alist(f, h);
    }
    if (!a.code_in.empty()) {
        std::ifstream f(a.code_in);
        if (!f) throw std::runtime_error("cannot open " + a.code_in);
        caf::ParityCheckMatrix h = caf::read_alist(f);  // validated on read
        if (h.n != a.nbits) throw std::runtime_error("alist code length != --nbits");
    }

    caf::FerEstimate est = caf::estimate_fer(cfg, a.trials, a.seed, a.workers);

    Output out;
    out.open(a.out);
    write_header(out.stream(), "simulate",
                 {{"dv", std::to_string(a.dv)},
                  {"dc", std::to_string(a.dc)},
                  {"nbits", std::to_string(a.nbits)},
                  {"modulation", a.modulation},
                  {"theta", fmt(cfg.channel.theta)},
                  {"psnr", fmt(a.psnr)},
                  {"trials", std::to_string(a.trials)},
                  {"seed", std::to_string(a.seed)},
                  {"max-iters", std::to_string(a.max_iters)},
                  {"fixed-code", a.fixed_code ? "true" : "false"},
                  {"workers", std::to_string(a.workers)}});
    out.stream() << "psnr_db,trials,frame_errors,fer,ber,stderr\n";
    out.stream() << fmt(a.psnr) << ',' << est.trials << ',' << est.frame_errors << ','
                 << fmt(est.fer) << ',' << fmt(est.ber) << ',' << fmt(est.stderr_fer) << '\n';
    return 0;
}

struct FigureArgs {
    std::string name;
    std::string scale = "desk";
    std::string out_dir = ".";
    std::uint64_t seed = 1;
    int workers = 1;
};

struct ScalePreset {
    std::size_t de_population;
    int de_iters;
    std::size_t sir_samples;
};

ScalePreset preset(const std::string& scale) {
    if (scale == "desk") return {10000, 500, 100000};
    if (scale == "full") return {100000, 2000, 1000000};
    throw CLI::ValidationError("scale", "must be desk or full");
}

int run_figure(const FigureArgs& a) {
    const ScalePreset sc = preset(a.scale);
    std::filesystem::create_directories(a.out_dir);
    auto path = [&](const std::string& f) { return a.out_dir + "/" + f; };

    auto sir_sweep = [&](const std::string& mod, const std::string& scheme, const std::string& sweep,
                         const std::string& grid, double psnr, const std::string& theta,
                         const std::string& file) {
        SirArgs s;
        s.modulation = mod;
        s.scheme = scheme;
        s.sweep = sweep;
        s.grid = grid;
        s.psnr = psnr;
        s.theta = theta;
        s.samples = sc.sir_samples;
        s.seed = a.seed;
        s.workers = a.workers;
        s.out = path(file);
        run_sir(s);
    };
    auto de_point = [&](int dv, int dc, const std::string& mod, const std::string& scheme,
                        const std::string& theta, double lo, double hi, const std::string& file) {
        DeArgs d;
        d.dv = dv;
        d.dc = dc;
        d.modulation = mod;
        d.scheme = scheme;
        d.theta = theta;
        d.population = sc.de_population;
        d.iters = sc.de_iters;
        d.psnr_lo = lo;
        d.psnr_hi = hi;
        d.resolution = 0.05;
        d.seed = a.seed;
        d.out = file;
        run_de(d);
    };
    auto append_de = [&](const std::string& tmp, std::ofstream& dst) {
        std::ifstream f(tmp);
        std::string line;
        bool past_header = false;
        while (std::getline(f, line)) {
            if (line.empty() || line[0] == '#') continue;
            if (!past_header) {  // skip the csv header row
                past_header = true;
                continue;
            }
            dst << line << '\n';
        }
        std::filesystem::remove(tmp);
    };

    if (a.name == "fig3") {
        // single-user QPSK: thresholds vs rate + SIR baseline
        sir_sweep("qpsk", "single", "psnr", "-4:12:0.5", 0, "0", "fig3_sir_single_qpsk.csv");
        std::ofstream dst(path("fig3_thresholds.csv"));
        dst << "dv,dc,rate,scheme,theta,threshold_psnr_db,bracket_lo,bracket_hi,seed\n";
        const int pairs[][2] = {{3, 4}, {3, 6}, {3, 9}, {3, 12}, {3, 18}};
        for (auto& pr : pairs) {
            const std::string tmp = path("fig3_tmp.csv");
            de_point(pr[0], pr[1], "qpsk", "single", "0", -6.0, 14.0, tmp);
            append_de(tmp, dst);
        }
    } else if (a.name == "fig4") {
        sir_sweep("qpsk", "caf", "theta", "0:pi/2:pi/32", 6.0, "0", "fig4_sir_caf_qpsk.csv");
        sir_sweep("qpsk", "mac", "theta", "0:pi/2:pi/32", 6.0, "0", "fig4_sir_sd_qpsk.csv");
    } else if (a.name == "fig5") {
        sir_sweep("8psk", "caf", "theta", "0:pi/4:pi/64", 10.0, "0", "fig5_sir_caf_8psk.csv");
        sir_sweep("8psk", "mac", "theta", "0:pi/4:pi/64", 10.0, "0", "fig5_sir_sd_8psk.csv");
    } else if (a.name == "fig6" || a.name == "fig7") {
        const bool qpsk = a.name == "fig6";
        const std::string mod = qpsk ? "qpsk" : "8psk";
        const std::string caf_theta = "0";                    // CAF SIR is maximal at theta=0
        const std::string de_theta = qpsk ? "pi/4" : "pi/8";  // DE runs at the paper's theta
        const std::string sd_theta = de_theta;
        sir_sweep(mod, "caf", "psnr", "-2:16:0.5", 0, caf_theta,
                  a.name + "_sir_caf_" + mod + ".csv");
        sir_sweep(mod, "mac", "psnr", "-2:16:0.5", 0, sd_theta, a.name + "_sir_sd_" + mod + ".csv");
        std::ofstream dst(path(a.name + "_thresholds.csv"));
        dst << "dv,dc,rate,scheme,theta,threshold_psnr_db,bracket_lo,bracket_hi,seed\n";
        const int pairs[][2] = {{3, 4}, {3, 6}, {3, 9}, {3, 12}, {3, 18}};
        for (auto& pr : pairs) {
            const std::string tmp = path(a.name + "_tmp.csv");
            de_point(pr[0], pr[1], mod, "caf", de_theta, -2.0, 18.0, tmp);
            append_de(tmp, dst);
        }
    } else {
        throw CLI::ValidationError("name", "must be one of fig3..fig7");
    }
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"LDPC-BICM compute-and-forward relay analysis"};
    app.set_version_flag("--version", kVersion);
    std::string backend;
    app.add_option("--kernel-backend", backend, "force kernel backend (scalar|avx2)");

    ConstellationArgs ca;
    auto* c = app.add_subcommand("constellation", "received constellation points as CSV");
    c->add_option("--modulation", ca.modulation, "bpsk|qpsk|8psk")->required();
    c->add_option("--theta", ca.theta, "phase difference (radians or pi/4 style)");
    c->add_option("--out", ca.out, "output CSV file (default stdout)");

    SirArgs sa;
    auto* s = app.add_subcommand("sir", "symmetric information rates");
    s->add_option("--modulation", sa.modulation, "bpsk|qpsk|8psk")->required();
    s->add_option("--scheme", sa.scheme, "caf|sd|single")->required();
    s->add_option("--theta", sa.theta, "phase difference");
    s->add_option("--psnr", sa.psnr, "PSNR in dB");
    s->add_option("--samples", sa.samples, "MC sample budget");
    s->add_option("--backend", sa.backend, "mc|quad");
    s->add_option("--sweep", sa.sweep, "theta|psnr");
    s->add_option("--grid", sa.grid, "lo:hi:step");
    s->add_option("--seed", sa.seed, "master seed");
    s->add_option("--workers", sa.workers, "worker threads");
    s->add_option("--out", sa.out, "output CSV file");

    DeArgs da;
    auto* d = app.add_subcommand("de", "density evolution BP threshold search");
    d->add_option("--dv", da.dv, "variable degree");
    d->add_option("--dc", da.dc, "check degree");
    d->add_option("--modulation", da.modulation, "bpsk|qpsk|8psk")->required();
    d->add_option("--scheme", da.scheme, "single|caf")->required();
    d->add_option("--theta", da.theta, "phase difference");
    d->add_option("--population", da.population, "population size N");
    d->add_option("--iters", da.iters, "max DE iterations T");
    d->add_option("--eps", da.eps, "stop threshold (default 10/N)");
    d->add_option("--psnr-lo", da.psnr_lo, "bracket low (must fail)");
    d->add_option("--psnr-hi", da.psnr_hi, "bracket high (must succeed)");
    d->add_option("--resolution", da.resolution, "bisection resolution in dB");
    d->add_option("--seed", da.seed, "master seed");
    d->add_option("--out", da.out, "output CSV file");

    SimArgs ma;
    auto* m = app.add_subcommand("simulate", "finite-length CAF Monte Carlo (FER/BER)");
    m->add_option("--dv", ma.dv, "variable degree");
    m->add_option("--dc", ma.dc, "check degree");
    m->add_option("--nbits", ma.nbits, "code length in bits")->required();
    m->add_option("--modulation", ma.modulation, "bpsk|qpsk|8psk")->required();
    m->add_option("--theta", ma.theta, "phase difference");
    m->add_option("--psnr", ma.psnr, "PSNR in dB");
    m->add_option("--trials", ma.trials, "number of frames");
    m->add_option("--seed", ma.seed, "master seed");
    m->add_option("--max-iters", ma.max_iters, "BP iteration cap");
    m->add_flag("--fixed-code", ma.fixed_code, "one code/interleaver for all trials");
    m->add_option("--workers", ma.workers, "worker threads");
    m->add_option("--code-out", ma.code_out, "export sampled code (alist)");
    m->add_option("--code-in", ma.code_in, "import fixed code (alist)");
    m->add_option("--out", ma.out, "output CSV file");

    FigureArgs fa;
    auto* f = app.add_subcommand("figure", "parameter grids for the threshold/SIR figures");
    f->add_option("--name", fa.name, "fig3|fig4|fig5|fig6|fig7")->required();
    f->add_option("--scale", fa.scale, "desk|full");
    f->add_option("--out-dir", fa.out_dir, "output directory");
    f->add_option("--seed", fa.seed, "master seed");
    f->add_option("--workers", fa.workers, "worker threads");

    app.require_subcommand(1);

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForVersion& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 2;  // usage error
    }

    try {
        if (!backend.empty() && !caf::kernels::set_backend(backend))
            throw std::runtime_error("kernel backend unavailable: " + backend);
        if (c->parsed()) return run_constellation(ca);
        if (s->parsed()) return run_sir(sa);
        if (d->parsed()) return run_de(da);
        if (m->parsed()) return run_simulate(ma);
        if (f->parsed()) return run_figure(fa);
    } catch (const CLI::ValidationError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const std::invalid_argument& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
