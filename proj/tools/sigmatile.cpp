// sigmatile: command-line front end for simulating sigma-delta modulators,
// mapping their invariant sets, and measuring error spectra and MSE decay.

#include <CLI11.hpp>
#include <json.hpp>

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <future>
#include <iostream>
#include <random>

#include "sdq/arith.hpp"
#include "sdq/config.hpp"
#include "sdq/core.hpp"
#include "sdq/filters.hpp"
#include "sdq/mse.hpp"
#include "sdq/sha256.hpp"
#include "sdq/simulate.hpp"
#include "sdq/spectral.hpp"
#include "sdq/tiling.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

struct CliOptions {
    std::string config_path;
    std::string out_dir;  // overrides [output].dir when set
    int threads = 0;      // overrides config when > 0
    long long seed = -1;  // overrides config when >= 0
};

std::ofstream open_csv(const fs::path& path, const std::string& hash,
                       const std::string& header) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw sdq::Error("cannot write " + path.string());
    out << "# config_sha256=" << hash << "\n" << header << "\n";
    return out;
}

std::string fmt(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

sdq::ExperimentConfig load_config(const CliOptions& cli) {
    if (cli.config_path.empty()) throw sdq::ConfigError("--config is required");
    sdq::ExperimentConfig cfg = sdq::ExperimentConfig::load(cli.config_path);
    if (!cli.out_dir.empty()) cfg.out_dir = cli.out_dir;
    if (cli.threads > 0) cfg.threads = cli.threads;
    if (const char* env = std::getenv("SIGMA_TILE_THREADS")) {
        int t = std::atoi(env);
        if (t > 0) cfg.threads = t;
    }
    if (cli.seed >= 0) cfg.seed = static_cast<std::uint64_t>(cli.seed);
    fs::create_directories(cfg.out_dir);
    return cfg;
}

int cmd_simulate(const CliOptions& cli) {
    sdq::ExperimentConfig cfg = load_config(cli);
    sdq::Modulator mod = cfg.modulator();
    std::string header = "n";
    for (int j = 1; j <= cfg.order; ++j) header += ",u_" + std::to_string(j);
    header += ",q";
    auto out = open_csv(fs::path(cfg.out_dir) / "trajectory.csv", cfg.config_hash, header);
    sdq::RunOptions opts{cfg.blow_up};
    sdq::run_visit(
        mod, cfg.initial_state(), cfg.steps,
        [&](long long n, const double* u, long long q) {
            out << n;
            for (int j = 0; j < cfg.order; ++j) out << "," << fmt(u[j]);
            out << "," << q << "\n";
        },
        opts);
    std::cout << "wrote " << cfg.steps << " rows to " << cfg.out_dir << "/trajectory.csv\n";
    return 0;
}

sdq::tiling::TorusTile stream_tile(const sdq::ExperimentConfig& cfg) {
    sdq::Modulator mod = cfg.modulator();
    sdq::tiling::TorusTile tile(cfg.order, cfg.grid);
    tile.set_eps_cover(cfg.eps_cover);
    sdq::RunOptions opts{cfg.blow_up};
    sdq::run_visit(
        mod, cfg.initial_state(), cfg.steps,
        [&](long long n, const double* u, long long) {
            if (n >= cfg.burn_in) tile.ingest(u);
        },
        opts);
    auto rep = tile.multiplicity_report();
    if (rep.covered_fraction < 0.5)
        throw sdq::UnderSampledError("fewer than half of the tile cells were visited");
    return tile;
}

void write_multiplicity_json(const sdq::ExperimentConfig& cfg,
                             const sdq::tiling::TorusTile& tile) {
    auto rep = tile.multiplicity_report();
    json j;
    j["config_sha256"] = cfg.config_hash;
    j["order"] = tile.order();
    j["grid"] = tile.grid();
    j["samples"] = tile.samples();
    j["covered_fraction"] = rep.covered_fraction;
    j["mult1_fraction"] = rep.mult1_fraction;
    j["certified"] = rep.certified;
    json hist = json::object();
    for (const auto& [mult, cells] : rep.histogram) hist[std::to_string(mult)] = cells;
    j["histogram"] = hist;
    std::ofstream out(fs::path(cfg.out_dir) / "multiplicity.json");
    out << j.dump(2) << "\n";
}

int cmd_tile(const CliOptions& cli) {
    sdq::ExperimentConfig cfg = load_config(cli);
    sdq::tiling::TorusTile tile = stream_tile(cfg);
    {
        std::ofstream out(fs::path(cfg.out_dir) / "tile.csv", std::ios::binary);
        out << "# config_sha256=" << cfg.config_hash << "\n";
        tile.export_csv(out);
    }
    if (cfg.order == 2) {
        std::ofstream out(fs::path(cfg.out_dir) / "tile.pgm", std::ios::binary);
        tile.export_pgm(out);
    }
    write_multiplicity_json(cfg, tile);
    auto rep = tile.multiplicity_report();
    std::cout << "tile: covered=" << rep.covered_fraction
              << " mult1=" << rep.mult1_fraction
              << " certified=" << (rep.certified ? "true" : "false") << "\n";
    return 0;
}

int cmd_spectrum(const CliOptions& cli) {
    sdq::ExperimentConfig cfg = load_config(cli);
    double x = cfg.x.resolve();
    if (!sdq::arith::is_spectrally_irrational(x))
        throw sdq::RationalError("spectral analysis requires an irrational input x");

    sdq::tiling::TorusTile tile = stream_tile(cfg);
    write_multiplicity_json(cfg, tile);
    sdq::tiling::MidpointFunction mp = tile.extract_midpoint();
    auto pp = sdq::spectral::pure_point_part(mp, x, cfg.k_max);

    auto atoms = open_csv(fs::path(cfg.out_dir) / "atoms.csv", cfg.config_hash,
                          "n,location,mass");
    for (const auto& a : pp.atoms)
        atoms << a.n << "," << fmt(a.location) << "," << fmt(a.mass) << "\n";

    if (cfg.order == 1) {
        // Order 1 has a purely atomic spectrum; the density vanishes.
        auto density = open_csv(fs::path(cfg.out_dir) / "density.csv", cfg.config_hash,
                                "xi,s");
        for (int i = 0; i < 512; ++i)
            density << fmt(static_cast<double>(i) / 512) << "," << fmt(0.0) << "\n";
    } else if (cfg.order == 2) {
        auto rho_ac = sdq::spectral::ac_part_order2(mp, x, cfg.k_max);
        auto est = sdq::spectral::density_estimate(rho_ac);
        auto density = open_csv(fs::path(cfg.out_dir) / "density.csv", cfg.config_hash,
                                "xi,s");
        for (size_t i = 0; i < est.xi.size(); ++i)
            density << fmt(est.xi[i]) << "," << fmt(est.s[i]) << "\n";
    } else {
        std::cerr << "note: density estimation is implemented for orders 1 and 2; "
                     "writing atoms only\n";
    }
    std::cout << "wrote " << pp.atoms.size() << " atoms\n";
    return 0;
}

int cmd_mse(const CliOptions& cli) {
    sdq::ExperimentConfig cfg = load_config(cli);
    if (cfg.m_list.empty())
        throw sdq::ConfigError("mse requires a non-empty mse.m_list");
    sdq::Modulator mod = cfg.modulator();
    int p = cfg.filter_p > 0 ? cfg.filter_p : cfg.order + 1;
    if (cfg.filter_family == "sinc" && p != cfg.order + 1)
        std::cerr << "warning: filter order p=" << p << " differs from order+1="
                  << cfg.order + 1 << "; decay exponents will not match the sinc^{m+1} laws\n";

    sdq::RunOptions opts{cfg.blow_up};
    sdq::Trajectory traj = sdq::run(mod, cfg.initial_state(), cfg.steps, opts);

    // Spectral route when the tile pipeline certifies (orders 1 and 2).
    bool have_measure = false;
    sdq::mse::SpectralMeasure measure;
    double pp_tail_bound = 0.0;
    if (cfg.order <= 2 && sdq::arith::is_spectrally_irrational(mod.x)) {
        try {
            sdq::tiling::TorusTile tile =
                sdq::tiling::build_tile(traj, cfg.grid, {cfg.burn_in, cfg.eps_cover});
            sdq::tiling::MidpointFunction mp = tile.extract_midpoint();
            auto pp = sdq::spectral::pure_point_part(mp, mod.x, cfg.k_max);
            measure.order = cfg.order;
            measure.atoms = pp.atoms;
            if (cfg.order == 2)
                measure.rho_ac = sdq::spectral::ac_part_order2(mp, mod.x, cfg.k_max);
            have_measure = true;
            try {
                // Coefficients below 1e-4 carry atom masses below 1e-8 and
                // are irrelevant for the truncation tail.
                auto decay = sdq::spectral::fourier_decay_fit(mp, 1e-4);
                pp_tail_bound = sdq::spectral::pure_point_tail_bound(
                    decay, static_cast<int>(mp.fourier.size()) - 1, cfg.order);
            } catch (const sdq::DegenerateError&) {
                pp_tail_bound = 0.0;  // coefficients at the noise floor
            }
        } catch (const sdq::Error& e) {
            std::cerr << "note: spectral route unavailable (" << e.what() << ")\n";
        }
    }

    struct Row {
        int M;
        double total, pp, ac;
    };
    std::vector<Row> rows(cfg.m_list.size());
    auto eval_point = [&](size_t i) {
        int M = cfg.m_list[i];
        sdq::Filter phi = cfg.filter_family == "rect" ? sdq::rect(M) : sdq::sinc_p(M, p);
        auto td = sdq::mse::mse_time_domain(traj, phi, cfg.burn_in);
        double e_pp = std::numeric_limits<double>::quiet_NaN();
        double e_ac = std::numeric_limits<double>::quiet_NaN();
        if (have_measure) {
            sdq::TransferFunction tf =
                cfg.filter_family == "rect" ? sdq::TransferFunction::sinc_closed(M, 1)
                                            : sdq::TransferFunction::sinc_closed(M, p);
            auto [pp_v, ac_v] = sdq::mse::mse_spectral(measure, tf, cfg.order, mod.x);
            e_pp = pp_v;
            e_ac = ac_v;
        }
        rows[i] = {M, td.mse, e_pp, e_ac};
    };
    if (cfg.threads > 1) {
        std::vector<std::future<void>> futs;
        std::atomic<size_t> next{0};
        for (int t = 0; t < cfg.threads; ++t)
            futs.push_back(std::async(std::launch::async, [&] {
                for (size_t i = next.fetch_add(1); i < rows.size(); i = next.fetch_add(1))
                    eval_point(i);
            }));
        for (auto& f : futs) f.get();
    } else {
        for (size_t i = 0; i < rows.size(); ++i) eval_point(i);
    }

    sdq::mse::MseCurve curve;
    curve.filter_family = cfg.filter_family;
    auto out = open_csv(fs::path(cfg.out_dir) / "curve.csv", cfg.config_hash,
                        "M,E_total,E_pp,E_ac,slope_so_far");
    for (size_t i = 0; i < rows.size(); ++i) {
        curve.points.push_back({rows[i].M, rows[i].total, rows[i].pp, rows[i].ac});
        double slope_so_far = std::numeric_limits<double>::quiet_NaN();
        if (i >= 1) {
            double num = std::log(rows[i].total) - std::log(rows[0].total);
            double den = std::log(static_cast<double>(rows[i].M)) -
                         std::log(static_cast<double>(rows[0].M));
            if (den != 0.0) slope_so_far = num / den;
        }
        out << rows[i].M << "," << fmt(rows[i].total) << "," << fmt(rows[i].pp) << ","
            << fmt(rows[i].ac) << "," << fmt(slope_so_far) << "\n";
    }

    json j;
    j["config_sha256"] = cfg.config_hash;
    if (have_measure) {
        if (std::isfinite(pp_tail_bound))
            j["pp_truncation_tail_bound"] = pp_tail_bound;
        else
            j["pp_truncation_tail_bound"] = "unbounded";  // decay fit below 1/2
    }
    try {
        auto fit = sdq::mse::fit_decay(curve);
        j["slope"] = fit.slope;
        j["constant"] = fit.constant;
        j["residual"] = fit.residual;
        std::cout << "fit: slope=" << fit.slope << " constant=" << fit.constant << "\n";
    } catch (const sdq::ArgumentError&) {
        j["fit"] = "omitted";  // fewer than 5 points or under two octaves
        std::cout << "fit omitted (needs >= 5 points over >= 2 octaves)\n";
    }
    std::ofstream fit_out(fs::path(cfg.out_dir) / "fit.json");
    fit_out << j.dump(2) << "\n";
    return 0;
}

int cmd_identity(const CliOptions& cli) {
    sdq::ExperimentConfig cfg = cli.config_path.empty() ? sdq::ExperimentConfig{}
                                                        : load_config(cli);
    if (cli.config_path.empty()) {
        if (!cli.out_dir.empty()) cfg.out_dir = cli.out_dir;
        fs::create_directories(cfg.out_dir);
        cfg.config_hash = sdq::sha256_hex("");
    }
    auto out = open_csv(fs::path(cfg.out_dir) / "identity.csv", cfg.config_hash,
                        "m,M,ratio");
    double worst = 0.0;
    for (int m = 1; m <= 3; ++m)
        for (int M = 2; M <= 64; ++M) {
            double ratio = sdq::mse::sin_power_sinc_identity(m, M);
            worst = std::max(worst, std::abs(ratio - 1.0));
            out << m << "," << M << "," << fmt(ratio) << "\n";
        }
    std::cout << "max |ratio - 1| = " << worst << "\n";
    return worst <= 1e-8 ? 0 : 1;
}

int cmd_decay_lemma(const CliOptions& cli) {
    sdq::ExperimentConfig cfg = cli.config_path.empty() ? sdq::ExperimentConfig{}
                                                        : load_config(cli);
    if (cli.config_path.empty()) {
        if (!cli.out_dir.empty()) cfg.out_dir = cli.out_dir;
        fs::create_directories(cfg.out_dir);
        cfg.config_hash = sdq::sha256_hex("");
    }
    auto f = sdq::spectral::saw_autocorr_fn();
    auto out = open_csv(fs::path(cfg.out_dir) / "decay.csv", cfg.config_hash,
                        "phi_id,k,c,bound_tv,bound_smooth");
    std::mt19937_64 rng(cfg.seed == 0 ? 12345 : cfg.seed);
    std::uniform_real_distribution<double> coeff(-0.2, 0.2);
    bool all_ok = true;
    for (int id = 0; id < 20; ++id) {
        double a1 = coeff(rng), b1 = coeff(rng), a2 = coeff(rng), b2 = coeff(rng);
        auto phi = [=](double v) {
            return a1 * std::sin(2 * M_PI * v) + b1 * std::cos(2 * M_PI * v) +
                   a2 * std::sin(4 * M_PI * v) + b2 * std::cos(4 * M_PI * v);
        };
        auto rep = sdq::spectral::verify_decay_lemma(f, phi, 100);
        all_ok = all_ok && rep.all_within;
        for (const auto& row : rep.rows)
            out << id << "," << row.k << "," << fmt(row.c) << "," << fmt(row.bound_tv)
                << "," << fmt(row.bound_smooth) << "\n";
    }
    std::cout << (all_ok ? "all bounds hold\n" : "BOUND VIOLATION\n");
    return all_ok ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"sigma-delta quantization laboratory"};
    app.require_subcommand(1);

    CliOptions cli;
    app.add_option("--config", cli.config_path, "TOML experiment config");
    app.add_option("--out", cli.out_dir, "output directory (overrides config)");
    app.add_option("--threads", cli.threads, "worker threads (overrides config)");
    app.add_option("--seed", cli.seed, "initial-state jitter seed (overrides config)");

    auto* sub_sim = app.add_subcommand("simulate", "run the recursion, export trajectory CSV");
    auto* sub_tile = app.add_subcommand("tile", "build the invariant-set tile and reports");
    auto* sub_spec = app.add_subcommand("spectrum", "atoms and density of the error spectrum");
    auto* sub_mse = app.add_subcommand("mse", "MSE decay curve over the filter list");
    auto* sub_id = app.add_subcommand("identity", "verify the sin-power/sinc integral table");
    auto* sub_decay = app.add_subcommand("decay-lemma", "verify the oscillatory decay bounds");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int code = app.exit(e);
        return code == 0 ? 0 : 1;
    }

    try {
        if (sub_sim->parsed()) return cmd_simulate(cli);
        if (sub_tile->parsed()) return cmd_tile(cli);
        if (sub_spec->parsed()) return cmd_spectrum(cli);
        if (sub_mse->parsed()) return cmd_mse(cli);
        if (sub_id->parsed()) return cmd_identity(cli);
        if (sub_decay->parsed()) return cmd_decay_lemma(cli);
    } catch (const sdq::ConfigError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return 1;
    } catch (const sdq::DivergenceError& e) {
        std::cerr << "divergence: " << e.what() << "\n";
        return 2;
    } catch (const sdq::UnderSampledError& e) {
        std::cerr << "undersampled: " << e.what() << "\n";
        return 3;
    } catch (const sdq::RationalError& e) {
        std::cerr << "rational input: " << e.what() << "\n";
        return 4;
    } catch (const sdq::ArgumentError& e) {
        std::cerr << "invalid argument: " << e.what() << "\n";
        return 1;
    } catch (const sdq::Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
