#include <doctest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

namespace fs = std::filesystem;

namespace {

int run_cli(const std::string& args) {
    std::string cmd = std::string(SIGMATILE_BIN) + " " + args + " >/dev/null 2>&1";
    int status = std::system(cmd.c_str());
    return WEXITSTATUS(status);
}

fs::path write_config(const fs::path& dir, const std::string& body) {
    fs::create_directories(dir);
    fs::path p = dir / "config.toml";
    std::ofstream out(p);
    out << body;
    return p;
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

const fs::path kRoot = fs::temp_directory_path() / "sigmatile_cli_test";

}  // namespace

TEST_CASE("simulate subcommand writes a stamped trajectory CSV") {
    fs::path dir = kRoot / "sim";
    fs::remove_all(dir);
    auto cfg = write_config(dir,
                            "[scheme]\nrule = \"ideal\"\norder = 2\n"
                            "[input]\nx = \"sqrt2m1\"\n"
                            "[run]\nsteps = 200\n"
                            "[output]\ndir = \"" + (dir / "out").string() + "\"\n");
    CHECK(run_cli("--config " + cfg.string() + " simulate") == 0);
    std::string csv = slurp(dir / "out" / "trajectory.csv");
    CHECK(csv.rfind("# config_sha256=", 0) == 0);
    CHECK(csv.find("n,u_1,u_2,q") != std::string::npos);
    // Row count equals the step count (+2 for the comment and header lines).
    CHECK(std::count(csv.begin(), csv.end(), '\n') == 202);
}

TEST_CASE("identical config and seed reproduce bit-identical outputs") {
    fs::path dir = kRoot / "repro";
    fs::remove_all(dir);
    auto cfg = write_config(dir,
                            "[scheme]\nrule = \"ideal\"\norder = 2\n"
                            "[input]\nx = \"sqrt2m1\"\n"
                            "[run]\nsteps = 5000\nseed = 42\n"
                            "[tile]\ngrid = 16\n");
    std::string out1 = (dir / "out1").string();
    std::string out2 = (dir / "out2").string();
    CHECK(run_cli("--config " + cfg.string() + " --out " + out1 + " tile") == 0);
    CHECK(run_cli("--config " + cfg.string() + " --out " + out2 + " tile") == 0);
    CHECK(slurp(fs::path(out1) / "tile.csv") == slurp(fs::path(out2) / "tile.csv"));
    CHECK(slurp(fs::path(out1) / "multiplicity.json") ==
          slurp(fs::path(out2) / "multiplicity.json"));
    CHECK(slurp(fs::path(out1) / "tile.pgm") == slurp(fs::path(out2) / "tile.pgm"));
}

TEST_CASE("config errors exit with code 1") {
    fs::path dir = kRoot / "bad";
    fs::remove_all(dir);
    auto cfg = write_config(dir, "[scheme]\nrule = \"no-such-rule\"\n");
    CHECK(run_cli("--config " + cfg.string() + " simulate") == 1);
    CHECK(run_cli("simulate") == 1);  // missing --config
    auto empty = write_config(dir / "empty", "");
    CHECK(run_cli("--config " + empty.string() + " mse") == 1);  // no m_list
}

TEST_CASE("divergent runs exit with code 2") {
    fs::path dir = kRoot / "div";
    fs::remove_all(dir);
    auto cfg = write_config(dir,
                            "[scheme]\nkind = \"linear\"\nalpha = [-50.0, 0.0, 0.0]\n"
                            "beta = [0.0, 0.0]\norder = 2\n"
                            "[input]\nx = 0.9\n"
                            "[run]\nsteps = 100000\n"
                            "[output]\ndir = \"" + (dir / "out").string() + "\"\n");
    CHECK(run_cli("--config " + cfg.string() + " simulate") == 2);
}

TEST_CASE("undersampled tiles exit with code 3") {
    fs::path dir = kRoot / "under";
    fs::remove_all(dir);
    auto cfg = write_config(dir,
                            "[scheme]\nrule = \"ideal\"\norder = 2\n"
                            "[input]\nx = \"sqrt2m1\"\n"
                            "[run]\nsteps = 1200\n"  // only ~200 post-burn-in states
                            "[tile]\ngrid = 64\n"
                            "[output]\ndir = \"" + (dir / "out").string() + "\"\n");
    CHECK(run_cli("--config " + cfg.string() + " tile") == 3);
}

TEST_CASE("rational inputs are refused by the spectral pipeline with code 4") {
    fs::path dir = kRoot / "rat";
    fs::remove_all(dir);
    auto cfg = write_config(dir,
                            "[scheme]\nrule = \"ideal\"\norder = 2\n"
                            "[input]\nx = 0.5\n"
                            "[run]\nsteps = 100000\n"
                            "[tile]\ngrid = 32\n"
                            "[output]\ndir = \"" + (dir / "out").string() + "\"\n");
    CHECK(run_cli("--config " + cfg.string() + " spectrum") == 4);
}

TEST_CASE("mse subcommand writes curve and fit files") {
    fs::path dir = kRoot / "mse";
    fs::remove_all(dir);
    auto cfg = write_config(dir,
                            "[scheme]\nrule = \"ideal\"\norder = 2\n"
                            "[input]\nx = \"sqrt2m1\"\n"
                            "[run]\nsteps = 60000\n"
                            "[tile]\ngrid = 32\n"
                            "[mse]\nfilter = \"sinc\"\nm_list = [8, 16]\n"
                            "[output]\ndir = \"" + (dir / "out").string() + "\"\n");
    CHECK(run_cli("--config " + cfg.string() + " mse") == 0);
    std::string curve = slurp(dir / "out" / "curve.csv");
    CHECK(curve.find("M,E_total,E_pp,E_ac,slope_so_far") != std::string::npos);
    std::string fit = slurp(dir / "out" / "fit.json");
    CHECK(fit.find("omitted") != std::string::npos);  // two points, no fit
}
