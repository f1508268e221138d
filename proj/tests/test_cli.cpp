#include <doctest.h>

#include <array>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>
#include <string>
#include <sys/wait.h>
#include <unistd.h>

#include <json.hpp>

#include "fermat/io.hpp"
#include "oracles.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

struct Run {
    int code = -1;
    std::string out;
    std::string err;
};

class Sandbox {
public:
    Sandbox() : dir_(fs::temp_directory_path() / ("fermatph_cli_" + std::to_string(::getpid()))) {
        fs::remove_all(dir_);
        fs::create_directories(dir_);
    }
    ~Sandbox() { fs::remove_all(dir_); }

    std::string path(const std::string& name) const { return (dir_ / name).string(); }

    Run run(const std::string& args) const {
        const std::string err = path("stderr.txt");
        std::string command = std::string(FERMATPH_EXE) + " " + args + " 2>" + err;
        Run result;
        FILE* pipe = ::popen(command.c_str(), "r");
        REQUIRE(pipe != nullptr);
        std::array<char, 4096> buffer{};
        std::size_t got;
        while ((got = std::fread(buffer.data(), 1, buffer.size(), pipe)) > 0) result.out.append(buffer.data(), got);
        int status = ::pclose(pipe);
        result.code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
        result.err = read(err);
        return result;
    }

    void write(const std::string& name, const std::string& text) const { std::ofstream(path(name)) << text; }

    std::string read(const std::string& name) const {
        std::ifstream in(fs::path(name).is_absolute() ? fs::path(name) : dir_ / name);
        std::stringstream s;
        s << in.rdbuf();
        return s.str();
    }

private:
    fs::path dir_;
};

std::size_t data_rows(const std::string& text) {
    std::size_t rows = 0;
    std::istringstream in(text);
    for (std::string line; std::getline(in, line);)
        if (!line.empty() && line[0] != '#') ++rows;
    return rows;
}

// Comment lines carry the output path, which differs between runs.
std::string data_only(const std::string& text) {
    std::string out;
    std::istringstream in(text);
    for (std::string line; std::getline(in, line);)
        if (line.empty() || line[0] != '#') out += line + '\n';
    return out;
}

}  // namespace

TEST_SUITE("cli") {

TEST_CASE("generate is deterministic and sized") {
    Sandbox box;
    auto a = box.run("generate --kind eyeglasses --n 2000 --noise 0.01 --seed 4 --out " + box.path("a.csv"));
    REQUIRE(a.code == 0);
    box.run("generate --kind eyeglasses --n 2000 --noise 0.01 --seed 4 --out " + box.path("b.csv"));
    auto text = box.read("a.csv");
    CHECK(data_rows(text) == 2000);
    CHECK(data_only(text) == data_only(box.read("b.csv")));
    CHECK(text.find("# config={") != std::string::npos);
}

TEST_CASE("usage errors are structured") {
    Sandbox box;
    auto bad = box.run("generate --kind pretzel --out " + box.path("x.csv"));
    CHECK(bad.code == 2);
    auto err = json::parse(bad.err);
    CHECK(err["error"]["kind"] == "usage");

    auto unknown = box.run("experiment nonsense --out-dir " + box.path("r"));
    CHECK(unknown.code == 2);
    CHECK(json::parse(unknown.err)["error"]["kind"] == "usage");

    auto missing = box.run("ph --input " + box.path("nope.csv") + " --out " + box.path("y.csv"));
    CHECK(missing.code == 1);
    CHECK(json::parse(missing.err).contains("error"));

    box.write("bad.csv", "# kind=euclidean n=3\n1\n2,x\n");
    auto format = box.run("ph --input " + box.path("bad.csv") + " --out " + box.path("y.csv"));
    CHECK(format.code == 1);
    CHECK(json::parse(format.err)["error"]["kind"] == "format");

    CHECK(box.run("").code == 2);
}

TEST_CASE("distmat on small clouds") {
    Sandbox box;
    box.write("two.csv", "0,0\n0.3,0.4\n");
    REQUIRE(box.run("distmat --input " + box.path("two.csv") + " --kind fermat --p 2 --out " + box.path("d.csv")).code == 0);
    auto d = fermat::io::load_distance_matrix(box.path("d.csv"));
    REQUIRE(d.size() == 2);
    CHECK(d(0, 1) == doctest::Approx(0.25).epsilon(1e-15));

    box.write("tri.csv", "0,0\n3,0\n0,4\n");
    REQUIRE(box.run("distmat --input " + box.path("tri.csv") + " --kind euclidean --out " + box.path("e.csv")).code == 0);
    auto e = fermat::io::load_distance_matrix(box.path("e.csv"));
    CHECK(e(0, 1) == 3.0);
    CHECK(e(0, 2) == 4.0);
    CHECK(e(1, 2) == 5.0);
}

TEST_CASE("distmat fermat equals path enumeration") {
    Sandbox box;
    std::mt19937_64 rng(41);
    auto cloud = oracle::random_cloud(rng, 8, 2);
    fermat::io::save(box.path("c.csv"), [&](std::ostream& o) { fermat::io::write_point_cloud(o, cloud); });
    REQUIRE(box.run("distmat --input " + box.path("c.csv") + " --p 2.5 --out " + box.path("d.csv")).code == 0);
    auto d = fermat::io::load_distance_matrix(box.path("d.csv"));
    double worst = 0;
    for (std::size_t i = 0; i < 8; ++i)
        for (std::size_t j = i + 1; j < 8; ++j)
            worst = std::max(worst, std::abs(d(i, j) - oracle::fermat_by_paths(cloud, i, j, 2.5)));
    CHECK(worst < 1e-12);
}

TEST_CASE("ph on a unit square") {
    Sandbox box;
    box.write("sq.csv", "0,0\n1,0\n1,1\n0,1\n");
    box.run("distmat --input " + box.path("sq.csv") + " --kind euclidean --out " + box.path("d.csv"));
    REQUIRE(box.run("ph --input " + box.path("d.csv") + " --max-dim 1 --out " + box.path("g.csv")).code == 0);
    auto g = fermat::io::load_diagram(box.path("g.csv"));
    auto h1 = g.in_degree(1);
    REQUIRE(h1.size() == 1);
    CHECK(h1[0].birth == 1.0);
    CHECK(h1[0].death == std::sqrt(2.0));

    box.run("ph --input " + box.path("d.csv") + " --max-dim 1 --out " + box.path("g2.csv"));
    CHECK(data_only(box.read("g.csv")) == data_only(box.read("g2.csv")));

    REQUIRE(box.run("ph --input " + box.path("d.csv") + " --r 0.5 --out " + box.path("low.csv")).code == 0);
    auto low = fermat::io::load_diagram(box.path("low.csv"));
    CHECK(low.threshold == 0.5);
    CHECK(low.count(1) == 0);
    CHECK(low.count_infinite(0) == 4);

    REQUIRE(box.run("ph --input " + box.path("d.csv") + " --engine explicit --out " + box.path("x.csv")).code == 0);
    CHECK(fermat::io::load_diagram(box.path("x.csv")) == g);
}

TEST_CASE("bottleneck and distortion") {
    Sandbox box;
    box.write("a.csv", "# threshold=inf\n1,1,3\n");
    box.write("empty.csv", "# threshold=inf\n");
    auto self = box.run("bottleneck --a " + box.path("a.csv") + " --b " + box.path("a.csv"));
    REQUIRE(self.code == 0);
    CHECK(json::parse(self.out)["distance"] == 0.0);
    auto diag = json::parse(box.run("bottleneck --a " + box.path("a.csv") + " --b " + box.path("empty.csv")).out);
    CHECK(diag["distance"] == 1.0);
    CHECK(diag["witness"]["pairs"][0][1] == "diag");

    std::mt19937_64 rng(42);
    std::uniform_real_distribution<double> u(0, 1);
    std::uniform_int_distribution<int> count(0, 5);
    for (int t = 0; t < 10; ++t) {
        fermat::PersistenceDiagram x, y;
        for (auto* d : {&x, &y}) {
            int n = count(rng);
            for (int i = 0; i < n; ++i) {
                double b = u(rng);
                d->bars.push_back({1, b, b + u(rng)});
            }
            d->canonicalize();
        }
        fermat::io::save(box.path("x.csv"), [&](std::ostream& o) { fermat::io::write_diagram(o, x); });
        fermat::io::save(box.path("y.csv"), [&](std::ostream& o) { fermat::io::write_diagram(o, y); });
        auto r = json::parse(box.run("bottleneck --a " + box.path("x.csv") + " --b " + box.path("y.csv")).out);
        CHECK(std::abs(r["distance"].get<double>() - oracle::bottleneck_brute(x.bars, y.bars)) < 1e-12);
    }

    box.write("d1.csv", "# kind=euclidean n=3\n1\n2,3\n");
    box.write("d2.csv", "# kind=euclidean n=3\n1.5\n2,3\n");
    auto g = json::parse(box.run("distortion --a " + box.path("d1.csv") + " --b " + box.path("d2.csv")).out);
    CHECK(g["sup"] == 0.5);
    CHECK(g["gh_bound"] == 0.25);
}

TEST_CASE("config files sit under explicit flags") {
    Sandbox box;
    box.write("c.csv", "0\n1\n3\n");
    box.write("cfg.json", R"({"kind": "fermat", "p": 3})");
    REQUIRE(box.run("distmat --config " + box.path("cfg.json") + " --input " + box.path("c.csv") + " --out " +
                    box.path("d.csv"))
                .code == 0);
    auto d = fermat::io::load_distance_matrix(box.path("d.csv"));
    CHECK(d.tag().p == 3.0);
    CHECK(box.read("d.csv").find(R"("p":3)") != std::string::npos);

    box.run("distmat --config " + box.path("cfg.json") + " --p 2 --input " + box.path("c.csv") + " --out " +
            box.path("d2.csv"));
    auto d2 = fermat::io::load_distance_matrix(box.path("d2.csv"));
    CHECK(d2.tag().p == 2.0);
    CHECK(d2(0, 2) == 5.0);  // 1 + 2^2

    box.write("typo.json", R"({"pp": 3})");
    auto typo = box.run("distmat --config " + box.path("typo.json") + " --input " + box.path("c.csv") + " --out " +
                        box.path("d3.csv"));
    CHECK(typo.code == 2);
}

TEST_CASE("mds and embed") {
    Sandbox box;
    box.write("tri.csv", "0,0\n1,0\n0.5,0.8660254037844386\n");
    box.run("distmat --input " + box.path("tri.csv") + " --kind euclidean --out " + box.path("d.csv"));
    REQUIRE(box.run("mds --input " + box.path("d.csv") + " --dim 2 --out " + box.path("m.csv")).code == 0);
    auto m = fermat::io::load_point_cloud(box.path("m.csv"));
    CHECK(oracle::dist(m, 0, 1) == doctest::Approx(1.0));

    box.write("s.csv", "1\n2\n3\n4\n5\n");
    REQUIRE(box.run("embed --input " + box.path("s.csv") + " --dt 1 --tau 1 --dim 3 --out " + box.path("e.csv")).code == 0);
    CHECK(data_rows(box.read("e.csv")) == 3);
    CHECK(box.run("embed --input " + box.path("s.csv") + " --tau 1 --dim 3 --out " + box.path("e.csv")).code == 1);
}

TEST_CASE("change points from the command line") {
    Sandbox box;
    REQUIRE(box.run("generate --kind sine-switch --n 800 --period 40 --noise 0.05 --dt 1 --out " + box.path("s.csv"))
                .code == 0);
    auto r = box.run("changepoints --input " + box.path("s.csv") +
                     " --tau 10 --dim 3 --stride 2 --step 20 --window 3 --z 2 --out " + box.path("score.csv"));
    REQUIRE(r.code == 0);
    auto out = json::parse(r.out);
    REQUIRE(out["peaks"].size() >= 1);
    CHECK(std::abs(out["top"]["index"].get<double>() - 400) <= 80);
    for (const auto& peak : out["peaks"]) CHECK(std::abs(peak["index"].get<double>() - 400) <= 80);
    auto score = box.read("score.csv");
    CHECK(score.find("index,time,raw,smoothed") != std::string::npos);

    // Bare single-column file with an explicit sampling step.
    std::string ecg;
    for (int i = 0; i < 300; ++i) ecg += std::to_string(std::sin(i * 0.2) + 0.3 * std::sin(i * 0.05)) + "\n";
    box.write("ecg.csv", ecg);
    CHECK(box.run("changepoints --input " + box.path("ecg.csv") + " --dt 0.004 --tau 15 --dim 3 --p 2 --step 40")
              .code == 0);

    std::string flat;
    for (int i = 0; i < 200; ++i) flat += "0.5\n";
    box.write("flat.csv", flat);
    auto none = box.run("changepoints --input " + box.path("flat.csv") + " --dt 1 --tau 3 --step 20");
    REQUIRE(none.code == 0);
    CHECK(json::parse(none.out)["peaks"].empty());
}

TEST_CASE("experiment writes a machine-readable report") {
    Sandbox box;
    auto r = box.run("experiment trefoil-outliers --seed 0 --out-dir " + box.path("reports"));
    REQUIRE(r.code == 0);
    auto report = json::parse(box.read(box.path("reports/trefoil-outliers.json")));
    CHECK(report["name"] == "trefoil-outliers");
    CHECK(report["details"]["invariance"]["equal"] == true);
    CHECK(report["details"]["geometric_outliers"] == true);
    CHECK(report["pass"] == true);
}

}
