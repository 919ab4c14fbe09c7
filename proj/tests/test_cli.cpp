#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <unistd.h>

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "nesy/cli.hpp"
#include "nesy/text.hpp"

namespace fs = std::filesystem;
using nesy::run_cli;

namespace {

struct Run {
  int code;
  std::string out, err;
};

Run run(std::vector<std::string> args) {
  std::ostringstream out, err;
  int code = run_cli(args, out, err);
  return {code, out.str(), err.str()};
}

struct TempDir {
  fs::path path;
  TempDir() {
    path = fs::temp_directory_path() / ("nesy_cli_" + std::to_string(::getpid()));
    fs::create_directories(path);
  }
  ~TempDir() { fs::remove_all(path); }
  std::string file(const std::string& name, const std::string& text) const {
    auto p = (path / name).string();
    std::ofstream(p) << text;
    return p;
  }
  std::string at(const std::string& name) const { return (path / name).string(); }
};

std::string slurp(const std::string& p) {
  std::ifstream in(p);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

}  // namespace

TEST_CASE("compile then query the implication example") {
  TempDir d;
  auto dsl = d.file("c.dsl", "(implies (and A B) C)\n");
  auto w = d.file("w.txt", "A 0.3\nB 0.5\nC 0.2\n");
  auto nnf = d.at("c.nnf");
  auto c = run({"compile", "--dsl", dsl, "-o", nnf});
  REQUIRE(c.code == 0);
  CHECK(c.err.rfind("nodes=", 0) == 0);
  CHECK(fs::exists(nnf + ".names"));

  auto names = nnf + ".names";
  auto q = run({"wmc", "-c", nnf, "-w", w, "--names", names});
  CHECK(q.code == 0);
  CHECK(q.out == "wmc=0.88\n");

  auto lg = run({"wmc", "-c", nnf, "-w", w, "--names", names, "--log-space"});
  CHECK(lg.out == "log_wmc=" + nesy::format_real(std::log(0.88)) + "\n");

  auto h = run({"entropy", "-c", nnf, "-w", w, "--names", names});
  CHECK(h.out == "entropy=1.63351013055\n");

  auto per = run({"entropy", "-c", nnf, "-w", w, "--names", names, "--per-node"});
  CHECK(per.out.rfind("entropy=1.63351013055\nnode=0 kind=", 0) == 0);

  auto cnt = run({"count", "-c", nnf});
  CHECK(cnt.out == "7\n");

  auto g = run({"grad", "-c", nnf, "-w", w, "--names", names, "--of", "wmc"});
  CHECK(g.out == "grad=-0.4,-0.24,0.15\n");

  auto numeric = d.file("wn.txt", "1 0.3\n2 0.5\n3 0.2\n");
  CHECK(run({"wmc", "-c", nnf, "-w", numeric}).out == "wmc=0.88\n");
  CHECK(run({"wmc", "-c", nnf, "--uniform"}).out == "wmc=0.875\n");
}

TEST_CASE("loss command") {
  TempDir d;
  auto cnf = d.file("c.cnf", "p cnf 3 1\n-1 -2 3 0\n");
  auto nnf = d.at("c.nnf");
  REQUIRE(run({"compile", "--cnf", cnf, "-o", nnf}).code == 0);
  auto batch = d.file("b.txt", "batch 2 3\n0.3 0.5 0.2\n1 1 0\n");
  auto r = run({"loss", "-c", nnf, "--batch", batch, "--w-semantic", "1", "--w-entropy", "1", "--entropy-kind", "nesy"});
  CHECK(r.code == 0);
  std::istringstream lines(r.out);
  double h = 0;
  for (double m : {0.03, 0.03, 0.12, 0.07, 0.28, 0.07, 0.28}) h -= m / 0.88 * std::log(m / 0.88);
  std::string first, second;
  std::getline(lines, first);
  std::getline(lines, second);
  CHECK(first.rfind("row=0 loss=" + nesy::format_real(-std::log(0.88) + h) + " grad=", 0) == 0);
  CHECK(second.rfind("row=1 error=", 0) == 0);
}

TEST_CASE("gen, count, check") {
  TempDir d;
  auto cnf = d.at("to.cnf");
  REQUIRE(run({"gen", "--kind", "total-order", "-n", "4", "-o", cnf}).code == 0);
  auto nnf = d.at("to.nnf");
  REQUIRE(run({"compile", "--cnf", cnf, "-o", nnf}).code == 0);
  CHECK(run({"count", "-c", nnf}).out == "24\n");

  auto grid = run({"gen", "--kind", "grid-paths", "--rows", "2", "--cols", "2"});
  REQUIRE(grid.code == 0);
  auto gnnf = d.file("g.nnf", grid.out);
  CHECK(run({"count", "-c", gnnf}).out == "12\n");
  auto chk = run({"check", "-c", gnnf, "--exhaustive-determinism"});
  CHECK(chk.code == 0);
  CHECK(chk.out.find("decomposable=yes\nsmooth=yes\ndeterministic_certified=yes\ndeterministic_exhaustive=pass\n") !=
        std::string::npos);

  auto eo = run({"gen", "--kind", "exactly-one", "-n", "5"});
  CHECK(run({"count", "-c", d.file("e.nnf", eo.out)}).out == "5\n");

  auto spec = d.file("o.txt", "type a\ntype b\nslots 2\npair 1 2\n");
  auto ont = run({"gen", "--kind", "ontology", "--spec", spec});
  CHECK(ont.code == 0);
  CHECK(ont.out.rfind("p cnf 5 ", 0) == 0);

  auto unsmooth = d.file("u.nnf", "nnf 5 4 2\nL 1\nL -1\nL 2\nA 2 1 2\nO 1 2 0 3\n");
  auto r = run({"check", "-c", unsmooth});
  CHECK(r.out.find("smooth=no violations=4") != std::string::npos);
}

TEST_CASE("exit codes") {
  TempDir d;
  CHECK(run({}).code == 1);
  CHECK(run({"frobnicate"}).code == 1);
  CHECK(run({"wmc"}).code == 1);
  CHECK(run({"compile"}).code == 1);
  CHECK(run({"gen", "--kind", "exactly-one"}).code == 1);

  auto bad = d.file("bad.cnf", "p cnf 3 1\n4 0\n");
  auto r = run({"compile", "--cnf", bad});
  CHECK(r.code == 2);
  CHECK(r.err.find("line 2") != std::string::npos);
  CHECK(std::count(r.err.begin(), r.err.end(), '\n') == 1);
  CHECK(run({"count", "-c", d.at("missing.nnf")}).code == 2);

  auto nnf = d.file("c.nnf", "nnf 1 0 2\nO 0 0\n");
  auto w = d.file("w.txt", "1 0.5\n2 0.5\n");
  CHECK(run({"wmc", "-c", nnf, "-w", w}).out == "wmc=0\n");
  auto e = run({"entropy", "-c", nnf, "-w", w});
  CHECK(e.code == 3);
  CHECK(std::count(e.err.begin(), e.err.end(), '\n') == 1);
  CHECK(run({"grad", "-c", nnf, "-w", w, "--of", "nope"}).code == 1);
}

TEST_CASE("outputs are byte-identical across runs") {
  TempDir d;
  auto cnf = d.file("c.cnf", "p cnf 6 5\n1 2 -3 0\n-1 4 0\n3 5 6 0\n-2 -5 0\n4 -6 0\n");
  auto a = run({"compile", "--cnf", cnf});
  auto b = run({"compile", "--cnf", cnf});
  CHECK(a.out == b.out);
  auto nnf = d.file("c.nnf", a.out);
  auto w = d.file("w.txt", "1 0.1\n2 0.2\n3 0.3\n4 0.4\n5 0.5\n6 0.6\n");
  for (auto cmd : {"wmc", "entropy", "grad"}) {
    std::vector<std::string> args{cmd, "-c", nnf, "-w", w};
    CHECK(run(args).out == run(args).out);
  }
}
