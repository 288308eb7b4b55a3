#include <sys/stat.h>

#include <cstdlib>
#include <fstream>
#include <sstream>

#include "doctest.h"
#include "test_support.hpp"

using namespace uplnc;
using driver::DriverConfig;
using driver::Mode;
namespace fs = std::filesystem;

namespace {

struct Outcome {
  int status;
  std::string out, err;
};

Outcome drive(DriverConfig cfg) {
  std::ostringstream out, err;
  const int st = driver::run_pipeline(cfg, out, err);
  return {st, out.str(), err.str()};
}

DriverConfig cfg_for(Mode mode, const fs::path& input, std::optional<std::string> output = "-") {
  DriverConfig c;
  c.mode = mode;
  c.inputs = {input.string()};
  c.output = std::move(output);
  return c;
}

fs::path primes() { return testsupport::corpus_dir() / "primes_redefined.e"; }

std::string slurp(const fs::path& p) { return driver::read_file(p).value_or("<missing>"); }

void write(const fs::path& p, const std::string& text) { std::ofstream(p) << text; }

}  // namespace

TEST_CASE("-E writes canonical text") {
  auto r = drive(cfg_for(Mode::PreprocessOnly, primes()));
  CHECK(r.status == 0);
  CHECK(r.out.find("<arg>") == std::string::npos);
  CHECK(r.out.find("proc doprimes()") != std::string::npos);
  CHECK(r.out.find("var tab:[1001]int;") != std::string::npos);
  CHECK(r.out.find("#") == std::string::npos);
}

TEST_CASE("--run prints the primes") {
  auto r = drive(cfg_for(Mode::Run, primes()));
  CHECK(r.status == 0);
  CHECK(testsupport::numbers_in(r.out) == testsupport::sieve_primes(3, 1000));
}

TEST_CASE("--run propagates main's return value and stdin") {
  const fs::path wc = testsupport::corpus_dir() / "wordcount.e";
  auto c = cfg_for(Mode::Run, wc);
  c.run_stdin = "one two\nthree\n\n";
  auto r = drive(c);
  CHECK(r.status == 3);
  CHECK(r.out == "3 3 15\n");
}

TEST_CASE("-S on an empty module writes a .s that assembles") {
  const fs::path dir = testsupport::scratch_dir("drv-empty");
  write(dir / "empty.e", "");
  auto r = drive(cfg_for(Mode::EmitAssembly, dir / "empty.e", std::nullopt));
  CHECK(r.status == 0);
  REQUIRE(fs::exists(dir / "empty.s"));
  CHECK(fs::file_size(dir / "empty.s") > 0);
  const int st = driver::run_process({"as", "--32", (dir / "empty.s").string(), "-o",
                                      (dir / "empty.o").string()});
  if (st < 0) {
    MESSAGE("skipped assembling: no `as` on this host");
    return;
  }
  CHECK(st == 0);
}

TEST_CASE("--graph writes a .gp next to the input") {
  const fs::path dir = testsupport::scratch_dir("drv-graph");
  fs::copy_file(primes(), dir / "p.e");
  fs::copy_file(testsupport::corpus_dir() / "redefs.he", dir / "redefs.he");
  auto r = drive(cfg_for(Mode::Graph, dir / "p.e", std::nullopt));
  CHECK(r.status == 0);
  CHECK(slurp(dir / "p.gp").find("set arrow 3") != std::string::npos);
}

TEST_CASE("missing input") {
  auto r = drive(cfg_for(Mode::Run, "/nonexistent/file.e"));
  CHECK(r.status == 1);
  CHECK(r.err.find("/nonexistent/file.e") != std::string::npos);
  DriverConfig none;
  none.mode = Mode::EmitAssembly;
  CHECK(drive(none).status == 1);
}

TEST_CASE("diagnostics stop the pipeline and point at the original line") {
  const fs::path dir = testsupport::scratch_dir("drv-diag");
  write(dir / "bad.e", "#define N 3\n/* a\n comment */\nproc main()\n{\n  return missing+N;\n}\n");
  auto r = drive(cfg_for(Mode::EmitAssembly, dir / "bad.e", std::nullopt));
  CHECK(r.status == 1);
  CHECK_FALSE(fs::exists(dir / "bad.s"));
  CHECK(r.err.find((dir / "bad.e").string() + ":6:") != std::string::npos);
  CHECK(r.err.find("'missing'") != std::string::npos);
}

TEST_CASE("diagnostics inside an included header name the header") {
  const fs::path dir = testsupport::scratch_dir("drv-inc");
  write(dir / "defs.he", "var ok:int;\nvar broken:[0]int;\n");
  write(dir / "main.e", "#include \"defs.he\"\nproc main() { return ok; }\n");
  auto r = drive(cfg_for(Mode::Run, dir / "main.e"));
  CHECK(r.status == 1);
  CHECK(r.err.find("defs.he:2:") != std::string::npos);
}

TEST_CASE("runtime faults are reported with status 1") {
  const fs::path dir = testsupport::scratch_dir("drv-fault");
  write(dir / "f.e", "proc main() { var z:int; return 1/z; }\n");
  auto r = drive(cfg_for(Mode::Run, dir / "f.e"));
  CHECK(r.status == 1);
  CHECK(r.err.find("division by zero") != std::string::npos);
}

TEST_CASE("preprocessed output fed back gives the same results") {
  const fs::path dir = testsupport::scratch_dir("drv-stages");
  auto pre = drive(cfg_for(Mode::PreprocessOnly, primes()));
  REQUIRE(pre.status == 0);
  write(dir / "pre.e", pre.out);
  for (Mode m : {Mode::Run, Mode::EmitAssembly, Mode::Graph}) {
    auto direct = drive(cfg_for(m, primes()));
    auto staged = drive(cfg_for(m, dir / "pre.e"));
    CHECK(direct.status == staged.status);
    CHECK(direct.out == staged.out);
  }
}

TEST_CASE("no hidden state between invocations") {
  for (Mode m : {Mode::PreprocessOnly, Mode::EmitAssembly, Mode::Graph, Mode::Run}) {
    auto a = drive(cfg_for(m, primes()));
    auto b = drive(cfg_for(m, primes()));
    CHECK(a.status == b.status);
    CHECK(a.out == b.out);
  }
}

TEST_CASE("--ccs writes a program") {
  DriverConfig c;
  c.mode = Mode::CcsGenerate;
  c.ccs_k = 3;
  c.ccs_n = 3;
  auto r = drive(c);
  CHECK(r.status == 0);
  CHECK(testsupport::run_source(r.out).stdout_text == "10\n");
  c.ccs_n = 0;
  CHECK(drive(c).status == 1);
}

TEST_CASE("-c runs the C driver and propagates its failure") {
  const fs::path dir = testsupport::scratch_dir("drv-cc");
  const fs::path fake = dir / "fakecc";
  write(fake, "#!/bin/sh\necho \"$@\" > \"$(dirname \"$0\")/args\"\nexit 7\n");
  chmod(fake.c_str(), 0755);
  auto c = cfg_for(Mode::CompileAndLink, primes(), (dir / "prog").string());
  c.c_driver = fake.string();
  c.extra = {"-lm"};
  auto r = drive(c);
  CHECK(r.status == 7);
  const std::string args = slurp(dir / "args");
  CHECK(args.find("-m32") != std::string::npos);
  CHECK(args.find((dir / "prog.s").string()) != std::string::npos);
  CHECK(args.find("-lm") != std::string::npos);

  // The environment variable is the fallback.
  setenv(driver::kCDriverEnv, fake.c_str(), 1);
  c.c_driver.clear();
  CHECK(drive(c).status == 7);
  unsetenv(driver::kCDriverEnv);

  c.c_driver = (dir / "does-not-exist").string();
  CHECK(drive(c).status == 1);
}

TEST_CASE("one -o for several inputs is refused") {
  auto c = cfg_for(Mode::EmitAssembly, primes(), "out.s");
  c.inputs.push_back(primes().string());
  CHECK(drive(c).status == 1);
}
