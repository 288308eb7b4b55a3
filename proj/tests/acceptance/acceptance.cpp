// End-to-end acceptance checks. Prints one line per criterion and exits
// nonzero if any criterion fails; environment-gated checks may SKIP.

#include <chrono>
#include <cstdio>
#include <functional>
#include <sstream>

#include "test_support.hpp"
#include "uplnc/ccs.hpp"
#include "uplnc/frontend.hpp"
#include "uplnc/grapher.hpp"

using namespace uplnc;
namespace ts = testsupport;
namespace fs = std::filesystem;

namespace {

enum class Verdict { Pass, Fail, Skip };

struct Result {
  Verdict verdict;
  std::string detail;
};

Result pass(std::string d) { return {Verdict::Pass, std::move(d)}; }
Result fail(std::string d) { return {Verdict::Fail, std::move(d)}; }
Result skip(std::string d) { return {Verdict::Skip, std::move(d)}; }

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

std::string fmt_seconds(double s) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.3fs", s);
  return buf;
}

struct Drive {
  int status;
  std::string out, err;
};

Drive drive(driver::Mode mode, const fs::path& input) {
  driver::DriverConfig c;
  c.mode = mode;
  c.inputs = {input.string()};
  c.output = "-";
  std::ostringstream out, err;
  const int st = driver::run_pipeline(c, out, err);
  return {st, out.str(), err.str()};
}

// 1. Both primes forms print exactly the primes in [3, 1000].
Result primes_end_to_end() {
  const auto oracle = ts::sieve_primes(3, 1000);
  if (oracle.size() != 167 || oracle.front() != 3 || oracle.back() != 997) {
    return fail("sieve oracle is inconsistent");
  }
  std::string detail;
  for (const char* name : {"primes_redefined.e", "primes_canonical.e"}) {
    const auto t0 = std::chrono::steady_clock::now();
    auto r = drive(driver::Mode::Run, ts::corpus_dir() / name);
    const double dt = seconds_since(t0);
    if (r.status != 0) return fail(std::string(name) + " exited " + std::to_string(r.status) + ": " + r.err);
    auto printed = ts::numbers_in(r.out);
    if (printed != oracle) {
      return fail(std::string(name) + " printed " + std::to_string(printed.size()) +
                  " numbers, not the 167 sieve primes");
    }
    if (r.out.find("Calculating the primes>=3...") != 0) return fail(std::string(name) + ": header missing");
    if (dt >= 1.0) return fail(std::string(name) + " took " + fmt_seconds(dt));
    detail += std::string(detail.empty() ? "" : ", ") + name + " " + fmt_seconds(dt);
  }
  return pass("167 primes, 3..997; " + detail);
}

std::optional<std::vector<Token>> tokens_of(const std::string& name, std::string& why) {
  Diagnostics d;
  auto unit = driver::preprocess_and_tokenize(ts::read_corpus(name),
                                              (ts::corpus_dir() / name).string(), d);
  if (!unit) {
    why = d.format();
    return std::nullopt;
  }
  return unit->tokens;
}

// 2. Redefined and canonical primes tokenize identically.
Result syntax_confluence() {
  std::string why;
  auto a = tokens_of("primes_redefined.e", why);
  auto b = tokens_of("primes_canonical.e", why);
  if (!a || !b) return fail(why);
  if (a->size() != b->size()) {
    return fail(std::to_string(a->size()) + " vs " + std::to_string(b->size()) + " tokens");
  }
  for (std::size_t i = 0; i < a->size(); ++i) {
    if ((*a)[i].kind != (*b)[i].kind || (*a)[i].text != (*b)[i].text) {
      return fail("token " + std::to_string(i) + ": '" + (*a)[i].text + "' vs '" + (*b)[i].text + "'");
    }
  }
  return pass(std::to_string(a->size()) + " identical tokens");
}

// 3. The nine declaration styles.
Result declaration_matrix() {
  const std::string src =
      "var a,b,c:[3]*char;\n"
      "var [3]*char:d,e,f;\n"
      "var extern a1,a2:int;\n"
      "var extern int:a3;\n"
      "var int extern:a4;\n"
      "var a5:extern int;\n"
      "var a6:int extern;\n"
      "var extern a7:extern int extern;\n"
      "var extern **int extern: extern a8;\n";
  Diagnostics d;
  auto toks = tokenize(src, d);
  Module m = parse_program(toks, d);
  if (!d.has_errors()) resolve_and_check(m, d);
  if (d.has_errors()) return fail(d.format());
  std::map<std::string, const Symbol*> by_name;
  for (const auto& g : m.globals) by_name[g->name] = g.get();

  TypeExpr expected = TypeExpr::char_type().pointer_to().array_of(3);
  for (const char* n : {"a", "b", "c", "d", "e", "f"}) {
    const Symbol* s = by_name[n];
    if (!s) return fail(std::string("no symbol ") + n);
    if (!(s->type == expected) || s->type.size_bytes() != 12 ||
        s->storage != Storage::GlobalDefined) {
      return fail(std::string(n) + " is " + s->type.to_string());
    }
  }
  for (const char* n : {"a1", "a2", "a3", "a4", "a5", "a6", "a7", "a8"}) {
    const Symbol* s = by_name[n];
    if (!s) return fail(std::string("no symbol ") + n);
    TypeExpr want = TypeExpr::int_type();
    if (std::string(n) == "a8") want = want.pointer_to().pointer_to();
    if (s->storage != Storage::Extern || !(s->type == want)) {
      return fail(std::string(n) + ": " + storage_name(s->storage) + " " + s->type.to_string());
    }
  }
  return pass("a..f: [3]*char (12 bytes); a1..a7: extern int; a8: extern **int");
}

// 4. Odometer against brute force and the multiset count.
Result ccs_grid() {
  const auto t0 = std::chrono::steady_clock::now();
  using Oracle = std::function<std::int64_t(const std::vector<int>&)>;
  const std::vector<std::pair<ccs::Summand, Oracle>> fs = {
      {[](std::span<const int>) -> std::int64_t { return 1; },
       [](const std::vector<int>&) -> std::int64_t { return 1; }},
      {[](std::span<const int> v) {
         std::int64_t s = 0;
         for (int x : v) s += x;
         return s;
       },
       [](const std::vector<int>& v) {
         std::int64_t s = 0;
         for (std::size_t j = 0; j < v.size(); ++j) s += v[j];
         return s;
       }},
      {[](std::span<const int> v) {
         std::int64_t p = 1;
         for (int x : v) p *= x;
         return p;
       },
       [](const std::vector<int>& v) {
         std::int64_t p = 1;
         for (std::size_t j = 0; j < v.size(); ++j) p *= v[j];
         return p;
       }}};
  int cases = 0;
  for (int k = 0; k <= 4; ++k) {
    for (int n = 1; n <= 6; ++n) {
      for (const auto& [lib, oracle] : fs) {
        const auto got = ccs::monotone_nested_sum({k, n, lib});
        const auto want = ts::brute_monotone_sum(k, n, oracle);
        if (got != want) {
          return fail("k=" + std::to_string(k) + " N=" + std::to_string(n) + ": " +
                      std::to_string(got) + " != " + std::to_string(want));
        }
        ++cases;
      }
      const auto count = ccs::monotone_nested_sum({k, n, fs[0].first});
      if (count != ts::pascal(n + k - 1, k)) return fail("count law fails at k=" + std::to_string(k));
    }
  }
  const double dt = seconds_since(t0);
  if (dt >= 1.0) return fail("took " + fmt_seconds(dt));
  return pass(std::to_string(cases) + " cases plus count law, " + fmt_seconds(dt));
}

// 5. Generated program for k=3, N=3, f=1 prints 10.
Result ccs_round_trip() {
  const auto lib = ccs::monotone_nested_sum({3, 3, [](std::span<const int>) -> std::int64_t { return 1; }});
  try {
    auto r = ts::run_source(ccs::generate_ccs_source(3, 3, "R+=1;"), "", "ccs.e");
    if (r.stdout_text != "10\n" || lib != 10) {
      return fail("printed '" + r.stdout_text + "', library " + std::to_string(lib));
    }
  } catch (const std::exception& e) {
    return fail(e.what());
  }
  return pass("printed 10, library value 10");
}

// 6. Primes reference graph.
Result grapher_primes() {
  auto a = drive(driver::Mode::Graph, ts::corpus_dir() / "primes_redefined.e");
  auto b = drive(driver::Mode::Graph, ts::corpus_dir() / "primes_redefined.e");
  if (a.status != 0) return fail(a.err);
  if (a.out != b.out) return fail("output differs between runs");

  std::map<std::string, std::string> at;  // "x,y" -> name
  std::set<std::pair<std::string, std::string>> arrows;
  int arrow_lines = 0;
  std::istringstream in(a.out);
  for (std::string line; std::getline(in, line);) {
    char name[64];
    int idx, x, y, x2, y2;
    if (std::sscanf(line.c_str(), "set label %d \"%63[^\"]\" at %d,%d", &idx, name, &x, &y) == 4) {
      at[std::to_string(x) + "," + std::to_string(y)] = name;
    } else if (std::sscanf(line.c_str(), "set arrow %d from %d,%d to %d,%d", &idx, &x, &y, &x2,
                           &y2) == 5) {
      ++arrow_lines;
      arrows.insert({at[std::to_string(x) + "," + std::to_string(y)],
                     at[std::to_string(x2) + "," + std::to_string(y2)]});
    }
  }
  const std::set<std::pair<std::string, std::string>> want = {
      {"main", "doprimes"}, {"doprimes", "printf"}, {"doprimes", "tab"}};
  if (arrow_lines != 3 || arrows != want) {
    return fail(std::to_string(arrow_lines) + " arrows, edge set mismatch");
  }
  return pass("3 arrows: main->doprimes, doprimes->printf, doprimes->tab; byte-identical");
}

// 7. Bare member reads equal this-qualified reads.
Result method_semantics() {
  std::string detail;
  for (const auto& [w, h] : std::vector<std::pair<int, int>>{{3, 4}, {0, 9}, {-7, 11}, {1000, 3}}) {
    const std::string src =
        "struct Rect {\n"
        "  var w:int;\n"
        "  var h:int;\n"
        "  proc bare():int { return w*h+w; }\n"
        "  proc qualified():int { return this->w*this->h+this->w; }\n"
        "}\n"
        "var r:Rect;\n"
        "proc main()\n{\n"
        "  var p:*Rect;\n"
        "  r.w=" + std::to_string(w) + "; r.h=" + std::to_string(h) + ";\n"
        "  p=&r;\n"
        "  printf(\"%d %d %d\", r.bare(), p->qualified(), r.w*r.h+r.w);\n"
        "  return r.bare()==r.qualified();\n}\n";
    try {
      auto res = ts::run_source(src, "", "rect.e");
      auto nums = ts::numbers_in(res.stdout_text);
      if (res.exit_code != 1 || nums.size() != 3 || nums[0] != nums[1] || nums[1] != nums[2]) {
        return fail("w=" + std::to_string(w) + " h=" + std::to_string(h) + ": '" +
                    res.stdout_text + "'");
      }
      detail += (detail.empty() ? "" : " ") + std::to_string(nums[0]);
    } catch (const std::exception& e) {
      return fail(e.what());
    }
  }
  return pass("bare == this-> for values " + detail);
}

// 8. &a[i] - &a[0] as integers.
Result pointer_scaling() {
  for (const auto& [type, size] : std::vector<std::pair<std::string, int>>{{"char", 1}, {"int", 4}}) {
    std::string src = "var a:[11]" + type + ";\nproc main()\n{\n  var i,p,q:int;\n"
                      "  for(i=0;i<=10;i++) { p=&a[i]; q=&a[0]; printf(\"%d \", p-q); }\n"
                      "  return 0;\n}\n";
    std::vector<int> want;
    for (int i = 0; i <= 10; ++i) want.push_back(i * size);
    try {
      auto got = ts::numbers_in(ts::run_source(src).stdout_text);
      if (got != want) return fail(type + " array gives wrong differences");
    } catch (const std::exception& e) {
      return fail(e.what());
    }
  }
  return pass("char: i*1, int: i*4 for i in 0..10");
}

// 9. Native runs agree with the interpreter; C calls UPLNC.
Result abi_differential() {
  const auto t = ts::probe_native();
  if (!t.available) return skip(t.why_not);
  int programs = 0;
  for (const auto& name : ts::corpus_programs()) {
    const fs::path src = ts::corpus_dir() / name;
    fs::path in = fs::path(src).replace_extension(".in");
    std::string input;
    if (fs::exists(in)) input = *driver::read_file(in);
    else in.clear();
    ir::RunResult want;
    try {
      want = ts::run_source(ts::read_corpus(name), input, src.string());
    } catch (const std::exception& e) {
      return fail(name + ": " + e.what());
    }
    auto r = ts::native_compile_and_run(t, src, in);
    if (!r.built) return fail(name + ": " + r.log);
    if (r.run.status != want.exit_code || r.run.out != want.stdout_text) {
      return fail(name + ": native exit " + std::to_string(r.run.status) + " vs " +
                  std::to_string(want.exit_code) + (r.run.out == want.stdout_text ? "" : ", stdout differs"));
    }
    ++programs;
  }
  auto h = ts::native_c_harness(t);
  if (!h.built) return fail("C harness: " + h.log);
  if (h.run.status != 0) return fail("C harness: " + h.run.out);
  return pass(std::to_string(programs) + " corpus programs match, C harness ok (" + t.route +
              " runtime)");
}

// 10. Repeated runs are byte-identical.
Result determinism() {
  int artifacts = 0;
  for (const auto& name : ts::corpus_programs()) {
    for (auto mode : {driver::Mode::PreprocessOnly, driver::Mode::EmitAssembly, driver::Mode::Graph}) {
      auto a = drive(mode, ts::corpus_dir() / name);
      auto b = drive(mode, ts::corpus_dir() / name);
      if (a.status != 0) return fail(name + ": " + a.err);
      if (a.out != b.out || a.status != b.status) return fail(name + ": outputs differ");
      ++artifacts;
    }
  }
  return pass(std::to_string(artifacts) + " artifacts identical across runs");
}

}  // namespace

int main() {
  const std::vector<std::pair<const char*, Result (*)()>> criteria = {
      {"primes end-to-end", primes_end_to_end},
      {"syntax-redefinition confluence", syntax_confluence},
      {"declaration matrix", declaration_matrix},
      {"ccs oracle grid", ccs_grid},
      {"ccs round-trip", ccs_round_trip},
      {"grapher on primes", grapher_primes},
      {"method semantics", method_semantics},
      {"pointer-arithmetic scaling", pointer_scaling},
      {"abi differential", abi_differential},
      {"determinism", determinism},
  };
  int failures = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    Result r;
    try {
      r = criteria[i].second();
    } catch (const std::exception& e) {
      r = fail(std::string("exception: ") + e.what());
    }
    const char* tag = r.verdict == Verdict::Pass ? "PASS" : r.verdict == Verdict::Skip ? "SKIP" : "FAIL";
    if (r.verdict == Verdict::Fail) ++failures;
    std::printf("criterion %2zu %s  %s: %s\n", i + 1, tag, criteria[i].first, r.detail.c_str());
  }
  std::printf("%d of %zu criteria failed\n", failures, criteria.size());
  return failures ? 1 : 0;
}
