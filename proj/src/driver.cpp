#include "uplnc/driver.hpp"

#include <spawn.h>
#include <sys/wait.h>

#include <cstdlib>
#include <fstream>
#include <sstream>

#include "uplnc/ccs.hpp"
#include "uplnc/codegen.hpp"
#include "uplnc/frontend.hpp"
#include "uplnc/grapher.hpp"

extern char** environ;

namespace uplnc::driver {

namespace {

std::string preprocessed_tag(const std::string& file) { return file + "#preprocessed"; }

bool write_artifact(const std::string& path, const std::string& text, std::ostream& out,
                    std::ostream& err) {
  if (path == "-") {
    out << text;
    return true;
  }
  std::ofstream f(path, std::ios::binary);
  if (!f) {
    err << "uplnc: cannot write '" << path << "'\n";
    return false;
  }
  f << text;
  return static_cast<bool>(f);
}

std::string sibling(const std::string& input, const char* extension) {
  return std::filesystem::path(input).replace_extension(extension).string();
}

}  // namespace

std::optional<std::string> read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) return std::nullopt;
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

int run_process(const std::vector<std::string>& argv) {
  std::vector<char*> args;
  for (const auto& a : argv) args.push_back(const_cast<char*>(a.c_str()));
  args.push_back(nullptr);
  pid_t pid;
  if (posix_spawnp(&pid, args[0], nullptr, nullptr, args.data(), environ) != 0) return -1;
  int status = 0;
  if (waitpid(pid, &status, 0) < 0) return -1;
  if (WIFEXITED(status)) return WEXITSTATUS(status);
  return 128 + (WIFSIGNALED(status) ? WTERMSIG(status) : 0);
}

std::optional<CompiledUnit> preprocess_and_tokenize(std::string_view source,
                                                    const std::string& file_name,
                                                    Diagnostics& diags) {
  CompiledUnit unit;
  preproc::Options opts;
  opts.file_name = file_name;
  const std::size_t before = diags.count();
  unit.preprocessed = preproc::preprocess(source, diags, opts);
  if (diags.count() != before) return std::nullopt;

  const std::string tag = preprocessed_tag(file_name);
  const std::string saved = diags.default_file();
  diags.set_default_file(tag);
  unit.tokens = tokenize(unit.preprocessed.text, diags);
  diags.remap(unit.preprocessed.line_map, tag);
  diags.set_default_file(saved);
  if (diags.count() != before) return std::nullopt;
  return unit;
}

std::optional<CompiledUnit> compile_source(std::string_view source, const std::string& file_name,
                                           Diagnostics& diags) {
  auto unit = preprocess_and_tokenize(source, file_name, diags);
  if (!unit) return std::nullopt;

  const std::size_t before = diags.count();
  const std::string tag = preprocessed_tag(file_name);
  const std::string saved = diags.default_file();
  diags.set_default_file(tag);
  unit->module = parse_program(unit->tokens, diags);
  if (diags.count() == before) resolve_and_check(unit->module, diags);
  diags.remap(unit->preprocessed.line_map, tag);
  diags.set_default_file(saved);
  if (diags.count() != before) return std::nullopt;

  unit->ir = ir::lower(unit->module);
  for (const auto& problem : ir::validate(unit->ir)) {
    diags.error(file_name, 0, 0, "internal error: " + problem);
  }
  if (diags.count() != before) return std::nullopt;
  return unit;
}

namespace {

int process_input(const DriverConfig& config, const std::string& input, std::ostream& out,
                  std::ostream& err) {
  auto source = read_file(input);
  if (!source) {
    err << "uplnc: cannot read '" << input << "'\n";
    return 1;
  }
  Diagnostics diags;
  diags.set_default_file(input);
  auto fail = [&] {
    err << diags.format();
    return 1;
  };

  if (config.mode == Mode::PreprocessOnly) {
    preproc::Options opts;
    opts.file_name = input;
    auto pp = preproc::preprocess(*source, diags, opts);
    if (diags.has_errors()) return fail();
    std::string text = pp.text;
    if (!text.empty() && text.back() != '\n') text += '\n';
    return write_artifact(config.output.value_or("-"), text, out, err) ? 0 : 1;
  }

  auto unit = compile_source(*source, input, diags);
  if (!unit) return fail();

  switch (config.mode) {
    case Mode::EmitAssembly: {
      auto unit_asm = codegen::emit_assembly(unit->ir, diags);
      if (diags.has_errors()) return fail();
      return write_artifact(config.output.value_or(sibling(input, ".s")), unit_asm.full, out, err)
                 ? 0 : 1;
    }
    case Mode::CompileAndLink: {
      auto unit_asm = codegen::emit_assembly(unit->ir, diags);
      if (diags.has_errors()) return fail();
      const std::string exe = config.output.value_or(sibling(input, ""));
      const std::string asm_path = exe + ".s";
      if (!write_artifact(asm_path, unit_asm.full, out, err)) return 1;
      std::string cc = config.c_driver;
      if (cc.empty()) {
        const char* env = std::getenv(kCDriverEnv);
        cc = (env && *env) ? env : "cc";
      }
      std::vector<std::string> argv = {cc, "-m32", asm_path, "-o", exe};
      argv.insert(argv.end(), config.extra.begin(), config.extra.end());
      int status = run_process(argv);
      if (status != 0) {
        err << "uplnc: '" << cc << "' failed with status " << status << "\n";
        return status < 0 ? 1 : status;
      }
      return 0;
    }
    case Mode::Graph: {
      auto graph = grapher::build_ref_graph(unit->module);
      return write_artifact(config.output.value_or(sibling(input, ".gp")),
                            grapher::emit_gnuplot(graph), out, err) ? 0 : 1;
    }
    case Mode::Run: {
      std::vector<std::string> argv = {input};
      argv.insert(argv.end(), config.run_args.begin(), config.run_args.end());
      ir::InterpOptions opts;
      opts.stdin_text = config.run_stdin;
      try {
        auto result = ir::interpret(unit->ir, "main", argv, opts);
        out << result.stdout_text;
        out.flush();
        return result.exit_code;
      } catch (const ir::RuntimeFault& f) {
        err << input << ": " << f.what() << "\n";
        return 1;
      }
    }
    default:
      return 1;
  }
}

}  // namespace

int run_pipeline(const DriverConfig& config, std::ostream& out, std::ostream& err) {
  if (config.mode == Mode::CcsGenerate) {
    try {
      std::string text = ccs::generate_ccs_source(config.ccs_k, config.ccs_n, config.ccs_body);
      return write_artifact(config.output.value_or("-"), text, out, err) ? 0 : 1;
    } catch (const std::invalid_argument& e) {
      err << "uplnc: " << e.what() << "\n";
      return 1;
    }
  }
  if (config.inputs.empty()) {
    err << "uplnc: no input files\n";
    return 1;
  }
  if (config.inputs.size() > 1 && config.output && *config.output != "-" &&
      config.mode != Mode::Run) {
    err << "uplnc: -o names one output but " << config.inputs.size() << " inputs were given\n";
    return 1;
  }
  int status = 0;
  for (const auto& input : config.inputs) {
    int s = process_input(config, input, out, err);
    if (config.mode == Mode::Run) {
      status = s;
    } else if (s != 0) {
      return s;
    }
  }
  return status;
}

}  // namespace uplnc::driver
