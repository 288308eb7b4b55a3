// uplnc: preprocess, compile, graph, interpret or generate UPLNC programs.
//
//   uplnc -E|-S|-c|--graph|--run|--ccs K N [-o OUT] FILE...

#include <iostream>

#include "CLI11.hpp"
#include "uplnc/driver.hpp"

int main(int argc, char** argv) {
  using uplnc::driver::Mode;

  CLI::App app{"UPLNC compiler toolchain"};
  bool preprocess_only = false, emit_asm = false, link = false, graph = false, run = false;
  std::vector<int> ccs;
  uplnc::driver::DriverConfig config;
  std::string output;
  std::string stdin_file;

  app.add_flag("-E", preprocess_only, "Preprocess only, write canonical text");
  app.add_flag("-S", emit_asm, "Emit i386 assembly (.s)");
  app.add_flag("-c", link, "Assemble and link with the external C driver");
  app.add_flag("--graph", graph, "Write the global reference graph as a gnuplot script (.gp)");
  app.add_flag("--run", run, "Interpret the program; exit with its status");
  app.add_option("--ccs", ccs, "Generate the nested-sum program for K indices bounded by N")
      ->expected(2)
      ->type_name("K N");
  app.add_option("--body", config.ccs_body, "Innermost statement for --ccs")
      ->capture_default_str();
  app.add_option("-o", output, "Output path ('-' for standard output)");
  app.add_option("-X,--link-arg", config.extra, "Extra argument for the external C driver");
  app.add_option("--arg", config.run_args, "Program argument for --run (repeatable)");
  app.add_option("--stdin", stdin_file, "File fed to getchar() under --run");
  app.add_option("files", config.inputs, "Input files (.e)");

  CLI11_PARSE(app, argc, argv);

  const int modes = preprocess_only + emit_asm + link + graph + run + (!ccs.empty());
  if (modes != 1) {
    std::cerr << "uplnc: choose exactly one of -E, -S, -c, --graph, --run, --ccs\n";
    return 1;
  }
  if (preprocess_only) config.mode = Mode::PreprocessOnly;
  if (emit_asm) config.mode = Mode::EmitAssembly;
  if (link) config.mode = Mode::CompileAndLink;
  if (graph) config.mode = Mode::Graph;
  if (run) config.mode = Mode::Run;
  if (!ccs.empty()) {
    config.mode = Mode::CcsGenerate;
    config.ccs_k = ccs[0];
    config.ccs_n = ccs[1];
  }
  if (!output.empty()) config.output = output;
  if (!stdin_file.empty()) {
    auto text = uplnc::driver::read_file(stdin_file);
    if (!text) {
      std::cerr << "uplnc: cannot read '" << stdin_file << "'\n";
      return 1;
    }
    config.run_stdin = *text;
  }
  return uplnc::driver::run_pipeline(config, std::cout, std::cerr);
}
