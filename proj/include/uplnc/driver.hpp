#pragma once

#include <filesystem>
#include <optional>
#include <ostream>
#include <string>
#include <string_view>
#include <vector>

#include "uplnc/ast.hpp"
#include "uplnc/diagnostics.hpp"
#include "uplnc/ir.hpp"
#include "uplnc/preproc.hpp"
#include "uplnc/token.hpp"

namespace uplnc::driver {

// Everything one translation unit produces on its way to IR.
struct CompiledUnit {
  preproc::PreprocOutput preprocessed;
  std::vector<Token> tokens;
  Module module;
  ir::IrModule ir;
};

// Preprocess, tokenize, parse and check `source`; lower to IR when no
// diagnostics were issued. Diagnostics are reported against the original
// files. Returns nullopt on any error.
std::optional<CompiledUnit> compile_source(std::string_view source, const std::string& file_name,
                                           Diagnostics& diags);

// The front half only: preprocessing plus tokenization.
std::optional<CompiledUnit> preprocess_and_tokenize(std::string_view source,
                                                    const std::string& file_name,
                                                    Diagnostics& diags);

enum class Mode { PreprocessOnly, EmitAssembly, CompileAndLink, Graph, Run, CcsGenerate };

struct DriverConfig {
  Mode mode = Mode::EmitAssembly;
  std::vector<std::string> inputs;
  std::optional<std::string> output;  // "-" means standard output
  std::vector<std::string> extra;     // passed to the external C driver
  std::vector<std::string> run_args;  // argv[1..] for --run
  std::string run_stdin;
  int ccs_k = 0;
  int ccs_n = 1;
  std::string ccs_body = "R+=1;";
  // External C driver used for -c; empty means $UPLNC_CC, then "cc".
  std::string c_driver;
};

// Environment variable naming the external C driver.
inline constexpr const char* kCDriverEnv = "UPLNC_CC";

// Runs the configured mode over each input. Artifacts go to files or to
// `out`; diagnostics to `err`. Returns the process exit status: 0 on
// success, 1 on diagnostics or missing inputs, the linker's status when it
// fails, the program's exit code for Run.
int run_pipeline(const DriverConfig& config, std::ostream& out, std::ostream& err);

// Reads a whole file; nullopt if it cannot be opened.
std::optional<std::string> read_file(const std::filesystem::path& path);

// Spawns `argv` (no shell) and waits; returns its exit status, or -1 when
// it could not be started.
int run_process(const std::vector<std::string>& argv);

}  // namespace uplnc::driver
