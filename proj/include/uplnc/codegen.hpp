#pragma once

#include <cstdint>
#include <string>

#include "uplnc/diagnostics.hpp"
#include "uplnc/ir.hpp"

namespace uplnc::codegen {

// One GNU-assembler translation unit, AT&T syntax, 32-bit, non-PIC.
struct AsmUnit {
  std::string rodata;  // string literals under private .LC labels
  std::string bss;     // one zero-filled reservation per defined global
  std::string text;    // functions
  std::string full;    // the complete unit, ready for `as --32`
};

struct CodegenOptions {
  std::int32_t max_frame_bytes = 1 << 20;
};

// cdecl: arguments pushed right to left, caller pops, result in %eax,
// %ebp frame with %ebx/%esi/%edi saved. Temporaries t0..t2 live in
// %ebx/%esi/%edi, the rest in fixed frame slots below the locals. Equal
// input gives byte-identical output.
AsmUnit emit_assembly(const ir::IrModule& ir, Diagnostics& diags,
                      const CodegenOptions& options = {});

}  // namespace uplnc::codegen
