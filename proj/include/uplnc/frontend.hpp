#pragma once

#include <set>
#include <span>
#include <string>
#include <vector>

#include "uplnc/ast.hpp"
#include "uplnc/diagnostics.hpp"
#include "uplnc/token.hpp"

namespace uplnc {

struct VarDeclResult {
  std::vector<Symbol> symbols;
  std::size_t cursor = 0;  // first token after the declaration
};

// Parses one `var ...;` declaration starting at `cursor`. Both orders are
// accepted (`var names : type;` and `var type : names;`) and `extern` may
// appear before the names, inside or after the type, or before a single
// name. Symbols get `default_storage` unless marked extern. A type-first
// form is chosen when the token after `var` (and any leading `extern`)
// starts a type; `struct_names` says which identifiers name structures.
VarDeclResult parse_var_declaration(std::span<const Token> tokens, std::size_t cursor,
                                    Diagnostics& diags,
                                    Storage default_storage = Storage::GlobalDefined,
                                    const std::set<std::string>& struct_names = {});

// Builds the module tree. Syntax errors are reported with the expected
// token; parsing resumes at the next `;` or `}`.
Module parse_program(std::span<const Token> tokens, Diagnostics& diags);

// Binds every identifier, types every expression, lays out structures and
// frames. Calls to undeclared functions become extern functions returning
// int. Returns false if any diagnostic was issued.
bool resolve_and_check(Module& module, Diagnostics& diags);

// Tree walk: true when every expression node carries a type.
bool all_expressions_typed(const Module& module);

}  // namespace uplnc
