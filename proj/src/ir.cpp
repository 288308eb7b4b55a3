#include <set>

#include "uplnc/ir.hpp"

namespace uplnc::ir {

const IrFunction* IrModule::find_function(std::string_view name) const {
  for (const auto& f : functions) {
    if (f.name == name) return &f;
  }
  return nullptr;
}

const char* op_name(Op op) {
  switch (op) {
    case Op::Const: return "const";
    case Op::Move: return "move";
    case Op::AddrGlobal: return "addr-global";
    case Op::AddrFrame: return "addr-frame";
    case Op::Load: return "load";
    case Op::Store: return "store";
    case Op::Add: return "add";
    case Op::Sub: return "sub";
    case Op::Mul: return "mul";
    case Op::Div: return "div";
    case Op::Mod: return "mod";
    case Op::And: return "and";
    case Op::Or: return "or";
    case Op::Xor: return "xor";
    case Op::Shl: return "shl";
    case Op::Shr: return "shr";
    case Op::Not: return "not";
    case Op::Neg: return "neg";
    case Op::Cmp: return "cmp";
    case Op::Jump: return "jump";
    case Op::BranchIfZero: return "bz";
    case Op::Label: return "label";
    case Op::PushArg: return "push-arg";
    case Op::Call: return "call";
    case Op::Return: return "return";
  }
  return "?";
}

const char* cond_name(Cond c) {
  switch (c) {
    case Cond::Eq: return "eq";
    case Cond::Ne: return "ne";
    case Cond::Lt: return "lt";
    case Cond::Le: return "le";
    case Cond::Gt: return "gt";
    case Cond::Ge: return "ge";
    case Cond::LtU: return "ltu";
    case Cond::LeU: return "leu";
    case Cond::GtU: return "gtu";
    case Cond::GeU: return "geu";
  }
  return "?";
}

namespace {

std::string operand(const Operand& o) {
  if (const auto* t = std::get_if<Temp>(&o)) return "t" + std::to_string(t->id);
  if (const auto* c = std::get_if<std::int32_t>(&o)) return std::to_string(*c);
  return "_";
}

void collect_temps(const Operand& o, std::vector<int>& out) {
  if (const auto* t = std::get_if<Temp>(&o)) out.push_back(t->id);
}

}  // namespace

std::string to_string(const Instr& in) {
  std::string s = op_name(in.op);
  if (in.op == Op::Label) return in.name + ":";
  if (in.op == Op::Cmp) s += std::string(".") + cond_name(in.cond);
  if (in.op == Op::Load || in.op == Op::Store) s += std::to_string(in.width);
  std::vector<std::string> parts;
  if (in.dst >= 0) parts.push_back("t" + std::to_string(in.dst));
  if (!std::holds_alternative<std::monostate>(in.a)) parts.push_back(operand(in.a));
  if (!std::holds_alternative<std::monostate>(in.b)) parts.push_back(operand(in.b));
  if (in.op == Op::AddrFrame) parts.push_back(std::to_string(in.offset));
  if (!in.name.empty()) parts.push_back(in.name);
  if (in.op == Op::Call) parts.push_back(std::to_string(in.arg_count));
  for (std::size_t i = 0; i < parts.size(); ++i) s += (i ? ", " : " ") + parts[i];
  return s;
}

std::string to_string(const IrModule& m) {
  std::string s;
  for (const auto& g : m.globals) {
    s += (g.is_extern ? "extern " : "global ") + g.name + " " + std::to_string(g.size) + "\n";
  }
  for (const auto& str : m.strings) s += "string " + str.label + "\n";
  for (const auto& f : m.functions) {
    s += "function " + f.name + " frame=" + std::to_string(f.frame_size) +
         " params=" + std::to_string(f.param_count) + " temps=" + std::to_string(f.temp_count) +
         "\n";
    for (const auto& in : f.body) {
      s += (in.op == Op::Label ? "" : "    ") + to_string(in) + "\n";
    }
  }
  return s;
}

std::vector<std::string> validate(const IrModule& m) {
  std::vector<std::string> problems;
  std::set<std::string> link_names;
  auto claim = [&](const std::string& name) {
    if (!link_names.insert(name).second) problems.push_back("duplicate link name '" + name + "'");
  };
  for (const auto& f : m.functions) claim(f.name);
  for (const auto& g : m.globals) claim(g.name);
  for (const auto& s : m.strings) claim(s.label);

  std::set<std::string> globals;
  for (const auto& g : m.globals) globals.insert(g.name);
  for (const auto& s : m.strings) globals.insert(s.label);

  for (const auto& f : m.functions) {
    if (f.body.empty() || f.body.front().op != Op::Label) {
      problems.push_back(f.name + ": entry label is not first");
    }
    std::set<std::string> labels;
    for (const auto& in : f.body) {
      if (in.op == Op::Label && !labels.insert(in.name).second) {
        problems.push_back(f.name + ": label '" + in.name + "' defined twice");
      }
    }
    for (std::size_t i = 0; i < f.body.size(); ++i) {
      const Instr& in = f.body[i];
      if ((in.op == Op::Jump || in.op == Op::BranchIfZero) && !labels.count(in.name)) {
        problems.push_back(f.name + ": jump to undefined label '" + in.name + "'");
      }
      if (in.op == Op::AddrGlobal && !globals.count(in.name)) {
        problems.push_back(f.name + ": reference to undeclared global '" + in.name + "'");
      }
      std::vector<int> temps;
      if (in.dst >= 0) temps.push_back(in.dst);
      collect_temps(in.a, temps);
      collect_temps(in.b, temps);
      for (int t : temps) {
        if (t >= f.temp_count) {
          problems.push_back(f.name + ": temp t" + std::to_string(t) + " out of range at #" +
                             std::to_string(i));
        }
      }
    }
  }
  return problems;
}

}  // namespace uplnc::ir
