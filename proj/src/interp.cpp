#include <cstring>
#include <limits>
#include <map>
#include <unordered_map>

#include "uplnc/ir.hpp"

namespace uplnc::ir {

namespace {

constexpr std::uint32_t kNullGuard = 0x1000;

std::uint32_t align4(std::uint64_t n) { return static_cast<std::uint32_t>((n + 3) & ~std::uint64_t{3}); }

struct Halt {
  int code;
};

class Machine {
 public:
  Machine(const IrModule& ir, const InterpOptions& opt) : ir_(ir), opt_(opt), mem_(opt.memory_bytes) {
    if (opt.memory_bytes < 2 * kNullGuard) throw RuntimeFault("simulated memory is too small");
    std::uint64_t next = kNullGuard;
    auto place = [&](const std::string& name, std::uint64_t size) {
      addr_[name] = static_cast<std::uint32_t>(next);
      next = align4(next + std::max<std::uint64_t>(size, 1));
      if (next >= mem_.size() / 2) throw RuntimeFault("globals do not fit in simulated memory");
    };
    for (const auto& g : ir.globals) {
      if (!g.is_extern) place(g.name, static_cast<std::uint64_t>(g.size));
    }
    for (const auto& s : ir.strings) {
      place(s.label, s.bytes.size() + 1);
      std::memcpy(&mem_[addr_[s.label]], s.bytes.data(), s.bytes.size());
    }
    heap_ = static_cast<std::uint32_t>(next);
    stack_limit_ = heap_;
    esp_ = static_cast<std::uint32_t>(mem_.size() & ~std::size_t{15});

    for (std::size_t i = 0; i < ir.functions.size(); ++i) {
      const auto& f = ir.functions[i];
      functions_[f.name] = &f;
      auto& labels = labels_[&f];
      for (std::size_t pc = 0; pc < f.body.size(); ++pc) {
        if (f.body[pc].op == Op::Label) labels[f.body[pc].name] = pc;
      }
    }
  }

  RunResult run(std::string_view entry, std::span<const std::string> argv) {
    auto it = functions_.find(std::string(entry));
    if (it == functions_.end()) throw RuntimeFault("entry function '" + std::string(entry) + "' not found");

    // argv strings and the pointer array live just above the globals.
    std::vector<std::uint32_t> ptrs;
    for (const auto& a : argv) {
      ptrs.push_back(heap_);
      reserve_heap(a.size() + 1);
      std::memcpy(&mem_[ptrs.back()], a.data(), a.size());
    }
    std::uint32_t argv_addr = heap_;
    reserve_heap(4 * (ptrs.size() + 1));
    for (std::size_t i = 0; i < ptrs.size(); ++i) store32(argv_addr + 4 * i, ptrs[i]);
    stack_limit_ = heap_;

    push(argv_addr);
    push(static_cast<std::uint32_t>(argv.size()));
    enter(*it->second);

    RunResult result;
    try {
      result.exit_code = execute();
    } catch (const Halt& h) {
      result.exit_code = h.code;
    }
    // What a process would report: the low 8 bits.
    result.exit_code &= 0xff;
    result.stdout_text = std::move(out_);
    return result;
  }

 private:
  struct Frame {
    const IrFunction* fn;
    std::size_t pc = 0;
    std::vector<std::int32_t> temps;
    std::uint32_t saved_ebp = 0;
  };

  void reserve_heap(std::uint64_t n) {
    std::uint64_t next = align4(heap_ + n);
    if (next >= mem_.size() / 2) throw RuntimeFault("argv does not fit in simulated memory");
    heap_ = static_cast<std::uint32_t>(next);
  }

  [[noreturn]] void fault(const std::string& what) const {
    if (frames_.empty()) throw RuntimeFault(what);
    const Frame& f = frames_.back();
    throw RuntimeFault("runtime fault in " + f.fn->name + " at instruction #" +
                       std::to_string(f.pc) + ": " + what);
  }

  void check(std::uint32_t addr, std::uint32_t width) const {
    if (addr < kNullGuard || std::uint64_t{addr} + width > mem_.size()) {
      char buf[32];
      std::snprintf(buf, sizeof buf, "0x%08x", addr);
      fault(std::string("out-of-bounds memory access at ") + buf);
    }
  }

  std::uint32_t load32(std::uint32_t addr) const {
    check(addr, 4);
    std::uint32_t v;
    std::memcpy(&v, &mem_[addr], 4);
    return v;
  }
  void store32(std::uint32_t addr, std::uint32_t v) {
    check(addr, 4);
    std::memcpy(&mem_[addr], &v, 4);
  }
  std::uint8_t load8(std::uint32_t addr) const {
    check(addr, 1);
    return mem_[addr];
  }

  void push(std::uint32_t v) {
    esp_ -= 4;
    if (esp_ < stack_limit_) fault("stack overflow");
    store32(esp_, v);
  }

  void enter(const IrFunction& f) {
    push(0);  // return address slot
    push(ebp_);
    Frame fr{&f, 0, std::vector<std::int32_t>(static_cast<std::size_t>(f.temp_count)), ebp_};
    ebp_ = esp_;
    if (esp_ < stack_limit_ + static_cast<std::uint32_t>(f.frame_size)) fault("stack overflow");
    esp_ -= static_cast<std::uint32_t>(f.frame_size);
    // Fresh frames start zeroed so runs stay deterministic.
    std::memset(&mem_[esp_], 0, static_cast<std::size_t>(f.frame_size));
    frames_.push_back(std::move(fr));
  }

  std::int32_t get(const Operand& o) const {
    if (const auto* t = std::get_if<Temp>(&o)) return frames_.back().temps[static_cast<std::size_t>(t->id)];
    if (const auto* c = std::get_if<std::int32_t>(&o)) return *c;
    fault("missing operand");
  }

  void set(int dst, std::int32_t v) {
    if (dst >= 0) frames_.back().temps[static_cast<std::size_t>(dst)] = v;
  }

  static bool compare(Cond c, std::int32_t a, std::int32_t b) {
    auto ua = static_cast<std::uint32_t>(a);
    auto ub = static_cast<std::uint32_t>(b);
    switch (c) {
      case Cond::Eq: return a == b;
      case Cond::Ne: return a != b;
      case Cond::Lt: return a < b;
      case Cond::Le: return a <= b;
      case Cond::Gt: return a > b;
      case Cond::Ge: return a >= b;
      case Cond::LtU: return ua < ub;
      case Cond::LeU: return ua <= ub;
      case Cond::GtU: return ua > ub;
      case Cond::GeU: return ua >= ub;
    }
    return false;
  }

  std::int32_t arith(Op op, std::int32_t a, std::int32_t b) const {
    auto ua = static_cast<std::uint32_t>(a);
    auto ub = static_cast<std::uint32_t>(b);
    switch (op) {
      case Op::Add: return static_cast<std::int32_t>(ua + ub);
      case Op::Sub: return static_cast<std::int32_t>(ua - ub);
      case Op::Mul: return static_cast<std::int32_t>(ua * ub);
      case Op::Div:
      case Op::Mod:
        if (b == 0) fault("division by zero");
        if (a == std::numeric_limits<std::int32_t>::min() && b == -1) fault("division overflow");
        return op == Op::Div ? a / b : a % b;
      case Op::And: return a & b;
      case Op::Or: return a | b;
      case Op::Xor: return a ^ b;
      case Op::Shl: return static_cast<std::int32_t>(ua << (ub & 31));
      case Op::Shr: return a >> (ub & 31);
      default: fault("not an arithmetic op");
    }
  }

  int execute() {
    std::uint64_t steps = 0;
    while (true) {
      Frame& fr = frames_.back();
      if (fr.pc >= fr.fn->body.size()) fault("fell off the end of the function");
      const Instr& in = fr.fn->body[fr.pc];
      if (++steps > opt_.max_steps) fault("step limit exceeded");
      switch (in.op) {
        case Op::Label:
          break;
        case Op::Const:
        case Op::Move:
          set(in.dst, get(in.a));
          break;
        case Op::AddrGlobal: {
          auto it = addr_.find(in.name);
          if (it == addr_.end()) fault("reference to unresolved extern '" + in.name + "'");
          set(in.dst, static_cast<std::int32_t>(it->second));
          break;
        }
        case Op::AddrFrame:
          set(in.dst, static_cast<std::int32_t>(ebp_ + static_cast<std::uint32_t>(in.offset)));
          break;
        case Op::Load: {
          auto addr = static_cast<std::uint32_t>(get(in.a));
          set(in.dst, in.width == 1 ? std::int32_t{load8(addr)}
                                    : static_cast<std::int32_t>(load32(addr)));
          break;
        }
        case Op::Store: {
          auto addr = static_cast<std::uint32_t>(get(in.a));
          std::int32_t v = get(in.b);
          if (in.width == 1) {
            check(addr, 1);
            mem_[addr] = static_cast<std::uint8_t>(v);
          } else {
            store32(addr, static_cast<std::uint32_t>(v));
          }
          break;
        }
        case Op::Add: case Op::Sub: case Op::Mul: case Op::Div: case Op::Mod:
        case Op::And: case Op::Or: case Op::Xor: case Op::Shl: case Op::Shr:
          set(in.dst, arith(in.op, get(in.a), get(in.b)));
          break;
        case Op::Not:
          set(in.dst, ~get(in.a));
          break;
        case Op::Neg:
          set(in.dst, static_cast<std::int32_t>(0u - static_cast<std::uint32_t>(get(in.a))));
          break;
        case Op::Cmp:
          set(in.dst, compare(in.cond, get(in.a), get(in.b)) ? 1 : 0);
          break;
        case Op::Jump:
          fr.pc = labels_[fr.fn].at(in.name);
          continue;
        case Op::BranchIfZero:
          if (get(in.a) == 0) {
            fr.pc = labels_[fr.fn].at(in.name);
            continue;
          }
          break;
        case Op::PushArg:
          push(static_cast<std::uint32_t>(get(in.a)));
          break;
        case Op::Call: {
          auto it = functions_.find(in.name);
          if (it != functions_.end()) {
            enter(*it->second);
            continue;  // pc advances when the callee returns
          }
          std::int32_t r = builtin(in.name);
          set(in.dst, r);
          esp_ += 4u * static_cast<std::uint32_t>(in.arg_count);
          break;
        }
        case Op::Return: {
          std::int32_t v = get(in.a);
          esp_ = ebp_;
          ebp_ = fr.saved_ebp;
          esp_ += 8;
          frames_.pop_back();
          if (frames_.empty()) return v;
          Frame& caller = frames_.back();
          const Instr& call = caller.fn->body[caller.pc];
          set(call.dst, v);
          esp_ += 4u * static_cast<std::uint32_t>(call.arg_count);
          ++caller.pc;
          continue;
        }
      }
      ++frames_.back().pc;
    }
  }

  std::uint32_t arg(int i) const { return load32(esp_ + 4u * static_cast<std::uint32_t>(i)); }

  std::string c_string(std::uint32_t addr) const {
    std::string s;
    while (true) {
      char c = static_cast<char>(load8(addr++));
      if (!c) return s;
      s += c;
    }
  }

  std::int32_t builtin(const std::string& name) {
    if (name == "printf") return printf_builtin();
    if (name == "putchar") {
      char c = static_cast<char>(arg(0));
      out_ += c;
      return static_cast<unsigned char>(c);
    }
    if (name == "getchar") {
      if (in_pos_ >= opt_.stdin_text.size()) return -1;
      return static_cast<unsigned char>(opt_.stdin_text[in_pos_++]);
    }
    if (name == "exit") throw Halt{static_cast<std::int32_t>(arg(0))};
    fault("call to unknown extern '" + name + "'");
  }

  std::int32_t printf_builtin() {
    const std::string fmt = c_string(arg(0));
    int next = 1;
    const std::size_t start = out_.size();
    for (std::size_t i = 0; i < fmt.size(); ++i) {
      if (fmt[i] != '%') {
        out_ += fmt[i];
        continue;
      }
      std::size_t j = i + 1;
      bool left = false;
      bool zero = false;
      for (; j < fmt.size() && (fmt[j] == '-' || fmt[j] == '0'); ++j) {
        (fmt[j] == '-' ? left : zero) = true;
      }
      int width = 0;
      for (; j < fmt.size() && fmt[j] >= '0' && fmt[j] <= '9'; ++j) width = width * 10 + (fmt[j] - '0');
      while (j < fmt.size() && fmt[j] == 'l') ++j;
      if (j >= fmt.size()) {
        out_.append(fmt, i, std::string::npos);
        break;
      }
      std::string piece;
      bool numeric = true;
      switch (fmt[j]) {
        case 'd':
        case 'i': piece = std::to_string(static_cast<std::int32_t>(arg(next++))); break;
        case 'u': piece = std::to_string(arg(next++)); break;
        case 'x':
        case 'X': {
          char buf[16];
          std::snprintf(buf, sizeof buf, fmt[j] == 'x' ? "%x" : "%X", arg(next++));
          piece = buf;
          break;
        }
        case 'c':
          piece = std::string(1, static_cast<char>(arg(next++)));
          numeric = false;
          break;
        case 's':
          piece = c_string(arg(next++));
          numeric = false;
          break;
        case '%':
          out_ += '%';
          i = j;
          continue;
        default:
          out_.append(fmt, i, j - i + 1);
          i = j;
          continue;
      }
      const auto pad = static_cast<std::size_t>(width) > piece.size()
                           ? static_cast<std::size_t>(width) - piece.size() : 0;
      if (left) {
        out_ += piece;
        out_.append(pad, ' ');
      } else if (zero && numeric) {
        std::size_t sign = (!piece.empty() && piece[0] == '-') ? 1 : 0;
        piece.insert(sign, pad, '0');
        out_ += piece;
      } else {
        out_.append(pad, ' ');
        out_ += piece;
      }
      i = j;
    }
    return static_cast<std::int32_t>(out_.size() - start);
  }

  const IrModule& ir_;
  const InterpOptions& opt_;
  std::vector<std::uint8_t> mem_;
  std::map<std::string, std::uint32_t> addr_;
  std::unordered_map<std::string, const IrFunction*> functions_;
  std::unordered_map<const IrFunction*, std::unordered_map<std::string, std::size_t>> labels_;
  std::vector<Frame> frames_;
  std::uint32_t esp_ = 0;
  std::uint32_t ebp_ = 0;
  std::uint32_t heap_ = 0;
  std::uint32_t stack_limit_ = 0;
  std::string out_;
  std::size_t in_pos_ = 0;
};

}  // namespace

RunResult interpret(const IrModule& ir, std::string_view entry, std::span<const std::string> argv,
                    const InterpOptions& options) {
  return Machine(ir, options).run(entry, argv);
}

}  // namespace uplnc::ir
