#include "uplnc/ccs.hpp"

#include <stdexcept>
#include <vector>

namespace uplnc::ccs {

namespace {

void check_bounds(int k, int n) {
  if (k < 0) throw std::invalid_argument("index count k must be >= 0, got " + std::to_string(k));
  if (n < 1) throw std::invalid_argument("upper bound N must be >= 1, got " + std::to_string(n));
}

bool is_word_char(char c) {
  return (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') || (c >= '0' && c <= '9') || c == '_';
}

}  // namespace

std::int64_t monotone_nested_sum(const CcsSpec& spec) {
  check_bounds(spec.k, spec.n);
  if (!spec.summand) throw std::invalid_argument("summand is empty");
  const auto k = static_cast<std::size_t>(spec.k);
  std::vector<int> idx(k, 1);
  std::int64_t total = 0;
  while (true) {
    total += spec.summand(idx);
    // Advance: bump the lowest index that may still grow; every index
    // below it restarts at 1.
    std::size_t j = 0;
    while (j < k) {
      const int bound = (j + 1 < k) ? idx[j + 1] : spec.n;
      if (idx[j] < bound) break;
      idx[j] = 1;
      ++j;
    }
    if (j == k) return total;
    ++idx[j];
  }
}

std::int64_t multiset_count(int k, int n) {
  check_bounds(k, n);
  // C(n+k-1, k) computed incrementally; each partial product is exact.
  std::int64_t c = 1;
  for (int i = 1; i <= k; ++i) c = c * (n - 1 + i) / i;
  return c;
}

std::string generate_ccs_source(int k, int n, std::string_view body_template) {
  check_bounds(k, n);
  // Reject references i[m] with m >= k.
  for (std::size_t p = body_template.find("i["); p != std::string_view::npos;
       p = body_template.find("i[", p + 1)) {
    if (p > 0 && is_word_char(body_template[p - 1])) continue;
    std::size_t q = p + 2;
    long index = 0;
    bool digits = false;
    while (q < body_template.size() && body_template[q] >= '0' && body_template[q] <= '9') {
      index = index * 10 + (body_template[q] - '0');
      digits = true;
      ++q;
      if (index > 1'000'000) break;
    }
    if (digits && q < body_template.size() && body_template[q] == ']' && index >= k) {
      throw std::invalid_argument("template refers to i[" + std::to_string(index) +
                                  "] but only " + std::to_string(k) + " indices exist");
    }
  }

  const std::string bound = std::to_string(n);
  std::string s;
  s += "/* sum over 1<=i[0]<=...<=i[k-1]<=N, k=" + std::to_string(k) + " N=" + bound + " */\n";
  s += "var i:[" + std::to_string(k > 0 ? k : 1) + "]int;\n";
  s += "var R:int;\n\n";
  s += "proc main()\n{\n";
  std::string indent = "  ";
  for (int j = k - 1; j >= 0; --j) {
    const std::string ij = "i[" + std::to_string(j) + "]";
    const std::string limit = (j == k - 1) ? bound : "i[" + std::to_string(j + 1) + "]";
    s += indent + "for(" + ij + "=1;" + ij + "<=" + limit + ";++" + ij + ")\n";
    indent += " ";
  }
  s += indent + std::string(body_template) + "\n";
  s += "  printf(\"%d\\n\",R);\n";
  s += "  return 0;\n}\n";
  return s;
}

}  // namespace uplnc::ccs
