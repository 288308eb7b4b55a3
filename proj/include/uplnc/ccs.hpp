#pragma once

#include <cstdint>
#include <functional>
#include <span>
#include <string>
#include <string_view>

// Combinatoric control statements: sums over monotone index vectors
// 1 <= i_1 <= i_2 <= ... <= i_k <= N whose depth k is a runtime value.
namespace uplnc::ccs {

// Receives i_1..i_k (values[0] is i_1).
using Summand = std::function<std::int64_t(std::span<const int> values)>;

struct CcsSpec {
  int k = 0;
  int n = 1;
  Summand summand;
};

// Iterative odometer over all monotone vectors. The innermost index i_1
// moves fastest and the outermost i_k slowest, the order of the nested
// loops `for(i[k-1]=1;i[k-1]<=N;...) for(i[k-2]=1;i[k-2]<=i[k-1];...)`.
// k = 0 calls the summand once on the empty vector. Throws
// std::invalid_argument for k < 0 or N < 1.
std::int64_t monotone_nested_sum(const CcsSpec& spec);

// C(N+k-1, k): the number of monotone vectors.
std::int64_t multiset_count(int k, int n);

// A complete UPLNC program: global `i` (k ints) and `R`, k nested loops with
// the monotone bounds, `body_template` as the innermost statement
// (referring to indices as i[0]..i[k-1] and accumulating into R), then
// main prints R and returns 0. Throws std::invalid_argument for bad k/N or
// a template index >= k.
std::string generate_ccs_source(int k, int n, std::string_view body_template);

}  // namespace uplnc::ccs
