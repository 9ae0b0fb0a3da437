#pragma once
// Two-weight Hardy-operator machinery on finite trees: the exact best
// constant of the embedding  sum_a (If(a))^2 w(a) <= C^2 sum f^2 v,  the
// testing-style tree condition it is equivalent to, and the nu-averaging
// maximal operator with its two-measure inequality check.

#include <cstdint>
#include <functional>
#include <vector>

#include "carleson/report.hpp"
#include "carleson/tree.hpp"

namespace carleson {

inline constexpr std::size_t kDenseNodeCap = 2000;

struct EmbeddingNorm {
  double norm2 = 0.0;    // best C^2
  bool infinite = false; // some v=0 node carries positive w above it
  NodeId bad_node = kNoNode;
};

// Largest singular value (squared) of M[a,b] = 1{b <= a} sqrt(w(a)/v(b)).
// Dense eigensolve; refuses trees larger than kDenseNodeCap by throwing
// std::length_error (the CLI maps that to the resource exit code).
EmbeddingNorm two_weight_embedding_norm(const Tree& t,
                                        const std::vector<double>& w,
                                        const std::vector<double>& v);

// sup over alpha with I*w(alpha) > 0 of
//   sum_{b >= alpha} (I*w(b))^2 / v(b)   /   I*w(alpha),
// with 0/0 terms skipped; +infinity when v(b)=0 meets I*w(b)>0.
ConditionReport two_weight_tree_condition(const Tree& t,
                                          const std::vector<double>& w,
                                          const std::vector<double>& v);

// M f(z) = max over ancestors a <= z with positive nu-leafmass of the
// nu-average of |f| over the leaves below a. f and nu live on leaves
// (interior entries are ignored for nu; f is only read at leaves).
std::vector<double> maximal_operator(const Tree& t,
                                     const std::vector<double>& nu,
                                     const std::vector<double>& f);

struct MaximalCheck {
  double ratio_constant = 0.0;   // (a): sup_a |S*(a)|_sigma / |S*(a)|_nu
  bool ratio_infinite = false;
  NodeId ratio_witness = kNoNode;
  double empirical_constant = 0.0;  // (b): best over trials of
                                    // sum sigma (Mf)^2 / sum nu f^2
  std::uint64_t seed = 0;
  int trials = 0;
};

// Randomized lower estimate of the L^2(nu) -> L^2(sigma) constant of M,
// together with the exact leaf-set mass-ratio constant.
MaximalCheck maximal_inequality_check(const Tree& t,
                                      const std::vector<double>& sigma,
                                      const std::vector<double>& nu,
                                      int trials, std::uint64_t seed);

}  // namespace carleson
