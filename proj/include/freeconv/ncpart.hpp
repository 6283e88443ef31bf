#pragma once

#include <functional>
#include <optional>
#include <vector>

#include "freeconv/scalar.hpp"

namespace freeconv {

// A non-crossing partition of {1..n}.  Blocks are stored canonically:
// ordered by minimum element, elements ascending.  n = 0 is the empty
// partition (the lattice conventions 0_0 = 1_0 = {} and 0_1 = 1_1 = {{1}}
// are needed by degenerate cumulant orders).
class NCPartition {
  public:
    NCPartition() : n_(0) {}
    static NCPartition discrete(int n);  // 0_n
    static NCPartition full(int n);      // 1_n
    static NCPartition from_blocks(int n, std::vector<std::vector<int>> blocks);

    int n() const { return n_; }
    int block_count() const { return int(blocks_.size()); }
    const std::vector<std::vector<int>>& blocks() const { return blocks_; }
    int block_of(int element) const { return block_index_[element - 1]; }

    // this <= other in the fineness order (every block of this lies inside a
    // block of other).  Throws on mismatched ground sets.
    bool refines(const NCPartition& other) const;

    bool operator==(const NCPartition& o) const { return n_ == o.n_ && blocks_ == o.blocks_; }
    bool operator!=(const NCPartition& o) const { return !(*this == o); }
    bool operator<(const NCPartition& o) const;

    std::string str() const;  // {{1,3},{2},{4}}

  private:
    int n_;
    std::vector<std::vector<int>> blocks_;
    std::vector<int> block_index_;  // element-1 -> block position
    void build_index();
    friend NCPartition merge_blocks(const NCPartition&, const std::vector<int>&);
};

// All of NC(n) in lexicographic order on the canonical block encoding.
// Materialized once per n and cached; bound guards the exponential size.
const std::vector<NCPartition>& nc_all(int n, int bound = 14);

unsigned long long catalan(int n);

// |NC2(2n)| by explicit pairing enumeration (equals catalan(n)).
unsigned long long nc2_count(int n);

// Moebius function of (NC(n), <=) by the defining recursion, memoized.
Rational mobius(const NCPartition& sigma, const NCPartition& pi);

// Kreweras complement K_pi(sigma) for sigma <= pi; one-argument form is
// K(sigma) = K_{1_n}(sigma).
NCPartition kreweras(const NCPartition& sigma, const NCPartition& pi);
NCPartition kreweras(const NCPartition& sigma);

enum class ChainKind { multi, chain, simple, increasing };

struct Chain {
    int n = 0;
    std::vector<NCPartition> steps;  // pi_0 <= pi_1 <= ... <= pi_l
    ChainKind kind = ChainKind::multi;

    int length() const { return int(steps.size()) - 1; }
    bool kind_ok() const;  // recompute each K_{pi_i}(pi_{i-1}) block profile
};

struct ChainQuery {
    int n = 0;
    ChainKind kind = ChainKind::chain;
    std::optional<NCPartition> start;   // free when absent
    std::optional<NCPartition> end;     // free when absent
    std::optional<int> length;          // required for kind = multi
};

// Yields all chains matching the query; the callback may return false to
// stop early.  Chains of length 0 are included when start and end permit.
void for_each_chain(const ChainQuery& q, const std::function<bool(const Chain&)>& fn);

// Partitions coarser than sigma (sigma itself included).
std::vector<NCPartition> coarsenings(const NCPartition& sigma);

// One-step data for walking simple chains: the coarsening obtained by
// gluing a set of blocks of sigma, together with the single non-singleton
// block of K_pi(sigma) (ascending ground-set positions).
struct SimpleStep {
    NCPartition pi;
    std::vector<int> kernel_block;
};

// All simple-chain successors of sigma whose kernel block has size in
// [2, max_block]; increasing steps are exactly max_block = 2.
std::vector<SimpleStep> simple_successors(const NCPartition& sigma, int max_block);

}  // namespace freeconv
