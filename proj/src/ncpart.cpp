#include "freeconv/ncpart.hpp"

#include <algorithm>
#include <map>
#include <mutex>

#include "freeconv/errors.hpp"

namespace freeconv {

namespace {

bool blocks_noncrossing(const std::vector<std::vector<int>>& blocks) {
    // Two blocks cross iff their merged order alternates at least 3 times.
    for (size_t a = 0; a + 1 < blocks.size(); ++a)
        for (size_t b = a + 1; b < blocks.size(); ++b) {
            const auto &A = blocks[a], &B = blocks[b];
            size_t i = 0, j = 0;
            int switches = -1, last = -1;
            while (i < A.size() || j < B.size()) {
                int who;
                if (j == B.size() || (i < A.size() && A[i] < B[j])) {
                    who = 0;
                    ++i;
                } else {
                    who = 1;
                    ++j;
                }
                if (who != last) {
                    ++switches;
                    last = who;
                }
            }
            if (switches >= 3) return false;
        }
    return true;
}

void sort_canonical(std::vector<std::vector<int>>& blocks) {
    for (auto& b : blocks) std::sort(b.begin(), b.end());
    std::sort(blocks.begin(), blocks.end(),
              [](const auto& x, const auto& y) { return x.front() < y.front(); });
}

}  // namespace

void NCPartition::build_index() {
    block_index_.assign(n_, -1);
    for (size_t b = 0; b < blocks_.size(); ++b)
        for (int e : blocks_[b]) block_index_[e - 1] = int(b);
}

NCPartition NCPartition::discrete(int n) {
    NCPartition p;
    p.n_ = n;
    for (int i = 1; i <= n; ++i) p.blocks_.push_back({i});
    p.build_index();
    return p;
}

NCPartition NCPartition::full(int n) {
    NCPartition p;
    p.n_ = n;
    if (n > 0) {
        p.blocks_.emplace_back();
        for (int i = 1; i <= n; ++i) p.blocks_[0].push_back(i);
    }
    p.build_index();
    return p;
}

NCPartition NCPartition::from_blocks(int n, std::vector<std::vector<int>> blocks) {
    std::erase_if(blocks, [](const auto& b) { return b.empty(); });
    sort_canonical(blocks);
    std::vector<char> seen(n, 0);
    int count = 0;
    for (const auto& b : blocks)
        for (int e : b) {
            if (e < 1 || e > n || seen[e - 1])
                throw argument_error("blocks do not partition {1.." + std::to_string(n) + "}");
            seen[e - 1] = 1;
            ++count;
        }
    if (count != n) throw argument_error("blocks do not cover {1.." + std::to_string(n) + "}");
    if (!blocks_noncrossing(blocks)) throw argument_error("partition has a crossing");
    NCPartition p;
    p.n_ = n;
    p.blocks_ = std::move(blocks);
    p.build_index();
    return p;
}

bool NCPartition::refines(const NCPartition& other) const {
    if (n_ != other.n_) throw argument_error("ground-set size mismatch");
    for (const auto& b : blocks_) {
        int target = other.block_index_[b.front() - 1];
        for (int e : b)
            if (other.block_index_[e - 1] != target) return false;
    }
    return true;
}

bool NCPartition::operator<(const NCPartition& o) const {
    if (n_ != o.n_) return n_ < o.n_;
    return blocks_ < o.blocks_;
}

std::string NCPartition::str() const {
    std::string s = "{";
    for (size_t b = 0; b < blocks_.size(); ++b) {
        s += "{";
        for (size_t i = 0; i < blocks_[b].size(); ++i) {
            if (i) s += ",";
            s += std::to_string(blocks_[b][i]);
        }
        s += "}";
        if (b + 1 < blocks_.size()) s += ",";
    }
    return s + "}";
}

namespace {

// Pruned DFS over set partitions built element by element.  Element l may
// join block B' iff no other block has elements on both sides of some member
// of B'; since l is the current maximum this is exactly: B' has no element
// strictly inside the span of another block.
void nc_generate(int n, int next, std::vector<std::vector<int>>& blocks,
                 std::vector<NCPartition>& out) {
    if (next > n) {
        auto copy = blocks;
        NCPartition p = NCPartition::from_blocks(n, std::move(copy));
        out.push_back(std::move(p));
        return;
    }
    for (size_t cand = 0; cand < blocks.size(); ++cand) {
        bool ok = true;
        for (size_t other = 0; other < blocks.size() && ok; ++other) {
            if (other == cand) continue;
            int lo = blocks[other].front(), hi = blocks[other].back();
            for (int e : blocks[cand])
                if (e > lo && e < hi) {
                    ok = false;
                    break;
                }
        }
        if (!ok) continue;
        blocks[cand].push_back(next);
        nc_generate(n, next + 1, blocks, out);
        blocks[cand].pop_back();
    }
    blocks.push_back({next});
    nc_generate(n, next + 1, blocks, out);
    blocks.pop_back();
}

std::map<int, std::vector<NCPartition>> nc_cache;
std::mutex nc_mutex;

}  // namespace

const std::vector<NCPartition>& nc_all(int n, int bound) {
    if (n < 0) throw argument_error("negative ground-set size");
    if (n > bound)
        throw capacity_error("NC(" + std::to_string(n) + ") exceeds the enumeration bound " +
                             std::to_string(bound));
    std::lock_guard lock(nc_mutex);
    auto it = nc_cache.find(n);
    if (it != nc_cache.end()) return it->second;
    std::vector<NCPartition> out;
    std::vector<std::vector<int>> blocks;
    nc_generate(n, 1, blocks, out);
    std::sort(out.begin(), out.end());
    return nc_cache.emplace(n, std::move(out)).first->second;
}

unsigned long long catalan(int n) {
    if (n < 0) throw argument_error("catalan of negative index");
    if (n > 33) throw capacity_error("catalan overflow guard");
    unsigned long long c = 1;
    for (int i = 0; i < n; ++i) c = c * 2 * (2 * i + 1) / (i + 2);
    return c;
}

namespace {
unsigned long long pairings(std::vector<char>& used, std::vector<std::pair<int, int>>& pairs,
                            int n2) {
    int first = -1;
    for (int i = 0; i < n2; ++i)
        if (!used[i]) {
            first = i;
            break;
        }
    if (first < 0) return 1;
    unsigned long long total = 0;
    for (int j = first + 1; j < n2; ++j) {
        if (used[j]) continue;
        bool crossing = false;
        for (auto [a, b] : pairs) {
            bool a_in = first < a && a < j, b_in = first < b && b < j;
            if (a_in != b_in) {
                crossing = true;
                break;
            }
        }
        if (crossing) continue;
        used[first] = used[j] = 1;
        pairs.emplace_back(first, j);
        total += pairings(used, pairs, n2);
        pairs.pop_back();
        used[first] = used[j] = 0;
    }
    return total;
}
}  // namespace

unsigned long long nc2_count(int n) {
    if (n < 0) throw argument_error("negative index");
    std::vector<char> used(2 * n, 0);
    std::vector<std::pair<int, int>> pairs;
    return pairings(used, pairs, 2 * n);
}

namespace {
std::map<std::pair<NCPartition, NCPartition>, Rational> mobius_memo;
std::mutex mobius_mutex;
}  // namespace

Rational mobius(const NCPartition& sigma, const NCPartition& pi) {
    if (!sigma.refines(pi)) throw argument_error("mobius requires sigma <= pi");
    if (sigma == pi) return Rational(1);
    {
        std::lock_guard lock(mobius_mutex);
        auto it = mobius_memo.find({sigma, pi});
        if (it != mobius_memo.end()) return it->second;
    }
    Rational acc(0);
    for (const auto& rho : nc_all(sigma.n())) {
        if (rho == sigma) continue;
        if (sigma.refines(rho) && rho.refines(pi)) acc += mobius(rho, pi);
    }
    Rational value = -acc;
    std::lock_guard lock(mobius_mutex);
    mobius_memo.emplace(std::make_pair(sigma, pi), value);
    return value;
}

NCPartition kreweras(const NCPartition& sigma) {
    // K(sigma) via the permutation model: blocks of K(sigma) are the cycles
    // of sigma^{-1} c, with c the long cycle (1 2 ... n) and sigma the
    // permutation cycling each block in increasing order.
    int n = sigma.n();
    if (n == 0) return sigma;
    std::vector<int> inv(n + 1, 0);  // sigma^{-1}
    for (const auto& b : sigma.blocks())
        for (size_t i = 0; i < b.size(); ++i) {
            int from = b[i], to = b[(i + 1) % b.size()];
            inv[to] = from;
        }
    std::vector<char> seen(n + 1, 0);
    std::vector<std::vector<int>> blocks;
    for (int s = 1; s <= n; ++s) {
        if (seen[s]) continue;
        std::vector<int> cyc;
        int x = s;
        while (!seen[x]) {
            seen[x] = 1;
            cyc.push_back(x);
            x = inv[x % n + 1];
        }
        blocks.push_back(std::move(cyc));
    }
    return NCPartition::from_blocks(n, std::move(blocks));
}

NCPartition kreweras(const NCPartition& sigma, const NCPartition& pi) {
    if (!sigma.refines(pi)) throw argument_error("kreweras requires sigma <= pi");
    // Relative complement: complement sigma|V inside each block V of pi.
    std::vector<std::vector<int>> blocks;
    for (const auto& V : pi.blocks()) {
        std::vector<int> pos(sigma.n() + 1, 0);
        for (size_t i = 0; i < V.size(); ++i) pos[V[i]] = int(i) + 1;
        // restrict sigma to V and relabel to 1..|V|
        std::map<int, std::vector<int>> parts;
        for (int e : V) parts[sigma.block_of(e)].push_back(pos[e]);
        std::vector<std::vector<int>> local;
        for (auto& [k, v] : parts) local.push_back(std::move(v));
        NCPartition restricted = NCPartition::from_blocks(int(V.size()), std::move(local));
        NCPartition complemented = kreweras(restricted);
        for (const auto& lb : complemented.blocks()) {
            std::vector<int> global;
            for (int e : lb) global.push_back(V[e - 1]);
            blocks.push_back(std::move(global));
        }
    }
    return NCPartition::from_blocks(sigma.n(), std::move(blocks));
}

std::vector<NCPartition> coarsenings(const NCPartition& sigma) {
    std::vector<NCPartition> out;
    for (const auto& pi : nc_all(sigma.n()))
        if (sigma.refines(pi)) out.push_back(pi);
    return out;
}

namespace {
std::optional<NCPartition> try_merge(const NCPartition& sigma, const std::vector<int>& which) {
    std::vector<std::vector<int>> blocks;
    std::vector<int> merged;
    std::vector<char> pick(sigma.block_count(), 0);
    for (int w : which) pick[w] = 1;
    for (int b = 0; b < sigma.block_count(); ++b) {
        if (pick[b])
            merged.insert(merged.end(), sigma.blocks()[b].begin(), sigma.blocks()[b].end());
        else
            blocks.push_back(sigma.blocks()[b]);
    }
    std::sort(merged.begin(), merged.end());
    blocks.push_back(std::move(merged));
    sort_canonical(blocks);
    if (!blocks_noncrossing(blocks)) return std::nullopt;
    return NCPartition::from_blocks(sigma.n(), std::move(blocks));
}

// kernel profile: returns the non-singleton blocks of K_pi(sigma)
std::vector<std::vector<int>> kernel_fat_blocks(const NCPartition& sigma, const NCPartition& pi) {
    std::vector<std::vector<int>> fat;
    NCPartition kernel = kreweras(sigma, pi);
    for (const auto& b : kernel.blocks())
        if (b.size() >= 2) fat.push_back(b);
    return fat;
}
}  // namespace

std::vector<SimpleStep> simple_successors(const NCPartition& sigma, int max_block) {
    std::vector<SimpleStep> out;
    int m = sigma.block_count();
    int cap = std::min(max_block, m);
    // choose k >= 2 blocks to glue
    std::vector<int> pick;
    std::function<void(int, int)> choose = [&](int from, int k) {
        if (k == 0) {
            auto merged = try_merge(sigma, pick);
            if (!merged) return;
            auto fat = kernel_fat_blocks(sigma, *merged);
            if (fat.size() == 1) out.push_back({*merged, fat[0]});
            return;
        }
        for (int i = from; i + k <= m + 0; ++i) {
            pick.push_back(i);
            choose(i + 1, k - 1);
            pick.pop_back();
        }
    };
    for (int k = 2; k <= cap; ++k) choose(0, k);
    return out;
}

bool Chain::kind_ok() const {
    if (steps.empty()) return false;
    for (size_t i = 1; i < steps.size(); ++i)
        if (!steps[i - 1].refines(steps[i])) return false;
    if (kind == ChainKind::multi) return true;
    for (size_t i = 1; i < steps.size(); ++i) {
        if (steps[i - 1] == steps[i]) return false;
        if (kind == ChainKind::chain) continue;
        auto fat = kernel_fat_blocks(steps[i - 1], steps[i]);
        if (fat.size() != 1) return false;
        if (kind == ChainKind::increasing && fat[0].size() != 2) return false;
    }
    return true;
}

namespace {
void chain_dfs(const ChainQuery& q, Chain& cur, const std::function<bool(const Chain&)>& fn,
               bool& keep_going) {
    if (!keep_going) return;
    const NCPartition& tip = cur.steps.back();
    bool end_ok = !q.end || tip == *q.end;
    bool len_ok = !q.length || cur.length() == *q.length;
    if (end_ok && len_ok)
        if (!fn(cur)) {
            keep_going = false;
            return;
        }
    if (q.length && cur.length() >= *q.length) return;
    if (q.kind == ChainKind::multi || q.kind == ChainKind::chain) {
        for (const auto& pi : coarsenings(tip)) {
            if (q.kind == ChainKind::chain && pi == tip) continue;
            cur.steps.push_back(pi);
            chain_dfs(q, cur, fn, keep_going);
            cur.steps.pop_back();
            if (!keep_going) return;
        }
    } else {
        int cap = q.kind == ChainKind::increasing ? 2 : tip.n();
        for (auto& step : simple_successors(tip, cap)) {
            if (q.kind == ChainKind::increasing && step.kernel_block.size() != 2) continue;
            cur.steps.push_back(step.pi);
            chain_dfs(q, cur, fn, keep_going);
            cur.steps.pop_back();
            if (!keep_going) return;
        }
    }
}
}  // namespace

void for_each_chain(const ChainQuery& q, const std::function<bool(const Chain&)>& fn) {
    if (q.kind == ChainKind::multi && !q.length)
        throw argument_error("multi-chain enumeration requires a length");
    if (q.start && q.end && !q.start->refines(*q.end))
        throw argument_error("chain start must refine the end");
    bool keep_going = true;
    std::vector<NCPartition> starts;
    if (q.start)
        starts.push_back(*q.start);
    else
        for (const auto& p : nc_all(q.n)) starts.push_back(p);
    for (const auto& s : starts) {
        Chain cur;
        cur.n = q.n;
        cur.kind = q.kind;
        cur.steps = {s};
        chain_dfs(q, cur, fn, keep_going);
        if (!keep_going) break;
    }
}

}  // namespace freeconv
