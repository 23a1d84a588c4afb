#pragma once

#include <array>
#include <cstdint>
#include <functional>
#include <string>
#include <vector>

namespace rectfree::nc {

// Set partition of {1..n}, stored as a block label per element.
// Blocks are numbered in order of their minima.
class Partition {
 public:
  static constexpr int kMaxSize = 32;

  Partition() = default;
  // `blocks` lists 1-based elements; must cover {1..n} exactly once.
  Partition(int n, const std::vector<std::vector<int>>& blocks);
  static Partition from_labels(int n, const std::uint8_t* labels);

  int size() const noexcept { return n_; }
  int block_count() const noexcept { return count_; }
  // Block index of 1-based element i.
  int block_of(int i) const { return label_[i - 1]; }
  std::vector<std::vector<int>> blocks() const;
  bool is_noncrossing() const;
  bool is_pairing() const;
  bool all_blocks_even() const;

  // Canonical order: block-min sequences lexicographically, then block contents.
  bool canonical_less(const Partition& other) const;
  bool operator==(const Partition& other) const;

 private:
  std::uint8_t n_ = 0;
  std::uint8_t count_ = 0;
  std::array<std::uint8_t, kMaxSize> label_{};
};

struct ParityStats {
  int even_min = 0;  // e: blocks whose minimum is even
  int odd_min = 0;   // o: blocks whose minimum is odd
};

enum class BlockRule { Any, Even, Pairs };

// Visits every noncrossing partition of {1..n} obeying `rule`, in generation order.
void for_each_nc(int n, BlockRule rule, const std::function<void(const Partition&)>& visit);
// Visits every set partition of {1..n}.
void for_each_partition(int n, const std::function<void(const Partition&)>& visit);

std::vector<Partition> enumerate_nc(int n);           // 1 <= n <= 16
std::vector<Partition> enumerate_nc_even(int n);      // n even, 2 <= n <= 16
std::vector<Partition> enumerate_nc_pairings(int n);  // n even, 2 <= n <= 24

ParityStats min_parity_stats(const Partition& p);

// Bijection NC(n) -> noncrossing pairings of [2n] with x_i -> (y_i, z_i) = (2i-1, 2i).
Partition nc_to_pairing(const Partition& p);

// cumulants[k-1] = c_{2k}; returns m_2, m_4, ..., m_{2K} for K <= 8.
std::vector<double> moments_from_rect_cumulants(double lambda, const std::vector<double>& cumulants);
// moments[k-1] = m_{2k}; returns c_2, ..., c_{2K} for K <= 8.
std::vector<double> rect_cumulants_from_moments(double lambda, const std::vector<double>& moments);

// cumulants[k-1] = c*_k; returns m_1..m_K for K <= 10.
std::vector<double> classical_moments_from_cumulants(const std::vector<double>& cumulants);
std::vector<double> classical_cumulants_from_moments(const std::vector<double>& moments);

// Sum over noncrossing pairings of [2n] of a^{o(pi)}; 1 <= n <= 12.
double mp_moment(double a, int n);

std::string blocks_string(const Partition& p);
// CSV with header n,partition_id,blocks,e,o.
std::string partitions_csv(const std::vector<Partition>& parts);

}  // namespace rectfree::nc
