#include "rectfree/nc.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <string>

#include "rectfree/error.hpp"

namespace rectfree::nc {

namespace {

void require(bool ok, const std::string& what) {
  if (!ok) throw ValidationError(what);
}

std::vector<int> canonical_key(const Partition& p) {
  auto blocks = p.blocks();
  std::vector<int> key;
  key.reserve(2 * p.size() + p.block_count() + 1);
  for (const auto& b : blocks) key.push_back(b.front());
  key.push_back(0);
  for (const auto& b : blocks) {
    key.insert(key.end(), b.begin(), b.end());
    key.push_back(0);
  }
  return key;
}

// Noncrossing generation with a stack of blocks that may still grow. Joining a block
// closes every block opened after it; closed blocks are checked against the rule.
class NcGenerator {
 public:
  NcGenerator(int n, BlockRule rule, const std::function<void(const Partition&)>& visit)
      : n_(n), rule_(rule), visit_(visit) {}

  void run() { step(0); }

 private:
  bool closed_ok(int block) const {
    switch (rule_) {
      case BlockRule::Any:
        return true;
      case BlockRule::Even:
        return size_[block] % 2 == 0;
      case BlockRule::Pairs:
        return size_[block] == 2;
    }
    return true;
  }

  void step(int i) {
    if (i == n_) {
      for (int b : stack_)
        if (!closed_ok(b)) return;
      visit_(Partition::from_labels(n_, labels_.data()));
      return;
    }
    for (std::size_t k = 0; k < stack_.size(); ++k) {
      int b = stack_[k];
      if (rule_ == BlockRule::Pairs && size_[b] != 1) continue;
      bool ok = true;
      for (std::size_t j = k + 1; j < stack_.size() && ok; ++j) ok = closed_ok(stack_[j]);
      if (!ok) continue;
      std::vector<int> saved(stack_.begin() + static_cast<long>(k) + 1, stack_.end());
      stack_.resize(k + 1);
      labels_[i] = static_cast<std::uint8_t>(b);
      ++size_[b];
      step(i + 1);
      --size_[b];
      stack_.insert(stack_.end(), saved.begin(), saved.end());
    }
    int b = count_++;
    size_[b] = 1;
    labels_[i] = static_cast<std::uint8_t>(b);
    stack_.push_back(b);
    step(i + 1);
    stack_.pop_back();
    --count_;
  }

  int n_;
  BlockRule rule_;
  const std::function<void(const Partition&)>& visit_;
  std::array<std::uint8_t, Partition::kMaxSize> labels_{};
  std::array<int, Partition::kMaxSize> size_{};
  std::vector<int> stack_;
  int count_ = 0;
};

void all_partitions(int n, int i, int count, std::array<std::uint8_t, Partition::kMaxSize>& labels,
                    const std::function<void(const Partition&)>& visit) {
  if (i == n) {
    visit(Partition::from_labels(n, labels.data()));
    return;
  }
  for (int b = 0; b <= count; ++b) {
    labels[i] = static_cast<std::uint8_t>(b);
    all_partitions(n, i + 1, b == count ? count + 1 : count, labels, visit);
  }
}

std::vector<Partition> collect_sorted(int n, BlockRule rule) {
  std::vector<Partition> out;
  for_each_nc(n, rule, [&](const Partition& p) { out.push_back(p); });
  std::vector<std::pair<std::vector<int>, std::size_t>> keyed;
  keyed.reserve(out.size());
  for (std::size_t i = 0; i < out.size(); ++i) keyed.emplace_back(canonical_key(out[i]), i);
  std::sort(keyed.begin(), keyed.end());
  std::vector<Partition> sorted;
  sorted.reserve(out.size());
  for (const auto& k : keyed) sorted.push_back(out[k.second]);
  return sorted;
}

}  // namespace

Partition::Partition(int n, const std::vector<std::vector<int>>& blocks) {
  require(n >= 1 && n <= kMaxSize, "partition size out of range");
  std::vector<std::vector<int>> sorted = blocks;
  std::vector<int> seen(n + 1, 0);
  for (auto& b : sorted) {
    require(!b.empty(), "empty block");
    std::sort(b.begin(), b.end());
    for (int e : b) {
      require(e >= 1 && e <= n, "block element out of range");
      require(seen[e]++ == 0, "element appears twice");
    }
  }
  for (int e = 1; e <= n; ++e) require(seen[e] == 1, "partition does not cover every element");
  std::sort(sorted.begin(), sorted.end(), [](const auto& a, const auto& b) { return a.front() < b.front(); });
  n_ = static_cast<std::uint8_t>(n);
  count_ = static_cast<std::uint8_t>(sorted.size());
  for (std::size_t b = 0; b < sorted.size(); ++b)
    for (int e : sorted[b]) label_[e - 1] = static_cast<std::uint8_t>(b);
}

Partition Partition::from_labels(int n, const std::uint8_t* labels) {
  Partition p;
  p.n_ = static_cast<std::uint8_t>(n);
  int count = 0;
  for (int i = 0; i < n; ++i) {
    p.label_[i] = labels[i];
    count = std::max(count, labels[i] + 1);
  }
  p.count_ = static_cast<std::uint8_t>(count);
  return p;
}

std::vector<std::vector<int>> Partition::blocks() const {
  std::vector<std::vector<int>> out(count_);
  for (int i = 0; i < n_; ++i) out[label_[i]].push_back(i + 1);
  return out;
}

bool Partition::is_noncrossing() const {
  std::vector<int> lo(count_, n_);
  std::vector<int> hi(count_, -1);
  for (int i = 0; i < n_; ++i) {
    lo[label_[i]] = std::min(lo[label_[i]], i);
    hi[label_[i]] = std::max(hi[label_[i]], i);
  }
  std::vector<int> last(count_, -1);
  for (int c = 0; c < n_; ++c) {
    int a = last[label_[c]];
    last[label_[c]] = c;
    if (a < 0) continue;
    for (int b = a + 1; b < c; ++b) {
      int other = label_[b];
      if (other != label_[c] && (lo[other] < a || hi[other] > c)) return false;
    }
  }
  return true;
}

bool Partition::is_pairing() const {
  std::vector<int> size(count_, 0);
  for (int i = 0; i < n_; ++i) ++size[label_[i]];
  return std::all_of(size.begin(), size.end(), [](int s) { return s == 2; });
}

bool Partition::all_blocks_even() const {
  std::vector<int> size(count_, 0);
  for (int i = 0; i < n_; ++i) ++size[label_[i]];
  return std::all_of(size.begin(), size.end(), [](int s) { return s % 2 == 0; });
}

bool Partition::canonical_less(const Partition& other) const {
  return canonical_key(*this) < canonical_key(other);
}

bool Partition::operator==(const Partition& other) const {
  return n_ == other.n_ && std::equal(label_.begin(), label_.begin() + n_, other.label_.begin());
}

void for_each_nc(int n, BlockRule rule, const std::function<void(const Partition&)>& visit) {
  require(n >= 1 && n <= Partition::kMaxSize, "partition size out of range");
  NcGenerator(n, rule, visit).run();
}

void for_each_partition(int n, const std::function<void(const Partition&)>& visit) {
  require(n >= 1 && n <= Partition::kMaxSize, "partition size out of range");
  std::array<std::uint8_t, Partition::kMaxSize> labels{};
  all_partitions(n, 0, 0, labels, visit);
}

std::vector<Partition> enumerate_nc(int n) {
  require(n >= 1 && n <= 16, "enumerate_nc needs 1 <= n <= 16");
  return collect_sorted(n, BlockRule::Any);
}

std::vector<Partition> enumerate_nc_even(int n) {
  require(n >= 2 && n <= 16 && n % 2 == 0, "enumerate_nc_even needs even n in [2, 16]");
  return collect_sorted(n, BlockRule::Even);
}

std::vector<Partition> enumerate_nc_pairings(int n) {
  require(n >= 2 && n <= 24 && n % 2 == 0, "enumerate_nc_pairings needs even n in [2, 24]");
  return collect_sorted(n, BlockRule::Pairs);
}

ParityStats min_parity_stats(const Partition& p) {
  ParityStats s;
  for (const auto& b : p.blocks()) {
    if (b.front() % 2 == 0) {
      ++s.even_min;
    } else {
      ++s.odd_min;
    }
  }
  return s;
}

Partition nc_to_pairing(const Partition& p) {
  require(p.size() >= 1 && 2 * p.size() <= Partition::kMaxSize, "partition too large for pairing map");
  require(p.is_noncrossing(), "nc_to_pairing needs a noncrossing partition");
  const int n = p.size();
  std::vector<int> remaining(n);
  for (int i = 0; i < n; ++i) remaining[i] = i + 1;
  std::vector<std::vector<int>> pairs;
  while (!remaining.empty()) {
    // Find a block occupying a contiguous run of the remaining elements.
    std::size_t start = 0;
    std::size_t stop = 0;
    bool found = false;
    for (std::size_t s = 0; s < remaining.size() && !found; ++s) {
      int b = p.block_of(remaining[s]);
      if (s > 0 && p.block_of(remaining[s - 1]) == b) continue;
      std::size_t e = s;
      while (e + 1 < remaining.size() && p.block_of(remaining[e + 1]) == b) ++e;
      bool rest = false;
      for (std::size_t j = 0; j < remaining.size() && !rest; ++j)
        rest = (j < s || j > e) && p.block_of(remaining[j]) == b;
      if (!rest) {
        start = s;
        stop = e;
        found = true;
      }
    }
    if (!found) throw ValidationError("no interval block found");
    auto y = [](int i) { return 2 * i - 1; };
    auto z = [](int i) { return 2 * i; };
    pairs.push_back({y(remaining[start]), z(remaining[stop])});
    for (std::size_t j = start; j < stop; ++j) pairs.push_back({z(remaining[j]), y(remaining[j + 1])});
    remaining.erase(remaining.begin() + static_cast<long>(start), remaining.begin() + static_cast<long>(stop) + 1);
  }
  return Partition(2 * n, pairs);
}

namespace {

double rect_term(double lambda, const Partition& p, const std::vector<double>& c) {
  std::vector<int> size(p.block_count(), 0);
  for (int i = 1; i <= p.size(); ++i) ++size[p.block_of(i)];
  double term = std::pow(lambda, min_parity_stats(p).even_min);
  for (int s : size) term *= c[s / 2 - 1];
  return term;
}

double classical_term(const Partition& p, const std::vector<double>& c) {
  std::vector<int> size(p.block_count(), 0);
  for (int i = 1; i <= p.size(); ++i) ++size[p.block_of(i)];
  double term = 1.0;
  for (int s : size) term *= c[s - 1];
  return term;
}

}  // namespace

std::vector<double> moments_from_rect_cumulants(double lambda, const std::vector<double>& cumulants) {
  require(lambda >= 0.0 && lambda <= 1.0, "lambda must lie in [0, 1]");
  require(!cumulants.empty() && cumulants.size() <= 8, "between 1 and 8 cumulants are supported");
  std::vector<double> m(cumulants.size(), 0.0);
  for (std::size_t n = 1; n <= cumulants.size(); ++n) {
    double sum = 0.0;
    for_each_nc(static_cast<int>(2 * n), BlockRule::Even,
                [&](const Partition& p) { sum += rect_term(lambda, p, cumulants); });
    m[n - 1] = sum;
  }
  return m;
}

std::vector<double> rect_cumulants_from_moments(double lambda, const std::vector<double>& moments) {
  require(lambda >= 0.0 && lambda <= 1.0, "lambda must lie in [0, 1]");
  require(!moments.empty() && moments.size() <= 8, "between 1 and 8 moments are supported");
  std::vector<double> c(moments.size(), 0.0);
  for (std::size_t n = 1; n <= moments.size(); ++n) {
    double rest = 0.0;
    for_each_nc(static_cast<int>(2 * n), BlockRule::Even, [&](const Partition& p) {
      if (p.block_count() > 1) rest += rect_term(lambda, p, c);
    });
    c[n - 1] = moments[n - 1] - rest;
  }
  return c;
}

std::vector<double> classical_moments_from_cumulants(const std::vector<double>& cumulants) {
  require(!cumulants.empty() && cumulants.size() <= 10, "between 1 and 10 cumulants are supported");
  std::vector<double> m(cumulants.size(), 0.0);
  for (std::size_t k = 1; k <= cumulants.size(); ++k) {
    double sum = 0.0;
    for_each_partition(static_cast<int>(k), [&](const Partition& p) { sum += classical_term(p, cumulants); });
    m[k - 1] = sum;
  }
  return m;
}

std::vector<double> classical_cumulants_from_moments(const std::vector<double>& moments) {
  require(!moments.empty() && moments.size() <= 10, "between 1 and 10 moments are supported");
  std::vector<double> c(moments.size(), 0.0);
  for (std::size_t k = 1; k <= moments.size(); ++k) {
    double rest = 0.0;
    for_each_partition(static_cast<int>(k), [&](const Partition& p) {
      if (p.block_count() > 1) rest += classical_term(p, c);
    });
    c[k - 1] = moments[k - 1] - rest;
  }
  return c;
}

double mp_moment(double a, int n) {
  require(n >= 1 && n <= 12, "mp_moment needs 1 <= n <= 12");
  require(std::isfinite(a), "mp_moment parameter must be finite");
  double sum = 0.0;
  for_each_nc(2 * n, BlockRule::Pairs,
              [&](const Partition& p) { sum += std::pow(a, min_parity_stats(p).odd_min); });
  return sum;
}

std::string blocks_string(const Partition& p) {
  std::ostringstream out;
  for (const auto& b : p.blocks()) {
    out << '{';
    for (std::size_t i = 0; i < b.size(); ++i) out << (i ? " " : "") << b[i];
    out << '}';
  }
  return out.str();
}

std::string partitions_csv(const std::vector<Partition>& parts) {
  std::ostringstream out;
  out << "n,partition_id,blocks,e,o\n";
  for (std::size_t i = 0; i < parts.size(); ++i) {
    ParityStats s = min_parity_stats(parts[i]);
    out << parts[i].size() << ',' << i << ',' << blocks_string(parts[i]) << ',' << s.even_min << ','
        << s.odd_min << '\n';
  }
  return out.str();
}

}  // namespace rectfree::nc
