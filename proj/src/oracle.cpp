#include "tr/oracle.hpp"

#include <atomic>
#include <cmath>
#include <list>
#include <mutex>
#include <shared_mutex>
#include <stdexcept>
#include <unordered_map>

#include "tr/rng.hpp"

namespace tr {

struct BlackBox::State {
  std::size_t d, n;
  Fn fn;
  std::size_t cap;  // 0 = unbounded
  mutable std::shared_mutex mu;
  std::unordered_map<MultiIndex, double, MultiIndexHash> cache;
  std::list<MultiIndex> lru;  // front = most recent; only kept when cap > 0
  std::unordered_map<MultiIndex, std::list<MultiIndex>::iterator,
                     MultiIndexHash>
      lru_pos;
  std::atomic<std::uint64_t> calls{0};
};

BlackBox::BlackBox(std::size_t d, std::size_t n, Fn fn,
                   std::size_t max_cache_entries)
    : s_(std::make_unique<State>()) {
  if (d == 0 || n == 0) throw std::invalid_argument("BlackBox: empty domain");
  s_->d = d;
  s_->n = n;
  s_->fn = std::move(fn);
  s_->cap = max_cache_entries;
}

BlackBox::~BlackBox() = default;
BlackBox::BlackBox(BlackBox&&) noexcept = default;
BlackBox& BlackBox::operator=(BlackBox&&) noexcept = default;

std::size_t BlackBox::dim() const { return s_->d; }
std::size_t BlackBox::grid() const { return s_->n; }
std::uint64_t BlackBox::calls() const { return s_->calls.load(); }

double BlackBox::operator()(const MultiIndex& x) {
  State& s = *s_;
  if (x.size() != s.d) throw std::out_of_range("BlackBox: index order");
  for (int v : x)
    if (v < 1 || static_cast<std::size_t>(v) > s.n)
      throw std::out_of_range("BlackBox: index value out of range");

  if (s.cap == 0) {
    {
      std::shared_lock lock(s.mu);
      auto it = s.cache.find(x);
      if (it != s.cache.end()) return it->second;
    }
    const double val = s.fn(x);
    std::unique_lock lock(s.mu);
    auto [it, inserted] = s.cache.emplace(x, val);
    if (inserted) s.calls.fetch_add(1);
    return it->second;
  }

  // bounded cache: hits must refresh recency, so take the exclusive lock
  std::unique_lock lock(s.mu);
  auto it = s.cache.find(x);
  if (it != s.cache.end()) {
    s.lru.splice(s.lru.begin(), s.lru, s.lru_pos[x]);
    return it->second;
  }
  lock.unlock();
  const double val = s.fn(x);
  lock.lock();
  auto [it2, inserted] = s.cache.emplace(x, val);
  if (inserted) {
    s.calls.fetch_add(1);
    s.lru.push_front(x);
    s.lru_pos[x] = s.lru.begin();
    if (s.cache.size() > s.cap) {
      const MultiIndex& victim = s.lru.back();
      s.cache.erase(victim);
      s.lru_pos.erase(victim);
      s.lru.pop_back();
    }
  }
  return it2->second;
}

BlackBox toy_oracle(std::size_t d, std::size_t n) {
  return BlackBox(d, n, [d, n](const MultiIndex& x) {
    double sq = 0.0;
    for (std::size_t k = 0; k < d; ++k) {
      const double t = n == 1 ? 0.0
                              : static_cast<double>(x[k] - 1) /
                                    static_cast<double>(n - 1);
      sq += t * t;
    }
    return 1.0 / std::sqrt(1.0 + sq);
  });
}

BlackBox ising_oracle(std::size_t d, double beta, std::vector<double> levels) {
  if (beta <= 0.0) throw std::invalid_argument("ising_oracle: beta <= 0");
  if (levels.empty()) throw std::invalid_argument("ising_oracle: no levels");
  const std::size_t n = levels.size();
  return BlackBox(d, n, [d, beta, levels = std::move(levels)](
                            const MultiIndex& x) {
    // ordered transfer-matrix product with per-step rescaling
    double p00 = 0, p01 = 0, p10 = 0, p11 = 0;
    double logscale = 0.0;
    for (std::size_t k = 0; k < d; ++k) {
      const double bj = beta * levels[static_cast<std::size_t>(x[k] - 1)];
      const double up = std::exp(bj), dn = std::exp(-bj);
      if (k == 0) {
        p00 = up; p01 = dn; p10 = dn; p11 = up;
      } else {
        const double q00 = p00 * up + p01 * dn;
        const double q01 = p00 * dn + p01 * up;
        const double q10 = p10 * up + p11 * dn;
        const double q11 = p10 * dn + p11 * up;
        p00 = q00; p01 = q01; p10 = q10; p11 = q11;
      }
      const double m = std::max(std::max(std::abs(p00), std::abs(p01)),
                                std::max(std::abs(p10), std::abs(p11)));
      p00 /= m; p01 /= m; p10 /= m; p11 /= m;
      logscale += std::log(m);
    }
    const double tr = p00 + p11;
    if (!(tr > 0.0))
      throw std::domain_error("ising_oracle: nonpositive rescaled trace");
    return -(std::log(tr) + logscale) / beta;
  });
}

BlackBox pde_oracle(std::size_t d, std::vector<double> levels) {
  if (levels.empty()) throw std::invalid_argument("pde_oracle: no levels");
  for (double a : levels)
    if (a <= 0.0) throw std::invalid_argument("pde_oracle: nonpositive level");
  const std::size_t n = levels.size();
  return BlackBox(d, n,
                  [d, levels = std::move(levels)](const MultiIndex& x) {
                    double sum = 0.0;
                    for (std::size_t k = 0; k < d; ++k)
                      sum += levels[static_cast<std::size_t>(x[k] - 1)];
                    return static_cast<double>(d) / sum;
                  });
}

BlackBox synthetic_tr_oracle(TensorRing ring) {
  const std::size_t d = ring.d(), n = ring.n();
  return BlackBox(d, n, [ring = std::move(ring)](const MultiIndex& x) {
    return eval_tr(ring, x);
  });
}

TensorRing gibbs_chain_ring(std::size_t d, std::size_t n, std::size_t r,
                            std::uint64_t seed, double mix) {
  if (d == 0 || n == 0 || r == 0)
    throw std::invalid_argument("gibbs_chain_ring: empty shape");
  if (mix < 0.0) throw std::invalid_argument("gibbs_chain_ring: negative mix");
  Rng rng(seed);
  // moderate log-normal spread keeps the positive cone narrow enough for the
  // chain to stay well conditioned at every d used in the tests
  constexpr double kSpread = 0.35;
  std::vector<TRCore> cores;
  cores.reserve(d);
  for (std::size_t k = 0; k < d; ++k) {
    TRCore c(r, n, r);
    for (std::size_t v = 1; v <= n; ++v) {
      std::vector<double> p(r), q(r);
      for (std::size_t a = 0; a < r; ++a) p[a] = std::exp(kSpread * rng.normal());
      for (std::size_t b = 0; b < r; ++b) q[b] = std::exp(kSpread * rng.normal());
      for (std::size_t b = 0; b < r; ++b)
        for (std::size_t a = 0; a < r; ++a) {
          double w = p[a] * q[b];
          if (mix > 0.0) w += mix * std::exp(kSpread * rng.normal());
          c.at(a, static_cast<int>(v), b) = w;
        }
    }
    cores.push_back(std::move(c));
  }
  return TensorRing(std::move(cores));
}

}  // namespace tr
