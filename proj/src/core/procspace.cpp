#include "mapple/procspace.hpp"

#include "mapple/error.hpp"

#include <boost/container/small_vector.hpp>

namespace mapple {

std::string_view proc_kind_name(ProcKind kind) noexcept {
  switch (kind) {
    case ProcKind::CPU: return "CPU";
    case ProcKind::GPU: return "GPU";
    case ProcKind::OMP: return "OMP";
  }
  return "?";
}

std::optional<ProcKind> parse_proc_kind(std::string_view name) noexcept {
  if (name == "CPU") return ProcKind::CPU;
  if (name == "GPU") return ProcKind::GPU;
  if (name == "OMP") return ProcKind::OMP;
  return std::nullopt;
}

std::string to_string(const Transform& t) {
  return std::visit(
      [](const auto& x) -> std::string {
        using T = std::decay_t<decltype(x)>;
        if constexpr (std::is_same_v<T, Split>)
          return "split(" + std::to_string(x.dim) + "," + std::to_string(x.factor) + ")";
        else if constexpr (std::is_same_v<T, Merge>)
          return "merge(" + std::to_string(x.p) + "," + std::to_string(x.q) + ")";
        else if constexpr (std::is_same_v<T, Swap>)
          return "swap(" + std::to_string(x.p) + "," + std::to_string(x.q) + ")";
        else
          return "slice(" + std::to_string(x.dim) + "," + std::to_string(x.low) + "," +
                 std::to_string(x.high) + ")";
      },
      t);
}

ProcSpace::ProcSpace(MachineShape machine) : machine_(machine) {
  if (machine.nodes <= 0 || machine.procs_per_node <= 0)
    throw Error(Errc::InvalidArgument, "machine extents must be positive");
  shapes_.push_back(Tuple{machine.nodes, machine.procs_per_node});
}

bool ProcSpace::has_slice() const noexcept {
  for (const auto& t : chain_)
    if (std::holds_alternative<Slice>(t)) return true;
  return false;
}

ProcSpace ProcSpace::with(Transform t, Tuple new_shape) const {
  ProcSpace out = *this;
  out.chain_.push_back(t);
  out.shapes_.push_back(std::move(new_shape));
  return out;
}

namespace {

void require_dim(std::size_t dim, std::size_t rank, const char* what) {
  if (dim >= rank)
    throw Error(Errc::DimOutOfRange, std::string(what) + ": dimension " + std::to_string(dim) +
                                         " out of range for rank " + std::to_string(rank));
}

}  // namespace

ProcSpace ProcSpace::split(std::size_t dim, std::int64_t factor) const {
  const Tuple& s = shape();
  require_dim(dim, s.size(), "split");
  if (factor <= 0 || s[dim] % factor != 0)
    throw Error(Errc::NonDivisibleSplit, "split factor " + std::to_string(factor) +
                                             " does not divide extent " + std::to_string(s[dim]));
  Tuple next;
  for (std::size_t t = 0; t < s.size(); ++t) {
    if (t == dim) {
      next.push_back(factor);
      next.push_back(s[dim] / factor);
    } else {
      next.push_back(s[t]);
    }
  }
  return with(Split{dim, factor}, std::move(next));
}

ProcSpace ProcSpace::merge(std::size_t p, std::size_t q) const {
  const Tuple& s = shape();
  require_dim(p, s.size(), "merge");
  require_dim(q, s.size(), "merge");
  if (p >= q)
    throw Error(Errc::BadDimOrder, "merge requires p < q, got p=" + std::to_string(p) +
                                       " q=" + std::to_string(q));
  Tuple next;
  for (std::size_t t = 0; t < s.size(); ++t) {
    if (t == p)
      next.push_back(checked_mul(s[p], s[q]));
    else if (t != q)
      next.push_back(s[t]);
  }
  return with(Merge{p, q}, std::move(next));
}

ProcSpace ProcSpace::swap(std::size_t p, std::size_t q) const {
  const Tuple& s = shape();
  require_dim(p, s.size(), "swap");
  require_dim(q, s.size(), "swap");
  Tuple next = s;
  std::swap(next[p], next[q]);
  return with(Swap{p, q}, std::move(next));
}

ProcSpace ProcSpace::slice(std::size_t dim, std::int64_t low, std::int64_t high) const {
  const Tuple& s = shape();
  require_dim(dim, s.size(), "slice");
  if (low < 0 || low > high || high >= s[dim])
    throw Error(Errc::BadSliceBounds, "slice bounds [" + std::to_string(low) + "," + std::to_string(high) +
                                          "] invalid for extent " + std::to_string(s[dim]));
  Tuple next = s;
  next[dim] = high - low + 1;
  return with(Slice{dim, low, high}, std::move(next));
}

ProcSpace ProcSpace::decompose(std::size_t dim, const Tuple& factors) const {
  require_dim(dim, rank(), "decompose");
  if (factors.empty()) throw Error(Errc::InvalidArgument, "decompose needs at least one factor");
  for (auto f : factors)
    if (f <= 0) throw Error(Errc::ProductMismatch, "decompose factors must be positive");
  if (factors.product() != shape()[dim])
    throw Error(Errc::ProductMismatch, "factors " + factors.to_string() + " do not multiply to extent " +
                                           std::to_string(shape()[dim]));
  // m_{n+1} = m_n.split(dim + n - 1, f_n) for 1 <= n < k.
  ProcSpace out = *this;
  for (std::size_t n = 0; n + 1 < factors.size(); ++n) out = out.split(dim + n, factors[n]);
  return out;
}

ProcSpace ProcSpace::apply(const Transform& t) const {
  return std::visit(
      [this](const auto& x) -> ProcSpace {
        using T = std::decay_t<decltype(x)>;
        if constexpr (std::is_same_v<T, Split>)
          return split(x.dim, x.factor);
        else if constexpr (std::is_same_v<T, Merge>)
          return merge(x.p, x.q);
        else if constexpr (std::is_same_v<T, Swap>)
          return swap(x.p, x.q);
        else
          return slice(x.dim, x.low, x.high);
      },
      t);
}

ProcessorCoord ProcSpace::resolve(std::span<const std::int64_t> index) const {
  const Tuple& s = shape();
  if (index.size() != s.size())
    throw Error(Errc::IndexOutOfRange, "index rank " + std::to_string(index.size()) +
                                           " does not match space rank " + std::to_string(s.size()));
  for (std::size_t t = 0; t < s.size(); ++t) {
    if (index[t] < 0 || index[t] >= s[t])
      throw Error(Errc::IndexOutOfRange, "index component " + std::to_string(index[t]) + " at dim " +
                                             std::to_string(t) + " outside extent " + std::to_string(s[t]));
  }

  using Vec = boost::container::small_vector<std::int64_t, 12>;
  Vec cur(index.begin(), index.end());
  Vec prev;
  for (std::size_t i = chain_.size(); i-- > 0;) {
    const Tuple& before = shapes_[i];
    prev.clear();
    std::visit(
        [&](const auto& x) {
          using T = std::decay_t<decltype(x)>;
          if constexpr (std::is_same_v<T, Split>) {
            for (std::size_t t = 0; t < x.dim; ++t) prev.push_back(cur[t]);
            prev.push_back(checked_add(cur[x.dim], checked_mul(cur[x.dim + 1], x.factor)));
            for (std::size_t t = x.dim + 2; t < cur.size(); ++t) prev.push_back(cur[t]);
          } else if constexpr (std::is_same_v<T, Merge>) {
            const std::int64_t sp = before[x.p];
            for (std::size_t t = 0; t < before.size(); ++t) {
              if (t == x.p)
                prev.push_back(cur[x.p] % sp);
              else if (t == x.q)
                prev.push_back(cur[x.p] / sp);
              else if (t < x.q)
                prev.push_back(cur[t]);
              else
                prev.push_back(cur[t - 1]);
            }
          } else if constexpr (std::is_same_v<T, Swap>) {
            prev.assign(cur.begin(), cur.end());
            std::swap(prev[x.p], prev[x.q]);
          } else {
            prev.assign(cur.begin(), cur.end());
            prev[x.dim] = checked_add(prev[x.dim], x.low);
          }
        },
        chain_[i]);
    for (std::size_t t = 0; t < before.size(); ++t) {
      if (prev[t] < 0 || prev[t] >= before[t])
        throw Error(Errc::IndexOutOfRange, "intermediate index escaped its space after " + to_string(chain_[i]));
    }
    cur.swap(prev);
  }
  return ProcessorCoord{cur[0], cur[1]};
}

std::vector<ProcessorCoord> ProcSpace::materialize(std::int64_t limit) const {
  const std::int64_t n = volume();
  if (n > limit)
    throw Error(Errc::TooLarge, "space of " + std::to_string(n) + " points exceeds materialization limit");
  std::vector<ProcessorCoord> out;
  out.reserve(static_cast<std::size_t>(n));
  for_each_index(shape(), [&](const Tuple& idx) { out.push_back(resolve(idx)); });
  return out;
}

std::string ProcSpace::fingerprint() const {
  std::string s = std::string(proc_kind_name(machine_.kind)) + shapes_.front().to_string();
  for (const auto& t : chain_) s += "." + to_string(t);
  return s;
}

}  // namespace mapple
