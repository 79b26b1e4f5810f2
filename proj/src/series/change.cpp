#include "nijlin/series/change.hpp"

#include "nijlin/error.hpp"

namespace nijlin {

namespace {

template <Coefficient F>
std::vector<Series<F>> identity_map(const VarList& vars, int n, const typename F::Context& ctx) {
  std::vector<Series<F>> out;
  for (std::size_t i = 0; i < vars.size(); ++i) out.push_back(Series<F>::variable(vars, n, i, ctx));
  return out;
}

}  // namespace

template <Coefficient F>
void require_tangent_to_identity(const std::vector<Series<F>>& map) {
  if (map.empty()) throw DomainError("empty coordinate map");
  if (map.size() != map.front().nvars()) throw MismatchError("coordinate map needs one component per variable");
  for (std::size_t i = 0; i < map.size(); ++i) {
    map[i].require_compatible(map.front());
    if (map[i].truncation() < 1) continue;
    const auto id = Series<F>::variable(map[i].vars(), map[i].truncation(), i, map[i].context());
    if (!(map[i].truncated_to(1) == id)) {
      throw DomainError("coordinate change is not the identity up to first order (component " +
                        std::to_string(i) + ")");
    }
  }
}

template <Coefficient F>
std::vector<Series<F>> invert_map(const std::vector<Series<F>>& forward) {
  require_tangent_to_identity(forward);
  const auto& vars = forward.front().vars();
  const int n = forward.front().truncation();
  const auto ctx = forward.front().context();
  const auto id = identity_map<F>(vars, n, ctx);
  std::vector<Series<F>> higher;
  for (std::size_t i = 0; i < forward.size(); ++i) higher.push_back(forward[i] - id[i]);

  // ψ = x − H(ψ); each pass fixes at least one more degree.
  std::vector<Series<F>> psi = id;
  for (int pass = 0; pass <= n + 1; ++pass) {
    auto h = compose_many<F>(higher, psi);
    std::vector<Series<F>> next;
    for (std::size_t i = 0; i < id.size(); ++i) next.push_back(id[i] - h[i]);
    if (next == psi) return psi;
    psi = std::move(next);
  }
  throw DomainError("formal inverse did not stabilise");
}

template <Coefficient F>
FormalChange<F> FormalChange<F>::identity(const VarList& vars, int truncation, typename F::Context ctx) {
  auto id = identity_map<F>(vars, truncation, ctx);
  return FormalChange({}, id, id);
}

template <Coefficient F>
FormalChange<F> FormalChange<F>::from_step(int degree, std::vector<S> parts) {
  if (parts.empty()) throw DomainError("empty coordinate step");
  if (degree < 2) throw DomainError("coordinate steps must have degree at least 2");
  for (const auto& p : parts) {
    if (!p.is_homogeneous(degree)) throw DomainError("step part is not homogeneous of its degree");
  }
  auto forward = identity_map<F>(parts.front().vars(), parts.front().truncation(), parts.front().context());
  if (forward.size() != parts.size()) throw MismatchError("coordinate step needs one part per variable");
  for (std::size_t i = 0; i < parts.size(); ++i) forward[i] += parts[i];
  auto inverse = invert_map(forward);
  std::vector<Step> steps;
  bool trivial = true;
  for (const auto& p : parts) trivial = trivial && p.is_zero();
  if (!trivial) steps.push_back({degree, std::move(parts)});
  return FormalChange(std::move(steps), std::move(forward), std::move(inverse));
}

template <Coefficient F>
FormalChange<F> FormalChange<F>::from_forward(std::vector<S> forward) {
  require_tangent_to_identity(forward);
  const auto& vars = forward.front().vars();
  const int n = forward.front().truncation();
  const auto ctx = forward.front().context();
  const auto id = identity_map<F>(vars, n, ctx);

  // G = G' ∘ (x + P_k) with P_k the lowest nonlinear slice of G − x; G' has
  // no degree-k slice left, so peeling k = 2, 3, … terminates at N.
  std::vector<Step> steps;
  std::vector<S> rest = forward;
  for (int k = 2; k <= n; ++k) {
    std::vector<S> parts;
    bool trivial = true;
    for (std::size_t i = 0; i < rest.size(); ++i) {
      parts.push_back((rest[i] - id[i]).homogeneous_part(k));
      trivial = trivial && parts.back().is_zero();
    }
    if (trivial) continue;
    std::vector<S> step_map = id;
    for (std::size_t i = 0; i < parts.size(); ++i) step_map[i] += parts[i];
    rest = compose_many<F>(rest, invert_map(step_map));
    steps.push_back({k, std::move(parts)});
  }
  auto inverse = invert_map(forward);
  return FormalChange(std::move(steps), std::move(forward), std::move(inverse));
}

template <Coefficient F>
bool FormalChange<F>::is_identity() const {
  for (std::size_t i = 0; i < forward_.size(); ++i) {
    if (!(forward_[i] == S::variable(vars(), truncation(), i, forward_[i].context()))) return false;
  }
  return true;
}

template <Coefficient F>
FormalChange<F> FormalChange<F>::then(const FormalChange& next) const {
  if (next.dim() != dim()) throw MismatchError("composing coordinate changes of different dimension");
  for (std::size_t i = 0; i < dim(); ++i) next.forward_[i].require_compatible(forward_[i]);
  std::vector<Step> steps = steps_;
  steps.insert(steps.end(), next.steps_.begin(), next.steps_.end());
  return FormalChange(std::move(steps), compose_many<F>(next.forward_, forward_),
                      compose_many<F>(inverse_, next.inverse_));
}

template <Coefficient F>
FormalChange<F> FormalChange<F>::inverted() const {
  return from_forward(inverse_);
}

template class FormalChange<Rational>;
template class FormalChange<BigFloat>;

#define NIJLIN_INSTANTIATE(F)                                                             \
  template std::vector<Series<F>> invert_map<F>(const std::vector<Series<F>>&);           \
  template void require_tangent_to_identity<F>(const std::vector<Series<F>>&);

NIJLIN_INSTANTIATE(Rational)
NIJLIN_INSTANTIATE(BigFloat)

}  // namespace nijlin
