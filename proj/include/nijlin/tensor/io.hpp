#pragma once

#include "nijlin/series/io.hpp"
#include "nijlin/tensor/tensor.hpp"

namespace nijlin {

/// `{vars, truncation, entries: [[…]]}`, row index = output component. Each
/// entry is canonical polynomial text.
template <Coefficient F>
Json operator_to_json(const OperatorField<F>& R);

/// Entries may be polynomial text, numbers or structured series objects.
template <Coefficient F>
OperatorField<F> operator_from_json(const Json& j, typename F::Context ctx = {});

/// `{vars, truncation, reliable_degree, components: {"k;i,j": text}}` with
/// only the i < j half listed.
template <Coefficient F>
Json two_form_to_json(const TwoFormValued<F>& T, const VarList& vars);

template <Coefficient F>
Json vector_field_to_json(const VectorField<F>& v);

}  // namespace nijlin
