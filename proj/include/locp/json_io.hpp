#pragma once

#include <string>

#include "locp/workbench.hpp"

namespace locp {

/// Canonical serialization: fixed field order (insertion order of the
/// ordered_json tree), doubles at 17 significant digits, no NaN/Inf.
/// Identical trees produce identical bytes.
std::string canonical_dump(const Json& j);

Json load_json_file(const std::string& path);
void save_json_file(const std::string& path, const Json& j);

Json complex_to_json(const Complex& z);
Complex complex_from_json(const Json& j);

Json matrix_to_json(const Matrix& m);
Matrix matrix_from_json(const Json& j);

Json algebra_to_json(const BlockAlgebra& a);
BlockAlgebra algebra_from_json(const Json& j);

Json element_to_json(const AlgebraElement& x);
AlgebraElement element_from_json(const Json& j);

Json domain_to_json(const QuantizedDomain& d);
QuantizedDomain domain_from_json(const Json& j);

Json map_to_json(const MultilinearMap& f);
MultilinearMap map_from_json(const Json& j);

Json algebra_matrix_to_json(const AlgebraMatrix& x);

Json triple_to_json(const StinespringTriple& t);
StinespringTriple triple_from_json(const Json& j);

Json report_to_json(const MapCheckReport& r);

Json certificate_to_json(const RNCertificate& c);
RNCertificate certificate_from_json(const Json& j);

Json spec_to_json(const InstanceSpec& s);
InstanceSpec spec_from_json(const Json& j);

/// Instance bundle {"meta", "algebra", "domain", "map"}.
Json instance_to_json(const InstanceSpec& spec, const MultilinearMap& f);
MultilinearMap instance_from_json(const Json& j);

/// Accepts either a bare map object or an instance bundle.
MultilinearMap map_from_any_json(const Json& j);

}  // namespace locp
