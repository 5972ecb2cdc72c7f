#pragma once

#include <string>

#include <json.hpp>

#include "hpq/blocks.hpp"
#include "hpq/capon.hpp"
#include "hpq/construction.hpp"
#include "hpq/factorize.hpp"
#include "hpq/operators.hpp"

namespace hpq {

// Insertion-ordered JSON keeps artifact bytes reproducible and readable.
using Json = nlohmann::ordered_json;

// {"kx":int,"jx":int,"ky":int,"jy":int}
Json rect_to_json(const DyadicRectangle& r);
DyadicRectangle rect_from_json(const Json& j);

// {"k":int,"j":int}
Json interval_to_json(const DyadicInterval& iv);
DyadicInterval interval_from_json(const Json& j);

// {"depth":N,"terms":[{"rect":{...},"coeff":x}]}; a bare list of terms is
// accepted on input with the depth inferred.
Json expansion_to_json(const HaarExpansion& e);
HaarExpansion expansion_from_json(const Json& j);

// {"depth":N,"entries":[{"row":rect,"col":rect,"value":x}]}
Json operator_to_json(const OperatorMatrix& t);
OperatorMatrix operator_from_json(const Json& j);

// {"depth":N,"blocks":[{"index":rect,"members":[{"rect":...,"weight":w}]}]}
Json family_to_json(const BlockFamily& fam);
BlockFamily family_from_json(const Json& j);

// {"depth":N,"x_families":[...],"y_families":[...]}
Json structure_to_json(const CaponStructure& s);
CaponStructure structure_from_json(const Json& j);

Json report_to_json(const CaponReport& rep);

Json diagnostics_to_json(const ConstructionResult& res);

Json fredholm_to_json(const FredholmFactorization& f);
Eigen::MatrixXd matrix_from_json(const Json& j);  // {"rows":[[...],...]}
Json matrix_to_json(const Eigen::MatrixXd& m);

// file helpers; parse errors are reported with the offending path
Json load_json(const std::string& path);
void save_json(const std::string& path, const Json& j);

std::string format_sig(double v);  // 12 significant digits

}  // namespace hpq
