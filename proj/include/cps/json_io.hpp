#pragma once

// JSON documents for spaces, points, measures, open sets, lsc functions,
// binary representations and randomness tests.

#include <string>
#include <variant>

#include <nlohmann/json.hpp>

#include "cps/binaryrep.hpp"
#include "cps/randomness.hpp"

namespace cps::io {

using nlohmann::json;

/// Malformed or ill-typed document. `field` names the failed precondition.
class DocumentError : public std::invalid_argument {
public:
	DocumentError(std::string field, const std::string &message)
	: std::invalid_argument(message), field(std::move(field))
	{}
	std::string field;
};

/// Inline JSON when the text starts with '{', '[' or '"'; otherwise a file path.
json load_document(const std::string &text_or_path);

json rational_json(const Rational &q);
Rational parse_rational_json(const json &j, const std::string &field);

/// "unit_interval", "cantor" or {"product": [a, b]}; also accepts {"space": ...}.
SpacePtr parse_space(const json &j);
json space_json(const MetricSpace &space);

/// A raw index, {"index": n}, {"rational": "p/q"}, {"word": "0110"} or
/// {"pair": [a, b]} on products.
IdealIndex parse_ideal(const MetricSpace &space, const json &j);
json ideal_json(const MetricSpace &space, IdealIndex i);

/// {"ideal": X}, {"ideal_stream": [X, ...], "constant_from": k},
/// {"quadratic": {"a": "p/q", "b": "p/q", "d": n}} for a + b*sqrt(d) in
/// [0, 1], or any ideal form.
PointDescriptor parse_point(SpacePtr space, const json &j);

/// {"atoms": [{"point": X, "weight": "p/q"}, ...]}
IdealMeasure parse_ideal_measure(const MetricSpace &space, const json &j);
json ideal_measure_json(const MetricSpace &space, const IdealMeasure &mu);

/// Atoms, {"builtin": "lebesgue_unit"}, {"builtin": "bernoulli", "p": "1/3"},
/// {"builtin": "dirac", "point": X}, {"convex_combo": [{"weight", "measure"}]}
/// or {"stages": [atoms, ...]}. `space` may be null for builtins.
MeasurePtr parse_measure(SpacePtr space, const json &j);

/// {"balls": [{"center": X, "radius": "q"}]}, {"sequence": [...]},
/// {"union": [...]}, {"intersection": [...]} or {"empty": true}.
REOpenSet parse_set(SpacePtr space, const json &j);

/// {"basics": [{"step": {...}} | {"hat": {...}}], "combine": "sup"},
/// {"combine": {"weighted_sum": [{"weight", "f"}]}}, {"combine": {"sup": [f, ...]}},
/// {"scale": {"factor", "f"}}, {"indicator": set} or {"zero": true}.
LscFunction parse_function(SpacePtr space, const json &j);

/// {"space", "measure", "basis", "budget", "descriptor_digest"?}. The basis
/// is {"builtin": "dyadic" | "cylinders", "levels": n} or a list of
/// {"center": X, "sqrt2_times": "q"} / {"center": X, "seed": ["lo", "hi"]}.
RepPtr parse_rep(const json &j);
json rep_json(const BinaryRep &rep, std::size_t balls, Stage through);

using TestDoc = std::variant<IntegralTest, MLTest>;

/// {"kind": "ml", "levels": [set, ...], "certificate": ...},
/// {"kind": "ml", "builtin": "zero_prefix"} or
/// {"kind": "integral", "f": function, "certificate": ...}.
TestDoc parse_test(MeasurePtr measure, const json &j);

} // namespace cps::io
