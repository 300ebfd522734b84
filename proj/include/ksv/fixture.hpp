#pragma once

#include "ksv/exactnum.hpp"
#include "ksv/quatalg.hpp"
#include "ksv/rational.hpp"

#include <json.hpp>

#include <fstream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

namespace ksv {

/// Fixture file could not be read or violates a declared invariant.
class fixture_error : public precondition_error {
  public:
    using precondition_error::precondition_error;
};

/// Quaternion order together with its declared data.
///
/// JSON layout (all rationals are strings "p/q"; field elements are coordinate lists on the integral
/// basis, or a single string when g = 1):
///
///     { "name": ..., "comment": ...,
///       "field": { "min_poly": [...], "integral_basis": [[...], ...] },
///       "quaternion": { "a": x, "b": x, "order_basis": [[4g rationals], ...] },
///       "d_B": x, "mu": [4g rationals], "a_pure": [4g rationals],
///       "scaling": { "lambda": x } }
struct Fixture {
    std::string name;
    std::string comment;
    TotallyRealField field;
    QuaternionAlgebra algebra;
    QuatOrder order;
    FieldElement d_B;
    QuatElement mu;
    QuatElement a_pure;
    std::optional<FieldElement> lambda;
};

namespace detail {

inline Rational json_rational(const nlohmann::json& j, const std::string& where) {
    try {
        if (j.is_string()) return parse_rational(j.get<std::string>());
        if (j.is_number_integer()) return Rational(j.get<long long>());
    } catch (const std::exception& e) {
        throw fixture_error(where + ": " + e.what());
    }
    throw fixture_error(where + ": expected a rational string");
}

inline std::vector<Rational> json_rationals(const nlohmann::json& j, const std::string& where) {
    if (!j.is_array()) throw fixture_error(where + ": expected an array");
    std::vector<Rational> out;
    for (std::size_t k = 0; k < j.size(); ++k) out.push_back(json_rational(j[k], where + "[" + std::to_string(k) + "]"));
    return out;
}

inline const nlohmann::json& require(const nlohmann::json& j, const std::string& key, const std::string& where) {
    if (!j.is_object() || !j.contains(key)) throw fixture_error(where + ": missing \"" + key + "\"");
    return j.at(key);
}

inline FieldElement json_field_element(const TotallyRealField& F, const nlohmann::json& j, const std::string& where) {
    std::vector<Rational> c = j.is_array() ? json_rationals(j, where) : std::vector<Rational>{json_rational(j, where)};
    if (c.size() != F.degree())
        throw fixture_error(where + ": expected " + std::to_string(F.degree()) + " coordinates, got " + std::to_string(c.size()));
    return F.element(c);
}

inline QuatElement json_quat(const QuaternionAlgebra& B, const nlohmann::json& j, const std::string& where) {
    auto c = json_rationals(j, where);
    if (c.size() != B.rational_dim())
        throw fixture_error(where + ": expected " + std::to_string(B.rational_dim()) + " coordinates, got " +
                            std::to_string(c.size()));
    return B.from_rational(c);
}

inline RationalMatrix json_matrix(const nlohmann::json& j, const std::string& where) {
    if (!j.is_array() || j.empty()) throw fixture_error(where + ": expected a non-empty array of rows");
    std::vector<std::vector<Rational>> rows;
    for (std::size_t k = 0; k < j.size(); ++k) rows.push_back(json_rationals(j[k], where + "[" + std::to_string(k) + "]"));
    for (const auto& r : rows)
        if (r.size() != rows.front().size()) throw fixture_error(where + ": ragged rows");
    return RationalMatrix::from_rows(rows);
}

}  // namespace detail

/// Parses and revalidates a fixture; the first violated invariant is reported.
inline Fixture parse_fixture(const nlohmann::json& j) {
    using namespace detail;
    auto stage = [](const std::string& what, auto&& fn) {
        try {
            return fn();
        } catch (const fixture_error&) {
            throw;
        } catch (const precondition_error& e) {
            throw fixture_error(what + ": " + e.what());
        }
    };
    const auto& fj = require(j, "field", "fixture");
    auto mp = json_rationals(require(fj, "min_poly", "field"), "field.min_poly");
    std::vector<Integer> min_poly;
    for (const auto& c : mp) {
        if (!is_integral(c)) throw fixture_error("field.min_poly: coefficients must be integers");
        min_poly.push_back(num(c));
    }
    TotallyRealField F = stage("field", [&] { return TotallyRealField(min_poly, json_matrix(require(fj, "integral_basis", "field"), "field.integral_basis")); });

    const auto& qj = require(j, "quaternion", "fixture");
    QuaternionAlgebra B = stage("quaternion", [&] {
        return QuaternionAlgebra(json_field_element(F, require(qj, "a", "quaternion"), "quaternion.a"),
                                 json_field_element(F, require(qj, "b", "quaternion"), "quaternion.b"));
    });
    QuatOrder O = stage("quaternion.order_basis", [&] { return QuatOrder(B, json_matrix(require(qj, "order_basis", "quaternion"), "quaternion.order_basis")); });

    FieldElement dB = json_field_element(F, require(j, "d_B", "fixture"), "d_B");
    auto disc = stage("d_B", [&] { return reduced_discriminant(O); });
    if (disc.norm != abs(norm(dB)))
        throw fixture_error("d_B: declared norm " + to_string(abs(norm(dB))) + " differs from the order discriminant " +
                            to_string(disc.norm));

    QuatElement mu = json_quat(B, require(j, "mu", "fixture"), "mu");
    stage("mu", [&] {
        FieldElement mu2 = validate_mu(mu);
        if (!O.contains(mu)) throw precondition_error("mu is not in the order");
        if (!(FractionalIdeal::principal(mu2) == FractionalIdeal::principal(dB)))
            throw precondition_error("(mu^2) differs from (d_B) as ideals");
        return 0;
    });

    QuatElement a = j.contains("a_pure") ? json_quat(B, j.at("a_pure"), "a_pure") : mu;
    std::optional<FieldElement> lambda;
    if (j.contains("scaling")) lambda = json_field_element(F, require(j.at("scaling"), "lambda", "scaling"), "scaling.lambda");

    Fixture fx{j.value("name", std::string("unnamed")), j.value("comment", std::string()), F, B, O, dB, mu, a, lambda};
    return fx;
}

inline Fixture load_fixture(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw fixture_error("cannot open fixture " + path);
    nlohmann::json j;
    try {
        in >> j;
    } catch (const nlohmann::json::exception& e) {
        throw fixture_error(path + ": " + e.what());
    }
    try {
        return parse_fixture(j);
    } catch (const fixture_error& e) {
        throw fixture_error(path + ": " + e.what());
    }
}

}  // namespace ksv
