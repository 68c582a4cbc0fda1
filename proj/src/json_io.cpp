#include "lipwidth/json_io.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>

namespace lipwidth {

using nlohmann::json;

json space_to_json(const NormedSpace& space) {
  json j{{"dim", space.dim()}, {"norm", std::string(to_string(space.kind()))}};
  if (space.kind() == NormKind::WeightedLinf) j["weights"] = space.weights();
  if (space.kind() == NormKind::L1Step) j["breakpoints"] = space.breakpoints();
  return j;
}

NormedSpace space_from_json(const json& j) {
  if (!j.is_object()) throw PreconditionError("space: expected an object");
  for (auto it = j.begin(); it != j.end(); ++it) {
    const auto& k = it.key();
    if (k != "dim" && k != "norm" && k != "weights" && k != "breakpoints")
      throw PreconditionError("space: unknown field '" + k + "'");
  }
  const NormKind kind = norm_kind_from_string(j.at("norm").get<std::string>());
  switch (kind) {
    case NormKind::L1: return NormedSpace::l1(j.at("dim").get<std::size_t>());
    case NormKind::L2: return NormedSpace::l2(j.at("dim").get<std::size_t>());
    case NormKind::Linf: return NormedSpace::linf(j.at("dim").get<std::size_t>());
    case NormKind::WeightedLinf: {
      auto space = NormedSpace::weighted_linf(j.at("weights").get<std::vector<double>>());
      if (j.contains("dim") && j["dim"].get<std::size_t>() != space.dim())
        throw DimensionMismatch("space: dim disagrees with the weights");
      return space;
    }
    case NormKind::L1Step: {
      auto space = NormedSpace::l1_step(j.at("breakpoints").get<std::vector<double>>());
      if (j.contains("dim") && j["dim"].get<std::size_t>() != space.dim())
        throw DimensionMismatch("space: dim disagrees with the breakpoints");
      return space;
    }
  }
  throw PreconditionError("space: unsupported norm");
}

json set_to_json(const FiniteSet& set) {
  json j{{"space", space_to_json(set.space())}, {"points", set.points()}};
  if (!set.labels().empty()) j["labels"] = set.labels();
  return j;
}

FiniteSet set_from_json(const json& j) {
  if (!j.is_object()) throw PreconditionError("set: expected an object");
  for (auto it = j.begin(); it != j.end(); ++it) {
    const auto& k = it.key();
    if (k != "space" && k != "points" && k != "labels")
      throw PreconditionError("set: unknown field '" + k + "'");
  }
  std::vector<std::string> labels;
  if (j.contains("labels")) labels = j["labels"].get<std::vector<std::string>>();
  return {space_from_json(j.at("space")), j.at("points").get<std::vector<Point>>(), std::move(labels)};
}

namespace {

template <class... Ts>
struct Overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
Overloaded(Ts...) -> Overloaded<Ts...>;

}  // namespace

json map_to_json(const LipschitzMapSpec& map, std::size_t max_bumps) {
  json j = std::visit(
      Overloaded{
          [](const ConstantMap& m) {
            return json{{"domain", space_to_json(m.domain)},
                        {"target", space_to_json(m.target)},
                        {"value", m.value}};
          },
          [&](const BumpSum& m) {
            json b{{"domain", space_to_json(m.domain)}, {"bumps", m.size()}};
            if (!m.sparse()) b["target"] = space_to_json(m.target);
            if (!m.offset.empty()) b["offset"] = m.offset;
            if (m.size() <= max_bumps) {
              b["centers"] = m.centers;
              b["radii"] = m.radii;
              b["amplitudes"] = m.amplitudes;
              if (m.sparse())
                b["coordinates"] = m.coordinates;
              else
                b["directions"] = m.directions;
            } else {
              const auto [rmin, rmax] = std::minmax_element(m.radii.begin(), m.radii.end());
              const auto [amin, amax] = std::minmax_element(m.amplitudes.begin(), m.amplitudes.end());
              b["summary"] = {{"radius_min", *rmin},
                              {"radius_max", *rmax},
                              {"amplitude_min", *amin},
                              {"amplitude_max", *amax}};
            }
            return b;
          },
          [](const PiecewiseLinearPath& m) {
            return json{{"target", space_to_json(m.target)}, {"knots", m.knots}, {"values", m.values}};
          },
          [](const AffineBall& m) {
            return json{{"target", space_to_json(m.target)},
                        {"origin", m.origin},
                        {"gamma", m.gamma},
                        {"basis", m.basis}};
          },
          [](const ReLUNetMap& m) {
            return json{{"d", m.config.d},
                        {"W", m.config.W},
                        {"depth", m.config.depth},
                        {"grid", effective_grid(m.config)}};
          }},
      map);
  j["variant"] = variant_name(map);
  j["declared_lipschitz"] = declared_lipschitz(map);
  return j;
}

LipschitzMapSpec map_from_json(const json& j) {
  const std::string variant = j.at("variant").get<std::string>();
  if (variant == "constant") {
    return ConstantMap{space_from_json(j.at("domain")), space_from_json(j.at("target")),
                       j.at("value").get<Point>()};
  }
  if (variant == "bump_sum") {
    if (!j.contains("centers")) throw PreconditionError("bump_sum: summarised maps cannot be rebuilt");
    BumpSum m;
    m.domain = space_from_json(j.at("domain"));
    if (j.contains("target")) m.target = space_from_json(j["target"]);
    m.centers = j.at("centers").get<std::vector<Point>>();
    m.radii = j.at("radii").get<std::vector<double>>();
    m.amplitudes = j.at("amplitudes").get<std::vector<double>>();
    if (j.contains("coordinates")) m.coordinates = j["coordinates"].get<std::vector<std::size_t>>();
    if (j.contains("directions")) m.directions = j["directions"].get<std::vector<Point>>();
    if (j.contains("offset")) m.offset = j["offset"].get<Point>();
    validate(m);
    return m;
  }
  if (variant == "piecewise_linear_path") {
    PiecewiseLinearPath p{space_from_json(j.at("target")), j.at("knots").get<std::vector<double>>(),
                          j.at("values").get<std::vector<Point>>()};
    validate(p);
    return p;
  }
  if (variant == "affine_ball") {
    return AffineBall{space_from_json(j.at("target")), j.at("origin").get<Point>(),
                      j.at("gamma").get<double>(), j.at("basis").get<std::vector<Point>>()};
  }
  if (variant == "relu_net") {
    ReLUNetMap m;
    m.config.d = j.at("d").get<unsigned>();
    m.config.W = j.at("W").get<unsigned>();
    m.config.depth = j.at("depth").get<unsigned>();
    m.config.grid = j.value("grid", 0u);
    m.config.validate();
    return m;
  }
  throw PreconditionError("map: unknown variant '" + variant + "'");
}

std::string format_double(double v) {
  if (std::isnan(v)) return "NaN";
  if (std::isinf(v)) return v > 0 ? "Infinity" : "-Infinity";
  char buf[64];
  auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

std::string canonical_dump(const json& j, int indent) {
  // nlohmann::json keeps object keys sorted and prints doubles with
  // round-trip precision, so dump() is already canonical.
  return j.dump(indent);
}

}  // namespace lipwidth
