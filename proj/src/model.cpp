#include "ltasep/model.hpp"

#include <cmath>
#include <stdexcept>

namespace ltasep {

std::string to_string(Geometry g) {
    return g == Geometry::Open ? "open" : "ring";
}

Geometry geometry_from_string(const std::string& name) {
    if (name == "open") return Geometry::Open;
    if (name == "ring") return Geometry::Ring;
    throw std::invalid_argument("unknown geometry: " + name);
}

void ModelSpec::validate() const {
    if (particle_size < 1) throw std::invalid_argument("ModelSpec: ell must be >= 1");
    if (num_sites < particle_size) throw std::invalid_argument("ModelSpec: need N >= ell");
    if (rates.sites() != num_sites)
        throw std::invalid_argument("ModelSpec: rate profile has " + std::to_string(rates.sites()) +
                                    " sites, lattice has " + std::to_string(num_sites));
    if (geometry == Geometry::Open) {
        if (!(alpha > 0.0) || !std::isfinite(alpha))
            throw std::invalid_argument("ModelSpec: alpha must be positive for open geometry");
        if (!(beta > 0.0) || !std::isfinite(beta))
            throw std::invalid_argument("ModelSpec: beta must be positive for open geometry");
    } else {
        if (ring_particles < 0)
            throw std::invalid_argument("ModelSpec: ring particle count must be nonnegative");
        if (static_cast<long long>(ring_particles) * particle_size > num_sites)
            throw std::invalid_argument("ModelSpec: M*ell exceeds ring size");
    }
}

nlohmann::json ModelSpec::to_json() const {
    nlohmann::json j{{"N", num_sites},
                     {"ell", particle_size},
                     {"geometry", to_string(geometry)},
                     {"rates", rates.to_json()},
                     {"seed", seed}};
    if (geometry == Geometry::Open) {
        j["alpha"] = alpha;
        j["beta"] = beta;
    } else {
        j["particles"] = ring_particles;
    }
    return j;
}

ModelSpec ModelSpec::from_json(const nlohmann::json& j) {
    const Geometry g = geometry_from_string(j.value("geometry", "open"));
    return ModelSpec(j.at("N").get<int>(), j.at("ell").get<int>(),
                     j.value("alpha", 0.0), j.value("beta", 0.0),
                     RateProfile::from_json(j.at("rates")), g,
                     j.value("particles", 0), j.value("seed", std::uint64_t{0}));
}

} // namespace ltasep
