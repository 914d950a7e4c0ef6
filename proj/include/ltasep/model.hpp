#ifndef LTASEP_MODEL_HPP
#define LTASEP_MODEL_HPP

#include <cstdint>
#include <string>

#include "json.hpp"
#include "ltasep/rate_profile.hpp"

namespace ltasep {

enum class Geometry { Open, Ring };

std::string to_string(Geometry g);
Geometry geometry_from_string(const std::string& name);

// Full parameterization of one lattice instance. For open geometry alpha and
// beta are the entrance/exit rates; for ring geometry they are unused and the
// conserved particle count M (with M*ell <= N) is supplied instead.
struct ModelSpec {
    int num_sites;              // N
    int particle_size;          // ell
    double alpha = 0.0;
    double beta = 0.0;
    RateProfile rates;
    Geometry geometry = Geometry::Open;
    int ring_particles = 0;     // M, ring only
    std::uint64_t seed = 0;

    ModelSpec(int n, int ell, double a, double b, RateProfile r,
              Geometry g = Geometry::Open, int m = 0, std::uint64_t s = 0)
        : num_sites(n), particle_size(ell), alpha(a), beta(b),
          rates(std::move(r)), geometry(g), ring_particles(m), seed(s) {
        validate();
    }

    void validate() const;

    nlohmann::json to_json() const;
    static ModelSpec from_json(const nlohmann::json& j);
};

} // namespace ltasep

#endif
