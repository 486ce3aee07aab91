#pragma once

// Interaction geometries: all-to-all, hypercubic lattices, Watts-Strogatz,
// Erdos-Renyi and Barabasi-Albert graphs, all carrying uniform coupling weights
// rescaled to the global normalization sum_{i != j} |J_ij| = N - 1.

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "supercoh/errors.hpp"

namespace supercoh {

enum class Sign { Attractive, Repulsive };  // Attractive stores negative weights

inline double sign_factor(Sign s) noexcept { return s == Sign::Attractive ? -1.0 : 1.0; }
const char* to_string(Sign s) noexcept;  // "-" / "+"

struct GeometryInfo {
    std::string family;  // "all", "lattice", "ws", "er", "ba", "none", "file"
    std::string params;  // human-readable parameter string for provenance
};

class InteractionNetwork {
public:
    struct Edge {
        std::int32_t i;
        std::int32_t j;  // i < j, no self-loops
        double weight;   // signed
    };

    static InteractionNetwork all_to_all(std::size_t n, Sign sign = Sign::Attractive);
    static InteractionNetwork lattice(const std::vector<std::size_t>& dims, bool periodic,
                                      Sign sign = Sign::Attractive);
    static InteractionNetwork watts_strogatz(std::size_t n, std::size_t k, double p,
                                             std::uint64_t seed, Sign sign = Sign::Attractive);
    static InteractionNetwork erdos_renyi(std::size_t n, double p, std::uint64_t seed,
                                          Sign sign = Sign::Attractive);
    static InteractionNetwork barabasi_albert(std::size_t n, std::size_t m, std::uint64_t seed,
                                              Sign sign = Sign::Attractive);
    // Edge-free network of n vertices (the J = 0 reference case).
    static InteractionNetwork none(std::size_t n);

    std::size_t size() const noexcept { return n_; }
    Sign sign() const noexcept { return sign_; }
    const std::vector<Edge>& edges() const noexcept { return edges_; }
    const GeometryInfo& geometry() const noexcept { return geometry_; }

    // Mean vertex degree over N-1; 1 for all-to-all, ~N^-1 for lattices.
    double connectivity() const noexcept;
    std::vector<std::size_t> degrees() const;
    bool is_connected() const;
    // sum_{i != j} |J_ij| (ordered pairs); equals N-1 for generator outputs.
    double total_abs_weight() const noexcept;

    // Edge-list text format: `# n=<N> sign=<+|-> family=<name> params=<...>`
    // then one `i j weight` line per undirected edge, zero-indexed.
    void save_edge_list(std::ostream& os) const;
    static InteractionNetwork load_edge_list(std::istream& is);

private:
    InteractionNetwork(std::size_t n, Sign sign, std::vector<Edge> edges, GeometryInfo geometry);

    std::size_t n_ = 0;
    Sign sign_ = Sign::Attractive;
    std::vector<Edge> edges_;
    GeometryInfo geometry_;
};

double connectivity(const InteractionNetwork& net) noexcept;

// CLI network grammar: `all`, `none`, `lattice:d=<dims>,periodic=<bool>`,
// `ws:k=<even>,p=<prob>`, `er:p=<prob>`, `ba:m=<count>`, optional `,sign=+|-`.
struct NetworkSpec {
    enum class Family { All, None, Lattice, WattsStrogatz, ErdosRenyi, BarabasiAlbert };

    Family family = Family::All;
    Sign sign = Sign::Attractive;
    std::vector<std::size_t> dims;  // lattice
    bool periodic = true;           // lattice
    std::size_t k = 4;              // ws
    double p = 0.0;                 // ws, er
    std::size_t m = 2;              // ba

    static NetworkSpec parse(const std::string& text);
    std::string canonical() const;
    // n is ignored for lattices (the dims fix it).
    InteractionNetwork build(std::size_t n, std::uint64_t seed) const;
    std::size_t vertex_count(std::size_t n) const;
};

}  // namespace supercoh
