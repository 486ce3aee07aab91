#include "supercoh/network.hpp"

#include <algorithm>
#include <cmath>
#include <istream>
#include <numeric>
#include <ostream>
#include <sstream>
#include <unordered_set>

#include "supercoh/io.hpp"
#include "supercoh/rng.hpp"

namespace supercoh {

namespace {

std::uint64_t pair_key(std::size_t a, std::size_t b) {
    return (static_cast<std::uint64_t>(std::min(a, b)) << 32) |
           static_cast<std::uint64_t>(std::max(a, b));
}

std::vector<InteractionNetwork::Edge> weighted(std::vector<std::pair<std::int32_t, std::int32_t>> pairs,
                                               std::size_t n, Sign sign) {
    if (pairs.empty()) throw EmptyGraphError();
    // Uniform magnitude (N-1)/(2E) makes the ordered-pair sum of |J| equal N-1.
    const double w = sign_factor(sign) * (static_cast<double>(n) - 1.0) /
                     (2.0 * static_cast<double>(pairs.size()));
    std::vector<InteractionNetwork::Edge> edges;
    edges.reserve(pairs.size());
    for (auto [a, b] : pairs) {
        if (a > b) std::swap(a, b);
        edges.push_back({a, b, w});
    }
    std::sort(edges.begin(), edges.end(), [](const auto& l, const auto& r) {
        return std::pair(l.i, l.j) < std::pair(r.i, r.j);
    });
    return edges;
}

}  // namespace

const char* to_string(Sign s) noexcept { return s == Sign::Attractive ? "-" : "+"; }

InteractionNetwork::InteractionNetwork(std::size_t n, Sign sign, std::vector<Edge> edges,
                                       GeometryInfo geometry)
    : n_(n), sign_(sign), edges_(std::move(edges)), geometry_(std::move(geometry)) {}

InteractionNetwork InteractionNetwork::all_to_all(std::size_t n, Sign sign) {
    if (n < 2) throw ValidationError("all_to_all needs n >= 2");
    std::vector<Edge> edges;
    edges.reserve(n * (n - 1) / 2);
    const double w = sign_factor(sign) / static_cast<double>(n);
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = i + 1; j < n; ++j) {
            edges.push_back({static_cast<std::int32_t>(i), static_cast<std::int32_t>(j), w});
        }
    }
    return InteractionNetwork(n, sign, std::move(edges), {"all", "n=" + std::to_string(n)});
}

InteractionNetwork InteractionNetwork::lattice(const std::vector<std::size_t>& dims, bool periodic,
                                               Sign sign) {
    if (dims.empty()) throw ValidationError("lattice needs at least one dimension");
    std::size_t n = 1;
    for (std::size_t d : dims) {
        if (d == 0) throw ValidationError("lattice side lengths must be positive");
        n *= d;
    }
    if (n < 2) throw ValidationError("lattice needs at least 2 sites");

    // strides for row-major site indexing
    std::vector<std::size_t> stride(dims.size(), 1);
    for (std::size_t d = dims.size() - 1; d-- > 0;) stride[d] = stride[d + 1] * dims[d + 1];

    std::vector<std::pair<std::int32_t, std::int32_t>> pairs;
    std::vector<std::size_t> coord(dims.size(), 0);
    for (std::size_t site = 0; site < n; ++site) {
        for (std::size_t d = 0; d < dims.size(); ++d) {
            if (dims[d] < 2) continue;
            const bool wrap = coord[d] + 1 == dims[d];
            if (wrap && (!periodic || dims[d] == 2)) continue;  // side 2 wrap duplicates the +1 edge
            const std::size_t nb =
                wrap ? site - coord[d] * stride[d] : site + stride[d];
            pairs.emplace_back(static_cast<std::int32_t>(site), static_cast<std::int32_t>(nb));
        }
        for (std::size_t d = dims.size(); d-- > 0;) {
            if (++coord[d] < dims[d]) break;
            coord[d] = 0;
        }
    }

    std::ostringstream params;
    params << "d=";
    for (std::size_t d = 0; d < dims.size(); ++d) params << (d ? "x" : "") << dims[d];
    params << ",periodic=" << (periodic ? "true" : "false");
    return InteractionNetwork(n, sign, weighted(std::move(pairs), n, sign),
                              {"lattice", params.str()});
}

InteractionNetwork InteractionNetwork::watts_strogatz(std::size_t n, std::size_t k, double p,
                                                      std::uint64_t seed, Sign sign) {
    if (k % 2 != 0 || k < 2 || k >= n) throw ValidationError("watts_strogatz needs even k with 2 <= k < n");
    if (p < 0.0 || p > 1.0) throw ValidationError("rewiring probability must lie in [0,1]");

    std::vector<std::pair<std::int32_t, std::int32_t>> pairs;
    std::unordered_set<std::uint64_t> present;
    pairs.reserve(n * k / 2);
    for (std::size_t j = 1; j <= k / 2; ++j) {
        for (std::size_t i = 0; i < n; ++i) {
            const std::size_t t = (i + j) % n;
            pairs.emplace_back(static_cast<std::int32_t>(i), static_cast<std::int32_t>(t));
            present.insert(pair_key(i, t));
        }
    }

    auto gen = make_engine(derive_seed(seed, 0, 2));
    std::vector<std::size_t> degree(n, k);
    for (auto& [a, b] : pairs) {
        if (uniform01(gen) >= p) continue;
        // detach the far end, keep a; reject self-loops and duplicates
        if (degree[static_cast<std::size_t>(a)] >= n - 1) continue;
        std::size_t target;
        do {
            target = static_cast<std::size_t>(gen() % n);
        } while (target == static_cast<std::size_t>(a) ||
                 present.count(pair_key(static_cast<std::size_t>(a), target)) != 0);
        present.erase(pair_key(static_cast<std::size_t>(a), static_cast<std::size_t>(b)));
        present.insert(pair_key(static_cast<std::size_t>(a), target));
        --degree[static_cast<std::size_t>(b)];
        ++degree[target];
        b = static_cast<std::int32_t>(target);
    }

    std::ostringstream params;
    params << "k=" << k << ",p=" << format_double(p) << ",seed=" << seed;
    return InteractionNetwork(n, sign, weighted(std::move(pairs), n, sign), {"ws", params.str()});
}

InteractionNetwork InteractionNetwork::erdos_renyi(std::size_t n, double p, std::uint64_t seed,
                                                   Sign sign) {
    if (n < 2) throw ValidationError("erdos_renyi needs n >= 2");
    if (p < 0.0 || p > 1.0) throw ValidationError("edge probability must lie in [0,1]");
    auto gen = make_engine(derive_seed(seed, 0, 3));
    std::vector<std::pair<std::int32_t, std::int32_t>> pairs;
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = i + 1; j < n; ++j) {
            if (uniform01(gen) < p) {
                pairs.emplace_back(static_cast<std::int32_t>(i), static_cast<std::int32_t>(j));
            }
        }
    }
    std::ostringstream params;
    params << "p=" << format_double(p) << ",seed=" << seed;
    return InteractionNetwork(n, sign, weighted(std::move(pairs), n, sign), {"er", params.str()});
}

InteractionNetwork InteractionNetwork::barabasi_albert(std::size_t n, std::size_t m,
                                                       std::uint64_t seed, Sign sign) {
    if (m < 1 || m >= n) throw ValidationError("barabasi_albert needs 1 <= m < n");
    auto gen = make_engine(derive_seed(seed, 0, 4));

    std::vector<std::pair<std::int32_t, std::int32_t>> pairs;
    std::vector<std::int32_t> urn;  // one entry per edge endpoint; sampling is degree-proportional
    for (std::size_t i = 0; i <= m; ++i) {
        for (std::size_t j = i + 1; j <= m; ++j) {
            pairs.emplace_back(static_cast<std::int32_t>(i), static_cast<std::int32_t>(j));
            urn.push_back(static_cast<std::int32_t>(i));
            urn.push_back(static_cast<std::int32_t>(j));
        }
    }
    std::vector<std::int32_t> chosen;
    for (std::size_t v = m + 1; v < n; ++v) {
        chosen.clear();
        while (chosen.size() < m) {
            const std::int32_t t = urn[gen() % urn.size()];
            if (std::find(chosen.begin(), chosen.end(), t) == chosen.end()) chosen.push_back(t);
        }
        for (std::int32_t t : chosen) {
            pairs.emplace_back(t, static_cast<std::int32_t>(v));
            urn.push_back(t);
            urn.push_back(static_cast<std::int32_t>(v));
        }
    }
    std::ostringstream params;
    params << "m=" << m << ",seed=" << seed;
    return InteractionNetwork(n, sign, weighted(std::move(pairs), n, sign), {"ba", params.str()});
}

InteractionNetwork InteractionNetwork::none(std::size_t n) {
    if (n < 2) throw ValidationError("network needs n >= 2");
    return InteractionNetwork(n, Sign::Attractive, {}, {"none", ""});
}

double InteractionNetwork::connectivity() const noexcept {
    if (n_ < 2) return 0.0;
    const double mean_degree = 2.0 * static_cast<double>(edges_.size()) / static_cast<double>(n_);
    return mean_degree / (static_cast<double>(n_) - 1.0);
}

std::vector<std::size_t> InteractionNetwork::degrees() const {
    std::vector<std::size_t> deg(n_, 0);
    for (const auto& e : edges_) {
        ++deg[static_cast<std::size_t>(e.i)];
        ++deg[static_cast<std::size_t>(e.j)];
    }
    return deg;
}

bool InteractionNetwork::is_connected() const {
    if (n_ == 0) return false;
    std::vector<std::vector<std::int32_t>> adj(n_);
    for (const auto& e : edges_) {
        adj[static_cast<std::size_t>(e.i)].push_back(e.j);
        adj[static_cast<std::size_t>(e.j)].push_back(e.i);
    }
    std::vector<char> seen(n_, 0);
    std::vector<std::int32_t> stack{0};
    seen[0] = 1;
    std::size_t count = 1;
    while (!stack.empty()) {
        const std::int32_t v = stack.back();
        stack.pop_back();
        for (std::int32_t w : adj[static_cast<std::size_t>(v)]) {
            if (!seen[static_cast<std::size_t>(w)]) {
                seen[static_cast<std::size_t>(w)] = 1;
                ++count;
                stack.push_back(w);
            }
        }
    }
    return count == n_;
}

double InteractionNetwork::total_abs_weight() const noexcept {
    double sum = 0.0;
    for (const auto& e : edges_) sum += std::abs(e.weight);
    return 2.0 * sum;  // ordered pairs
}

void InteractionNetwork::save_edge_list(std::ostream& os) const {
    os << "# n=" << n_ << " sign=" << to_string(sign_) << " family=" << geometry_.family
       << " params=" << geometry_.params << "\n";
    for (const auto& e : edges_) {
        os << e.i << ' ' << e.j << ' ' << format_double(e.weight) << '\n';
    }
}

InteractionNetwork InteractionNetwork::load_edge_list(std::istream& is) {
    std::string line;
    std::size_t n = 0;
    Sign sign = Sign::Attractive;
    GeometryInfo geometry{"file", ""};
    std::vector<Edge> edges;
    bool header_seen = false;
    while (std::getline(is, line)) {
        if (line.empty()) continue;
        if (line.front() == '#') {
            std::istringstream hs(line.substr(1));
            std::string token;
            while (hs >> token) {
                auto eq = token.find('=');
                if (eq == std::string::npos) continue;
                const std::string key = token.substr(0, eq);
                const std::string value = token.substr(eq + 1);
                if (key == "n") n = static_cast<std::size_t>(std::stoull(value));
                else if (key == "sign") sign = value == "+" ? Sign::Repulsive : Sign::Attractive;
                else if (key == "family") geometry.family = value;
                else if (key == "params") geometry.params = value;
            }
            header_seen = true;
            continue;
        }
        std::istringstream ls(line);
        std::int64_t i = 0, j = 0;
        std::string w;
        if (!(ls >> i >> j >> w)) throw ValidationError("bad edge-list line: '" + line + "'");
        if (i == j) throw ValidationError("edge list contains a self-loop");
        edges.push_back({static_cast<std::int32_t>(std::min(i, j)),
                         static_cast<std::int32_t>(std::max(i, j)), parse_double(w)});
    }
    if (!header_seen || n < 2) throw ValidationError("edge list missing '# n=<N> ...' header");
    for (const auto& e : edges) {
        if (e.i < 0 || static_cast<std::size_t>(e.j) >= n) {
            throw ValidationError("edge endpoint out of range in edge list");
        }
    }
    return InteractionNetwork(n, sign, std::move(edges), std::move(geometry));
}

double connectivity(const InteractionNetwork& net) noexcept { return net.connectivity(); }

// --- network spec grammar ---

namespace {

struct Cursor {
    const std::string& text;
    std::size_t pos = 0;

    bool done() const { return pos >= text.size(); }
    [[noreturn]] void fail(const std::string& expected) const {
        throw ParseError("network spec: expected " + expected, pos);
    }
    std::string until(char sep) {
        std::size_t end = text.find(sep, pos);
        std::string out = text.substr(pos, end == std::string::npos ? std::string::npos : end - pos);
        pos = end == std::string::npos ? text.size() : end;
        return out;
    }
};

std::size_t parse_count(Cursor& cur, const std::string& value, const char* what) {
    try {
        std::size_t idx = 0;
        const auto v = std::stoull(value, &idx);
        if (idx != value.size()) throw std::invalid_argument(what);
        return static_cast<std::size_t>(v);
    } catch (const std::exception&) {
        cur.fail(std::string(what) + ", got '" + value + "'");
    }
}

double parse_prob(Cursor& cur, const std::string& value) {
    double p = 0.0;
    try {
        p = parse_double(value);
    } catch (const std::exception&) {
        cur.fail("probability in [0,1], got '" + value + "'");
    }
    if (p < 0.0 || p > 1.0) cur.fail("probability in [0,1], got '" + value + "'");
    return p;
}

}  // namespace

NetworkSpec NetworkSpec::parse(const std::string& text) {
    if (text.empty()) throw ParseError("network spec: expected a family name", 0);
    Cursor cur{text};
    NetworkSpec spec;

    const std::string family = cur.until(':');
    if (family == "all") spec.family = Family::All;
    else if (family == "none") spec.family = Family::None;
    else if (family == "lattice") spec.family = Family::Lattice;
    else if (family == "ws") spec.family = Family::WattsStrogatz;
    else if (family == "er") spec.family = Family::ErdosRenyi;
    else if (family == "ba") spec.family = Family::BarabasiAlbert;
    else throw ParseError("network spec: expected one of all|none|lattice|ws|er|ba", 0);

    bool have_k = false, have_p = false, have_m = false, have_d = false;
    if (!cur.done()) {
        ++cur.pos;  // ':'
        while (!cur.done()) {
            const std::size_t key_pos = cur.pos;
            std::string pair = cur.until(',');
            if (!cur.done()) ++cur.pos;
            const auto eq = pair.find('=');
            if (eq == std::string::npos) {
                throw ParseError("network spec: expected key=value", key_pos);
            }
            const std::string key = pair.substr(0, eq);
            const std::string value = pair.substr(eq + 1);
            Cursor vcur{text, key_pos + eq + 1};
            if (key == "sign") {
                if (value == "+") spec.sign = Sign::Repulsive;
                else if (value == "-") spec.sign = Sign::Attractive;
                else vcur.fail("sign=+ or sign=-");
            } else if (key == "d") {
                spec.dims.clear();
                for (const auto& side : split(value, 'x')) {
                    spec.dims.push_back(parse_count(vcur, side, "positive side length"));
                }
                have_d = true;
            } else if (key == "periodic") {
                if (value == "true" || value == "1") spec.periodic = true;
                else if (value == "false" || value == "0") spec.periodic = false;
                else vcur.fail("periodic=true or periodic=false");
            } else if (key == "k") {
                spec.k = parse_count(vcur, value, "even neighbor count k");
                if (spec.k % 2 != 0 || spec.k < 2) vcur.fail("even k >= 2");
                have_k = true;
            } else if (key == "p") {
                spec.p = parse_prob(vcur, value);
                have_p = true;
            } else if (key == "m") {
                spec.m = parse_count(vcur, value, "attachment count m >= 1");
                if (spec.m < 1) vcur.fail("attachment count m >= 1");
                have_m = true;
            } else {
                throw ParseError("network spec: unknown key '" + key + "'", key_pos);
            }
        }
    }

    switch (spec.family) {
        case Family::Lattice:
            if (!have_d) throw ParseError("network spec: lattice requires d=<dims>", text.size());
            break;
        case Family::WattsStrogatz:
            if (!have_k || !have_p)
                throw ParseError("network spec: ws requires k=<even> and p=<prob>", text.size());
            break;
        case Family::ErdosRenyi:
            if (!have_p) throw ParseError("network spec: er requires p=<prob>", text.size());
            break;
        case Family::BarabasiAlbert:
            if (!have_m) throw ParseError("network spec: ba requires m=<count>", text.size());
            break;
        default:
            break;
    }
    return spec;
}

std::string NetworkSpec::canonical() const {
    std::ostringstream os;
    switch (family) {
        case Family::All: os << "all"; break;
        case Family::None: os << "none"; break;
        case Family::Lattice: {
            os << "lattice:d=";
            for (std::size_t d = 0; d < dims.size(); ++d) os << (d ? "x" : "") << dims[d];
            os << ",periodic=" << (periodic ? "true" : "false");
            break;
        }
        case Family::WattsStrogatz: os << "ws:k=" << k << ",p=" << format_double(p); break;
        case Family::ErdosRenyi: os << "er:p=" << format_double(p); break;
        case Family::BarabasiAlbert: os << "ba:m=" << m; break;
    }
    if (sign == Sign::Repulsive) os << ",sign=+";
    return os.str();
}

InteractionNetwork NetworkSpec::build(std::size_t n, std::uint64_t seed) const {
    switch (family) {
        case Family::All: return InteractionNetwork::all_to_all(n, sign);
        case Family::None: return InteractionNetwork::none(n);
        case Family::Lattice: return InteractionNetwork::lattice(dims, periodic, sign);
        case Family::WattsStrogatz: return InteractionNetwork::watts_strogatz(n, k, p, seed, sign);
        case Family::ErdosRenyi: return InteractionNetwork::erdos_renyi(n, p, seed, sign);
        case Family::BarabasiAlbert: return InteractionNetwork::barabasi_albert(n, m, seed, sign);
    }
    throw ValidationError("unreachable network family");
}

std::size_t NetworkSpec::vertex_count(std::size_t n) const {
    if (family != Family::Lattice) return n;
    std::size_t prod = 1;
    for (std::size_t d : dims) prod *= d;
    return prod;
}

}  // namespace supercoh
