#include "sarfil/filament.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <map>

#include "sarfil/csv.hpp"
#include "sarfil/error.hpp"

namespace sarfil {

namespace {

void require_registered(const Grid& a, const Grid& b, const char* what) {
    if (!a.same_shape(b) ||
        std::abs(a.pixel_size_m - b.pixel_size_m) > 1e-9 * a.pixel_size_m)
        throw DataError(std::string(what) + ": grids are not co-registered");
}

// Monotone-chain convex hull on integer (row, col) points. Collinear points
// are dropped; integer cross products keep the hull exact.
std::vector<std::pair<int, int>> convex_hull(std::vector<std::pair<int, int>> pts) {
    std::sort(pts.begin(), pts.end());
    pts.erase(std::unique(pts.begin(), pts.end()), pts.end());
    const std::size_t n = pts.size();
    if (n <= 2) return pts;
    auto cross = [](const std::pair<int, int>& o, const std::pair<int, int>& a,
                    const std::pair<int, int>& b) {
        return static_cast<long long>(a.first - o.first) * (b.second - o.second) -
               static_cast<long long>(a.second - o.second) * (b.first - o.first);
    };
    std::vector<std::pair<int, int>> hull(2 * n);
    std::size_t k = 0;
    for (std::size_t i = 0; i < n; ++i) {
        while (k >= 2 && cross(hull[k - 2], hull[k - 1], pts[i]) <= 0) --k;
        hull[k++] = pts[i];
    }
    const std::size_t lower = k + 1;
    for (std::size_t i = n - 1; i-- > 0;) {
        while (k >= lower && cross(hull[k - 2], hull[k - 1], pts[i]) <= 0) --k;
        hull[k++] = pts[i];
    }
    hull.resize(k - 1);
    return hull;
}

} // namespace

void validate_agreement_params(const AgreementParams& p) {
    if (p.threshold <= 0.0) throw ConfigError("agreement threshold must be > 0");
    if (p.min_span_m <= 0.0) throw ConfigError("min_span_m must be > 0");
    if (p.connectivity != 4 && p.connectivity != 8)
        throw ConfigError("connectivity must be 4 or 8");
    if (p.brackets.size() != 3)
        throw ConfigError("exactly three resolution brackets are required");
}

Grid agreement_average(const Grid& c1, const Grid& c2, const Grid& c3,
                       const AgreementParams& p) {
    require_registered(c1, c2, "agreement_average");
    require_registered(c1, c3, "agreement_average");
    Grid out(c1.nrows, c1.ncols, c1.pixel_size_m, c1.origin_lat, c1.origin_lon,
             0.0, false);
    for (std::size_t k = 0; k < c1.size(); ++k) {
        if (!c1.valid[k] || !c2.valid[k] || !c3.valid[k]) continue;
        double a = c1.values[k], b = c2.values[k], c = c3.values[k];
        out.valid[k] = 1;
        const bool all_pos = a > 0.0 && b > 0.0 && c > 0.0;
        const bool all_neg = a < 0.0 && b < 0.0 && c < 0.0;
        if (!(all_pos || all_neg)) continue;
        if (std::abs(a) <= p.threshold || std::abs(b) <= p.threshold ||
            std::abs(c) <= p.threshold)
            continue;
        // Sum in value order so the result is independent of argument order.
        if (a > b) std::swap(a, b);
        if (b > c) std::swap(b, c);
        if (a > b) std::swap(a, b);
        out.values[k] = ((a + b) + c) / 3.0;
    }
    return out;
}

Labeling label_components(const Grid& avg, int connectivity) {
    if (connectivity != 4 && connectivity != 8)
        throw ConfigError("connectivity must be 4 or 8");
    Labeling out;
    out.labels = Grid(avg.nrows, avg.ncols, avg.pixel_size_m, avg.origin_lat,
                      avg.origin_lon, 0.0, true);
    out.labels.valid = avg.valid;

    static const int d4r[] = {-1, 0, 0, 1};
    static const int d4c[] = {0, -1, 1, 0};
    static const int d8r[] = {-1, -1, -1, 0, 0, 1, 1, 1};
    static const int d8c[] = {-1, 0, 1, -1, 1, -1, 0, 1};
    const int* dr = connectivity == 4 ? d4r : d8r;
    const int* dc = connectivity == 4 ? d4c : d8c;
    const int ndirs = connectivity;

    auto foreground = [&avg](int r, int c) {
        return avg.is_valid(r, c) && avg.at(r, c) != 0.0;
    };

    std::vector<std::pair<int, int>> stack;
    int next_label = 0;
    for (int i = 0; i < avg.nrows; ++i) {
        for (int j = 0; j < avg.ncols; ++j) {
            if (!foreground(i, j) || out.labels.at(i, j) != 0.0) continue;
            ++next_label;
            out.labels.at(i, j) = next_label;
            stack.push_back({i, j});
            while (!stack.empty()) {
                auto [r, c] = stack.back();
                stack.pop_back();
                for (int d = 0; d < ndirs; ++d) {
                    const int nr = r + dr[d], nc = c + dc[d];
                    if (nr < 0 || nr >= avg.nrows || nc < 0 || nc >= avg.ncols)
                        continue;
                    if (!foreground(nr, nc) || out.labels.at(nr, nc) != 0.0)
                        continue;
                    out.labels.at(nr, nc) = next_label;
                    stack.push_back({nr, nc});
                }
            }
        }
    }
    out.n_components = next_label;
    return out;
}

double component_span_m(const std::vector<std::pair<int, int>>& pixels,
                        double pixel_size_m) {
    if (pixels.empty()) return 0.0;
    const auto hull = convex_hull(pixels);
    long long best = 0;
    for (std::size_t i = 0; i < hull.size(); ++i) {
        for (std::size_t j = i + 1; j < hull.size(); ++j) {
            const long long dr = hull[i].first - hull[j].first;
            const long long dc = hull[i].second - hull[j].second;
            best = std::max(best, dr * dr + dc * dc);
        }
    }
    return std::sqrt(static_cast<double>(best)) * pixel_size_m;
}

FilamentField filter_span(const Grid& avg, const Labeling& labeling,
                          double min_span_m) {
    require_registered(avg, labeling.labels, "filter_span");
    FilamentField out;
    out.magnitude = Grid(avg.nrows, avg.ncols, avg.pixel_size_m, avg.origin_lat,
                         avg.origin_lon, 0.0, true);
    out.magnitude.valid = avg.valid;
    out.labels = out.magnitude;

    std::vector<std::vector<std::pair<int, int>>> members(
        static_cast<std::size_t>(labeling.n_components));
    for (int i = 0; i < avg.nrows; ++i)
        for (int j = 0; j < avg.ncols; ++j) {
            const int label = static_cast<int>(labeling.labels.at(i, j));
            if (label > 0) members[static_cast<std::size_t>(label - 1)].push_back({i, j});
        }

    std::vector<int> relabel(members.size(), 0);
    int next = 0;
    for (std::size_t m = 0; m < members.size(); ++m) {
        const double span = component_span_m(members[m], avg.pixel_size_m);
        if (span >= min_span_m) {
            relabel[m] = ++next;
            out.component_spans.push_back(span);
        }
    }
    for (std::size_t m = 0; m < members.size(); ++m) {
        if (relabel[m] == 0) continue;
        for (const auto& [i, j] : members[m]) {
            out.magnitude.at(i, j) = std::abs(avg.at(i, j));
            out.labels.at(i, j) = relabel[m];
        }
    }
    return out;
}

bool point_in_ring(double lat, double lon,
                   const std::vector<std::pair<double, double>>& ring) {
    const std::size_t n = ring.size();
    if (n < 3) return false;
    // Boundary test first so edge points count as inside.
    for (std::size_t i = 0, j = n - 1; i < n; j = i++) {
        const double y1 = ring[j].first, x1 = ring[j].second;
        const double y2 = ring[i].first, x2 = ring[i].second;
        const double cross = (x2 - x1) * (lat - y1) - (y2 - y1) * (lon - x1);
        if (cross == 0.0 && lon >= std::min(x1, x2) && lon <= std::max(x1, x2) &&
            lat >= std::min(y1, y2) && lat <= std::max(y1, y2))
            return true;
    }
    bool inside = false;
    for (std::size_t i = 0, j = n - 1; i < n; j = i++) {
        const double y1 = ring[j].first, x1 = ring[j].second;
        const double y2 = ring[i].first, x2 = ring[i].second;
        if ((y2 > lat) != (y1 > lat)) {
            const double x_cross = x2 + (lat - y2) * (x1 - x2) / (y1 - y2);
            if (lon < x_cross) inside = !inside;
        }
    }
    return inside;
}

namespace {

bool segments_properly_intersect(std::pair<double, double> a,
                                 std::pair<double, double> b,
                                 std::pair<double, double> c,
                                 std::pair<double, double> d) {
    auto orient = [](std::pair<double, double> p, std::pair<double, double> q,
                     std::pair<double, double> r) {
        const double v = (q.first - p.first) * (r.second - p.second) -
                         (q.second - p.second) * (r.first - p.first);
        return v > 0.0 ? 1 : (v < 0.0 ? -1 : 0);
    };
    const int o1 = orient(a, b, c), o2 = orient(a, b, d);
    const int o3 = orient(c, d, a), o4 = orient(c, d, b);
    return o1 != 0 && o2 != 0 && o3 != 0 && o4 != 0 && o1 != o2 && o3 != o4;
}

void validate_domain(const DomainPolygon& d) {
    if (d.vertices.size() < 3)
        throw DataError("domain '" + d.name + "' needs at least 3 vertices");
    const std::size_t n = d.vertices.size();
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = i + 1; j < n; ++j) {
            // Adjacent edges share an endpoint; skip those.
            if (j == i + 1 || (i == 0 && j == n - 1)) continue;
            if (segments_properly_intersect(d.vertices[i], d.vertices[(i + 1) % n],
                                            d.vertices[j], d.vertices[(j + 1) % n]))
                throw DataError("domain '" + d.name + "' ring self-intersects");
        }
    }
    double lat_min = 1e9, lat_max = -1e9, lon_min = 1e9, lon_max = -1e9;
    for (const auto& [lat, lon] : d.vertices) {
        lat_min = std::min(lat_min, lat);
        lat_max = std::max(lat_max, lat);
        lon_min = std::min(lon_min, lon);
        lon_max = std::max(lon_max, lon);
    }
    // The wind gridbox must be inside or adjacent (within half a degree).
    const double pad = 0.5;
    if (d.era5_lat < lat_min - pad || d.era5_lat > lat_max + pad ||
        d.era5_lon < lon_min - pad || d.era5_lon > lon_max + pad)
        throw DataError("domain '" + d.name + "' wind gridbox is far from the ring");
}

} // namespace

std::vector<DomainPolygon> load_domains(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open domains file: " + path);
    std::map<std::string, DomainPolygon> by_name;
    std::map<std::string, std::vector<std::pair<int, std::pair<double, double>>>> verts;
    std::vector<std::string> order;
    std::string line;
    int line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        const std::string t = trim(line);
        if (t.empty() || t[0] == '#') continue;
        auto fields = split_csv(t);
        if (!fields.empty() && fields[0] == "name") continue;
        const std::string where = path + ":" + std::to_string(line_no);
        if (fields.size() == 4) {
            const std::string& name = fields[0];
            const int k = static_cast<int>(parse_int(fields[1], where + " vertex_index"));
            const double lat = parse_double(fields[2], where + " lat");
            const double lon = parse_double(fields[3], where + " lon");
            if (!by_name.count(name)) {
                by_name[name].name = name;
                order.push_back(name);
            }
            verts[name].push_back({k, {lat, lon}});
        } else if (fields.size() == 3) {
            const std::string& name = fields[0];
            const double lat = parse_double(fields[1], where + " era5_lat");
            const double lon = parse_double(fields[2], where + " era5_lon");
            if (!by_name.count(name)) {
                by_name[name].name = name;
                order.push_back(name);
            }
            by_name[name].era5_lat = lat;
            by_name[name].era5_lon = lon;
        } else {
            throw DataError(where + ": expected name,vertex_index,lat,lon or name,era5_lat,era5_lon");
        }
    }
    std::vector<DomainPolygon> out;
    for (const auto& name : order) {
        DomainPolygon d = by_name[name];
        auto& vs = verts[name];
        std::sort(vs.begin(), vs.end(),
                  [](const auto& a, const auto& b) { return a.first < b.first; });
        for (const auto& [k, v] : vs) {
            (void)k;
            d.vertices.push_back(v);
        }
        // Drop an explicit closing vertex.
        if (d.vertices.size() > 1 && d.vertices.front() == d.vertices.back())
            d.vertices.pop_back();
        validate_domain(d);
        out.push_back(std::move(d));
    }
    return out;
}

std::optional<DomainContrast> domain_contrast(const FilamentField& field,
                                              const DomainPolygon& domain,
                                              double min_coverage_frac) {
    const Grid& mag = field.magnitude;
    if (mag.empty()) return std::nullopt;

    // Polygon area in the local equirectangular plane of this grid.
    const double cos_lat = std::cos(mag.origin_lat * 0.017453292519943295);
    auto to_xy = [&](double lat, double lon) {
        return std::pair<double, double>{
            (lon - mag.origin_lon) * kMetersPerDegree * cos_lat,
            (mag.origin_lat - lat) * kMetersPerDegree};
    };
    double area2 = 0.0;
    const std::size_t n = domain.vertices.size();
    for (std::size_t i = 0, j = n - 1; i < n; j = i++) {
        const auto [xj, yj] = to_xy(domain.vertices[j].first, domain.vertices[j].second);
        const auto [xi, yi] = to_xy(domain.vertices[i].first, domain.vertices[i].second);
        area2 += xj * yi - xi * yj;
    }
    const double area_m2 = std::abs(area2) / 2.0;
    const double area_px = area_m2 / (mag.pixel_size_m * mag.pixel_size_m);

    double sum = 0.0;
    std::size_t overlap = 0;
    for (int i = 0; i < mag.nrows; ++i) {
        const double lat = mag.lat_of_row(i);
        for (int j = 0; j < mag.ncols; ++j) {
            if (!mag.is_valid(i, j)) continue;
            if (!point_in_ring(lat, mag.lon_of_col(j), domain.vertices)) continue;
            sum += std::abs(mag.at(i, j));
            ++overlap;
        }
    }
    if (overlap == 0) return std::nullopt;
    if (static_cast<double>(overlap) < min_coverage_frac * area_px) return std::nullopt;
    return DomainContrast{sum / static_cast<double>(overlap), overlap};
}

} // namespace sarfil
